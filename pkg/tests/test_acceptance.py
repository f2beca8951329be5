"""One test per acceptance criterion; each prints its PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) to print the ten lines
without pytest.
"""
import sys

import pytest

from mvquad.acceptance import CRITERIA, KNOWN_FAILURES, negative_controls, run_criterion

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # pragma: no cover
    ACCEPTANCE_LINES = []


def _run(n):
    result = run_criterion(n)
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    for d in result.details:
        print("    " + d)
    return result


@pytest.mark.parametrize("n", [n for n in sorted(CRITERIA) if n not in KNOWN_FAILURES])
def test_criterion(n):
    result = _run(n)
    assert result.passed, result.details
    assert result.seconds < 60


@pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[8])
def test_criterion_8():
    assert _run(8).passed


@pytest.fixture(scope="module")
def controls():
    return negative_controls()


def test_criterion_8_equality_controls(controls):
    _, metrics, _ = controls
    assert metrics["controls"]
    assert all(v > 100 * 1e-8 for v in metrics["controls"].values())


def test_criterion_8_ball_inequality(controls):
    _, metrics, _ = controls
    ball = {k: v for k, v in metrics["inequalities"].items() if "SubharmonicBallIneq" in k}
    assert ball and all(v["violations"] == 0 and v["min_slack"] >= 0 for v in ball.values())


def test_criterion_8_y1sq_slack(controls):
    _, metrics, _ = controls
    for key, v in metrics["y1sq_slack"].items():
        r = float(key.split("_r")[1])
        assert v["error"] <= 1e-12 and v["slack"] >= r * r / 8


def test_criterion_8_failure_is_the_annulus_inequality(controls):
    ok, metrics, details = controls
    assert not ok and details
    assert all("SubharmonicAnnulusIneq" in d for d in details)


if __name__ == "__main__":
    bad = [r.number for r in map(_run, sorted(CRITERIA)) if not r.as_planned]
    sys.exit(1 if bad else 0)

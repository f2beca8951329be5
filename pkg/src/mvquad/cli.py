"""Command-line front end.

Subcommands: verify, coeffs, rstar, classify, probe, selftest.  Reports are
written under ``--out``; JSON reports carry a ``volatile`` section (timestamp,
wall time) that is the only part allowed to differ between identical runs.

Exit codes: 0 all checks as planned, 1 unexpected failure, 2 usage or
precondition error.
"""
import argparse
from dataclasses import dataclass, field, asdict
import datetime
import json
import sys
import time
from pathlib import Path

from . import __version__, _output
from .errors import MVQError
from .quadrature import QuadratureSpec, default_quadrature
from .solutions import CORPUS_VERSION

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
QUAD_KEYS = ("angular_nodes", "azimuth_nodes", "radial_panels", "radial_order", "grading_ratio", "log_panels")
PROBE_CONJECTURES = {"3.1": "C3_1", "5.1": "C5_1", "2q": "Q2_subharmonic"}


@dataclass
class RunConfig:
    command: str
    dimension: int = None
    quadrature: dict = field(default_factory=dict)
    tolerance: float = None
    seed: int = 0
    out: str = "mvquad-out"
    options: dict = field(default_factory=dict)

    def quadrature_spec(self, m):
        base = asdict(default_quadrature(m))
        base.update(self.quadrature)
        return QuadratureSpec(**base)

    def to_dict(self):
        d = asdict(self)
        d.pop("out")
        return d


def _header(cfg, m=None):
    head = {"tool": {"name": "mvquad", "version": __version__}, "corpus_version": CORPUS_VERSION,
            "config": cfg.to_dict()}
    if m is not None:
        head["quadrature"] = cfg.quadrature_spec(m).to_dict()
    return head


def _volatile(start):
    return {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_time_s": time.perf_counter() - start}


def stable_bytes(path):
    """JSON report bytes with the volatile section removed."""
    data = json.loads(Path(path).read_text())
    data.pop("volatile", None)
    return _output.dumps(data).encode()


def _say(cfg, text):
    if not cfg.options.get("quiet"):
        print(text)


def cmd_verify(cfg):
    from .identities import DEFAULT_TOLERANCE, IdentityId, default_plan, identity_spec, FORWARD_IDENTITIES, \
        INEQUALITY_IDENTITIES, run_suite
    from .errors import PreconditionError
    from .solutions import build_corpus

    start = time.perf_counter()
    m = cfg.dimension or 2
    ids = cfg.options.get("identity") or list(FORWARD_IDENTITIES + INEQUALITY_IDENTITIES)
    ids = [IdentityId(i) for i in ids]
    for i in ids:
        if m not in identity_spec(i).dims:
            raise PreconditionError(f"{i.value} is not defined for m = {m}")
    manifest = build_corpus(m)
    families = cfg.options.get("family")
    if families:
        for fid in families:
            manifest.get(fid)
    plan = default_plan(ids, cfg.options.get("count") or 25)
    tol = cfg.tolerance or DEFAULT_TOLERANCE
    rep = run_suite(manifest, plan, cfg.quadrature_spec(m), tol, cfg.seed, families)
    if not rep.groups:
        raise PreconditionError("no corpus family matches the requested identities")
    payload = {**_header(cfg, m), **rep.to_dict(), "volatile": _volatile(start)}
    path = _output.write_json(Path(cfg.out) / f"verify_m{m}.json", payload)
    s = rep.summary()
    _say(cfg, f"verify m={m}: {s['groups']} groups, {s['checks']} checks, "
              f"{s['unexpected_groups']} unexpected -> {path}")
    for g in rep.unexpected:
        _say(cfg, f"  unexpected: {g.identity.value} on {g.family_id} (expected {g.expected}, "
                  f"max residual {g.max_residual:.3g})")
    return EXIT_OK if not rep.unexpected else EXIT_FAIL


def cmd_coeffs(cfg):
    from .coefficients import sample_curve

    o = cfg.options
    curve = sample_curve(o["name"], cfg.dimension or 2, o["t_max"], o.get("t_min") or 0.0, o.get("samples") or 512)
    path = Path(cfg.out) / f"coeff_{o['name']}_m{cfg.dimension or 2}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    curve.write_csv(path)
    _say(cfg, str(path))
    return EXIT_OK


def cmd_rstar(cfg):
    from .coefficients import r_star

    o = cfg.options
    print(f"{r_star(cfg.dimension or 2, o['r1'], o['r2']):.16g}")
    return EXIT_OK


def cmd_classify(cfg):
    from .classifier import GRID_THRESHOLDS, GridField, Thresholds, classify, classify_grid, family_domain
    from .errors import UsageError
    from .solutions import lookup

    start = time.perf_counter()
    o = cfg.options
    if bool(o.get("input")) == bool(o.get("family")):
        raise UsageError("classify needs exactly one of --input or --family")
    if o.get("input"):
        gf = GridField.from_csv(o["input"])
        m = gf.dimension
        thr = GRID_THRESHOLDS if cfg.tolerance is None else Thresholds(equality=cfg.tolerance)
        res = classify_grid(gf, cfg.quadrature_spec(m), thr)
        name = Path(o["input"]).stem
    else:
        fam = lookup(o["family"])
        m = fam.dimension
        thr = Thresholds() if cfg.tolerance is None else Thresholds(equality=cfg.tolerance)
        res = classify(fam, family_domain(fam), cfg.quadrature_spec(m), thr)
        name = fam.id
    payload = {**_header(cfg, m), "result": res.to_dict(), "volatile": _volatile(start)}
    if o.get("write"):
        _output.write_json(Path(cfg.out) / f"classify_{_safe(name)}.json", payload)
    summary = {"verdict": res.verdict, "parameter_estimate": res.parameter_estimate,
               "parameter_spread": res.parameter_spread, "kind_hint": res.kind_hint,
               "diagnostics": res.diagnostics, **({"info": res.info} if res.info else {})}
    print(_output.dumps(payload if o.get("full") else summary), end="")
    return EXIT_OK


def _safe(name):
    import re
    return re.sub(r"[^A-Za-z0-9.=+-]+", "_", name).strip("_")


def cmd_probe(cfg):
    from . import conjectures as cj
    from .quadrature import GeometrySpec
    from .solutions import lookup

    start = time.perf_counter()
    o = cfg.options
    fam = lookup(o["family"])
    m = fam.dimension
    if cfg.dimension and cfg.dimension != m:
        from .errors import UsageError
        raise UsageError(f"family {fam.id} has dimension {m}, --m says {cfg.dimension}")
    center = tuple(o.get("center") or (0.0,) * m)
    annulus = GeometrySpec.annulus(center, o["r1"], o["r2"])
    q = cfg.quadrature_spec(m)
    conj = PROBE_CONJECTURES[o["conjecture"]]
    grid = None
    if o.get("points"):
        lo = annulus.r1 if conj == cj.Q2 else 0.05 * annulus.r2
        grid = cj.chebyshev_grid(lo, annulus.r2, o["points"])
    if conj == cj.Q2:
        rep = cj.probe_subharmonic_annulus_converse(fam, annulus, grid, q)
    else:
        eps = o.get("eps") if o.get("eps") is not None else cj.DEFAULT_EPS
        rep = cj.probe_weighted_annulus(conj, fam, annulus, grid, q, eps)
    meta = {**_header(cfg, m)}
    csv_path, json_path = cj.export_probe(rep, cfg.out, meta)
    data = json.loads(json_path.read_text())
    data["volatile"] = _volatile(start)
    _output.write_json(json_path, data)
    _say(cfg, f"{conj} {fam.id}: {len(rep.residual_curve)} points, roots {rep.roots} -> {csv_path}, {json_path}")
    return EXIT_OK


def cmd_selftest(cfg):
    from .acceptance import CRITERIA, run_criterion

    start = time.perf_counter()
    numbers = cfg.options.get("criteria") or sorted(CRITERIA)
    results, timings = [], {}
    for n in numbers:
        if n not in CRITERIA:
            from .errors import UsageError
            raise UsageError(f"unknown criterion {n}")
        r = run_criterion(n)
        results.append(r)
        timings[str(n)] = r.seconds
        _say(cfg, r.line())
    unexpected = [r.number for r in results if not r.as_planned]
    payload = {**_header(cfg), "summary": {"criteria": len(results), "passed": sum(r.passed for r in results),
                                           "unexpected": unexpected},
               "criteria": [r.to_dict() for r in results],
               "volatile": {**_volatile(start), "criterion_seconds": timings}}
    path = _output.write_json(Path(cfg.out) / "selftest.json", payload)
    _say(cfg, f"selftest: {sum(r.passed for r in results)}/{len(results)} passed, "
              f"unexpected {unexpected or 'none'} -> {path}")
    return EXIT_OK if not unexpected else EXIT_FAIL


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default mvquad-out)")
    common.add_argument("--seed", type=int, default=None, help="random seed for geometry plans (default 0)")
    common.add_argument("--config", default=None, help="key=value file supplying defaults for these options")
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--quiet", action="store_true")
    for key in QUAD_KEYS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                            type=float if key == "grading_ratio" else int)

    p = argparse.ArgumentParser(prog="mvquad", description="Mean-value quadrature identities toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the identity suite on the corpus")
    v.add_argument("--m", type=int, default=None)
    v.add_argument("--identity", action="append", default=None)
    v.add_argument("--family", action="append", default=None)
    v.add_argument("--count", type=int, default=None, help="geometries per identity and family (default 25)")

    c = sub.add_parser("coeffs", parents=[common], help="write a coefficient curve as CSV")
    c.add_argument("--name", required=True)
    c.add_argument("--m", type=int, default=None)
    c.add_argument("--t-max", dest="t_max", type=float, required=True)
    c.add_argument("--t-min", dest="t_min", type=float, default=None)
    c.add_argument("--samples", type=int, default=None)

    r = sub.add_parser("rstar", parents=[common], help="print the quadrature radius r*")
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--r1", type=float, required=True)
    r.add_argument("--r2", type=float, required=True)

    k = sub.add_parser("classify", parents=[common], help="classify a sampled grid or a corpus family")
    k.add_argument("--input", default=None, help="CSV with header x1,...,xm,u on a row-major lattice")
    k.add_argument("--family", default=None)
    k.add_argument("--full", action="store_true", help="print the full result including evidence")
    k.add_argument("--write", action="store_true", help="also write the full JSON report under --out")

    b = sub.add_parser("probe", parents=[common], help="residual probes for the open statements")
    b.add_argument("--conjecture", choices=sorted(PROBE_CONJECTURES), required=True)
    b.add_argument("--family", required=True)
    b.add_argument("--m", type=int, default=None)
    b.add_argument("--center", type=_float_list, default=None)
    b.add_argument("--r1", type=float, required=True)
    b.add_argument("--r2", type=float, required=True)
    b.add_argument("--points", type=int, default=None)
    b.add_argument("--eps", type=_float_list, default=None)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    s.add_argument("--criteria", type=_int_list, default=None)
    return p


def _apply_config(args, parser):
    """Fill options left unset on the command line from a key=value file."""
    if not args.config:
        return
    from .errors import UsageError

    sub = parser._subparsers._group_actions[0].choices[args.command]
    types = {a.dest: a.type for a in sub._actions if a.dest != "help"}
    for lineno, line in enumerate(Path(args.config).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{args.config}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types or key == "config":
            raise UsageError(f"{args.config}:{lineno}: unknown key {key!r}")
        if getattr(args, key) is None:
            conv = types[key] or str
            try:
                setattr(args, key, conv(value))
            except ValueError:
                raise UsageError(f"{args.config}:{lineno}: bad value {value!r} for {key}") from None


def parse_config(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    options = {k: v for k, v in vars(args).items()
               if k not in ("command", "m", "seed", "out", "config", "tolerance", *QUAD_KEYS) and v is not None}
    quad = {k: getattr(args, k) for k in QUAD_KEYS if getattr(args, k) is not None}
    return RunConfig(args.command, getattr(args, "m", None), quad, args.tolerance,
                     0 if args.seed is None else args.seed, args.out or "mvquad-out", options)


COMMANDS = {"verify": cmd_verify, "coeffs": cmd_coeffs, "rstar": cmd_rstar,
            "classify": cmd_classify, "probe": cmd_probe, "selftest": cmd_selftest}


def main(argv=None):
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except MVQError as exc:
        print(f"mvquad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except (MVQError, ValueError) as exc:
        print(f"mvquad {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mvquad {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends; the table lists the
best wall time of ``repeat`` runs and the largest absolute difference between
the two outputs.  A final row times a full grid classification in a
subprocess per backend (``MVQ_NO_NUMBA=1`` selects numpy).
"""
import argparse
import os
import subprocess
import sys
from timeit import default_timer as timer

import numpy as np

from mvquad._kernels import _numba, _numpy

END_TO_END = """
import time, numpy as np
from mvquad.classifier import GridField, classify_grid
g = GridField.from_function(lambda y: np.exp(y[..., 0]), (-1.0,) * 3, (1.0,) * 3, (96,) * 3)
t = time.perf_counter(); r = classify_grid(g); print(time.perf_counter() - t, r.verdict)
"""


def best_of(fn, repeat):
    fn()  # warm-up and JIT
    times = []
    for _ in range(repeat):
        t = timer()
        out = fn()
        times.append(timer() - t)
    return min(times), out


def cases(rng):
    t = rng.uniform(0.0, 15.0, 200_000)
    big = rng.uniform(16.0, 50.0, 200_000)
    lo, step, shape = np.array([-1.0, -1.0, -1.0]), np.full(3, 2.0 / 127), np.array([128, 128, 128])
    values = rng.normal(size=int(shape.prod()))
    pts = rng.uniform(-1.0, 1.0, (500_000, 3))
    return {
        "series I_0 (2e5 args)": lambda k: k.series(t * t / 4, 1.0, 1.0),
        "asymptotic I_1 (2e5 args)": lambda k: k.asymptotic_i(1.0, big),
        "Bessel integral J_0 (2e5 args)": lambda k: k.bessel_integral_j(0, big, 128),
        "multilinear 128^3 (5e5 pts)": lambda k: k.multilinear(values, lo, step, shape, pts),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, call in cases(rng).items():
        t_np, out_np = best_of(lambda: call(_numpy), args.repeat)
        t_nb, out_nb = best_of(lambda: call(_numba), args.repeat)
        diff = float(np.max(np.abs(np.asarray(out_np) - np.asarray(out_nb))))
        print(f"{name:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:11.2e}")
    if not args.skip_end_to_end:
        for backend, flag in (("numpy", "1"), ("numba", "0")):
            env = {**os.environ, "MVQ_NO_NUMBA": flag}
            out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True,
                                 check=True).stdout.split()
            print(f"classify_grid 96^3 exp(y1) [{backend}]: {float(out[0]):.3f} s, verdict {out[1]}")


if __name__ == "__main__":
    main()

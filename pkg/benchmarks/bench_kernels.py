"""Compiled vs numpy kernels: Bessel-potential tables and truncated exponentials.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Prints the best
wall time of each backend, the speedup and the largest relative disagreement.
"""
import argparse
import timeit

import numpy as np

from kreinres import _kernels_py
from kreinres.groupweights import half_line_rule

try:
    from kreinres import _kernels
except ImportError:  # extension not built
    _kernels = None


def cases():
    t, _ = half_line_rule(40.0, 0.5)
    tau = np.linspace(-30.0, 30.0, 20001)
    for sigma in (0.5, 1.5, 3.0):
        yield f"bessel_table sigma={sigma:g} ({t.size} nodes)", "bessel_table", (sigma, t)
    for k in (1, 3):
        yield f"truncated_exp k={k} ({tau.size} points)", "truncated_exp", (k, tau)


def result(mod, name, args):
    out = getattr(mod, name)(*args)
    return out[0] if name == "bessel_table" else out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; build with "
              "`python3 setup.py build_ext --inplace`")
        return
    print(f"{'case':44s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for label, name, fargs in cases():
        tp = min(timeit.repeat(lambda: result(_kernels_py, name, fargs), number=1,
                               repeat=args.repeat))
        tc = min(timeit.repeat(lambda: result(_kernels, name, fargs), number=1,
                               repeat=args.repeat))
        a, b = result(_kernels_py, name, fargs), result(_kernels, name, fargs)
        diff = float(np.nanmax(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"{label:44s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()

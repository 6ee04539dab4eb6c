"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--paths 1000000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from cvarhedge import _kernels_py

try:
    from cvarhedge import _kernels as compiled
except ImportError:
    compiled = None


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<10s} {best * 1e3:9.2f} ms")
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--paths", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    n = args.paths
    backends = [("python", _kernels_py)]
    if compiled is None:
        print("compiled extension not built; timing the fallback only")
    else:
        backends.insert(0, ("compiled", compiled))

    out = np.empty(n)
    prices = np.empty(n)
    _kernels_py.gbm_terminal(1, 0, 100.0, 0.08, 0.2, prices)
    strikes = np.array([80.0, 90.0, 100.0, 110.0, 120.0])
    z = np.array([0.5, 1.0, 1.5, 2.0, 2.5])

    cases = {
        "normals": lambda k: (lambda: k.fill_normals(1, 0, out)),
        "gbm_terminal": lambda k: (lambda: k.gbm_terminal(1, 0, 100.0, 0.08, 0.2, out)),
        "portfolio_gains": lambda k: (
            lambda: k.portfolio_gains(prices, strikes, z, 10.0, 0.97, 1000.0, out)
        ),
    }
    for name, make in cases.items():
        print(f"{name} ({n} paths)")
        times = {label: bench(label, make(k), args.repeat) for label, k in backends}
        if len(times) == 2:
            print(f"  speedup    {times['python'] / times['compiled']:9.1f}x")


if __name__ == "__main__":
    main()

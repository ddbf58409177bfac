"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from selfsim import _backend


def _cases(k):
    nodes = k.dopri_adaptive(1.0, 0.0, 0.0, -1.0, 1.0, 10.0, 1e-10, 1e-10,
                             1e-3, 0.1, 200000, 0.0)
    eta, f, g, dg = (np.ascontiguousarray(a) for a in nodes[:4])
    d2g = -(g * g * eta + f * dg * eta + f * g)
    query = np.linspace(0.0, eta[-1], 10000)
    return {
        "dopri_adaptive (rtol 1e-10, [0, 10])":
            lambda: k.dopri_adaptive(1.0, 0.0, 0.0, -1.0, 1.0, 10.0, 1e-10, 1e-10,
                                     1e-3, 0.1, 200000, 0.0),
        "rk4_samples (h 1e-4, 1e5 steps)":
            lambda: k.rk4_samples(1.0, 0.0, 0.0, -1.0, 1.0, 1e-4, 100000, 100),
        "hermite_eval (1e4 queries)":
            lambda: k.hermite_eval(eta, f, g, dg, d2g, query),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    backends = _backend.available()
    timings = {}
    for name in backends:
        for label, fn in _cases(_backend.load(name)).items():
            number = 1 if name == "python" else 10
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            timings.setdefault(label, {})[name] = best
    header = f"{'kernel':40s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, row in timings.items():
        line = f"{label:40s}" + "".join(f"{row[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{row['python'] / row['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()

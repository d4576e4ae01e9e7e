"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-``repeat`` wall time per call for every
importable backend, and the speedup of the compiled one.
"""

from __future__ import annotations

import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from onionlearn import _kernels
from onionlearn.harness.dataset import generate_records
from onionlearn.harness.evaluation import learn_records

KERNELS = ("hull_indices", "peel_layers", "shift_distances")


@contextmanager
def using(backend):
    impl = _kernels.backends()[backend]
    saved = {name: getattr(_kernels, name) for name in KERNELS}
    for name in KERNELS:
        setattr(_kernels, name, getattr(impl, name))
    try:
        yield impl
    finally:
        for name, fn in saved.items():
            setattr(_kernels, name, fn)


def cases():
    rng = np.random.default_rng(0)
    small = np.unique(rng.random((12, 2)), axis=0)
    large = np.unique(rng.random((2000, 2)), axis=0)
    cloud = np.unique(rng.random((400, 2)), axis=0)
    a, b = rng.normal(size=64), rng.normal(size=64)
    va, vb = rng.normal(size=80), rng.normal(size=80)
    records = generate_records(["triangle", "square", "hexagon", "star"], 15, 0.02, seed=1)

    def lsort(xy):
        return xy[np.lexsort((xy[:, 1], xy[:, 0]))]

    small, large, cloud = lsort(small), lsort(large), lsort(cloud)
    return [
        ("hull, 12 points", lambda k: k.hull_indices(small, 1e-12), 2000),
        ("hull, 2000 points", lambda k: k.hull_indices(large, 1e-12), 50),
        ("peel, 400 points", lambda k: k.peel_layers(cloud, 1e-12), 20),
        ("shift, geometric 64", lambda k: k.shift_distances(a, b, 1, _kernels.EUCLIDEAN), 2000),
        ("shift, visual 5x16", lambda k: k.shift_distances(va, vb, 5, _kernels.CORRELATION), 2000),
        ("learn stream, 60 records", lambda k: learn_records(records), 1),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    names = sorted(_kernels.backends())
    print(f"{'case':<28}" + "".join(f"{n:>14}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn, number in cases():
        times = {}
        for name in names:
            with using(name) as impl:
                best = min(timeit.repeat(lambda: fn(impl), number=number, repeat=args.repeat))
            times[name] = best / number
        row = f"{label:<28}" + "".join(f"{times[n] * 1e6:>11.1f} us" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

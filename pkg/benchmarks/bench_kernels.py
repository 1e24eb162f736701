"""Compare the compiled and pure-Python arithmetic kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--p "z^3 - z"]
"""

import argparse
import random
import timeit

from danielewski import _pykernels, kernels
from danielewski.closure import lie_closure, preset
from danielewski.polyparse import QQ
from danielewski.ring import DefiningPoly, Ring

try:
    from danielewski import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def dense_elem(ring, deg, rng):
    terms = {}
    for key in ring.normal_monomials(deg):
        terms[key] = QQ(rng.randint(-9, 9), rng.randint(1, 5))
    return {k: v for k, v in terms.items() if v}


def echelon_workload(ncols, rng):
    rows = {}
    for piv in range(0, ncols, 2):
        row = {piv: QQ(1)}
        for col in range(piv + 1, ncols):
            if rng.random() < 0.25:
                row[col] = QQ(rng.randint(-5, 5), rng.randint(1, 4))
        rows[piv] = {k: v for k, v in row.items() if v}
    vecs = [{c: QQ(rng.randint(-5, 5)) for c in range(ncols) if rng.random() < 0.3}
            for _ in range(50)]
    return sorted(rows), rows, [{k: v for k, v in v.items() if v} for v in vecs]


def use_backend(module):
    kernels.mul_terms = module.mul_terms
    kernels.reduce_vector = module.reduce_vector


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--p", default="z^3 - z")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ring = Ring(DefiningPoly.parse(args.p))
    ring.ppow(16)
    rng = random.Random(args.seed)
    a, b = dense_elem(ring, 6, rng), dense_elem(ring, 6, rng)
    margs = (ring._ppow, ring.hshift, ring.hbias, ring.guard, True)
    pivots, rows, vecs = echelon_workload(400, rng)
    fields, _ = preset(ring, "full6")

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled extension not built; timing the pure-Python kernels only")

    workloads = {
        "mul_terms (degree 6 x 6)": lambda m: m.mul_terms(a, b, *margs),
        "reduce_vector (400 cols, 50 vecs)": lambda m: [m.reduce_vector(v, pivots, rows) for v in vecs],
        "full6 closure (D_target 5)": lambda m: (use_backend(m), lie_closure(fields, 5)),
    }
    print(f"p = {ring.p}, best of {args.repeat}")
    print(f"{'workload':36s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    for label, fn in workloads.items():
        best = [min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for _, m in backends]
        cells = "".join(f"{t * 1e3:10.2f}ms" for t in best)
        speed = f"{best[0] / best[1]:10.2f}x" if len(best) == 2 else ""
        print(f"{label:36s}{cells}{speed}")


if __name__ == "__main__":
    main()

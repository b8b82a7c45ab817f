"""Time the Cayley-table kernels under numba and pure numpy.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads are a symmetric group S5 (order 120), the reflection group
W(B3) x Sym4 (order 1152) and C2^7 (order 128). Every kernel is run once on
each backend before timing, so numba compilation is excluded, and the
results of the two backends are compared before any timing is reported.
"""

import argparse
import time

import numpy as np

from coxdecomp.coxeter import build_group, disjoint_union, finite_type
from coxdecomp.grouptheory import kernels
from coxdecomp.grouptheory.cayley import abelian, symmetric


def workloads():
    w = build_group(disjoint_union(finite_type("B", 3), finite_type("A", 3))).cayley_group(2000)
    return {"S5": symmetric(5).table, "W(B3xA3)": w.table, "C2^7": abelian([2] * 7).table}


def calls(table):
    n = table.shape[0]
    inv = np.argmin(table, axis=1).astype(np.int64)
    gens = np.array([1, n // 2, n - 1], dtype=np.int64)
    members = np.arange(0, n, 3, dtype=np.int64)
    half = np.arange(n // 2, dtype=np.int64)
    return {
        "closure": (table, gens),
        "conjugacy_labels": (table, inv),
        "element_orders": (table,),
        "extend_hom": (table, gens, table, gens),
        "centralizer_mask": (table, members),
        "product_mask": (table, half, half),
        "is_latin": (table,),
        "associativity_witness": (table, np.arange(min(n, 8), dtype=np.int64)),
    }


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.numba_impl is None:
        print("numba is not importable; only numpy timings are available")
    backends = [b for b in (kernels.numpy_impl, kernels.numba_impl) if b is not None]
    print(f"{'workload':<10} {'kernel':<22} " + " ".join(f"{b.name:>10}" for b in backends) + "   speedup")
    for wname, table in workloads().items():
        for kname, kargs in calls(table).items():
            outs = [getattr(b, kname)(*kargs) for b in backends]  # warm-up and parity
            for o in outs[1:]:
                assert np.array_equal(np.asarray(o), np.asarray(outs[0])), (wname, kname)
            times = [bench(getattr(b, kname), kargs, args.repeat) for b in backends]
            speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
            print(f"{wname:<10} {kname:<22} " + " ".join(f"{t * 1e3:9.3f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()

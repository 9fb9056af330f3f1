"""Compare the compiled elimination kernel with the pure-Python one.

Run with ``python3 benchmarks/bench_snf.py``.  Two workloads:

* seeded random square integer matrices, reduced by each kernel after checking
  that both give the same invariant factors;
* homology of every function complex of the bundled ``point_n4`` scenario,
  with the backend switched at the dispatcher.

The compiled kernel works in int64 and hands a matrix to the modular Python
path on overflow; those hand-offs are counted and included in its time, so
sizes where every matrix overflows show no speedup.
"""
import argparse
import random
import time
from contextlib import contextmanager

from relcx.cli import load_scenario
from relcx.funcx import FunctionComplexes
from relcx.homalg import _kernel, _snf_py
from relcx.homalg.linalg import invariant_factors
from relcx.ordsets import subsets


def random_matrix(rng, n, density, bound):
    return [[rng.randint(-bound, bound) if rng.random() < density else 0 for _ in range(n)] for _ in range(n)]


@contextmanager
def backend(name):
    saved = _kernel._compiled
    if name == "python":
        _kernel._compiled = None
    try:
        yield
    finally:
        _kernel._compiled = saved


def overflows(mats):
    count = 0
    for M in mats:
        try:
            _kernel._compiled.dense_diagonal([r[:] for r in M])
        except OverflowError:
            count += 1
    return count


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1000


def matrices(args):
    rng = random.Random(args.seed)
    print(f"{'size':>6} {'python ms':>11} {'cython ms':>11} {'speedup':>8} {'overflows':>10}")
    for n in args.sizes:
        mats = [random_matrix(rng, n, args.density, args.bound) for _ in range(args.count)]
        for M in mats:
            if invariant_factors(_snf_py.dense_diagonal([r[:] for r in M])) != invariant_factors(_kernel.dense_diagonal(M)):
                raise SystemExit(f"kernels disagree on a {n}x{n} matrix")
        run = lambda: [_kernel.dense_diagonal(M) for M in mats]
        with backend("python"):
            t_py = timed(run, args.repeat)
        t_cy = timed(run, args.repeat)
        print(f"{n:>6} {t_py:>11.1f} {t_cy:>11.1f} {t_py / t_cy:>7.1f}x {overflows(mats):>10}")


def homology_workload(repeat):
    model = load_scenario("examples/point_n4.json").model

    def run():
        fc = FunctionComplexes(model)  # fresh, so no cached homology
        I = fc.interval()
        out = []
        for S in subsets(I.interior()):
            out.append([(h.degree, h.betti, h.torsion) for h in fc.F(I, S).homology_all()])
        out.append([(h.degree, h.betti, h.torsion) for h in fc.fcal_total(I).homology_all()])
        return out

    with backend("python"):
        ref = run()
        t_py = timed(run, repeat)
    if run() != ref:
        raise SystemExit("backends disagree on point_n4 homology")
    t_cy = timed(run, repeat)
    print(f"\npoint_n4 homology: python {t_py:.1f} ms, cython {t_cy:.1f} ms, speedup {t_py / t_cy:.1f}x")


def main(argv=None):
    p = argparse.ArgumentParser(description="Compare the compiled and pure-Python elimination kernels.")
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40, 80])
    p.add_argument("--count", type=int, default=20, help="matrices per size")
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if _kernel._compiled is None:
        print("compiled kernel not available; build the extension first")
        return 1
    matrices(args)
    homology_workload(args.repeat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

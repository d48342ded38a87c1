"""Time the compiled kernels against the pure-Python fallback.

Inputs are adjoint matrices of unipotent and Weyl-lift elements, the shapes
the slice code actually feeds to the kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--types A3,C3,G2,F4]
"""
from __future__ import annotations

import argparse
import timeit

from groupslices import _pykernels
from groupslices.chevalley import chevalley_for, weyl_lift, x_alpha
from groupslices.rootsys import build_root_system, parse_type

try:
    from groupslices import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _inputs(type_name: str):
    rs = build_root_system(parse_type(type_name))
    chev = chevalley_for(rs)
    g = x_alpha(chev, 0, 2) @ weyl_lift(chev, rs.rank - 1) @ x_alpha(chev, rs.neg(1), -3)
    h = weyl_lift(chev, 0) @ x_alpha(chev, rs.n_positive - 1, 5)
    a = [list(r) for r in g.matrix.num]
    b = [list(r) for r in h.matrix.num]
    # a rank-deficient matrix: identity minus a unipotent element
    c = [[int(i == j) * g.matrix.den - a[i][j] for j in range(len(a))] for i in range(len(a))]
    return rs.dim, a, b, c


def _time(fn, *args, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--types", default="A3,C3,G2,F4")
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; only the fallback can be timed")
    print(f"{'type':>5} {'dim':>4} {'kernel':>8} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name in args.types.split(","):
        dim, a, b, c = _inputs(name)
        for kernel, operands in (("matmul", (a, b)), ("rank", (c,)), ("inverse", (a,))):
            py_fn = getattr(_pykernels, kernel)
            t_py = _time(py_fn, *operands, repeat=args.repeat)
            if _ckernels is None:
                print(f"{name:>5} {dim:>4} {kernel:>8} {1e3 * t_py:10.3f} {'-':>10} {'-':>8}")
                continue
            c_fn = getattr(_ckernels, kernel)
            if c_fn(*operands) != py_fn(*operands):
                raise SystemExit(f"{kernel} disagrees between backends on {name}")
            t_c = _time(c_fn, *operands, repeat=args.repeat)
            print(f"{name:>5} {dim:>4} {kernel:>8} {1e3 * t_py:10.3f} {1e3 * t_c:10.3f} {t_py / t_c:8.2f}x")


if __name__ == "__main__":
    main()

"""Characteristic-polynomial probe of the subregular slice in SL(r+1).

Points of the slice are realized as (r+1)x(r+1) matrices over first-order
jets, so the Jacobian of the invariant map comes out exactly alongside the
values. Everything here is specific to type A and its defining
representation.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .chevalley import ChevalleyBasisData, GroupElement, chevalley_for, normal_representative
from .errors import InvalidType
from .qmatrix import frac_rank
from .rootsys import RootSystemData, SimpleType, build_root_system, parse_type, reduced_word
from .spectral import SlicePlan


# jets -------------------------------------------------------------------------

class Jet:
    """Exact value plus exact first partials."""

    __slots__ = ("val", "d")

    def __init__(self, val, d: Sequence = ()):
        self.val = Fraction(val)
        self.d = tuple(Fraction(x) for x in d)

    @classmethod
    def const(cls, val, n: int) -> "Jet":
        return cls(val, (0,) * n)

    @classmethod
    def var(cls, val, i: int, n: int) -> "Jet":
        return cls(val, tuple(int(j == i) for j in range(n)))

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet(other, (0,) * len(self.d))

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.val + o.val, tuple(a + b for a, b in zip(self.d, o.d)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, tuple(-a for a in self.d))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Jet(self.val * o.val, tuple(self.val * b + o.val * a for a, b in zip(self.d, o.d)))

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Fraction(k)
        return Jet(self.val / k, tuple(a / k for a in self.d))

    def __pow__(self, e: int):
        # negative powers only on the value side make sense when val != 0
        if e >= 0:
            out = Jet.const(1, len(self.d))
            for _ in range(e):
                out = out * self
            return out
        inv = Jet(1 / self.val, tuple(-a / self.val ** 2 for a in self.d))
        return inv ** (-e)

    def __eq__(self, other):
        o = self._lift(other)
        return self.val == o.val and self.d == o.d

    def __hash__(self):
        return hash((self.val, self.d))

    def __repr__(self):
        return f"Jet({self.val}, {list(map(str, self.d))})"


JetMatrix = list  # list of rows of Jet


def _jmatmul(a: JetMatrix, b: JetMatrix) -> JetMatrix:
    n, m = len(a), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for k in range(len(b)):
                x, y = a[i][k], b[k][j]
                if x.val == 0 and not any(x.d):
                    continue
                if y.val == 0 and not any(y.d):
                    continue
                acc = x * y if acc is None else acc + x * y
            row.append(acc if acc is not None else Jet.const(0, len(a[0][0].d)))
        out.append(row)
    return out


def _const_matrix(m: Sequence[Sequence], nvars: int) -> JetMatrix:
    return [[Jet.const(x, nvars) for x in row] for row in m]


def _qmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n) if a[i][k] and b[k][j]), Fraction(0))
              for j in range(n)] for i in range(n)]


def _qidentity(n: int):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# defining representation ---------------------------------------------------------

def _endpoints(root: Sequence[int]) -> tuple[int, int]:
    """``e_i - e_j`` for a type-A root in simple coordinates."""
    nz = [i for i, c in enumerate(root) if c]
    lo, hi = nz[0], nz[-1] + 1
    return (lo, hi) if root[lo] > 0 else (hi, lo)


@lru_cache(maxsize=None)
def defining_signs(rank: int) -> tuple[int, ...]:
    """Signs with ``e_alpha -> sign * E_ij`` a Lie algebra map into gl(r+1).

    Simple and negative simple root vectors go to ``+E``; the rest follow
    from brackets with simple ones and the structure constants in use.
    """
    rs = build_root_system(SimpleType("A", rank))
    chev = chevalley_for(rs)
    sign: dict[int, int] = {}
    for i in range(rank):
        sign[i] = 1
        sign[rs.neg(i)] = 1
    order = sorted(range(len(rs.roots)), key=lambda a: abs(rs.height(rs.roots[a])))
    for g in order:
        if g in sign:
            continue
        root = rs.roots[g]
        pos = rs.height(root) > 0
        for i in range(rank):
            simple = rs.simple(i) if pos else tuple(-x for x in rs.simple(i))
            rest = tuple(x - y for x, y in zip(root, simple))
            b = rs.index.get(rest)
            if b is None or b not in sign:
                continue
            a = rs.idx(simple)
            # [s_a E_a, s_b E_b] = s_a s_b c E_g, with c = +-1 from the matrix units
            ia, ja = _endpoints(simple)
            ib, jb = _endpoints(rest)
            c = 1 if ja == ib else -1
            n_ab = chev.N[(a, b)]
            sign[g] = sign[a] * sign[b] * c * (1 if n_ab > 0 else -1)
            if abs(n_ab) != 1:
                raise AssertionError("type A structure constants must be +-1")
            break
    return tuple(sign[a] for a in range(len(rs.roots)))


def root_matrix(rs: RootSystemData, a: int) -> list[list[Fraction]]:
    """Image of ``e_a`` in the defining representation."""
    n = rs.rank + 1
    i, j = _endpoints(rs.roots[a])
    m = [[Fraction(0)] * n for _ in range(n)]
    m[i][j] = Fraction(defining_signs(rs.rank)[a])
    return m


def _x_defining(rs: RootSystemData, a: int, t) -> list[list[Fraction]]:
    n = rs.rank + 1
    m = _qidentity(n)
    i, j = _endpoints(rs.roots[a])
    m[i][j] += defining_signs(rs.rank)[a] * Fraction(t)
    return m


def _torus_exponents(lam: Sequence[int]) -> list[int]:
    """Diagonal exponents ``a_j`` with ``a_j - a_{j+1} = lam_j`` and last entry 0."""
    r = len(lam)
    return [sum(lam[k] for k in range(j, r)) for j in range(r + 1)]


def lift_word(rs: RootSystemData, word, s_word=None) -> list[list[Fraction]]:
    """GL(r+1) matrix of a group word; ``("s", p)`` uses ``s_word`` raised to ``p``.

    Torus letters are lifted with integer exponents, so the result lives in GL
    rather than SL; conjugation-invariant data is unaffected.
    """
    if rs.type.family != "A":
        raise InvalidType("defining-representation lifts exist for type A only")
    n = rs.rank + 1
    out = _qidentity(n)
    for item in word:
        kind = item[0]
        if kind == "x":
            m = _x_defining(rs, item[1], item[2])
        elif kind == "h":
            t = Fraction(item[2])
            m = [[Fraction(0)] * n for _ in range(n)]
            for j, e in enumerate(_torus_exponents(item[1])):
                m[j][j] = t ** e
        elif kind == "s":
            if s_word is None:
                raise ValueError("word mentions s but no representative word was given")
            base = lift_word(rs, s_word)
            p = item[1]
            if p < 0:
                base = _qinverse(base)
                p = -p
            m = _qidentity(n)
            for _ in range(p):
                m = _qmul(m, base)
        else:  # pragma: no cover
            raise ValueError(kind)
        out = _qmul(out, m)
    return out


def _qinverse(m):
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c])
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


# invariants --------------------------------------------------------------------

def _charpoly_coeffs(m, zero, one) -> list:
    """``c_1 .. c_n`` of ``det(lambda I - m)`` by Faddeev-LeVerrier."""
    n = len(m)
    coeffs = []
    mk = [row[:] for row in m]  # M_1 = m
    for k in range(1, n + 1):
        tr = zero
        for i in range(n):
            tr = tr + mk[i][i]
        ck = -(tr / k) if not isinstance(tr, Fraction) else -tr / k
        coeffs.append(ck)
        if k == n:
            break
        # M_{k+1} = m (M_k + c_k I)
        shifted = [[mk[i][j] + (ck if i == j else zero) for j in range(n)] for i in range(n)]
        mk = _jmatmul(m, shifted) if isinstance(zero, Jet) else _qmul(m, shifted)
    return coeffs


def delta_coords(m) -> list:
    """Characteristic-polynomial coefficients ``c_1 .. c_r`` of an (r+1)-square matrix.

    Accepts a matrix of jets or of rationals; the constant and the
    determinant coefficient are dropped.
    """
    m = m.matrix if isinstance(m, DefiningRepElement) else m
    if isinstance(m[0][0], Jet):
        nv = len(m[0][0].d)
        coeffs = _charpoly_coeffs(m, Jet.const(0, nv), Jet.const(1, nv))
    else:
        m = [[Fraction(x) for x in row] for row in m]
        coeffs = _charpoly_coeffs(m, Fraction(0), Fraction(1))
    return coeffs[:-1]


def determinant(m) -> Fraction:
    """Exact determinant of a rational or jet matrix (value part for jets)."""
    if isinstance(m, DefiningRepElement):
        m = m.matrix
    vals = [[x.val if isinstance(x, Jet) else Fraction(x) for x in row] for row in m]
    n = len(vals)
    c = _charpoly_coeffs(vals, Fraction(0), Fraction(1))
    return c[-1] * (-1) ** n


# slice parametrization ------------------------------------------------------

@dataclass
class DefiningRepElement:
    matrix: JetMatrix
    params: tuple[Fraction, ...]

    def value(self) -> list[list[Fraction]]:
        return [[x.val for x in row] for row in self.matrix]


@dataclass
class SliceParametrization:
    plan: SlicePlan
    roots: tuple[int, ...]  # ns roots, one parameter each
    cocharacter: tuple[int, ...]  # diagonal exponents of z(u)
    s_inverse: list[list[Fraction]]
    s_inverse_word: tuple

    @property
    def nparams(self) -> int:
        return len(self.roots) + 1

    def base_params(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * len(self.roots) + (Fraction(1),)

    def __call__(self, params: Sequence) -> DefiningRepElement:
        params = tuple(Fraction(p) for p in params)
        n = self.nparams
        if len(params) != n:
            raise ValueError(f"expected {n} parameters, got {len(params)}")
        rs = self.plan.rs
        size = rs.rank + 1
        out = _const_matrix(_qidentity(size), n)
        for k, a in enumerate(self.roots):
            i, j = _endpoints(rs.roots[a])
            m = _const_matrix(_qidentity(size), n)
            m[i][j] = Jet.var(params[k], k, n) * defining_signs(rs.rank)[a]
            out = _jmatmul(out, m)
        u = Jet.var(params[-1], n - 1, n)
        if u.val == 0:
            raise ValueError("torus parameter must be nonzero")
        z = _const_matrix([[Fraction(0)] * size for _ in range(size)], n)
        for j, e in enumerate(self.cocharacter):
            z[j][j] = u ** e
        out = _jmatmul(out, z)
        out = _jmatmul(out, _const_matrix(self.s_inverse, n))
        return DefiningRepElement(out, params)

    def values(self, params: Sequence) -> list[list[Fraction]]:
        return self(params).value()


def _coroot_cocharacter(rank: int) -> tuple[int, ...]:
    """Exponents ``(1, .., 1, -r)``: fixes the first ``r - 1`` simple roots, in SL."""
    return (1,) * rank + (-rank,)


def slice_parametrization_A(rank: int, seed: int = 0) -> SliceParametrization:
    """Subregular slice ``N_s Z s^-1`` of SL(rank+1) in matrix form.

    ``s`` is represented by the product of ``w_gamma(1)`` along a reduced word;
    this lies in SL without any torus correction.
    """
    from .subregular import subregular_plan

    if rank < 2:
        raise InvalidType("the quotient probe needs rank >= 2")
    plan = subregular_plan(SimpleType("A", rank), seed)
    rs = plan.rs
    simple = [rs.roots[i] for i in plan.simple]
    red = reduced_word(rs, plan.s, simple)
    word = []
    for i in red:
        g = plan.simple[i]
        word += [("x", g, 1), ("x", rs.neg(g), -1), ("x", g, 1)]
    s_mat = lift_word(rs, word)
    s_inv_word = tuple((k, a, -t) for k, a, t in reversed(word))
    coch = _coroot_cocharacter(rank)
    lam = [coch[j] - coch[j + 1] for j in range(rank)]
    mt = list(zip(*plan.s.matrix))
    for i in range(rank):
        if sum(mt[i][j] * lam[j] for j in range(rank)) != lam[i]:
            raise AssertionError("cocharacter is not fixed by s")
    return SliceParametrization(plan, tuple(sorted(plan.ns_roots)), coch, _qinverse(s_mat), s_inv_word)


# scans -------------------------------------------------------------------------

def jacobian(point: DefiningRepElement) -> list[list[Fraction]]:
    return [list(c.d) for c in delta_coords(point)]


def _sample_params(rng: random.Random, n: int, bound: int) -> tuple[Fraction, ...]:
    ps = [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(n - 1)]
    while True:
        u = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if u:
            return tuple(ps) + (u,)


def fiber_rank_scan(rank: int, seed: int = 0, n_samples: int = 50, bound: int = 3) -> dict:
    """Exact Jacobian ranks of the invariant map along seeded slice points."""
    sp = slice_parametrization_A(rank, seed)
    rng = random.Random(seed)
    hist: Counter = Counter()
    deficient = []
    for _ in range(n_samples):
        params = _sample_params(rng, sp.nparams, bound)
        k = frac_rank(jacobian(sp(params)))
        hist[k] += 1
        if k < rank:
            deficient.append({"params": [str(p) for p in params], "rank": k})
    return {
        "type": f"A{rank}",
        "seed": seed,
        "samples": n_samples,
        "nparams": sp.nparams,
        "rank_histogram": {str(k): hist[k] for k in sorted(hist)},
        "deficient_points": deficient,
    }


def finite_difference_check(rank: int, seed: int = 0, n_points: int = 10, step=Fraction(1, 1024),
                            tol: float = 1e-6, bound: int = 3) -> dict:
    """Compare exact partials with symmetric difference quotients of the value map."""
    sp = slice_parametrization_A(rank, seed)
    rng = random.Random(seed + 1)
    step = Fraction(step)
    worst = 0.0
    for _ in range(n_points):
        params = _sample_params(rng, sp.nparams, bound)
        if params[-1] - step == 0 or params[-1] + step == 0:
            params = params[:-1] + (params[-1] + 1,)
        jac = jacobian(sp(params))

        def f(p):
            return [float(c) for c in delta_coords(sp.values(p))]

        for i in range(sp.nparams):
            up = list(params)
            dn = list(params)
            up[i] += step
            dn[i] -= step
            fu, fd = f(up), f(dn)
            for row in range(rank):
                fd_val = (fu[row] - fd[row]) / (2 * float(step))
                worst = max(worst, abs(fd_val - float(jac[row][i])))
    return {"max_error": worst, "tolerance": tol, "pass": worst <= tol}


def delta_invariance(plan: SlicePlan, n: GroupElement, y: GroupElement, chev: ChevalleyBasisData | None = None) -> bool:
    """Invariant coordinates of ``n y n^-1`` and ``y``, lifted from their words, agree."""
    rs = plan.rs
    chev = chev or chevalley_for(rs)
    s_word = normal_representative(plan, chev).element.word
    g = n @ y @ n.inverse()
    return delta_coords(lift_word(rs, g.word, s_word)) == delta_coords(lift_word(rs, y.word, s_word))


# homogeneous diagrams ----------------------------------------------------------

def homogeneous_diagram(component) -> str:
    """Simply-laced diagram attached to a simple component: B_n -> A_2n-1, C_n -> D_n+1,
    F4 -> E6, G2 -> D4; A, D and E are left alone."""
    if isinstance(component, str):
        component = parse_type(component)
    if not isinstance(component, SimpleType):
        raise InvalidType(f"not a Dynkin type: {component!r}")
    f, n = component.family, component.rank
    if f in "ADE":
        return str(component)
    if f == "B":
        return f"A{2 * n - 1}"
    if f == "C":
        return f"D{n + 1}"
    if f == "F":
        return "E6"
    if f == "G":
        return "D4"
    raise InvalidType(f"no rule for {component}")  # pragma: no cover

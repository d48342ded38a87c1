"""Chevalley basis and the adjoint group realized by exact rational matrices.

Basis order: ``e_alpha`` for every root in root-list order, then the simple
coroots ``h_1 .. h_r``. Structure constants follow the extraspecial-pair
construction with ``[e_a, e_-a] = a^vee`` and ``N_{-a,-b} = -N_{a,b}``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm
from typing import Sequence

from .errors import NormalizationFailed, NotInBigCell, ZeroParameter
from .qmatrix import QMatrix, block_matrix, solve
from .rootsys import RootSystemData, reduced_word


@dataclass
class ChevalleyBasisData:
    rs: RootSystemData
    N: dict[tuple[int, int], int]
    extraspecial: dict[int, tuple[int, int]]
    ad: list[list[list[int]]]  # integer adjoint matrix of each basis element
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.rs.dim

    @property
    def nroots(self) -> int:
        return len(self.rs.roots)

    def cartan_index(self, i: int) -> int:
        return self.nroots + i

    def root_value(self, a: int, i: int) -> int:
        """``alpha(h_i) = <alpha, alpha_i^vee>``."""
        root = self.rs.roots[a]
        return sum(root[j] * self.rs.cartan[i][j] for j in range(self.rs.rank))

    def bracket(self, x: Sequence, y: Sequence) -> list[Fraction]:
        """Bracket of two vectors given in basis coordinates."""
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            adm = self.ad[i]
            for row in range(self.dim):
                r = adm[row]
                acc = 0
                for j, yj in enumerate(y):
                    if yj and r[j]:
                        acc += r[j] * yj
                if acc:
                    out[row] += xi * acc
        return out

    def basis_vector(self, b: int) -> list[int]:
        return [int(i == b) for i in range(self.dim)]


# structure constants ---------------------------------------------------------

def _structure_constants(rs: RootSystemData):
    roots = rs.roots
    npos = rs.n_positive
    idx = rs.index

    def add(a, b):
        return idx.get(tuple(x + y for x, y in zip(roots[a], roots[b])))

    def sq(a):
        return rs.inner(roots[a], roots[a])

    def pstring(a, b):
        # largest p with b - p a a root
        p = 0
        v = roots[b]
        while True:
            v = tuple(x - y for x, y in zip(v, roots[a]))
            if v not in idx:
                return p
            p += 1

    extra = {}
    for xi in range(npos):
        if sum(roots[xi]) == 1:
            continue
        for a in range(npos):
            b = idx.get(tuple(x - y for x, y in zip(roots[xi], roots[a])))
            if b is not None and b < npos:
                extra[xi] = (a, b)
                break

    @lru_cache(maxsize=None)
    def N(a: int, b: int) -> int:
        c = add(a, b)
        if c is None:
            return 0
        apos, bpos = a < npos, b < npos
        if apos and bpos:
            if b < a:
                return -N(b, a)
            al, be = extra[c]
            p = pstring(al, be)
            if (a, b) == (al, be):
                return p + 1
            total = Fraction(0)
            ma, mb = rs.neg(al), rs.neg(be)
            d1 = add(b, ma)
            if d1 is not None:
                total += Fraction(N(b, ma) * N(a, mb), sq(d1))
            d2 = add(a, ma)
            if d2 is not None:
                total += Fraction(N(ma, a) * N(b, mb), sq(d2))
            val = Fraction(sq(c), p + 1) * total
            assert val.denominator == 1
            return int(val)
        if not apos and not bpos:
            return -N(rs.neg(a), rs.neg(b))
        t = rs.neg(c)  # a + b + t = 0
        if (t < npos) == apos:
            val = Fraction(sq(t), sq(b)) * N(t, a)
        else:
            val = Fraction(sq(t), sq(a)) * N(b, t)
        assert val.denominator == 1
        return int(val)

    table = {}
    for a in range(len(roots)):
        for b in range(len(roots)):
            if add(a, b) is not None:
                table[(a, b)] = N(a, b)
    return table, extra


def chevalley_basis(rs: RootSystemData) -> ChevalleyBasisData:
    """Structure constants and integer adjoint matrices."""
    table, extra = _structure_constants(rs)
    nr = len(rs.roots)
    r = rs.rank
    dim = nr + r
    data = ChevalleyBasisData(rs, table, extra, [])

    def col_bracket_e(a, b):
        """[e_a, basis_b] as a sparse dict."""
        if b >= nr:
            i = b - nr
            return {a: -data.root_value(a, i)} if data.root_value(a, i) else {}
        if b == rs.neg(a):
            cor = rs.coroot(rs.roots[a])
            return {nr + i: c for i, c in enumerate(cor) if c}
        n = table.get((a, b))
        if n:
            return {rs.idx(tuple(x + y for x, y in zip(rs.roots[a], rs.roots[b]))): n}
        return {}

    ad = []
    for a in range(nr):
        m = [[0] * dim for _ in range(dim)]
        for b in range(dim):
            for row, v in col_bracket_e(a, b).items():
                m[row][b] = v
        ad.append(m)
    for i in range(r):
        m = [[0] * dim for _ in range(dim)]
        for b in range(nr):
            m[b][b] = data.root_value(b, i)
        ad.append(m)
    data.ad = ad
    return data


_CHEV_CACHE: dict = {}


def chevalley_for(rs: RootSystemData) -> ChevalleyBasisData:
    key = rs.type
    if key not in _CHEV_CACHE:
        _CHEV_CACHE[key] = chevalley_basis(rs)
    return _CHEV_CACHE[key]


def root_vector_signs(rs: RootSystemData, positive) -> list[int]:
    """Signs ``eps`` with ``E_gamma = eps_gamma e_gamma`` in the sign convention
    where ``[E_-a, E_-b] = N_{a,b} E_{-a-b}`` for positive ``a, b``:
    ``+1`` on ``positive`` and ``-1`` on its negative."""
    return [1 if a in positive else -1 for a in range(len(rs.roots))]


# group elements -----------------------------------------------------------------

Word = tuple  # tuple of (kind, *params)


@dataclass(frozen=True)
class GroupElement:
    matrix: QMatrix
    word: Word | None = None

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        w = self.word + other.word if self.word is not None and other.word is not None else None
        return GroupElement(self.matrix @ other.matrix, w)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.matrix.inverse(), invert_word(self.word) if self.word is not None else None)

    def is_identity(self) -> bool:
        return self.matrix.is_identity()

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def to_json(self) -> dict:
        d = self.matrix.to_json()
        d["word"] = word_to_json(self.word)
        return d


def invert_word(word: Word) -> Word:
    out = []
    for item in reversed(word):
        kind = item[0]
        if kind == "x":
            out.append(("x", item[1], -item[2]))
        elif kind == "h":
            out.append(("h", item[1], 1 / Fraction(item[2])))
        elif kind == "s":
            out.append(("s", -item[1]))
        else:  # pragma: no cover
            raise ValueError(kind)
    return tuple(out)


def word_to_json(word: Word | None):
    if word is None:
        return None
    out = []
    for item in word:
        if item[0] == "x":
            out.append(["x", item[1], str(Fraction(item[2]))])
        elif item[0] == "h":
            out.append(["h", list(item[1]), str(Fraction(item[2]))])
        else:
            out.append(["s", item[1]])
    return out


def identity(chev: ChevalleyBasisData) -> GroupElement:
    return GroupElement(QMatrix.identity(chev.dim), ())


def _from_entries(n: int, entries: dict[tuple[int, int], Fraction]) -> QMatrix:
    d = 1
    for v in entries.values():
        d = lcm(d, Fraction(v).denominator)
    num = [[0] * n for _ in range(n)]
    for (i, j), v in entries.items():
        v = Fraction(v)
        num[i][j] = v.numerator * (d // v.denominator)
    return QMatrix(num, d)


def _ad_powers(chev: ChevalleyBasisData, a: int) -> list[dict[tuple[int, int], int]]:
    key = ("adpow", a)
    if key in chev._cache:
        return chev._cache[key]
    from . import kernels

    base = chev.ad[a]
    powers = []
    cur = base
    while any(any(r) for r in cur):
        powers.append({(i, j): v for i, r in enumerate(cur) for j, v in enumerate(r) if v})
        cur = kernels.matmul(cur, base)
    chev._cache[key] = powers
    return powers


def x_alpha(chev: ChevalleyBasisData, a: int, t) -> GroupElement:
    """``exp(t ad e_a)`` for the root with index ``a``."""
    t = Fraction(t)
    entries: dict[tuple[int, int], Fraction] = {(i, i): Fraction(1) for i in range(chev.dim)}
    if t:
        for k, pw in enumerate(_ad_powers(chev, a), start=1):
            c = t ** k / factorial(k)
            for ij, v in pw.items():
                entries[ij] = entries.get(ij, 0) + c * v
    return GroupElement(_from_entries(chev.dim, entries), (("x", a, t),))


def torus_element(chev: ChevalleyBasisData, lam: Sequence[int], t) -> GroupElement:
    """Acts on ``e_alpha`` by ``t**alpha(lam)``; ``lam`` lists the values on simple roots."""
    t = Fraction(t)
    if t == 0:
        raise ZeroParameter("torus parameter must be nonzero")
    lam = tuple(int(x) for x in lam)
    vals = []
    for a in chev.rs.roots:
        vals.append(t ** sum(x * y for x, y in zip(a, lam)))
    vals += [Fraction(1)] * chev.rs.rank
    return GroupElement(QMatrix.diagonal(vals), (("h", lam, t),))


def torus_from_values(chev: ChevalleyBasisData, tau: Sequence) -> GroupElement:
    """Torus element with value ``tau_j`` on the simple root ``alpha_j``."""
    out = identity(chev)
    r = chev.rs.rank
    for j, tj in enumerate(tau):
        if Fraction(tj) != 1:
            out = out @ torus_element(chev, [int(i == j) for i in range(r)], tj)
    return out


def weyl_lift(chev: ChevalleyBasisData, a: int) -> GroupElement:
    """``w_a(1) = x_a(1) x_{-a}(-1) x_a(1)``."""
    key = ("wlift", a)
    if key not in chev._cache:
        na = chev.rs.neg(a)
        chev._cache[key] = x_alpha(chev, a, 1) @ x_alpha(chev, na, -1) @ x_alpha(chev, a, 1)
    return chev._cache[key]


def monomial_column(m: QMatrix, col: int) -> tuple[int, Fraction] | None:
    """The single nonzero entry of a column, or None if there is not exactly one."""
    hit = None
    for i in range(m.nrows):
        v = m.num[i][col]
        if v:
            if hit is not None:
                return None
            hit = (i, Fraction(v, m.den))
    return hit


@dataclass
class NormalRepresentative:
    element: GroupElement  # s, with its full generator word
    reduced: list[int]  # reduced word, indices into plan.simple
    torus: list[Fraction]  # correction values on standard simple roots
    order_bound: int  # 2R


def normal_representative(plan, chev: ChevalleyBasisData | None = None) -> NormalRepresentative:
    """Lift of ``s`` with ``Ad s E_{+-a} = E_{+-sa}`` for every simple ``a``.

    ``E`` are the sign-adjusted root vectors of :func:`root_vector_signs`.
    """
    rs = plan.rs
    chev = chev or chevalley_for(rs)
    key = ("normal", plan.s.matrix, plan.positive)
    if key in chev._cache:
        return chev._cache[key]
    simple = [rs.roots[i] for i in plan.simple]
    red = reduced_word(rs, plan.s, simple)
    cand = identity(chev)
    for i in red:
        cand = cand @ weyl_lift(chev, plan.simple[i])
    eps = root_vector_signs(rs, plan.positive)
    consts = []
    images = []
    for g in plan.simple:
        hit = monomial_column(cand.matrix, g)
        sg = plan.s.perm[g]
        if hit is None or hit[0] != sg:
            raise NormalizationFailed(f"candidate does not map e_{g} to the line of e_{sg}")
        consts.append(hit[1] * eps[g] * eps[sg])
        images.append(rs.roots[sg])
    # solve prod_j tau_j^(Q_ij) = 1/c_i, Q rows = standard coordinates of s(gamma_i)
    r = rs.rank
    qinv = QMatrix([list(v) for v in images]).inverse()
    if qinv.den != 1:
        raise NormalizationFailed("images of simple roots do not form a lattice basis")
    tau = []
    for j in range(r):
        val = Fraction(1)
        for i in range(r):
            e = qinv.num[j][i]
            if e:
                val *= (1 / consts[i]) ** e
        tau.append(val)
    s_el = torus_from_values(chev, tau) @ cand
    # verification on E_{+-gamma}
    for g in plan.simple:
        for a in (g, rs.neg(g)):
            hit = monomial_column(s_el.matrix, a)
            sa = plan.s.perm[a]
            if hit is None or hit[0] != sa or hit[1] * eps[a] * eps[sa] != 1:
                raise NormalizationFailed(
                    f"Ad s E_{a} != E_{sa} after torus correction (coefficient {hit and hit[1]})"
                )
    bound = 2 * plan.s.order
    if not (s_el.matrix ** bound).is_identity():
        raise NormalizationFailed("(Ad s)^(2R) is not the identity")
    res = NormalRepresentative(s_el, red, tau, bound)
    chev._cache[key] = res
    return res


# big cell --------------------------------------------------------------------------

def _degree_order(chev, grading, shuffle_seed):
    nr = chev.nroots
    deg = list(grading) + [0] * chev.rs.rank
    groups: dict[int, list[int]] = {}
    for b in range(chev.dim):
        groups.setdefault(deg[b], []).append(b)
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    order, sizes = [], []
    for d in sorted(groups, reverse=True):
        g = list(groups[d])
        if rng is not None:
            rng.shuffle(g)
        order.extend(g)
        sizes.append(len(g))
    assert len(order) == chev.dim and nr <= chev.dim
    return order, sizes


def big_cell_factorize(
    chev: ChevalleyBasisData,
    g: GroupElement,
    grading: Sequence[int],
    shuffle_seed: int | None = None,
) -> tuple[GroupElement, GroupElement, GroupElement]:
    """``g = n_minus_deg . levi . n_plus_deg`` relative to an integer grading on roots.

    The first factor lies in the group of roots with negative degree, the
    second commutes with the grading, the third lies in the group of roots
    with positive degree.
    """
    order, sizes = _degree_order(chev, grading, shuffle_seed)
    pos = [0] * len(order)
    for i, b in enumerate(order):
        pos[b] = i
    a = g.matrix.permuted(order)
    nb = len(sizes)
    lo = [[None] * nb for _ in range(nb)]
    up = [[None] * nb for _ in range(nb)]
    dg = [None] * nb
    t = a
    for bi, sz in enumerate(sizes):
        rest = t.nrows - sz
        p = t.submatrix(range(sz), range(sz))
        try:
            pinv = p.inverse()
        except ZeroDivisionError:
            raise NotInBigCell(f"pivot block {bi} (size {sz}) is singular") from None
        dg[bi] = p
        if rest:
            c = t.submatrix(range(sz, t.nrows), range(sz))
            rr = t.submatrix(range(sz), range(sz, t.ncols))
            lcol = c @ pinv
            urow = pinv @ rr
            t = t.submatrix(range(sz, t.nrows), range(sz, t.ncols)) - lcol @ rr
            off = 0
            for bj in range(bi + 1, nb):
                rows = range(off, off + sizes[bj])
                lo[bj][bi] = lcol.submatrix(rows, range(sz))
                up[bi][bj] = urow.submatrix(range(sz), rows)
                off += sizes[bj]

    def assemble(kind):
        grid = []
        for i in range(nb):
            row = []
            for j in range(nb):
                if i == j:
                    row.append(dg[i] if kind == "d" else QMatrix.identity(sizes[i]))
                elif kind == "l" and i > j:
                    row.append(lo[i][j])
                elif kind == "u" and i < j:
                    row.append(up[i][j])
                else:
                    row.append(QMatrix.zeros(sizes[i], sizes[j]))
            grid.append(row)
        return block_matrix(grid).permuted(pos)

    lm, dm, um = assemble("l"), assemble("d"), assemble("u")
    if lm @ dm @ um != g.matrix:
        raise AssertionError("big cell factors do not multiply back")
    return GroupElement(lm), GroupElement(dm), GroupElement(um)


# constructive membership ---------------------------------------------------------------

def grading_element(chev: ChevalleyBasisData, simple: Sequence[int]) -> list[Fraction]:
    """Cartan coordinates of ``h`` with ``gamma(h) = 1`` for each root in ``simple``."""
    rs = chev.rs
    r = rs.rank
    rows = [[chev.root_value(g, i) for i in range(r)] for g in simple]
    return solve(rows, [1] * r)


def unipotent_coordinates(
    chev: ChevalleyBasisData,
    g: GroupElement,
    allowed: frozenset[int],
    simple: Sequence[int],
) -> Word | None:
    """Peel ``g`` into root-subgroup factors from ``allowed``.

    ``allowed`` must lie on one side of the positive system with simple
    roots ``simple``. Returns the word, or None if ``g`` is not in the group
    generated by ``allowed``.
    """
    rs = chev.rs
    nr = chev.nroots
    hc = grading_element(chev, simple)
    hvec = [Fraction(0)] * nr + list(hc)
    hval = [sum(c * chev.root_value(a, i) for i, c in enumerate(hc)) for a in range(nr)]
    u = g.matrix
    word: list = []
    for _ in range(2 * rs.n_positive + 2):
        if u.is_identity():
            return tuple(word)
        v = u.apply(hvec)
        diff = [x - y for x, y in zip(v, hvec)]
        if any(diff[nr:]):
            return None
        nz = [a for a in range(nr) if diff[a]]
        if not nz:
            return None
        d = min(abs(hval[a]) for a in nz)
        layer = [(a, -diff[a] / hval[a]) for a in nz if abs(hval[a]) == d]
        if any(a not in allowed for a, _ in layer):
            return None
        peel = identity(chev)
        for a, c in layer:
            peel = peel @ x_alpha(chev, a, c)
        u = peel.matrix.inverse() @ u
        word.extend(("x", a, c) for a, c in layer)
    return None


def torus_values(chev: ChevalleyBasisData, g: GroupElement) -> list[Fraction] | None:
    """Values on the standard simple roots if ``g`` is a torus element, else None."""
    m = g.matrix
    for i in range(m.nrows):
        for j in range(m.ncols):
            if i != j and m.num[i][j]:
                return None
    for i in range(chev.nroots, chev.dim):
        if m.num[i][i] != m.den:
            return None
    tau = [m[chev.rs.idx(chev.rs.simple(j)), chev.rs.idx(chev.rs.simple(j))] for j in range(chev.rs.rank)]
    return tau if torus_from_values(chev, tau).matrix == m else None

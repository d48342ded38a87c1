"""Root systems of the simple types and their Weyl groups, in integer coordinates.

Roots are tuples of integers in the simple-root basis. The inner product
is the symmetric gram matrix with short roots of squared length 2.

Numbering. A, B, C, D, F and G follow the usual Bourbaki pictures:
``B_r`` has ``alpha_r`` short, ``C_r`` has ``alpha_r`` long, ``D_r``
branches at ``alpha_{r-2}``, ``F_4`` is ``1-2=>3-4`` with ``alpha_1,
alpha_2`` long, and ``G_2`` has ``alpha_1`` short. ``E_n`` is the chain
``alpha_1 ... alpha_{n-1}`` with ``alpha_n`` attached to ``alpha_{n-3}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidPositiveSystem, InvalidSimpleSystem, InvalidType, NotARoot
from .qmatrix import QMatrix

Root = tuple[int, ...]

_VALID = {
    "A": lambda r: r >= 1,
    "B": lambda r: r >= 2,
    "C": lambda r: r >= 2,
    "D": lambda r: r >= 4,
    "E": lambda r: r in (6, 7, 8),
    "F": lambda r: r == 4,
    "G": lambda r: r == 2,
}


@dataclass(frozen=True, order=True)
class SimpleType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _VALID or not isinstance(self.rank, int) or not _VALID[self.family](self.rank):
            raise InvalidType(f"invalid type {self.family}{self.rank}")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


def parse_type(text: str) -> SimpleType:
    text = text.strip().upper()
    if len(text) < 2 or not text[1:].isdigit():
        raise InvalidType(f"cannot parse type {text!r}")
    return SimpleType(text[0], int(text[1:]))


def _gram(t: SimpleType) -> list[list[int]]:
    r = t.rank
    g = [[0] * r for _ in range(r)]
    fam = t.family
    if fam in "ADE":
        for i in range(r):
            g[i][i] = 2
        edges = [(i, i + 1) for i in range(r - 1)]
        if fam == "D":
            edges = [(i, i + 1) for i in range(r - 2)] + [(r - 3, r - 1)]
        elif fam == "E":
            edges = [(i, i + 1) for i in range(r - 2)] + [(r - 4, r - 1)]
        for i, j in edges:
            g[i][j] = g[j][i] = -1
    elif fam == "B":
        for i in range(r - 1):
            g[i][i] = 4
        g[r - 1][r - 1] = 2
        for i in range(r - 1):
            g[i][i + 1] = g[i + 1][i] = -2
    elif fam == "C":
        for i in range(r - 1):
            g[i][i] = 2
        g[r - 1][r - 1] = 4
        for i in range(r - 2):
            g[i][i + 1] = g[i + 1][i] = -1
        g[r - 2][r - 1] = g[r - 1][r - 2] = -2
    elif fam == "F":
        g = [[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    elif fam == "G":
        g = [[2, -3], [-3, 6]]
    return g


@dataclass(frozen=True)
class RootSystemData:
    type: SimpleType
    cartan: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    roots: tuple[Root, ...]
    gram: tuple[tuple[int, ...], ...]
    index: dict = field(compare=False, repr=False, hash=False)

    @property
    def rank(self) -> int:
        return self.type.rank

    @property
    def n_positive(self) -> int:
        return len(self.roots) // 2

    @property
    def dim(self) -> int:
        return len(self.roots) + self.rank

    def idx(self, root: Sequence[int]) -> int:
        try:
            return self.index[tuple(root)]
        except KeyError:
            raise NotARoot(f"{tuple(root)} is not a root of {self.type}") from None

    def is_root(self, v: Sequence) -> bool:
        return tuple(v) in self.index

    def neg(self, i: int) -> int:
        n = self.n_positive
        return i + n if i < n else i - n

    def simple(self, i: int) -> Root:
        return tuple(int(i == j) for j in range(self.rank))

    def inner(self, u: Sequence, v: Sequence):
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank) if u[i] and v[j])

    def pairing(self, v: Sequence, gamma: Sequence) -> Fraction:
        """``<v, gamma^vee> = 2(v, gamma)/(gamma, gamma)``."""
        return Fraction(2 * self.inner(v, gamma), self.inner(gamma, gamma))

    def coroot(self, a: Sequence[int]) -> tuple[int, ...]:
        """``a^vee`` in the basis of simple coroots."""
        n = self.inner(a, a)
        out = []
        for i in range(self.rank):
            c = Fraction(a[i] * self.gram[i][i], n)
            assert c.denominator == 1
            out.append(int(c))
        return tuple(out)

    def height(self, a: Sequence[int]) -> int:
        return sum(a)

    def to_json(self) -> dict:
        return {
            "family": self.type.family,
            "rank": self.rank,
            "cartan": [list(r) for r in self.cartan],
            "roots": [list(a) for a in self.roots],
            "gram_num": [list(r) for r in self.gram],
            "gram_den": [[1] * self.rank for _ in range(self.rank)],
        }


def _close_roots(cartan: Sequence[Sequence[int]]) -> set[Root]:
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    found = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for b in frontier:
            for i in range(r):
                # <b, alpha_i^vee> = sum_j b_j A[i][j]
                c = sum(b[j] * cartan[i][j] for j in range(r))
                if c:
                    v = list(b)
                    v[i] -= c
                    v = tuple(v)
                    if v not in found:
                        found.add(v)
                        nxt.append(v)
        frontier = nxt
    return found


def build_root_system(t: SimpleType) -> RootSystemData:
    """Roots, Cartan matrix and gram for a simple type."""
    if not isinstance(t, SimpleType):
        t = SimpleType(*t)
    g = _gram(t)
    r = t.rank
    cartan = tuple(tuple(2 * g[j][i] // g[i][i] for j in range(r)) for i in range(r))
    sym = tuple(g[i][i] // 2 for i in range(r))
    allr = _close_roots(cartan)
    pos = sorted((a for a in allr if all(x >= 0 for x in a)), key=lambda a: (sum(a), tuple(-x for x in a)))
    roots = tuple(pos) + tuple(tuple(-x for x in a) for a in pos)
    if len(roots) != len(allr):
        raise AssertionError("root closure produced mixed-sign vectors")
    index = {a: i for i, a in enumerate(roots)}
    return RootSystemData(t, cartan, sym, roots, tuple(tuple(row) for row in g), index)


def reflect(rs: RootSystemData, gamma: Sequence[int], v: Sequence) -> tuple:
    """``s_gamma(v) = v - <v, gamma^vee> gamma``."""
    if not rs.is_root(gamma):
        raise NotARoot(f"{tuple(gamma)} is not a root")
    c = rs.pairing(v, gamma)
    out = []
    for x, gi in zip(v, gamma):
        y = x - c * gi
        out.append(int(y) if isinstance(y, Fraction) and y.denominator == 1 else y)
    return tuple(out)


def reflection_matrix(rs: RootSystemData, gamma: Sequence[int]) -> list[list[int]]:
    if not rs.is_root(gamma):
        raise NotARoot(f"{tuple(gamma)} is not a root")
    r = rs.rank
    cols = [reflect(rs, gamma, rs.simple(k)) for k in range(r)]
    return [[int(cols[k][i]) for k in range(r)] for i in range(r)]


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def _apply(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


@dataclass(frozen=True)
class WeylElement:
    word: tuple[Root, ...]
    matrix: tuple[tuple[int, ...], ...]
    perm: tuple[int, ...]
    order: int

    def apply(self, v: Sequence) -> tuple:
        return _apply(self.matrix, v)

    def is_identity(self) -> bool:
        return all(self.matrix[i][j] == int(i == j) for i in range(len(self.matrix)) for j in range(len(self.matrix)))


def weyl_from_matrix(rs: RootSystemData, matrix, word: Iterable = ()) -> WeylElement:
    r = rs.rank
    mat = tuple(tuple(int(x) for x in row) for row in matrix)
    perm = tuple(rs.idx(_apply(mat, a)) for a in rs.roots)
    ident = [[int(i == j) for j in range(r)] for i in range(r)]
    p = [list(row) for row in mat]
    order = 1
    while p != ident:
        p = _matmul(p, mat)
        order += 1
        if order > 4 * len(rs.roots) + 4:
            raise AssertionError("matrix does not have finite order")
    return WeylElement(tuple(tuple(w) for w in word), mat, perm, order)


def weyl_from_word(rs: RootSystemData, word: Iterable[Sequence[int]]) -> WeylElement:
    """Product ``s_{g_1} s_{g_2} ...`` of reflections in the listed roots."""
    word = [tuple(g) for g in word]
    r = rs.rank
    m = [[int(i == j) for j in range(r)] for i in range(r)]
    for g in word:
        m = _matmul(m, reflection_matrix(rs, g))
    return weyl_from_matrix(rs, m, word)


def weyl_inverse(rs: RootSystemData, w: WeylElement) -> WeylElement:
    inv = QMatrix(w.matrix).inverse()
    assert inv.den == 1
    return weyl_from_matrix(rs, inv.num, tuple(reversed(w.word)))


def weyl_power(rs: RootSystemData, w: WeylElement, k: int) -> WeylElement:
    k %= w.order
    r = rs.rank
    m = [[int(i == j) for j in range(r)] for i in range(r)]
    for _ in range(k):
        m = _matmul(m, w.matrix)
    return weyl_from_matrix(rs, m, tuple(w.word) * k)


def _as_indices(rs: RootSystemData, roots) -> frozenset[int]:
    out = set()
    for a in roots:
        out.add(a if isinstance(a, int) else rs.idx(a))
    return frozenset(out)


def check_positive_system(rs: RootSystemData, positive) -> frozenset[int]:
    """Validate closure and ``Delta = P u -P``; return the index set."""
    pos = _as_indices(rs, positive)
    if len(pos) != rs.n_positive or any(rs.neg(i) in pos for i in pos):
        raise InvalidPositiveSystem("not complementary to its negative")
    roots = rs.roots
    for i in pos:
        for j in pos:
            s = tuple(x + y for x, y in zip(roots[i], roots[j]))
            k = rs.index.get(s)
            if k is not None and k not in pos:
                raise InvalidPositiveSystem(f"not closed: {roots[i]} + {roots[j]}")
    return pos


def length(w: WeylElement, positive, rs: RootSystemData | None = None, *, validate: bool = True) -> int:
    """Number of positive roots sent to negative roots."""
    if rs is not None:
        pos = check_positive_system(rs, positive) if validate else _as_indices(rs, positive)
    else:
        pos = frozenset(positive)
    return sum(1 for i in pos if w.perm[i] not in pos)


def simple_coordinates(rs: RootSystemData, simple: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Coordinates of every root in the basis ``simple``; validates it."""
    r = rs.rank
    simple = [tuple(a) for a in simple]
    if len(simple) != r or any(not rs.is_root(a) for a in simple):
        raise InvalidSimpleSystem("need r roots")
    s = QMatrix([[simple[j][i] for j in range(r)] for i in range(r)])
    try:
        inv = s.inverse()
    except ZeroDivisionError:
        raise InvalidSimpleSystem("simple roots are linearly dependent") from None
    coords = []
    for a in rs.roots:
        c = inv.apply(a)
        if any(x.denominator != 1 for x in c):
            raise InvalidSimpleSystem(f"{a} is not an integer combination")
        c = tuple(int(x) for x in c)
        if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
            raise InvalidSimpleSystem(f"{a} has mixed-sign coordinates")
        coords.append(c)
    return coords


def reduced_word(rs: RootSystemData, w: WeylElement, simple: Sequence[Sequence[int]]) -> list[int]:
    """Indices (0-based, into ``simple``) of a reduced word for ``w``."""
    coords = simple_coordinates(rs, simple)
    pos = {i for i, c in enumerate(coords) if sum(c) > 0}
    sidx = [rs.idx(a) for a in simple]
    mats = [reflection_matrix(rs, a) for a in simple]
    cur = w
    steps: list[int] = []
    limit = rs.n_positive + 1
    while not cur.is_identity():
        for i, si in enumerate(sidx):
            if cur.perm[si] not in pos:
                steps.append(i)
                cur = weyl_from_matrix(rs, _matmul([list(x) for x in cur.matrix], mats[i]))
                break
        else:
            raise InvalidSimpleSystem("no descent found")
        if len(steps) > limit:
            raise InvalidSimpleSystem("descent did not terminate")
    return steps[::-1]


def highest_root(rs: RootSystemData) -> Root:
    return rs.roots[rs.n_positive - 1]


def standard_positive(rs: RootSystemData) -> frozenset[int]:
    return frozenset(range(rs.n_positive))

"""Exact rational matrices stored as an integer numerator and one denominator."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from . import kernels


def _normalize(num, den):
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num = [[-x for x in row] for row in num]
        den = -den
    if den != 1:
        g = den
        for row in num:
            for x in row:
                if x:
                    g = gcd(g, x)
                    if g == 1:
                        break
            if g == 1:
                break
        if g != 1:
            num = [[x // g for x in row] for row in num]
            den //= g
    return num, den


class QMatrix:
    """Immutable rational matrix ``num / den``."""

    __slots__ = ("num", "den", "nrows", "ncols", "_key")

    def __init__(self, num, den: int = 1, *, normalized: bool = False):
        num = [list(r) for r in num]
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self.nrows = len(num)
        self.ncols = len(num[0]) if num else 0
        self._key = None

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Sequence]) -> "QMatrix":
        rows = [[Fraction(x) for x in r] for r in rows]
        d = 1
        for r in rows:
            for x in r:
                d = lcm(d, x.denominator)
        num = [[x.numerator * (d // x.denominator) for x in r] for r in rows]
        return cls(num, d)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], 1, normalized=True)

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "QMatrix":
        m = n if m is None else m
        return cls([[0] * m for _ in range(n)], 1, normalized=True)

    @classmethod
    def diagonal(cls, values: Sequence) -> "QMatrix":
        n = len(values)
        rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(rows)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return Fraction(self.num[i][j], self.den)

    def rows(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in r] for r in self.num]

    def column(self, j: int) -> list[Fraction]:
        return [Fraction(r[j], self.den) for r in self.num]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "QMatrix":
        return QMatrix([[self.num[i][j] for j in cols] for i in rows], self.den)

    def permuted(self, order: Sequence[int]) -> "QMatrix":
        """Conjugate by the basis permutation ``order`` (new i = old order[i])."""
        return QMatrix([[self.num[i][j] for j in order] for i in order], self.den, normalized=True)

    def transpose(self) -> "QMatrix":
        return QMatrix([list(c) for c in zip(*self.num)], self.den, normalized=True)

    # arithmetic ---------------------------------------------------------
    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        return QMatrix(kernels.matmul(self.num, other.num), self.den * other.den)

    def _combine(self, other: "QMatrix", sign: int) -> "QMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        d = lcm(self.den, other.den)
        a, b = d // self.den, d // other.den
        num = [[a * x + sign * b * y for x, y in zip(r, s)] for r, s in zip(self.num, other.num)]
        return QMatrix(num, d)

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-x for x in r] for r in self.num], self.den, normalized=True)

    def scale(self, c) -> "QMatrix":
        c = Fraction(c)
        return QMatrix([[x * c.numerator for x in r] for r in self.num], self.den * c.denominator)

    def inverse(self) -> "QMatrix":
        res = kernels.inverse(self.num)
        if res is None:
            raise ZeroDivisionError("singular matrix")
        x, d = res
        return QMatrix(x, d).scale(self.den)

    def rank(self) -> int:
        return kernels.rank(self.num)

    def apply(self, vec: Sequence) -> list[Fraction]:
        out = []
        for r in self.num:
            acc = Fraction(0)
            for x, v in zip(r, vec):
                if x and v:
                    acc += x * v
            out.append(acc / self.den)
        return out

    def __pow__(self, k: int) -> "QMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = QMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out

    # predicates ---------------------------------------------------------
    def is_identity(self) -> bool:
        d = self.den
        for i, r in enumerate(self.num):
            for j, x in enumerate(r):
                if x != (d if i == j else 0):
                    return False
        return True

    def is_zero(self) -> bool:
        return all(not x for r in self.num for x in r)

    def support(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.num) for j, x in enumerate(r) if x]

    def _k(self):
        if self._key is None:
            self._key = (self.den, tuple(tuple(r) for r in self.num))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self._k() == other._k()

    def __hash__(self) -> int:
        return hash(self._k())

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols}, den={self.den})"

    def to_json(self) -> dict:
        nums, dens = [], []
        for r in self.num:
            nr, dr = [], []
            for x in r:
                f = Fraction(x, self.den)
                nr.append(f.numerator)
                dr.append(f.denominator)
            nums.append(nr)
            dens.append(dr)
        return {"matrix_num": nums, "matrix_den": dens}


def block_matrix(blocks: Sequence[Sequence[QMatrix]]) -> QMatrix:
    """Assemble a matrix from a grid of blocks."""
    d = 1
    for row in blocks:
        for b in row:
            d = lcm(d, b.den)
    num = []
    for row in blocks:
        h = row[0].nrows
        for i in range(h):
            line = []
            for b in row:
                f = d // b.den
                line.extend(x * f for x in b.num[i])
            num.append(line)
    return QMatrix(num, d)


# Fraction-level helpers for small systems ------------------------------

def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return m, []
    nr, nc = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    m, pivots = rref(rows)
    nc = len(m[0])
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Unique solution of a square nonsingular system."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    n = len(rows[0])
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise ZeroDivisionError("singular or inconsistent system")
    return [m[i][n] for i in range(n)]


def frac_rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0

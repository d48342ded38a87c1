"""Invariant decomposition of the Cartan under a Weyl element, generator choice,
the induced root partition and positive system.

Exact data (characteristic polynomial, primary components, root sets) is
rational. Plane bases inside a primary component are irrational and are
computed in floating point; every combinatorial consequence is then
re-certified exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .errors import DimMismatch, GeneratorSearchFailed, InvalidPositiveSystem, RescaleOverflow
from .qmatrix import QMatrix, nullspace
from .rootsys import RootSystemData, WeylElement, check_positive_system, length

ORTH_TOL = 1e-9
SIGN_MARGIN = 1e-7
MAX_RETRIES = 16
MAX_SCALE_EXP = 80


# polynomials -----------------------------------------------------------
# Coefficient lists, lowest degree first.

def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    a = list(a)
    q = [0] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        c = Fraction(a[-1], lead)
        if c.denominator != 1:
            return None, a
        c = int(c)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        while a and a[-1] == 0:
            a.pop()
    return q, a


def cyclotomic(m: int) -> list[int]:
    """Integer coefficients of the m-th cyclotomic polynomial, constant term first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod(num, cyclotomic(d))
            assert not rem
    while num and num[-1] == 0:
        num.pop()
    return num


def charpoly(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Characteristic polynomial ``det(x I - M)``, constant term first (Faddeev-LeVerrier)."""
    n = len(matrix)
    m = QMatrix(matrix)
    coeffs = [Fraction(1)]
    mk = QMatrix.zeros(n)
    ident = QMatrix.identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        mk = m @ (mk + ident.scale(c))
        tr = sum((mk[i, i] for i in range(n)), Fraction(0))
        c = -tr / k
        coeffs.append(c)
    out = [int(x) for x in reversed(coeffs)]
    return out


def cyclotomic_factorization(matrix, order: int) -> dict[int, int]:
    """Multiplicities ``{m: k}`` with ``charpoly = prod Phi_m^k``."""
    p = charpoly(matrix)
    out = {}
    for m in range(1, order + 1):
        if order % m:
            continue
        phi = cyclotomic(m)
        k = 0
        while len(p) >= len(phi):
            q, rem = _poly_divmod(p, phi)
            if q is None or any(rem):
                break
            p = q
            while p and p[-1] == 0:
                p.pop()
            k += 1
        if k:
            out[m] = k
    if p != [1]:
        raise AssertionError("characteristic polynomial is not a product of cyclotomic factors")
    return out


def _poly_at_matrix(poly, matrix) -> list[list[int]]:
    n = len(matrix)
    m = QMatrix(matrix)
    acc = QMatrix.zeros(n)
    for c in reversed(poly):
        acc = acc @ m + QMatrix.identity(n).scale(c)
    assert acc.den == 1
    return acc.num


# blocks ------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantBlock:
    kind: str  # fixed, line or plane
    m: int
    k: int  # rotation by 2 pi k / m; 0 for fixed
    basis: tuple[tuple[float, ...], ...]  # G-orthonormal, root coordinates
    projector: QMatrix  # exact G-orthogonal projector onto the primary component
    whole_component: bool
    exact_basis: tuple[tuple[Fraction, ...], ...] | None = None
    anchored: bool = False

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def angle_fraction(self) -> Fraction | None:
        return None if self.kind == "fixed" else Fraction(self.k, self.m)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "angle": None if self.kind == "fixed" else f"{self.k}/{self.m}",
            "basis": [[round(float(x), 12) for x in v] for v in self.basis],
        }


class _Metric:
    """Gram matrix ``G = L L^T``; orthonormal coordinates ``y = L^T x``."""

    def __init__(self, rs: RootSystemData):
        self.G = np.array(rs.gram, dtype=float)
        self.L = np.linalg.cholesky(self.G)
        self.LT = self.L.T
        self.LTinv = np.linalg.inv(self.LT)

    def to_on(self, x):
        return self.LT @ np.asarray(x, dtype=float)

    def from_on(self, y):
        return self.LTinv @ y


def _projector(rs: RootSystemData, basis) -> QMatrix:
    """Exact ``B (B^T G B)^{-1} B^T G``."""
    r = rs.rank
    if not basis:
        return QMatrix.zeros(r)
    b = QMatrix.from_rows([[v[i] for v in basis] for i in range(r)])
    g = QMatrix(rs.gram)
    bt = b.transpose()
    return b @ (bt @ g @ b).inverse() @ bt @ g


def _on_basis(metric: _Metric, vectors) -> np.ndarray:
    """Orthonormal basis (columns, ON coordinates) of the span of exact vectors."""
    if not vectors:
        return np.zeros((metric.G.shape[0], 0))
    y = np.array([metric.to_on([float(x) for x in v]) for v in vectors]).T
    q, _ = np.linalg.qr(y)
    return q[:, : len(vectors)]


def _random_unitary(rng: np.random.Generator, n: int, real: bool) -> np.ndarray:
    if real:
        z = rng.standard_normal((n, n))
    else:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, rr = np.linalg.qr(z)
    d = np.diag(rr)
    return q * (d / np.abs(d))


def _null_on(mat: np.ndarray, dim: int) -> np.ndarray:
    _, sv, vh = np.linalg.svd(mat)
    null = vh[len(vh) - dim:].conj().T
    if dim and sv[len(sv) - dim] > 1e-8 * max(1.0, sv[0]):
        raise AssertionError("eigenspace dimension disagrees with the exact multiplicity")
    return null


def invariant_decomposition(
    rs: RootSystemData,
    s: WeylElement,
    seed: int = 0,
    anchors: Sequence[Sequence[Sequence]] = (),
) -> list[InvariantBlock]:
    """Fixed block first, then lines and planes in canonical order.

    ``anchors`` are exact rational spans of s-invariant lines or planes,
    each inside a single primary component; they become blocks as given and
    the rest of their component is decomposed generically. Canonical order
    of the non-fixed blocks: descending m, anchors first, then ascending k.
    """
    r = rs.rank
    metric = _Metric(rs)
    mat = [list(row) for row in s.matrix]
    mult = cyclotomic_factorization(mat, s.order)
    q = metric.LT @ np.array(mat, dtype=float) @ metric.LTinv
    rng = np.random.default_rng(seed)
    g = QMatrix(rs.gram)

    comps = {}
    for m in sorted(mult):
        phi = cyclotomic(m)
        kernel = nullspace(_poly_at_matrix(phi, mat))
        if len(kernel) != mult[m] * len(phi[1:]):
            raise AssertionError(f"primary component for m={m} has wrong dimension")
        comps[m] = kernel

    fixed_basis = comps.get(1, [])
    blocks: list[InvariantBlock] = [
        InvariantBlock(
            "fixed", 1, 0,
            tuple(tuple(metric.from_on(c)) for c in _on_basis(metric, fixed_basis).T),
            _projector(rs, fixed_basis), True, tuple(tuple(v) for v in fixed_basis),
        )
    ]
    anchored: dict[int, list] = {}
    for span in anchors:
        span = [[Fraction(x) for x in v] for v in span]
        img = [[sum(Fraction(mat[i][j]) * v[j] for j in range(r)) for i in range(r)] for v in span]
        owner = None
        for m, kernel in comps.items():
            p = _projector(rs, kernel)
            if all(p.apply(v) == v for v in span):
                owner = m
        if owner is None or owner == 1:
            raise ValueError("anchor is not inside a single non-fixed primary component")
        sp = _projector(rs, span)
        if any(sp.apply(v) != v for v in img):
            raise ValueError("anchor is not s-invariant")
        anchored.setdefault(owner, []).append(span)

    out = []
    for m in sorted(comps, reverse=True):
        if m == 1:
            continue
        kernel = comps[m]
        proj = _projector(rs, kernel)
        whole = mult[m] == 1
        anchor_list = anchored.get(m, [])
        taken = []
        for span in anchor_list:
            on = _on_basis(metric, span)
            qb = on.T @ q @ on
            if len(span) == 1:
                kind, k = "line", 1
            else:
                c = np.trace(qb) / 2.0
                k = min(
                    (kk for kk in range(1, m) if gcd(kk, m) == 1 and 2 * kk < m),
                    key=lambda kk: abs(np.cos(2 * np.pi * kk / m) - c),
                )
                kind = "plane"
            out.append(InvariantBlock(
                kind, m, k, tuple(tuple(metric.from_on(c)) for c in on.T), proj,
                len(span) == len(kernel), tuple(tuple(v) for v in span), True,
            ))
            taken.extend(span)
        if taken:
            gt = QMatrix.from_rows(taken) @ g
            coeff = nullspace((gt @ QMatrix.from_rows([[v[i] for v in kernel] for i in range(r)])).rows())
            rest = [[sum(c[j] * kernel[j][i] for j in range(len(kernel))) for i in range(r)] for c in coeff]
        else:
            rest = kernel
        if not rest:
            continue
        cb = _on_basis(metric, rest)
        qc = cb.T @ q @ cb
        n = cb.shape[1]
        whole_rest = whole and not taken
        # a remainder that is a single line or plane is known exactly
        single = len(rest) == (1 if m == 2 else 2) and len(cyclotomic(m)) <= 3
        exact = tuple(tuple(v) for v in rest) if single else None
        if m == 2 and n == 1:
            out.append(InvariantBlock("line", 2, 1, (tuple(metric.from_on(cb[:, 0])),), proj, whole_rest, exact))
            continue
        if m == 2:
            rot = _random_unitary(rng, n, real=True) if n > 1 else np.eye(1)
            for col in (cb @ rot).T:
                out.append(InvariantBlock("line", 2, 1, (tuple(metric.from_on(col)),), proj, False, None))
            continue
        for k in range(1, m):
            if gcd(k, m) != 1 or 2 * k > m:
                continue
            lam = np.exp(2j * np.pi * k / m)
            # multiplicity of this eigenvalue inside the remainder
            dim = int(round(sum(1 for ev in np.linalg.eigvals(qc) if abs(ev - lam) < 1e-6)))
            if dim == 0:
                continue
            vecs = _null_on(qc - lam * np.eye(n), dim)
            if dim > 1:
                vecs = vecs @ _random_unitary(rng, dim, real=False)
            for v in vecs.T:
                v = cb @ v
                re, im = v.real, v.imag
                e1 = re / np.linalg.norm(re)
                im = im - (im @ e1) * e1
                e2 = im / np.linalg.norm(im)
                out.append(InvariantBlock(
                    "plane", m, k, (tuple(metric.from_on(e1)), tuple(metric.from_on(e2))), proj,
                    whole_rest and single, exact,
                ))
    # canonical order: descending m, anchors (exact spans) first, then k
    out.sort(key=lambda b: (-b.m, 0 if b.anchored else 1, b.k))
    return blocks + out


def block_trace(rs: RootSystemData, s: WeylElement, block: InvariantBlock) -> float:
    metric = _Metric(rs)
    q = metric.LT @ np.array(s.matrix, dtype=float) @ metric.LTinv
    on = np.array([metric.to_on(v) for v in block.basis]).T
    if on.size == 0:
        return 0.0
    return float(np.trace(on.T @ q @ on))


def orthogonal_to_block(rs: RootSystemData, block: InvariantBlock, root: Sequence[int], metric: _Metric | None = None) -> bool:
    """Whether ``root`` is orthogonal to the span of ``block``.

    Exact when the block's span is known exactly or when the root is
    orthogonal to the whole primary component; float test otherwise.
    """
    if block.dim == 0:
        return True
    if not any(block.projector.apply(root)):
        return True
    if block.exact_basis is not None:
        return all(rs.inner(v, root) == 0 for v in block.exact_basis)
    if block.whole_component:
        return False
    metric = metric or _Metric(rs)
    y = metric.to_on(root)
    on = np.array([metric.to_on(v) for v in block.basis])
    return float(np.linalg.norm(on @ y)) < ORTH_TOL


# generators ----------------------------------------------------------------

def pair(rs: RootSystemData, h, root) -> float:
    """``h(alpha) = h^T G alpha`` for ``h`` in root coordinates."""
    return float(np.asarray(h, dtype=float) @ np.array(rs.gram, dtype=float) @ np.asarray(root, dtype=float))


def choose_generators(
    rs: RootSystemData,
    blocks: Sequence[InvariantBlock],
    seed: int = 0,
    attempts: int = 64,
) -> list[np.ndarray]:
    """One vector per block, pairing nonzero with every root not orthogonal to it."""
    rng = np.random.default_rng(seed)
    metric = _Metric(rs)
    out = []
    for bi, block in enumerate(blocks):
        if block.dim == 0:
            out.append(np.zeros(rs.rank))
            continue
        live = [a for a in rs.roots if not orthogonal_to_block(rs, block, a, metric)]
        basis = np.array(block.basis)
        for _ in range(attempts):
            num = rng.integers(1, 10, size=block.dim) * rng.choice([-1, 1], size=block.dim)
            den = rng.integers(1, 4, size=block.dim)
            h = (num / den) @ basis
            bad = [a for a in live if abs(pair(rs, h, a)) <= SIGN_MARGIN]
            if not bad:
                out.append(h)
                break
        else:
            raise GeneratorSearchFailed(f"no generator found for block {bi}", bad)
    return out


def rescale_for_dominance(rs: RootSystemData, generators: Sequence[np.ndarray], partition: Sequence[Sequence[int]]):
    """Scale ``h_{i_k}`` by ``2**c_k`` so each level dominates all partial sums below it."""
    scaled: list[np.ndarray] = []
    exps: list[int] = []
    for k, h in enumerate(generators):
        roots = [rs.roots[i] for i in partition[k]]
        base = [pair(rs, h, a) for a in roots]
        tails = []
        for a in roots:
            vals = [pair(rs, g, a) for g in scaled]
            # |sum_{l <= j < k} h_j(a)| for every l < k
            tails.append(max((abs(sum(vals[l:])) for l in range(len(vals))), default=0.0))
        c = 0
        while any(abs(b) * 2.0 ** c - t <= SIGN_MARGIN for b, t in zip(base, tails)) and k > 0:
            c += 1
            if c > MAX_SCALE_EXP:
                raise RescaleOverflow(f"level {k} needs more than 2**{MAX_SCALE_EXP}")
        scaled.append(h * 2.0 ** c)
        exps.append(c)
    return scaled, exps


# plans ---------------------------------------------------------------------

@dataclass
class SlicePlan:
    rs: RootSystemData
    s: WeylElement
    blocks: list[InvariantBlock]  # fixed block first, then the chosen order
    block_order: tuple[int, ...]
    seed: int
    effective_seed: int
    level_blocks: list[int]  # block index i_k for each level k
    generators: list[np.ndarray]  # scaled h_{i_k}
    scale_exponents: list[int]
    partition: list[frozenset[int]]
    chain: list[frozenset[int]]
    positive: frozenset[int]
    simple: tuple[int, ...]
    simple_coords: list[tuple[int, ...]]
    levi_roots: frozenset[int]
    nilradical_roots: frozenset[int]
    ns_roots: frozenset[int]
    hbar: np.ndarray
    hbar0: np.ndarray
    sectors: list = field(default_factory=list)
    dims: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return len(self.partition) - 1

    def grading(self, k: int) -> list[int]:
        """Integer functional with the sign pattern of ``sum_{j>k} h_{i_j}`` on roots."""
        chain = self.chain[k]
        outside = [j for j, gi in enumerate(self.simple) if gi not in chain]
        return [sum(c[j] for j in outside) for c in self.simple_coords]

    def to_json(self) -> dict:
        from .slicegeom import levi_chain

        def ids(s):
            return sorted(s)

        return {
            "rootsystem": self.rs.to_json(),
            "word": [list(g) for g in self.s.word],
            "order": self.s.order,
            "blocks": [b.to_json() for b in self.blocks],
            "generators": [
                {"block": bi, "vector": [round(float(x), 10) for x in h], "scale_exponent": c}
                for bi, h, c in zip(self.level_blocks, self.generators, self.scale_exponents)
            ],
            "partition": [ids(p) for p in self.partition],
            "chain": [ids(c) for c in self.chain],
            "positive": ids(self.positive),
            "simple": list(self.simple),
            "levi_roots": ids(self.levi_roots),
            "nilradical_roots": ids(self.nilradical_roots),
            "ns_roots": ids(self.ns_roots),
            "levi_chain": levi_chain(self).to_json(),
            "sectors": [sd.to_json() for sd in self.sectors],
            "dims": dict(self.dims),
            "seed": self.seed,
            "effective_seed": self.effective_seed,
            "block_order": list(self.block_order),
        }


def indecomposables(rs: RootSystemData, positive: frozenset[int]) -> tuple[int, ...]:
    roots = rs.roots
    sums = set()
    pl = sorted(positive)
    for i in pl:
        for j in pl:
            v = tuple(x + y for x, y in zip(roots[i], roots[j]))
            if v in rs.index:
                sums.add(rs.index[v])
    return tuple(i for i in pl if i not in sums)


def _plan_once(rs, s, blocks, order, seed, requested_seed):
    from .rootsys import simple_coordinates
    from .slicegeom import sector_decomposition, slice_dims

    metric = _Metric(rs)
    chosen = [blocks[0]] + [blocks[1 + i] for i in order]
    orth = [[orthogonal_to_block(rs, b, a, metric) for a in rs.roots] for b in chosen]
    nb = len(chosen)
    parts = []
    for i in range(nb):
        parts.append(frozenset(
            a for a in range(len(rs.roots))
            if not orth[i][a] and all(orth[j][a] for j in range(i + 1, nb))
        ))
    # roots orthogonal to every non-fixed block lie in the fixed space
    fixed_exact = frozenset(i for i in range(len(rs.roots)) if s.perm[i] == i)
    if parts[0] != fixed_exact:
        raise InvalidPositiveSystem("fixed-root set disagrees with the exact fixed set")
    levels = [0] + [i for i in range(1, nb) if parts[i]]
    partition = [parts[i] for i in levels]
    if frozenset().union(*partition) != frozenset(range(len(rs.roots))) or sum(map(len, partition)) != len(rs.roots):
        raise InvalidPositiveSystem("partition is not a disjoint cover")
    for p in partition:
        if any(s.perm[a] not in p for a in p):
            raise InvalidPositiveSystem("partition set is not s-stable")

    gens = choose_generators(rs, [chosen[i] for i in levels], seed)
    gens, exps = rescale_for_dominance(rs, gens, partition)
    hbar = sum(gens, np.zeros(rs.rank))
    hbar0 = sum(gens[1:], np.zeros(rs.rank))
    vals = [pair(rs, hbar, a) for a in rs.roots]
    if any(abs(v) <= SIGN_MARGIN for v in vals):
        raise InvalidPositiveSystem("hbar vanishes on a root")
    positive = frozenset(i for i, v in enumerate(vals) if v > 0)
    positive = check_positive_system(rs, positive)
    for k, p in enumerate(partition):
        for a in p:
            if (pair(rs, gens[k], rs.roots[a]) > 0) != (a in positive):
                raise InvalidPositiveSystem("positivity rule violated")
    simple = indecomposables(rs, positive)
    if len(simple) != rs.rank:
        raise InvalidPositiveSystem("wrong number of indecomposable roots")
    coords = simple_coordinates(rs, [rs.roots[i] for i in simple])
    chain = []
    acc: frozenset[int] = frozenset()
    for p in partition:
        acc = acc | p
        chain.append(acc)
    levi = partition[0]
    nil = frozenset(a for a in range(len(rs.roots)) if a not in positive and a not in levi)
    for a in range(len(rs.roots)):
        v = pair(rs, hbar0, rs.roots[a])
        if (a in nil) != (v < -SIGN_MARGIN) or (a in levi) != (abs(v) <= SIGN_MARGIN):
            raise InvalidPositiveSystem("nilradical sign pattern disagrees with hbar0")
    ns = frozenset(a for a in nil if s.perm[a] in positive and s.perm[a] not in levi)
    plan = SlicePlan(
        rs=rs, s=s, blocks=chosen, block_order=tuple(order), seed=requested_seed, effective_seed=seed,
        level_blocks=levels, generators=gens, scale_exponents=exps, partition=partition, chain=chain,
        positive=positive, simple=simple, simple_coords=coords, levi_roots=levi, nilradical_roots=nil,
        ns_roots=ns, hbar=hbar, hbar0=hbar0,
    )
    for k in range(len(chain)):
        zero = frozenset(a for a, v in enumerate(plan.grading(k)) if v == 0)
        if zero != chain[k]:
            raise InvalidPositiveSystem(f"level-{k} grading does not cut out the chain")
    plan.sectors = sector_decomposition(plan)
    plan.dims = slice_dims(plan)
    return plan


def default_block_order(blocks: Sequence[InvariantBlock]) -> tuple[int, ...]:
    """Non-fixed blocks by descending m (the canonical order)."""
    return tuple(range(len(blocks) - 1))


def build_plan(
    rs: RootSystemData,
    s: WeylElement,
    block_order: Sequence[int] | None = None,
    seed: int = 0,
    blocks: Sequence[InvariantBlock] | None = None,
) -> SlicePlan:
    """Assemble the full plan; retries with derived seeds if a certificate fails."""
    last: Exception | None = None
    for attempt in range(MAX_RETRIES + 1):
        eff = seed + 7919 * attempt
        bl = list(blocks) if blocks is not None else invariant_decomposition(rs, s, eff)
        order = tuple(block_order) if block_order is not None else default_block_order(bl)
        if sorted(order) != list(range(len(bl) - 1)):
            raise ValueError("block_order must permute the non-fixed blocks")
        try:
            return _plan_once(rs, s, bl, order, eff, seed)
        except (InvalidPositiveSystem, GeneratorSearchFailed, RescaleOverflow) as exc:
            last = exc
    assert last is not None
    raise last


def check_plan(plan: SlicePlan) -> None:
    """Re-assert the plan invariants exactly; raises on violation."""
    rs, s = plan.rs, plan.s
    check_positive_system(rs, plan.positive)
    ls = length(s, plan.positive, rs, validate=False)
    if ls != len(plan.ns_roots):
        raise DimMismatch(f"l(s)={ls} but |N_s roots|={len(plan.ns_roots)}")

"""Forward conjugation onto the slice, its staged inverse, and the exact rank checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chevalley import (
    ChevalleyBasisData,
    GroupElement,
    big_cell_factorize,
    chevalley_for,
    identity,
    normal_representative,
    torus_element,
    torus_values,
    unipotent_coordinates,
    x_alpha,
)
from .errors import NotInBigCell, NotInImage, StageAssertionFailed
from .qmatrix import QMatrix, frac_rank, nullspace, solve
from .spectral import SlicePlan


def _rand_param(rng: random.Random, bound: int, nonzero: bool = False) -> Fraction:
    while True:
        t = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if t or not nonzero:
            return t


def fixed_cocharacters(plan: SlicePlan) -> list[tuple[int, ...]]:
    """Integer basis of s-fixed coweights, as values on the simple roots."""
    mt = [list(col) for col in zip(*plan.s.matrix)]
    r = plan.rs.rank
    rows = [[mt[i][j] - int(i == j) for j in range(r)] for i in range(r)]
    out = []
    for v in nullspace(rows, r):
        den = 1
        for x in v:
            den = den * x.denominator // _gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = _gcd(g, abs(x))
        out.append(tuple(x // g for x in w))
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass
class SlicePoint:
    n_s: GroupElement
    z: GroupElement
    y: GroupElement
    params: dict = field(default_factory=dict)


class _Ctx:
    """Per-plan cache: the normal representative and its powers."""

    def __init__(self, plan: SlicePlan, chev: ChevalleyBasisData | None = None):
        self.plan = plan
        self.chev = chev or chevalley_for(plan.rs)
        self.nrep = normal_representative(plan, self.chev)
        self.s = GroupElement(self.nrep.element.matrix, (("s", 1),))
        self.s_inv = GroupElement(self.s.matrix.inverse(), (("s", -1),))
        self._pow = {0: identity(self.chev), 1: self.s, -1: self.s_inv}

    def spow(self, j: int) -> GroupElement:
        if j not in self._pow:
            step = self.s if j > 0 else self.s_inv
            prev = self.spow(j - 1 if j > 0 else j + 1)
            self._pow[j] = GroupElement((prev @ step).matrix, (("s", j),))
        return self._pow[j]


_CTX: dict = {}


def context(plan: SlicePlan, chev: ChevalleyBasisData | None = None) -> _Ctx:
    key = id(plan)
    c = _CTX.get(key)
    if c is None or c.plan is not plan:
        c = _Ctx(plan, chev)
        _CTX.clear()
        _CTX[key] = c
    return c


def sample_slice_point(plan: SlicePlan, seed: int = 0, bound: int = 3, chev=None) -> SlicePoint:
    """Seeded point ``n_s z s^-1`` with small rational parameters."""
    ctx = context(plan, chev)
    ch = ctx.chev
    rng = random.Random(seed)
    n_s = identity(ch)
    t_ns = {}
    for a in sorted(plan.ns_roots):
        t = _rand_param(rng, bound)
        t_ns[a] = t
        n_s = n_s @ x_alpha(ch, a, t)
    z = identity(ch)
    t_levi = {}
    for a in sorted(plan.levi_roots):
        t = _rand_param(rng, bound)
        t_levi[a] = t
        z = z @ x_alpha(ch, a, t)
    u_tor = []
    for lam in fixed_cocharacters(plan):
        u = _rand_param(rng, bound, nonzero=True)
        u_tor.append((lam, u))
        z = z @ torus_element(ch, lam, u)
    y = n_s @ z @ ctx.s_inv
    return SlicePoint(n_s, z, y, {"ns": t_ns, "levi": t_levi, "torus": u_tor})


def sample_nilradical(plan: SlicePlan, seed: int = 0, bound: int = 3, chev=None) -> GroupElement:
    ctx = context(plan, chev)
    rng = random.Random(seed)
    n = identity(ctx.chev)
    for a in sorted(plan.nilradical_roots):
        n = n @ x_alpha(ctx.chev, a, _rand_param(rng, bound))
    return n


def forward(n: GroupElement, p: SlicePoint) -> GroupElement:
    """``n . y . n^-1``."""
    return n @ p.y @ n.inverse()


def check_slice_point(plan: SlicePlan, p: SlicePoint, chev=None) -> list[str]:
    ctx = context(plan, chev)
    bad = []
    if p.z.matrix @ ctx.s.matrix != ctx.s.matrix @ p.z.matrix:
        bad.append("z does not commute with s")
    if unipotent_coordinates(ctx.chev, p.n_s, plan.ns_roots, plan.simple) is None:
        bad.append("n_s is not in the group of the N_s roots")
    conj = ctx.s @ p.n_s @ ctx.s_inv
    nbar = frozenset(a for a in plan.positive if a not in plan.levi_roots)
    if unipotent_coordinates(ctx.chev, conj, nbar, plan.simple) is None:
        bad.append("s n_s s^-1 is not in Nbar")
    return bad


# factorization -------------------------------------------------------------

@dataclass
class FactorizationResult:
    n: GroupElement
    n_s: GroupElement
    z: GroupElement
    exact: bool
    stages: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .chevalley import word_to_json

        return {
            "n_word": word_to_json(self.n.word),
            "ns_word": word_to_json(self.n_s.word),
            "z_word": word_to_json(self.z.word),
            "exact": self.exact,
            "stages": self.stages,
        }


def levi_word(plan: SlicePlan, z: GroupElement, chev=None):
    """Generator word for an element of the Levi of level 0, or None."""
    ctx = context(plan, chev)
    ch = ctx.chev
    if not plan.levi_roots:
        tau = torus_values(ch, z)
        if tau is None:
            return None
        r = plan.rs.rank
        return tuple(("h", tuple(int(i == j) for i in range(r)), t) for j, t in enumerate(tau) if t != 1)
    height = [sum(c) for c in plan.simple_coords]
    neg = frozenset(a for a in plan.levi_roots if a not in plan.positive)
    pos = plan.levi_roots - neg
    r = plan.rs.rank
    # z may sit outside the big cell; a small root element in front moves it in
    shifts = [None] + [(a, c) for a in sorted(plan.levi_roots) for c in (1, -1, 2, -2)]
    for shift in shifts:
        zz, pre = z, ()
        if shift is not None:
            zz = x_alpha(ch, shift[0], shift[1]) @ z
            pre = (("x", shift[0], Fraction(-shift[1])),)
        try:
            lo, t, up = big_cell_factorize(ch, zz, height)
        except NotInBigCell:
            continue
        w1 = unipotent_coordinates(ch, lo, neg, plan.simple)
        w3 = unipotent_coordinates(ch, up, pos, plan.simple)
        tau = torus_values(ch, t)
        if w1 is None or w3 is None or tau is None:
            return None
        w2 = tuple(("h", tuple(int(i == j) for i in range(r)), v) for j, v in enumerate(tau) if v != 1)
        return pre + w1 + w2 + w3
    return None


def _conj_roots(plan: SlicePlan, roots, power: int) -> frozenset[int]:
    """Image of a root set under ``s**power``."""
    perm = plan.s.perm
    if power < 0:
        inv = [0] * len(perm)
        for i, j in enumerate(perm):
            inv[j] = i
        perm = inv
    out = set()
    for a in roots:
        for _ in range(abs(power)):
            a = perm[a]
        out.add(a)
    return frozenset(out)


def factorize(
    g: GroupElement,
    plan: SlicePlan,
    chev=None,
    shuffle_seed: int | None = None,
) -> FactorizationResult:
    """Solve ``g = n . (n_s' z' s^-1) . n^-1`` level by level."""
    ctx = context(plan, chev)
    ch = ctx.chev
    sp = ctx.spow
    stages: list[dict] = []

    def big(x, grading):
        try:
            return big_cell_factorize(ch, x, grading, shuffle_seed)
        except NotInBigCell as exc:
            raise NotInImage(str(exc)) from None

    def member(x: GroupElement, roots, name: str) -> GroupElement:
        w = unipotent_coordinates(ch, x, frozenset(roots), plan.simple)
        stages.append({"stage": name, "roots": sorted(roots), "ok": w is not None})
        if w is None:
            raise StageAssertionFailed(f"{name}: component outside its predicted subgroup", stages)
        return GroupElement(x.matrix, w)

    x_full = g @ ctx.s
    _, z, _ = big(x_full, plan.grading(0))
    if z.matrix @ ctx.s.matrix != ctx.s.matrix @ z.matrix:
        stages.append({"stage": "levi", "ok": False})
        raise StageAssertionFailed("Levi component does not commute with s", stages)
    zw = levi_word(plan, z, ch)
    stages.append({"stage": "levi", "ok": zw is not None})
    if zw is None:
        raise StageAssertionFailed("Levi component is not in Z", stages)
    z = GroupElement(z.matrix, zw)

    nn = identity(ch)
    nsp = identity(ch)
    for k in range(1, plan.M + 1):
        y = big(x_full, plan.grading(k))[1] if k < plan.M else x_full
        sd = plan.sectors[k - 1]
        D = sd.D
        phi = plan.grading(k - 1)
        a_el = nn @ nsp
        b_el = z @ ctx.s_inv @ nn.inverse() @ ctx.s
        m = identity(ch)
        for p in range(D + 1):
            w = sp(-p) @ m.inverse() @ y @ ctx.s_inv @ m @ sp(p + 1)
            x = big(w, phi)[2]
            member(x, _conj_roots(plan, sd.sector(p), -p - 1), f"level {k} sector {p} x")
            n_p = sp(p + 1) @ x.inverse() @ sp(-p - 1)
            n_p = member(n_p, sd.sector(p), f"level {k} sector {p} n")
            m = m @ n_p
        w = sp(-D - 1) @ m.inverse() @ y @ ctx.s_inv @ m @ sp(D + 2)
        x = big(w, phi)[2]
        s1 = _conj_roots(plan, sd.ns_D, -D - 1)
        s2 = _conj_roots(plan, sd.sector(D + 1), -D - 2)
        member(x, s1 | s2, f"level {k} top x")
        sD2 = plan.s.perm
        # psi(beta) = phi(s^(D+2) beta): positive on s1, negative on s2
        img = list(range(len(plan.rs.roots)))
        for _ in range(D + 2):
            img = [sD2[a] for a in img]
        psi = [phi[img[a]] for a in range(len(img))]
        v, lev, x2 = big(x, [-c for c in psi])
        if not lev.is_identity():
            stages.append({"stage": f"level {k} split", "ok": False})
            raise StageAssertionFailed("top split has a nontrivial Levi part", stages)
        member(v, s1, f"level {k} top v")
        member(x2, s2, f"level {k} top x''")
        n_top = member(sp(D + 2) @ x2.inverse() @ sp(-D - 2), sd.sector(D + 1), f"level {k} top n")
        nu_d = member(b_el @ sp(D + 1) @ v @ sp(-D - 1) @ b_el.inverse(), sd.ns_D, f"level {k} ns D")
        nu = m @ n_top
        rest = a_el.inverse() @ nu.inverse() @ y @ ctx.s_inv @ nu @ ctx.s @ b_el.inverse() @ nu_d.inverse()
        nu_d1 = member(rest, sd.sector(D + 1), f"level {k} ns D+1")
        nu = member(nu, plan.partition[k] - plan.positive, f"level {k} n")
        nu_p = member(nu_d1 @ nu_d, plan.ns_roots & plan.partition[k], f"level {k} ns")
        nn = nu @ nn
        nsp = nsp @ nu_p

    n = member(nn, plan.nilradical_roots, "n")
    n_s = member(nsp, plan.ns_roots, "n_s")
    exact = (n @ n_s @ z @ ctx.s_inv @ n.inverse()).matrix == g.matrix
    stages.append({"stage": "remultiply", "ok": exact})
    if not exact:
        raise StageAssertionFailed("factors do not reproduce the input", stages)
    return FactorizationResult(n, n_s, z, exact, stages)


# rank checks ------------------------------------------------------------------

def h0_cartan_basis(plan: SlicePlan) -> list[list[Fraction]]:
    """The fixed block as vectors in simple-coroot coordinates."""
    rs = plan.rs
    r = rs.rank
    fixed = plan.blocks[0].exact_basis or ()
    at = [[rs.cartan[i][j] for i in range(r)] for j in range(r)]  # A^T
    out = []
    for v in fixed:
        gv = [sum(Fraction(rs.gram[j][k]) * v[k] for k in range(r)) for j in range(r)]
        out.append(solve(at, gv))
    return out


def transversality_rank(p: SlicePoint, plan: SlicePlan, chev=None) -> int:
    """Rank of ``(x, n, w) -> (Id - Ad y) x + n + w`` on ``g + n_s + z``."""
    ctx = context(plan, chev)
    dim = ctx.chev.dim
    nr = ctx.chev.nroots
    m = QMatrix.identity(dim) - p.y.matrix
    cols = [[m.num[i][j] for i in range(dim)] for j in range(dim)]
    den = m.den
    extra = [[den * int(i == a) for i in range(dim)] for a in sorted(plan.ns_roots)]
    extra += [[den * int(i == a) for i in range(dim)] for a in sorted(plan.levi_roots)]
    for h in h0_cartan_basis(plan):
        d = 1
        for x in h:
            d = d * x.denominator // _gcd(d, x.denominator)
        extra.append([0] * nr + [int(x * d) * den for x in h])
    from . import kernels

    return kernels.rank([list(r) for r in zip(*(cols + extra))])


def killing_form(chev: ChevalleyBasisData, x: Sequence, y: Sequence) -> Fraction:
    """``tr(ad x ad y)`` for coordinate vectors ``x, y``."""
    d = chev.dim
    adx = [[sum(c * chev.ad[k][i][j] for k, c in enumerate(x) if c) for j in range(d)] for i in range(d)]
    ady = [[sum(c * chev.ad[k][i][j] for k, c in enumerate(y) if c) for j in range(d)] for i in range(d)]
    return sum(adx[i][j] * ady[j][i] for i in range(d) for j in range(d) if adx[i][j])


def _killing_cartan(chev: ChevalleyBasisData) -> list[list[int]]:
    """Killing form on simple coroots: ``sum_alpha alpha(h_i) alpha(h_j)``."""
    r = chev.rs.rank
    return [[sum(chev.root_value(a, i) * chev.root_value(a, j) for a in range(chev.nroots)) for j in range(r)]
            for i in range(r)]


def decomposition_check(plan: SlicePlan, chev=None) -> tuple[bool, list[str]]:
    """``g = n + z + nbar + h0^perp`` as a direct sum with the expected pairings."""
    ch = chev or chevalley_for(plan.rs)
    rs = plan.rs
    nr, dim, r = len(rs.roots), rs.dim, rs.rank
    kc = _killing_cartan(ch)
    h0 = h0_cartan_basis(plan)
    h0perp = nullspace([[sum(h[i] * kc[i][j] for i in range(r)) for j in range(r)] for h in h0], r) if h0 else [
        [Fraction(int(i == j)) for i in range(r)] for j in range(r)]
    nil = sorted(plan.nilradical_roots)
    nbar = sorted(rs.neg(a) for a in nil)
    levi = sorted(plan.levi_roots)
    bad = []

    def kill_rr(a, b):
        # B(e_a, e_b) is nonzero only for b = -a; compute it when needed
        if b != rs.neg(a):
            return 0
        return killing_form(ch, ch.basis_vector(a), ch.basis_vector(b))

    for a in nil:
        for b in nil:
            if kill_rr(a, b):
                bad.append("n is not isotropic")
    for a in nbar:
        for b in nbar:
            if kill_rr(a, b):
                bad.append("nbar is not isotropic")
    for a in levi:
        for b in nil + nbar:
            if kill_rr(a, b):
                bad.append("Levi roots pair with n or nbar")
    for h in h0:
        for hp in h0perp:
            if sum(h[i] * kc[i][j] * hp[j] for i in range(r) for j in range(r)):
                bad.append("h0 and its complement are not orthogonal")
    # root vectors are orthogonal to the Cartan for the trace form
    vecs = [[int(i == a) for i in range(dim)] for a in nil + levi + nbar]
    vecs += [[0] * nr + list(h) for h in h0 + h0perp]
    rank = frac_rank(vecs)
    if rank != dim or len(vecs) != dim:
        bad.append(f"subspaces span {rank} of {dim} with {len(vecs)} vectors")
    return not bad, bad


def fixed_point_free(plan: SlicePlan, chev=None) -> bool:
    """``Ad s^-1`` has no eigenvalue 1 on ``h0^perp``."""
    ctx = context(plan, chev)
    ch = ctx.chev
    rs = plan.rs
    nr, r = len(rs.roots), rs.rank
    kc = _killing_cartan(ch)
    h0 = h0_cartan_basis(plan)
    h0perp = nullspace([[sum(h[i] * kc[i][j] for i in range(r)) for j in range(r)] for h in h0], r) if h0 else [
        [Fraction(int(i == j)) for i in range(r)] for j in range(r)]
    sinv = ctx.s_inv.matrix
    rows = []
    for v in h0perp:
        full = [Fraction(0)] * nr + list(v)
        img = sinv.apply(full)
        rows.append([x - y for x, y in zip(img, full)])
    return frac_rank(rows) == len(h0perp)

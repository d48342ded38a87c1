"""Root-set combinatorics of a plan: the Levi chain, orbit sectors and dimensions.

Everything here is exact and works on root indices only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import DimMismatch
from .rootsys import length

if TYPE_CHECKING:
    from .spectral import SlicePlan


def _ids(s) -> list[int]:
    return sorted(s)


@dataclass(frozen=True)
class LeviLevel:
    k: int
    g_roots: frozenset[int]  # Delta_{i_k}
    n_roots: frozenset[int]  # negative part of the level set (empty for k = 0)
    nbar_roots: frozenset[int]
    n_above: frozenset[int]  # roots with phi_k < 0
    nbar_above: frozenset[int]  # roots with phi_k > 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "g": _ids(self.g_roots),
            "n": _ids(self.n_roots),
            "nbar": _ids(self.nbar_roots),
            "N": _ids(self.n_above),
            "Nbar": _ids(self.nbar_above),
        }


@dataclass(frozen=True)
class LeviChain:
    levels: tuple[LeviLevel, ...]

    def to_json(self) -> list:
        return [lv.to_json() for lv in self.levels]


def levi_chain(plan: "SlicePlan") -> LeviChain:
    rs = plan.rs
    levels = []
    for k in range(plan.M + 1):
        part = plan.partition[k]
        n = frozenset(a for a in part if a not in plan.positive) if k else frozenset()
        nb = frozenset(a for a in part if a in plan.positive) if k else frozenset()
        phi = plan.grading(k)
        levels.append(LeviLevel(
            k, plan.chain[k], n, nb,
            frozenset(a for a in range(len(rs.roots)) if phi[a] < 0),
            frozenset(a for a in range(len(rs.roots)) if phi[a] > 0),
        ))
    return LeviChain(tuple(levels))


def check_levi_chain(plan: "SlicePlan", lc: LeviChain) -> list[str]:
    """Exact invariant checks; returns a list of violations."""
    rs = plan.rs
    bad = []
    for k in range(1, len(lc.levels)):
        lv, prev = lc.levels[k], lc.levels[k - 1]
        phi = plan.grading(k - 1)
        zero = frozenset(a for a in lv.g_roots if phi[a] == 0)
        if zero != prev.g_roots:
            bad.append(f"level {k}: Levi of Delta_{{i_k}} is not Delta_{{i_(k-1)}}")
        for a in prev.g_roots | lv.n_roots:
            for b in lv.n_roots:
                v = tuple(x + y for x, y in zip(rs.roots[a], rs.roots[b]))
                c = rs.index.get(v)
                if c is not None and c not in lv.n_roots:
                    bad.append(f"level {k}: n-roots not stable under the lower Levi")
                    break
        if k >= 2 and not lc.levels[k - 2].g_roots <= prev.g_roots:
            bad.append(f"level {k}: chain is not nested")
    union = frozenset().union(*(lv.n_roots for lv in lc.levels))
    if union != plan.nilradical_roots or sum(len(lv.n_roots) for lv in lc.levels) != len(union):
        bad.append("nilradical is not the disjoint union of the level n-roots")
    return bad


@dataclass(frozen=True)
class SectorData:
    k: int
    sectors: tuple[frozenset[int], ...]  # l = 0 .. D+1
    D: int
    ns_D: frozenset[int]  # {a in sector D : s a positive}

    def sector(self, l: int) -> frozenset[int]:
        if 0 <= l < len(self.sectors):
            return self.sectors[l]
        return frozenset()

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "D": self.D,
            "sectors": [_ids(x) for x in self.sectors],
            "ns_D": _ids(self.ns_D),
        }


def _inverse_perm(perm):
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return inv


def sector_decomposition(plan: "SlicePlan") -> list[SectorData]:
    """Orbit sectors for every level k >= 1."""
    s_inv = _inverse_perm(plan.s.perm)
    out = []
    for k in range(1, plan.M + 1):
        neg = [a for a in sorted(plan.partition[k]) if a not in plan.positive]
        buckets: dict[int, set[int]] = {}
        for a in neg:
            l, b = 0, s_inv[a]
            while b not in plan.positive:
                l += 1
                b = s_inv[b]
                if l > plan.s.order:
                    raise AssertionError("orbit never returns to the positive side")
            buckets.setdefault(l, set()).add(a)
        top = max(buckets) if buckets else 0
        secs = tuple(frozenset(buckets.get(l, ())) for l in range(top + 1))
        D = top - 1
        ns_d = frozenset(a for a in secs[D] if plan.s.perm[a] in plan.positive) if D >= 0 else frozenset()
        out.append(SectorData(k, secs, D, ns_d))
    return out


def check_sectors(plan: "SlicePlan", sd: SectorData) -> list[str]:
    """Exact invariant checks for one level; returns a list of violations."""
    s = plan.s.perm
    s_inv = _inverse_perm(s)
    pos = plan.positive
    part = plan.partition[sd.k]
    negpart = frozenset(a for a in part if a not in pos)
    pospart = part - negpart
    bad = []
    allsec = [x for sec in sd.sectors for x in sec]
    if frozenset(allsec) != negpart or len(allsec) != len(negpart):
        bad.append("sectors are not a disjoint cover of the negative level roots")

    def sinv_pow(a, p):
        for _ in range(p):
            a = s_inv[a]
        return a

    for l, sec in enumerate(sd.sectors):
        for a in sec:
            ok = all(sinv_pow(a, j) in negpart for j in range(1, l + 1)) and sinv_pow(a, l + 1) in pospart
            if not ok:
                bad.append(f"sector {l} membership condition fails for root {a}")
    D = sd.D
    for p in range(1, D + 3):
        if any(sinv_pow(a, p) not in pospart for a in sd.sector(p - 1)):
            bad.append(f"sap fails at p={p}")
    for p in range(1, D + 2):
        if any(s_inv[a] not in sd.sector(p - 1) for a in sd.sector(p)):
            bad.append(f"sap1 fails at p={p}")
    last = sd.sector(D + 1)
    if any(s[a] not in pos for a in last):
        bad.append("top sector not contained in s^-1(positive)")
    lhs = frozenset(s_inv[a] for a in sd.sector(0))
    part1 = frozenset(sinv_pow(a, D + 1) for a in sd.ns_D) if D >= 0 else frozenset()
    part2 = frozenset(sinv_pow(a, D + 2) for a in last)
    if lhs != part1 | part2 or part1 & part2:
        bad.append("top-stage factorization of s^-1(sector 0) fails")
    ns_here = plan.ns_roots & part
    if ns_here != sd.ns_D | last:
        bad.append("N_s roots of this level are not ns_D plus the top sector")
    if D >= 0 and frozenset(a for a in sd.sector(D) if s[a] in pos) != sd.ns_D:
        bad.append("ns_D mismatch")
    return bad


def slice_dims(plan: "SlicePlan") -> dict:
    inv = length(plan.s, plan.positive, plan.rs, validate=False)
    if inv != len(plan.ns_roots):
        raise DimMismatch(f"inversion count {inv} != |N_s roots| {len(plan.ns_roots)}")
    h0 = plan.blocks[0].dim
    dim_z = len(plan.levi_roots) + h0
    return {"l": inv, "dim_h0": h0, "dim_Z": dim_z, "dim_slice": inv + dim_z}

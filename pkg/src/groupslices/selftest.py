"""Invariant checks bundled per plan, plus the suite behind ``groupslices selftest``."""
from __future__ import annotations

import random
from typing import Sequence

from .chevalley import chevalley_for, normal_representative
from .crosssection import (
    decomposition_check,
    factorize,
    fixed_point_free,
    forward,
    sample_nilradical,
    sample_slice_point,
    transversality_rank,
)
from .errors import SliceError
from .rootsys import RootSystemData, SimpleType, build_root_system, length, weyl_from_word
from .slicegeom import check_levi_chain, check_sectors, levi_chain
from .spectral import SlicePlan, build_plan, check_plan


def all_types(max_rank: int) -> list[SimpleType]:
    out = []
    for fam, ranks in (("A", range(1, 9)), ("B", range(2, 9)), ("C", range(2, 9)), ("D", range(4, 9)),
                       ("E", (6, 7, 8)), ("F", (4,)), ("G", (2,))):
        out += [SimpleType(fam, r) for r in ranks if r <= max_rank]
    return out


def random_word(rs: RootSystemData, rng: random.Random, max_len: int = 6) -> list[tuple[int, ...]]:
    """Random reflection word whose product is not the identity."""
    while True:
        n = rng.randint(1, max_len)
        word = [rs.roots[rng.randrange(rs.n_positive)] for _ in range(n)]
        if not weyl_from_word(rs, word).is_identity():
            return word


def plan_violations(plan: SlicePlan) -> list[str]:
    """Exact root-level checks: partition, chain, sectors, and ``|N_s| = l(s)``."""
    bad = []
    try:
        check_plan(plan)
    except SliceError as exc:
        bad.append(f"plan: {exc}")
    bad += check_levi_chain(plan, levi_chain(plan))
    for sd in plan.sectors:
        bad += [f"level {sd.k}: {m}" for m in check_sectors(plan, sd)]
    if length(plan.s, plan.positive, plan.rs, validate=False) != len(plan.ns_roots):
        bad.append("|N_s roots| != l(s)")
    return bad


def group_violations(plan: SlicePlan) -> list[str]:
    """Normal representative, the Lie algebra decomposition and fixed-point freeness."""
    bad = []
    chev = chevalley_for(plan.rs)
    try:
        normal_representative(plan, chev)
    except SliceError as exc:
        return [f"normal representative: {exc}"]
    ok, msgs = decomposition_check(plan, chev)
    bad += msgs
    if not fixed_point_free(plan, chev):
        bad.append("Ad s^-1 fixes a vector of h0^perp")
    return bad


def round_trip_violations(plan: SlicePlan, seed: int, bound: int = 3) -> list[str]:
    """Factorize a conjugated slice point and compare the pieces exactly."""
    chev = chevalley_for(plan.rs)
    p = sample_slice_point(plan, seed, bound)
    n = sample_nilradical(plan, seed + 10007, bound)
    g = forward(n, p)
    bad = []
    try:
        res = factorize(g, plan, chev)
    except SliceError as exc:
        return [f"factorize: {type(exc).__name__}: {exc}"]
    if res.n != n or res.n_s != p.n_s or res.z != p.z:
        bad.append("round trip does not recover (n, n_s, z)")
    if transversality_rank(p, plan, chev) != chev.dim:
        bad.append("transversality rank below dim g")
    return bad


def _word_ids(rs: RootSystemData, word: Sequence) -> list[int]:
    return [rs.idx(r) + 1 for r in word]


def run_selftest(max_rank: int = 4, seed: int = 0, words: int = 3, samples: int = 2,
                 round_trip_dim: int = 21) -> dict:
    """Deterministic invariant suite over every simple type up to ``max_rank``."""
    from .quotient import delta_invariance, fiber_rank_scan
    from .subregular import verify_subregular

    rng = random.Random(seed)
    failures: list[dict] = []
    counts = {"plans": 0, "round_trips": 0, "subregular": 0, "quotient": 0}
    discrepancies: list[dict] = []

    def fail(t, word, s, what):
        failures.append({"type": str(t), "word": word, "seed": s, "violation": what})

    for t in all_types(max_rank):
        rs = build_root_system(t)
        if t.rank == 1:
            cases = []
        else:
            cases = [random_word(rs, rng) for _ in range(words)]
        for w in cases:
            wid = _word_ids(rs, w)
            plan_seed = rng.randrange(1 << 30)
            try:
                plan = build_plan(rs, weyl_from_word(rs, w), seed=plan_seed)
            except SliceError as exc:
                fail(t, wid, plan_seed, f"build_plan: {exc}")
                continue
            counts["plans"] += 1
            for m in plan_violations(plan) + group_violations(plan):
                fail(t, wid, plan_seed, m)
            if rs.dim <= round_trip_dim:
                for j in range(samples):
                    counts["round_trips"] += 1
                    for m in round_trip_violations(plan, plan_seed + j):
                        fail(t, wid, plan_seed + j, m)
                    if t.family == "A":
                        p = sample_slice_point(plan, plan_seed + j)
                        n = sample_nilradical(plan, plan_seed + j + 10007)
                        counts["quotient"] += 1
                        if not delta_invariance(plan, n, p.y):
                            fail(t, wid, plan_seed + j, "char poly changes under forward conjugation")
        try:
            rep = verify_subregular(t, seed, strict=False)
        except SliceError as exc:
            fail(t, "subregular", seed, f"subregular plan: {exc}")
            continue
        counts["subregular"] += 1
        for m in rep.get("failures", []):
            # the stated angle is a catalog claim, not a structural invariant
            if m.startswith("theta_min"):
                discrepancies.append({"type": str(t), "detail": m})
            else:
                fail(t, "subregular", seed, m)
    for r in range(2, min(max_rank, 3) + 1):
        scan = fiber_rank_scan(r, seed, 10)
        if any(int(k) > r for k in scan["rank_histogram"]):
            fail(SimpleType("A", r), "subregular", seed, "Jacobian rank exceeds r")
    return {
        "max_rank": max_rank,
        "seed": seed,
        "counts": counts,
        "failures": failures,
        "catalog_discrepancies": discrepancies,
        "pass": not failures,
    }

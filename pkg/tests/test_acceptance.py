"""End-to-end acceptance checks, one test per criterion.

Each test carries a ``criterion`` marker; the conftest prints a PASS/FAIL line
for every criterion at the end of the run.
"""
from __future__ import annotations

import random
import subprocess
import sys
from fractions import Fraction
from functools import lru_cache

import pytest

from groupslices.chevalley import chevalley_for, normal_representative, root_vector_signs
from groupslices.crosssection import factorize, forward, sample_nilradical, sample_slice_point, transversality_rank
from groupslices.errors import SliceError
from groupslices.quotient import delta_invariance, fiber_rank_scan, finite_difference_check
from groupslices.rootsys import SimpleType, build_root_system, weyl_from_word
from groupslices.selftest import all_types, plan_violations, random_word
from groupslices.spectral import build_plan
from groupslices.subregular import subregular_plan, verify_subregular

ROUND_TRIP_TYPES = [SimpleType("A", 2), SimpleType("A", 3), SimpleType("B", 2), SimpleType("C", 3), SimpleType("G", 2)]

# (family, rank) -> stated minimal angle as a fraction of 2*pi
STATED_THETA = {"A": lambda r: Fraction(1, r), "B": lambda r: Fraction(1, 2 * (r - 1)),
                "C": lambda r: Fraction(1, 2 * (r - 1)), "D": lambda r: Fraction(1, 2 * (r - 2)),
                "G": lambda r: Fraction(1, 6), "F": lambda r: Fraction(1, 6)}
STATED_THETA_E = {6: Fraction(1, 9), 7: Fraction(1, 14), 8: Fraction(1, 24)}

CATALOG_TYPES = [SimpleType("A", r) for r in range(1, 6)] + [SimpleType("B", r) for r in (2, 3, 4)] \
    + [SimpleType("C", r) for r in (2, 3, 4)] + [SimpleType("D", 4), SimpleType("D", 5),
                                                 SimpleType("G", 2), SimpleType("F", 4)]


@lru_cache(maxsize=None)
def partition_plans():
    """20 seeded random words for every simple type of rank <= 6."""
    out = []
    for t in all_types(6):
        rs = build_root_system(t)
        rng = random.Random(f"partition-{t}")
        for _ in range(20):
            word = [rs.roots[rng.randrange(len(rs.roots))] for _ in range(rng.randint(0, 8))]
            seed = rng.randrange(1 << 20)
            out.append((t, word, seed, build_plan(rs, weyl_from_word(rs, word), seed=seed)))
    return tuple(out)


@lru_cache(maxsize=None)
def round_trip_configs():
    """Subregular plan plus 5 non-identity random words per type, 10 samples each."""
    out = []
    for t in ROUND_TRIP_TYPES:
        rs = build_root_system(t)
        rng = random.Random(f"roundtrip-{t}")
        plans = [("subregular", subregular_plan(t))]
        for _ in range(5):
            word = random_word(rs, rng)
            plans.append((word, build_plan(rs, weyl_from_word(rs, word), seed=rng.randrange(1 << 20))))
        for label, plan in plans:
            for j in range(10):
                seed = rng.randrange(1 << 30)
                p = sample_slice_point(plan, seed)
                n = sample_nilradical(plan, seed + 1)
                out.append((t, label, seed, plan, p, n))
    return tuple(out)


def _normal_rep_problems(plan):
    rs = plan.rs
    ch = chevalley_for(rs)
    s = normal_representative(plan, ch).element.matrix
    eps = root_vector_signs(rs, plan.positive)
    bad = []
    for g in plan.simple:
        for a in (g, rs.neg(g)):
            sa = plan.s.perm[a]
            expect = [Fraction(0)] * ch.dim
            expect[sa] = Fraction(eps[a] * eps[sa])
            if s.column(a) != expect:
                bad.append(f"Ad s e_{a} is not e_{sa}")
    if not (s ** (2 * plan.s.order)).is_identity():
        bad.append("(Ad s)^(2R) != Id")
    return bad


@pytest.mark.criterion(1, "root partition suite, rank <= 6, 20 words per type")
def test_root_partition_suite():
    bad = []
    for t, word, seed, plan in partition_plans():
        bad += [(str(t), word, seed, m) for m in plan_violations(plan)]
    assert not bad, bad[:5]
    assert len(partition_plans()) == 20 * len(all_types(6))


@pytest.mark.criterion(2, "cross-section round trip, exact")
def test_cross_section_round_trip():
    bad = []
    for t, label, seed, plan, p, n in round_trip_configs():
        try:
            res = factorize(forward(n, p), plan)
        except SliceError as exc:
            bad.append((str(t), label, seed, repr(exc)))
            continue
        if (res.n, res.n_s, res.z) != (n, p.n_s, p.z) or not res.exact:
            bad.append((str(t), label, seed, "mismatch"))
    assert not bad, bad[:5]
    assert len(round_trip_configs()) == len(ROUND_TRIP_TYPES) * 6 * 10


@pytest.mark.criterion(3, "transversality rank = dim g")
def test_transversality():
    bad = []
    for t, label, seed, plan, p, _ in round_trip_configs():
        rank = transversality_rank(p, plan)
        if rank != plan.rs.dim:
            bad.append((str(t), label, seed, rank))
    assert not bad, bad[:5]


@pytest.mark.criterion(4, "normal representative on plans of criteria 1-2")
def test_normal_representative():
    plans = {id(plan): plan for *_, plan in partition_plans()}
    plans.update({id(c[3]): c[3] for c in round_trip_configs()})
    bad = []
    for plan in plans.values():
        try:
            bad += _normal_rep_problems(plan)
        except SliceError as exc:
            bad.append(f"{plan.rs.type}: {type(exc).__name__}: {exc}")
    assert not bad, bad[:5]


def _catalog_problems(t, stated):
    rep = verify_subregular(t, strict=False)
    r = t.rank
    want_l = r + 1 if t.family == "A" else r + 2
    want_h0 = 1 if t.family == "A" else 0
    problems = []
    if (rep["l"], rep["dim_h0"], rep["dim_slice"], rep["borel"]) != (want_l, want_h0, r + 2, True):
        problems.append(f"{t}: structure {rep['l'], rep['dim_h0'], rep['dim_slice'], rep['borel']}")
    if rep["theta_min"] is None or Fraction(rep["theta_min"]) != stated:
        problems.append(f"{t}: theta_min {rep['theta_min']} != stated {stated}")
    return problems


@pytest.mark.criterion(5, "subregular catalog A1-A5 B2-B4 C2-C4 D4-D5 G2 F4")
def test_subregular_catalog():
    bad = []
    for t in CATALOG_TYPES:
        bad += _catalog_problems(t, STATED_THETA[t.family](t.rank))
    assert not bad, bad


@pytest.mark.slow
@pytest.mark.criterion("5e", "subregular catalog, extended E6-E8")
def test_subregular_catalog_exceptional():
    bad = []
    for r in (6, 7, 8):
        bad += _catalog_problems(SimpleType("E", r), STATED_THETA_E[r])
    assert not bad, bad


@pytest.mark.criterion(6, "quotient probe A2 A3")
def test_quotient_probe():
    bad = []
    for t, label, seed, plan, p, n in round_trip_configs():
        if t.family == "A" and not delta_invariance(plan, n, p.y):
            bad.append(f"{t} {label} seed {seed}: delta not invariant")
    for r in (2, 3):
        scan = fiber_rank_scan(r, 0, 50)
        generic = scan["rank_histogram"].get(str(r), 0)
        if generic < 0.95 * 50:
            bad.append(f"A{r}: generic rank on {generic}/50 points")
        fd = finite_difference_check(r, 0)
        if not fd["pass"]:
            bad.append(f"A{r}: finite differences off by {fd['max_error']:.3g} (tolerance {fd['tolerance']})")
    assert not bad, bad


@pytest.mark.criterion(7, "selftest --max-rank 4 --seed 7 is byte-identical")
def test_selftest_determinism():
    cmd = [sys.executable, "-m", "groupslices", "selftest", "--max-rank", "4", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.stdout == b.stdout and a.stdout
    assert a.returncode == 0, a.stdout[-2000:]

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupslices.chevalley import chevalley_for, identity
from groupslices.crosssection import (
    check_slice_point,
    decomposition_check,
    factorize,
    fixed_cocharacters,
    fixed_point_free,
    forward,
    sample_nilradical,
    sample_slice_point,
    transversality_rank,
)
from groupslices.rootsys import SimpleType, build_root_system, weyl_from_word
from groupslices.quotient import delta_coords
from groupslices.spectral import build_plan
from groupslices.subregular import subregular_plan


def _plan(f, r, word=None, seed=0):
    if word is None:
        return subregular_plan(SimpleType(f, r), seed)
    rs = build_root_system(SimpleType(f, r))
    return build_plan(rs, weyl_from_word(rs, word), seed=seed)


def test_sample_is_reproducible_and_in_slice():
    plan = _plan("A", 2)
    p, q = sample_slice_point(plan, 4, bound=1), sample_slice_point(plan, 4, bound=1)
    assert p.y == q.y and p.params == q.params
    assert check_slice_point(plan, p) == []


def test_identity_word_has_trivial_ns():
    plan = _plan("B", 2, [])
    p = sample_slice_point(plan, 0)
    assert p.n_s.is_identity()


def test_a2_coxeter_points_distinct():
    plan = _plan("A", 2, [(1, 0), (0, 1)])
    pts = [sample_slice_point(plan, s) for s in range(10)]
    keys = {tuple(sorted(p.params["ns"].items())) for p in pts}
    assert len({p.y for p in pts}) == len(keys) > 1


def test_forward_identity_and_trace():
    plan = _plan("A", 2)
    ch = chevalley_for(plan.rs)
    p = sample_slice_point(plan, 1)
    assert forward(identity(ch), p) == p.y
    g = forward(sample_nilradical(plan, 2), p)
    assert delta_coords(g.matrix.rows()) == delta_coords(p.y.matrix.rows())


def test_factorize_slice_point_itself():
    plan = _plan("B", 2)
    p = sample_slice_point(plan, 5)
    res = factorize(p.y, plan)
    assert res.n.is_identity() and res.n_s == p.n_s and res.z == p.z and res.exact


def test_a2_round_trips():
    plan = _plan("A", 2)
    for seed in range(10):
        p = sample_slice_point(plan, seed)
        n = sample_nilradical(plan, 100 + seed)
        res = factorize(forward(n, p), plan)
        assert (res.n, res.n_s, res.z) == (n, p.n_s, p.z)


def test_injectivity_in_n():
    plan = _plan("A", 3)
    p = sample_slice_point(plan, 0)
    gs = {forward(sample_nilradical(plan, s), p) for s in range(6)}
    ns = {sample_nilradical(plan, s) for s in range(6)}
    assert len(gs) == len(ns)


def test_factorization_unique_under_shuffles():
    plan = _plan("C", 3)
    p = sample_slice_point(plan, 3)
    n = sample_nilradical(plan, 9)
    g = forward(n, p)
    base = factorize(g, plan)
    for seed in range(3):
        other = factorize(g, plan, shuffle_seed=seed)
        assert (other.n, other.n_s, other.z) == (base.n, base.n_s, base.z)


@pytest.mark.parametrize("t,dim", [(("A", 2), 8), (("B", 2), 10), (("G", 2), 14)])
def test_transversality_rank(t, dim):
    plan = _plan(*t)
    for seed in range(3):
        assert transversality_rank(sample_slice_point(plan, seed), plan) == dim


def test_transversality_identity_word():
    plan = _plan("A", 2, [])
    assert transversality_rank(sample_slice_point(plan, 0), plan) == 8


@pytest.mark.parametrize("t,word,sizes", [
    (("A", 2), None, (3, 1, 3, 1)),
    (("A", 2), [(1, 0), (0, 1)], (3, 0, 3, 2)),
    (("B", 2), None, (4, 0, 4, 2)),
])
def test_decomposition_dimensions(t, word, sizes):
    plan = _plan(*t, word)
    ok, bad = decomposition_check(plan)
    assert ok, bad
    n = len(plan.nilradical_roots)
    z = len(plan.levi_roots) + plan.blocks[0].dim
    rest = plan.rs.rank - plan.blocks[0].dim
    assert (n, z, n, rest) == sizes
    assert fixed_point_free(plan)


def test_identity_decomposition():
    plan = _plan("B", 3, [])
    ok, _ = decomposition_check(plan)
    assert ok and not plan.nilradical_roots and len(plan.levi_roots) + 3 == plan.rs.dim


def test_fixed_cocharacters_are_fixed():
    plan = _plan("A", 4)
    (lam,) = fixed_cocharacters(plan)
    mt = list(zip(*plan.s.matrix))
    assert [sum(mt[i][j] * lam[j] for j in range(4)) for i in range(4)] == list(lam)


TYPES = [("A", 2), ("A", 3), ("B", 2), ("C", 3), ("G", 2)]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(TYPES), st.integers(0, 2**31))
def test_round_trip_property(t, seed):
    rs = build_root_system(SimpleType(*t))
    rng = random.Random(seed)
    word = [rs.roots[rng.randrange(len(rs.roots))] for _ in range(rng.randint(1, 6))]
    plan = build_plan(rs, weyl_from_word(rs, word), seed=seed % 89)
    p = sample_slice_point(plan, seed)
    n = sample_nilradical(plan, seed + 1)
    res = factorize(forward(n, p), plan)
    assert (res.n, res.n_s, res.z) == (n, p.n_s, p.z)

from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from groupslices.chevalley import chevalley_for, normal_representative, torus_element, x_alpha
from groupslices.crosssection import sample_nilradical, sample_slice_point
from groupslices.errors import InvalidType
from groupslices.quotient import (
    Jet,
    _sample_params,
    defining_signs,
    delta_coords,
    delta_invariance,
    determinant,
    fiber_rank_scan,
    finite_difference_check,
    homogeneous_diagram,
    jacobian,
    lift_word,
    root_matrix,
    slice_parametrization_A,
)
from groupslices.rootsys import SimpleType, build_root_system, weyl_from_word
from groupslices.spectral import build_plan
from groupslices.subregular import subregular_plan


def _mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _inv(m):
    from groupslices.quotient import _qinverse

    return _qinverse(m)


def test_jet_product_rule():
    x = Jet(3, (1, 0))
    y = Jet(Fraction(1, 2), (0, 1))
    p = x * y + x ** 2 - y / 4
    assert p.val == Fraction(3, 2) + 9 - Fraction(1, 8)
    assert p.d == (Fraction(1, 2) + 6, Fraction(3) - Fraction(1, 4))
    inv = Jet(2, (1,)) ** -2
    assert inv.val == Fraction(1, 4) and inv.d == (Fraction(-1, 4),)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_defining_rep_is_a_lie_map(r):
    rs = build_root_system(SimpleType("A", r))
    ch = chevalley_for(rs)
    n = r + 1
    nr = len(rs.roots)

    def image(vec):
        out = [[Fraction(0)] * n for _ in range(n)]
        for c, v in enumerate(vec):
            if not v:
                continue
            if c < nr:
                m = root_matrix(rs, c)
            else:
                i = c - nr
                m = [[Fraction(0)] * n for _ in range(n)]
                m[i][i], m[i + 1][i + 1] = Fraction(1), Fraction(-1)
            out = [[out[x][y] + v * m[x][y] for y in range(n)] for x in range(n)]
        return out

    for a in range(nr):
        for b in range(nr):
            A, B = root_matrix(rs, a), root_matrix(rs, b)
            comm = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(_mul(A, B), _mul(B, A))]
            assert comm == image(ch.bracket(ch.basis_vector(a), ch.basis_vector(b)))
    assert len(defining_signs(r)) == nr


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**31))
def test_lift_matches_adjoint_action(r, seed):
    rs = build_root_system(SimpleType("A", r))
    ch = chevalley_for(rs)
    rng = random.Random(seed)
    g = x_alpha(ch, rng.randrange(len(rs.roots)), Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
    lam = [rng.randint(-2, 2) for _ in range(r)]
    g = g @ torus_element(ch, lam, Fraction(rng.randint(1, 4), rng.randint(1, 4)))
    g = g @ x_alpha(ch, rng.randrange(len(rs.roots)), rng.randint(-2, 2))
    L = lift_word(rs, g.word)
    Linv = _inv(L)
    for b in range(len(rs.roots)):
        conj = _mul(_mul(L, root_matrix(rs, b)), Linv)
        col = g.matrix.column(b)
        expect = [[Fraction(0)] * (r + 1) for _ in range(r + 1)]
        for c, v in enumerate(col[: len(rs.roots)]):
            if v:
                m = root_matrix(rs, c)
                expect = [[expect[x][y] + v * m[x][y] for y in range(r + 1)] for x in range(r + 1)]
        for i, v in enumerate(col[len(rs.roots):]):
            expect[i][i] += v
            expect[i + 1][i + 1] -= v
        assert conj == expect


def test_normal_rep_lift_acts_like_s():
    plan = subregular_plan(SimpleType("A", 3))
    rs = plan.rs
    word = normal_representative(plan).element.word
    L = lift_word(rs, word)
    Linv = _inv(L)
    for g in plan.simple:
        conj = _mul(_mul(L, root_matrix(rs, g)), Linv)
        sg = plan.s.perm[g]
        sign = (1 if g in plan.positive else -1) * (1 if sg in plan.positive else -1)
        assert conj == [[sign * x for x in row] for row in root_matrix(rs, sg)]


@pytest.mark.parametrize("r", [2, 3, 4])
def test_parametrization_basics(r):
    sp = slice_parametrization_A(r)
    assert sp.nparams == r + 2
    base = sp(sp.base_params())
    assert base.value() == sp.s_inverse
    assert determinant(base) == 1


def test_a2_determinants():
    sp = slice_parametrization_A(2)
    rng = random.Random(0)
    for _ in range(20):
        assert determinant(sp(_sample_params(rng, sp.nparams, 3))) == 1


def test_delta_of_identity_and_diagonal():
    for r in (2, 3, 5):
        ident = [[Fraction(int(i == j)) for j in range(r + 1)] for i in range(r + 1)]
        assert delta_coords(ident) == [comb(r + 1, k) * (-1) ** k for k in range(1, r + 1)]
    a, b = Fraction(2), Fraction(-3, 5)
    vals = (a, b, 1 / (a * b))
    diag = [[vals[i] if i == j else Fraction(0) for j in range(3)] for i in range(3)]
    e = oracles.elementary_symmetric(vals)
    assert delta_coords(diag) == [-e[1], e[2]]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9), st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_delta_conjugation_invariance(a, h):
    m = [[Fraction(x) for x in a[i * 3:(i + 1) * 3]] for i in range(3)]
    hm = [[Fraction(x) for x in h[i * 3:(i + 1) * 3]] for i in range(3)]
    hm = [[hm[i][j] + (5 if i == j else 0) for j in range(3)] for i in range(3)]  # diagonally dominant
    assert delta_coords(_mul(_mul(hm, m), _inv(hm))) == delta_coords(m)


def test_rank_scan_a2():
    rep = fiber_rank_scan(2, 0, 50)
    assert rep["rank_histogram"] == {"2": 50}
    assert rep["deficient_points"] == []


@pytest.mark.parametrize("r", [2, 3])
def test_rank_never_exceeds_r(r):
    rep = fiber_rank_scan(r, 5, 20)
    assert max(int(k) for k in rep["rank_histogram"]) <= r
    sp = slice_parametrization_A(r)
    assert len(jacobian(sp(sp.base_params()))) == r


def test_delta_invariance_on_samples():
    rs = build_root_system(SimpleType("A", 3))
    plans = [subregular_plan(rs.type), build_plan(rs, weyl_from_word(rs, [(1, 1, 0), (0, 0, 1)]))]
    for plan in plans:
        for seed in range(4):
            p = sample_slice_point(plan, seed)
            assert delta_invariance(plan, sample_nilradical(plan, seed + 50), p.y)


@pytest.mark.parametrize("r", [2, 3])
def test_difference_quotients_converge_quadratically(r):
    """Halving the step divides the gap to the exact partials by about four."""
    sp = slice_parametrization_A(r)
    rng = random.Random(2)
    params = _sample_params(rng, sp.nparams, 3)
    jac = jacobian(sp(params))
    gaps = []
    for h in (Fraction(1, 256), Fraction(1, 512)):
        worst = Fraction(0)
        for i in range(sp.nparams):
            up, dn = list(params), list(params)
            up[i] += h
            dn[i] -= h
            fu, fd = delta_coords(sp.values(up)), delta_coords(sp.values(dn))
            for row in range(r):
                worst = max(worst, abs((fu[row] - fd[row]) / (2 * h) - jac[row][i]))
        gaps.append(worst)
    assert gaps[1] < gaps[0] / 3
    # the exact partials are the limit: Richardson extrapolation lands on them
    assert gaps[1] < Fraction(1, 10)


@pytest.mark.parametrize("r", [2, 3])
def test_finite_differences_within_tolerance(r):
    """Symmetric differences at step 1/1024 agree with the jets to 1e-6."""
    rep = finite_difference_check(r, 0)
    assert rep["pass"], rep


@pytest.mark.parametrize("src,dst", [("B3", "A5"), ("A7", "A7"), ("G2", "D4"), ("C3", "D4"), ("F4", "E6"),
                                     ("D5", "D5"), ("E7", "E7")])
def test_homogeneous_diagram(src, dst):
    assert homogeneous_diagram(src) == dst


def test_homogeneous_diagram_rejects_bad_input():
    with pytest.raises(InvalidType):
        homogeneous_diagram("G3")
    with pytest.raises(InvalidType):
        homogeneous_diagram(7)


def test_parametrization_needs_rank_two():
    with pytest.raises(InvalidType):
        slice_parametrization_A(1)

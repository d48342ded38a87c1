from __future__ import annotations

from fractions import Fraction

import pytest

from groupslices.errors import VerificationFailed
from groupslices.rootsys import SimpleType, build_root_system, weyl_from_word
from groupslices.spectral import cyclotomic_factorization
from groupslices.subregular import catalog_well_formed, subregular_data, subregular_plan, verify_subregular

DESK = [("A", r) for r in range(1, 6)] + [("B", r) for r in (2, 3, 4)] + [("C", r) for r in (2, 3, 4)] \
    + [("D", 4), ("D", 5), ("G", 2), ("F", 4)]


@pytest.mark.parametrize("t", DESK + [("E", 6), ("E", 7), ("E", 8)])
def test_catalog_entries_are_roots(t):
    d = subregular_data(SimpleType(*t))
    assert catalog_well_formed(build_root_system(d.type), d) == []


def test_a3_and_g2_entries():
    a3 = subregular_data(SimpleType("A", 3))
    assert a3.e_roots == ((1, 0, 0), (0, 1, 0)) and a3.s_e_word == a3.e_roots
    g2 = subregular_data(SimpleType("G", 2))
    assert set(g2.e_roots) == {(2, 1), (0, 1)}
    assert g2.s_e_word == ((3, 1), (0, 1))


def test_f4_word():
    assert subregular_data(SimpleType("F", 4)).s_e_word == ((1, 0, 0, 0), (0, 1, 0, 0), (0, 1, 2, 0), (0, 0, 1, 1))


@pytest.mark.parametrize("r", [4, 5, 6])
def test_d_element_class(r):
    # (x^(r-2) + 1)(x^2 + 1): one factor Phi_{2(r-2)}-type block per divisor, plus Phi_4
    rs = build_root_system(SimpleType("D", r))
    s = weyl_from_word(rs, subregular_data(SimpleType("D", r)).s_e_word)
    f = cyclotomic_factorization(s.matrix, s.order)
    assert f.get(4, 0) >= 1
    assert 2 * (r - 2) in f


def test_e6_element_has_order_nine():
    rs = build_root_system(SimpleType("E", 6))
    s = weyl_from_word(rs, subregular_data(SimpleType("E", 6)).s_e_word)
    assert s.order == 9 and cyclotomic_factorization(s.matrix, 9) == {9: 1}


@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_type_a_minimal_block(r):
    plan = subregular_plan(SimpleType("A", r))
    assert plan.blocks[0].dim == 1
    assert plan.blocks[-1].angle_fraction == Fraction(1, r)
    assert plan.partition[-1] == frozenset(range(len(plan.rs.roots)))


@pytest.mark.parametrize("r", [2, 3, 4])
def test_type_b_anchor_level(r):
    plan = subregular_plan(SimpleType("B", r))
    rs = plan.rs
    a = rs.idx(rs.simple(r - 1))
    assert plan.partition[1] == frozenset({a, rs.neg(a)})


def test_e8_angle():
    plan = subregular_plan(SimpleType("E", 8))
    assert plan.blocks[-1].angle_fraction == Fraction(1, 24)


@pytest.mark.parametrize("t,l,h0,dim", [(("A", 2), 3, 1, 4), (("D", 4), 6, 0, 6), (("C", 3), 5, 0, 5)])
def test_verify_reports(t, l, h0, dim):
    rep = verify_subregular(SimpleType(*t))
    assert (rep["l"], rep["dim_h0"], rep["dim_slice"]) == (l, h0, dim)
    assert rep["pass"] and rep["borel"]


def test_d4_d2_block():
    plan = subregular_plan(SimpleType("D", 4))
    assert plan.blocks[1].m == 4 and plan.blocks[1].anchored


def test_a1_is_flagged_degenerate():
    rep = verify_subregular(SimpleType("A", 1))
    assert rep["degenerate"] and rep["pass"]


@pytest.mark.parametrize("t", [("G", 2), ("F", 4)])
def test_structure_of_g2_f4(t):
    r = t[1]
    rep = verify_subregular(SimpleType(*t), strict=False)
    assert (rep["l"], rep["dim_h0"], rep["dim_slice"], rep["borel"]) == (r + 2, 0, r + 2, True)


@pytest.mark.parametrize("t", [("G", 2), ("F", 4)])
def test_stated_angle_g2_f4(t):
    """The stated minimal angle for G2 and F4 is pi/3."""
    rep = verify_subregular(SimpleType(*t), strict=False)
    assert rep["theta_min"] == "1/6"


def test_strict_mode_raises():
    with pytest.raises(VerificationFailed):
        verify_subregular(SimpleType("G", 2), strict=True)

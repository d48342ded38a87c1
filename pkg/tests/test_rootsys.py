from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from groupslices.errors import InvalidType, NotARoot
from groupslices.rootsys import (
    SimpleType,
    build_root_system,
    length,
    parse_type,
    reduced_word,
    reflect,
    standard_positive,
    weyl_from_word,
    weyl_inverse,
)

SMALL = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 3), ("D", 4), ("G", 2), ("F", 4)]
# |Delta| from the classification tables
ROOT_COUNTS = {("A", 1): 2, ("A", 2): 6, ("A", 3): 12, ("B", 2): 8, ("B", 3): 18, ("C", 3): 18,
               ("D", 4): 24, ("G", 2): 12, ("F", 4): 48, ("E", 6): 72, ("E", 7): 126, ("E", 8): 240}


@pytest.mark.parametrize("fam,r", sorted(ROOT_COUNTS))
def test_root_counts(fam, r):
    rs = build_root_system(SimpleType(fam, r))
    assert len(rs.roots) == ROOT_COUNTS[(fam, r)]
    assert rs.n_positive * 2 == len(rs.roots)


@pytest.mark.parametrize("fam,r", SMALL)
def test_roots_match_closure_oracle(fam, r):
    rs = build_root_system(SimpleType(fam, r))
    assert set(rs.roots) == oracles.roots(fam, r)


def test_a1_roots():
    rs = build_root_system(SimpleType("A", 1))
    assert set(rs.roots) == {(1,), (-1,)}


def test_positive_block_then_negatives():
    rs = build_root_system(SimpleType("B", 3))
    n = rs.n_positive
    for i in range(n):
        assert rs.roots[i + n] == tuple(-x for x in rs.roots[i])
        assert rs.neg(i) == i + n
    assert [rs.roots[i] for i in range(3)] == [rs.simple(i) for i in range(3)]


@pytest.mark.parametrize("bad", [("A", 0), ("B", 1), ("D", 3), ("E", 5), ("F", 3), ("G", 3), ("X", 2)])
def test_invalid_types(bad):
    with pytest.raises(InvalidType):
        SimpleType(*bad)


def test_parse_type():
    assert parse_type("e7") == SimpleType("E", 7)
    with pytest.raises(InvalidType):
        parse_type("A")


def test_reflect_examples():
    rs = build_root_system(SimpleType("A", 2))
    a1, a2 = rs.simple(0), rs.simple(1)
    assert reflect(rs, a1, a1) == (-1, 0)
    assert reflect(rs, a1, a2) == (1, 1)
    with pytest.raises(NotARoot):
        reflect(rs, (2, 0), a2)


def test_reflect_rational_vectors():
    rs = build_root_system(SimpleType("G", 2))
    v = (Fraction(1, 3), Fraction(-2, 5))
    for g in rs.roots:
        assert reflect(rs, g, reflect(rs, g, v)) == v


def test_weyl_orders():
    a2 = build_root_system(SimpleType("A", 2))
    assert weyl_from_word(a2, []).order == 1
    assert weyl_from_word(a2, [(1, 0), (0, 1)]).order == 3
    g2 = build_root_system(SimpleType("G", 2))
    assert weyl_from_word(g2, [(3, 1), (0, 1)]).order == 3


def test_lengths():
    rs = build_root_system(SimpleType("A", 2))
    pos = standard_positive(rs)
    cox = weyl_from_word(rs, [(1, 0), (0, 1)])
    w0 = weyl_from_word(rs, [(1, 0), (0, 1), (1, 0)])
    assert length(weyl_from_word(rs, []), pos, rs) == 0
    assert length(cox, pos, rs) == 2
    assert length(w0, pos, rs) == 3


def test_reduced_word_of_reflection():
    rs = build_root_system(SimpleType("A", 2))
    w = weyl_from_word(rs, [(1, 1)])
    simple = [rs.simple(0), rs.simple(1)]
    red = reduced_word(rs, w, simple)
    assert len(red) == 3
    assert weyl_from_word(rs, [simple[i] for i in red]).matrix == w.matrix
    assert reduced_word(rs, weyl_from_word(rs, []), simple) == []


words = st.lists(st.integers(min_value=0, max_value=10_000), min_size=0, max_size=7)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), words)
def test_words_against_matrix_oracle(t, picks):
    fam, r = t
    rs = build_root_system(SimpleType(fam, r))
    word = [rs.roots[p % len(rs.roots)] for p in picks]
    w = weyl_from_word(rs, word)
    m = oracles.product(fam, r, word)
    # the package stores the matrix acting on coordinate columns
    assert np.array_equal(np.array(w.matrix), m)
    assert w.order == oracles.order(m)
    assert length(w, standard_positive(rs), rs) == oracles.inversions(fam, r, m)
    simple = [rs.simple(i) for i in range(r)]
    red = reduced_word(rs, w, simple)
    assert len(red) == length(w, standard_positive(rs), rs)
    assert weyl_from_word(rs, [simple[i] for i in red]).matrix == w.matrix
    inv = weyl_inverse(rs, w)
    assert weyl_from_word(rs, word[::-1]).matrix == inv.matrix
    # the permutation is the action on the root list
    for i, a in enumerate(rs.roots):
        assert rs.roots[w.perm[i]] == w.apply(a)

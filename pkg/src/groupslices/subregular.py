"""Subregular nilpotent data per simple type and the matching slice plans.

Each entry lists the roots whose root vectors sum to a subregular
nilpotent ``e`` and a reflection word for the associated Weyl element
``s_e``. Plans put the plane of smallest rotation angle last.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import GeneratorSearchFailed, InvalidPositiveSystem, RecipeMismatch, VerificationFailed
from .rootsys import Root, RootSystemData, SimpleType, build_root_system, weyl_from_word
from .spectral import (
    InvariantBlock,
    SlicePlan,
    _Metric,
    build_plan,
    invariant_decomposition,
    orthogonal_to_block,
)


def _v(r: int, coeffs: dict[int, int]) -> Root:
    """Root from 1-based coefficients, e.g. ``{2: 1, 3: 2}`` is ``a2 + 2 a3``."""
    out = [0] * r
    for i, c in coeffs.items():
        out[i - 1] = c
    return tuple(out)


@dataclass(frozen=True)
class Recipe:
    case: str  # A, BC, D, EG or F
    theta_min: Fraction  # angle of the last plane as a fraction of 2 pi
    anchor: str | None  # "short-line", "d2-plane" or None


@dataclass(frozen=True)
class SubregularDatum:
    type: SimpleType
    e_roots: tuple[Root, ...]
    s_e_word: tuple[Root, ...]
    recipe: Recipe
    expected: dict
    degenerate: bool = False


def subregular_data(t: SimpleType) -> SubregularDatum:
    if not isinstance(t, SimpleType):
        t = SimpleType(*t)
    f, r = t.family, t.rank
    a = lambda *idx: _v(r, {i: 1 for i in idx})  # noqa: E731
    if f == "A":
        e = tuple(a(i) for i in range(1, r))
        word = e
        recipe = Recipe("A", Fraction(1, r), None)
    elif f == "B":
        e = tuple(a(i) for i in range(1, r - 1)) + (a(r - 1, r), a(r))
        word = tuple(a(i) for i in range(1, r - 1)) + (a(r - 1), _v(r, {r - 1: 1, r: 2}))
        recipe = Recipe("BC", Fraction(1, 2 * (r - 1)), "short-line")
    elif f == "C":
        e = tuple(a(i) for i in range(1, r - 1)) + (_v(r, {r - 1: 2, r: 1}), a(r))
        word = tuple(a(i) for i in range(1, r - 1)) + (_v(r, {r - 1: 2, r: 1}), a(r))
        recipe = Recipe("BC", Fraction(1, 2 * (r - 1)), "short-line")
    elif f == "D":
        e = tuple(a(i) for i in range(1, r - 3)) + (a(r - 3, r - 2), a(r - 2, r - 1), a(r - 1), a(r))
        # reflections in the e roots give the class with char poly (x^(r-2)+1)(x^2+1)
        word = e
        recipe = Recipe("D", Fraction(1, 2 * (r - 2)), "d2-plane")
    elif f == "E":
        if r == 6:
            # relabelled onto our chain: trivalent a3, arms a6 | a2-a1 | a4-a5
            e = (a(6), a(2, 3), a(1), a(5), a(3, 4), a(4))
            theta = Fraction(1, 9)
        elif r == 7:
            e = (a(1), a(2), a(3, 4), a(5), a(6), a(7), a(4, 7))
            theta = Fraction(1, 14)
        else:
            e = (a(1), a(2), a(3), a(4, 5), a(5, 8), a(6), a(7), a(8))
            theta = Fraction(1, 24)
        word = e
        recipe = Recipe("EG", theta, None)
    elif f == "F":
        e = (a(1), a(2), _v(r, {2: 1, 3: 2}), a(3, 4))
        word = e
        recipe = Recipe("F", Fraction(1, 6), None)
    else:
        e = (_v(r, {1: 2, 2: 1}), a(2))
        word = (_v(r, {1: 3, 2: 1}), a(2))
        recipe = Recipe("EG", Fraction(1, 6), None)
    l_exp = r + 1 if f == "A" else r + 2
    expected = {"l": l_exp, "dim_h0": 1 if f == "A" else 0, "dim_slice": r + 2}
    return SubregularDatum(t, e, word, recipe, expected, degenerate=(f == "A" and r == 1))


def catalog_well_formed(rs: RootSystemData, datum: SubregularDatum) -> list[str]:
    bad = [f"e root {x} is not a root" for x in datum.e_roots if not rs.is_root(x)]
    bad += [f"word root {x} is not a root" for x in datum.s_e_word if not rs.is_root(x)]
    return bad


def _d2_candidates(rs: RootSystemData, s) -> list[tuple[int, int]]:
    """Orthogonal pairs ``b, c`` with ``{+-b, +-c}`` s-stable and s of order 4 on their span."""
    out = []
    pos = range(rs.n_positive)
    for b, c in combinations(pos, 2):
        if rs.inner(rs.roots[b], rs.roots[c]) != 0:
            continue
        quad = {b, c, rs.neg(b), rs.neg(c)}
        if any(s.perm[x] not in quad for x in quad):
            continue
        if s.perm[s.perm[b]] == rs.neg(b) and s.perm[s.perm[c]] == rs.neg(c):
            out.append((b, c))
    return out


def _order_blocks(blocks: list[InvariantBlock], first: int | None, last: int) -> tuple[int, ...]:
    """Block order (indices among non-fixed blocks): ``first`` at the front, ``last`` at the end."""
    n = len(blocks) - 1
    middle = [i for i in range(n) if i not in (first, last)]
    head = [first] if first is not None else []
    return tuple(head + middle + [last])


def _min_angle_blocks(blocks: list[InvariantBlock]) -> list[int]:
    """Non-anchored blocks (indices among non-fixed ones) of smallest angle."""
    free = [(i, b) for i, b in enumerate(blocks[1:]) if not b.anchored]
    if not free:
        return []
    theta = min(b.angle_fraction for _, b in free)
    return [i for i, b in free if b.angle_fraction == theta]


def _check_recipe(plan: SlicePlan, special: frozenset[int] | None) -> list[str]:
    """Structural checks on the level sets; the angle itself is judged by the caller."""
    rs = plan.rs
    bad = []
    angles = [b.angle_fraction for b in plan.blocks[1:]]
    if angles and plan.blocks[-1].angle_fraction != min(angles):
        bad.append("last block is not one of minimal angle")
    allr = frozenset(range(len(rs.roots)))
    top = plan.partition[-1] if plan.M >= 1 else frozenset()
    if plan.level_blocks[-1] != len(plan.blocks) - 1:
        bad.append("the minimal-angle block does not carry a level")
    expected_top = allr - special if special is not None else allr
    if top != expected_top:
        bad.append("Delta_min differs from the recipe")
    if special is not None:
        if plan.M != 2 or plan.partition[1] != special or plan.level_blocks[1] != 1:
            bad.append("Delta_1 differs from the recipe")
    return bad


def subregular_plan(t: SimpleType, seed: int = 0, attempts: int = 32) -> SlicePlan:
    """Plan for ``s_e`` with the per-type block ordering.

    The plane of smallest angle goes last. When that angle has multiplicity,
    a plane inside its component that is orthogonal to no root is searched for.
    """
    datum = subregular_data(t)
    rs = build_root_system(datum.type)
    s = weyl_from_word(rs, datum.s_e_word)
    if datum.degenerate:
        return build_plan(rs, s, seed=seed)
    rec = datum.recipe
    problems: list[str] = []
    if rec.anchor == "short-line":
        r = rs.rank
        i = rs.idx(rs.simple(r - 1))
        anchors_list = [([rs.simple(r - 1)], frozenset({i, rs.neg(i)}))]
    elif rec.anchor == "d2-plane":
        anchors_list = [([rs.roots[b], rs.roots[c]], frozenset({b, c, rs.neg(b), rs.neg(c)}))
                        for b, c in _d2_candidates(rs, s)]
        if not anchors_list:
            problems.append("no s-stable D2 subsystem with s of order 4 on it")
    else:
        anchors_list = [(None, None)]
    metric = _Metric(rs)
    for span, special in anchors_list:
        for attempt in range(attempts):
            eff = seed + 104729 * attempt
            blocks = invariant_decomposition(rs, s, eff, anchors=[span] if span else ())
            first = next(i for i, b in enumerate(blocks[1:]) if b.anchored) if special is not None else None
            hits = _min_angle_blocks(blocks)
            if len(hits) > 1:
                hits = [i for i in hits
                        if not any(orthogonal_to_block(rs, blocks[1 + i], a, metric) for a in rs.roots)]
                if not hits:
                    continue
            if not hits:
                problems.append("no block of minimal angle")
                break
            order = _order_blocks(blocks, first, hits[0])
            try:
                plan = build_plan(rs, s, order, eff, blocks=blocks)
            except (InvalidPositiveSystem, GeneratorSearchFailed) as exc:
                problems.append(str(exc))
                continue
            bad = _check_recipe(plan, special)
            if not bad:
                return plan
            problems.extend(bad)
            break
    raise RecipeMismatch(f"{datum.type}: " + ("; ".join(dict.fromkeys(problems)) if problems else "no plan found"))


def verify_subregular(t: SimpleType, seed: int = 0, strict: bool = True) -> dict:
    """Check length, fixed space, slice dimension, Borel property and the minimal angle."""
    datum = subregular_data(t)
    rs = build_root_system(datum.type)
    plan = subregular_plan(datum.type, seed)
    dims = plan.dims
    angles = [b.angle_fraction for b in plan.blocks[1:]]
    theta = min(angles) if angles else None
    report = {
        "type": str(datum.type),
        "l": dims["l"],
        "dim_h0": dims["dim_h0"],
        "dim_Z": dims["dim_Z"],
        "dim_slice": dims["dim_slice"],
        "theta_min": f"{theta.numerator}/{theta.denominator}" if theta is not None else None,
        "borel": not plan.levi_roots,
        "degenerate": datum.degenerate,
    }
    failures = catalog_well_formed(rs, datum)
    if datum.degenerate:
        report["note"] = "rank 1: empty e and identity s_e; dimension claims not asserted"
    else:
        exp = datum.expected
        for key in ("l", "dim_h0", "dim_slice"):
            if dims[key] != exp[key]:
                failures.append(f"{key} = {dims[key]}, expected {exp[key]}")
        if plan.levi_roots:
            failures.append("parabolic is not Borel")
        if theta != datum.recipe.theta_min:
            failures.append(f"theta_min = {theta}, expected {datum.recipe.theta_min}")
        if datum.type.family == "A":
            fixed = plan.blocks[0].exact_basis or ()
            r = rs.rank
            ok = len(fixed) == 1 and all(rs.inner(fixed[0], rs.simple(j)) == 0 for j in range(r - 1)) \
                and rs.inner(fixed[0], rs.simple(r - 1)) != 0
            if not ok:
                failures.append("fixed space is not the omega_r line")
        if datum.type.family == "D" and plan.blocks[1].m != 4:
            failures.append("D2 block does not have m = 4")
    report["pass"] = not failures
    if failures:
        report["failures"] = failures
        if strict:
            raise VerificationFailed(f"{datum.type}: " + "; ".join(failures))
    return report

"""The wreath product: action, pullback/pushforward, cup product, projection."""

from fractions import Fraction

import pytest

from hilb.errors import UsageError
from hilb.surface_ring import preset
from hilb.symmetric_groups import OrbitPartition, Perm, parse_cycles
from hilb.wreath_ring import (
    WreathClass,
    basis_count,
    check_unit_laws,
    cup,
    cup_class,
    element_degree,
    enumerate_wreath_basis,
    invariant_project,
    iter_orbit_reps,
    make_element,
    pullback_merge,
    pushforward_split,
    render_class,
    render_element,
    sn_act,
    unit_element,
)


def test_element_shape_enforced():
    ring = preset("d4")
    with pytest.raises(UsageError):
        make_element(ring, 2, parse_cycles("(1 2)", 2), (0, 0))  # one orbit only
    x = make_element(ring, 2, parse_cycles("(1 2)", 2), (0,))
    assert element_degree(ring, x) == 2  # deg(1) + 2*(2-1)


def test_basis_enumeration_counts():
    ring = preset("a0")
    assert basis_count(ring, 2) == 16 + 4
    assert len(list(enumerate_wreath_basis(ring, 2))) == 20
    ring = preset("d4")
    assert basis_count(ring, 3) == 6**3 + 3 * 36 + 2 * 6


def test_sn_act_identity_and_even_ring():
    ring = preset("d4")
    x = make_element(ring, 3, parse_cycles("(1 2)", 3), (1, 5))
    sign, moved = sn_act(ring, Perm.identity(3), x)
    assert sign == 1 and moved == x
    # even ring: no sign can ever appear
    for tau in (parse_cycles("(1 3)", 3), parse_cycles("(1 2 3)", 3)):
        sign, moved = sn_act(ring, tau, x)
        assert sign == 1


def test_sn_act_transports_factors():
    ring = preset("d4")
    x = make_element(ring, 3, parse_cycles("(1 2)", 3), (1, 5))  # E1 on {1,2}, S on {3}
    tau = parse_cycles("(2 3)", 3)
    sign, moved = sn_act(ring, tau, x)
    assert moved.sigma == parse_cycles("(1 3)", 3)
    # orbits of (1 3): {1,3} and {2}; E1 rides to {1,3}, S to {2}
    assert moved.factors == (1, 5)
    assert sign == 1


def test_sn_act_odd_transposition_sign():
    # two odd factors swapping positions pick up the Koszul sign
    ring = preset("a0")
    a, b = ring.index("a"), ring.index("b")
    x = make_element(ring, 2, Perm.identity(2), (a, b))
    sign, moved = sn_act(ring, parse_cycles("(1 2)", 2), x)
    assert moved.factors == (b, a)
    assert sign == -1


def test_pullback_merge_identity_and_cup():
    ring = preset("k3")
    f, s = ring.index("f"), ring.index("s")
    pt = ring.top_index()
    fine = OrbitPartition(((1,), (2,)))
    coarse = OrbitPartition(((1, 2),))
    tensor = {(f, s): Fraction(1)}
    assert pullback_merge(ring, tensor, fine, fine) == tensor
    assert pullback_merge(ring, tensor, fine, coarse) == {(pt,): 1}


def test_pullback_merge_zero_product():
    ring = preset("d4")
    fine = OrbitPartition(((1,), (2,)))
    coarse = OrbitPartition(((1, 2),))
    assert pullback_merge(ring, {(1, 1): Fraction(1)}, fine, coarse) == {}


def test_pushforward_split_identity_and_diagonal():
    ring = preset("d4")
    fine = OrbitPartition(((1,), (2,)))
    coarse = OrbitPartition(((1, 2),))
    tensor = {(0,): Fraction(1)}
    assert pushforward_split(ring, tensor, coarse, coarse) == tensor
    assert pushforward_split(ring, tensor, coarse, fine) == {
        (i, i): -1 for i in range(1, 5)
    }


def test_pushforward_requires_nesting():
    ring = preset("d4")
    p1 = OrbitPartition(((1, 2), (3,)))
    p2 = OrbitPartition(((1,), (2, 3)))
    with pytest.raises(UsageError):
        pushforward_split(ring, {(0, 0): Fraction(1)}, p1, p2)
    with pytest.raises(UsageError):
        pullback_merge(ring, {(0, 0): Fraction(1)}, p1, p2)


def test_cup_d4_transposition_squares_to_diagonal():
    ring = preset("d4")
    x = make_element(ring, 2, parse_cycles("(1 2)", 2), (0,))
    result = cup(ring, x, x)
    expected = WreathClass(2)
    for i in range(1, 5):
        expected.add_term(
            make_element(ring, 2, Perm.identity(2), (i, i)), Fraction(-1)
        )
    assert result == expected


def test_cup_k3_three_cycle_euler_branch():
    ring = preset("k3")
    x = make_element(ring, 3, parse_cycles("(1 2 3)", 3), (0,))
    result = cup(ring, x, x)
    expected = WreathClass.of(
        make_element(ring, 3, parse_cycles("(1 3 2)", 3), (ring.top_index(),)),
        Fraction(24),
    )
    assert result == expected
    assert "24" in render_class(ring, result)
    assert "(1 3 2)" in render_class(ring, result)


def test_cup_open_ring_euler_branch_dies():
    # e = 0 on the open presets, so the g = 1 branch vanishes
    ring = preset("d4")
    x = make_element(ring, 3, parse_cycles("(1 2 3)", 3), (0,))
    assert cup(ring, x, x) == WreathClass(3)


def test_unit_laws_small():
    for name in ("a0", "d4", "k3", "abelian"):
        ring = preset(name)
        report = check_unit_laws(ring, 2)
        assert report.passed, report.render_text()


def test_degree_additivity_exhaustive_n2():
    for name in ("a0", "d4", "k3", "abelian"):
        ring = preset(name)
        elements = list(enumerate_wreath_basis(ring, 2))
        for x in elements:
            dx = element_degree(ring, x)
            for y in elements:
                expected = dx + element_degree(ring, y)
                for term in cup(ring, x, y).terms:
                    assert element_degree(ring, term) == expected


def test_degree_additivity_n3_samples():
    import random

    rng = random.Random(0)
    for name in ("a0", "d4", "k3", "abelian"):
        ring = preset(name)
        elements = list(enumerate_wreath_basis(ring, 3))
        for _ in range(300):
            x, y = rng.choice(elements), rng.choice(elements)
            expected = element_degree(ring, x) + element_degree(ring, y)
            for term in cup(ring, x, y).terms:
                assert element_degree(ring, term) == expected


def test_bilinearity_of_cup_class():
    ring = preset("d4")
    x = make_element(ring, 2, parse_cycles("(1 2)", 2), (0,))
    y = make_element(ring, 2, Perm.identity(2), (1, 1))
    c = WreathClass(2, {x: Fraction(2), y: Fraction(3)})
    u = unit_element(ring, 2)
    assert cup_class(ring, c, u) == c
    assert cup_class(ring, u, c) == c


def test_invariant_project_examples():
    ring = preset("d4")
    u = unit_element(ring, 2)
    assert invariant_project(ring, WreathClass.of(u)) == WreathClass.of(u)
    x = make_element(ring, 2, parse_cycles("(1 2)", 2), (1,))
    proj = invariant_project(ring, WreathClass.of(x))
    assert proj == WreathClass.of(x)  # single conjugacy class, fixed factor
    # idempotency
    y = make_element(ring, 2, Perm.identity(2), (1, 5))
    once = invariant_project(ring, WreathClass.of(y))
    assert invariant_project(ring, once) == once


def test_invariant_project_kills_odd_diagonal():
    # (a (x) a) . id is antisymmetrized away for odd a
    ring = preset("a0")
    a = ring.index("a")
    x = make_element(ring, 2, Perm.identity(2), (a, a))
    assert invariant_project(ring, WreathClass.of(x)) == WreathClass(2)


def test_orbit_reps_super_dimension_count():
    # surviving orbit count over S_2 on a0: multisets on even classes,
    # distinct pairs on odd classes, plus the 4 two-cycle classes
    ring = preset("a0")
    reps = list(iter_orbit_reps(ring, 2))
    survivors = [r for r, ok in reps if ok]
    assert len(survivors) == 8 + 4
    killed = [r for r, ok in reps if not ok]
    assert len(killed) == 2  # (a,a) and (b,b) on the identity component


def test_render_element():
    ring = preset("d4")
    x = make_element(ring, 3, parse_cycles("(1 2)", 3), (1, 5))
    assert render_element(ring, x) == "[E1@{1,2} ⊗ S@{3}] * (1 2)"

"""Abstract perversity and the filtration checkers."""

from fractions import Fraction

import pytest

from hilb.errors import UsageError
from hilb.perverse_filtration import (
    BOTTOM,
    MONODROMY_MATRICES,
    TRIANGLE_MATRIX,
    check_diagonal_bound,
    check_intersection_nondegenerate,
    check_monodromy_suite,
    check_monodromy_vanishing,
    check_multiplicativity,
    perversity,
    perversity_class,
    pw_transport,
)
from hilb.surface_ring import SurfaceRing, preset
from hilb.symmetric_groups import Perm, enumerate_sn, parse_cycles
from hilb.wreath_ring import (
    WreathClass,
    cup,
    enumerate_wreath_basis,
    make_element,
    sn_act,
    unit_element,
)


def test_perversity_examples():
    d4 = preset("d4")
    assert perversity(d4, unit_element(d4, 3)) == 0
    x = make_element(d4, 2, parse_cycles("(1 2)", 2), (0,))
    assert perversity(d4, x) == 1
    y = make_element(d4, 2, parse_cycles("(1 2)", 2), (1,))
    assert perversity(d4, y) == 2  # p(E1) = 1 plus the 2-cycle shift
    k3 = preset("k3")
    z = make_element(k3, 3, parse_cycles("(1 3 2)", 3), (k3.top_index(),))
    assert perversity(k3, z) == 4


def test_perversity_range():
    for name in ("a0", "d4", "k3"):
        ring = preset(name)
        for x in enumerate_wreath_basis(ring, 2):
            assert 0 <= perversity(ring, x) <= 4


def test_perversity_class():
    d4 = preset("d4")
    assert perversity_class(d4, WreathClass(2)) is BOTTOM
    assert BOTTOM < 0 and not (BOTTOM > 5) and BOTTOM <= BOTTOM
    x = make_element(d4, 2, parse_cycles("(1 2)", 2), (0,))
    assert perversity_class(d4, cup(d4, x, x)) == 2


def test_perversity_invariant_under_action():
    for name in ("a0", "d4", "abelian"):
        ring = preset(name)
        taus = list(enumerate_sn(3))
        for x in enumerate_wreath_basis(ring, 3):
            p = perversity(ring, x)
            for tau in taus:
                _, moved = sn_act(ring, tau, x)
                assert perversity(ring, moved) == p


def test_external_additivity_on_identity_component():
    # pure tensors on sigma = id: perversity is the sum of factor perversities
    for name in ("a0", "d4", "k3"):
        ring = preset(name)
        for x in enumerate_wreath_basis(ring, 3):
            if x.sigma == Perm.identity(3):
                assert perversity(ring, x) == sum(
                    ring.perversities[f] for f in x.factors
                )


def test_multiplicativity_small_presets():
    for name in ("a0", "d4", "k3", "abelian"):
        ring = preset(name)
        report = check_multiplicativity(ring, 2)
        assert report.passed, report.render_text()
        assert report.info["mode"] == "exhaustive"


def _corrupted_d4() -> SurfaceRing:
    """d4 with Delta_2(1) := S (x) S, a perversity-4 class breaking the bound."""
    ring = preset("d4")
    s = ring.index("S")
    return SurfaceRing(
        name="corrupted",
        mode="open",
        names=ring.names,
        degrees=ring.degrees,
        perversities=ring.perversities,
        unit=ring.unit,
        mul={
            (i, j): dict(ring.mul_basis(i, j))
            for i in range(ring.size)
            for j in range(ring.size)
        },
        diag2={0: {(s, s): Fraction(1)}},
        euler={},
    )


def test_multiplicativity_catches_corrupted_diagonal():
    ring = _corrupted_d4()
    report = check_multiplicativity(ring, 2)
    assert not report.passed
    worst = report.witnesses[0]
    assert worst["x"] == "[1@{1,2}] * (1 2)"
    assert worst["y"] == "[1@{1,2}] * (1 2)"
    assert worst["bound"] == 2
    assert worst["actual"] == 4
    assert worst["excess"] == 2


def test_multiplicativity_jobs_match_serial():
    ring = preset("d4")
    serial = check_multiplicativity(ring, 2, jobs=1)
    parallel = check_multiplicativity(ring, 2, jobs=2)
    assert serial.passed == parallel.passed
    assert serial.witnesses == parallel.witnesses


def test_multiplicativity_sampled_mode_below_limit():
    ring = preset("k3")
    report = check_multiplicativity(ring, 2, limit=10, sample_size=200, seed=7)
    assert report.info["mode"] == "sampled"
    assert report.info["seed"] == 7
    assert report.passed


def test_diagonal_bound_presets():
    for name in ("a0", "d4", "e6", "e7", "e8", "k3", "abelian"):
        report = check_diagonal_bound(preset(name), n_max=4)
        assert report.passed, report.render_text()


def test_diagonal_bound_catches_corruption():
    report = check_diagonal_bound(_corrupted_d4(), n_max=2)
    assert not report.passed
    assert report.witnesses[0]["perversity_sum"] == 4
    assert report.witnesses[0]["bound"] == 2


def test_pw_transport_tables():
    # n = 1 perverse tables of the five families map onto the weight tables
    assert pw_transport({0: {0: 1}, 1: {2: 4}, 2: {2: 1}}) == {
        0: {0: 1},
        2: {2: 4},
        4: {2: 1},
    }
    assert pw_transport({0: {0: 1}, 1: {1: 2}, 2: {2: 1}}) == {
        0: {0: 1},
        2: {1: 2},
        4: {2: 1},
    }
    assert pw_transport({}) == {}


def test_monodromy_matrices():
    expected_dets = [4, 3, 2, 1]
    for matrix, det in zip(MONODROMY_MATRICES, expected_dets):
        report = check_monodromy_vanishing(matrix)
        assert report.passed
        assert report.info["det_m_minus_i"] == det
    identity = ((1, 0), (0, 1))
    assert not check_monodromy_vanishing(identity).passed
    with pytest.raises(UsageError):
        check_monodromy_vanishing(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def test_intersection_matrix():
    report = check_intersection_nondegenerate(TRIANGLE_MATRIX)
    assert report.passed
    assert report.info["determinant"] == 4
    assert not check_intersection_nondegenerate(((0,),)).passed
    assert check_intersection_nondegenerate(((-2,),)).passed


def test_monodromy_suite():
    report = check_monodromy_suite()
    assert report.passed
    assert report.info["monodromy_determinants"] == [4, 3, 2, 1]
    assert report.info["triangle_determinant"] == 4

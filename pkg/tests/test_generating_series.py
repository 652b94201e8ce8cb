"""Generating series: closed forms, refined products, partition sums, oracle."""

from fractions import Fraction

import pytest

from hilb.errors import UsageError
from hilb.exact_poly import TruncatedSeries
from hilb.generating_series import (
    SeriesSpec,
    betti_goettsche,
    brute_force_poincare,
    closed_form,
    compare_series,
    partition_sum,
    partitions,
    poly_render,
    refined_goettsche,
    ring_betti,
    ring_dims,
)
from hilb.surface_ring import preset

FAMILY = {"a0": "a0", "d4": "dynkin4", "e6": "dynkin6", "e7": "dynkin7", "e8": "dynkin8"}


def test_series_spec_parsing():
    assert SeriesSpec.parse("a0", 3).case == "a0"
    assert SeriesSpec.parse("dynkin7", 3).k == 7
    with pytest.raises(UsageError):
        SeriesSpec.parse("dynkin5", 3)
    with pytest.raises(UsageError):
        SeriesSpec.parse("e6", 3)


def test_closed_form_s0_and_s1():
    for label, expected_s1 in [
        ("a0", {(0, 0): 1, (1, 1): 2, (2, 2): 1}),
        ("dynkin4", {(0, 0): 1, (1, 2): 4, (2, 2): 1}),
        ("dynkin6", {(0, 0): 1, (1, 2): 6, (2, 2): 1}),
    ]:
        series = closed_form(SeriesSpec.parse(label, 2))
        assert series.coefficient_of_s(0) == {(0, 0): 1}
        assert series.coefficient_of_s(1) == expected_s1


def test_partitions():
    assert list(partitions(0)) == [()]
    assert sorted(partitions(4)) == sorted(
        [
            (0, 0, 0, 1),
            (1, 0, 1, 0),
            (0, 2, 0, 0),
            (2, 1, 0, 0),
            (4, 0, 0, 0),
        ]
    )


def test_partition_sum_examples():
    d4 = ring_dims(preset("d4"))
    assert partition_sum(d4, 0) == {(0, 0): 1}
    assert partition_sum(d4, 1) == {(0, 0): 1, (1, 2): 4, (2, 2): 1}
    cf = closed_form(SeriesSpec.parse("dynkin4", 2))
    assert partition_sum(d4, 2) == cf.coefficient_of_s(2)


def test_brute_force_examples():
    d4 = preset("d4")
    assert brute_force_poincare(d4, 0) == {(0, 0): 1}
    assert brute_force_poincare(d4, 1) == {(0, 0): 1, (1, 2): 4, (2, 2): 1}
    a0 = preset("a0")
    cf = closed_form(SeriesSpec.parse("a0", 2))
    assert brute_force_poincare(a0, 2) == cf.coefficient_of_s(2)


@pytest.mark.parametrize("name", ["a0", "d4", "e6", "e7", "e8"])
def test_refined_equals_closed_form(name):
    ring = preset(name)
    bound = 6
    refined = refined_goettsche(ring_dims(ring), bound)
    closed = closed_form(SeriesSpec.parse(FAMILY[name], bound))
    assert compare_series(refined, closed, bound).equal


@pytest.mark.parametrize(
    "name,n_max",
    [("a0", 3), ("d4", 3), ("e6", 3), ("e7", 3), ("e8", 3), ("k3", 3), ("abelian", 3)],
)
def test_oracle_equivalence_small(name, n_max):
    # acceptance runs the larger five-family ranges; these cover every preset
    ring = preset(name)
    dims = ring_dims(ring)
    refined = refined_goettsche(dims, n_max)
    for n in range(n_max + 1):
        brute = brute_force_poincare(ring, n)
        summed = partition_sum(dims, n)
        coeff = refined.coefficient_of_s(n)
        assert brute == summed == coeff, (name, n)


@pytest.mark.parametrize("name", ["a0", "d4", "e6", "e7", "e8", "k3", "abelian"])
def test_goettsche_betti_specialization(name):
    ring = preset(name)
    bound = 4
    refined = refined_goettsche(ring_dims(ring), bound).specialize(q_value=1)
    betti = betti_goettsche(ring_betti(ring), bound)
    assert refined == betti


@pytest.mark.parametrize("name", ["a0", "d4", "e6", "e7", "e8", "k3", "abelian"])
def test_degree_bounds(name):
    ring = preset(name)
    refined = refined_goettsche(ring_dims(ring), 4)
    for (e_s, e_q, e_t) in refined.terms:
        assert e_t <= 4 * e_s
        assert e_q <= 2 * e_s


@pytest.mark.parametrize("name", ["k3", "abelian"])
def test_hard_lefschetz_palindromy_compact(name):
    ring = preset(name)
    refined = refined_goettsche(ring_dims(ring), 3)
    for n in range(1, 4):
        poly = refined.coefficient_of_s(n)
        flipped = {(2 * n - q, 4 * n - t): c for (q, t), c in poly.items()}
        assert flipped == poly, (name, n)


@pytest.mark.parametrize(
    "name,n_max",
    [("a0", 5), ("d4", 5), ("e6", 4), ("e7", 3), ("e8", 3), ("k3", 3), ("abelian", 3)],
)
def test_invariant_class_counts_match_betti_product(name, n_max):
    # number of surviving orbit classes per degree = coefficients of the
    # refined product at q := 1
    ring = preset(name)
    refined = refined_goettsche(ring_dims(ring), n_max).specialize(q_value=1)
    for n in range(n_max + 1):
        by_degree: dict[int, int] = {}
        for (q, t), c in brute_force_poincare(ring, n).items():
            by_degree[t] = by_degree.get(t, 0) + int(c)
        expected = {
            t: int(c) for (q, t), c in refined.coefficient_of_s(n).items()
        }
        assert by_degree == expected, (name, n)


def test_compare_series():
    a = closed_form(SeriesSpec.parse("dynkin4", 3))
    b = closed_form(SeriesSpec.parse("dynkin6", 3))
    assert compare_series(a, a, 3).equal
    report = compare_series(a, b, 1)
    assert not report.equal
    assert report.first_diff == (1, 1, 2)
    assert (report.coeff_a, report.coeff_b) == (4, 6)
    with pytest.raises(UsageError):
        compare_series(a, TruncatedSeries.one(1), 3)


def test_poly_render():
    assert poly_render({}) == "0"
    assert poly_render({(0, 0): Fraction(1), (1, 2): Fraction(4)}) == "1 + 4*q^1t^2"

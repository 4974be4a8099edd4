import itertools
from fractions import Fraction

import pytest

from backlund import (AlphaSeries, BacklundTable, PartitionConstraint, ShiftError, TruncationError, compute_A,
                      enumerate_partitions, verify_homogeneity, verify_pde_series)
from jet_algebra import CoeffRing, DomainError, Expr, JetMonomial, UNIT


def brute_force(c: PartitionConstraint, bound: int):
    found = []
    for n in itertools.product(range(bound + 1), repeat=c.length + 1):
        if sum(n) == c.count_sum and sum(i * k for i, k in enumerate(n)) == c.weighted_sum:
            found.append(n)
    return sorted(found, reverse=True)


# --- разбиения ---

def test_partition_examples():
    assert [s.n for s in enumerate_partitions(PartitionConstraint(1, 3, 1))] == [(2, 1)]
    assert [s.n for s in enumerate_partitions(PartitionConstraint(0, 0, 0))] == [(0,)]
    assert [s.n for s in enumerate_partitions(PartitionConstraint(2, 2, 2))] == [(1, 0, 1), (0, 2, 0)]


def test_partition_negative_length():
    assert [s.n for s in enumerate_partitions(PartitionConstraint(-1, 0, 0))] == [()]
    assert enumerate_partitions(PartitionConstraint(-1, 1, 0)) == []


@pytest.mark.parametrize("R,S,W", [(r, s, w) for r in range(4) for s in range(5) for w in range(5)])
def test_partitions_match_brute_force(R, S, W):
    c = PartitionConstraint(R, S, W)
    assert [s.n for s in enumerate_partitions(c)] == brute_force(c, S)


@pytest.mark.slow
@pytest.mark.parametrize("R", range(9))
def test_partitions_match_multiset_count(R):
    for S in range(9):
        by_weight = {}
        for parts in itertools.combinations_with_replacement(range(R + 1), S):
            n = tuple(parts.count(i) for i in range(R + 1))
            by_weight.setdefault(sum(parts), []).append(n)
        for W in range(13):
            found = [s.n for s in enumerate_partitions(PartitionConstraint(R, S, W))]
            assert found == sorted(by_weight.get(W, []), reverse=True), (R, S, W)


def test_partition_weight():
    solution = enumerate_partitions(PartitionConstraint(1, 3, 1))[0]
    assert solution.weight == Fraction(1, 2)


# --- таблица A_ν ---

def a_pow(z, q=1):
    return CoeffRing.monomial(z, q)


def test_closed_forms(table):
    assert table[0] == Expr.jet(0)
    assert table[1] == Expr.jet(1, coeff=a_pow(-1, 2))
    assert table[2] == Expr.jet(2, coeff=a_pow(-2, 2))
    assert table[3] == Expr.jet(3, coeff=a_pow(-3, 2)) + Expr.jet(1, 3, coeff=a_pow(-1, Fraction(1, 3)))
    a4_mixed = Expr({(JetMonomial.from_dict({1: 2, 2: 1}), UNIT): a_pow(-2, 2)})
    assert table[4] == Expr.jet(4, coeff=a_pow(-4, 2)) + a4_mixed


def test_compute_a_agrees_with_table(table):
    for nu in range(5, 9):
        assert compute_A(nu, table) == table[nu]


def test_homogeneity_up_to_twelve(table):
    report = verify_homogeneity(table)
    assert report.passed
    assert report.degrees == list(range(13))


def test_homogeneity_small_tables():
    assert verify_homogeneity(BacklundTable.build(4)).degrees == [0, 1, 2, 3, 4]
    assert verify_homogeneity(BacklundTable.build(1)).degrees == [0, 1]


def test_homogeneity_reports_violation():
    broken = BacklundTable([Expr.jet(0), Expr.jet(1, coeff=a_pow(-1, 2)), Expr.jet(1)])
    report = verify_homogeneity(broken)
    assert not report.passed
    assert report.violations[0]['nu'] == 2


def test_table_requires_depth():
    small = BacklundTable.build(2)
    with pytest.raises(TruncationError):
        small[3]
    with pytest.raises(TruncationError):
        compute_A(5, small)


def test_from_exprs_validates_structure(table):
    assert BacklundTable.from_exprs(table.coefficients[:4]).max_nu == 3
    with pytest.raises(DomainError):
        BacklundTable.from_exprs([Expr.jet(1)])
    with pytest.raises(DomainError):
        BacklundTable.from_exprs([Expr.jet(0), Expr.cos(1)])


def test_at_coupling_one(table):
    special = table.at_coupling(1)
    assert special[3] == Expr.jet(3, coeff=2) + Expr.jet(1, 3, coeff=Fraction(1, 3))


# --- ряды по α ---

def test_pde_residual_vanishes(table):
    for order in (0, 1, 10):
        assert verify_pde_series(table, order).is_zero()


def test_pde_residual_detects_corrupted_table(table):
    corrupted = BacklundTable(table.coefficients[:3] + [table[3] + Expr.jet(3)])
    residual = verify_pde_series(corrupted, 2)
    assert not residual.coefficient(2).is_zero()


def test_shift_down_and_reflect():
    series = AlphaSeries([Expr.zero(), Expr.zero(), Expr.jet(1), Expr.jet(2)])
    assert series.shift_down(2).coefficients == (Expr.jet(1), Expr.jet(2))
    assert series.reflect().coefficient(3) == -Expr.jet(2)
    with pytest.raises(ShiftError):
        series.shift_down(3)
    with pytest.raises(TruncationError):
        series.coefficient(4)


def test_cos_series_of_constant_phase():
    # cos(aφ + α·φ_ξ) = cos(aφ) - α·φ_ξ·sin(aφ) + O(α²)
    series = AlphaSeries([Expr.jet(0, coeff=a_pow(1)), Expr.jet(1)])
    result = series.cos_series()
    assert result.coefficient(0) == Expr.cos(1)
    assert result.coefficient(1) == -(Expr.jet(1) * Expr.sin(1))


def test_series_rejects_non_linear_constant_term():
    with pytest.raises(DomainError):
        AlphaSeries([Expr.jet(1), Expr.zero()]).sin_series()

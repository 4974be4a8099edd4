import random
from fractions import Fraction

import pytest

from cone_solver import LinearConstraint, eliminate_equalities, is_feasible, naive_feasible, solve_square


def test_builders_normalize_coefficients():
    c = LinearConstraint.ge({'y': 2, 'x': 0, 'a': Fraction(1, 2)}, 3)
    assert c.coefficients == (('a', Fraction(1, 2)), ('y', Fraction(2)))
    assert c.variables == ['a', 'y']
    assert not c.equality

    le = LinearConstraint.le({'x': 1}, 4)
    assert le.coefficients == (('x', Fraction(-1)),)
    assert le.constant == -4
    assert le.satisfied_by({'x': -4})
    assert not le.satisfied_by({'x': -3})

    eq = LinearConstraint.eq({'x': 1, 'y': -1})
    assert eq.satisfied_by({'x': 5, 'y': 5})
    assert not eq.satisfied_by({'x': 5, 'y': 4})


def test_simple_feasible_systems():
    assert is_feasible([])
    assert is_feasible([LinearConstraint.ge({'x': 1}, -1), LinearConstraint.ge({'x': -1}, 3)])
    assert is_feasible([LinearConstraint.ge({'x': 1, 'y': 1}, -1), LinearConstraint.ge({'x': -1, 'y': 1})])


def test_simple_infeasible_systems():
    # x ≥ 1 и x ≤ 0
    assert not is_feasible([LinearConstraint.ge({'x': 1}, -1), LinearConstraint.ge({'x': -1})])
    # x + y ≥ 1, x ≤ 0, y ≤ 0
    assert not is_feasible([LinearConstraint.ge({'x': 1, 'y': 1}, -1),
                            LinearConstraint.ge({'x': -1}), LinearConstraint.ge({'y': -1})])
    assert not is_feasible([LinearConstraint.ge({}, -1)])


def test_equalities_are_substituted():
    system = [LinearConstraint.eq({'x': 1, 'y': -1}), LinearConstraint.ge({'x': 1}, -2),
              LinearConstraint.ge({'y': -1}, 1)]
    assert not is_feasible(system)
    assert is_feasible(system[:2])

    rows = eliminate_equalities([LinearConstraint.eq({'x': 2}, -4), LinearConstraint.ge({'x': 1, 'y': 1})])
    assert rows == [({'y': Fraction(1)}, Fraction(2))]


def test_inconsistent_equalities():
    system = [LinearConstraint.eq({'x': 1}, -1), LinearConstraint.eq({'x': 1}, -2)]
    assert eliminate_equalities(system) is None
    assert not is_feasible(system)


def test_independent_groups_are_checked_separately():
    system = [LinearConstraint.ge({'x': 1}, -1), LinearConstraint.ge({'x': -1}, 2),
              LinearConstraint.ge({'y': 1}, -1), LinearConstraint.ge({'y': -1})]
    assert not is_feasible(system)
    assert is_feasible(system[:3])


def test_solve_square():
    assert solve_square([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]],
                        [Fraction(3), Fraction(5)]) == [Fraction(4, 5), Fraction(7, 5)]
    assert solve_square([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], [Fraction(1), Fraction(2)]) is None


def _random_system(rng: random.Random):
    names = ['x', 'y', 'z'][:rng.randint(1, 3)]
    system = []
    for _ in range(rng.randint(1, 5)):
        coefficients = {v: rng.randint(-3, 3) for v in names}
        constant = rng.randint(-5, 5)
        if rng.random() < 0.2:
            system.append(LinearConstraint.eq(coefficients, constant))
        else:
            system.append(LinearConstraint.ge(coefficients, constant))
    return system


def test_fourier_motzkin_agrees_with_vertex_oracle():
    rng = random.Random(2024)
    verdicts = set()
    for _ in range(300):
        system = _random_system(rng)
        expected = naive_feasible(system)
        assert is_feasible(system) == expected, [str(c) for c in system]
        verdicts.add(expected)
    assert verdicts == {True, False}


def test_oracle_rejects_large_systems():
    system = [LinearConstraint.ge({v: 1}) for v in 'wxyz']
    with pytest.raises(ValueError):
        naive_feasible(system)
    assert is_feasible(system)

"""
Точная проверка совместности систем линейных неравенств над Q
- Исключение равенств подстановкой
- Разбиение на независимые группы переменных
- Исключение Фурье-Моцкина на Fraction
- Наивный оракул: перебор вершин в ограничивающем кубе (не более 3 переменных)
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from config import WavefrontConfig

logger = logging.getLogger(__name__)

Row = Tuple[Dict[str, Fraction], Fraction]


@dataclass(frozen=True)
class LinearConstraint:
    """Σ c_v·x_v + constant ≥ 0 (или == 0 при equality=True)"""
    coefficients: Tuple[Tuple[str, Fraction], ...]
    constant: Fraction = Fraction(0)
    equality: bool = False

    @staticmethod
    def _pack(coefficients: Mapping[str, object]) -> Tuple[Tuple[str, Fraction], ...]:
        return tuple(sorted((v, Fraction(c)) for v, c in coefficients.items() if c != 0))

    @classmethod
    def ge(cls, coefficients: Mapping[str, object], constant=0) -> 'LinearConstraint':
        return cls(cls._pack(coefficients), Fraction(constant))

    @classmethod
    def le(cls, coefficients: Mapping[str, object], constant=0) -> 'LinearConstraint':
        return cls(cls._pack({v: -Fraction(c) for v, c in coefficients.items()}), -Fraction(constant))

    @classmethod
    def eq(cls, coefficients: Mapping[str, object], constant=0) -> 'LinearConstraint':
        return cls(cls._pack(coefficients), Fraction(constant), equality=True)

    @property
    def variables(self) -> List[str]:
        return [v for v, _ in self.coefficients]

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((c * Fraction(assignment.get(v, 0)) for v, c in self.coefficients), self.constant)

    def satisfied_by(self, assignment: Mapping[str, Fraction]) -> bool:
        value = self.evaluate(assignment)
        return value == 0 if self.equality else value >= 0

    def __str__(self):
        body = " + ".join(f"{c}·{v}" for v, c in self.coefficients) or "0"
        return f"{body} + {self.constant} {'=' if self.equality else '≥'} 0"


def _substitute(row: Row, var: str, expression: Row) -> Row:
    coefficients, constant = row
    factor = coefficients.get(var)
    if factor is None:
        return row
    result = {v: c for v, c in coefficients.items() if v != var}
    for v, c in expression[0].items():
        value = result.get(v, Fraction(0)) + factor * c
        if value:
            result[v] = value
        else:
            result.pop(v, None)
    return result, constant + factor * expression[1]


def eliminate_equalities(constraints: Iterable[LinearConstraint]) -> Optional[List[Row]]:
    """Подставить решения равенств в неравенства; None, если равенства несовместны"""
    equalities = [(dict(c.coefficients), c.constant) for c in constraints if c.equality]
    inequalities = [(dict(c.coefficients), c.constant) for c in constraints if not c.equality]

    while equalities:
        coefficients, constant = equalities.pop()
        if not coefficients:
            if constant != 0:
                return None
            continue
        var, pivot = min(coefficients.items())
        # var = -(Σ_{v≠var} c_v x_v + constant) / pivot
        expression = ({v: -c / pivot for v, c in coefficients.items() if v != var}, -constant / pivot)
        equalities = [_substitute(row, var, expression) for row in equalities]
        inequalities = [_substitute(row, var, expression) for row in inequalities]
    return inequalities


def _tighten(rows: Iterable[Row]) -> Optional[List[Row]]:
    """Нормировка строк, удаление дублей; None при очевидном противоречии"""
    best: Dict[Tuple[Tuple[str, Fraction], ...], Fraction] = {}
    for coefficients, constant in rows:
        if not coefficients:
            if constant < 0:
                return None
            continue
        scale = max(abs(c) for c in coefficients.values())
        key = tuple(sorted((v, c / scale) for v, c in coefficients.items()))
        value = constant / scale
        if key not in best or value < best[key]:
            best[key] = value
    return [(dict(key), value) for key, value in sorted(best.items())]


def _variable_groups(rows: Sequence[Row]) -> List[List[Row]]:
    parent: Dict[str, str] = {}

    def find(v: str) -> str:
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for coefficients, _ in rows:
        names = sorted(coefficients)
        for other in names[1:]:
            parent[find(other)] = find(names[0])

    groups: Dict[str, List[Row]] = {}
    for row in rows:
        root = find(min(row[0]))
        groups.setdefault(root, []).append(row)
    return [groups[root] for root in sorted(groups)]


def _fourier_motzkin(rows: List[Row]) -> bool:
    while True:
        rows = _tighten(rows)
        if rows is None:
            return False
        if not rows:
            return True

        counts: Dict[str, List[int]] = {}
        for coefficients, _ in rows:
            for v, c in coefficients.items():
                counts.setdefault(v, [0, 0])[0 if c > 0 else 1] += 1
        var = min(sorted(counts), key=lambda v: counts[v][0] * counts[v][1] - counts[v][0] - counts[v][1])

        positive = [r for r in rows if r[0].get(var, 0) > 0]
        negative = [r for r in rows if r[0].get(var, 0) < 0]
        remaining = [r for r in rows if var not in r[0]]
        for (p_coeffs, p_const), (n_coeffs, n_const) in itertools.product(positive, negative):
            p, q = p_coeffs[var], -n_coeffs[var]
            combined: Dict[str, Fraction] = {}
            for v in set(p_coeffs) | set(n_coeffs):
                if v == var:
                    continue
                value = q * p_coeffs.get(v, Fraction(0)) + p * n_coeffs.get(v, Fraction(0))
                if value:
                    combined[v] = value
            remaining.append((combined, q * p_const + p * n_const))
        rows = remaining


def is_feasible(constraints: Sequence[LinearConstraint]) -> bool:
    """Существует ли рациональная точка, удовлетворяющая всем ограничениям"""
    rows = eliminate_equalities(constraints)
    if rows is None:
        return False
    rows = _tighten(rows)
    if rows is None:
        return False
    for group in _variable_groups(rows):
        if not _fourier_motzkin(group):
            return False
    return True


# --- оракул ---

def solve_square(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Метод Гаусса на Fraction; None для вырожденной матрицы"""
    n = len(matrix)
    augmented = [list(row) + [value] for row, value in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if augmented[r][col] != 0), None)
        if pivot is None:
            return None
        augmented[col], augmented[pivot] = augmented[pivot], augmented[col]
        for r in range(n):
            if r != col and augmented[r][col] != 0:
                factor = augmented[r][col] / augmented[col][col]
                augmented[r] = [a - factor * b for a, b in zip(augmented[r], augmented[col])]
    return [augmented[i][n] / augmented[i][i] for i in range(n)]


def naive_feasible(constraints: Sequence[LinearConstraint], box: int = WavefrontConfig.ORACLE_BOX) -> bool:
    """Перебор вершин многогранника, обрезанного кубом |x_v| ≤ box"""
    variables = sorted({v for c in constraints for v in c.variables})
    if len(variables) > WavefrontConfig.ORACLE_MAX_VARIABLES:
        raise ValueError(f"Оракул рассчитан не более чем на {WavefrontConfig.ORACLE_MAX_VARIABLES} переменных, "
                         f"получено {len(variables)}")
    if not variables:
        return all(c.satisfied_by({}) for c in constraints)

    hyperplanes = [[c.get(v, Fraction(0)) for v in variables] + [constraint.constant]
                   for constraint in constraints for c in [dict(constraint.coefficients)]]
    for i in range(len(variables)):
        unit = [Fraction(int(i == j)) for j in range(len(variables))]
        hyperplanes.append(unit + [Fraction(box)])
        hyperplanes.append([-x for x in unit] + [Fraction(box)])
    bounded = list(constraints) + [LinearConstraint.ge({v: 1}, box) for v in variables] + \
        [LinearConstraint.le({v: 1}, -box) for v in variables]

    for subset in itertools.combinations(hyperplanes, len(variables)):
        point = solve_square([row[:-1] for row in subset], [-row[-1] for row in subset])
        if point is None:
            continue
        assignment = dict(zip(variables, point))
        if all(c.satisfied_by(assignment) for c in bounded):
            logger.debug(f"🔎 Вершина-свидетель: {assignment}")
            return True
    return False

#!/usr/bin/env python3
"""
Коэффициенты расширенного преобразования Бэклунда φ' = Σ A_ν α^ν
- Перебор разбиений с двумя линейными ограничениями (основа всех замкнутых формул)
- Рекурсия для A_ν с кэшированием в таблице
- Усеченные ряды по α и независимая проверка через подстановку в исходное уравнение
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from jet_algebra import (CoeffRing, DomainError, Expr, JetMonomial, UNIT, d_xi, degree,
                         substitute_coupling, to_text)

logger = logging.getLogger(__name__)


class TruncationError(Exception):
    """Глубины таблицы или ряда недостаточно для запрошенного порядка"""


class ShiftError(Exception):
    """Деление ряда на α^k при ненулевых младших коэффициентах"""


# --- разбиения ---

@dataclass(frozen=True)
class PartitionConstraint:
    """Кортежи (n_0..n_R) с Σ n_i = S и Σ i·n_i = W"""
    length: int
    count_sum: int
    weighted_sum: int


@dataclass(frozen=True)
class PartitionSolution:
    n: Tuple[int, ...]

    @property
    def weight(self) -> Fraction:
        """1 / (n_0! ⋯ n_R!)"""
        return Fraction(1, math.prod(math.factorial(k) for k in self.n))


def enumerate_partitions(c: PartitionConstraint) -> List[PartitionSolution]:
    """Поиск в глубину с отсечением по обоим ограничениям; порядок лексикографический по убыванию n_0, n_1, ..."""
    R, S, W = c.length, c.count_sum, c.weighted_sum
    if S < 0 or W < 0:
        return []
    if R < 0:
        # пустой набор индексов: единственное решение - пустое произведение
        return [PartitionSolution(())] if S == 0 and W == 0 else []

    solutions: List[PartitionSolution] = []
    prefix: List[int] = []

    def search(i: int, s: int, w: int):
        if i == R:
            if R * s == w:
                solutions.append(PartitionSolution(tuple(prefix + [s])))
            return
        if w < i * s or w > R * s:
            return
        top = s if i == 0 else min(s, w // i)
        for n_i in range(top, -1, -1):
            prefix.append(n_i)
            search(i + 1, s - n_i, w - i * n_i)
            prefix.pop()

    search(0, S, W)
    return solutions


# --- таблица коэффициентов ---

def _coupling_power(numerator: int, exponent: int, sign: int = 1) -> CoeffRing:
    """sign·numerator·(a/2)^exponent"""
    return CoeffRing.monomial(exponent, Fraction(sign * numerator, 2 ** exponent))


def _base_coefficient(nu: int) -> Expr:
    if nu == 0:
        return Expr.jet(0)
    if nu == 1:
        return Expr.jet(1, coeff=CoeffRing.monomial(-1, 2))
    return Expr.jet(2, coeff=CoeffRing.monomial(-2, 2))


class BacklundTable:
    """Мемоизирующая таблица A_0..A_V"""

    def __init__(self, coefficients: Optional[Sequence[Expr]] = None):
        self.coefficients: List[Expr] = list(coefficients) if coefficients else [_base_coefficient(0)]
        self._powers: Dict[Tuple[int, int], Expr] = {}

    @classmethod
    def build(cls, max_nu: int, progress: bool = False) -> 'BacklundTable':
        table = cls()
        table.extend(max_nu, progress=progress)
        return table

    @classmethod
    def from_exprs(cls, coefficients: Sequence[Expr]) -> 'BacklundTable':
        """Таблица из готовых выражений (например, из кэша) с проверкой структуры"""
        if not coefficients or coefficients[0] != _base_coefficient(0):
            raise DomainError("Первый коэффициент таблицы должен быть A_0 = φ")
        for nu, expr in enumerate(coefficients[1:], start=1):
            if not expr.is_trig_free() or 0 in expr.jet_orders():
                raise DomainError(f"A_{nu} должен быть полиномом от φ_kξ с k ≥ 1")
        return cls(coefficients)

    @property
    def max_nu(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, nu: int) -> Expr:
        self.require(nu)
        return self.coefficients[nu]

    def __len__(self):
        return len(self.coefficients)

    def require(self, order: int) -> None:
        if order > self.max_nu:
            raise TruncationError(f"Таблица содержит A_0..A_{self.max_nu}, требуется A_{order}")

    def extend(self, max_nu: int, progress: bool = False) -> 'BacklundTable':
        start = len(self.coefficients)
        if max_nu < start:
            return self
        logger.info(f"🧮 Рекурсия Бэклунда: A_{start}..A_{max_nu}")
        for nu in tqdm(range(start, max_nu + 1), desc="A_ν", disable=not progress):
            self.coefficients.append(compute_A(nu, self))
            logger.debug(f"A_{nu}: {len(self.coefficients[nu])} слагаемых")
        return self

    def power(self, index: int, exponent: int) -> Expr:
        """A_index^exponent с кэшем"""
        key = (index, exponent)
        if key not in self._powers:
            self._powers[key] = self[index] ** exponent
        return self._powers[key]

    def partition_sum(self, constraint: PartitionConstraint, offset: int = 1) -> Expr:
        """Σ по разбиениям Π_i A_{i+offset}^{n_i} / n_i!"""
        total = Expr.zero()
        for solution in enumerate_partitions(constraint):
            term = Expr.constant(solution.weight)
            for i, n_i in enumerate(solution.n):
                if n_i:
                    term = term * self.power(i + offset, n_i)
            total = total + term
        return total

    def at_coupling(self, value) -> 'BacklundTable':
        return BacklundTable([substitute_coupling(expr, value) for expr in self.coefficients])


def compute_A(nu: int, table: BacklundTable) -> Expr:
    """A_ν по рекурсии A_{n+1} = (1/a)∂ξA_n + Σ_β (-1)^β (a/2)^{2(β+1)} Σ A_1^{n_0}⋯/(n_0!⋯)"""
    if nu < 0:
        raise ValueError(f"ν должно быть неотрицательным, получено {nu}")
    if nu <= 2:
        return _base_coefficient(nu)

    n = nu - 1
    table.require(n)
    result = d_xi(table[n]).scale(CoeffRing.monomial(-1))
    # верхний предел ⌈n/2⌉-1; лишнее β дает отрицательную взвешенную сумму и пустой перебор
    for beta in range((n + 1) // 2):
        R = n - 2 - 2 * beta
        inner = table.partition_sum(PartitionConstraint(R, 2 * beta + 3, R))
        if not inner.is_zero():
            result = result + inner.scale(_coupling_power(1, 2 * (beta + 1), (-1) ** beta))
    return result


@dataclass
class HomogeneityReport:
    max_nu: int
    degrees: List[Optional[int]] = field(default_factory=list)
    violations: List[Dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            'max_nu': self.max_nu,
            'degrees': self.degrees,
            'passed': self.passed,
            'violations': self.violations
        }


def verify_homogeneity(table: BacklundTable) -> HomogeneityReport:
    """Проверить deg(A_ν) = ν и структуру A_ν (без φ и тригонометрии при ν ≥ 1)"""
    report = HomogeneityReport(max_nu=table.max_nu)
    for nu, expr in enumerate(table.coefficients):
        if expr.is_zero():
            report.degrees.append(None)
            report.violations.append({'nu': nu, 'reason': 'нулевой коэффициент', 'monomial': None})
            continue
        homogeneous, deg = degree(expr)
        report.degrees.append(deg)
        if not homogeneous or deg != nu:
            for (mono, trig), coeff in expr.sorted_terms():
                if mono.degree != nu:
                    single = Expr({(mono, trig): coeff})
                    report.violations.append({
                        'nu': nu,
                        'reason': f'степень {mono.degree} вместо {nu}',
                        'monomial': to_text(single)
                    })
        if nu >= 1 and (not expr.is_trig_free() or 0 in expr.jet_orders()):
            report.violations.append({'nu': nu, 'reason': 'φ или тригонометрия в A_ν', 'monomial': to_text(expr)})

    if report.passed:
        logger.info(f"✅ Однородность A_0..A_{table.max_nu} подтверждена")
    else:
        logger.warning(f"❌ Нарушения однородности: {len(report.violations)}")
    return report


# --- усеченные ряды по α ---

PHI_MONOMIAL = JetMonomial.jet(0)


class AlphaSeries:
    """Ряд Σ c_n α^n, известный точно до порядка order включительно"""

    __slots__ = ('coefficients',)

    def __init__(self, coefficients: Iterable[Expr]):
        self.coefficients: Tuple[Expr, ...] = tuple(coefficients)
        if not self.coefficients:
            raise TruncationError("Ряд должен содержать хотя бы свободный член")

    @classmethod
    def constant(cls, value: Expr, order: int) -> 'AlphaSeries':
        return cls([value] + [Expr.zero()] * order)

    @classmethod
    def from_table(cls, table: BacklundTable, order: int, pad: int = 0) -> 'AlphaSeries':
        """φ' = Σ A_ν α^ν до порядка order; последние pad коэффициентов заменяются нулем"""
        table.require(order - pad)
        known = [table[nu] for nu in range(order - pad + 1)]
        return cls(known + [Expr.zero()] * pad)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, n: int) -> Expr:
        if n > self.order:
            raise TruncationError(f"Ряд известен до α^{self.order}, запрошен α^{n}")
        return self.coefficients[n]

    def truncate(self, order: int) -> 'AlphaSeries':
        if order > self.order:
            raise TruncationError(f"Нельзя продолжить ряд порядка {self.order} до {order}")
        return AlphaSeries(self.coefficients[:order + 1])

    def __add__(self, other: 'AlphaSeries') -> 'AlphaSeries':
        order = min(self.order, other.order)
        return AlphaSeries(self.coefficients[n] + other.coefficients[n] for n in range(order + 1))

    def __neg__(self) -> 'AlphaSeries':
        return AlphaSeries(-c for c in self.coefficients)

    def __sub__(self, other: 'AlphaSeries') -> 'AlphaSeries':
        return self + (-other)

    def __mul__(self, other: 'AlphaSeries') -> 'AlphaSeries':
        order = min(self.order, other.order)
        result = []
        for n in range(order + 1):
            total = Expr.zero()
            for k in range(n + 1):
                left, right = self.coefficients[k], other.coefficients[n - k]
                if not left.is_zero() and not right.is_zero():
                    total = total + left * right
            result.append(total)
        return AlphaSeries(result)

    def scale(self, factor) -> 'AlphaSeries':
        """Умножение всех коэффициентов на Expr или на скаляр"""
        if isinstance(factor, Expr):
            return AlphaSeries(c * factor for c in self.coefficients)
        return AlphaSeries(c.scale(factor) for c in self.coefficients)

    def d_xi(self) -> 'AlphaSeries':
        return AlphaSeries(d_xi(c) for c in self.coefficients)

    def reflect(self) -> 'AlphaSeries':
        """α → -α"""
        return AlphaSeries(c if n % 2 == 0 else -c for n, c in enumerate(self.coefficients))

    def shift_down(self, k: int) -> 'AlphaSeries':
        """Деление на α^k; младшие k коэффициентов обязаны быть нулевыми"""
        for n in range(min(k, len(self.coefficients))):
            if not self.coefficients[n].is_zero():
                raise ShiftError(f"Деление на α^{k}: коэффициент при α^{n} равен {to_text(self.coefficients[n])}")
        if k > self.order:
            raise TruncationError(f"Деление ряда порядка {self.order} на α^{k}")
        return AlphaSeries(self.coefficients[k:])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def _split_constant(self) -> Tuple[int, 'AlphaSeries']:
        """Свободный член вида m·a·φ; возвращает (m, ряд без свободного члена)"""
        head = self.coefficients[0]
        tail = AlphaSeries((Expr.zero(),) + self.coefficients[1:])
        if head.is_zero():
            return 0, tail
        terms = head.terms
        key = (PHI_MONOMIAL, UNIT)
        if list(terms) == [key]:
            coeff = terms[key].terms
            if list(coeff) == [1] and coeff[1].denominator == 1:
                return int(coeff[1]), tail
        raise DomainError(f"Свободный член ряда {to_text(head)} не имеет вида m·aφ")

    def _taylor(self, odd: bool) -> 'AlphaSeries':
        """sin X (odd) или cos X для ряда X с нулевым свободным членом"""
        order = self.order
        result = [Expr.zero() for _ in range(order + 1)]
        power = AlphaSeries.constant(Expr.one(), order)
        for k in range(order + 1):
            if k > 0:
                power = power * self
            if k % 2 == int(odd):
                sign = -1 if (k // 2) % 2 else 1
                factor = Fraction(sign, math.factorial(k))
                for n in range(k, order + 1):
                    if not power.coefficients[n].is_zero():
                        result[n] = result[n] + power.coefficients[n].scale(factor)
        return AlphaSeries(result)

    def sin_series(self) -> 'AlphaSeries':
        """sin(c + Y) = sin c·cos Y + cos c·sin Y при c = m·aφ"""
        m, tail = self._split_constant()
        sin_tail, cos_tail = tail._taylor(odd=True), tail._taylor(odd=False)
        if m == 0:
            return sin_tail
        return cos_tail.scale(Expr.sin(m)) + sin_tail.scale(Expr.cos(m))

    def cos_series(self) -> 'AlphaSeries':
        """cos(c + Y) = cos c·cos Y - sin c·sin Y при c = m·aφ"""
        m, tail = self._split_constant()
        sin_tail, cos_tail = tail._taylor(odd=True), tail._taylor(odd=False)
        if m == 0:
            return cos_tail
        return cos_tail.scale(Expr.cos(m)) - sin_tail.scale(Expr.sin(m))

    def __repr__(self):
        return f"AlphaSeries(order={self.order})"


def verify_pde_series(table: BacklundTable, order: int) -> AlphaSeries:
    """Невязка ½(φ'+φ)_ξ - (1/α)·sin(½a(φ'-φ)) до α^order; при верной рекурсии все коэффициенты нулевые"""
    if order < 0:
        raise ValueError(f"Порядок должен быть неотрицательным, получено {order}")
    depth = order + 1
    table.require(depth)

    phi_prime = AlphaSeries.from_table(table, depth)
    phi = AlphaSeries.constant(Expr.jet(0), depth)
    half = Fraction(1, 2)

    lhs = (phi_prime + phi).d_xi().scale(half)
    argument = (phi_prime - phi).scale(CoeffRing.monomial(1, half))
    rhs = argument.sin_series().shift_down(1)

    residual = lhs.truncate(order) - rhs.truncate(order)
    nonzero = [n for n, c in enumerate(residual.coefficients) if not c.is_zero()]
    if nonzero:
        logger.warning(f"❌ Невязка уравнения Бэклунда отлична от нуля на порядках {nonzero}")
    else:
        logger.info(f"✅ Невязка уравнения Бэклунда равна нулю до α^{order}")
    return residual

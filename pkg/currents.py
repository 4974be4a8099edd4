#!/usr/bin/env python3
"""
Сохраняющиеся токи s^N = -s_1^N dτ + s_2^N dξ иерархии sine-Gordon
- Замкнутые формулы через разбиения и таблицу A_ν
- Разложение s_1^N = cos(aφ)·q_1^N + sin(aφ)·r_1^N
- Проверки: степени, сохранение на решениях, независимый оракул через ряды по α
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from backlund import AlphaSeries, BacklundTable, PartitionConstraint
from jet_algebra import (CoeffRing, DomainError, Expr, TrigKind, UNIT, d_tau_onshell, d_xi, degree,
                         substitute_coupling, to_latex, to_text)

logger = logging.getLogger(__name__)


def _prefactor(sign: int, exponent: int) -> CoeffRing:
    """2·sign·(a/2)^exponent"""
    return CoeffRing.monomial(exponent, Fraction(2 * sign, 2 ** exponent))


def _cos_coefficient(N: int, table: BacklundTable, first_beta: int = 0) -> Expr:
    total = Expr.zero()
    for beta in range(first_beta, N + 1):
        # n_1..n_{2N} с весами 1..2N: сдвиг индекса дает R = 2N-1, W = 2N-2β
        inner = table.partition_sum(PartitionConstraint(2 * N - 1, 2 * beta, 2 * N - 2 * beta))
        if not inner.is_zero():
            total = total + inner.scale(_prefactor((-1) ** beta, 2 * beta))
    return total


def _sin_coefficient(N: int, table: BacklundTable) -> Expr:
    total = Expr.zero()
    for beta in range(N):
        inner = table.partition_sum(PartitionConstraint(2 * N - 1, 2 * beta + 1, 2 * N - 2 * beta - 1))
        if not inner.is_zero():
            total = total + inner.scale(_prefactor((-1) ** (beta + 1), 2 * beta + 1))
    return total


def compute_s1(N: int, table: BacklundTable) -> Expr:
    if N < 0:
        raise ValueError(f"N должно быть неотрицательным, получено {N}")
    table.require(2 * N)
    s1 = _cos_coefficient(N, table) * Expr.cos(1)
    if N >= 1:
        s1 = s1 + _sin_coefficient(N, table) * Expr.sin(1)
    return s1


def compute_s2(N: int, table: BacklundTable) -> Expr:
    if N < 0:
        raise ValueError(f"N должно быть неотрицательным, получено {N}")
    table.require(2 * N + 1)
    total = Expr.zero()
    for mu in range(N + 1):
        R = 2 * (N - mu)
        inner = table.partition_sum(PartitionConstraint(R, 2 * (mu + 1), R))
        if not inner.is_zero():
            total = total + inner.scale(_prefactor((-1) ** mu, 2 * (mu + 1)))
    return total


def decompose_s1(s1: Expr) -> Tuple[Expr, Expr]:
    """(q_1, r_1) - коэффициенты при cos(aφ) и sin(aφ)"""
    q_terms, r_terms = {}, {}
    for (mono, trig), coeff in s1.terms.items():
        if trig.kind == TrigKind.UNIT:
            raise DomainError(f"s_1 не должен содержать слагаемых без тригонометрии: {to_text(Expr({(mono, trig): coeff}))}")
        if trig.mode != 1:
            raise DomainError(f"s_1 содержит моду {trig.mode} ≥ 2")
        target = q_terms if trig.kind == TrigKind.COS else r_terms
        target[(mono, UNIT)] = coeff
    return Expr(q_terms), Expr(r_terms)


@dataclass(frozen=True)
class CurrentPair:
    N: int
    s1: Expr
    s2: Expr
    q1: Expr
    r1: Expr

    @classmethod
    def build(cls, N: int, table: BacklundTable) -> 'CurrentPair':
        s1 = compute_s1(N, table)
        s2 = compute_s2(N, table)
        q1, r1 = decompose_s1(s1)
        return cls(N=N, s1=s1, s2=s2, q1=q1, r1=r1)

    def reassembly_residual(self) -> Expr:
        return self.q1 * Expr.cos(1) + self.r1 * Expr.sin(1) - self.s1

    def to_latex(self) -> Dict[str, str]:
        return {'s1': to_latex(self.s1), 's2': to_latex(self.s2)}


def divergence_onshell(pair: CurrentPair) -> Expr:
    """∂ξ s_1 + ∂τ s_2 на решениях; для сохраняющегося тока - нулевое выражение"""
    return d_xi(pair.s1) + d_tau_onshell(pair.s2)


# --- оракул через ряды по α ---

def current_series(table: BacklundTable, order: int) -> Tuple[AlphaSeries, AlphaSeries]:
    """Ряды s_1^(α) и s_2^(α) до α^order, построенные прямо из определения через косинусы"""
    if order < 0:
        raise ValueError(f"Порядок должен быть неотрицательным, получено {order}")
    table.require(order + 1)
    half_a = CoeffRing.monomial(1, Fraction(1, 2))
    phi = AlphaSeries.constant(Expr.jet(0), order)

    # φ + B_α φ: свободный член 2φ, далее A_ν
    plus = AlphaSeries.from_table(table, order) + phi
    s1 = (plus.scale(half_a).cos_series()
          + plus.reflect().scale(half_a).cos_series())

    # φ - B_α φ до α^{order+2}; коэффициент α^{order+2} в cos входит только через A_1..A_{order+1},
    # поэтому A_{order+2} заменяется нулем
    depth = order + 2
    minus = AlphaSeries.constant(Expr.jet(0), depth) - AlphaSeries.from_table(table, depth, pad=1)
    two = AlphaSeries.constant(Expr.constant(2), depth)
    bracket = (two
               - minus.scale(half_a).cos_series()
               - minus.reflect().scale(half_a).cos_series())
    s2 = bracket.shift_down(2)
    return s1, s2


def series_oracle(N: int, table: BacklundTable) -> Tuple[Expr, Expr]:
    s1, s2 = current_series(table, 2 * N)
    return s1.coefficient(2 * N), s2.coefficient(2 * N)


def compare_readings(N: int, table: BacklundTable) -> Optional[Expr]:
    """Разность между суммой по β от 0 и суммой от 1 в коэффициенте при cos(aφ); None, если совпадают"""
    difference = _cos_coefficient(N, table, 0) - _cos_coefficient(N, table, 1)
    return None if difference.is_zero() else difference


# --- отчеты ---

@dataclass
class CheckResult:
    N: int
    check: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict:
        return {'N': self.N, 'check': self.check, 'passed': self.passed, 'detail': self.detail}


def verify_current_degrees(pair: CurrentPair) -> List[CheckResult]:
    """deg q_1 = deg r_1 = 2N (r_1 пропускается при N = 0), deg s_2 = 2(N+1)"""
    expected = {'q1': 2 * pair.N, 'r1': 2 * pair.N, 's2': 2 * (pair.N + 1)}
    parts = {'q1': pair.q1, 'r1': pair.r1, 's2': pair.s2}
    results = []
    for name, expr in parts.items():
        if name == 'r1' and pair.N == 0:
            continue
        if expr.is_zero():
            results.append(CheckResult(pair.N, f'degree:{name}', False, 'нулевое выражение'))
            continue
        homogeneous, deg = degree(expr)
        ok = homogeneous and deg == expected[name]
        detail = f"степень {deg}, ожидалась {expected[name]}" if homogeneous else "неоднородное выражение"
        results.append(CheckResult(pair.N, f'degree:{name}', ok, detail))
    return results


def check_conservation(pair: CurrentPair) -> CheckResult:
    divergence = divergence_onshell(pair)
    if divergence.is_zero():
        return CheckResult(pair.N, 'conservation', True, 'div s = 0')
    return CheckResult(pair.N, 'conservation', False, f"div s = {to_text(divergence)}")


def check_oracle(pair: CurrentPair, table: BacklundTable) -> List[CheckResult]:
    """Совпадение с оракулом и отсутствие нечетных степеней α"""
    s1_series, s2_series = current_series(table, 2 * pair.N + 1)
    results = []
    for name, series, formula in (('s1', s1_series, pair.s1), ('s2', s2_series, pair.s2)):
        oracle = series.coefficient(2 * pair.N)
        difference = oracle - formula
        results.append(CheckResult(
            pair.N, f'oracle:{name}', difference.is_zero(),
            'совпадает' if difference.is_zero() else f"разность {to_text(difference)}"
        ))
        odd = [n for n in range(1, series.order + 1, 2) if not series.coefficient(n).is_zero()]
        results.append(CheckResult(
            pair.N, f'odd_powers:{name}', not odd,
            'нечетные степени отсутствуют' if not odd else f"ненулевые коэффициенты при α^{odd}"
        ))
    return results


def check_reassembly(pair: CurrentPair) -> CheckResult:
    residual = pair.reassembly_residual()
    return CheckResult(pair.N, 'reassembly', residual.is_zero(),
                       'cos·q + sin·r = s_1' if residual.is_zero() else to_text(residual))


def run_checks(N: int, table: BacklundTable, checks: List[str],
               pair: Optional[CurrentPair] = None) -> Tuple[CurrentPair, List[CheckResult]]:
    """Выполнить выбранные проверки; пара строится по таблице, если не передана"""
    if pair is None:
        pair = CurrentPair.build(N, table)
    results = [check_reassembly(pair)]
    if 'degrees' in checks:
        results.extend(verify_current_degrees(pair))
    if 'conservation' in checks:
        results.append(check_conservation(pair))
    if 'oracle' in checks:
        results.extend(check_oracle(pair, table))
    failed = [r for r in results if not r.passed]
    if failed:
        logger.warning(f"❌ N={N}: не пройдено {len(failed)} проверок")
    else:
        logger.info(f"✅ N={N}: все проверки пройдены ({len(results)})")
    return pair, results


def specialize_coupling(N: int, table: BacklundTable, value=1) -> Tuple[bool, bool]:
    """Сравнить два пути: подстановка a=value после вычисления и вычисление по таблице с a=value"""
    special = table.at_coupling(value)
    s1_ok = substitute_coupling(compute_s1(N, table), value) == substitute_coupling(compute_s1(N, special), value)
    s2_ok = substitute_coupling(compute_s2(N, table), value) == substitute_coupling(compute_s2(N, special), value)
    return s1_ok, s2_ok

#!/usr/bin/env python3
"""
Учет степеней (power counting) для запаздывающих произведений токов
- Семейства слагаемых при ℏ^p в экспоненциальной записи T-произведений вершинных операторов
- Разбиения функциональных производных по аргументам
- Оценки степени масштабирования и неоднозначности продолжения
- Сводный ledger: граница числа контрчленов зависит только от N
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

from config import PowerCountConfig
from jet_algebra import CoeffRing

logger = logging.getLogger(__name__)


class PropagatorType(Enum):
    FEYNMAN = "feynman"
    ANTI_FEYNMAN = "antifeynman"
    WIGHTMAN = "wightman"


@dataclass(frozen=True)
class PropagatorKind:
    """Пропагатор как непрозрачный символ: тип и порядок ξ-производной"""
    kind: PropagatorType
    derivative_order: int = 0

    BASE_SCALING_DEGREE = 0

    @property
    def scaling_degree_bound(self) -> int:
        # каждая производная повышает степень масштабирования не более чем на 1
        return self.BASE_SCALING_DEGREE + self.derivative_order


@dataclass(frozen=True)
class Ambiguity:
    """Unique или DeltaDerivativesUpTo(d)"""
    max_delta_order: Optional[int] = None

    @classmethod
    def unique(cls) -> 'Ambiguity':
        return cls(None)

    @classmethod
    def up_to(cls, d: int) -> 'Ambiguity':
        return cls(d) if d >= 0 else cls(None)

    @property
    def is_unique(self) -> bool:
        return self.max_delta_order is None

    def __str__(self):
        return "Unique" if self.is_unique else f"DeltaDerivativesUpTo({self.max_delta_order})"

    def to_dict(self) -> Dict:
        return {'unique': self.is_unique, 'max_delta_order': self.max_delta_order, 'label': str(self)}


@dataclass
class TermFamily:
    hbar_order: int
    pair_powers: Dict[Tuple[int, int], int]
    multinomial_weight: CoeffRing
    coupling_signs: Tuple[int, ...]
    derivative_profile: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    product: str = "time_ordered"
    wightman_lines: int = 0

    @property
    def propagators(self) -> Tuple[PropagatorKind, ...]:
        """Линии семейства: степени Δ без производных, линии с производными и линии Вайтмана"""
        kind = PropagatorType.FEYNMAN if self.product == "time_ordered" else PropagatorType.ANTI_FEYNMAN
        lines = [PropagatorKind(kind) for power in self.pair_powers.values() for _ in range(power)]
        lines += [PropagatorKind(kind, order) for orders in self.derivative_profile.values() for order in orders]
        lines += [PropagatorKind(PropagatorType.WIGHTMAN, 1)] * self.wightman_lines
        return tuple(lines)


# --- комбинаторика ---

def weak_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Слабые композиции total на parts частей, лексикографически по убыванию"""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def composition_count(total: int, parts: int) -> int:
    if parts == 0:
        return 1 if total == 0 else 0
    return math.comb(total + parts - 1, parts - 1)


def hbar_coefficient_terms(l: int, p: int, signs: Sequence[int]) -> List[TermFamily]:
    """Семейства при ℏ^p в Π_{i<j} exp(-a_i a_j ℏ Δ_F(x_i - x_j))"""
    if l < 0 or p < 0:
        raise ValueError(f"Ожидались l ≥ 0 и p ≥ 0, получено l={l}, p={p}")
    if len(signs) != l or any(s not in (1, -1) for s in signs):
        raise ValueError(f"Нужно {l} знаков из {{+1, -1}}, получено {list(signs)}")

    pairs = list(itertools.combinations(range(1, l + 1), 2))
    families = []
    for powers in weak_compositions(p, len(pairs)):
        sign = (-1) ** p
        denominator = 1
        pair_powers = {}
        for (i, j), power in zip(pairs, powers):
            if power:
                pair_powers[(i, j)] = power
                sign *= (signs[i - 1] * signs[j - 1]) ** power
                denominator *= math.factorial(power)
        families.append(TermFamily(
            hbar_order=p,
            pair_powers=pair_powers,
            multinomial_weight=CoeffRing.monomial(2 * p, Fraction(sign, denominator)),
            coupling_signs=tuple(signs)
        ))
    return families


def functional_derivative_splits(l: int, j: int) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """(δ/δφ_1 + ... + δ/δφ_l)^j / j!: композиции (j_1..j_l) с весами 1/(j_1!⋯j_l!)"""
    if l < 1 or j < 0:
        raise ValueError(f"Ожидались l ≥ 1 и j ≥ 0, получено l={l}, j={j}")
    return [(split, Fraction(1, math.prod(math.factorial(k) for k in split)))
            for split in weak_compositions(j, l)]


def max_derivative_order(component: str, N: int) -> int:
    """Порядок, выше которого функциональные производные компоненты тока обращаются в нуль"""
    if N < 0:
        raise ValueError(f"N должно быть неотрицательным, получено {N}")
    source = PowerCountConfig.COMPONENT_SOURCES.get(component)
    if source is None:
        raise ValueError(f"Неизвестная компонента: {component}")
    return 2 * (N + 1) if source == 's2' else 2 * N


def scaling_degree_bound(family: TermFamily) -> int:
    """Субаддитивность: сумма границ по линиям, которые нужно продолжать; линии Вайтмана не продолжаются"""
    return sum(line.scaling_degree_bound for line in family.propagators if line.kind != PropagatorType.WIGHTMAN)


def ambiguity_bound(sd: int) -> Ambiguity:
    if sd < 0:
        raise ValueError(f"Степень масштабирования должна быть неотрицательной, получено {sd}")
    return Ambiguity.unique() if sd < 2 else Ambiguity.up_to(sd - 2)


def component_ambiguity(component: str, N: int) -> Ambiguity:
    """Ожидаемая граница: deg - 2, то есть 2N для s_2 и 2(N-1) для частей s_1"""
    return ambiguity_bound(max_derivative_order(component, N))


def worst_case_profile(split: Sequence[int], budget: int, wightman_lines: int) -> Dict[int, Tuple[int, ...]]:
    """Профиль производных с максимальной суммой: каждая линия несет ≥ 1 производной,
    первая линия забирает остаток бюджета"""
    lines = sum(split)
    if lines == 0:
        return {}
    spare = budget - wightman_lines - lines
    if spare < 0:
        raise ValueError("Бюджет производных меньше числа линий")
    profile = {}
    first = True
    for r, count in enumerate(split, start=1):
        if count:
            orders = [1] * count
            if first:
                orders[0] += spare
                first = False
            profile[r] = tuple(orders)
    return profile


# --- ledger ---

def _time_ordered_arguments(component: str, l: int) -> int:
    # для частей s_1 T-произведение зависит еще и от точки тока
    return l if component == 's2' else l + 1


@dataclass
class LedgerRow:
    l: int
    p: int
    time_ordered_families: int
    antichronological_families: int
    max_scaling_degree: int

    def to_dict(self) -> Dict:
        return {
            'l': self.l,
            'p': self.p,
            'time_ordered_families': self.time_ordered_families,
            'antichronological_families': self.antichronological_families,
            'max_scaling_degree': self.max_scaling_degree
        }


@dataclass
class LedgerReport:
    N: int
    t: int
    component: str
    budget: int
    p_max: int
    rows: List[LedgerRow] = field(default_factory=list)
    sd_histogram: Dict[int, int] = field(default_factory=dict)
    horizon_ambiguities: Dict[int, str] = field(default_factory=dict)
    ambiguity: Ambiguity = field(default_factory=Ambiguity.unique)
    expected_ambiguity: Ambiguity = field(default_factory=Ambiguity.unique)

    @property
    def term_count(self) -> int:
        return sum(row.time_ordered_families + row.antichronological_families for row in self.rows)

    @property
    def max_scaling_degree(self) -> int:
        return max((sd for sd, count in self.sd_histogram.items() if count), default=0)

    @property
    def t_independent(self) -> bool:
        return len(set(self.horizon_ambiguities.values())) <= 1

    @property
    def per_order_max_sd(self) -> Dict[int, int]:
        result: Dict[int, int] = {}
        for row in self.rows:
            if row.time_ordered_families:
                result[row.p] = max(result.get(row.p, 0), row.max_scaling_degree)
        return result

    @property
    def passed(self) -> bool:
        if self.t == 0:
            return True
        return self.t_independent and self.ambiguity == self.expected_ambiguity

    def to_dict(self) -> Dict:
        return {
            'N': self.N,
            't': self.t,
            'component': self.component,
            'budget': self.budget,
            'p_max': self.p_max,
            'term_count': self.term_count,
            'max_scaling_degree': self.max_scaling_degree,
            'ambiguity_bound': self.ambiguity.to_dict(),
            'expected_ambiguity_bound': self.expected_ambiguity.to_dict(),
            't_independent': self.t_independent,
            'horizon_ambiguities': {str(k): v for k, v in sorted(self.horizon_ambiguities.items())},
            'per_order_max_sd': {str(k): v for k, v in sorted(self.per_order_max_sd.items())},
            'sd_histogram': {str(k): v for k, v in sorted(self.sd_histogram.items())},
            'rows': [row.to_dict() for row in self.rows],
            'passed': self.passed
        }


def _ledger_rows(N: int, t: int, component: str, p_max: int) -> Tuple[List[LedgerRow], Counter]:
    budget = max_derivative_order(component, N)
    rows: List[LedgerRow] = []
    histogram: Counter = Counter()
    for l in range(t + 1):
        pairs = math.comb(_time_ordered_arguments(component, l), 2)
        ac_pairs = math.comb(t - l, 2)
        for p in range(p_max + 1):
            pair_count = composition_count(p, pairs)
            time_ordered = 0
            row_max = 0
            if pair_count:
                for j in range(budget + 1):
                    split_count = composition_count(j, l)
                    if not split_count:
                        continue
                    for i in range(budget - j + 1):
                        count = pair_count * split_count
                        sd = budget - i if j >= 1 else 0
                        histogram[sd] += count
                        time_ordered += count
                        row_max = max(row_max, sd)
            antichronological = composition_count(p, ac_pairs)
            histogram[0] += antichronological
            if time_ordered or antichronological:
                rows.append(LedgerRow(l, p, time_ordered, antichronological, row_max))
    return rows, histogram


def build_ledger(N: int, t: int, component: str, p_max: Optional[int] = None,
                 progress: bool = False) -> LedgerReport:
    """Перебор скелета слагаемых запаздывающего произведения и граница неоднозначности"""
    if N < 0 or t < 0:
        raise ValueError(f"Ожидались N ≥ 0 и t ≥ 0, получено N={N}, t={t}")
    if component not in PowerCountConfig.COMPONENTS:
        raise ValueError(f"Компонента должна быть одной из {PowerCountConfig.COMPONENTS}")
    p_max = PowerCountConfig.MAX_HBAR_ORDER if p_max is None else p_max

    rows, histogram = _ledger_rows(N, t, component, p_max)
    report = LedgerReport(N=N, t=t, component=component, budget=max_derivative_order(component, N),
                          p_max=p_max, rows=rows, sd_histogram=dict(sorted(histogram.items())))
    report.ambiguity = ambiguity_bound(report.max_scaling_degree)
    report.expected_ambiguity = component_ambiguity(component, N)

    # t = 0 не содержит фейнмановских линий; независимость проверяется по горизонтам 1..t
    for horizon in tqdm(range(1, t + 1), desc=f"ledger {component} N={N}", disable=not progress):
        _, horizon_histogram = _ledger_rows(N, horizon, component, p_max)
        top = max((sd for sd, count in horizon_histogram.items() if count), default=0)
        report.horizon_ambiguities[horizon] = str(ambiguity_bound(top))

    logger.info(f"📊 Ledger {component}, N={N}, t={t}: {report.term_count} семейств, "
                f"max sd = {report.max_scaling_degree}, граница {report.ambiguity}")
    return report


def enumerate_families(N: int, t: int, component: str, p_max: int) -> Iterator[TermFamily]:
    """Явный генератор семейств для малых случаев (при фиксированных знаках a_i = +a);
    используется для сверки с комбинаторными подсчетами ledger"""
    budget = max_derivative_order(component, N)
    for l in range(t + 1):
        arguments = _time_ordered_arguments(component, l)
        for p in range(p_max + 1):
            for family in hbar_coefficient_terms(arguments, p, [1] * arguments):
                for j in range(budget + 1):
                    splits = functional_derivative_splits(l, j) if l else ([((), Fraction(1))] if j == 0 else [])
                    for split, _ in splits:
                        for i in range(budget - j + 1):
                            yield TermFamily(
                                hbar_order=p,
                                pair_powers=dict(family.pair_powers),
                                multinomial_weight=family.multinomial_weight,
                                coupling_signs=family.coupling_signs,
                                derivative_profile=worst_case_profile(split, budget, i),
                                wightman_lines=i
                            )
            ac_arguments = t - l
            for family in hbar_coefficient_terms(ac_arguments, p, [1] * ac_arguments):
                family.product = "antichronological"
                yield family

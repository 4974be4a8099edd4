#!/usr/bin/env python3
"""
Проверка микролокальных условий на погруженных графах в двумерном пространстве Минковского
- Точки на целочисленной нулевой решетке (u, v), ребра только вдоль нулевых направлений
- Ковекторы ребер по правилам Фейнмана, анти-Фейнмана и Вайтмана
- Точная проверка: могут ли все ковекторы вершин обнулиться или лечь в один конус
- Полный перебор малых графов и размещений, композиция оценок по Хёрмандеру
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
from tqdm import tqdm

from config import WavefrontConfig
from cone_solver import LinearConstraint, is_feasible

logger = logging.getLogger(__name__)

Point = Tuple[int, int]
Direction = Tuple[int, int]
Linear = Dict[str, int]

FORWARD_RAYS: Tuple[Direction, ...] = ((1, 1), (1, -1))


class InvalidImmersion(Exception):
    """Ребро соединяет точки, не разделенные нулевым интервалом"""


class SlotMismatch(Exception):
    """Оценки заданы на разном числе слотов"""


class EdgeRule(Enum):
    FEYNMAN = "feynman"
    ANTI_FEYNMAN = "antifeynman"
    WIGHTMAN = "wightman"


class Target(Enum):
    ALL_ZERO = "all_zero"
    ALL_FORWARD = "all_forward"
    ALL_BACKWARD = "all_backward"


class SlotCone(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    FREE = "free"
    ZERO = "zero"


# --- нулевая решетка ---

def null_separated(p: Point, q: Point) -> bool:
    du, dv = p[0] - q[0], p[1] - q[1]
    return (du == 0) != (dv == 0)


def coincident(p: Point, q: Point) -> bool:
    return p == q


def covector_direction(p: Point, q: Point) -> Direction:
    """Единичное направление η♭(p - q) в компонентах (k_t, k_x)

    t = u - v, x = u + v; при η = diag(-1, 1) получаем η♭(Δ) = (Δv - Δu, Δu + Δv).
    """
    if not null_separated(p, q):
        raise InvalidImmersion(f"Точки {p} и {q} не разделены нулевым интервалом")
    du, dv = p[0] - q[0], p[1] - q[1]
    scale = max(abs(du), abs(dv))
    return (dv - du) // scale, (du + dv) // scale


def forward_ray(direction: Direction) -> Direction:
    return direction if direction[0] > 0 else (-direction[0], -direction[1])


# --- погруженный граф ---

@dataclass(frozen=True)
class ImmersedGraph:
    """Граф с вершинами 0..n-1; ребро хранится как (источник, цель) с источником большего номера"""
    n: int
    edges: Tuple[Tuple[int, int], ...]
    placement: Tuple[Point, ...]
    rules: Tuple[EdgeRule, ...]

    @classmethod
    def build(cls, n: int, edges: Sequence[Tuple[int, int]], placement: Sequence[Point],
              rule: EdgeRule = EdgeRule.FEYNMAN) -> 'ImmersedGraph':
        oriented = tuple(sorted((max(a, b), min(a, b)) for a, b in edges))
        return cls(n=n, edges=oriented, placement=tuple(tuple(p) for p in placement),
                   rules=tuple(rule for _ in oriented))

    def is_coincident_edge(self, index: int) -> bool:
        source, target = self.edges[index]
        return coincident(self.placement[source], self.placement[target])

    @property
    def has_distinct_edge(self) -> bool:
        return any(not self.is_coincident_edge(i) for i in range(len(self.edges)))

    def translate(self, du: int, dv: int) -> 'ImmersedGraph':
        return ImmersedGraph(self.n, self.edges, tuple((u + du, v + dv) for u, v in self.placement), self.rules)

    def uv_swap(self) -> 'ImmersedGraph':
        return ImmersedGraph(self.n, self.edges, tuple((v, u) for u, v in self.placement), self.rules)

    def with_rule(self, rule: EdgeRule) -> 'ImmersedGraph':
        return ImmersedGraph(self.n, self.edges, self.placement, tuple(rule for _ in self.edges))

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'edges': [list(e) for e in self.edges],
            'placement': [list(p) for p in self.placement],
            'rules': [r.value for r in self.rules]
        }


def edge_tags(g: ImmersedGraph) -> Tuple[Optional[Direction], ...]:
    """Для каждого ребра: единичное направление η♭(x_s - x_t) или None для совпадающих концов"""
    if len(g.placement) != g.n:
        raise InvalidImmersion(f"Размещение задано для {len(g.placement)} вершин из {g.n}")
    if len(g.rules) != len(g.edges):
        raise InvalidImmersion("Число правил не совпадает с числом ребер")
    tags = []
    for source, target in g.edges:
        if not (0 <= target < source < g.n):
            raise InvalidImmersion(f"Недопустимое ребро ({source}, {target})")
        p, q = g.placement[source], g.placement[target]
        tags.append(None if coincident(p, q) else covector_direction(p, q))
    return tuple(tags)


@dataclass
class CovectorSystem:
    """k_i = Σ_{σ(e)=i} k_e - Σ_{τ(f)=i} k_f как линейные формы от скаляров ребер"""
    covectors: List[Tuple[Linear, Linear]]
    constraints: List[LinearConstraint] = field(default_factory=list)
    free_pairs: List[Tuple[str, str]] = field(default_factory=list)


def _accumulate(form: Linear, var: str, coefficient: int) -> None:
    if coefficient:
        form[var] = form.get(var, 0) + coefficient


def _assemble(n: int, edges: Tuple[Tuple[int, int], ...], rules: Tuple[EdgeRule, ...],
              tags: Tuple[Optional[Direction], ...], rays: Tuple[Direction, ...]) -> CovectorSystem:
    covectors: List[Tuple[Linear, Linear]] = [({}, {}) for _ in range(n)]
    system = CovectorSystem(covectors=covectors)
    ray_choices = iter(rays)

    for index, ((source, target), rule, tag) in enumerate(zip(edges, rules, tags)):
        if rule == EdgeRule.WIGHTMAN:
            ray = forward_ray(tag) if tag is not None else next(ray_choices)
            parts = {f"m{index}": ray}
            system.constraints.append(LinearConstraint.ge({f"m{index}": 1}, -1))
        elif tag is None:
            ct, cx = f"c{index}t", f"c{index}x"
            parts = {ct: (1, 0), cx: (0, 1)}
            system.free_pairs.append((ct, cx))
        else:
            sign = 1 if rule == EdgeRule.FEYNMAN else -1
            parts = {f"l{index}": (sign * tag[0], sign * tag[1])}
            system.constraints.append(LinearConstraint.ge({f"l{index}": 1}, -1))

        for var, (kt, kx) in parts.items():
            _accumulate(covectors[source][0], var, kt)
            _accumulate(covectors[source][1], var, kx)
            _accumulate(covectors[target][0], var, -kt)
            _accumulate(covectors[target][1], var, -kx)
    return system


def _ray_assignments(rules: Sequence[EdgeRule], tags: Sequence[Optional[Direction]]) -> Iterator[Tuple[Direction, ...]]:
    free = sum(1 for rule, tag in zip(rules, tags) if rule == EdgeRule.WIGHTMAN and tag is None)
    return itertools.product(FORWARD_RAYS, repeat=free)


def induced_covector_system(g: ImmersedGraph, rays: Optional[Sequence[Direction]] = None) -> CovectorSystem:
    tags = edge_tags(g)
    if rays is None:
        rays = next(_ray_assignments(g.rules, tags))
    return _assemble(g.n, g.edges, g.rules, tags, tuple(rays))


def _target_constraints(system: CovectorSystem, target: Target) -> List[LinearConstraint]:
    """Ограничения цели вместе с условием 'хотя бы один ковектор ненулевой'"""
    constraints = []
    if target == Target.ALL_ZERO:
        for kt, kx in system.covectors:
            constraints += [LinearConstraint.eq(kt), LinearConstraint.eq(kx)]
        return constraints

    sign = 1 if target == Target.ALL_FORWARD else -1
    total: Linear = {}
    for kt, kx in system.covectors:
        minus = {v: sign * c for v, c in kt.items()}
        plus = dict(minus)
        for v, c in kx.items():
            minus[v] = minus.get(v, 0) - c
            plus[v] = plus.get(v, 0) + c
        constraints += [LinearConstraint.ge(minus), LinearConstraint.ge(plus)]
        for v, c in kt.items():
            _accumulate(total, v, sign * c)
    # в замкнутом конусе sign·k_t ≥ |k_x|, поэтому ненулевой набор равносилен Σ sign·k_t > 0;
    # система однородна по масштабу (λ, μ ≥ 1 сохраняются при растяжении), так что хватает ≥ 1
    constraints.append(LinearConstraint.ge(total, -1))
    return constraints


def _nonzero_options(var_t: str, var_x: str) -> List[LinearConstraint]:
    return [LinearConstraint.ge({var_t: 1}, -1), LinearConstraint.le({var_t: 1}, 1),
            LinearConstraint.ge({var_x: 1}, -1), LinearConstraint.le({var_x: 1}, 1)]


def _feasible_with_free_pairs(constraints: List[LinearConstraint], pairs: Sequence[Tuple[str, str]]) -> bool:
    # множество решений выпукло: если каждая пара отдельно может быть ненулевой,
    # то общая выпуклая комбинация делает ненулевыми все пары сразу
    if not is_feasible(constraints):
        return False
    return all(any(is_feasible(constraints + [option]) for option in _nonzero_options(*pair)) for pair in pairs)


EdgeKey = Tuple[int, int, str, Tuple[int, ...]]
SystemKey = Tuple[int, Tuple[EdgeKey, ...]]


def _edge_key(edge: Tuple[int, int], rule: EdgeRule, tag: Optional[Direction], perm: Sequence[int]) -> EdgeKey:
    source, target = perm[edge[0]], perm[edge[1]]
    code = tag if tag is not None else ()
    # для фейнмановских ребер перестановка концов меняет знак направления и не меняет ковекторы;
    # ребро Вайтмана ориентировано
    if rule != EdgeRule.WIGHTMAN and source < target:
        source, target = target, source
        code = (-code[0], -code[1]) if code else ()
    return source, target, rule.value, code


@lru_cache(maxsize=None)
def _canonical_key(n: int, edges: Tuple[Tuple[int, int], ...], rules: Tuple[EdgeRule, ...],
                   tags: Tuple[Optional[Direction], ...]) -> SystemKey:
    best = None
    for perm in itertools.permutations(range(n)):
        candidate = tuple(sorted(_edge_key(e, r, tag, perm) for e, r, tag in zip(edges, rules, tags)))
        if best is None or candidate < best:
            best = candidate
    return n, best


def canonical_key(g: ImmersedGraph) -> SystemKey:
    """Ключ системы ковекторов, не зависящий от нумерации вершин и от положения в решетке"""
    return _canonical_key(g.n, g.edges, g.rules, edge_tags(g))


@lru_cache(maxsize=None)
def _decide(key: SystemKey, target: Target) -> bool:
    n, edge_keys = key
    edges = tuple((source, target_vertex) for source, target_vertex, _, _ in edge_keys)
    rules = tuple(EdgeRule(rule) for _, _, rule, _ in edge_keys)
    tags = tuple(code if code else None for _, _, _, code in edge_keys)
    for rays in _ray_assignments(rules, tags):
        system = _assemble(n, edges, rules, tags, rays)
        if _feasible_with_free_pairs(system.constraints + _target_constraints(system, target), system.free_pairs):
            return True
    return False


def feasible(g: ImmersedGraph, target: Target) -> bool:
    """Существуют ли ковекторы ребер, для которых ковекторы вершин удовлетворяют цели"""
    return _decide(canonical_key(g), target)


def collapse_coincident(g: ImmersedGraph) -> ImmersedGraph:
    """Склеить вершины с общим положением, удалить петли; кратные ребра сохраняются"""
    clusters: Dict[Point, int] = {}
    for vertex in range(g.n):
        clusters.setdefault(g.placement[vertex], len(clusters))
    placement = [None] * len(clusters)
    for point, index in clusters.items():
        placement[index] = point

    kept = []
    for (source, target), rule in zip(g.edges, g.rules):
        a, b = clusters[g.placement[source]], clusters[g.placement[target]]
        if a != b:
            kept.append(((max(a, b), min(a, b)), rule))
    kept.sort(key=lambda item: (item[0], item[1].value))
    return ImmersedGraph(n=len(clusters), edges=tuple(e for e, _ in kept),
                         placement=tuple(placement), rules=tuple(r for _, r in kept))


# --- перебор ---

def connected_graphs(n_max: int) -> Iterator[nx.Graph]:
    """Связные графы с 1..n_max вершинами, по одному на класс изоморфизма"""
    for graph in nx.graph_atlas_g():
        n = graph.number_of_nodes()
        if 1 <= n <= n_max and nx.is_connected(graph):
            yield graph


def enumerate_placements(graph: nx.Graph, window: int) -> Iterator[Tuple[Point, ...]]:
    """Размещения в окне window×window с точностью до сдвига (min u = min v = 0)"""
    n = graph.number_of_nodes()
    order = [0] + [v for _, v in nx.bfs_edges(graph, 0)]
    points = [(u, v) for u in range(window) for v in range(window)]
    placement: Dict[int, Point] = {}

    def extend(position: int) -> Iterator[Tuple[Point, ...]]:
        if position == n:
            if min(p[0] for p in placement.values()) == 0 and min(p[1] for p in placement.values()) == 0:
                yield tuple(placement[v] for v in range(n))
            return
        vertex = order[position]
        placed = [placement[w] for w in graph[vertex] if w in placement]
        if placed:
            anchor = placed[0]
            candidates = sorted({(anchor[0], v) for v in range(window)} | {(u, anchor[1]) for u in range(window)})
        else:
            candidates = points
        for point in candidates:
            if all(point[0] == q[0] or point[1] == q[1] for q in placed):
                placement[vertex] = point
                yield from extend(position + 1)
                del placement[vertex]

    yield from extend(0)


@dataclass
class WavefrontReport:
    n_max: int
    window: int
    rule: str
    graphs_checked: int = 0
    configurations_checked: int = 0
    infeasible_count: int = 0
    degenerate_count: int = 0
    verdict_counts: Counter = field(default_factory=Counter)
    counterexamples: List[Dict] = field(default_factory=list)
    asserted: bool = True

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> Dict:
        return {
            'n_max': self.n_max,
            'window': self.window,
            'rule': self.rule,
            'asserted': self.asserted,
            'graphs_checked': self.graphs_checked,
            'configurations_checked': self.configurations_checked,
            'infeasible_count': self.infeasible_count,
            'degenerate_count': self.degenerate_count,
            'verdict_counts': dict(sorted(self.verdict_counts.items())),
            'counterexamples': self.counterexamples,
            'passed': self.passed
        }


def enumerate_and_verify(n_max: int, window: int, rule: str = "feynman", progress: bool = False) -> WavefrontReport:
    """Перебор связных графов и размещений с проверкой недостижимости всех трех целей"""
    WavefrontConfig.validate_limits(n_max, window)
    edge_rule = EdgeRule(rule)
    report = WavefrontReport(n_max=n_max, window=window, rule=edge_rule.value,
                             asserted=edge_rule != EdgeRule.WIGHTMAN)
    counterexamples = []

    graphs = list(connected_graphs(n_max))
    for graph in tqdm(graphs, desc=f"wavefront {edge_rule.value}", disable=not progress):
        report.graphs_checked += 1
        edges = list(graph.edges())
        for placement in enumerate_placements(graph, window):
            g = ImmersedGraph.build(graph.number_of_nodes(), edges, placement, edge_rule)
            report.configurations_checked += 1
            verdicts = {target: feasible(g, target) for target in Target}
            for target, verdict in verdicts.items():
                report.verdict_counts[f"{target.value}:{'feasible' if verdict else 'infeasible'}"] += 1
            if not any(verdicts.values()):
                report.infeasible_count += 1

            # без ребра между различными точками утверждение пусто
            if not g.has_distinct_edge:
                report.degenerate_count += 1
                continue
            if not report.asserted:
                continue
            failed = [t.value for t, verdict in verdicts.items() if verdict]
            if feasible(collapse_coincident(g), Target.ALL_ZERO) != verdicts[Target.ALL_ZERO]:
                failed.append("collapse")
            for target in failed:
                counterexamples.append({'edges': [list(e) for e in g.edges],
                                        'placement': [list(p) for p in g.placement],
                                        'target': target})

    report.counterexamples = sorted(counterexamples, key=lambda c: (c['edges'], c['placement'], c['target']))
    if report.passed:
        logger.info(f"✅ {edge_rule.value}: {report.configurations_checked} конфигураций, контрпримеров нет")
    else:
        logger.warning(f"❌ {edge_rule.value}: найдено {len(report.counterexamples)} контрпримеров")
    return report


# --- оценки волнового фронта и критерий Хёрмандера ---

@dataclass(frozen=True)
class ConeEstimate:
    """Оценка множества ковекторов по слотам

    microlocal_blocks: группы слотов, в каждой из которых ковекторы либо все нулевые,
    либо не лежат целиком ни в V̄+, ни в V̄-.
    """
    slots: Tuple[SlotCone, ...]
    not_all_zero: bool = True
    microlocal_blocks: Tuple[Tuple[int, ...], ...] = ()


def wightman_bipartite_estimate(l: int, t: int) -> ConeEstimate:
    if not 0 <= l <= t:
        raise ValueError(f"Ожидалось 0 ≤ l ≤ t, получено l={l}, t={t}")
    return ConeEstimate(slots=tuple([SlotCone.BACKWARD] * (l + 1) + [SlotCone.FORWARD] * (t - l)))


def product_microlocal_estimate(l: int, t: int) -> ConeEstimate:
    """Произведение T-произведения на l+1 точках и антихронологического на t-l точках"""
    if not 0 <= l <= t:
        raise ValueError(f"Ожидалось 0 ≤ l ≤ t, получено l={l}, t={t}")
    blocks = tuple(block for block in (tuple(range(l + 1)), tuple(range(l + 1, t + 1))) if block)
    return ConeEstimate(slots=tuple([SlotCone.FREE] * (t + 1)), microlocal_blocks=blocks)


def _slot_variables(i: int) -> Tuple[str, str]:
    return f"r{i}t", f"r{i}x"


def _cone_constraints(i: int, cone: SlotCone, sign: int) -> List[LinearConstraint]:
    """sign·r_i принадлежит конусу"""
    rt, rx = _slot_variables(i)
    if cone == SlotCone.ZERO:
        return [LinearConstraint.eq({rt: 1}), LinearConstraint.eq({rx: 1})]
    if cone == SlotCone.FREE:
        return []
    s = sign if cone == SlotCone.FORWARD else -sign
    return [LinearConstraint.ge({rt: s, rx: -s}), LinearConstraint.ge({rt: s, rx: s})]


def _outside_cone_options(i: int, forward: bool) -> List[LinearConstraint]:
    # k ∉ V̄± ⟺ одна из форм ±k_t - k_x, ±k_t + k_x строго отрицательна
    rt, rx = _slot_variables(i)
    s = 1 if forward else -1
    return [LinearConstraint.le({rt: s, rx: -1}, 1), LinearConstraint.le({rt: s, rx: 1}, 1)]

class SlotRequirement(Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    NOT_FORWARD = "not_forward"
    NOT_BACKWARD = "not_backward"


def _requirement_options(i: int, requirement: SlotRequirement) -> List[LinearConstraint]:
    if requirement == SlotRequirement.NONZERO:
        return _nonzero_options(*_slot_variables(i))
    return _outside_cone_options(i, forward=requirement == SlotRequirement.NOT_FORWARD)


def _slot_feasible(i: int, cone_constraints: List[LinearConstraint], requirements: frozenset) -> bool:
    """Совместность требований к одному слоту; слоты между собой не связаны"""
    if SlotRequirement.ZERO in requirements:
        # ноль лежит в любом конусе
        return len(requirements) == 1
    disjunctions = [_requirement_options(i, r) for r in sorted(requirements, key=lambda r: r.value)]
    return any(is_feasible(cone_constraints + list(choice)) for choice in itertools.product(*disjunctions))


def _block_options(block: Sequence[int]) -> List[Optional[Tuple[int, int]]]:
    # None - весь блок нулевой, иначе (i, j): r_i ∉ V̄+, r_j ∉ V̄-
    return [None] + list(itertools.product(block, repeat=2))


def hormander_compose(a: ConeEstimate, b: ConeEstimate) -> bool:
    """True, если сумма элемента a и элемента b по слотам не может обратиться в нуль"""
    if len(a.slots) != len(b.slots):
        raise SlotMismatch(f"Число слотов не совпадает: {len(a.slots)} и {len(b.slots)}")
    m = len(a.slots)
    cones = [_cone_constraints(i, a.slots[i], 1) + _cone_constraints(i, b.slots[i], -1) for i in range(m)]
    # условие блока симметрично относительно r → -r, поэтому блоки обеих оценок применяются к r
    blocks = sorted(set(a.microlocal_blocks) | set(b.microlocal_blocks))
    nonzero_required = a.not_all_zero or b.not_all_zero

    verdicts: Dict[Tuple[int, frozenset], bool] = {}

    def slot_ok(i: int, requirements: frozenset) -> bool:
        key = (i, requirements)
        if key not in verdicts:
            verdicts[key] = _slot_feasible(i, cones[i], requirements)
        return verdicts[key]

    seen = set()
    for choice in itertools.product(*(_block_options(block) for block in blocks)):
        requirements: Dict[int, set] = {}
        for block, option in zip(blocks, choice):
            if option is None:
                for i in block:
                    requirements.setdefault(i, set()).add(SlotRequirement.ZERO)
            else:
                requirements.setdefault(option[0], set()).add(SlotRequirement.NOT_FORWARD)
                requirements.setdefault(option[1], set()).add(SlotRequirement.NOT_BACKWARD)
        frozen = frozenset((i, frozenset(r)) for i, r in requirements.items())
        if frozen in seen:
            continue
        seen.add(frozen)

        if not all(slot_ok(i, r) for i, r in frozen):
            continue
        if nonzero_required and all(option is None for option in choice):
            # вне блоков ненулевым может быть любой незафиксированный слот
            if any(slot_ok(i, frozenset({SlotRequirement.NONZERO})) for i in range(m) if i not in requirements):
                return False
        else:
            return False
    return True

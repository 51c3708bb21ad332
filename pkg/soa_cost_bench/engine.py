"""Divide-and-conquer estimation over a service graph.

A sequential depth-first pre-pass fixes which reference of every service is its first
encounter. Estimates are then evaluated against that fixed plan: all leaf and
re-reference estimates are independent, and integrations run level by level from the
deepest level up, each level after the one below it. Workers only change how those
independent calls are scheduled, never the result.
"""

from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType

from typeguard import typechecked

from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.graph import (
    Level,
    ServiceGraph,
    ServiceId,
    ServiceKind,
    ServiceNode,
    ensure_valid,
    first_encounter_order,
)
from soa_cost_bench.metrics import ChildSummary, EffortMicros, EstimatorContext, MeasureMode, MetricSet, format_milli

# Maps an index-keyed estimator call over indices, preserving order.
_Runner = Callable[[Callable[[int], EffortMicros], Sequence[int]], list[EffortMicros]]


class Category(Enum):
    DISCOVERY = "DISCOVERY"
    MIGRATION = "MIGRATION"
    DEVELOPMENT = "DEVELOPMENT"
    INTEGRATION = "INTEGRATION"
    RE_REFERENCE = "RE_REFERENCE"


KIND_TO_CATEGORY = {
    ServiceKind.AVAILABLE: Category.DISCOVERY,
    ServiceKind.MIGRATABLE: Category.MIGRATION,
    ServiceKind.NEW: Category.DEVELOPMENT,
    ServiceKind.COMBINED: Category.INTEGRATION,
}

KIND_TO_SLOT = {
    ServiceKind.AVAILABLE: "E1",
    ServiceKind.MIGRATABLE: "E2",
    ServiceKind.NEW: "E3",
    ServiceKind.COMBINED: "E4",
}


class TraceAction(Enum):
    DIVIDE = "DIVIDE"
    ESTIMATE = "ESTIMATE"
    INTEGRATE = "INTEGRATE"
    SUM = "SUM"


@dataclass(frozen=True)
class LineItem:
    service_id: ServiceId
    kind: ServiceKind
    level: Level
    category: Category
    amount: EffortMicros


@dataclass(frozen=True)
class Breakdown:
    line_items: tuple[LineItem, ...]
    mode: MeasureMode
    per_level_integration: Mapping[Level, EffortMicros] = field(default_factory=dict)
    total: EffortMicros = 0

    @classmethod
    def from_items(cls, line_items: Iterable[LineItem], mode: MeasureMode) -> "Breakdown":
        items = tuple(line_items)
        per_level: dict[Level, EffortMicros] = {}
        for item in items:
            if item.category is Category.INTEGRATION:
                per_level[item.level] = per_level.get(item.level, 0) + item.amount
        total = sum(item.amount for item in items)
        return cls(items, mode, MappingProxyType(dict(sorted(per_level.items()))), total)

    def __post_init__(self) -> None:
        assert self.total == sum(item.amount for item in self.line_items), "line items do not add up to the total"

    def item(self, service_id: ServiceId, category: Category) -> LineItem:
        return next(i for i in self.line_items if i.service_id == service_id and i.category is category)


@dataclass(frozen=True)
class TraceStep:
    ordinal: int
    action: TraceAction
    subject: ServiceId | None
    detail: str
    amount: EffortMicros | None = None


@dataclass(frozen=True)
class _Visit:
    action: TraceAction
    service_id: ServiceId
    level: Level
    parent: ServiceId | None
    repeat: bool = False


def is_base(node: ServiceNode) -> bool:
    return node.kind is not ServiceKind.COMBINED


def decompose(node: ServiceNode) -> list[ServiceId]:
    if is_base(node):
        raise EstimationError(
            ErrorCode.NOT_COMBINED, f"{node.kind.value} services do not decompose", service_id=node.id
        )
    return list(node.children)


@typechecked
def compose(child_subtotals: Sequence[EffortMicros], integration: EffortMicros) -> EffortMicros:
    if integration < 0 or any(s < 0 for s in child_subtotals):
        raise EstimationError(ErrorCode.NEGATIVE_INPUT, "subtotals and integration must be >= 0")
    return sum(child_subtotals) + integration


def _plan(graph: ServiceGraph) -> list[_Visit]:
    visits: list[_Visit] = []
    seen: set[ServiceId] = set()
    # (service, level, parent, exiting)
    stack: list[tuple[ServiceId, Level, ServiceId | None, bool]] = [(graph.root, 0, None, False)]
    while stack:
        service_id, level, parent, exiting = stack.pop()
        node = graph.node(service_id)
        if exiting:
            visits.append(_Visit(TraceAction.INTEGRATE, service_id, level, parent))
        elif service_id in seen:
            visits.append(_Visit(TraceAction.ESTIMATE, service_id, level, parent, repeat=True))
        elif is_base(node):
            seen.add(service_id)
            visits.append(_Visit(TraceAction.ESTIMATE, service_id, level, parent))
        else:
            seen.add(service_id)
            visits.append(_Visit(TraceAction.DIVIDE, service_id, level, parent))
            stack.append((service_id, level, parent, True))
            for child in reversed(decompose(node)):
                stack.append((child, level + 1, service_id, False))
    return visits


def _checked(amount: EffortMicros, service_id: ServiceId) -> EffortMicros:
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise TypeError(f"estimator returned {type(amount).__name__} for {service_id!r}, expected int milli-units")
    if amount < 0:
        raise EstimationError(ErrorCode.NEGATIVE_ESTIMATE, f"estimator returned {amount}", service_id=service_id)
    return amount


def _child_summary(node: ServiceNode, amount: EffortMicros) -> ChildSummary:
    return ChildSummary(
        child_id=node.id,
        child_kind=node.kind,
        child_subtotal=amount,
        interface_cost_attr=node.attribute("interface_cost"),
        soa_compliant=node.attribute("soa_compliant", False) is True,
    )


class _Evaluation:
    def __init__(self, graph: ServiceGraph, metrics: MetricSet, *, workers: int = 1):
        ensure_valid(graph)
        self.graph = graph
        self.metrics = metrics
        self.visits = _plan(graph)
        self.amounts: list[EffortMicros | None] = [None] * len(self.visits)
        self.subtotals: dict[ServiceId, EffortMicros] = {}
        self.child_visits: dict[ServiceId, list[int]] = {}
        for i, visit in enumerate(self.visits):
            if visit.parent is not None and visit.action is not TraceAction.INTEGRATE:
                self.child_visits.setdefault(visit.parent, []).append(i)

        if workers <= 1:
            self._evaluate(lambda fn, items: [fn(item) for item in items])
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                self._evaluate(lambda fn, items: list(pool.map(fn, items)))

    def _context(self, visit: _Visit) -> EstimatorContext:
        return EstimatorContext(self.graph.node(visit.service_id), visit.level, visit.repeat, self.metrics.mode)

    def _estimate(self, index: int) -> EffortMicros:
        visit = self.visits[index]
        return _checked(self.metrics.estimate_leaf(self._context(visit)), visit.service_id)

    def _occurrence_amount(self, index: int) -> EffortMicros:
        visit = self.visits[index]
        if visit.action is TraceAction.DIVIDE or not visit.repeat:
            return self.subtotals[visit.service_id]
        amount = self.amounts[index]
        assert amount is not None
        return amount

    def _integrate(self, index: int) -> EffortMicros:
        visit = self.visits[index]
        summaries = [
            _child_summary(self.graph.node(self.visits[i].service_id), self._occurrence_amount(i))
            for i in self.child_visits[visit.service_id]
        ]
        return _checked(self.metrics.estimate_integration(summaries, visit.level), visit.service_id)

    def _evaluate(self, run: _Runner) -> None:
        estimates = [i for i, v in enumerate(self.visits) if v.action is TraceAction.ESTIMATE]
        for index, amount in zip(estimates, run(self._estimate, estimates)):
            self.amounts[index] = amount
            if not self.visits[index].repeat:
                self.subtotals[self.visits[index].service_id] = amount

        integrations = [i for i, v in enumerate(self.visits) if v.action is TraceAction.INTEGRATE]
        for level in sorted({self.visits[i].level for i in integrations}, reverse=True):
            at_level = [i for i in integrations if self.visits[i].level == level]
            for index, amount in zip(at_level, run(self._integrate, at_level)):
                self.amounts[index] = amount
                service_id = self.visits[index].service_id
                children = [self._occurrence_amount(i) for i in self.child_visits[service_id]]
                self.subtotals[service_id] = compose(children, amount)

    @property
    def total(self) -> EffortMicros:
        return self.subtotals[self.graph.root]

    def line_items(self) -> list[LineItem]:
        items = []
        for visit, amount in zip(self.visits, self.amounts):
            if visit.action is TraceAction.DIVIDE:
                continue
            assert amount is not None
            node = self.graph.node(visit.service_id)
            category = Category.RE_REFERENCE if visit.repeat else KIND_TO_CATEGORY[node.kind]
            items.append(LineItem(visit.service_id, node.kind, visit.level, category, amount))
        return items


def estimate(graph: ServiceGraph, metrics: MetricSet, *, workers: int = 1) -> Breakdown:
    evaluation = _Evaluation(graph, metrics, workers=workers)
    breakdown = Breakdown.from_items(evaluation.line_items(), metrics.mode)
    assert breakdown.total == evaluation.total
    return breakdown


def _detail(graph: ServiceGraph, visit: _Visit) -> str:
    node = graph.node(visit.service_id)
    if visit.action is TraceAction.DIVIDE:
        return f"divide {node.display_name} into {', '.join(node.children)} at level {visit.level}"
    if visit.action is TraceAction.INTEGRATE:
        count = len(node.children)
        return f"integrate {count} component service{'s' if count != 1 else ''} at level {visit.level} using E4"
    if visit.repeat:
        return f"RE_REFERENCE at level {visit.level}: already taken into account, priced by E1"
    category = KIND_TO_CATEGORY[node.kind].value.lower()
    return f"{category} of {node.kind.value} service at level {visit.level} using {KIND_TO_SLOT[node.kind]}"


def trace(graph: ServiceGraph, metrics: MetricSet, *, workers: int = 1) -> list[TraceStep]:
    evaluation = _Evaluation(graph, metrics, workers=workers)
    steps = [
        TraceStep(ordinal, visit.action, visit.service_id, _detail(graph, visit), amount)
        for ordinal, (visit, amount) in enumerate(zip(evaluation.visits, evaluation.amounts), start=1)
    ]
    total = evaluation.total
    steps.append(
        TraceStep(
            len(steps) + 1,
            TraceAction.SUM,
            None,
            f"total {format_milli(total)} {metrics.mode.unit_label}",
            total,
        )
    )
    return steps


def flat_oracle(graph: ServiceGraph, metrics: MetricSet) -> EffortMicros:
    """Computes the estimate total without recursion, as three independent sums.

    A service's first encounter is claimed by the parent with the largest preorder index
    below the service's own index (at that parent's first position listing it).
    """
    order = first_encounter_order(graph)
    index = {service_id: i for i, (service_id, _) in enumerate(order)}
    levels = dict(order)

    claims: dict[ServiceId, tuple[ServiceId, int]] = {}
    for parent, _ in order:
        for position, child in enumerate(graph.node(parent).children):
            if index[parent] >= index[child]:
                continue
            if child not in claims or index[claims[child][0]] < index[parent]:
                claims[child] = (parent, position)

    def leaf(service_id: ServiceId, level: Level, repeat: bool) -> EffortMicros:
        ctx = EstimatorContext(graph.node(service_id), level, repeat, metrics.mode)
        return _checked(metrics.estimate_leaf(ctx), service_id)

    leaf_amounts = {sid: leaf(sid, level, False) for sid, level in order if is_base(graph.node(sid))}
    re_reference_amounts = {
        (parent, position): leaf(child, levels[parent] + 1, True)
        for parent, _ in order
        for position, child in enumerate(graph.node(parent).children)
        if claims.get(child) != (parent, position)
    }

    subtotals: dict[ServiceId, EffortMicros] = dict(leaf_amounts)
    integration_amounts: dict[ServiceId, EffortMicros] = {}
    for service_id, level in reversed(order):
        node = graph.node(service_id)
        if is_base(node):
            continue
        occurrence_amounts = [
            (
                subtotals[child]
                if claims.get(child) == (service_id, position)
                else re_reference_amounts[(service_id, position)]
            )
            for position, child in enumerate(node.children)
        ]
        summaries = [_child_summary(graph.node(c), a) for c, a in zip(node.children, occurrence_amounts)]
        integration_amounts[service_id] = _checked(metrics.estimate_integration(summaries, level), service_id)
        subtotals[service_id] = sum(occurrence_amounts) + integration_amounts[service_id]

    return sum(leaf_amounts.values()) + sum(re_reference_amounts.values()) + sum(integration_amounts.values())

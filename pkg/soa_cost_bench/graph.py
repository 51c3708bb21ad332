import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Any

import networkx as nx

from soa_cost_bench.errors import ErrorCode, EstimationError

ServiceId = str
Level = int
AttributeValue = bool | int | float | str

SERVICE_ID_PATTERN = re.compile(r"[A-Za-z0-9_-]+")


class ServiceKind(Enum):
    AVAILABLE = "available"
    MIGRATABLE = "migratable"
    NEW = "new"
    COMBINED = "combined"


@dataclass(frozen=True)
class ServiceNode:
    id: ServiceId
    kind: ServiceKind
    name: str = ""
    children: tuple[ServiceId, ...] = ()
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ServiceKind(self.kind))
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    @property
    def display_name(self) -> str:
        return self.name or self.id

    def attribute(self, name: str, default: Any = None) -> Any:
        return self.attributes.get(name, default)


@dataclass(frozen=True)
class ServiceGraph:
    """The service decomposition graph.

    `services` keeps declaration order so that duplicate ids can still be reported by
    `validate`; `nodes` is the id lookup (first declaration wins).
    """

    root: ServiceId
    services: tuple[ServiceNode, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "services", tuple(self.services))

    @cached_property
    def nodes(self) -> Mapping[ServiceId, ServiceNode]:
        nodes: dict[ServiceId, ServiceNode] = {}
        for node in self.services:
            nodes.setdefault(node.id, node)
        return MappingProxyType(nodes)

    def node(self, service_id: ServiceId) -> ServiceNode:
        return self.nodes[service_id]

    def to_networkx(self) -> nx.DiGraph:
        digraph = nx.DiGraph()
        for node in self.nodes.values():
            digraph.add_node(node.id, kind=node.kind)
        for node in self.nodes.values():
            for child in node.children:
                if child in self.nodes:
                    digraph.add_edge(node.id, child)
        return digraph


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class IssueCode(Enum):
    MISSING_ROOT = "MISSING_ROOT"
    DANGLING_CHILD = "DANGLING_CHILD"
    CYCLE = "CYCLE"
    DUPLICATE_ID = "DUPLICATE_ID"
    INVALID_ID = "INVALID_ID"
    LEAF_WITH_CHILDREN = "LEAF_WITH_CHILDREN"
    EMPTY_COMBINED = "EMPTY_COMBINED"
    SINGLE_CHILD = "SINGLE_CHILD"
    UNREACHABLE = "UNREACHABLE"


@dataclass(frozen=True)
class Issue:
    severity: Severity
    code: IssueCode
    service_id: ServiceId | None
    message: str

    def __str__(self) -> str:
        subject = self.service_id if self.service_id is not None else "-"
        return f"{self.severity.value} {self.code.value} {subject}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list[IssueCode]:
        return [i.code for i in self.issues]


def _error(code: IssueCode, service_id: ServiceId | None, message: str) -> Issue:
    return Issue(Severity.ERROR, code, service_id, message)


def _warning(code: IssueCode, service_id: ServiceId | None, message: str) -> Issue:
    return Issue(Severity.WARNING, code, service_id, message)


def _normalized_cycle(cycle: list[ServiceId]) -> tuple[ServiceId, ...]:
    start = cycle.index(min(cycle))
    return tuple(cycle[start:] + cycle[:start])


def _component_cycles(digraph: nx.DiGraph) -> list[tuple[ServiceId, ...]]:
    """One cycle per strongly connected component that has one (self-loops included)."""
    cycles = []
    for component in nx.strongly_connected_components(digraph):
        start = min(component)
        if len(component) == 1 and not digraph.has_edge(start, start):
            continue
        edges = nx.find_cycle(digraph.subgraph(component), source=start)
        cycles.append(_normalized_cycle([parent for parent, _ in edges]))
    return cycles


def validate(graph: ServiceGraph) -> ValidationReport:
    issues: list[Issue] = []

    seen_ids: set[ServiceId] = set()
    for node in graph.services:
        if node.id in seen_ids:
            issues.append(_error(IssueCode.DUPLICATE_ID, node.id, f"service id {node.id!r} is declared more than once"))
        seen_ids.add(node.id)
        if not SERVICE_ID_PATTERN.fullmatch(node.id):
            issues.append(_error(IssueCode.INVALID_ID, node.id, f"service id {node.id!r} is not a valid token"))

    if graph.root not in graph.nodes:
        issues.append(_error(IssueCode.MISSING_ROOT, graph.root, f"root {graph.root!r} is not a declared service"))

    for node in graph.nodes.values():
        if node.kind is not ServiceKind.COMBINED and node.children:
            issues.append(
                _error(
                    IssueCode.LEAF_WITH_CHILDREN,
                    node.id,
                    f"{node.kind.value} service declares children; only combined services decompose",
                )
            )
        elif node.kind is ServiceKind.COMBINED and not node.children:
            issues.append(_error(IssueCode.EMPTY_COMBINED, node.id, "combined service has no component services"))
        elif node.kind is ServiceKind.COMBINED and len(node.children) == 1:
            issues.append(_warning(IssueCode.SINGLE_CHILD, node.id, "combined service wraps a single component"))

        for child in node.children:
            if child not in graph.nodes:
                issues.append(_error(IssueCode.DANGLING_CHILD, node.id, f"child {child!r} is not a declared service"))

    digraph = graph.to_networkx()
    cycles = sorted(_component_cycles(digraph))
    for cycle in cycles:
        path = " -> ".join([*cycle, cycle[0]])
        issues.append(_error(IssueCode.CYCLE, cycle[0], f"cycle {path}"))

    if graph.root in graph.nodes:
        reachable = nx.descendants(digraph, graph.root) | {graph.root}
        for node in graph.nodes.values():
            if node.id not in reachable:
                issues.append(_warning(IssueCode.UNREACHABLE, node.id, "service is not reachable from the root"))

    return ValidationReport(tuple(issues))


def ensure_valid(graph: ServiceGraph) -> ValidationReport:
    report = validate(graph)
    if not report.ok:
        details = "; ".join(str(issue) for issue in report.errors)
        raise EstimationError(ErrorCode.INVALID_GRAPH, details)
    return report


def first_encounter_order(graph: ServiceGraph) -> list[tuple[ServiceId, Level]]:
    """Depth-first preorder from the root, children in declaration order.

    Each service is listed once, at the depth of its first encounter.
    """
    ensure_valid(graph)

    order: list[tuple[ServiceId, Level]] = []
    seen: set[ServiceId] = set()
    stack: list[tuple[ServiceId, Level]] = [(graph.root, 0)]
    while stack:
        service_id, level = stack.pop()
        if service_id in seen:
            continue
        seen.add(service_id)
        order.append((service_id, level))
        for child in reversed(graph.node(service_id).children):
            stack.append((child, level + 1))
    return order

import random

import pytest

from conftest import random_graph
from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.graph import (
    IssueCode,
    ServiceGraph,
    ServiceKind,
    ServiceNode,
    Severity,
    ensure_valid,
    first_encounter_order,
    validate,
)


def _graph(root: str, *nodes: ServiceNode) -> ServiceGraph:
    return ServiceGraph(root=root, services=nodes)


def test_railco_is_valid_without_warnings(railco):
    report = validate(railco)
    assert report.ok
    assert report.issues == ()


def test_node_coerces_kind_and_children():
    node = ServiceNode(id="A", kind="combined", children=["B", "C"])  # type: ignore[arg-type]
    assert node.kind is ServiceKind.COMBINED
    assert node.children == ("B", "C")
    assert node.display_name == "A"
    assert ServiceNode(id="A", kind=ServiceKind.NEW, name="Alpha").display_name == "Alpha"


def test_two_node_cycle_is_reported_once_with_its_path():
    graph = _graph(
        "R",
        ServiceNode("R", ServiceKind.COMBINED, children=("A", "L")),
        ServiceNode("A", ServiceKind.COMBINED, children=("B",)),
        ServiceNode("B", ServiceKind.COMBINED, children=("A",)),
        ServiceNode("L", ServiceKind.NEW),
    )
    report = validate(graph)
    cycles = [issue for issue in report.errors if issue.code is IssueCode.CYCLE]
    assert len(cycles) == 1
    assert cycles[0].message == "cycle A -> B -> A"
    assert not report.ok


def test_self_loop_is_a_cycle():
    graph = _graph("R", ServiceNode("R", ServiceKind.COMBINED, children=("R", "L")), ServiceNode("L", ServiceKind.NEW))
    assert IssueCode.CYCLE in validate(graph).codes()


MISSING_ROOT = _graph("Missing", ServiceNode("A", ServiceKind.NEW))
DANGLING_CHILD = _graph(
    "R",
    ServiceNode("R", ServiceKind.COMBINED, children=("A", "Ghost")),
    ServiceNode("A", ServiceKind.NEW),
)
DUPLICATE_ID = _graph("A", ServiceNode("A", ServiceKind.NEW), ServiceNode("A", ServiceKind.AVAILABLE))
INVALID_ID = _graph("a b", ServiceNode("a b", ServiceKind.NEW))
LEAF_WITH_CHILDREN = _graph(
    "R",
    ServiceNode("R", ServiceKind.COMBINED, children=("A", "B")),
    ServiceNode("A", ServiceKind.NEW, children=("B",)),
    ServiceNode("B", ServiceKind.NEW),
)
EMPTY_COMBINED = _graph("R", ServiceNode("R", ServiceKind.COMBINED))


@pytest.mark.parametrize(
    "graph, code",
    [
        (MISSING_ROOT, IssueCode.MISSING_ROOT),
        (DANGLING_CHILD, IssueCode.DANGLING_CHILD),
        (DUPLICATE_ID, IssueCode.DUPLICATE_ID),
        (INVALID_ID, IssueCode.INVALID_ID),
        (LEAF_WITH_CHILDREN, IssueCode.LEAF_WITH_CHILDREN),
        (EMPTY_COMBINED, IssueCode.EMPTY_COMBINED),
    ],
)
def test_invariant_violations_are_errors(graph, code):
    report = validate(graph)
    assert code in [issue.code for issue in report.errors]
    assert not report.ok


def test_single_child_and_unreachable_are_warnings():
    graph = _graph(
        "R",
        ServiceNode("R", ServiceKind.COMBINED, children=("A",)),
        ServiceNode("A", ServiceKind.NEW),
        ServiceNode("Orphan", ServiceKind.AVAILABLE),
    )
    report = validate(graph)
    assert report.ok
    assert [issue.code for issue in report.warnings] == [IssueCode.SINGLE_CHILD, IssueCode.UNREACHABLE]
    assert all(issue.severity is Severity.WARNING for issue in report.warnings)
    assert str(report.warnings[1]) == "warning UNREACHABLE Orphan: service is not reachable from the root"


def test_ensure_valid_raises_invalid_graph():
    graph = _graph("R", ServiceNode("R", ServiceKind.COMBINED))
    with pytest.raises(EstimationError) as excinfo:
        ensure_valid(graph)
    assert excinfo.value.code is ErrorCode.INVALID_GRAPH
    assert "EMPTY_COMBINED" in str(excinfo.value)


def test_railco_first_encounter_order(railco):
    assert first_encounter_order(railco) == [
        ("AutomationSystem", 0),
        ("InvoiceProcessing", 1),
        ("MetadataChecking", 2),
        ("LegacySystem", 2),
        ("PollingNotification", 2),
        ("Transform", 2),
        ("POProcessing", 1),
    ]


@pytest.mark.parametrize("seed", range(50))
def test_first_encounter_order_lists_each_reachable_service_once(seed):
    graph = random_graph(seed)
    assert validate(graph).ok
    order = first_encounter_order(graph)
    ids = [service_id for service_id, _ in order]
    assert len(ids) == len(set(ids))
    assert set(ids) == set(graph.nodes)
    assert order[0] == ("S0", 0)


def test_dense_cycles_are_reported_once_per_component():
    ids = [f"N{i:02d}" for i in range(12)]
    nodes = [ServiceNode(i, ServiceKind.COMBINED, children=tuple(c for c in ids if c != i)) for i in ids]
    report = validate(_graph("N00", *nodes))
    cycles = [issue for issue in report.errors if issue.code is IssueCode.CYCLE]
    assert len(cycles) == 1
    assert cycles[0].service_id == "N00"
    assert cycles[0].message.startswith("cycle N00 -> ")
    assert cycles[0].message.endswith(" -> N00")


def test_separate_cycles_are_each_reported():
    graph = _graph(
        "R",
        ServiceNode("R", ServiceKind.COMBINED, children=("A", "C", "E")),
        ServiceNode("A", ServiceKind.COMBINED, children=("B",)),
        ServiceNode("B", ServiceKind.COMBINED, children=("A",)),
        ServiceNode("C", ServiceKind.COMBINED, children=("D",)),
        ServiceNode("D", ServiceKind.COMBINED, children=("C",)),
        ServiceNode("E", ServiceKind.COMBINED, children=("E",)),
    )
    messages = [issue.message for issue in validate(graph).errors if issue.code is IssueCode.CYCLE]
    assert messages == ["cycle A -> B -> A", "cycle C -> D -> C", "cycle E -> E"]


def test_diamond_lists_the_shared_service_once_under_its_first_parent():
    graph = _graph(
        "R",
        ServiceNode("R", ServiceKind.COMBINED, children=("A", "B")),
        ServiceNode("A", ServiceKind.COMBINED, children=("S",)),
        ServiceNode("B", ServiceKind.COMBINED, children=("S",)),
        ServiceNode("S", ServiceKind.NEW),
    )
    assert first_encounter_order(graph) == [("R", 0), ("A", 1), ("S", 2), ("B", 1)]


@pytest.mark.parametrize("seed", range(25))
def test_service_declaration_order_does_not_change_first_encounter_order(seed):
    graph = random_graph(seed)
    services = list(graph.services)
    random.Random(seed).shuffle(services)
    shuffled = ServiceGraph(root=graph.root, services=tuple(services))
    assert first_encounter_order(shuffled) == first_encounter_order(graph)


def test_first_encounter_order_rejects_invalid_graphs():
    graph = _graph(
        "R",
        ServiceNode("R", ServiceKind.COMBINED, children=("Ghost", "A")),
        ServiceNode("A", ServiceKind.NEW),
    )
    with pytest.raises(EstimationError) as excinfo:
        first_encounter_order(graph)
    assert excinfo.value.code is ErrorCode.INVALID_GRAPH
    assert "DANGLING_CHILD" in str(excinfo.value)

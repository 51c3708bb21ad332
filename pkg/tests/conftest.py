import random
from pathlib import Path

import pytest

from soa_cost_bench._documents import load_graph
from soa_cost_bench.graph import ServiceGraph, ServiceKind, ServiceNode
from soa_cost_bench.metrics import (
    FactorMigration,
    LevelWeightedIntegration,
    MetricSet,
    PowerLawDevelopment,
    TableDiscovery,
    UnitMetric,
    unit_metrics,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
RAILCO_PATH = REPO_ROOT / "service_graphs" / "railco.json"
METRICS_CONFIGS_DIR = REPO_ROOT / "metrics_configs"

BASIC_KINDS = (ServiceKind.AVAILABLE, ServiceKind.MIGRATABLE, ServiceKind.NEW)
TECHNIQUES = ("registry", "semantic_annotation", "qos_matching")
BOX_TYPES = ("black", "grey", "white")


@pytest.fixture
def railco() -> ServiceGraph:
    graph, warnings = load_graph(RAILCO_PATH)
    assert warnings == []
    return graph


@pytest.fixture
def unit() -> MetricSet:
    return unit_metrics()


def _random_attributes(rng: random.Random, kind: ServiceKind) -> dict:
    attributes: dict = {"size_points": rng.randint(0, 6)}
    if kind is ServiceKind.AVAILABLE:
        attributes["discovery_technique"] = rng.choice(TECHNIQUES)
    if kind is ServiceKind.MIGRATABLE:
        attributes["box_type"] = rng.choice(BOX_TYPES)
    if rng.random() < 0.3:
        attributes["interface_cost"] = rng.choice([0, 0.5, 1, 2.25])
    if rng.random() < 0.2:
        attributes["soa_compliant"] = True
    return attributes


def random_graph(seed: int, max_nodes: int = 12, max_children: int = 3) -> ServiceGraph:
    """A valid service DAG: every node reachable from S0, edges only point to later nodes."""
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    combined = {0}
    children: dict[int, list[int]] = {0: []}

    for j in range(1, n):
        parents = [i for i in sorted(combined) if len(children[i]) < max_children]
        if not parents:
            n = j
            break
        children[rng.choice(parents)].append(j)
        children[j] = []
        if j < n - 1 and rng.random() < 0.35:
            combined.add(j)

    # Extra edges create shared services (leaves and, sometimes, whole subtrees).
    for i in sorted(combined):
        for j in range(i + 1, n):
            if j not in children[i] and len(children[i]) < max_children and rng.random() < 0.15:
                children[i].insert(rng.randint(0, len(children[i])), j)

    services = []
    for i in range(n):
        if i in combined and children[i]:
            kind = ServiceKind.COMBINED
            attributes: dict = {}
            if rng.random() < 0.2:
                attributes["interface_cost"] = rng.choice([0, 1, 3])
        else:
            kind = rng.choice(BASIC_KINDS)
            attributes = _random_attributes(rng, kind)
        services.append(
            ServiceNode(
                id=f"S{i}",
                kind=kind,
                children=tuple(f"S{c}" for c in children[i]) if kind is ServiceKind.COMBINED else (),
                attributes=attributes,
            )
        )
    rng.shuffle(services)
    return ServiceGraph(root="S0", services=tuple(services))


def random_unit_scale_metrics(seed: int) -> MetricSet:
    rng = random.Random(seed)
    if rng.random() < 0.5:
        return MetricSet(
            e1=UnitMetric({"unit": rng.choice([0.5, 1, 2]), "re_reference_cost": rng.choice([0, 0, 0.25])}),
            e2=UnitMetric({"unit": rng.choice([1, 1.5, 3])}),
            e3=UnitMetric({"unit": rng.choice([1, 2, 4])}),
            e4=UnitMetric({"unit": rng.choice([0.5, 1, 2])}),
        )
    return MetricSet(
        e1=TableDiscovery({"re_reference_cost": rng.choice([0, 0.125])}),
        e2=FactorMigration(),
        e3=PowerLawDevelopment({"a": rng.choice([1, 2.94]), "b": rng.choice([1, 1.1])}),
        e4=LevelWeightedIntegration(
            {"weight_level_0": rng.choice([1, 2]), "soa_compliance_discount": rng.choice([1, 0.5])}
        ),
    )

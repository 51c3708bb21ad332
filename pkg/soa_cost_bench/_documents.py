"""Graph and metrics-config documents (UTF-8 JSON)."""

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, StrictBool, StrictFloat, StrictInt, StrictStr, ValidationError

from soa_cost_bench._config import MetricsConfig, SlotConfig
from soa_cost_bench.errors import DocumentError
from soa_cost_bench.graph import ServiceGraph, ServiceKind, ServiceNode
from soa_cost_bench.report import canonical_dumps

Scalar = StrictBool | StrictInt | StrictFloat | StrictStr


class _Document(BaseModel):
    # Unknown keys are kept in `model_extra` so strict and lenient loading can report them.
    model_config = ConfigDict(extra="allow", frozen=True, allow_inf_nan=False)

    def unknown_keys(self, where: str) -> list[str]:
        return [f"{where}: unknown key {key!r}" for key in sorted(self.model_extra or {})]


class ServiceDocument(_Document):
    id: StrictStr
    name: StrictStr | None = None
    kind: Literal["available", "migratable", "new", "combined"]
    children: list[StrictStr] = Field(default_factory=list)
    attributes: dict[str, Scalar] = Field(default_factory=dict)


class GraphDocument(_Document):
    root: StrictStr
    services: list[ServiceDocument]

    def all_unknown_keys(self) -> list[str]:
        found = self.unknown_keys("graph")
        for service in self.services:
            found += service.unknown_keys(f"service {service.id!r}")
        return found


class SlotDocument(_Document):
    builtin: StrictStr
    params: dict[str, Scalar] = Field(default_factory=dict)


class MetricsConfigDocument(_Document):
    mode: Literal["cost", "size"]
    e1: SlotDocument
    e2: SlotDocument
    e3: SlotDocument
    e4: SlotDocument

    def all_unknown_keys(self) -> list[str]:
        found = self.unknown_keys("metrics config")
        for slot in ("e1", "e2", "e3", "e4"):
            found += getattr(self, slot).unknown_keys(f"slot {slot}")
        return found


def _reject_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise DocumentError(f"duplicate key {key!r}")
        result[key] = value
    return result


def _reject_non_finite(constant: str) -> Any:
    raise DocumentError(f"non-finite number {constant} is not allowed")


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DocumentError(f"cannot read {str(path)!r}: {e}") from e
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys, parse_constant=_reject_non_finite)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{str(path)!r} is not valid JSON: {e}") from e
    except DocumentError as e:
        raise DocumentError(f"{str(path)!r}: {e}") from e


def _checked_unknown_keys(found: list[str], *, lenient: bool) -> list[str]:
    if found and not lenient:
        raise DocumentError("; ".join(found))
    return found


def parse_graph(data: Any, *, lenient: bool = False) -> tuple[ServiceGraph, list[str]]:
    """Builds a ServiceGraph from a decoded graph document; returns it with any lenient-mode warnings."""
    try:
        document = GraphDocument.model_validate(data)
    except ValidationError as e:
        raise DocumentError(f"invalid graph document: {e}") from e
    warnings = _checked_unknown_keys(document.all_unknown_keys(), lenient=lenient)

    services = tuple(
        ServiceNode(
            id=service.id,
            name=service.name or "",
            kind=ServiceKind(service.kind),
            children=tuple(service.children),
            attributes=service.attributes,
        )
        for service in document.services
    )
    return ServiceGraph(root=document.root, services=services), warnings


def graph_to_document(graph: ServiceGraph) -> dict[str, Any]:
    services = []
    for node in graph.services:
        service: dict[str, Any] = {"id": node.id, "kind": node.kind.value}
        if node.name:
            service["name"] = node.name
        if node.children:
            service["children"] = list(node.children)
        if node.attributes:
            service["attributes"] = dict(node.attributes)
        services.append(service)
    return {"root": graph.root, "services": services}


def dump_graph(graph: ServiceGraph) -> str:
    return canonical_dumps(graph_to_document(graph))


def load_graph(path: str | Path, *, lenient: bool = False) -> tuple[ServiceGraph, list[str]]:
    return parse_graph(read_json(path), lenient=lenient)


def parse_metrics_config(data: Any, *, lenient: bool = False) -> tuple[MetricsConfig, list[str]]:
    try:
        document = MetricsConfigDocument.model_validate(data)
    except ValidationError as e:
        raise DocumentError(f"invalid metrics config document: {e}") from e
    warnings = _checked_unknown_keys(document.all_unknown_keys(), lenient=lenient)

    slots = {
        slot: SlotConfig(builtin=slot_document.builtin, params=dict(slot_document.params))
        for slot, slot_document in (("e1", document.e1), ("e2", document.e2), ("e3", document.e3), ("e4", document.e4))
    }
    return MetricsConfig(mode=document.mode, **slots), warnings  # type: ignore[arg-type]


def load_metrics_config(path: str | Path, *, lenient: bool = False) -> tuple[MetricsConfig, list[str]]:
    return parse_metrics_config(read_json(path), lenient=lenient)

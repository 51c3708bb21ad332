import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from functools import singledispatch
from typing import Any

import pandas as pd

from soa_cost_bench.engine import Breakdown, Category, TraceAction, TraceStep
from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.graph import ServiceId
from soa_cost_bench.metrics import EffortMicros, MeasureMode, format_milli
from soa_cost_bench.metrics._types import as_decimal


@dataclass(frozen=True)
class ChangedItem:
    service_id: ServiceId
    occurrence: int
    category: Category
    base_category: Category | None
    variant_category: Category | None
    base_amount: EffortMicros | None
    variant_amount: EffortMicros | None


@dataclass(frozen=True)
class ScenarioDiff:
    mode: MeasureMode
    base_total: EffortMicros
    variant_total: EffortMicros
    changed_items: tuple[ChangedItem, ...]

    @property
    def delta(self) -> int:
        return self.variant_total - self.base_total


def _amount(amount: int | None, mode: MeasureMode) -> str:
    return "" if amount is None else f"{format_milli(amount)} {mode.unit_label}"


def _money(amount: EffortMicros, rate: Decimal | float) -> str:
    value = Decimal(amount) * as_decimal(rate, what="currency rate") / 1000
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def render_table(breakdown: Breakdown, currency_rate: Decimal | float | None = None) -> str:
    mode = breakdown.mode
    rows: list[dict[str, Any]] = [
        {
            "service": item.service_id,
            "kind": item.kind.value,
            "level": str(item.level),
            "category": item.category.value,
            "amount": item.amount,
        }
        for item in breakdown.line_items
    ]
    rows += [
        {
            "service": f"level {level} integration",
            "kind": "",
            "level": str(level),
            "category": "SUBTOTAL",
            "amount": amount,
        }
        for level, amount in breakdown.per_level_integration.items()
    ]
    rows.append({"service": "TOTAL", "kind": "", "level": "", "category": "", "amount": breakdown.total})

    for row in rows:
        if currency_rate is not None:
            row["cost"] = _money(row["amount"], currency_rate)
        row["amount"] = _amount(row["amount"], mode)
    return pd.DataFrame(rows).to_string(index=False) + "\n"


def render_trace(steps: Sequence[TraceStep], mode: MeasureMode) -> str:
    lines = []
    for step in steps:
        if step.action is TraceAction.SUM:
            lines.append(f"{step.ordinal}. SUM — {step.detail}")
            continue
        amount = "" if step.amount is None else f" [{_amount(step.amount, mode)}]"
        lines.append(f"{step.ordinal}. {step.action.value} {step.subject} — {step.detail}{amount}")
    return "\n".join(lines) + "\n"


def render_diff_table(scenario_diff: ScenarioDiff) -> str:
    mode = scenario_diff.mode
    df = pd.DataFrame(
        [
            {
                "service": item.service_id,
                "base": f"{item.base_category.value if item.base_category else '-'} {_amount(item.base_amount, mode)}",
                "variant": (
                    f"{item.variant_category.value if item.variant_category else '-'} "
                    f"{_amount(item.variant_amount, mode)}"
                ),
            }
            for item in scenario_diff.changed_items
        ],
        columns=["service", "base", "variant"],
    )
    summary = (
        f"base {_amount(scenario_diff.base_total, mode)}, variant {_amount(scenario_diff.variant_total, mode)}, "
        f"delta {_amount(scenario_diff.delta, mode)}\n"
    )
    if df.empty:
        return summary + "no changed items\n"
    return summary + df.to_string(index=False) + "\n"


def _milli_fields(name: str, amount: int | None) -> dict[str, Any]:
    return {f"{name}_milli": amount, name: None if amount is None else format_milli(amount)}


def breakdown_document(breakdown: Breakdown) -> dict[str, Any]:
    return {
        "document": "breakdown",
        "mode": breakdown.mode.value,
        "unit": breakdown.mode.unit_label,
        "line_items": [
            {
                "service_id": item.service_id,
                "kind": item.kind.value,
                "level": item.level,
                "category": item.category.value,
                **_milli_fields("amount", item.amount),
            }
            for item in breakdown.line_items
        ],
        "per_level_integration": [
            {"level": level, **_milli_fields("amount", amount)}
            for level, amount in breakdown.per_level_integration.items()
        ],
        **_milli_fields("total", breakdown.total),
    }


def trace_document(steps: Sequence[TraceStep]) -> dict[str, Any]:
    return {
        "document": "trace",
        "step_count": len(steps),
        "steps": [
            {
                "ordinal": step.ordinal,
                "action": step.action.value,
                "subject": step.subject,
                "detail": step.detail,
                **_milli_fields("amount", step.amount),
            }
            for step in steps
        ],
    }


def diff_document(scenario_diff: ScenarioDiff) -> dict[str, Any]:
    return {
        "document": "diff",
        "mode": scenario_diff.mode.value,
        "unit": scenario_diff.mode.unit_label,
        **_milli_fields("base_total", scenario_diff.base_total),
        **_milli_fields("variant_total", scenario_diff.variant_total),
        **_milli_fields("delta", scenario_diff.delta),
        "changed_items": [
            {
                "service_id": item.service_id,
                "occurrence": item.occurrence,
                "category": item.category.value,
                "base_category": item.base_category.value if item.base_category else None,
                "variant_category": item.variant_category.value if item.variant_category else None,
                **_milli_fields("base_amount", item.base_amount),
                **_milli_fields("variant_amount", item.variant_amount),
            }
            for item in scenario_diff.changed_items
        ],
    }


def canonical_dumps(document: Mapping[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


@singledispatch
def render_json(obj: Any) -> str:
    raise TypeError(f"cannot render {type(obj).__name__} as a report document")


@render_json.register
def _(obj: Breakdown) -> str:
    return canonical_dumps(breakdown_document(obj))


@render_json.register
def _(obj: ScenarioDiff) -> str:
    return canonical_dumps(diff_document(obj))


@render_json.register(list)
@render_json.register(tuple)
def _(obj: Sequence[TraceStep]) -> str:
    return canonical_dumps(trace_document(obj))


@render_json.register(dict)
def _(obj: dict[str, Any]) -> str:
    return canonical_dumps(obj)


def _keyed_frame(breakdown: Breakdown) -> pd.DataFrame:
    # Re-references are keyed by their ordinal among the service's repeats; everything else is occurrence 0.
    repeats: dict[ServiceId, int] = {}
    rows = []
    for item in breakdown.line_items:
        occurrence = 0
        if item.category is Category.RE_REFERENCE:
            repeats[item.service_id] = occurrence = repeats.get(item.service_id, 0) + 1
        rows.append(
            {
                "service_id": item.service_id,
                "occurrence": occurrence,
                "category": item.category.value,
                "amount": item.amount,
            }
        )
    df = pd.DataFrame(rows, columns=["service_id", "occurrence", "category", "amount"])
    return df.astype({"occurrence": "int64", "amount": "Int64", "category": "object"})


def _optional(value: Any) -> Any:
    return None if pd.isna(value) else value


def diff(base: Breakdown, variant: Breakdown) -> ScenarioDiff:
    if base.mode is not variant.mode:
        raise EstimationError(
            ErrorCode.MODE_MISMATCH, f"cannot diff a {base.mode.value} breakdown against a {variant.mode.value} one"
        )

    merged = _keyed_frame(base).merge(
        _keyed_frame(variant),
        on=["service_id", "occurrence"],
        how="outer",
        suffixes=("_base", "_variant"),
        sort=True,
    )

    changed = []
    for row in merged.itertuples(index=False):
        base_category = _optional(row.category_base)
        variant_category = _optional(row.category_variant)
        base_amount = _optional(row.amount_base)
        variant_amount = _optional(row.amount_variant)
        if base_category == variant_category and base_amount == variant_amount:
            continue
        changed.append(
            ChangedItem(
                service_id=row.service_id,
                occurrence=int(row.occurrence),
                category=Category(variant_category if variant_category is not None else base_category),
                base_category=Category(base_category) if base_category is not None else None,
                variant_category=Category(variant_category) if variant_category is not None else None,
                base_amount=int(base_amount) if base_amount is not None else None,
                variant_amount=int(variant_amount) if variant_amount is not None else None,
            )
        )

    return ScenarioDiff(base.mode, base.total, variant.total, tuple(changed))

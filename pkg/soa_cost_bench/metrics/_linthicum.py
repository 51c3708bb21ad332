"""Whole-project flat baseline: data + service + process complexity + enabling technology."""

from decimal import Decimal
from enum import Enum

from typeguard import typechecked

from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.metrics._types import EffortMicros, as_decimal, to_milli


class DataTechnology(Enum):
    RELATIONAL = "relational"
    OBJECT_ORIENTED = "object_oriented"
    ISAM = "isam"


DATA_TECHNOLOGY_TO_FACTOR: dict[DataTechnology, Decimal] = {
    DataTechnology.RELATIONAL: Decimal("0.30"),
    DataTechnology.OBJECT_ORIENTED: Decimal("0.60"),
    DataTechnology.ISAM: Decimal("0.80"),
}


@typechecked
def data_complexity_factor(technology: DataTechnology | str) -> Decimal:
    if isinstance(technology, str):
        try:
            technology = DataTechnology(technology.lower())
        except ValueError:
            raise EstimationError(ErrorCode.UNKNOWN_TECHNOLOGY, f"unknown data technology {technology!r}") from None
    return DATA_TECHNOLOGY_TO_FACTOR[technology]


@typechecked
def linthicum_cost(
    data_cost: EffortMicros,
    service_cost: EffortMicros,
    process_cost: EffortMicros,
    enabling_tech_cost: EffortMicros,
) -> EffortMicros:
    components = (data_cost, service_cost, process_cost, enabling_tech_cost)
    if any(c < 0 for c in components):
        raise EstimationError(ErrorCode.NEGATIVE_INPUT, f"baseline components must be >= 0, got {components}")
    return sum(components)


def data_complexity_cost(technology: DataTechnology | str, base_cost_hours: Decimal | int | float) -> EffortMicros:
    """Data complexity component: technology factor times a base cost in person-hours."""
    return to_milli(data_complexity_factor(technology) * as_decimal(base_cost_hours, what="data base cost"))

from soa_cost_bench._config import MetricsConfig
from soa_cost_bench.errors import ErrorCode, EstimationError

from ._builtins import (
    COCOMO_SHAPED_PRESET,
    FactorMigration,
    LevelWeightedIntegration,
    PowerLawDevelopment,
    ServicePointsSizing,
    TableDiscovery,
    UnitMetric,
    service_points_term,
    size_to_effort,
)
from ._linthicum import DataTechnology, data_complexity_cost, data_complexity_factor, linthicum_cost
from ._types import (
    SLOT_NAMES,
    ChildSummary,
    EffortMicros,
    Estimator,
    EstimatorContext,
    IntegrationEstimator,
    LeafEstimator,
    MeasureMode,
    MetricSet,
    SizePoints,
    format_milli,
    to_milli,
)

BUILTIN_ID_TO_CLASS: dict[str, type[Estimator]] = {
    cls.builtin_id: cls
    for cls in (
        TableDiscovery,
        FactorMigration,
        PowerLawDevelopment,
        LevelWeightedIntegration,
        ServicePointsSizing,
        UnitMetric,
    )
}

BUILTIN_ID_TO_SLOTS: dict[str, frozenset[str]] = {
    TableDiscovery.builtin_id: frozenset({"e1"}),
    FactorMigration.builtin_id: frozenset({"e2"}),
    PowerLawDevelopment.builtin_id: frozenset({"e3"}),
    LevelWeightedIntegration.builtin_id: frozenset({"e4"}),
    ServicePointsSizing.builtin_id: frozenset(SLOT_NAMES),
    UnitMetric.builtin_id: frozenset(SLOT_NAMES),
}

BUILTIN_ID_TO_MODES: dict[str, frozenset[MeasureMode]] = {
    TableDiscovery.builtin_id: frozenset({MeasureMode.COST}),
    FactorMigration.builtin_id: frozenset({MeasureMode.COST}),
    PowerLawDevelopment.builtin_id: frozenset({MeasureMode.COST}),
    LevelWeightedIntegration.builtin_id: frozenset({MeasureMode.COST}),
    ServicePointsSizing.builtin_id: frozenset({MeasureMode.SIZE}),
    UnitMetric.builtin_id: frozenset({MeasureMode.COST, MeasureMode.SIZE}),
}


def resolve_slot(slot: str, builtin: str, params: dict, mode: MeasureMode) -> Estimator:
    if builtin not in BUILTIN_ID_TO_CLASS:
        raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"slot {slot}: unknown built-in {builtin!r}")
    if slot not in BUILTIN_ID_TO_SLOTS[builtin]:
        raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"slot {slot}: built-in {builtin!r} cannot fill this slot")
    if mode not in BUILTIN_ID_TO_MODES[builtin]:
        raise EstimationError(
            ErrorCode.SLOT_RESOLUTION, f"slot {slot}: built-in {builtin!r} is not available in {mode.value} mode"
        )
    try:
        return BUILTIN_ID_TO_CLASS[builtin].from_params(params)
    except EstimationError as e:
        raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"slot {slot}: {e}") from e


def metric_set_from_config(config: MetricsConfig) -> MetricSet:
    estimators = {
        slot: resolve_slot(slot, slot_config.builtin, slot_config.params, config.mode)
        for slot, slot_config in config.slots().items()
    }
    return MetricSet(mode=config.mode, **estimators)  # type: ignore[arg-type]


def unit_metrics(mode: MeasureMode = MeasureMode.COST) -> MetricSet:
    """One person-hour per first-encounter leaf and per integrated child; repeats cost nothing."""
    unit = UnitMetric()
    return MetricSet(e1=unit, e2=unit, e3=unit, e4=unit, mode=mode)


__all__ = [
    "BUILTIN_ID_TO_CLASS",
    "BUILTIN_ID_TO_MODES",
    "BUILTIN_ID_TO_SLOTS",
    "COCOMO_SHAPED_PRESET",
    "SLOT_NAMES",
    "ChildSummary",
    "DataTechnology",
    "EffortMicros",
    "Estimator",
    "EstimatorContext",
    "FactorMigration",
    "IntegrationEstimator",
    "LeafEstimator",
    "LevelWeightedIntegration",
    "MeasureMode",
    "MetricSet",
    "PowerLawDevelopment",
    "ServicePointsSizing",
    "SizePoints",
    "TableDiscovery",
    "UnitMetric",
    "data_complexity_cost",
    "data_complexity_factor",
    "format_milli",
    "linthicum_cost",
    "metric_set_from_config",
    "resolve_slot",
    "service_points_term",
    "size_to_effort",
    "to_milli",
    "unit_metrics",
]

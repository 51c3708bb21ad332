from collections.abc import Mapping, Sequence
from decimal import Decimal
from itertools import combinations
from math import prod

from typeguard import typechecked
from typing_extensions import Self, override

from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.graph import AttributeValue, Level
from soa_cost_bench.metrics._types import (
    ChildSummary,
    EffortMicros,
    EstimatorContext,
    IntegrationEstimator,
    LeafEstimator,
    SizePoints,
    as_decimal,
    to_milli,
)

COCOMO_SHAPED_PRESET: Mapping[str, float] = {"a": 2.94, "b": 1.1}
POWER_LAW_PRESETS: Mapping[str, Mapping[str, float]] = {"cocomo-shaped": COCOMO_SHAPED_PRESET}

ESB_INTEGRATION = "esb"
POINT_TO_POINT_INTEGRATION = "point-to-point"
INTEGRATION_STRATEGIES = (ESB_INTEGRATION, POINT_TO_POINT_INTEGRATION)


@typechecked
def service_points_term(
    infrastructure_factor: Decimal | int | float,
    service_size: Decimal | int | float,
) -> SizePoints:
    """One term of the service points sum: infrastructure factor times service size."""
    factor = as_decimal(infrastructure_factor, what="infrastructure factor")
    size = as_decimal(service_size, what="service size")
    if factor < 0 or size < 0:
        raise EstimationError(ErrorCode.NEGATIVE_INPUT, f"service points inputs must be >= 0, got ({factor}, {size})")
    return to_milli(factor * size)


def power_law(a: Decimal, b: Decimal, size: Decimal, multipliers: Sequence[Decimal] = ()) -> Decimal:
    if size == 0:
        return Decimal(0)
    return a * size**b * prod(multipliers, start=Decimal(1))


@typechecked
def size_to_effort(size: SizePoints, a: Decimal | int | float = 1.0, b: Decimal | int | float = 1.0) -> EffortMicros:
    """Converts a sizing total (milli-points) into effort with the power-law shape."""
    if size < 0:
        raise EstimationError(ErrorCode.NEGATIVE_INPUT, f"size must be >= 0, got {size}")
    coefficient = as_decimal(a, what="a")
    if coefficient < 0:
        raise EstimationError(ErrorCode.NEGATIVE_INPUT, f"effort coefficient a must be >= 0, got {coefficient}")
    points = Decimal(size) / 1000
    return to_milli(power_law(coefficient, as_decimal(b, what="b"), points))


def _size_points(ctx: EstimatorContext) -> Decimal:
    size = ctx.numeric_attribute("size_points", 0)
    if size < 0:
        raise EstimationError(ErrorCode.NEGATIVE_SIZE, f"size_points must be >= 0, got {size}", service_id=ctx.node.id)
    return size


class TableDiscovery(LeafEstimator):
    """Discovery effort looked up by the service's `discovery_technique` attribute.

    Any extra param is an additional technique entry and must be a non-negative number (person-hours).
    """

    builtin_id = "table-discovery"
    param_defaults = {
        "registry": 1.0,
        "semantic_annotation": 4.0,
        "qos_matching": 6.0,
        "re_reference_cost": 0.0,
    }

    @classmethod
    @override
    def from_params(cls, params: Mapping[str, AttributeValue] | None = None) -> Self:
        for key, value in (params or {}).items():
            if isinstance(value, bool) or not isinstance(value, int | float) or not value >= 0:
                raise EstimationError(
                    ErrorCode.SLOT_RESOLUTION,
                    f"{cls.builtin_id!r} param {key!r} must be a non-negative number of person-hours, got {value!r}",
                )
        return cls(params)

    @override
    def estimate(self, ctx: EstimatorContext) -> EffortMicros:
        if ctx.repeat_encounter:
            return to_milli(self.param("re_reference_cost"))

        technique = ctx.node.attribute("discovery_technique", "registry")
        if not isinstance(technique, str) or technique == "re_reference_cost" or technique not in self.params:
            raise EstimationError(
                ErrorCode.UNKNOWN_TECHNIQUE, f"no discovery cost for technique {technique!r}", service_id=ctx.node.id
            )
        return to_milli(self.param(technique))


class FactorMigration(LeafEstimator):
    """Migration effort: size points times a per-box-type factor (person-hours per point)."""

    builtin_id = "factor-migration"
    param_defaults = {"black": 0.2, "grey": 0.5, "white": 0.8}

    @override
    def estimate(self, ctx: EstimatorContext) -> EffortMicros:
        size = _size_points(ctx)

        box_type = ctx.node.attribute("box_type", "grey")
        if box_type not in ("black", "grey", "white"):
            raise EstimationError(ErrorCode.UNKNOWN_BOX_TYPE, f"unknown box_type {box_type!r}", service_id=ctx.node.id)
        return to_milli(size * self.param(box_type))


class PowerLawDevelopment(LeafEstimator):
    """Development effort a * size^b * product(multipliers).

    Multipliers come from `multiplier_*` params and `multiplier_*` node attributes.
    """

    builtin_id = "power-law"
    param_defaults = {"a": 1.0, "b": 1.0}
    param_prefixes = ("multiplier_",)

    @classmethod
    @override
    def from_params(cls, params: Mapping[str, AttributeValue] | None = None) -> Self:
        params = dict(params or {})
        preset = params.pop("preset", None)
        if preset is not None:
            if preset not in POWER_LAW_PRESETS:
                raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"unknown power-law preset {preset!r}")
            params = {**POWER_LAW_PRESETS[str(preset)], **params}
        return super().from_params(params)

    @override
    def estimate(self, ctx: EstimatorContext) -> EffortMicros:
        size = _size_points(ctx)

        multipliers = [self.param(name) for name in self.prefixed_params("multiplier_")]
        multipliers += [
            ctx.numeric_attribute(name, 1)
            for name in sorted(ctx.node.attributes)
            if name.startswith("multiplier_")
        ]
        if any(m < 0 for m in multipliers):
            raise EstimationError(
                ErrorCode.NEGATIVE_MULTIPLIER, "effort multipliers must be >= 0", service_id=ctx.node.id
            )

        return to_milli(power_law(self.param("a"), self.param("b"), size, multipliers))


class LevelWeightedIntegration(IntegrationEstimator):
    """Integration effort w(level) * discount * interface work.

    With the `esb` strategy every child is wired once to the bus, so the interface work is the
    sum of the per-child interface costs. With `point-to-point` every pair of children gets its
    own link, priced at the mean of the two interface costs.

    The compliance discount applies only when every child is marked `soa_compliant`.
    """

    builtin_id = "level-weighted-integration"
    param_defaults = {
        "default_weight": 1.0,
        "default_interface_cost": 1.0,
        "soa_compliance_discount": 1.0,
        "integration_strategy": ESB_INTEGRATION,
    }
    param_prefixes = ("weight_level_",)

    @classmethod
    @override
    def from_params(cls, params: Mapping[str, AttributeValue] | None = None) -> Self:
        strategy = (params or {}).get("integration_strategy", ESB_INTEGRATION)
        if strategy not in INTEGRATION_STRATEGIES:
            raise EstimationError(
                ErrorCode.SLOT_RESOLUTION,
                f"unknown integration_strategy {strategy!r}, expected one of {', '.join(INTEGRATION_STRATEGIES)}",
            )
        return super().from_params(params)

    @property
    def strategy(self) -> str:
        return str(self.params["integration_strategy"])

    def weight(self, level: Level) -> Decimal:
        key = f"weight_level_{level}"
        return self.param(key) if key in self.params else self.param("default_weight")

    def interface_work(self, interface_costs: Sequence[Decimal]) -> Decimal:
        if self.strategy == ESB_INTEGRATION:
            return sum(interface_costs, start=Decimal(0))
        if self.strategy == POINT_TO_POINT_INTEGRATION:
            return sum(((a + b) / 2 for a, b in combinations(interface_costs, 2)), start=Decimal(0))
        raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"unknown integration_strategy {self.strategy!r}")

    @override
    def integrate(self, children: Sequence[ChildSummary], level: Level) -> EffortMicros:
        if not children:
            raise EstimationError(ErrorCode.EMPTY_CHILDREN, "integration needs at least one component service")

        interface_costs = []
        for child in children:
            cost = (
                self.param("default_interface_cost")
                if child.interface_cost_attr is None
                else as_decimal(child.interface_cost_attr, what="attribute 'interface_cost'", service_id=child.child_id)
            )
            if cost < 0:
                raise EstimationError(
                    ErrorCode.NEGATIVE_INPUT, "interface_cost must be >= 0", service_id=child.child_id
                )
            interface_costs.append(cost)

        discount = Decimal(1)
        if all(child.soa_compliant for child in children):
            discount = self.param("soa_compliance_discount")
        return to_milli(self.weight(level) * discount * self.interface_work(interface_costs))


class ServicePointsSizing(LeafEstimator, IntegrationEstimator):
    """Service points sizing: infrastructure factor times the service's `size_points`.

    Used in every slot of a size-mode metric set; integration adds no size unless
    `integration_points_per_child` is configured.
    """

    builtin_id = "service-points"
    param_defaults = {
        "default_infrastructure_factor": 1.0,
        "re_reference_cost": 0.0,
        "integration_points_per_child": 0.0,
    }

    @override
    def estimate(self, ctx: EstimatorContext) -> SizePoints:
        if ctx.repeat_encounter:
            return to_milli(self.param("re_reference_cost"))
        factor = ctx.numeric_attribute("infrastructure_factor", self.param("default_infrastructure_factor"))
        size = ctx.numeric_attribute("size_points", 0)
        if factor < 0 or size < 0:
            raise EstimationError(ErrorCode.NEGATIVE_SIZE, "service points inputs must be >= 0", service_id=ctx.node.id)
        return service_points_term(factor, size)

    @override
    def integrate(self, children: Sequence[ChildSummary], level: Level) -> SizePoints:
        if not children:
            raise EstimationError(ErrorCode.EMPTY_CHILDREN, "integration needs at least one component service")
        return to_milli(self.param("integration_points_per_child") * len(children))


class UnitMetric(LeafEstimator, IntegrationEstimator):
    """`unit` per first-encounter leaf, `unit` per child when integrating, repeats at `re_reference_cost`."""

    builtin_id = "unit"
    param_defaults = {"unit": 1.0, "re_reference_cost": 0.0}

    @override
    def estimate(self, ctx: EstimatorContext) -> EffortMicros:
        if ctx.repeat_encounter:
            return to_milli(self.param("re_reference_cost"))
        return to_milli(self.param("unit"))

    @override
    def integrate(self, children: Sequence[ChildSummary], level: Level) -> EffortMicros:
        if not children:
            raise EstimationError(ErrorCode.EMPTY_CHILDREN, "integration needs at least one component service")
        return to_milli(self.param("unit") * len(children))

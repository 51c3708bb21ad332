from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from enum import Enum
from types import MappingProxyType
from typing import Any, ClassVar

from typing_extensions import Self

from soa_cost_bench.errors import ErrorCode, EstimationError
from soa_cost_bench.graph import AttributeValue, Level, ServiceId, ServiceKind, ServiceNode

# Integer milli-units: 1 == 0.001 person-hour (or 0.001 size point).
EffortMicros = int
SizePoints = int

MILLI = Decimal(1000)
SLOT_NAMES = ("e1", "e2", "e3", "e4")


class MeasureMode(Enum):
    COST = "cost"
    SIZE = "size"

    @property
    def unit_label(self) -> str:
        return "PH" if self is MeasureMode.COST else "pts"


def as_decimal(value: Any, *, what: str, service_id: ServiceId | None = None) -> Decimal:
    if isinstance(value, bool) or not isinstance(value, Decimal | int | float):
        raise EstimationError(
            ErrorCode.INVALID_ATTRIBUTE, f"{what} must be a number, got {value!r}", service_id=service_id
        )
    number = value if isinstance(value, Decimal) else Decimal(str(value))
    if not number.is_finite():
        raise EstimationError(
            ErrorCode.INVALID_ATTRIBUTE, f"{what} must be a finite number, got {value!r}", service_id=service_id
        )
    return number


def to_milli(value: Decimal | int | float) -> int:
    """Rounds a whole-unit quantity half-even to integer milli-units."""
    scaled = as_decimal(value, what="amount") * MILLI
    return int(scaled.quantize(Decimal(1), rounding=ROUND_HALF_EVEN))


def format_milli(amount: int) -> str:
    sign = "-" if amount < 0 else ""
    whole, frac = divmod(abs(amount), 1000)
    return f"{sign}{whole}.{frac:03d}"


@dataclass(frozen=True)
class EstimatorContext:
    node: ServiceNode
    level: Level
    repeat_encounter: bool
    measure_mode: MeasureMode

    def numeric_attribute(self, name: str, default: Decimal | int | float) -> Decimal:
        value = self.node.attribute(name, default)
        return as_decimal(value, what=f"attribute {name!r}", service_id=self.node.id)


@dataclass(frozen=True)
class ChildSummary:
    child_id: ServiceId
    child_kind: ServiceKind
    child_subtotal: EffortMicros
    interface_cost_attr: AttributeValue | None = None
    soa_compliant: bool = False


class Estimator(ABC):
    """A metric implementation bound to its parameters.

    Subclasses declare `builtin_id` and `param_defaults`; params arrive as a flat scalar map.
    Keys starting with one of `param_prefixes` are accepted on top of the defaults.
    """

    builtin_id: ClassVar[str]
    param_defaults: ClassVar[Mapping[str, AttributeValue]] = {}
    param_prefixes: ClassVar[tuple[str, ...]] = ()

    def __init__(self, params: Mapping[str, AttributeValue] | None = None):
        self.params: Mapping[str, AttributeValue] = MappingProxyType({**self.param_defaults, **(params or {})})

    @classmethod
    def from_params(cls, params: Mapping[str, AttributeValue] | None = None) -> Self:
        for key in params or {}:
            if key not in cls.param_defaults and not any(key.startswith(p) for p in cls.param_prefixes):
                raise EstimationError(ErrorCode.SLOT_RESOLUTION, f"{cls.builtin_id!r} does not accept param {key!r}")
        return cls(params)

    def param(self, name: str) -> Decimal:
        return as_decimal(self.params[name], what=f"{self.builtin_id} param {name!r}")

    def prefixed_params(self, prefix: str) -> dict[str, AttributeValue]:
        return {k: v for k, v in sorted(self.params.items()) if k.startswith(prefix)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Estimator):
            return NotImplemented
        return type(self) is type(other) and dict(self.params) == dict(other.params)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({dict(self.params)!r})"


class LeafEstimator(Estimator):
    @abstractmethod
    def estimate(self, ctx: EstimatorContext) -> EffortMicros:
        pass


class IntegrationEstimator(Estimator):
    @abstractmethod
    def integrate(self, children: Sequence[ChildSummary], level: Level) -> EffortMicros:
        pass


@dataclass(frozen=True)
class MetricSet:
    """The four estimator slots plus the measure mode.

    Amounts are EffortMicros in COST mode and SizePoints in SIZE mode.
    """

    e1: LeafEstimator
    e2: LeafEstimator
    e3: LeafEstimator
    e4: IntegrationEstimator
    mode: MeasureMode = MeasureMode.COST

    def __post_init__(self) -> None:
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", MeasureMode(self.mode))

    @property
    def parameters(self) -> dict[str, Mapping[str, AttributeValue]]:
        return {slot: getattr(self, slot).params for slot in SLOT_NAMES}

    def estimate_discovery(self, ctx: EstimatorContext) -> EffortMicros:
        return self.e1.estimate(ctx)

    def estimate_migration(self, ctx: EstimatorContext) -> EffortMicros:
        return self.e2.estimate(ctx)

    def estimate_development(self, ctx: EstimatorContext) -> EffortMicros:
        return self.e3.estimate(ctx)

    def estimate_integration(self, children: Sequence[ChildSummary], level: Level) -> EffortMicros:
        return self.e4.integrate(children, level)

    def estimate_leaf(self, ctx: EstimatorContext) -> EffortMicros:
        # Re-references of any kind go to discovery with the repeat flag set.
        if ctx.repeat_encounter or ctx.node.kind is ServiceKind.AVAILABLE:
            return self.estimate_discovery(ctx)
        if ctx.node.kind is ServiceKind.MIGRATABLE:
            return self.estimate_migration(ctx)
        if ctx.node.kind is ServiceKind.NEW:
            return self.estimate_development(ctx)
        raise EstimationError(
            ErrorCode.NOT_COMBINED, "combined services are priced by integration only", service_id=ctx.node.id
        )

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from soa_cost_bench.metrics import MeasureMode


@dataclass(frozen=True)
class SlotConfig:
    builtin: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricsConfig:
    mode: "MeasureMode"
    e1: SlotConfig
    e2: SlotConfig
    e3: SlotConfig
    e4: SlotConfig

    def __post_init__(self) -> None:
        from soa_cost_bench.metrics import MeasureMode

        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", MeasureMode(self.mode))

    def slots(self) -> dict[str, SlotConfig]:
        return {"e1": self.e1, "e2": self.e2, "e3": self.e3, "e4": self.e4}

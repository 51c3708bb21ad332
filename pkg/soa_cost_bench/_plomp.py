import os
import sys
from collections.abc import Sequence

# Ignore plomp import type error
import plomp  # type: ignore

from soa_cost_bench.engine import TraceAction, TraceStep
from soa_cost_bench.metrics import MeasureMode
from soa_cost_bench.report import render_trace


def record_trace(steps: Sequence[TraceStep], mode: MeasureMode, *, buffer: "plomp.PlompBuffer | None" = None) -> None:
    buffer = buffer if buffer is not None else plomp.buffer()
    for step, line in zip(steps, render_trace(steps, mode).splitlines()):
        plomp.record_event(
            {
                "plomp_display_event_type": f"{step.action.value}_STEP",
                "plomp_display_text": line,
                "ordinal": step.ordinal,
                "subject": step.subject,
                "amount_milli": step.amount,
            },
            tags={
                "action": step.action.value,
                "mode": mode.value,
                **({"service": step.subject} if step.subject is not None else {}),
                **({"total": True} if step.action is TraceAction.SUM else {}),
            },
            buffer=buffer,
        )


def write_trace(output_dir: str, *, buffer: "plomp.PlompBuffer | None" = None) -> None:
    buffer = buffer if buffer is not None else plomp.buffer()
    os.makedirs(output_dir, exist_ok=True)
    sys.stderr.write(f"Writing to: {os.path.abspath(output_dir)} \n")
    sys.stderr.flush()
    plomp.write_html(buffer, os.path.join(output_dir, "plomp.html"))
    plomp.write_json(buffer, os.path.join(output_dir, "plomp.json"))

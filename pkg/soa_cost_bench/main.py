import argparse
import sys
from collections.abc import Callable

from soa_cost_bench import report
from soa_cost_bench._documents import load_graph, load_metrics_config
from soa_cost_bench._plomp import record_trace, write_trace
from soa_cost_bench.engine import estimate, trace
from soa_cost_bench.errors import DocumentError, ErrorCode, EstimationError
from soa_cost_bench.graph import ServiceGraph, validate
from soa_cost_bench.metrics import (
    DataTechnology,
    MeasureMode,
    MetricSet,
    data_complexity_cost,
    format_milli,
    linthicum_cost,
    metric_set_from_config,
    size_to_effort,
    to_milli,
)

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_IO_ERROR = 2


def _diagnostic(message: str) -> None:
    sys.stderr.write(f"{message}\n")
    sys.stderr.flush()


def _add_graph_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--lenient",
        action="store_true",
        help="Accept unknown document keys and report them as warnings",
    )


def _add_estimation_flags(parser: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    _add_graph_flags(parser)
    parser.add_argument("--metrics", type=str, required=True, help="Path to the metrics config document")
    parser.add_argument("--format", choices=formats, default=formats[0], help="Output format")
    parser.add_argument("--workers", type=int, default=1, help="Worker threads for independent estimates")


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="soa-cost",
        description="Divide-and-conquer cost and size estimation for service-oriented systems",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    validate_parser = commands.add_parser("validate", help="Check a service graph document")
    validate_parser.add_argument("graph", type=str, help="Path to the service graph document")
    _add_graph_flags(validate_parser)

    estimate_parser = commands.add_parser("estimate", help="Estimate effort (or size) of a service graph")
    estimate_parser.add_argument("graph", type=str, help="Path to the service graph document")
    _add_estimation_flags(estimate_parser, ("table", "json"))
    estimate_parser.add_argument("--rate", type=float, help="Currency per person-hour for a cost column")

    size_parser = commands.add_parser("size", help="Estimate with a size-mode metrics config")
    size_parser.add_argument("graph", type=str, help="Path to the service graph document")
    _add_estimation_flags(size_parser, ("table", "json"))
    size_parser.add_argument("--effort-a", type=float, help="Convert the size total to effort: coefficient a")
    size_parser.add_argument("--effort-b", type=float, help="Convert the size total to effort: exponent b")

    explain_parser = commands.add_parser("explain", help="Print the numbered estimation procedure")
    explain_parser.add_argument("graph", type=str, help="Path to the service graph document")
    _add_estimation_flags(explain_parser, ("text", "json"))
    explain_parser.add_argument("--output-dir", type=str, help="Write plomp.html/plomp.json of the trace here")

    diff_parser = commands.add_parser("diff", help="Compare two scenarios under one metrics config")
    diff_parser.add_argument("base_graph", type=str, help="Path to the base service graph document")
    diff_parser.add_argument("variant_graph", type=str, help="Path to the variant service graph document")
    _add_estimation_flags(diff_parser, ("table", "json"))

    baseline_parser = commands.add_parser("baseline", help="Whole-project flat baseline from four cost components")
    baseline_parser.add_argument(
        "--data-technology",
        choices=[t.value for t in DataTechnology],
        required=True,
        help="Data storage technology driving the data complexity factor",
    )
    baseline_parser.add_argument("--data-base-cost", type=float, required=True, help="Data base cost (PH)")
    baseline_parser.add_argument("--service-cost", type=float, default=0.0, help="Service complexity cost (PH)")
    baseline_parser.add_argument("--process-cost", type=float, default=0.0, help="Process complexity cost (PH)")
    baseline_parser.add_argument(
        "--enabling-tech-cost", type=float, default=0.0, help="Enabling technology solution cost (PH)"
    )
    baseline_parser.add_argument("--format", choices=("table", "json"), default="table", help="Output format")

    return parser.parse_args(argv)


def _load_valid_graph(path: str, *, lenient: bool) -> ServiceGraph | None:
    graph, warnings = load_graph(path, lenient=lenient)
    for warning in warnings:
        _diagnostic(f"warning {warning}")

    validation = validate(graph)
    for issue in validation.issues:
        _diagnostic(str(issue))
    return graph if validation.ok else None


def _load_metrics(path: str, *, lenient: bool) -> MetricSet:
    config, warnings = load_metrics_config(path, lenient=lenient)
    for warning in warnings:
        _diagnostic(f"warning {warning}")
    return metric_set_from_config(config)


def cmd_validate(args: argparse.Namespace) -> int:
    graph = _load_valid_graph(args.graph, lenient=args.lenient)
    return EXIT_OK if graph is not None else EXIT_DOMAIN_ERROR


def cmd_estimate(args: argparse.Namespace) -> int:
    graph = _load_valid_graph(args.graph, lenient=args.lenient)
    if graph is None:
        return EXIT_DOMAIN_ERROR
    metrics = _load_metrics(args.metrics, lenient=args.lenient)

    breakdown = estimate(graph, metrics, workers=args.workers)
    if args.format == "json":
        sys.stdout.write(report.render_json(breakdown))
    else:
        sys.stdout.write(report.render_table(breakdown, args.rate))
    return EXIT_OK


def cmd_size(args: argparse.Namespace) -> int:
    graph = _load_valid_graph(args.graph, lenient=args.lenient)
    if graph is None:
        return EXIT_DOMAIN_ERROR
    metrics = _load_metrics(args.metrics, lenient=args.lenient)
    if metrics.mode is not MeasureMode.SIZE:
        raise EstimationError(ErrorCode.MODE_MISMATCH, "the size command needs a size-mode metrics config")

    breakdown = estimate(graph, metrics, workers=args.workers)
    if args.effort_a is None and args.effort_b is None:
        sys.stdout.write(
            report.render_json(breakdown) if args.format == "json" else report.render_table(breakdown)
        )
        return EXIT_OK

    a = args.effort_a if args.effort_a is not None else 1.0
    b = args.effort_b if args.effort_b is not None else 1.0
    effort = size_to_effort(breakdown.total, a, b)
    if args.format == "json":
        document = report.breakdown_document(breakdown)
        document.update({"effort_milli": effort, "effort": format_milli(effort), "effort_model": {"a": a, "b": b}})
        sys.stdout.write(report.render_json(document))
    else:
        sys.stdout.write(report.render_table(breakdown))
        sys.stdout.write(f"effort {format_milli(effort)} PH (a={a}, b={b})\n")
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    graph = _load_valid_graph(args.graph, lenient=args.lenient)
    if graph is None:
        return EXIT_DOMAIN_ERROR
    metrics = _load_metrics(args.metrics, lenient=args.lenient)

    steps = trace(graph, metrics, workers=args.workers)
    if args.output_dir:
        record_trace(steps, metrics.mode)
        write_trace(args.output_dir)

    if args.format == "json":
        sys.stdout.write(report.render_json(steps))
    else:
        sys.stdout.write(report.render_trace(steps, metrics.mode))
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    base_graph = _load_valid_graph(args.base_graph, lenient=args.lenient)
    variant_graph = _load_valid_graph(args.variant_graph, lenient=args.lenient)
    if base_graph is None or variant_graph is None:
        return EXIT_DOMAIN_ERROR
    metrics = _load_metrics(args.metrics, lenient=args.lenient)

    scenario_diff = report.diff(
        estimate(base_graph, metrics, workers=args.workers),
        estimate(variant_graph, metrics, workers=args.workers),
    )
    if args.format == "json":
        sys.stdout.write(report.render_json(scenario_diff))
    else:
        sys.stdout.write(report.render_diff_table(scenario_diff))
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    components = {
        "data": data_complexity_cost(args.data_technology, args.data_base_cost),
        "service": to_milli(args.service_cost),
        "process": to_milli(args.process_cost),
        "enabling_technology": to_milli(args.enabling_tech_cost),
    }
    total = linthicum_cost(
        components["data"], components["service"], components["process"], components["enabling_technology"]
    )

    if args.format == "json":
        document = {
            "document": "baseline",
            "data_technology": args.data_technology,
            "components": {name: {"amount_milli": v, "amount": format_milli(v)} for name, v in components.items()},
            "total_milli": total,
            "total": format_milli(total),
        }
        sys.stdout.write(report.render_json(document))
    else:
        for name, amount in components.items():
            sys.stdout.write(f"{name:<20} {format_milli(amount):>12} PH\n")
        sys.stdout.write(f"{'TOTAL':<20} {format_milli(total):>12} PH\n")
    return EXIT_OK


COMMAND_TO_HANDLER: dict[str, Callable[[argparse.Namespace], int]] = {
    "validate": cmd_validate,
    "estimate": cmd_estimate,
    "size": cmd_size,
    "explain": cmd_explain,
    "diff": cmd_diff,
    "baseline": cmd_baseline,
}


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        return COMMAND_TO_HANDLER[args.command](args)
    except DocumentError as e:
        _diagnostic(f"error {e}")
        return EXIT_IO_ERROR
    except EstimationError as e:
        _diagnostic(f"error {e}")
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())

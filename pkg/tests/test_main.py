import json

import pytest

from conftest import METRICS_CONFIGS_DIR, RAILCO_PATH
from soa_cost_bench._documents import graph_to_document
from soa_cost_bench.main import EXIT_DOMAIN_ERROR, EXIT_IO_ERROR, EXIT_OK, main
from soa_cost_bench.metrics import size_to_effort

UNIT = str(METRICS_CONFIGS_DIR / "unit.json")
SIZE = str(METRICS_CONFIGS_DIR / "size.json")
DEFAULT = str(METRICS_CONFIGS_DIR / "default.json")
RAILCO = str(RAILCO_PATH)


def _write(tmp_path, name: str, document: dict) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def _cycle_graph(tmp_path) -> str:
    return _write(
        tmp_path,
        "cycle.json",
        {
            "root": "R",
            "services": [
                {"id": "R", "kind": "combined", "children": ["A", "L"]},
                {"id": "A", "kind": "combined", "children": ["B"]},
                {"id": "B", "kind": "combined", "children": ["A"]},
                {"id": "L", "kind": "new"},
            ],
        },
    )


def test_validate_railco(capsys):
    assert main(["validate", RAILCO]) == EXIT_OK
    assert capsys.readouterr().err == ""


def test_validate_reports_cycles(tmp_path, capsys):
    assert main(["validate", _cycle_graph(tmp_path)]) == EXIT_DOMAIN_ERROR
    assert "error CYCLE A: cycle A -> B -> A" in capsys.readouterr().err


@pytest.mark.parametrize(
    "document, code",
    [
        ({"root": "Nope", "services": [{"id": "A", "kind": "new"}]}, "MISSING_ROOT"),
        (
            {
                "root": "R",
                "services": [{"id": "R", "kind": "combined", "children": ["A", "Ghost"]}, {"id": "A", "kind": "new"}],
            },
            "DANGLING_CHILD",
        ),
    ],
)
def test_validate_reports_named_diagnostics(tmp_path, capsys, document, code):
    assert main(["validate", _write(tmp_path, "graph.json", document)]) == EXIT_DOMAIN_ERROR
    assert f"error {code}" in capsys.readouterr().err


def test_validate_prints_warnings_but_succeeds(tmp_path, capsys):
    document = {
        "root": "R",
        "services": [{"id": "R", "kind": "combined", "children": ["A"]}, {"id": "A", "kind": "new"}],
    }
    assert main(["validate", _write(tmp_path, "graph.json", document)]) == EXIT_OK
    assert "warning SINGLE_CHILD R" in capsys.readouterr().err


def test_validate_missing_file(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "missing.json")]) == EXIT_IO_ERROR
    assert capsys.readouterr().err.startswith("error cannot read")


def test_validate_strict_and_lenient(tmp_path, capsys):
    document = json.loads(RAILCO_PATH.read_text(encoding="utf-8"))
    document["owner"] = "ops"
    path = _write(tmp_path, "graph.json", document)
    assert main(["validate", path]) == EXIT_IO_ERROR
    assert main(["validate", path, "--lenient"]) == EXIT_OK
    assert "warning graph: unknown key 'owner'" in capsys.readouterr().err


def test_estimate_json(capsys):
    assert main(["estimate", RAILCO, "--metrics", UNIT, "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["total_milli"] == 12000
    assert document["unit"] == "PH"


def test_estimate_table_with_rate(capsys):
    assert main(["estimate", RAILCO, "--metrics", UNIT, "--rate", "100"]) == EXIT_OK
    last = capsys.readouterr().out.splitlines()[-1]
    assert "12.000 PH" in last
    assert last.rstrip().endswith("1200.00")


def test_estimate_default_metrics(capsys):
    assert main(["estimate", RAILCO, "--metrics", DEFAULT, "--format", "json", "--workers", "4"]) == EXIT_OK
    # registry 1 + grey 2 x 0.5 + two new services of 2 points + 4 + 2 + 2 interfaces.
    assert json.loads(capsys.readouterr().out)["total_milli"] == 14000


def test_estimate_size_mode(capsys):
    assert main(["estimate", RAILCO, "--metrics", SIZE, "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["total_milli"] == 8000
    assert document["unit"] == "pts"


def test_estimate_with_size_only_builtin_in_cost_mode(tmp_path, capsys):
    slot = {"builtin": "service-points", "params": {}}
    config = _write(tmp_path, "metrics.json", {"mode": "cost", "e1": slot, "e2": slot, "e3": slot, "e4": slot})
    assert main(["estimate", RAILCO, "--metrics", config]) == EXIT_DOMAIN_ERROR
    captured = capsys.readouterr()
    assert "SLOT_RESOLUTION" in captured.err
    assert captured.out == ""


def test_estimate_negative_input_is_a_domain_error(tmp_path, capsys):
    document = json.loads(RAILCO_PATH.read_text(encoding="utf-8"))
    document["services"][4]["attributes"]["size_points"] = -3
    assert main(["estimate", _write(tmp_path, "graph.json", document), "--metrics", DEFAULT]) == EXIT_DOMAIN_ERROR
    assert "NEGATIVE_SIZE (LegacySystem)" in capsys.readouterr().err


def test_size_command(capsys):
    argv = ["size", RAILCO, "--metrics", SIZE, "--format", "json", "--effort-a", "2.94", "--effort-b", "1.1"]
    assert main(argv) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["total_milli"] == 8000
    assert document["effort_milli"] == size_to_effort(8000, 2.94, 1.1)
    assert document["effort_model"] == {"a": 2.94, "b": 1.1}


def test_size_command_table(capsys):
    assert main(["size", RAILCO, "--metrics", SIZE, "--effort-a", "1"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "effort 8.000 PH (a=1.0, b=1.0)"


def test_size_command_requires_size_mode(capsys):
    assert main(["size", RAILCO, "--metrics", UNIT]) == EXIT_DOMAIN_ERROR
    assert "MODE_MISMATCH" in capsys.readouterr().err


def test_explain(capsys):
    assert main(["explain", RAILCO, "--metrics", UNIT]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 13
    assert lines[-1].endswith("SUM — total 12.000 PH")
    assert lines[7].startswith("8. DIVIDE POProcessing")


def test_explain_json(capsys):
    assert main(["explain", RAILCO, "--metrics", UNIT, "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["step_count"] == 13


def test_explain_writes_plomp_output(tmp_path, capsys):
    output_dir = tmp_path / "trace"
    assert main(["explain", RAILCO, "--metrics", UNIT, "--output-dir", str(output_dir)]) == EXIT_OK
    assert (output_dir / "plomp.html").exists()
    assert (output_dir / "plomp.json").exists()
    assert "Writing to:" in capsys.readouterr().err


def test_explain_invalid_graph(tmp_path, capsys):
    assert main(["explain", _cycle_graph(tmp_path), "--metrics", UNIT]) == EXIT_DOMAIN_ERROR
    assert capsys.readouterr().out == ""


def test_diff_with_itself(capsys):
    assert main(["diff", RAILCO, RAILCO, "--metrics", UNIT, "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["delta_milli"] == 0
    assert document["changed_items"] == []


def test_diff_extra_new_service(tmp_path, railco, capsys):
    document = graph_to_document(railco)
    for service in document["services"]:
        if service["id"] == "POProcessing":
            service["children"].append("Audit")
    document["services"].append({"id": "Audit", "kind": "new"})
    variant = _write(tmp_path, "variant.json", document)
    assert main(["diff", RAILCO, variant, "--metrics", UNIT, "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["delta_milli"] == 2000


def test_diff_moved_first_encounter(tmp_path, railco, capsys):
    document = graph_to_document(railco)
    document["services"][0]["children"] = ["POProcessing", "InvoiceProcessing"]
    variant = _write(tmp_path, "variant.json", document)
    assert main(["diff", RAILCO, variant, "--metrics", UNIT]) == EXIT_OK
    assert capsys.readouterr().out.startswith("base 12.000 PH, variant 12.000 PH, delta 0.000 PH")


def test_diff_missing_variant(tmp_path, capsys):
    assert main(["diff", RAILCO, str(tmp_path / "nope.json"), "--metrics", UNIT]) == EXIT_IO_ERROR


def test_baseline(capsys):
    argv = ["baseline", "--data-technology", "relational", "--data-base-cost", "50", "--format", "json"]
    assert main(argv) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["components"]["data"]["amount_milli"] == 15000
    assert document["total_milli"] == 15000


def test_baseline_table(capsys):
    argv = [
        "baseline",
        "--data-technology",
        "isam",
        "--data-base-cost",
        "10",
        "--service-cost",
        "20",
        "--process-cost",
        "30",
        "--enabling-tech-cost",
        "40",
    ]
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1].split() == ["TOTAL", "98.000", "PH"]



@pytest.mark.parametrize("value, constant", [(float("nan"), "NaN"), (float("inf"), "Infinity")])
def test_estimate_non_finite_attribute_is_a_document_error(tmp_path, capsys, value, constant):
    document = json.loads(RAILCO_PATH.read_text(encoding="utf-8"))
    document["services"][4]["attributes"]["size_points"] = value
    path = _write(tmp_path, "graph.json", document)
    assert constant in (tmp_path / "graph.json").read_text(encoding="utf-8")
    assert main(["estimate", path, "--metrics", DEFAULT]) == EXIT_IO_ERROR
    assert "non-finite number" in capsys.readouterr().err


@pytest.mark.parametrize("value", ["nan", "inf"])
def test_estimate_non_finite_rate_is_a_domain_error(capsys, value):
    assert main(["estimate", RAILCO, "--metrics", UNIT, "--rate", value]) == EXIT_DOMAIN_ERROR
    assert "INVALID_ATTRIBUTE" in capsys.readouterr().err


@pytest.mark.parametrize("flag", ["--service-cost", "--data-base-cost"])
@pytest.mark.parametrize("value", ["nan", "inf"])
def test_baseline_non_finite_input_is_a_domain_error(capsys, flag, value):
    argv = ["baseline", "--data-technology", "relational", "--data-base-cost", "50", flag, value]
    assert main(argv) == EXIT_DOMAIN_ERROR
    assert "INVALID_ATTRIBUTE" in capsys.readouterr().err


def test_size_command_rejects_negative_effort_coefficient(capsys):
    assert main(["size", RAILCO, "--metrics", SIZE, "--effort-a", "-1"]) == EXIT_DOMAIN_ERROR
    captured = capsys.readouterr()
    assert "NEGATIVE_INPUT" in captured.err
    assert captured.out == ""

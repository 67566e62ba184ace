import hashlib
import json
import subprocess
import sys

import jsonschema
import pytest

from elc.cli import main

from conftest import ROOT, fixture

SCHEMA = json.loads((ROOT / "docs" / "schema" / "report.schema.json").read_text())

GRAPH = """base finset
language { rel E : I + I; }
structure Graph { carrier finset {a, b}; rel E = {(a, b), (b, b)}; }
structure Partial { carrier finset {a, b}; rel E = {(a, b)}; }
"""


def run(capsys, *argv):
    code = main(list(argv) + ["--json"])
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == code
    return code, report


@pytest.fixture
def graphs(tmp_path):
    path = tmp_path / "graphs.elstruct"
    path.write_text(GRAPH)
    return str(path)


def test_check_true_and_false(capsys):
    theory = fixture("unique_midpoint.elth")
    code, rep = run(capsys, "check", "--theory", theory, "--structure", fixture("midpoint", "m02_far_pair.elstruct"))
    assert code == 0 and rep["result"]["model"] is True
    code, rep = run(capsys, "check", "--theory", theory, "--structure", fixture("midpoint", "m04_half_path.elstruct"))
    assert code == 1 and rep["result"]["model"] is False
    failing = [a for a in rep["result"]["axioms"] if a["verdict"] != "satisfied"]
    assert failing and failing[0]["failing_instance"] is not None


def test_check_explain_adds_subobjects(capsys):
    args = ["check", "--theory", fixture("unique_midpoint.elth"),
            "--structure", fixture("midpoint", "m03_unit_pair.elstruct")]
    _, plain = run(capsys, *args)
    _, explained = run(capsys, *args, "--explain")
    assert "lhs" not in json.dumps(plain["result"]["axioms"])
    assert "lhs" in json.dumps(explained["result"]["axioms"])


def test_truncated_disjunction_exits_3(capsys):
    args = ["check", "--theory", fixture("standard_metric.elth"), "--structure", fixture("standard", "s03_far.elstruct")]
    code, rep = run(capsys, *args)
    assert code == 3 and rep["result"]["model"] is None
    assert rep["result"]["disjunctions"][0]["status"] == "truncated"
    code, rep = run(capsys, *args, "--max-n", "128")
    assert code == 0 and rep["result"]["disjunctions"][0]["status"] == "stabilized"


def test_models_command(capsys):
    code, rep = run(capsys, "models", "--theory", fixture("bridge", "symmetric.elth"), "--max-size", "2")
    assert code == 0
    # symmetric relations: 2 on one point, 6 on two points up to swapping them
    assert rep["result"]["count"] == 8
    assert rep["result"]["counts_by_size"] == {"1": 2, "2": 6}


def test_inject_and_orth(capsys, graphs):
    cone = fixture("bridge", "rn_cone.elcone")
    code, rep = run(capsys, "inject", "--cone", f"{cone}#Rn", "--structure", f"{cone}#A2")
    assert code == 0 and rep["result"]["test"] == "in_E"
    code, _ = run(capsys, "inject", "--cone", f"{cone}#Rn", "--structure", f"{cone}#One")
    assert code == 1
    functional = fixture("bridge", "functional.elth")
    code, rep = run(capsys, "orth", "--theory", functional, "--axiom", "functional", "--structure", f"{graphs}#Graph")
    assert code == 0 and rep["result"]["test"] == "iso"
    code, _ = run(capsys, "orth", "--theory", functional, "--axiom", "functional", "--structure", f"{graphs}#Partial")
    assert code == 1


def test_bridge_reports_disagreements(capsys):
    code, rep = run(capsys, "bridge", fixture("bridge", "symmetric.elth"))
    assert code == 0 and rep["result"]["agree"] is True
    code, rep = run(capsys, "bridge", fixture("bridge", "corrupted_cone.elcone"))
    assert code == 1 and rep["result"]["disagreements"]
    assert all("witness" in d for d in rep["result"]["disagreements"])


@pytest.mark.parametrize("argv", [
    ["check", "--theory", "missing.elth", "--structure", "missing.elstruct"],
    ["orth", "--structure", "x.elstruct"],
    ["bridge", "FIXTURE:internal_category.elth"],
])
def test_usage_errors_exit_2(capsys, argv):
    argv = [fixture(*a[len("FIXTURE:"):].split("/")) if a.startswith("FIXTURE:") else a for a in argv]
    code, rep = run(capsys, *argv)
    assert code == 2 and "error" in rep and "result" not in rep


def test_parse_error_is_reported_with_position(capsys, tmp_path):
    bad = tmp_path / "bad.elth"
    bad.write_text("base finset\ntheory T { axiom a: true |- ; }\n")
    code, rep = run(capsys, "models", "--theory", str(bad), "--max-size", "1")
    assert code == 2
    assert ":2:" in rep["error"]


def test_budget_from_flag_and_environment(capsys, monkeypatch):
    args = ["models", "--theory", fixture("internal_category.elth"), "--max-size", "3"]
    code, rep = run(capsys, *args, "--budget", "10")
    assert code == 3 and "budget" in rep["error"]
    monkeypatch.setenv("ELC_BUDGET", "10")
    code, _ = run(capsys, *args)
    assert code == 3


def test_timings_only_on_request(capsys):
    args = ["models", "--theory", fixture("bridge", "symmetric.elth"), "--max-size", "1"]
    _, rep = run(capsys, *args)
    assert "timings" not in rep
    _, rep = run(capsys, *args, "--timings")
    assert "timings" in rep


def test_inputs_are_hashed(capsys):
    theory = fixture("bridge", "symmetric.elth")
    _, rep = run(capsys, "models", "--theory", theory, "--max-size", "1")
    digest = hashlib.sha256(open(theory, "rb").read()).hexdigest()
    assert rep["inputs"] == [{"path": theory, "sha256": digest}]


def test_human_output_and_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "elc", "models", "--theory", fixture("bridge", "symmetric.elth"),
                           "--max-size", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() and not proc.stdout.lstrip().startswith("{")


def test_internal_category_examples(capsys):
    theory = fixture("internal_category.elth")
    code, rep = run(capsys, "check", "--theory", theory, "--structure", fixture("one_morphism.elstruct"))
    assert code == 0 and rep["result"]["model"] is True
    code, rep = run(capsys, "models", "--theory", theory, "--max-size", "1")
    # only the trivial category has a single morphism
    assert code == 0 and rep["result"]["count"] == 1


def test_orth_with_an_explicit_morphism(capsys, tmp_path):
    path = tmp_path / "collapse.elcone"
    path.write_text("""base finset
language { rel R : I; }
structure Two { carrier finset {a, b}; }
structure One { carrier finset {p}; }
structure Loose { carrier finset {u, v}; rel R = {u}; }
morphism collapse : Two -> One = {a -> p, b -> p};
""")
    # orthogonal to a -> p, b -> p exactly when the carrier has at most one point
    code, rep = run(capsys, "orth", "--morphism", f"{path}#collapse", "--structure", f"{path}#One")
    assert code == 0 and rep["result"]["morphism"] == "collapse"
    code, _ = run(capsys, "orth", "--morphism", f"{path}#collapse", "--structure", f"{path}#Loose")
    assert code == 1

import io
import json
import subprocess
import sys

from react_planner.cli import main
from react_planner.scenario import format_table, run_suite

from conftest import GOLDEN, SUITE


def run_cli(*argv, stdin=""):
    out = io.StringIO()
    code = main(list(argv), out=out, inp=io.StringIO(stdin))
    return code, out.getvalue()


def golden_data():
    return json.loads(GOLDEN.read_text())


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_run_golden(tmp_path):
    log, report = tmp_path / "run.log", tmp_path / "report.json"
    code, text = run_cli("run", str(GOLDEN), "--log", str(log), "--report", str(report))
    assert code == 0
    assert "golden: 12 actions matched" in text
    assert log.read_text() in text
    data = json.loads(report.read_text())
    assert data["golden"]["matched"] and data["exit_code"] == 0


def test_golden_without_event_diverges_at_five(tmp_path, capsys):
    data = golden_data()
    data["events"] = []
    code, text = run_cli("run", write(tmp_path, "noevent.json", data))
    assert code == 1
    assert "GOLDEN_MISMATCH: diverged at action 5" in text


def test_finish_only_with_empty_expectation(tmp_path):
    data = golden_data()
    data.update(events=[], script=["Finish: nothing to do"], expected_actions=[])
    code, text = run_cli("run", write(tmp_path, "finish.json", data))
    assert code == 0
    assert "golden: 0 actions matched" in text


def test_input_errors_exit_two(tmp_path, capsys):
    assert run_cli("run", str(tmp_path / "missing.json"))[0] == 2
    assert "SCENARIO_PARSE_ERROR" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run_cli("run", str(bad))[0] == 2
    data = golden_data()
    data["expected_actions"] = ["GOTO(kitchen)"]
    del data["script"]
    assert run_cli("run", write(tmp_path, "noscript.json", data))[0] == 2
    data = golden_data()
    data["script"][0] = "Skill action: PICK(bottle"
    assert run_cli("run", write(tmp_path, "badscript.json", data))[0] == 2


def test_bad_explainer_data(tmp_path, capsys):
    bad = tmp_path / "d.jsonl"
    bad.write_text("{nope\n")
    assert run_cli("run", str(GOLDEN), "--explainer-data", str(bad))[0] == 2
    assert "DATASET_INVALID" in capsys.readouterr().err


def test_planner_failure_exits_one(tmp_path):
    data = golden_data()
    data["script"] = data["script"][:3]
    data.pop("expected_actions")
    code, text = run_cli("run", write(tmp_path, "short.json", data))
    assert code == 1
    assert "SCRIPT_EXHAUSTED" in text


def test_suite_table():
    code, text = run_cli("suite", str(SUITE))
    assert code == 0
    assert "| Request type" in text and "Number of attempts" in text and "Success rate" in text
    assert "| Simple requests " in text and "100%" in text


def test_suite_parallel_matches_serial():
    serial, _ = run_suite(SUITE)
    parallel, _ = run_suite(SUITE, workers=4)
    assert serial == parallel


def test_suite_empty_directory(tmp_path):
    rows, runs = run_suite(tmp_path)
    assert rows == [] and runs == []
    assert format_table(rows).splitlines()[0].startswith("| Request type")
    assert run_cli("suite", str(tmp_path))[0] == 0


def test_suite_counts_broken_file_as_failure(tmp_path):
    (tmp_path / "broken.json").write_text("[]")
    code, text = run_cli("suite", str(tmp_path))
    assert code == 1 and "broken.json: ERROR" in text


def test_repl_runs_and_quits():
    code, text = run_cli("repl", str(GOLDEN), stdin="Move the bottle\n\n:quit\nignored\n")
    assert code == 0
    assert 'User Request: "Move the bottle"' in text
    assert "status: Success" in text
    assert text.count("User Request:") == 1


def test_repl_bad_world(tmp_path, capsys):
    assert run_cli("repl", str(tmp_path / "nope.json"))[0] == 2
    assert "SCENARIO_PARSE_ERROR" in capsys.readouterr().err


def test_endpoint_needs_config(capsys):
    assert run_cli("run", str(GOLDEN), "--policy", "endpoint")[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "react_planner.cli", "run", str(GOLDEN)], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "golden: 12 actions matched" in proc.stdout

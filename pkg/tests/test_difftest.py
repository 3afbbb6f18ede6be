import json
import sys
import time

import pytest

from stref.difftest import (
    CATEGORIES,
    AdapterError,
    EngineAdapter,
    ExecResult,
    campaign,
    categorize,
    check_program,
    compare,
    parse_output,
    run_external,
    run_reference,
)
from stref.interp import Abnormal, Success, Timeout
from stref.mockengine import BUG_CLASSES
from stref.mutate import MutationPlan

from conftest import CORPUS, PROGRAMS, TRIGGERS

OK = Success((("MAIN.x", "INT", "1"),))
OK2 = Success((("MAIN.x", "INT", "2"),))
ERR5 = Abnormal("DivisionByZero", 5)
ERR7 = Abnormal("IndexOutOfRange", 7)
TO = Timeout()


def mock_adapter(bugs: str) -> EngineAdapter:
    return EngineAdapter.from_command(
        f"mock-{bugs}", [sys.executable, "-m", "stref.mockengine", "--bugs", bugs, "--timeout", "{timeout_s}", "{program}"]
    )


def py_adapter(code: str, **kw) -> EngineAdapter:
    return EngineAdapter.from_command("py", [sys.executable, "-c", code, "{program}"], **kw)


@pytest.mark.parametrize(
    "a, b, kind, reason",
    [
        (OK, OK, "Consistent", None),
        (OK, OK2, "Inconsistent", "value-mismatch"),
        (OK, ERR5, "Inconsistent", "one-failed"),
        (OK, TO, "Inconsistent", "one-timeout"),
        (ERR5, OK, "Inconsistent", "one-failed"),
        (ERR5, Abnormal("TypeError", 5), "Consistent", None),
        (ERR5, ERR7, "Inconsistent", "different-error-statement"),
        (ERR5, TO, "Inconsistent", "one-timeout"),
        (TO, OK, "Inconsistent", "one-timeout"),
        (TO, ERR5, "Inconsistent", "one-timeout"),
        (TO, TO, "BothTimeout", None),
    ],
)
def test_compare_matrix(a, b, kind, reason):
    v = compare(a, b)
    assert (v.kind, v.reason) == (kind, reason)


def test_compare_is_symmetric_in_kind():
    outcomes = [OK, OK2, ERR5, ERR7, TO]
    for a in outcomes:
        for b in outcomes:
            assert compare(a, b).kind == compare(b, a).kind


def test_compare_reports_differing_names():
    a = Success((("MAIN.x", "INT", "1"), ("MAIN.y", "INT", "2")))
    b = Success((("MAIN.x", "INT", "1"), ("MAIN.y", "INT", "3"), ("MAIN.z", "INT", "0")))
    assert compare(a, b).details == ("MAIN.y", "MAIN.z")


def test_compare_type_mismatch_counts():
    assert not compare(OK, Success((("MAIN.x", "DINT", "1"),))).consistent


def test_real_tolerance():
    a = Success((("MAIN.r", "REAL", "0.1"),))
    b = Success((("MAIN.r", "REAL", "0.10000001"),))
    assert not compare(a, b).consistent
    assert compare(a, b, tolerance=1e-6).consistent
    ints = Success((("MAIN.x", "INT", "1"),)), Success((("MAIN.x", "INT", "2"),))
    assert not compare(*ints, tolerance=10.0).consistent


def test_program_level_only_ignores_instance_internals():
    a = Success((("MAIN.c", "Counter", ""), ("MAIN.c.n", "INT", "1")))
    b = Success((("MAIN.c", "Counter", ""), ("MAIN.c.n", "INT", "9")))
    assert not compare(a, b).consistent
    assert compare(a, b, program_level_only=True).consistent


def test_compare_accepts_exec_results():
    assert compare(ExecResult("a", OK, 1.0), ExecResult("b", OK, 2.0)).consistent


def test_categories():
    assert categorize(OK, OK) == "both_complete_equal"
    assert categorize(OK, OK2) == "both_complete_different"
    assert categorize(OK, ERR5) == "reference_only_completes"
    assert categorize(ERR5, OK) == "external_only_completes"
    assert categorize(ERR5, ERR5) == "both_abnormal_same"
    assert categorize(ERR5, ERR7) == "both_abnormal_different"
    assert categorize(TO, OK) == "one_timeout"
    assert categorize(TO, TO) == "both_timeout"


def test_parse_output():
    assert isinstance(parse_output(124, "", "TIMEOUT"), Timeout)
    err = parse_output(1, "", "ERROR line=12 kind=DivisionByZero msg=x")
    assert (err.error_kind, err.line) == ("DivisionByZero", 12)
    crash = parse_output(139, "", "Segmentation fault")
    assert (crash.error_kind, crash.line) == ("EngineCrash", 0)
    ok = parse_output(0, "MAIN.b : INT = 2\nMAIN.a : INT = 1\nnoise\n", "")
    assert ok.snapshot == (("MAIN.a", "INT", "1"), ("MAIN.b", "INT", "2"))


def test_parse_output_keeps_string_values_with_spaces():
    ok = parse_output(0, "MAIN.s : STRING = 'a = b'\n", "")
    assert ok.snapshot == (("MAIN.s", "STRING", "'a = b'"),)


def test_adapter_load_formats(tmp_path):
    (tmp_path / "e.toml").write_text('command = "engine --t {timeout_s} {program}"\ntimeout_s = 3\n')
    (tmp_path / "e.json").write_text(json.dumps({"name": "j", "command": ["engine", "{program}"], "tolerance": 1e-6}))
    t = EngineAdapter.load(tmp_path / "e.toml")
    assert t.name == "e" and t.timeout_s == 3.0
    assert t.argv("p.st", 3.0) == ["engine", "--t", "3", "p.st"]
    j = EngineAdapter.load(tmp_path / "e.json")
    assert j.name == "j" and j.tolerance == 1e-6 and j.timeout_s == 10.0


def test_adapter_python_placeholder():
    a = EngineAdapter.load(CORPUS / "adapters/identity.toml")
    assert a.argv("x.st", 10)[0] == sys.executable


@pytest.mark.parametrize(
    "name, text",
    [("bad.toml", "command = "), ("none.toml", "timeout_s = 1\n"), ("empty.json", '{"command": ""}'), ("bad.json", "{")],
)
def test_adapter_load_errors(tmp_path, name, text):
    (tmp_path / name).write_text(text)
    with pytest.raises(AdapterError):
        EngineAdapter.load(tmp_path / name)


def test_adapter_missing_file(tmp_path):
    with pytest.raises(AdapterError):
        EngineAdapter.load(tmp_path / "nope.toml")


def test_unstartable_engine(tmp_path):
    p = tmp_path / "p.st"
    p.write_text("PROGRAM MAIN\nEND_PROGRAM\n")
    with pytest.raises(AdapterError):
        run_external(EngineAdapter.from_command("x", "/nonexistent/engine {program}"), p)


def test_child_environment_is_filtered(tmp_path, monkeypatch):
    monkeypatch.setenv("STREF_SECRET", "1")
    p = tmp_path / "p.st"
    p.write_text("")
    code = "import os; print('MAIN.x : INT = %d' % ('STREF_SECRET' in os.environ))"
    r = run_external(py_adapter(code), p)
    assert r.outcome.snapshot == (("MAIN.x", "INT", "0"),)


def test_run_reference_missing_file(tmp_path):
    with pytest.raises(OSError):
        run_reference(tmp_path / "missing.st")


def test_run_reference_infinite_loop_times_out(tmp_path):
    p = tmp_path / "loop.st"
    p.write_text("PROGRAM MAIN\nVAR\n    i : INT;\nEND_VAR\nWHILE TRUE DO\n    i := i + 1;\nEND_WHILE;\nEND_PROGRAM\n")
    start = time.perf_counter()
    assert isinstance(run_reference(p, timeout_s=1.0).outcome, Timeout)
    assert time.perf_counter() - start < 3.0


def test_run_external_timeout(tmp_path):
    p = tmp_path / "p.st"
    p.write_text("")
    start = time.perf_counter()
    r = run_external(py_adapter("import time; time.sleep(60)"), p, timeout_s=0.2)
    assert isinstance(r.outcome, Timeout)
    assert time.perf_counter() - start < 20


def test_check_program_identity():
    adapter = EngineAdapter.load(CORPUS / "adapters/identity.toml")
    row = check_program(PROGRAMS[0], adapter)
    assert row.verdict == "Consistent" and row.category == "both_complete_equal"


@pytest.mark.parametrize("bug", BUG_CLASSES)
def test_each_bug_class_is_flagged_by_its_trigger(bug):
    trigger = CORPUS / "triggers" / f"{bug}.st"
    row = check_program(trigger, mock_adapter(bug))
    assert row.verdict == "Inconsistent", row


@pytest.mark.parametrize("bug", BUG_CLASSES)
def test_bug_free_mock_agrees_on_triggers(bug):
    assert check_program(CORPUS / "triggers" / f"{bug}.st", mock_adapter("none")).verdict == "Consistent"


def test_campaign_counts_and_report(tmp_path):
    adapter = mock_adapter("all")
    report = campaign(TRIGGERS, None, adapter, parallelism=2)
    assert len(report.rows) == len(TRIGGERS)
    assert sum(report.counts.values()) == len(report.rows)
    assert set(report.counts) == set(CATEGORIES)
    assert len(report.inconsistent) == len(TRIGGERS)
    report.write(tmp_path)
    rows = (tmp_path / "report.jsonl").read_text().splitlines()
    assert len(rows) == len(TRIGGERS)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["programs"] == len(TRIGGERS)
    assert summary["verdicts"]["Inconsistent"] == len(TRIGGERS)


def test_campaign_with_mutants_includes_seeds(tmp_path):
    adapter = mock_adapter("none")
    plan = MutationPlan(rng_seed=3, rounds=1, mutants_per_seed=2)
    report = campaign(PROGRAMS[:2], plan, adapter, work_dir=tmp_path)
    assert len(report.rows) == 2 + 4
    assert sum(1 for r in report.rows if r.program.startswith("mutants/")) == 4
    assert not report.inconsistent
    assert (tmp_path / "manifest.jsonl").exists()

import io
import json

import pytest

from app.main import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line]


class TestDemoTypewriter:
    def test_rows_and_membership(self):
        code, text = run("demo-typewriter", "--rows", "5", "--output", "json")
        assert code == EXIT_OK
        recs = records(text)
        terms = [r for r in recs if r["kind"] == "typewriter"]
        (membership,) = [r for r in recs if r["kind"] == "membership"]
        assert len(terms) == 15
        assert terms[4]["set"] == [["1/3", "2/3"]]
        assert terms[4]["measure"] == "1/3"
        assert membership == {"kind": "membership", "t": "1/7", "rows": 5, "count": 5}

    def test_single_row(self):
        code, text = run("demo-typewriter", "--rows", "1", "--output", "json")
        (term,) = [r for r in records(text) if r["kind"] == "typewriter"]
        assert code == EXIT_OK
        assert term["set"] == [["0", "1"]]
        assert term["distance_to_empty"] == "1"

    def test_stretched(self):
        code, text = run("demo-typewriter", "--rows", "3", "--stretched", "--output", "json")
        terms = [r for r in records(text) if r["kind"] == "typewriter"]
        assert code == EXIT_OK
        assert [t["term"] for t in terms] == [1, 1, 2, 2, 2, 2]

    def test_point_outside_unit_interval(self):
        code, _ = run("demo-typewriter", "--point", "3/2")
        assert code == EXIT_CONFIG

    def test_text_output(self):
        code, text = run("demo-typewriter", "--rows", "2", "--point", "1/2")
        assert code == EXIT_OK
        assert "t=1/2 lies in 2 of the terms" in text


class TestDemoBisection:
    def test_final_distance(self):
        code, text = run("demo-bisection", "--steps", "10", "--seed", "3", "--output", "json")
        assert code == EXIT_OK
        recs = records(text)
        for ring in ("B", "Z/6Z"):
            last = [r for r in recs if r["ring"] == ring][-1]
            assert (last["step"], last["distance_to_one"]) == (10, "1/1024")

    def test_zero_steps(self):
        code, text = run("demo-bisection", "--steps", "0", "--output", "json")
        assert code == EXIT_OK
        assert {r["distance_to_one"] for r in records(text)} == {"1"}


class TestDemoCompletion:
    def test_transcripts(self):
        code, text = run("demo-completion", "--horizon", "12", "--output", "json")
        assert code == EXIT_OK
        by_name = {r["scenario"]: r for r in records(text)}
        assert set(by_name) == {"typewriter", "increasing_sets", "step_function"}
        typewriter = by_name["typewriter"]
        assert typewriter["finalLimit"] == []
        assert typewriter["approx"]["bound"] == "1/256"
        assert all(row["ok"] for row in typewriter["checkedInequalities"])

    def test_dual_mode(self):
        code, text = run("demo-completion", "--horizon", "10", "--mode", "dual", "--output", "json")
        assert code == EXIT_OK
        assert {r["mode"] for r in records(text)} == {"dual"}

    def test_corrupted_run_fails(self):
        code, text = run("demo-completion", "--horizon", "8", "--corrupt")
        assert code == EXIT_VIOLATION
        assert "FAIL typewriter" in text
        assert "join_step_bound" in text


class TestCheckProperties:
    def test_dv_witness(self):
        code, text = run("check-properties", "--suite", "dv-witness", "--output", "json")
        assert code == EXIT_OK
        suite, summary = records(text)
        assert suite["expected_failure"]
        assert (suite["witness"]["x"], suite["witness"]["y"], suite["witness"]["z"]) == (["0"], ["1"], ["10"])
        assert summary == {"kind": "summary", "passed": True, "suites": 1, "failed": []}

    def test_selection_keeps_registry_order(self):
        code, text = run(
            "check-properties", "--suite", "isolation", "--suite", "halving", "--samples", "50", "--output", "json"
        )
        assert code == EXIT_OK
        assert [r.get("name") for r in records(text)][:2] == ["halving", "isolation"]

    def test_deterministic_for_a_seed(self):
        argv = ("check-properties", "--suite", "halving", "--suite", "partition", "--samples", "100",
                "--seed", "42", "--output", "json")
        assert run(*argv) == run(*argv)

    def test_unknown_suite(self):
        code, _ = run("check-properties", "--suite", "no-such-suite")
        assert code == EXIT_CONFIG


class TestConfigErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ("demo-completion", "--epsilon", "0"),
            ("demo-completion", "--epsilon", "abc"),
            ("demo-completion", "--horizon", "0"),
            ("demo-typewriter", "--output", "xml"),
            ("demo-typewriter", "--rows", "0"),
            ("frobnicate",),
            (),
        ],
    )
    def test_exit_code(self, argv):
        code, text = run(*argv)
        assert code == EXIT_CONFIG
        assert text == ""

    def test_history_needs_database(self):
        assert run("history")[0] == EXIT_CONFIG

    def test_environment_defaults(self, monkeypatch):
        monkeypatch.setenv("WORKBENCH_OUTPUT", "json")
        code, text = run("demo-typewriter", "--rows", "1")
        assert code == EXIT_OK
        assert records(text)[0]["kind"] == "typewriter"

    def test_bad_environment_value(self, monkeypatch):
        monkeypatch.setenv("WORKBENCH_SEED", "seven")
        assert run("demo-bisection")[0] == EXIT_CONFIG


class TestHistory:
    def test_round_trip(self, history_db):
        run("demo-typewriter", "--rows", "2", "--history-db", history_db)
        run("demo-bisection", "--steps", "2", "--history-db", history_db)
        code, text = run("history", "--history-db", history_db, "--output", "json")
        assert code == EXIT_OK
        entries = records(text)
        assert [e["command"] for e in entries] == ["demo-bisection", "demo-typewriter"]
        assert entries[1]["config"]["rows"] == 2
        assert entries[0]["exit_code"] == EXIT_OK

    def test_search(self, history_db):
        run("demo-typewriter", "--rows", "1", "--history-db", history_db)
        run("demo-bisection", "--steps", "1", "--history-db", history_db)
        code, text = run("history", "--history-db", history_db, "--search", "bisection", "--output", "json")
        assert code == EXIT_OK
        assert [e["command"] for e in records(text)] == ["demo-bisection"]

    def test_history_runs_are_not_recorded(self, history_db):
        run("history", "--history-db", history_db)
        _, text = run("history", "--history-db", history_db)
        assert "no runs recorded" in text

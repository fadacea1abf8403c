from app.database import get_history, save_run, search_history


def test_empty_history(history_db):
    assert get_history(history_db) == []


def test_newest_first(history_db):
    first = save_run(history_db, "demo-typewriter", {"rows": 3}, [{"kind": "typewriter", "k": 1}], 0)
    second = save_run(history_db, "check-properties", {"suite": "halving"}, [{"kind": "summary", "passed": False}], 1)
    assert second > first
    entries = get_history(history_db)
    assert [e.id for e in entries] == [second, first]
    assert entries[0].exit_code == 1
    assert entries[1].config == {"rows": 3}
    assert entries[1].report == [{"kind": "typewriter", "k": 1}]
    assert entries[0].timestamp


def test_limit(history_db):
    for i in range(5):
        save_run(history_db, "demo-bisection", {"steps": i}, [], 0)
    entries = get_history(history_db, limit=2)
    assert [e.config["steps"] for e in entries] == [4, 3]


def test_search_matches_command_or_report(history_db):
    save_run(history_db, "demo-bisection", {}, [{"ring": "Z/6Z"}], 0)
    save_run(history_db, "check-properties", {}, [{"name": "dv-witness"}], 0)
    assert [e.command for e in search_history(history_db, "bisection")] == ["demo-bisection"]
    assert [e.command for e in search_history(history_db, "dv-witness")] == ["check-properties"]
    assert search_history(history_db, "nothing-like-this") == []

import json
import sqlite3
from typing import Any, Dict, List

from app.logger import get_logger
from app.models import HistoryEntry

logger = get_logger(__name__)


def init_db(path: str) -> None:
    conn = sqlite3.connect(path)
    c = conn.cursor()
    c.execute('''
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            command TEXT,
            config_json TEXT,
            report_json TEXT,
            exit_code INTEGER,
            timestamp DATETIME DEFAULT CURRENT_TIMESTAMP
        )
    ''')
    conn.commit()
    conn.close()


def save_run(path: str, command: str, config: Dict[str, Any], report: Any, exit_code: int) -> int:
    init_db(path)
    conn = sqlite3.connect(path)
    c = conn.cursor()
    c.execute(
        'INSERT INTO runs (command, config_json, report_json, exit_code) VALUES (?, ?, ?, ?)',
        (command, json.dumps(config, sort_keys=True), json.dumps(report, sort_keys=True), exit_code),
    )
    run_id = c.lastrowid
    conn.commit()
    conn.close()
    logger.debug("Run saved | id=%s command=%s exit=%d", run_id, command, exit_code)
    return run_id


def _entries(rows: List[tuple]) -> List[HistoryEntry]:
    return [
        HistoryEntry(
            id=row[0],
            command=row[1],
            config=json.loads(row[2] or "{}"),
            report=json.loads(row[3] or "null"),
            exit_code=row[4],
            timestamp=str(row[5]),
        )
        for row in rows
    ]


def get_history(path: str, limit: int = 10) -> List[HistoryEntry]:
    init_db(path)
    conn = sqlite3.connect(path)
    c = conn.cursor()
    c.execute(
        'SELECT id, command, config_json, report_json, exit_code, timestamp FROM runs ORDER BY id DESC LIMIT ?',
        (limit,),
    )
    rows = c.fetchall()
    conn.close()
    return _entries(rows)


def search_history(path: str, query: str, limit: int = 20) -> List[HistoryEntry]:
    """Search history by command name or report contents."""
    init_db(path)
    conn = sqlite3.connect(path)
    c = conn.cursor()
    search_term = f"%{query}%"
    c.execute('''
        SELECT id, command, config_json, report_json, exit_code, timestamp
        FROM runs
        WHERE command LIKE ? OR report_json LIKE ?
        ORDER BY id DESC
        LIMIT ?
    ''', (search_term, search_term, limit))
    rows = c.fetchall()
    conn.close()
    return _entries(rows)

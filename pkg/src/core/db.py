import os
import time
from typing import Iterable, List, Optional

from sqlalchemy import Engine, create_engine, text

from src.core.simulator import EvaluationReport
from src.utils.log import log_error


def get_engine(db_path: str = "tmp/beamscan_runs.db") -> Engine:
    """Returns the SQLite engine backing the run ledger."""
    if os.path.dirname(db_path):
        os.makedirs(os.path.dirname(db_path), exist_ok=True)
    return create_engine(f"sqlite:///{db_path}")


def ensure_runs_table(conn):
    create_table_sql = """
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        command TEXT,
        scenario_digest TEXT,
        scheme TEXT,
        b INTEGER,
        analytic REAL,
        empirical REAL,
        se REAL,
        lower REAL,
        upper REAL,
        gain_vs_es REAL,
        timestamp INTEGER
    );
    """
    conn.execute(text(create_table_sql))


def save_run_rows(engine: Optional[Engine], command: str, scenario_digest: str, reports: Iterable[EvaluationReport]) -> int:
    """Appends one row per report. Returns the number of stored rows (0 on failure)."""
    if engine is None or not scenario_digest:
        return 0

    insert_sql = """
    INSERT INTO runs (command, scenario_digest, scheme, b, analytic, empirical, se, lower, upper, gain_vs_es, timestamp)
    VALUES (:command, :digest, :scheme, :b, :analytic, :empirical, :se, :lower, :upper, :gain, :timestamp);
    """
    rows = [
        {
            "command": command,
            "digest": scenario_digest,
            "scheme": r.scheme,
            "b": r.b,
            "analytic": r.analytic,
            "empirical": r.empirical,
            "se": r.se,
            "lower": r.bounds.lower,
            "upper": r.bounds.upper,
            "gain": r.gain_vs_es,
            "timestamp": int(time.time()),
        }
        for r in reports
    ]
    try:
        with engine.begin() as conn:
            ensure_runs_table(conn)
            for row in rows:
                conn.execute(text(insert_sql), row)
        return len(rows)
    except Exception as e:
        log_error(f"Error saving runs to ledger: {e}")
        return 0


def load_runs(engine: Optional[Engine], scenario_digest: Optional[str] = None, limit: Optional[int] = None) -> List[dict]:
    """Loads ledger rows, newest first."""
    runs: List[dict] = []
    if engine is None:
        return runs

    sql = "SELECT * FROM runs"
    params = {}
    if scenario_digest:
        sql += " WHERE scenario_digest = :digest"
        params["digest"] = scenario_digest
    sql += " ORDER BY id DESC"
    if limit is not None:
        sql += " LIMIT :limit"
        params["limit"] = int(limit)

    try:
        with engine.begin() as conn:
            ensure_runs_table(conn)
            for row in conn.execute(text(sql), params).mappings():
                runs.append(dict(row))
    except Exception as e:
        log_error(f"Ledger load error: {e}")
    return runs


def delete_run(engine: Optional[Engine], run_id: int) -> bool:
    """Deletes a single ledger row."""
    if engine is None:
        return False
    try:
        with engine.begin() as conn:
            ensure_runs_table(conn)
            result = conn.execute(text("DELETE FROM runs WHERE id = :id"), {"id": run_id})
            return result.rowcount > 0
    except Exception as e:
        log_error(f"Error deleting run {run_id}: {e}")
        return False

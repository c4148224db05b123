import pytest

from src.core import db as db_logic
from src.core.beams import es_codebook, halving_codebook
from src.core.simulator import analytic_performance


@pytest.fixture
def engine(tmp_path):
    return db_logic.get_engine(str(tmp_path / "ledger" / "runs.db"))


@pytest.fixture
def reports(uniform_scenario):
    return [
        analytic_performance(uniform_scenario, es_codebook(4), "es"),
        analytic_performance(uniform_scenario, halving_codebook(4), "halving"),
    ]


def test_save_and_load(engine, reports):
    assert db_logic.save_run_rows(engine, "sweep", "abc", reports) == 2
    rows = db_logic.load_runs(engine)
    assert [r["scheme"] for r in rows] == ["halving", "es"]
    assert rows[0]["analytic"] == pytest.approx(reports[1].analytic)
    assert rows[0]["empirical"] is None


def test_filter_by_digest_and_limit(engine, reports):
    db_logic.save_run_rows(engine, "sweep", "abc", reports)
    db_logic.save_run_rows(engine, "design", "def", reports[:1])
    assert len(db_logic.load_runs(engine, "abc")) == 2
    assert len(db_logic.load_runs(engine, limit=1)) == 1
    assert db_logic.load_runs(engine, limit=0) == []


def test_delete(engine, reports):
    db_logic.save_run_rows(engine, "sweep", "abc", reports)
    first_id = db_logic.load_runs(engine)[-1]["id"]
    assert db_logic.delete_run(engine, first_id)
    assert not db_logic.delete_run(engine, first_id)
    assert len(db_logic.load_runs(engine)) == 1


def test_no_engine_is_a_noop(reports):
    assert db_logic.save_run_rows(None, "sweep", "abc", reports) == 0
    assert db_logic.load_runs(None) == []
    assert not db_logic.delete_run(None, 1)


def test_empty_ledger(engine):
    assert db_logic.load_runs(engine) == []

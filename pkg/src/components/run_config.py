import os
import re
from dataclasses import dataclass
from typing import List, Optional

from dotenv import load_dotenv
from sqlalchemy import Engine

from src.core import db as db_logic
from src.core.errors import UsageError

load_dotenv()


def get_env_defaults():
    """Reads environment variables for run settings."""
    return {
        "grid_points": int(os.getenv("BEAMSCAN_GRID_POINTS", "3600")),
        "samples": int(os.getenv("BEAMSCAN_SAMPLES", "100000")),
        "seed": int(os.getenv("BEAMSCAN_SEED", "42")),
        "workers": int(os.getenv("BEAMSCAN_WORKERS", "1")),
        "db_path": os.getenv("BEAMSCAN_DB", "tmp/beamscan_runs.db"),
    }


@dataclass(frozen=True)
class RunConfig:
    grid_points: int
    samples: int
    seed: int
    workers: int
    db_path: str
    record: bool = True

    def as_dict(self) -> dict:
        return {
            "grid_points": self.grid_points,
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
        }


def add_common_arguments(parser):
    """Flags shared by every scenario-driven subcommand."""
    parser.add_argument("--scenario", required=True, help="Scenario JSON file")
    parser.add_argument("--out", help="Output path (CSV); sidecar files are derived from it")
    parser.add_argument("--grid", type=int, dest="grid_points", help="Candidate grid points for the boundary DP")
    parser.add_argument("--samples", type=int, help="Monte Carlo samples")
    parser.add_argument("--seed", type=int, help="Monte Carlo master seed")
    parser.add_argument("--workers", type=int, help="Worker threads for anchors and sample blocks")
    parser.add_argument("--db", dest="db_path", help="Run ledger (SQLite) path")
    parser.add_argument("--no-record", action="store_true", help="Do not append results to the run ledger")


def _pick(*values):
    for value in values:
        if value is not None:
            return value
    return None


def resolve(args, settings=None) -> RunConfig:
    """
    Resolves run settings. Priority: CLI flag -> scenario file -> environment.
    """
    env = get_env_defaults()
    config = RunConfig(
        grid_points=_pick(getattr(args, "grid_points", None), getattr(settings, "grid_points", None), env["grid_points"]),
        samples=_pick(getattr(args, "samples", None), getattr(settings, "samples", None), env["samples"]),
        seed=_pick(getattr(args, "seed", None), getattr(settings, "seed", None), env["seed"]),
        workers=_pick(getattr(args, "workers", None), env["workers"]),
        db_path=_pick(getattr(args, "db_path", None), env["db_path"]),
        record=not getattr(args, "no_record", False),
    )
    if config.grid_points < 8:
        raise UsageError(f"--grid must be at least 8, got {config.grid_points}")
    if config.samples < 1:
        raise UsageError(f"--samples must be positive, got {config.samples}")
    if config.workers < 1:
        raise UsageError(f"--workers must be positive, got {config.workers}")
    return config


def ledger(config: RunConfig) -> Optional[Engine]:
    return db_logic.get_engine(config.db_path) if config.record else None


def parse_b_range(value: Optional[str]) -> Optional[List[int]]:
    """'4' -> [4]; '2..6' or '2-6' -> [2, 3, 4, 5, 6]."""
    if value is None:
        return None
    match = re.fullmatch(r"\s*(\d+)\s*(?:(?:\.\.|-)\s*(\d+)\s*)?", value)
    if not match:
        raise UsageError(f"Cannot read b range '{value}', expected N or N..M")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo < 1 or hi < lo:
        raise UsageError(f"Empty or invalid b range '{value}'")
    return list(range(lo, hi + 1))

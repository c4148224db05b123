from rich.console import Console
from rich.table import Table

from src.components import run_config, scenario_io
from src.core import db as db_logic


def add_parser(subparsers):
    parser = subparsers.add_parser("history", help="List or delete rows of the run ledger")
    parser.add_argument("--scenario", help="Only show runs of this scenario file")
    parser.add_argument("--db", dest="db_path", help="Run ledger (SQLite) path")
    parser.add_argument("--limit", type=int, default=50, help="Maximum rows to show")
    parser.add_argument("--delete", type=int, metavar="ID", help="Delete the run with this id")
    parser.set_defaults(handler=run)


def run(args) -> int:
    engine = db_logic.get_engine(args.db_path or run_config.get_env_defaults()["db_path"])

    if args.delete is not None:
        if not db_logic.delete_run(engine, args.delete):
            Console().print(f"No run with id {args.delete}")
        return 0

    digest = None
    if args.scenario:
        _, settings = scenario_io.parse_scenario(args.scenario)
        digest = scenario_io.scenario_digest(settings)

    runs = db_logic.load_runs(engine, digest, args.limit)
    table = Table(title="Run ledger")
    for column in ("id", "command", "scheme", "b", "analytic", "empirical", "gain_vs_es", "scenario"):
        table.add_column(column)
    for row in runs:
        empirical = "" if row["empirical"] is None else f"{row['empirical']:.6f}"
        table.add_row(
            str(row["id"]), row["command"], row["scheme"], str(row["b"]),
            f"{row['analytic']:.6f}", empirical, f"{row['gain_vs_es']:.3f}", row["scenario_digest"][:12],
        )
    Console().print(table)
    return 0

from dataclasses import replace

from src.components import run_config, scenario_io
from src.core import db as db_logic
from src.core.simulator import SCHEMES, compare_schemes


def add_parser(subparsers):
    parser = subparsers.add_parser("sweep", help="Compare every scheme over a range of b")
    run_config.add_common_arguments(parser)
    parser.add_argument("--b", default="2..6", help="Range of probing slots, e.g. 2..6")
    parser.add_argument(
        "--scheme",
        default=",".join(SCHEMES),
        help=f"Comma-separated schemes to compare (default: {','.join(SCHEMES)})",
    )
    parser.set_defaults(handler=run)


def run(args) -> int:
    scenario, settings = scenario_io.parse_scenario(args.scenario)
    config = run_config.resolve(args, settings)
    b_values = run_config.parse_b_range(args.b)
    schemes = [name.strip() for name in args.scheme.split(",") if name.strip()]

    reports = []
    for b in b_values:
        reports.extend(compare_schemes(replace(scenario, b=b), config.grid_points, schemes, config.workers))

    out = args.out or "results/sweep.csv"
    scenario_io.write_result_table(out, reports)
    scenario_io.write_plot_data(scenario_io.sidecar(out, ".plot.csv"), reports)
    scenario_io.write_json(
        scenario_io.sidecar(out, ".meta.json"),
        {"command": "sweep", "b": b_values, "schemes": schemes, **config.as_dict()},
    )
    db_logic.save_run_rows(run_config.ledger(config), "sweep", scenario_io.scenario_digest(settings), reports)
    return 0

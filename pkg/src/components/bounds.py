from rich.console import Console
from rich.table import Table

from src.components import run_config, scenario_io
from src.core.partition import bounds


def add_parser(subparsers):
    parser = subparsers.add_parser("bounds", help="Entropy lower bounds and construction upper bounds")
    parser.add_argument("--scenario", required=True, help="Scenario JSON file")
    parser.add_argument("--b", help="Probing slots or range (default: scenario b)")
    parser.add_argument("--out", help="Optional CSV output")
    parser.set_defaults(handler=run)


def run(args) -> int:
    scenario, _ = scenario_io.parse_scenario(args.scenario)
    b_values = run_config.parse_b_range(args.b) or [scenario.b]

    rows = []
    for b in b_values:
        for regime in ("unconstrained", "contiguous"):
            report = bounds(scenario.mixture, b, regime)
            rows.append((b, regime, report.lower, report.upper, report.entropy_bits))

    table = Table(title="Bounds on the optimal expected UR width (rad)")
    for column in ("b", "regime", "lower", "upper", "entropy_bits"):
        table.add_column(column)
    for b, regime, lower, upper, h in rows:
        table.add_row(str(b), regime, f"{lower:.6f}", f"{upper:.6f}", f"{h:.6f}")
    Console().print(table)

    if args.out:
        scenario_io.write_csv(
            args.out,
            ("b", "regime", "lower", "upper", "entropy_bits"),
            [(b, regime, f"{lo:.10f}", f"{up:.10f}", f"{h:.10f}") for b, regime, lo, up, h in rows],
        )
    return 0

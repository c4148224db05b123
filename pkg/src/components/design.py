from dataclasses import replace

from src.components import run_config, scenario_io
from src.core import db as db_logic
from src.core.beams import design_contiguous, design_unconstrained
from src.core.errors import UsageError
from src.core.simulator import analytic_performance
from src.utils.log import log_info


def add_parser(subparsers):
    parser = subparsers.add_parser("design", help="Design the optimal codebook for a scenario")
    run_config.add_common_arguments(parser)
    parser.add_argument("--b", help="Probing slots (overrides the scenario)")
    parser.add_argument("--constraint", choices=("unconstrained", "contiguous"), help="Beam constraint (overrides the scenario)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    scenario, settings = scenario_io.parse_scenario(args.scenario)
    config = run_config.resolve(args, settings)

    # 1. Apply overrides
    b_values = run_config.parse_b_range(args.b)
    if b_values is not None:
        if len(b_values) != 1:
            raise UsageError("design takes a single --b value; use sweep for ranges")
        scenario = replace(scenario, b=b_values[0])
    if args.constraint:
        scenario = replace(scenario, constraint=args.constraint)

    # 2. Solve
    if scenario.constraint == "contiguous":
        scheme = "optimal-contiguous"
        design = design_contiguous(scenario.mixture, scenario.b, config.grid_points, config.workers)
    else:
        scheme = "optimal-unconstrained"
        design = design_unconstrained(scenario.mixture, scenario.b, config.grid_points, config.workers)
    report = analytic_performance(scenario, design.codebook, scheme)
    log_info(f"{scheme}: U = {report.analytic:.6f} rad, {report.gain_vs_es:.3f}x over ES")

    # 3. Write outputs
    out = args.out or f"results/design-b{scenario.b}.csv"
    scenario_io.write_result_table(out, [report])
    scenario_io.write_codebook(scenario_io.sidecar(out, ".codebook.json"), design.codebook)
    scenario_io.write_beams(scenario_io.sidecar(out, ".beams.csv"), design.codebook)
    scenario_io.write_cells(scenario_io.sidecar(out, ".cells.csv"), design.partition, scenario.mixture)
    scenario_io.write_json(
        scenario_io.sidecar(out, ".meta.json"),
        {
            "command": "design",
            "scheme": scheme,
            "b": scenario.b,
            "constraint": scenario.constraint,
            "objective": design.objective,
            "overhead": scenario.overhead,
            **config.as_dict(),
        },
    )

    # 4. Record
    db_logic.save_run_rows(run_config.ledger(config), "design", scenario_io.scenario_digest(settings), [report])
    return 0

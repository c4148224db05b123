from dataclasses import replace

from src.components import run_config, scenario_io
from src.core import db as db_logic
from src.core.errors import InvariantViolation, UsageError
from src.core.simulator import SCHEMES, build_scheme, run_monte_carlo
from src.utils.log import log_info


def add_parser(subparsers):
    parser = subparsers.add_parser("simulate", help="Monte Carlo evaluation of a codebook")
    run_config.add_common_arguments(parser)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--codebook", help="Codebook JSON written by 'design'")
    source.add_argument("--scheme", choices=SCHEMES, help="Build a named scheme instead of reading a codebook")
    parser.add_argument("--b", help="Probing slots (overrides the scenario)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    scenario, settings = scenario_io.parse_scenario(args.scenario)
    config = run_config.resolve(args, settings)
    b_values = run_config.parse_b_range(args.b)
    if b_values is not None:
        if len(b_values) != 1:
            raise UsageError("simulate takes a single --b value")
        scenario = replace(scenario, b=b_values[0])

    if args.codebook:
        codebook = scenario_io.load_codebook(args.codebook)
        scheme = "codebook"
        if codebook.b != scenario.b:
            raise InvariantViolation(f"Beam-count mismatch: codebook has {codebook.b} beams, scenario b = {scenario.b}")
    else:
        scheme = args.scheme or ("optimal-contiguous" if scenario.constraint == "contiguous" else "optimal-unconstrained")
        codebook = build_scheme(scenario, scheme, config.grid_points, config.workers)

    report = run_monte_carlo(scenario, codebook, config.samples, config.seed, config.workers, scheme)
    se = "n/a" if report.se is None else f"{report.se:.2e}"
    log_info(f"{scheme}: analytic {report.analytic:.6f}, empirical {report.empirical:.6f} (SE {se})")

    out = args.out or f"results/simulate-b{scenario.b}.csv"
    scenario_io.write_result_table(out, [report])
    scenario_io.write_json(
        scenario_io.sidecar(out, ".meta.json"),
        {"command": "simulate", "scheme": scheme, "b": scenario.b, "overhead": scenario.overhead, **config.as_dict()},
    )
    db_logic.save_run_rows(run_config.ledger(config), "simulate", scenario_io.scenario_digest(settings), [report])
    return 0

EXIT_CODES = {
    0: "success",
    2: "usage error (bad flags, empty scheme filter, invalid b range)",
    3: "parse error (malformed JSON, unsupported schema_version, bad field)",
    4: "invariant violation (masses or weights not summing to 1, beam-count mismatch)",
    5: "solver error (too many cells for the grid, infeasible brute force)",
    6: "I/O error (missing scenario, unwritable output)",
}


def render() -> str:
    """Epilog shown under `beamscan --help`."""
    lines = [
        "Commands:",
        "  design    optimal codebook for the scenario's constraint; writes the result table,",
        "            <out>.codebook.json, <out>.beams.csv, <out>.cells.csv and <out>.meta.json",
        "  simulate  Monte Carlo run of a codebook file or named scheme (--samples, --seed)",
        "  sweep     every scheme over a b range; <out>.plot.csv holds the curves",
        "  bounds    entropy lower bounds and construction upper bounds",
        "  history   list or delete stored runs",
        "",
        "Angles in files are degrees; defaults (grid 3600, samples 100000, seed 42) can be set",
        "with BEAMSCAN_GRID_POINTS, BEAMSCAN_SAMPLES, BEAMSCAN_SEED in the environment or .env.",
        "",
        "Exit codes:",
    ]
    lines += [f"  {code}  {meaning}" for code, meaning in EXIT_CODES.items()]
    return "\n".join(lines)

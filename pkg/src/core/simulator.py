"""
Scenario evaluation: analytic expected widths, Monte Carlo simulation of the
probe/feedback protocol and the cross-scheme comparison.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.angular_pdf import AngularPdf, mixture
from src.core.arcs import DEFAULT_TOL
from src.core.beams import (
    Codebook,
    Constraint,
    design_contiguous,
    design_unconstrained,
    es_codebook,
    halving_codebook,
    induced_partition,
    signature_codes,
    signature_widths,
    uniform_contiguous_codebook,
)
from src.core.errors import InvariantViolation, UsageError
from src.core.partition import DEFAULT_GRID_POINTS, BoundsReport, bounds, expected_width
from src.utils.log import log_info, log_warning

BLOCK_SIZE = 65536


@dataclass(frozen=True)
class User:
    pdf: AngularPdf
    weight: float


@dataclass(frozen=True)
class Scenario:
    users: Tuple[User, ...]
    b: int
    constraint: Constraint = "contiguous"
    d: Optional[int] = None
    T: Optional[int] = None

    def __post_init__(self):
        if not self.users:
            raise InvariantViolation("Scenario needs at least one user")
        if any(user.weight < 0 for user in self.users):
            raise InvariantViolation("User weights must be nonnegative")
        total = sum(user.weight for user in self.users)
        if abs(total - 1.0) > DEFAULT_TOL:
            raise InvariantViolation(f"User weights sum to {total}, expected 1")
        if self.b < 1:
            raise InvariantViolation(f"b must be a positive integer, got {self.b}")
        if self.constraint not in ("unconstrained", "contiguous"):
            raise InvariantViolation(f"Unknown constraint '{self.constraint}'")
        if self.T is not None and self.b + (self.d or 0) > self.T:
            raise InvariantViolation(f"b + d = {self.b + (self.d or 0)} exceeds the frame length T = {self.T}")

    @cached_property
    def mixture(self) -> AngularPdf:
        return mixture([user.pdf for user in self.users], [user.weight for user in self.users])

    @property
    def overhead(self) -> Optional[float]:
        """Fraction of the frame spent on alignment, (b + d) / T."""
        if self.T is None:
            return None
        return (self.b + (self.d or 0)) / self.T


@dataclass(frozen=True)
class EvaluationReport:
    scheme: str
    b: int
    analytic: float
    per_user: Tuple[float, ...]
    bounds: BoundsReport
    gain_vs_es: float
    empirical: Optional[float] = None
    se: Optional[float] = None
    samples: Optional[int] = None
    overhead: Optional[float] = None
    codebook: Optional[Codebook] = field(default=None, repr=False, compare=False)


def _regime(codebook: Codebook) -> str:
    return "contiguous" if codebook.constraint == "contiguous" else "unconstrained"


def analytic_performance(scenario: Scenario, codebook: Codebook, scheme: str = "custom") -> EvaluationReport:
    """Weighted sum of each user's expected UR width over the partition the codebook induces."""
    partition = induced_partition(codebook)
    per_user = tuple(expected_width(partition, user.pdf) for user in scenario.users)
    analytic = float(sum(user.weight * u for user, u in zip(scenario.users, per_user)))
    es_width = expected_width(induced_partition(es_codebook(codebook.b)), scenario.mixture)
    return EvaluationReport(
        scheme=scheme,
        b=codebook.b,
        analytic=analytic,
        per_user=per_user,
        bounds=bounds(scenario.mixture, codebook.b, _regime(codebook)),
        gain_vs_es=es_width / analytic,
        overhead=scenario.overhead,
        codebook=codebook,
    )


def _simulate_block(
    scenario: Scenario, codebook: Codebook, keys: np.ndarray, widths: np.ndarray, seed: int, block: int, size: int
) -> Tuple[int, float, float]:
    """Count, mean and sum of squared deviations of the weighted UR width over one block."""
    values = np.zeros(size)
    for j, user in enumerate(scenario.users):
        rng = np.random.default_rng(np.random.SeedSequence([seed, j, block]))
        aods = user.pdf.sample(rng, size)
        codes = signature_codes(codebook, aods)
        values += user.weight * widths[np.searchsorted(keys, codes)]
    mean = float(values.mean())
    return size, mean, float(np.sum((values - mean) ** 2))


def _merge(a: Tuple[int, float, float], b: Tuple[int, float, float]) -> Tuple[int, float, float]:
    n_a, mean_a, m2_a = a
    n_b, mean_b, m2_b = b
    n = n_a + n_b
    delta = mean_b - mean_a
    return n, mean_a + delta * n_b / n, m2_a + m2_b + delta * delta * n_a * n_b / n


def run_monte_carlo(
    scenario: Scenario,
    codebook: Codebook,
    samples: int,
    seed: int,
    workers: int = 1,
    scheme: str = "custom",
) -> EvaluationReport:
    """
    Draws each user's AoD, collects its feedback signature and records the width
    of the UR the base station infers. Block k of user j draws from
    SeedSequence([seed, j, k]); blocks are merged in order, so the report is the
    same for any worker count.
    """
    if samples < 1:
        raise InvariantViolation(f"samples must be positive, got {samples}")
    table = signature_widths(codebook)
    keys = np.array(sorted(table), dtype=np.int64)
    widths = np.array([table[k] for k in keys.tolist()])

    blocks = [(k, min(BLOCK_SIZE, samples - k * BLOCK_SIZE)) for k in range(math.ceil(samples / BLOCK_SIZE))]
    run = lambda blk: _simulate_block(scenario, codebook, keys, widths, seed, blk[0], blk[1])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, blocks))
    else:
        partials = [run(blk) for blk in blocks]

    total = partials[0]
    for partial in partials[1:]:
        total = _merge(total, partial)
    n, mean, m2 = total

    se: Optional[float] = None
    if n > 1:
        se = math.sqrt(m2 / (n - 1)) / math.sqrt(n)
    else:
        log_warning("Standard error is undefined for a single sample")

    report = analytic_performance(scenario, codebook, scheme)
    return replace(report, empirical=mean, se=se, samples=n)


SCHEMES = ("optimal-unconstrained", "optimal-contiguous", "halving", "uniform-contiguous", "es")


def scheme_builders(
    scenario: Scenario, grid_points: int = DEFAULT_GRID_POINTS, workers: int = 1
) -> Dict[str, Callable[[], Codebook]]:
    pdf, b = scenario.mixture, scenario.b
    return {
        "optimal-unconstrained": lambda: design_unconstrained(pdf, b, grid_points, workers).codebook,
        "optimal-contiguous": lambda: design_contiguous(pdf, b, grid_points, workers).codebook,
        "halving": lambda: halving_codebook(b),
        "uniform-contiguous": lambda: uniform_contiguous_codebook(b),
        "es": lambda: es_codebook(b),
    }


def build_scheme(scenario: Scenario, scheme: str, grid_points: int = DEFAULT_GRID_POINTS, workers: int = 1) -> Codebook:
    builders = scheme_builders(scenario, grid_points, workers)
    if scheme not in builders:
        raise UsageError(f"Unknown scheme '{scheme}', expected one of {', '.join(SCHEMES)}")
    return builders[scheme]()


def compare_schemes(
    scenario: Scenario,
    grid_points: int = DEFAULT_GRID_POINTS,
    schemes: Optional[Sequence[str]] = None,
    workers: int = 1,
) -> List[EvaluationReport]:
    """Analytic reports for every requested scheme, each with bounds and gain over ES."""
    selected = list(SCHEMES if schemes is None else schemes)
    if not selected:
        raise UsageError("Scheme filter is empty")
    reports = []
    for scheme in selected:
        codebook = build_scheme(scenario, scheme, grid_points, workers)
        reports.append(analytic_performance(scenario, codebook, scheme))
    log_info(
        f"b={scenario.b}: " + ", ".join(f"{r.scheme} U={r.analytic:.4f} ({r.gain_vs_es:.2f}x)" for r in reports)
    )
    return reports

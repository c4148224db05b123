from dataclasses import replace

import numpy as np
import pytest

from src.core.arcs import TWO_PI, arc_between
from src.core.beams import Beam, Codebook, es_codebook, halving_codebook, induced_partition
from src.core.errors import InvariantViolation, UsageError
from src.core.partition import expected_width
from src.core.simulator import (
    SCHEMES,
    Scenario,
    User,
    analytic_performance,
    build_scheme,
    compare_schemes,
    run_monte_carlo,
)


def _random_scenario(rng, make_random_pdf, b):
    count = int(rng.integers(1, 4))
    weights = rng.dirichlet(np.ones(count))
    return Scenario(users=tuple(User(pdf=make_random_pdf(), weight=w) for w in weights), b=b)


def _random_codebook(rng, b):
    beams = []
    for _ in range(b):
        start = rng.uniform(0.0, TWO_PI)
        beams.append(Beam(acr=arc_between(start, start + rng.uniform(0.1, TWO_PI - 0.1))))
    return Codebook(beams=tuple(beams), constraint="contiguous")


class TestScenario:
    def test_weights_must_sum_to_one(self, uniform):
        with pytest.raises(InvariantViolation):
            Scenario(users=(User(pdf=uniform, weight=0.6),), b=2)

    def test_frame_overhead(self, quadrant_scenario):
        scenario = replace(quadrant_scenario, d=2, T=100)
        assert scenario.overhead == pytest.approx(0.06)

    def test_alignment_must_fit_frame(self, quadrant_scenario):
        with pytest.raises(InvariantViolation):
            replace(quadrant_scenario, d=10, T=12)


class TestAnalytic:
    def test_es_on_uniform(self, uniform_scenario):
        report = analytic_performance(uniform_scenario, es_codebook(4), "es")
        assert report.analytic == pytest.approx(TWO_PI / 5, abs=1e-12)
        assert report.gain_vs_es == pytest.approx(1.0)

    def test_halving_on_uniform(self, uniform_scenario):
        report = analytic_performance(uniform_scenario, halving_codebook(4), "halving")
        assert report.analytic == pytest.approx(TWO_PI / 16, abs=1e-12)
        assert report.gain_vs_es == pytest.approx(3.2)
        assert report.bounds.lower == pytest.approx(report.analytic)

    def test_weighted_users_equal_mixture(self, rng, make_random_pdf):
        for _ in range(100):
            b = int(rng.integers(1, 6))
            scenario = _random_scenario(rng, make_random_pdf, b)
            codebook = _random_codebook(rng, b) if rng.random() < 0.5 else halving_codebook(b)
            report = analytic_performance(scenario, codebook)
            mixed = expected_width(induced_partition(codebook), scenario.mixture)
            assert report.analytic == pytest.approx(mixed, abs=1e-12)
            assert len(report.per_user) == len(scenario.users)


class TestMonteCarlo:
    def test_constant_width_has_no_spread(self, uniform_scenario):
        report = run_monte_carlo(uniform_scenario, es_codebook(4), samples=10_000, seed=1)
        assert report.empirical == pytest.approx(TWO_PI / 5, abs=1e-12)
        assert report.se == pytest.approx(0.0, abs=1e-12)
        assert report.samples == 10_000

    def test_single_sample_has_no_standard_error(self, quadrant_scenario):
        codebook = build_scheme(quadrant_scenario, "uniform-contiguous")
        report = run_monte_carlo(quadrant_scenario, codebook, samples=1, seed=3)
        assert report.se is None
        assert report.empirical == pytest.approx(np.pi / 4)

    def test_samples_must_be_positive(self, quadrant_scenario):
        with pytest.raises(InvariantViolation):
            run_monte_carlo(quadrant_scenario, es_codebook(4), samples=0, seed=1)

    def test_matches_analytic_within_four_se(self, rng, make_random_pdf):
        for trial in range(20):
            b = int(rng.integers(1, 7))
            scenario = _random_scenario(rng, make_random_pdf, b)
            report = run_monte_carlo(scenario, _random_codebook(rng, b), samples=100_000, seed=trial)
            assert abs(report.empirical - report.analytic) <= 4 * report.se + 1e-9

    def test_same_seed_same_report(self, quadrant_scenario):
        codebook = build_scheme(quadrant_scenario, "halving")
        first = run_monte_carlo(quadrant_scenario, codebook, samples=50_000, seed=7)
        second = run_monte_carlo(quadrant_scenario, codebook, samples=50_000, seed=7)
        assert first == second

    def test_report_does_not_depend_on_workers(self, quadrant_scenario):
        codebook = build_scheme(quadrant_scenario, "uniform-contiguous")
        reports = [
            run_monte_carlo(quadrant_scenario, codebook, samples=200_000, seed=42, workers=w) for w in (1, 2, 8)
        ]
        assert reports[0] == reports[1] == reports[2]


class TestSchemes:
    def test_unknown_scheme(self, quadrant_scenario):
        with pytest.raises(UsageError):
            build_scheme(quadrant_scenario, "random")

    def test_empty_filter(self, quadrant_scenario):
        with pytest.raises(UsageError):
            compare_schemes(quadrant_scenario, schemes=[])

    def test_uniform_gains(self, uniform_scenario):
        reports = {r.scheme: r for r in compare_schemes(uniform_scenario, grid_points=720)}
        assert set(reports) == set(SCHEMES)
        assert reports["optimal-unconstrained"].analytic == pytest.approx(TWO_PI / 16, abs=1e-9)
        assert reports["optimal-contiguous"].analytic == pytest.approx(np.pi / 4, abs=1e-9)
        assert reports["optimal-unconstrained"].gain_vs_es == pytest.approx(3.2, abs=1e-6)
        assert reports["optimal-contiguous"].gain_vs_es == pytest.approx(1.6, abs=1e-6)
        assert reports["es"].gain_vs_es == pytest.approx(1.0)

    @pytest.mark.parametrize("b", [2, 3, 4])
    def test_scheme_ordering(self, quadrant_scenario, b):
        scenario = replace(quadrant_scenario, b=b)
        u = {r.scheme: r.analytic for r in compare_schemes(scenario, grid_points=720)}
        assert u["optimal-unconstrained"] <= u["optimal-contiguous"] * (1 + 1e-3)
        assert u["optimal-contiguous"] <= u["uniform-contiguous"] + 1e-9
        assert u["optimal-contiguous"] <= u["es"] + 1e-9
        assert u["optimal-unconstrained"] <= u["halving"] + 1e-9

    @pytest.mark.slow
    def test_bounds_sandwich_optimal_designs(self, rng, make_random_pdf):
        for _ in range(200):
            b = int(rng.integers(1, 7))
            scenario = _random_scenario(rng, make_random_pdf, b)
            for report in compare_schemes(scenario, grid_points=360, schemes=["optimal-unconstrained", "optimal-contiguous"]):
                assert report.bounds.lower - 1e-9 <= report.analytic <= report.bounds.upper + 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("b, gain", [(2, 1.48), (3, 1.87), (5, 2.22)])
def test_two_user_contiguous_gains(quadrant_scenario, b, gain):
    scenario = replace(quadrant_scenario, b=b)
    (report,) = compare_schemes(scenario, grid_points=3600, schemes=["optimal-contiguous"])
    assert report.gain_vs_es == pytest.approx(gain, abs=0.03)


def _quadrant_optimum(b):
    """Best split of each half-circle into n cells on the dense quadrant and b - n on the sparse one."""
    return min(np.pi * (7 / (15 * n) + 1 / (30 * (b - n))) for n in range(1, b))


@pytest.mark.slow
@pytest.mark.parametrize("b, width, gain", [(4, 17 * np.pi / 90, 36 / 17), (6, 19 * np.pi / 150, 300 / 133)])
def test_two_user_contiguous_optimum_splits_quadrants(quadrant_scenario, b, width, gain):
    assert _quadrant_optimum(b) == pytest.approx(width, abs=1e-12)
    scenario = replace(quadrant_scenario, b=b)
    (report,) = compare_schemes(scenario, grid_points=3600, schemes=["optimal-contiguous"])
    assert report.analytic == pytest.approx(width, abs=1e-9)
    assert report.gain_vs_es == pytest.approx(gain, abs=1e-6)


@pytest.mark.slow
def test_designed_codebook_million_samples(quadrant_scenario):
    codebook = build_scheme(quadrant_scenario, "optimal-contiguous", grid_points=3600)
    report = run_monte_carlo(quadrant_scenario, codebook, samples=1_000_000, seed=42, workers=4)
    assert report.analytic == pytest.approx(17 * np.pi / 90, abs=1e-9)
    assert abs(report.empirical - report.analytic) <= 3 * report.se

import math

import numpy as np
import pytest

from src.core.angular_pdf import monotone_rearrangement, piecewise_pdf
from src.core.arcs import TWO_PI, Arc, arc_between
from src.core.errors import InvariantViolation, SolverError
from src.core.partition import (
    BoundaryVector,
    Partition,
    bounds,
    boundary_objective,
    brute_force_boundaries,
    candidate_grid,
    expected_width,
    optimize_boundaries,
    partition_from_boundaries,
    quantizer_lower_bound,
)

from tests.conftest import HALF_PI


def _equal_cells(m):
    edges = np.linspace(0.0, TWO_PI, m + 1)
    return Partition.from_regions([(Arc(a, b),) for a, b in zip(edges, edges[1:])])


class TestPartition:
    def test_cells_must_tile_the_circle(self):
        with pytest.raises(InvariantViolation):
            Partition.from_regions([(Arc(0.0, np.pi),)])
        with pytest.raises(InvariantViolation):
            Partition.from_regions([(Arc(0.0, 4.0),), (Arc(3.0, TWO_PI),)])

    def test_from_circular_boundaries(self):
        partition = partition_from_boundaries(BoundaryVector(x=(1.0, 3.0, 5.0), circular=True))
        assert partition.size == 3
        assert partition.cells[2].region == arc_between(5.0, 1.0)
        assert sum(partition.widths) == pytest.approx(TWO_PI)

    def test_boundary_vector_validation(self):
        with pytest.raises(InvariantViolation):
            BoundaryVector(x=(2.0, 1.0), circular=True)
        with pytest.raises(InvariantViolation):
            BoundaryVector(x=(0.0, 1.0), circular=True)
        with pytest.raises(InvariantViolation):
            BoundaryVector(x=(1.0, 2.0), circular=False)


class TestExpectedWidth:
    def test_single_cell(self, quadrant_mixture):
        assert expected_width(_equal_cells(1), quadrant_mixture) == pytest.approx(TWO_PI)

    @pytest.mark.parametrize("m", [1, 2, 3, 8, 16])
    def test_equal_cells_under_uniform(self, uniform, m):
        assert expected_width(_equal_cells(m), uniform) == pytest.approx(TWO_PI / m, abs=1e-12)

    def test_quadrants_of_two_user_mixture(self, quadrant_mixture):
        assert expected_width(_equal_cells(4), quadrant_mixture) == pytest.approx(HALF_PI, abs=1e-12)

    def test_quantizer_bound_holds(self, rng, make_random_pdf):
        for _ in range(1000):
            pdf = make_random_pdf()
            x = np.unique(rng.uniform(1e-3, TWO_PI, int(rng.integers(1, 9))))
            vector = BoundaryVector(x=tuple(x), circular=True)
            lower = quantizer_lower_bound(pdf, vector.size)
            assert boundary_objective(pdf, vector) >= lower - 1e-9


class TestBounds:
    def test_uniform_unconstrained_is_tight(self, uniform):
        for b in range(1, 9):
            report = bounds(uniform, b, "unconstrained")
            assert report.lower == pytest.approx(TWO_PI / 2**b, rel=1e-12)
            assert report.upper == pytest.approx(TWO_PI / 2**b, rel=1e-12)

    def test_uniform_contiguous_is_tight(self, uniform):
        for b in range(1, 9):
            report = bounds(uniform, b, "contiguous")
            assert report.lower == pytest.approx(np.pi / b, rel=1e-12)
            assert report.upper == pytest.approx(np.pi / b, rel=1e-12)

    def test_unknown_regime(self, uniform):
        with pytest.raises(InvariantViolation):
            bounds(uniform, 2, "diagonal")


class TestCandidateGrid:
    def test_includes_edges_and_splits(self, quadrant_mixture):
        angles = candidate_grid(quadrant_mixture, 100, 7)
        assert angles[0] == 0.0
        assert np.all(np.diff(angles) > 0)
        assert np.all(angles < TWO_PI)
        for target in [HALF_PI, 3 * HALF_PI] + [k * TWO_PI / 7 for k in range(7)]:
            assert np.min(np.abs(angles - target)) < 1e-12


class TestOptimizeBoundaries:
    def test_uniform_is_split_evenly(self, uniform):
        vector, objective = optimize_boundaries(uniform, 8, "linear", grid_points=3600)
        assert objective == pytest.approx(TWO_PI / 8, abs=1e-12)
        assert vector.x == pytest.approx(tuple(k * np.pi / 4 for k in range(8)), abs=1e-12)

    def test_two_level_density(self):
        monotone, _ = monotone_rearrangement(piecewise_pdf([0.0, np.pi, TWO_PI], [0.25, 0.75]))
        vector, objective = optimize_boundaries(monotone, 2, "linear", grid_points=3600)
        assert vector.x[1] == pytest.approx(5 * np.pi / 6, abs=TWO_PI / 3600)
        assert objective == pytest.approx(np.pi * 23 / 24, abs=1e-3)

    def test_linear_mode_needs_monotone_pdf(self, quadrant_mixture):
        with pytest.raises(SolverError):
            optimize_boundaries(quadrant_mixture, 4, "linear", grid_points=360)

    def test_too_many_cells(self, uniform):
        with pytest.raises(SolverError):
            optimize_boundaries(uniform, 20, "circular", grid_points=16)

    def test_single_cell(self, quadrant_mixture):
        vector, objective = optimize_boundaries(quadrant_mixture, 1, "circular", grid_points=360)
        assert vector.x == (TWO_PI,)
        assert objective == pytest.approx(TWO_PI)

    def test_circular_objective_matches_partition(self, quadrant_mixture):
        vector, objective = optimize_boundaries(quadrant_mixture, 6, "circular", grid_points=720)
        assert vector.size == 6
        assert objective == pytest.approx(expected_width(partition_from_boundaries(vector), quadrant_mixture), abs=1e-12)
        assert objective >= quantizer_lower_bound(quadrant_mixture, 6) - 1e-9

    def test_worker_count_does_not_change_result(self, quadrant_mixture):
        one = optimize_boundaries(quadrant_mixture, 8, "circular", grid_points=720, workers=1)
        four = optimize_boundaries(quadrant_mixture, 8, "circular", grid_points=720, workers=4)
        assert one == four

    def test_objective_never_grows_with_more_cells(self, make_random_pdf):
        for _ in range(20):
            monotone, _ = monotone_rearrangement(make_random_pdf())
            values = [optimize_boundaries(monotone, m, "linear", grid_points=240)[1] for m in (1, 2, 3, 4, 5, 6, 8)]
            assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))

    def test_wider_cells_hold_lower_density(self, quadrant_mixture):
        monotone, _ = monotone_rearrangement(quadrant_mixture)
        vector, _ = optimize_boundaries(monotone, 16, "linear", grid_points=3600)
        partition = partition_from_boundaries(vector)
        step = TWO_PI / 3600
        for narrow in partition.cells:
            for wide in partition.cells:
                if wide.width - narrow.width <= step + 1e-12:
                    continue
                (n_arc,), (w_arc,) = narrow.region, wide.region
                n_min = monotone.density_at(np.array([n_arc.start + 1e-9, n_arc.end])).min()
                w_max = monotone.density_at(np.array([w_arc.start + 1e-9, w_arc.end])).max()
                assert n_min >= w_max - 1e-12


@pytest.mark.slow
class TestBruteForceOracle:
    @pytest.mark.parametrize("mode", ["linear", "circular"])
    def test_dp_matches_exhaustive_search(self, rng, make_random_pdf, mode):
        for _ in range(50):
            pdf = make_random_pdf(4)
            if mode == "linear":
                pdf, _ = monotone_rearrangement(pdf)
            grid = int(rng.integers(16, 33))
            cells = int(rng.integers(1, 5))
            _, dp = optimize_boundaries(pdf, cells, mode, grid_points=grid)
            _, exhaustive = brute_force_boundaries(pdf, cells, mode, grid_points=grid)
            assert dp == pytest.approx(exhaustive, abs=1e-12)

    def test_brute_force_grid_limit(self, uniform):
        with pytest.raises(SolverError):
            brute_force_boundaries(uniform, 2, "circular", grid_points=65)

    def test_brute_force_subset_limit(self, uniform):
        assert math.comb(64, 12) > 10_000_000
        with pytest.raises(SolverError):
            brute_force_boundaries(uniform, 12, "circular", grid_points=64)

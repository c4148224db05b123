"""
Uncertainty-region partitions, the expected-width objective, the boundary
optimisation and the information-theoretic bounds.

The boundary optimisation is an exact dynamic programme over a candidate grid.
Cell cost (x_j - x_i) * (F(x_j) - F(x_i)) is a product of two additive interval
measures, so it obeys the quadrangle inequality and every DP layer can be solved
by divide and conquer over monotone argmins.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from src.core.angular_pdf import AngularPdf, entropy_bits, integrate
from src.core.arcs import (
    DEFAULT_TOL,
    SNAP_TOL,
    TWO_PI,
    Arc,
    Region,
    arc_between,
    canonical_region,
    check_disjoint,
    full_circle,
    region_width,
    wrap_angle,
)
from src.core.errors import InvariantViolation, SolverError
from src.utils.log import log_debug, log_warning

Mode = Literal["linear", "circular"]
Regime = Literal["unconstrained", "contiguous"]

DEFAULT_GRID_POINTS = 3600
COARSE_ANCHORS = 64
BRUTE_FORCE_LIMIT = 10_000_000
BRUTE_FORCE_CHUNK = 200_000


@dataclass(frozen=True)
class Cell:
    id: int
    region: Region
    signature: Optional[Tuple[bool, ...]] = None

    @property
    def width(self) -> float:
        return region_width(self.region)


@dataclass(frozen=True)
class Partition:
    cells: Tuple[Cell, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        cells = tuple(cell for cell in self.cells if cell.width > SNAP_TOL)
        if not cells:
            raise InvariantViolation("Partition has no cell of positive width")
        all_arcs = [arc for cell in cells for arc in cell.region]
        check_disjoint(all_arcs, self.tol)
        total = region_width(all_arcs)
        if abs(total - TWO_PI) > self.tol:
            raise InvariantViolation(f"Cells cover {total} rad, expected 2π")
        object.__setattr__(self, "cells", cells)

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def widths(self) -> List[float]:
        return [cell.width for cell in self.cells]

    @classmethod
    def from_regions(cls, regions: Sequence[Sequence[Arc]], tol: float = DEFAULT_TOL) -> "Partition":
        return cls(
            cells=tuple(Cell(id=k + 1, region=canonical_region(r)) for k, r in enumerate(regions)),
            tol=tol,
        )


@dataclass(frozen=True)
class BoundaryVector:
    """
    Cell boundaries x_1 < ... < x_M. Linear vectors are anchored at x_1 = 0 and
    the last cell ends at 2π; circular vectors live in (0, 2π] and the last cell
    wraps back to x_1.
    """

    x: Tuple[float, ...]
    circular: bool

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if not x:
            raise InvariantViolation("BoundaryVector needs at least one boundary")
        if any(right <= left for left, right in zip(x, x[1:])):
            raise InvariantViolation(f"Boundaries must be strictly increasing, got {x}")
        if self.circular and not (0.0 < x[0] and x[-1] <= TWO_PI):
            raise InvariantViolation(f"Circular boundaries must lie in (0, 2π], got {x}")
        if not self.circular and (x[0] != 0.0 or x[-1] >= TWO_PI):
            raise InvariantViolation(f"Linear boundaries must start at 0 and stay below 2π, got {x}")
        object.__setattr__(self, "x", x)

    @property
    def size(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class BoundsReport:
    lower: float
    upper: float
    entropy_bits: float
    regime: Regime

    def __post_init__(self):
        if self.lower > self.upper + DEFAULT_TOL:
            raise InvariantViolation(f"Lower bound {self.lower} exceeds upper bound {self.upper}")


@dataclass
class _Grid:
    """Candidate angles in [0, 2π) and the cdf evaluated on them."""

    angles: np.ndarray
    cdf: np.ndarray = field(repr=False)


def partition_from_boundaries(boundaries: BoundaryVector) -> Partition:
    x = boundaries.x
    if boundaries.size == 1:
        return Partition.from_regions([full_circle()])
    if not boundaries.circular:
        ends = list(x[1:]) + [TWO_PI]
        return Partition.from_regions([(Arc(a, b),) for a, b in zip(x, ends)])
    regions = [arc_between(a, b) for a, b in zip(x, x[1:])]
    regions.append(arc_between(x[-1], x[0]))
    return Partition.from_regions(regions)


def expected_width(partition: Partition, pdf: AngularPdf) -> float:
    """Sum over cells of cell width times the probability mass in the cell."""
    return float(sum(cell.width * integrate(pdf, cell.region, pdf.tol) for cell in partition.cells))


def boundary_objective(pdf: AngularPdf, boundaries: BoundaryVector) -> float:
    return expected_width(partition_from_boundaries(boundaries), pdf)


def quantizer_lower_bound(pdf: AngularPdf, cells: int) -> float:
    """2 ** (entropy - log2(cells)): no partition with that many cells does better."""
    return float(2.0 ** (entropy_bits(pdf) - math.log2(cells)))


def bounds(pdf: AngularPdf, b: int, regime: Regime) -> BoundsReport:
    if b < 1:
        raise InvariantViolation(f"b must be a positive integer, got {b}")
    h = entropy_bits(pdf)
    if regime == "unconstrained":
        return BoundsReport(lower=2.0 ** (h - b), upper=TWO_PI / 2.0**b, entropy_bits=h, regime=regime)
    if regime == "contiguous":
        return BoundsReport(lower=2.0**h / (2 * b), upper=np.pi / b, entropy_bits=h, regime=regime)
    raise InvariantViolation(f"Unknown regime '{regime}'")


def candidate_grid(pdf: AngularPdf, grid_points: int, cells: int) -> np.ndarray:
    """
    Uniform grid of grid_points angles augmented with every pdf piece boundary
    and the equal-split angles k·2π/M.
    """
    uniform = np.arange(grid_points) * (TWO_PI / grid_points)
    split = np.arange(cells) * (TWO_PI / cells)
    angles = np.concatenate([uniform, split, pdf.edge_array[:-1]])
    angles = np.unique(np.mod(angles, TWO_PI))
    keep = np.concatenate([[True], np.diff(angles) > SNAP_TOL])
    angles = angles[keep]
    # a point just below 2π collapses onto 0
    if TWO_PI - angles[-1] <= SNAP_TOL:
        angles = angles[:-1]
    return angles


def _build_grid(pdf: AngularPdf, grid_points: int, cells: int) -> _Grid:
    angles = candidate_grid(pdf, grid_points, cells)
    return _Grid(angles=angles, cdf=pdf.cdf(angles))


def _validate_request(pdf: AngularPdf, cells: int, mode: str, grid_points: int):
    if cells < 1:
        raise SolverError(f"Number of cells must be positive, got {cells}")
    if mode not in ("linear", "circular"):
        raise SolverError(f"Unknown mode '{mode}', expected 'linear' or 'circular'")
    if cells > grid_points:
        raise SolverError(f"{cells} cells do not fit on a grid of {grid_points} points")
    if mode == "linear" and not pdf.is_monotone():
        raise SolverError("Linear mode needs a non-increasing pdf; apply monotone_rearrangement first")
    if grid_points < 8 * cells:
        log_warning(f"Grid of {grid_points} points is coarser than 8 points per cell (M = {cells})")


def _layer(pos: np.ndarray, cum: np.ndarray, prev: np.ndarray, ilo: int, ihi: int, jhi: int):
    """
    One DP layer: for every i in [ilo, ihi] the leftmost argmin over j in (i, jhi]
    of (pos_j - pos_i)(cum_j - cum_i) + prev_j, solved level by level with
    vectorised divide and conquer.
    """
    n = len(pos)
    value = np.full(n, np.inf)
    arg = np.full(n, -1, dtype=np.int64)

    tasks = np.array([[ilo, ihi, ilo + 1, jhi]], dtype=np.int64)
    while len(tasks):
        t_ilo, t_ihi, t_jlo, t_jhi = tasks.T
        mid = (t_ilo + t_ihi) // 2
        lo = np.maximum(t_jlo, mid + 1)
        counts = t_jhi - lo + 1
        starts = np.cumsum(counts) - counts
        seg = np.repeat(np.arange(len(tasks)), counts)
        j = lo[seg] + (np.arange(counts.sum()) - starts[seg])
        i = mid[seg]

        vals = (pos[j] - pos[i]) * (cum[j] - cum[i]) + prev[j]
        best = np.minimum.reduceat(vals, starts)
        hits = np.flatnonzero(vals == best[seg])
        first = hits[np.concatenate([[True], seg[hits][1:] != seg[hits][:-1]])]
        opt = j[first]

        value[mid] = best
        arg[mid] = opt

        left = np.stack([t_ilo, mid - 1, t_jlo, opt], axis=1)
        right = np.stack([mid + 1, t_ihi, opt, t_jhi], axis=1)
        tasks = np.concatenate([left[t_ilo <= mid - 1], right[mid + 1 <= t_ihi]])
    return value, arg


def _segment_dp(pos: np.ndarray, cum: np.ndarray, cells: int) -> Tuple[List[int], float]:
    """
    Splits pos[0]..pos[-1] into `cells` contiguous segments on grid indices,
    minimising the summed width × mass. Returns the segment start indices and the DP value.
    """
    last = len(pos) - 1
    if cells == 1:
        return [0], float((pos[last] - pos[0]) * (cum[last] - cum[0]))

    # suffix[i]: best cost of covering (pos_i, pos_last] with the remaining cells
    suffix = np.full(len(pos), np.inf)
    suffix[:last] = (pos[last] - pos[:last]) * (cum[last] - cum[:last])
    args = []
    for m in range(2, cells + 1):
        ilo = cells - m
        ihi = 0 if m == cells else last - m
        value, arg = _layer(pos, cum, suffix, ilo, ihi, last - m + 1)
        suffix = value
        args.append(arg)

    starts = [0]
    i = 0
    for arg in reversed(args):
        i = int(arg[i])
        starts.append(i)
    return starts, float(suffix[0])


def _linear_solve(pdf: AngularPdf, grid: _Grid, cells: int) -> Tuple[BoundaryVector, float]:
    pos = np.append(grid.angles, TWO_PI)
    cum = np.append(grid.cdf, 1.0)
    starts, _ = _segment_dp(pos, cum, cells)
    vector = BoundaryVector(x=tuple(float(pos[s]) for s in starts), circular=False)
    return vector, boundary_objective(pdf, vector)


def _anchored_solve(grid: _Grid, cells: int, anchor: int) -> Tuple[float, Tuple[float, ...]]:
    """Best circular partition with one boundary pinned at grid.angles[anchor]."""
    angles, cdf = grid.angles, grid.cdf
    a0, f0 = angles[anchor], cdf[anchor]
    pos = np.concatenate([angles[anchor:] - a0, angles[:anchor] + TWO_PI - a0, [TWO_PI]])
    cum = np.concatenate([cdf[anchor:] - f0, cdf[:anchor] + 1.0 - f0, [1.0]])
    starts, value = _segment_dp(pos, cum, cells)
    n = len(angles)
    x = sorted(wrap_angle(angles[(anchor + s) % n]) for s in starts)
    return value, tuple(x)


def _anchor_set(pdf: AngularPdf, grid: _Grid) -> List[int]:
    angles = grid.angles
    n = len(angles)
    if n <= COARSE_ANCHORS:
        return list(range(n))
    coarse = np.arange(COARSE_ANCHORS) * (TWO_PI / COARSE_ANCHORS)
    targets = np.concatenate([coarse, pdf.edge_array[:-1]])
    idx = np.searchsorted(angles, targets - SNAP_TOL, side="left") % n
    return sorted(set(int(i) for i in idx))


def _circular_solve(
    pdf: AngularPdf, grid: _Grid, cells: int, workers: int
) -> Tuple[BoundaryVector, float]:
    n = len(grid.angles)
    if cells == 1:
        vector = BoundaryVector(x=(TWO_PI,), circular=True)
        return vector, boundary_objective(pdf, vector)

    anchors = _anchor_set(pdf, grid)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _anchored_solve(grid, cells, a), anchors))
    else:
        results = [_anchored_solve(grid, cells, a) for a in anchors]
    # reduction order is fixed, so the winner does not depend on the worker count
    best_k = min(range(len(anchors)), key=lambda k: (results[k][0], results[k][1]))
    best_anchor, best = anchors[best_k], results[best_k]

    # refine the anchor by hill climbing with a halving step
    if n > COARSE_ANCHORS:
        visited = set(anchors)
        step = max(n // COARSE_ANCHORS, 1)
        while step >= 1:
            improved = False
            for candidate in ((best_anchor - step) % n, (best_anchor + step) % n):
                if candidate in visited:
                    continue
                visited.add(candidate)
                trial = _anchored_solve(grid, cells, candidate)
                if (trial[0], trial[1]) < (best[0], best[1]):
                    best, best_anchor, improved = trial, candidate, True
            if not improved:
                step //= 2
        log_debug(f"Circular DP evaluated {len(visited)} anchors, best anchor index {best_anchor}")

    vector = BoundaryVector(x=best[1], circular=True)
    return vector, boundary_objective(pdf, vector)


def optimize_boundaries(
    pdf: AngularPdf,
    cells: int,
    mode: Mode = "circular",
    grid_points: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
) -> Tuple[BoundaryVector, float]:
    """
    Grid-exact minimiser of the summed width × mass over `cells` contiguous
    cells. Linear mode pins the first boundary at 0 and expects a non-increasing pdf;
    circular mode lets the cells wrap around 2π.
    """
    _validate_request(pdf, cells, mode, grid_points)
    grid = _build_grid(pdf, grid_points, cells)
    if cells > len(grid.angles):
        raise SolverError(f"{cells} cells do not fit on {len(grid.angles)} candidate angles")
    if mode == "linear":
        vector, objective = _linear_solve(pdf, grid, cells)
    else:
        vector, objective = _circular_solve(pdf, grid, cells, workers)
    log_debug(f"optimize_boundaries(M={cells}, mode={mode}) -> {objective:.9f}")
    return vector, objective


def _combination_chunks(pool: int, r: int):
    it = combinations(range(pool), r)
    while True:
        chunk = np.array(list(islice(it, BRUTE_FORCE_CHUNK)), dtype=np.int64).reshape(-1, r)
        if not len(chunk):
            return
        yield chunk


def brute_force_boundaries(
    pdf: AngularPdf, cells: int, mode: Mode = "circular", grid_points: int = 32
) -> Tuple[BoundaryVector, float]:
    """Exhaustive search over every boundary subset of the candidate grid."""
    if grid_points > 64:
        raise SolverError(f"Brute force is limited to 64 grid points, got {grid_points}")
    _validate_request(pdf, cells, mode, grid_points)
    grid = _build_grid(pdf, grid_points, cells)
    n = len(grid.angles)

    if mode == "linear":
        pool, r = n - 1, cells - 1
    else:
        pool, r = n, cells
    if r > pool or math.comb(pool, r) > BRUTE_FORCE_LIMIT:
        raise SolverError(f"Brute force over C({pool}, {r}) subsets is infeasible")

    if cells == 1:
        x = (0.0,) if mode == "linear" else (TWO_PI,)
        vector = BoundaryVector(x=x, circular=mode == "circular")
        return vector, boundary_objective(pdf, vector)

    best_value, best_combo = np.inf, None
    if mode == "linear":
        pos = np.append(grid.angles, TWO_PI)
        cum = np.append(grid.cdf, 1.0)
        for chunk in _combination_chunks(pool, r):
            idx = np.hstack([np.zeros((len(chunk), 1), dtype=np.int64), chunk + 1,
                             np.full((len(chunk), 1), n, dtype=np.int64)])
            values = np.sum(np.diff(pos[idx], axis=1) * np.diff(cum[idx], axis=1), axis=1)
            k = int(np.argmin(values))
            if values[k] < best_value:
                best_value, best_combo = values[k], idx[k, :-1]
        x = tuple(float(pos[i]) for i in best_combo)
        vector = BoundaryVector(x=x, circular=False)
    else:
        for chunk in _combination_chunks(pool, r):
            ang = grid.angles[chunk]
            cdf = grid.cdf[chunk]
            widths = np.diff(np.hstack([ang, ang[:, :1] + TWO_PI]), axis=1)
            masses = np.diff(np.hstack([cdf, cdf[:, :1] + 1.0]), axis=1)
            values = np.sum(widths * masses, axis=1)
            k = int(np.argmin(values))
            if values[k] < best_value:
                best_value, best_combo = values[k], chunk[k]
        x = tuple(sorted(wrap_angle(grid.angles[i]) for i in best_combo))
        vector = BoundaryVector(x=x, circular=True)
    return vector, boundary_objective(pdf, vector)

"""
Piecewise-constant probability densities on the circle (0, 2π].

An AngularPdf is stored as its piece edges (0 = e_0 < ... < e_P = 2π) and one
density per piece. It houses the per-user AoD priors as well as their weighted
mixture, which is the only prior the design pipelines ever look at.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np

from src.core.arcs import (
    DEFAULT_TOL,
    SNAP_TOL,
    TWO_PI,
    Arc,
    Region,
    canonical_region,
    check_disjoint,
    intersect_arc,
    shift_arc,
)
from src.core.errors import InvariantViolation
from src.utils.log import log_warning

# Densities closer than this (relative) are the same level.
LEVEL_RTOL = 1e-12


def _same_level(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=LEVEL_RTOL, abs_tol=0.0)


@dataclass(frozen=True)
class AngularPdf:
    edges: Tuple[float, ...]
    densities: Tuple[float, ...]
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        edges = [float(e) for e in self.edges]
        densities = [float(d) for d in self.densities]

        if len(edges) != len(densities) + 1 or not densities:
            raise InvariantViolation(
                f"Need one density per piece, got {len(edges)} edges and {len(densities)} densities"
            )
        if abs(edges[0]) > self.tol or abs(edges[-1] - TWO_PI) > self.tol:
            raise InvariantViolation(f"Pieces must cover (0, 2π], got ({edges[0]}, {edges[-1]}]")
        edges[0], edges[-1] = 0.0, TWO_PI
        if any(right <= left for left, right in zip(edges, edges[1:])):
            raise InvariantViolation("Piece edges must be strictly increasing")
        if any(d < 0 for d in densities):
            raise InvariantViolation(f"Densities must be nonnegative, got {min(densities)}")

        widths = np.diff(edges)
        mass = float(np.dot(widths, densities))
        if abs(mass - 1.0) > self.tol:
            raise InvariantViolation(f"Density integrates to {mass}, expected 1")

        # Canonical form: adjacent pieces on the same level are merged.
        merged_edges = [edges[0]]
        merged_densities: List[float] = []
        merged_masses: List[float] = []
        for right, density, width in zip(edges[1:], densities, widths):
            if merged_densities and _same_level(merged_densities[-1], density):
                merged_masses[-1] += density * width
                merged_edges[-1] = right
                merged_densities[-1] = merged_masses[-1] / (right - merged_edges[-2])
            else:
                merged_edges.append(right)
                merged_densities.append(density)
                merged_masses.append(density * width)

        object.__setattr__(self, "edges", tuple(merged_edges))
        object.__setattr__(self, "densities", tuple(merged_densities))

        if self.has_zero_density:
            log_warning("AngularPdf has zero-density pieces; the AoD prior is not fully supported")

    @property
    def has_zero_density(self) -> bool:
        return any(d == 0.0 for d in self.densities)

    @property
    def pieces(self) -> List[Tuple[Arc, float]]:
        return [
            (Arc(left, right), density)
            for left, right, density in zip(self.edges, self.edges[1:], self.densities)
        ]

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=float)

    @cached_property
    def density_array(self) -> np.ndarray:
        return np.asarray(self.densities, dtype=float)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """Mass on (0, e_k] for every edge e_k."""
        masses = np.diff(self.edge_array) * self.density_array
        return np.concatenate([[0.0], np.cumsum(masses)])

    def density_at(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        idx = np.searchsorted(self.edge_array, theta, side="left") - 1
        idx = np.clip(idx, 0, len(self.densities) - 1)
        return self.density_array[idx]

    def cdf(self, theta) -> np.ndarray:
        """Mass on (0, theta] for theta in [0, 2π]."""
        theta = np.asarray(theta, dtype=float)
        idx = np.searchsorted(self.edge_array, theta, side="right") - 1
        idx = np.clip(idx, 0, len(self.densities) - 1)
        return self.cumulative[idx] + (theta - self.edge_array[idx]) * self.density_array[idx]

    def is_monotone(self) -> bool:
        """True when the densities never increase from 0 to 2π."""
        return all(
            right <= left or _same_level(left, right)
            for left, right in zip(self.densities, self.densities[1:])
        )

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Inverse-CDF draws in (0, 2π]."""
        u = 1.0 - rng.random(n)
        cumulative = self.cumulative
        idx = np.searchsorted(cumulative[1:], u, side="left")
        idx = np.clip(idx, 0, len(self.densities) - 1)
        density = self.density_array[idx]
        offset = np.divide(u - cumulative[idx], density, out=np.zeros_like(u), where=density > 0)
        theta = self.edge_array[idx] + offset
        return np.clip(theta, self.edge_array[idx], self.edge_array[idx + 1])


def uniform_pdf() -> AngularPdf:
    return AngularPdf(edges=(0.0, TWO_PI), densities=(1.0 / TWO_PI,))


def piecewise_pdf(edges: Sequence[float], masses: Sequence[float], tol: float = DEFAULT_TOL) -> AngularPdf:
    """Builds a pdf from piece edges (radians) and the probability mass of each piece."""
    widths = np.diff(np.asarray(edges, dtype=float))
    if len(widths) != len(masses):
        raise InvariantViolation(f"Got {len(masses)} masses for {len(widths)} pieces")
    densities = [float(m) / float(w) for m, w in zip(masses, widths)]
    return AngularPdf(edges=tuple(edges), densities=tuple(densities), tol=tol)


def mixture(pdfs: Sequence[AngularPdf], weights: Sequence[float], tol: float = DEFAULT_TOL) -> AngularPdf:
    """Pointwise weighted sum of densities, the single-user equivalent prior."""
    if not pdfs or len(pdfs) != len(weights):
        raise InvariantViolation(
            f"Need matching nonempty lists, got {len(pdfs)} pdfs and {len(weights)} weights"
        )
    if any(w < 0 for w in weights):
        raise InvariantViolation(f"Weights must be nonnegative, got {list(weights)}")
    if abs(sum(weights) - 1.0) > tol:
        raise InvariantViolation(f"Weights sum to {sum(weights)}, expected 1")

    edges = np.unique(np.concatenate([pdf.edge_array for pdf in pdfs]))
    keep = np.concatenate([[True], np.diff(edges) > SNAP_TOL])
    edges = edges[keep]
    edges[-1] = TWO_PI
    midpoints = 0.5 * (edges[:-1] + edges[1:])

    density = np.zeros(len(midpoints))
    for pdf, weight in zip(pdfs, weights):
        density += weight * pdf.density_at(midpoints)

    return AngularPdf(edges=tuple(edges), densities=tuple(density), tol=tol)


def integrate(pdf: AngularPdf, region: Sequence[Arc], tol: float = DEFAULT_TOL) -> float:
    check_disjoint(region, tol)
    if not region:
        return 0.0
    starts = np.array([arc.start for arc in region])
    ends = np.array([arc.end for arc in region])
    return float(np.sum(pdf.cdf(ends) - pdf.cdf(starts)))


def entropy_bits(pdf: AngularPdf) -> float:
    widths = np.diff(pdf.edge_array)
    d = pdf.density_array
    positive = d > 0
    return float(-np.sum(widths[positive] * d[positive] * np.log2(d[positive])))


@dataclass(frozen=True)
class RearrangementMap:
    """
    Measure-preserving piecewise translation g of the circle. Each source arc is
    moved by its offset; the images tile (0, 2π].
    """

    segments: Tuple[Tuple[Arc, float], ...]

    @property
    def is_identity(self) -> bool:
        return all(offset == 0.0 for _, offset in self.segments)

    def forward(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.array(theta, copy=True)
        for source, offset in self.segments:
            inside = (theta > source.start) & (theta <= source.end)
            out = np.where(inside, theta + offset, out)
        return out


def identity_map() -> RearrangementMap:
    return RearrangementMap(segments=((Arc(0.0, TWO_PI), 0.0),))


def _level_ranks(densities: Sequence[float]) -> List[int]:
    """Rank of each density among the distinct levels, highest level first."""
    levels: List[float] = []
    for value in sorted(densities, reverse=True):
        if not levels or not _same_level(levels[-1], value):
            levels.append(value)
    return [next(i for i, level in enumerate(levels) if _same_level(level, d)) for d in densities]


def monotone_rearrangement(pdf: AngularPdf) -> Tuple[AngularPdf, RearrangementMap]:
    """
    Decreasing rearrangement: pieces sorted by non-increasing density, ties kept
    in their circular order.
    """
    pieces = pdf.pieces
    ranks = _level_ranks([density for _, density in pieces])
    order = sorted(range(len(pieces)), key=lambda k: (ranks[k], pieces[k][0].start))

    edges = [0.0]
    densities = []
    segments = []
    for k in order:
        source, density = pieces[k]
        start = edges[-1]
        segments.append((source, start - source.start))
        edges.append(start + source.width)
        densities.append(density)
    edges[-1] = TWO_PI

    rearranged = AngularPdf(edges=tuple(edges), densities=tuple(densities), tol=pdf.tol)
    mapping = RearrangementMap(segments=tuple(sorted(segments, key=lambda seg: seg[0].start)))
    return rearranged, mapping


def forward_image(mapping: RearrangementMap, region: Sequence[Arc]) -> Region:
    images = []
    for source, offset in mapping.segments:
        for arc in region:
            overlap = intersect_arc(source, arc)
            if overlap is not None:
                images.append(shift_arc(overlap, offset))
    return canonical_region(images)


def inverse_image(mapping: RearrangementMap, region: Sequence[Arc]) -> Region:
    """Preimage of region under the map, as a canonical arc list of equal total width."""
    preimages = []
    for source, offset in mapping.segments:
        image = shift_arc(source, offset)
        for arc in region:
            overlap = intersect_arc(image, arc)
            if overlap is not None:
                preimages.append(shift_arc(overlap, -offset))
    return canonical_region(preimages)

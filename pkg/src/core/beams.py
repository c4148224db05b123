"""
Scanning-beam codebooks: feedback signatures, induced partitions, the fixed
constructions (halving, uniform contiguous, exhaustive search) and the two
optimal design pipelines.
"""
from dataclasses import dataclass
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np

from src.core.angular_pdf import AngularPdf, RearrangementMap, inverse_image, monotone_rearrangement
from src.core.arcs import (
    DEFAULT_TOL,
    SNAP_TOL,
    TWO_PI,
    Arc,
    Region,
    arc_between,
    canonical_region,
    check_disjoint,
    in_region,
    logical_arcs,
    region_width,
    wrap_angle,
)
from src.core.errors import InvariantViolation
from src.core.partition import (
    DEFAULT_GRID_POINTS,
    BoundaryVector,
    Cell,
    Partition,
    optimize_boundaries,
    partition_from_boundaries,
)
from src.utils.log import log_debug, log_info

Constraint = Literal["unconstrained", "contiguous"]


@dataclass(frozen=True)
class Beam:
    acr: Region

    def __post_init__(self):
        check_disjoint(self.acr)
        object.__setattr__(self, "acr", canonical_region(self.acr))
        if region_width(self.acr) > TWO_PI + DEFAULT_TOL:
            raise InvariantViolation(f"Beam covers {region_width(self.acr)} rad, more than 2π")

    @property
    def width(self) -> float:
        return region_width(self.acr)

    @property
    def is_contiguous(self) -> bool:
        return len(logical_arcs(self.acr)) <= 1


@dataclass(frozen=True)
class Codebook:
    beams: Tuple[Beam, ...]
    constraint: Constraint = "unconstrained"

    def __post_init__(self):
        if not self.beams:
            raise InvariantViolation("Codebook needs at least one beam")
        if self.constraint not in ("unconstrained", "contiguous"):
            raise InvariantViolation(f"Unknown constraint '{self.constraint}'")
        if self.constraint == "contiguous":
            for i, beam in enumerate(self.beams, start=1):
                if not beam.is_contiguous:
                    raise InvariantViolation(f"Beam {i} is not a single arc in a contiguous codebook")

    @property
    def b(self) -> int:
        return len(self.beams)


@dataclass(frozen=True)
class FeedbackSignature:
    """One flag per beam, True for ACK."""

    bits: Tuple[bool, ...]

    def __str__(self) -> str:
        return "".join("A" if ack else "N" for ack in self.bits)


@dataclass(frozen=True)
class DesignResult:
    codebook: Codebook
    partition: Partition
    objective: float
    boundaries: BoundaryVector


def _make_codebook(regions: Sequence[Sequence[Arc]], constraint: Constraint) -> Codebook:
    return Codebook(beams=tuple(Beam(acr=tuple(r)) for r in regions), constraint=constraint)


def feedback_signature(codebook: Codebook, aod: float) -> FeedbackSignature:
    theta = wrap_angle(aod)
    return FeedbackSignature(bits=tuple(bool(in_region(beam.acr, theta)) for beam in codebook.beams))


def signature_codes(codebook: Codebook, aods: np.ndarray) -> np.ndarray:
    """Vectorised feedback signatures packed into integers, bit i-1 for beam i."""
    codes = np.zeros(np.shape(aods), dtype=np.int64)
    for i, beam in enumerate(codebook.beams):
        codes |= in_region(beam.acr, aods).astype(np.int64) << i
    return codes


def _elementary_arcs(codebook: Codebook, snap: bool) -> List[Arc]:
    points = [0.0, TWO_PI] + [v for beam in codebook.beams for arc in beam.acr for v in (arc.start, arc.end)]
    points = np.unique(points)
    if snap:
        points = points[np.concatenate([[True], np.diff(points) > SNAP_TOL])]
        points[-1] = TWO_PI
    return [Arc(a, b) for a, b in zip(points, points[1:]) if b > a]


def signature_widths(codebook: Codebook) -> Dict[int, float]:
    """Exact UR width of every signature that can occur, keyed by signature code."""
    arcs = _elementary_arcs(codebook, snap=False)
    codes = signature_codes(codebook, np.array([arc.midpoint for arc in arcs]))
    widths: Dict[int, float] = {}
    for code, arc in zip(codes.tolist(), arcs):
        widths[code] = widths.get(code, 0.0) + arc.width
    return widths


def induced_partition(codebook: Codebook) -> Partition:
    """
    One cell per signature that actually occurs (the angles every beam agrees
    on), ordered by the start of the cell's first arc.
    """
    arcs = _elementary_arcs(codebook, snap=True)
    codes = signature_codes(codebook, np.array([arc.midpoint for arc in arcs]))
    groups: Dict[int, List[Arc]] = {}
    for code, arc in zip(codes.tolist(), arcs):
        groups.setdefault(code, []).append(arc)

    b = codebook.b
    cells = []
    for k, code in enumerate(sorted(groups, key=lambda c: groups[c][0].start), start=1):
        bits = tuple(bool(code >> i & 1) for i in range(b))
        cells.append(Cell(id=k, region=canonical_region(groups[code]), signature=bits))
    return Partition(cells=tuple(cells))


def halving_codebook(b: int) -> Codebook:
    """b width-π beams whose signatures split the circle into 2^b equal cells."""
    if b < 1:
        raise InvariantViolation(f"b must be a positive integer, got {b}")
    regions: List[List[Arc]] = [[Arc(0.0, np.pi)], [Arc(np.pi / 2, 3 * np.pi / 2)]]
    for i in range(3, b + 1):
        width = np.pi / 2 ** (i - 1)
        spacing = np.pi / 2 ** (i - 3)
        regions.append([Arc(width + j * spacing, 3 * width + j * spacing) for j in range(2 ** (i - 2))])
    return _make_codebook(regions[:b], "unconstrained")


def es_codebook(b: int) -> Codebook:
    """Exhaustive search: b equal disjoint sectors, the (b+1)-th left unprobed."""
    if b < 1:
        raise InvariantViolation(f"b must be a positive integer, got {b}")
    sector = TWO_PI / (b + 1)
    return _make_codebook([[Arc(i * sector, (i + 1) * sector)] for i in range(b)], "contiguous")


def uniform_contiguous_codebook(b: int) -> Codebook:
    if b < 1:
        raise InvariantViolation(f"b must be a positive integer, got {b}")
    return _make_codebook(
        [[Arc(i * np.pi / b, np.pi + i * np.pi / b)] for i in range(b)], "contiguous"
    )


def cell_beam_sets(cells: int, b: int) -> List[List[int]]:
    """Cells lit by each beam: beam i (0-based) covers cell k when bit i of k-1 is 0."""
    return [[k for k in range(1, cells + 1) if not (k - 1) >> i & 1] for i in range(b)]


def unconstrained_codebook_from_partition(
    partition: Partition, mapping: RearrangementMap, b: int
) -> Codebook:
    """
    Each beam is the union of the preimages of its cells under the rearrangement
    map, with cells numbered in rearranged-domain order.
    """
    cells = partition.cells
    if len(cells) > 2**b:
        raise InvariantViolation(f"{len(cells)} cells cannot be told apart with {b} beams")
    preimages = [inverse_image(mapping, cell.region) for cell in cells]
    regions = [
        [arc for k in members for arc in preimages[k - 1]] for members in cell_beam_sets(len(cells), b)
    ]
    return _make_codebook(regions, "unconstrained")


def contiguous_codebook_from_boundaries(boundaries: BoundaryVector) -> Codebook:
    """Beam i runs from boundary i to boundary i + b, given 2b circular boundaries."""
    x = boundaries.x
    if not boundaries.circular or len(x) < 2 or len(x) % 2:
        raise InvariantViolation(f"Need an even number (2b) of circular boundaries, got {len(x)}")
    b = len(x) // 2
    return _make_codebook([arc_between(x[i], x[i + b]) for i in range(b)], "contiguous")


def canonical_contiguous_codebook(codebook: Codebook) -> Codebook:
    """
    Rebuilds any contiguous codebook from its 2b sorted beam endpoints, beam i
    running from endpoint i to endpoint i + b. The induced partition refines the original one, so the
    expected width never grows.
    """
    if codebook.constraint != "contiguous":
        raise InvariantViolation("Only contiguous codebooks can be canonicalised")
    endpoints = []
    for beam in codebook.beams:
        (start, end, _), = logical_arcs(beam.acr)
        endpoints.extend([wrap_angle(start), wrap_angle(end)])
    endpoints.sort()
    if any(right - left <= SNAP_TOL for left, right in zip(endpoints, endpoints[1:])):
        raise InvariantViolation("Beam endpoints must be distinct to canonicalise")
    return contiguous_codebook_from_boundaries(BoundaryVector(x=tuple(endpoints), circular=True))


def design_unconstrained(
    pdf: AngularPdf, b: int, grid_points: int = DEFAULT_GRID_POINTS, workers: int = 1
) -> DesignResult:
    """Monotonise, split into 2^b contiguous cells, map the cells back and label them."""
    monotone, mapping = monotone_rearrangement(pdf)
    boundaries, objective = optimize_boundaries(monotone, 2**b, "linear", grid_points, workers)
    cells = partition_from_boundaries(boundaries)
    codebook = unconstrained_codebook_from_partition(cells, mapping, b)
    partition = induced_partition(codebook)
    log_info(f"Designed unconstrained codebook b={b}: {partition.size} cells, U={objective:.6f}")
    return DesignResult(codebook=codebook, partition=partition, objective=objective, boundaries=boundaries)


def design_contiguous(
    pdf: AngularPdf, b: int, grid_points: int = DEFAULT_GRID_POINTS, workers: int = 1
) -> DesignResult:
    """Optimise 2b circular boundaries and open beam i from boundary i to boundary i + b."""
    boundaries, objective = optimize_boundaries(pdf, 2 * b, "circular", grid_points, workers)
    codebook = contiguous_codebook_from_boundaries(boundaries)
    partition = induced_partition(codebook)
    log_info(f"Designed contiguous codebook b={b}: {partition.size} cells, U={objective:.6f}")
    log_debug(f"Contiguous boundaries: {boundaries.x}")
    return DesignResult(codebook=codebook, partition=partition, objective=objective, boundaries=boundaries)

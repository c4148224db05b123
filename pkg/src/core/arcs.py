"""
Arc geometry on the circle (0, 2π].

Every arc is the half-open interval (start, end] with 0 <= start < end <= 2π.
Regions that wrap past 2π are stored as two arcs, one ending at 2π and one
starting at 0. The angle 0 is identified with 2π.
"""
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.core.errors import InvariantViolation

TWO_PI = 2.0 * np.pi
DEFAULT_TOL = 1e-9
# Breakpoints closer than this are treated as the same angle.
SNAP_TOL = 1e-12


@dataclass(frozen=True)
class Arc:
    start: float
    end: float

    def __post_init__(self):
        if not (0.0 <= self.start < self.end <= TWO_PI):
            raise InvariantViolation(
                f"Arc must satisfy 0 <= start < end <= 2π, got ({self.start}, {self.end}]"
            )

    @property
    def width(self) -> float:
        return self.end - self.start

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.start + self.end)

    def contains(self, theta: float) -> bool:
        return self.start < theta <= self.end


Region = Tuple[Arc, ...]


def wrap_angle(theta):
    """Maps any angle (scalar or array) into (0, 2π]."""
    wrapped = np.mod(theta, TWO_PI)
    if np.ndim(wrapped) == 0:
        return TWO_PI if wrapped == 0.0 else float(wrapped)
    return np.where(wrapped == 0.0, TWO_PI, wrapped)


def full_circle() -> Region:
    return (Arc(0.0, TWO_PI),)


def arc_between(a: float, b: float) -> Region:
    """
    The circular arc running counter-clockwise from a to b, i.e. (a, b] when a < b
    and (a, 2π] ∪ (0, b] otherwise. a == b is the full circle.
    """
    a = wrap_angle(a)
    b = wrap_angle(b)
    if a == b:
        return full_circle()
    if a < b:
        return (Arc(a, b),)
    arcs = []
    if a < TWO_PI:
        arcs.append(Arc(a, TWO_PI))
    arcs.append(Arc(0.0, b))
    return tuple(sorted(arcs, key=lambda arc: arc.start))


def region_width(region: Iterable[Arc]) -> float:
    return float(sum(arc.width for arc in region))


def check_disjoint(region: Sequence[Arc], tol: float = DEFAULT_TOL):
    ordered = sorted(region, key=lambda arc: arc.start)
    for left, right in zip(ordered, ordered[1:]):
        if right.start < left.end - tol:
            raise InvariantViolation(
                f"Arcs ({left.start}, {left.end}] and ({right.start}, {right.end}] overlap"
            )


def canonical_region(region: Iterable[Arc]) -> Region:
    """Sorts arcs by start and merges arcs that touch or overlap."""
    ordered = sorted(region, key=lambda arc: arc.start)
    merged: List[List[float]] = []
    for arc in ordered:
        if merged and arc.start <= merged[-1][1] + SNAP_TOL:
            merged[-1][1] = max(merged[-1][1], arc.end)
        else:
            merged.append([arc.start, arc.end])
    return tuple(Arc(s, min(e, TWO_PI)) for s, e in merged if e - s > SNAP_TOL)


def shift_arc(arc: Arc, offset: float) -> Arc:
    return Arc(max(arc.start + offset, 0.0), min(arc.end + offset, TWO_PI))


def intersect_arc(a: Arc, b: Arc):
    """Overlap of two arcs, or None when it has no width."""
    start = max(a.start, b.start)
    end = min(a.end, b.end)
    if end - start <= SNAP_TOL:
        return None
    return Arc(start, end)


def in_region(region: Sequence[Arc], theta) -> np.ndarray:
    """Vectorised half-open membership test, theta in (0, 2π]."""
    theta = np.asarray(theta, dtype=float)
    member = np.zeros(theta.shape, dtype=bool)
    for arc in region:
        member |= (theta > arc.start) & (theta <= arc.end)
    return member


def logical_arcs(region: Sequence[Arc]) -> List[Tuple[float, float, bool]]:
    """
    Joins a stored arc ending at 2π with one starting at 0 into a single
    logical arc. Returns (start, end, wraps) triples with end possibly < start.
    """
    arcs = list(canonical_region(region))
    if len(arcs) >= 2 and arcs[0].start == 0.0 and arcs[-1].end == TWO_PI:
        head, tail = arcs[0], arcs[-1]
        middle = [(arc.start, arc.end, False) for arc in arcs[1:-1]]
        return middle + [(tail.start, head.end, True)]
    return [(arc.start, arc.end, False) for arc in arcs]

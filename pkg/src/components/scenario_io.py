"""
Scenario and codebook files (JSON, degrees) and the CSV tables written by the
subcommands. Degrees live only here; everything past this module is radians.
"""
import csv
import hashlib
import json
import os
from typing import Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.core.angular_pdf import AngularPdf, integrate, piecewise_pdf
from src.core.arcs import TWO_PI, Arc, logical_arcs
from src.core.beams import Beam, Codebook
from src.core.errors import InvariantViolation, ScenarioParseError
from src.core.partition import Partition
from src.core.simulator import EvaluationReport, Scenario, User

SCHEMA_VERSION = 1
MASS_TOL = 1e-9


class PieceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start_deg: float = Field(ge=0.0, le=360.0)
    end_deg: float = Field(ge=0.0, le=360.0)
    mass: float = Field(ge=0.0)


class UserSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pieces: List[PieceSpec] = Field(min_length=1)
    weight: float = Field(ge=0.0)


class ScenarioFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int
    users: List[UserSpec] = Field(min_length=1)
    b: int = Field(ge=1)
    constraint: Literal["unconstrained", "contiguous"] = "contiguous"
    grid_points: Optional[int] = Field(default=None, ge=8)
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    d: Optional[int] = Field(default=None, ge=0)
    T: Optional[int] = Field(default=None, ge=1)


class ArcSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start_deg: float = Field(ge=0.0, le=360.0)
    end_deg: float = Field(ge=0.0, le=360.0)


class CodebookFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int
    b: int = Field(ge=1)
    constraint: Literal["unconstrained", "contiguous"]
    beams: List[List[ArcSpec]]


def _to_rad(deg: float) -> float:
    if deg >= 360.0:
        return TWO_PI
    return min(float(np.deg2rad(deg)), TWO_PI)


def _fmt_deg(rad: float) -> str:
    return f"{np.rad2deg(rad):.6f}"


def _load_json(path: str, model):
    try:
        with open(path, "r", encoding="utf-8") as f:
            content = f.read()
    except UnicodeDecodeError as e:
        raise ScenarioParseError(f"{path}: {e}") from e
    try:
        raw = json.loads(content)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"{path}: expected a JSON object at top level")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioParseError(f"{path}: unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ScenarioParseError(f"{path}: {problems}") from e


def user_pdf(spec: UserSpec, index: int) -> AngularPdf:
    """Converts a user's degree pieces into a density; gaps get zero density."""
    where = f"users[{index}].pieces"
    total = sum(piece.mass for piece in spec.pieces)
    if abs(total - 1.0) > MASS_TOL:
        raise InvariantViolation(f"{where}: masses sum to {total}, expected 1")

    spans: List[Tuple[float, float, float]] = []
    for k, piece in enumerate(spec.pieces):
        start, end = _to_rad(piece.start_deg), _to_rad(piece.end_deg)
        if start == end:
            raise InvariantViolation(f"{where}[{k}]: piece has zero width")
        if start < end:
            spans.append((start, end, piece.mass))
        else:
            # wraps through 0°: split the mass in proportion to the two widths
            width = TWO_PI - start + end
            if start < TWO_PI:
                spans.append((start, TWO_PI, piece.mass * (TWO_PI - start) / width))
            if end > 0.0:
                spans.append((0.0, end, piece.mass * end / width))
    spans.sort()

    edges, masses = [0.0], []
    for start, end, mass in spans:
        if start < edges[-1] - MASS_TOL:
            raise InvariantViolation(f"{where}: pieces overlap near {np.rad2deg(start):.6f} deg")
        if start > edges[-1] + MASS_TOL:
            edges.append(start)
            masses.append(0.0)
        edges.append(end)
        masses.append(mass)
    if edges[-1] < TWO_PI - MASS_TOL:
        edges.append(TWO_PI)
        masses.append(0.0)

    try:
        return piecewise_pdf(edges, masses)
    except InvariantViolation as e:
        raise InvariantViolation(f"{where}: {e}") from e


def parse_scenario(path: str) -> Tuple[Scenario, ScenarioFile]:
    settings = _load_json(path, ScenarioFile)
    users = tuple(User(pdf=user_pdf(spec, j), weight=spec.weight) for j, spec in enumerate(settings.users))
    try:
        scenario = Scenario(users=users, b=settings.b, constraint=settings.constraint, d=settings.d, T=settings.T)
    except InvariantViolation as e:
        raise InvariantViolation(f"{path}: {e}") from e
    return scenario, settings


def scenario_digest(settings: ScenarioFile) -> str:
    canonical = json.dumps(settings.model_dump(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_codebook(path: str) -> Codebook:
    spec = _load_json(path, CodebookFile)
    if len(spec.beams) != spec.b:
        raise ScenarioParseError(f"{path}: b = {spec.b} but {len(spec.beams)} beams are listed")
    beams = []
    for i, arcs in enumerate(spec.beams):
        try:
            beams.append(Beam(acr=tuple(Arc(_to_rad(a.start_deg), _to_rad(a.end_deg)) for a in arcs)))
        except InvariantViolation as e:
            raise InvariantViolation(f"{path}: beams[{i}]: {e}") from e
    return Codebook(beams=tuple(beams), constraint=spec.constraint)


def _ensure_parent(path: str):
    if os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)


def write_json(path: str, payload: dict):
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_codebook(path: str, codebook: Codebook):
    write_json(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "b": codebook.b,
            "constraint": codebook.constraint,
            "beams": [
                [{"start_deg": round(float(np.rad2deg(a.start)), 6), "end_deg": round(float(np.rad2deg(a.end)), 6)}
                 for a in beam.acr]
                for beam in codebook.beams
            ],
        },
    )


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.10f}"


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]):
    _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


RESULT_COLUMNS = ("scheme", "b", "analytic", "empirical", "se", "lower", "upper", "gain_vs_es")
PLOT_COLUMNS = ("b", "scheme", "U", "lower", "upper", "gain_vs_es")


def write_result_table(path: str, reports: Sequence[EvaluationReport]):
    write_csv(
        path,
        RESULT_COLUMNS,
        [
            (r.scheme, r.b, _fmt(r.analytic), _fmt(r.empirical), _fmt(r.se),
             _fmt(r.bounds.lower), _fmt(r.bounds.upper), _fmt(r.gain_vs_es))
            for r in reports
        ],
    )


def write_plot_data(path: str, reports: Sequence[EvaluationReport]):
    write_csv(
        path,
        PLOT_COLUMNS,
        [(r.b, r.scheme, _fmt(r.analytic), _fmt(r.bounds.lower), _fmt(r.bounds.upper), _fmt(r.gain_vs_es))
         for r in reports],
    )


def write_beams(path: str, codebook: Codebook):
    rows = []
    for i, beam in enumerate(codebook.beams, start=1):
        for start, end, wraps in logical_arcs(beam.acr):
            rows.append((i, _fmt_deg(start), _fmt_deg(end), int(wraps)))
    write_csv(path, ("beam", "start_deg", "end_deg", "wraps"), rows)


def write_cells(path: str, partition: Partition, pdf: AngularPdf):
    rows = []
    for cell in partition.cells:
        signature = "".join("A" if ack else "N" for ack in (cell.signature or ()))
        arcs = ";".join(f"{_fmt_deg(a.start)}-{_fmt_deg(a.end)}" for a in cell.region)
        rows.append((cell.id, signature, arcs, _fmt_deg(cell.width), _fmt(integrate(pdf, cell.region))))
    write_csv(path, ("cell", "signature", "arcs_deg", "width_deg", "mass"), rows)


def sidecar(out: str, suffix: str) -> str:
    """'results/run.csv' + '.beams.csv' -> 'results/run.beams.csv'."""
    root, _ = os.path.splitext(out)
    return root + suffix

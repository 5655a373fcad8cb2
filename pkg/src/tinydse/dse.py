"""Design-space enumeration, per-point evaluation and Pareto fronts.

A design point is one (architecture, precision, modality, processor)
combination. Evaluation sizes the weights and activations, prices the
cheapest board that holds them, estimates latency, and joins measured
error rates from a results table when one is available.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .archmodel import ArchSpec, build_arch
from .errors import EvaluationError, InfeasibleError, ParseError, SpecError
from .footprint import DEFAULT_CODE_SIZE, PrecisionScheme, flash_required_bytes, param_bytes, peak_memory_bytes
from .hwcatalog import BoardConfig, Part, PartCatalog, Requirements, board_cost, min_board
from .perfmodel import LatencyCoeffs, effective_latency, model_latency, system_latency

log = logging.getLogger(__name__)

MODALITIES = ("face", "voice", "fusion")
SENSORS_FOR = {
    "face": frozenset({"camera"}),
    "voice": frozenset({"microphone"}),
    "fusion": frozenset({"camera", "microphone"}),
}
DEFAULT_FARS = (1.0, 5.0, 10.0)


def far_label(far: float) -> str:
    return f"{far:g}".replace(".", "p")


@dataclass(frozen=True)
class MetricVector:
    param_bytes: int
    peak_bytes: int
    flash_required_bytes: int
    latency_s: float
    cost_cents: int | None = None
    eer_pct: float | None = None
    frr_at_far_pct: tuple[tuple[float, float], ...] = ()
    effective_latency_s: tuple[tuple[float, float], ...] = ()

    def frr(self, far: float) -> float | None:
        return dict(self.frr_at_far_pct).get(far)

    def effective(self, far: float) -> float | None:
        return dict(self.effective_latency_s).get(far)


@dataclass(frozen=True)
class DesignPoint:
    arch: ArchSpec
    scheme: PrecisionScheme
    modality: str
    processor: Part
    board: BoardConfig | None = None
    metrics: MetricVector | None = None
    feasible: bool = True
    reason: str = ""

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise SpecError("modality", f"must be one of {MODALITIES}, got {self.modality!r}")

    @property
    def sensors(self) -> frozenset[str]:
        return SENSORS_FOR[self.modality]

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.arch.name, self.scheme.tag, self.modality)

    @property
    def name(self) -> str:
        return f"{self.arch.name}/{self.scheme.tag}/{self.modality}/{self.processor.name}"

    @property
    def branches(self) -> tuple[str, ...]:
        return ("face", "voice") if self.modality == "fusion" else (self.modality,)


@dataclass(frozen=True)
class ResultRow:
    eer_pct: float | None
    frr_at_far_pct: tuple[tuple[float, float], ...] = ()


class ResultsTable:
    """Measured error rates keyed by ``(arch, scheme tag, modality)``."""

    def __init__(self, rows: Mapping[tuple[str, str, str], ResultRow] | None = None):
        self.rows: dict[tuple[str, str, str], ResultRow] = dict(rows or {})

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, key) -> bool:
        return key in self.rows

    def get(self, key) -> ResultRow | None:
        return self.rows.get(key)


def _pct(text: str, path: str, line: int, col: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{col}: not a number {text!r}", path, line) from None
    if not 0 <= v <= 100:
        raise ParseError(f"{col}: percentage {v} outside [0, 100]", path, line)
    return v


def load_results(path: str | Path) -> ResultsTable:
    """Read ``arch,scheme,modality,eer_pct,frr_at_far_<F>_pct...`` rows."""
    path = Path(path)
    rows: dict[tuple[str, str, str], ResultRow] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in (next(reader, None) or [])]
        if header[:4] != ["arch", "scheme", "modality", "eer_pct"]:
            raise ParseError("expected header arch,scheme,modality,eer_pct,frr_at_far_<F>_pct,...", str(path), 1)
        fars = []
        for col in header[4:]:
            if not (col.startswith("frr_at_far_") and col.endswith("_pct")):
                raise ParseError(f"unexpected column {col!r}", str(path), 1)
            try:
                fars.append(float(col[len("frr_at_far_") : -len("_pct")].replace("p", ".")))
            except ValueError:
                raise ParseError(f"cannot read FAR level from column {col!r}", str(path), 1) from None
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", str(path), line)
            arch, scheme, modality = (c.strip() for c in row[:3])
            try:
                tag = PrecisionScheme.parse(scheme).tag
            except SpecError as exc:
                raise ParseError(str(exc), str(path), line) from None
            if modality not in MODALITIES:
                raise ParseError(f"unknown modality {modality!r}", str(path), line)
            key = (arch, tag, modality)
            if key in rows:
                raise ParseError(f"duplicate results row for {key}", str(path), line)
            eer_v = _pct(row[3], str(path), line, "eer_pct")
            frrs = []
            for far, cell, col in zip(fars, row[4:], header[4:]):
                v = _pct(cell, str(path), line, col)
                if v is not None:
                    frrs.append((far, v))
            rows[key] = ResultRow(eer_v, tuple(frrs))
    return ResultsTable(rows)


# -- enumeration and evaluation ----------------------------------------------


def enumerate_space(
    archs: Sequence[ArchSpec],
    schemes: Sequence[PrecisionScheme],
    modalities: Sequence[str],
    processors: Sequence[Part],
) -> list[DesignPoint]:
    """Full Cartesian product of the four axes, in input order."""
    for name, axis in (("archs", archs), ("schemes", schemes), ("modalities", modalities), ("processors", processors)):
        if not axis:
            raise SpecError(name, "must be non-empty")
    return [DesignPoint(a, s, m, p) for a, s, m, p in itertools.product(archs, schemes, modalities, processors)]


@dataclass(frozen=True)
class EvalOptions:
    code_size_bytes: int = DEFAULT_CODE_SIZE
    fars: tuple[float, ...] = DEFAULT_FARS
    include_preprocessing: bool = False
    fusion_memory: str = "max"  # or "sum" when both branches keep buffers alive

    def __post_init__(self):
        if self.fusion_memory not in ("max", "sum"):
            raise SpecError("fusion_memory", f"must be 'max' or 'sum', got {self.fusion_memory!r}")
        if self.code_size_bytes < 0:
            raise SpecError("code_size_bytes", "must be >= 0")
        for f in self.fars:
            if not 0 < f < 100:
                raise SpecError("fars", f"FAR levels are percentages in (0, 100), got {f}")


def evaluate(
    point: DesignPoint,
    catalog: PartCatalog,
    coeffs: LatencyCoeffs,
    results: ResultsTable | None = None,
    options: EvalOptions = EvalOptions(),
) -> DesignPoint:
    graph = build_arch(point.arch)
    n_branches = len(point.branches)
    branch_params = param_bytes(graph, point.scheme)
    branch_peak = peak_memory_bytes(graph, point.scheme)
    total_params = n_branches * branch_params
    peak = branch_peak * n_branches if options.fusion_memory == "sum" else branch_peak
    flash = flash_required_bytes(total_params, options.code_size_bytes)

    branch_t = model_latency(graph, point.scheme, coeffs)
    pipe = system_latency(
        [(b, branch_t) for b in point.branches],
        point.processor.cores,
        coeffs.preprocessing,
        options.include_preprocessing,
    )
    latency = pipe.total_seconds

    board, cost, feasible, reason = None, None, True, ""
    try:
        board = min_board(
            Requirements(flash, peak, point.sensors, point.processor.cores, point.processor.name), catalog
        )
        cost = board_cost(board).total_cents
    except InfeasibleError as exc:
        feasible, reason = False, str(exc)

    eer_v = None
    frrs: tuple[tuple[float, float], ...] = ()
    effs: list[tuple[float, float]] = []
    row = results.get(point.key) if results is not None else None
    if row is not None:
        eer_v = row.eer_pct
        measured = dict(row.frr_at_far_pct)
        frrs = tuple((f, measured[f]) for f in options.fars if f in measured)
        for f, frr_pct in frrs:
            try:
                effs.append((f, effective_latency(latency, frr_pct / 100)))
            except ValueError:
                effs.append((f, math.inf))

    metrics = MetricVector(
        param_bytes=total_params,
        peak_bytes=peak,
        flash_required_bytes=flash,
        latency_s=latency,
        cost_cents=cost,
        eer_pct=eer_v,
        frr_at_far_pct=frrs,
        effective_latency_s=tuple(effs),
    )
    return replace(point, board=board, metrics=metrics, feasible=feasible, reason=reason)


def explore(
    archs: Sequence[ArchSpec],
    schemes: Sequence[PrecisionScheme],
    modalities: Sequence[str],
    catalog: PartCatalog,
    coeffs: LatencyCoeffs,
    results: ResultsTable | None = None,
    options: EvalOptions = EvalOptions(),
    processors: Sequence[Part] | None = None,
) -> list[DesignPoint]:
    """Enumerate and evaluate the whole space; output order is by point name."""
    procs = list(processors) if processors is not None else catalog.processors
    points = [evaluate(p, catalog, coeffs, results, options) for p in enumerate_space(archs, schemes, modalities, procs)]
    return sorted(points, key=lambda p: p.name)


# -- metrics and fronts ------------------------------------------------------


def metric_value(point: DesignPoint, metric: str) -> float | None:
    """Look up a metric by name.

    Plain names are fields of :class:`MetricVector`; ``frr@F`` and
    ``effective_latency_s@F`` address the per-FAR columns.
    """
    m = point.metrics
    if m is None:
        return None
    if "@" in metric:
        base, far = metric.split("@", 1)
        f = float(far)
        if base == "frr":
            return m.frr(f)
        if base == "effective_latency_s":
            return m.effective(f)
        raise KeyError(metric)
    if not hasattr(m, metric):
        raise KeyError(metric)
    return getattr(m, metric)


def pareto_mask(xs: Sequence[float], ys: Sequence[float]) -> np.ndarray:
    """Boolean mask of points not dominated when minimizing both coordinates.

    Sorted sweep: within each run of equal x only the smallest y survives,
    and only if it beats the best y seen at strictly smaller x. Exact
    duplicates survive together.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    n = x.size
    keep = np.zeros(n, dtype=bool)
    if n == 0:
        return keep
    order = np.lexsort((y, x))
    best = math.inf
    i = 0
    while i < n:
        j = i
        xi = x[order[i]]
        while j < n and x[order[j]] == xi:
            j += 1
        group_min = y[order[i]]
        if group_min < best:
            k = i
            while k < j and y[order[k]] == group_min:
                keep[order[k]] = True
                k += 1
            best = group_min
        i = j
    return keep


MetricKey = str | Callable[[DesignPoint], float | None]


def _getter(metric: MetricKey) -> Callable[[DesignPoint], float | None]:
    if callable(metric):
        return metric
    return lambda p: metric_value(p, metric)


def pareto_front(points: Iterable[DesignPoint], x_metric: MetricKey, y_metric: MetricKey) -> list[DesignPoint]:
    """Non-dominated points (both metrics minimized), sorted by x, then y, then name."""
    points = list(points)
    gx, gy = _getter(x_metric), _getter(y_metric)
    xs, ys, bad = [], [], []
    for p in points:
        a, b = gx(p), gy(p)
        if a is None or b is None:
            bad.append(p.name)
        xs.append(a)
        ys.append(b)
    if bad:
        raise EvaluationError(f"metric missing on {len(bad)} point(s): {', '.join(bad)}")
    mask = pareto_mask(xs, ys)
    front = [(xs[i], ys[i], points[i].name, i) for i in np.flatnonzero(mask)]
    front.sort()
    return [points[i] for *_, i in front]


def front_candidates(points: Iterable[DesignPoint], x_metric: str, y_metric: str) -> tuple[list[DesignPoint], list[str]]:
    """Points eligible for a front: feasible and carrying both metrics. Also returns names excluded."""
    keep, dropped = [], []
    for p in points:
        if p.feasible and metric_value(p, x_metric) is not None and metric_value(p, y_metric) is not None:
            keep.append(p)
        else:
            dropped.append(p.name)
    return keep, dropped

"""Latency estimates from operation counts.

Each layer costs ``opcount * ns_per_op`` where the coefficient is looked up by
operation class and precision class. Multi-bit XNOR layers reuse the 1-bit
coefficient scaled by ``a_bits * w_bits``, since every extra activation or
weight bit plane repeats the XNOR/popcount pass.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .archmodel import ArchGraph, LayerNode
from .errors import ConfigError, ParseError
from .footprint import PrecisionScheme

OP_CLASSES = ("conv", "fc", "elementwise", "pool")
PRECISION_CLASSES = ("float32", "fixed8", "xnor_base")
COEFF_HEADER = ["op_class", "precision_class", "ns_per_op"]

OP_CLASS_OF = {
    "conv": "conv",
    "fc": "fc",
    "batchnorm": "elementwise",
    "relu": "elementwise",
    "residual_add": "elementwise",
    "maxpool": "pool",
    "avgpool": "pool",
}

# image capture + crop/resize; audio is dominated by the 3 s recording itself
DEFAULT_PREPROCESSING = {"face": 0.12, "voice": 3.0}


def precision_class(scheme: PrecisionScheme) -> str:
    return "xnor_base" if scheme.kind == "xnor" else scheme.kind


def bit_plane_factor(scheme: PrecisionScheme) -> int:
    return scheme.a_bits * scheme.w_bits if scheme.kind == "xnor" else 1


@dataclass(frozen=True)
class LatencyCoeffs:
    ns_per_op: Mapping[tuple[str, str], float]
    preprocessing: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PREPROCESSING))

    def __post_init__(self):
        for key, v in self.ns_per_op.items():
            op, prec = key
            if op not in OP_CLASSES:
                raise ConfigError(f"unknown op_class {op!r}")
            if prec not in PRECISION_CLASSES:
                raise ConfigError(f"unknown precision_class {prec!r}")
            if not v > 0:
                raise ConfigError(f"coefficient for ({op}, {prec}) must be > 0, got {v}")
        for mod, v in self.preprocessing.items():
            if v < 0:
                raise ConfigError(f"preprocessing time for {mod} must be >= 0, got {v}")

    def coeff(self, op_class: str, prec_class: str) -> float:
        try:
            return self.ns_per_op[(op_class, prec_class)]
        except KeyError:
            raise ConfigError(f"no latency coefficient for ({op_class}, {prec_class})") from None

    def scaled(self, factor: float) -> LatencyCoeffs:
        return LatencyCoeffs({k: v * factor for k, v in self.ns_per_op.items()}, dict(self.preprocessing))


def load_coeffs(path: str | Path) -> LatencyCoeffs:
    """Read ``op_class,precision_class,ns_per_op`` rows.

    Rows whose first field is ``preprocess`` give a modality and its
    preprocessing time in seconds instead.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"coefficients file not found: {path}")
    table: dict[tuple[str, str], float] = {}
    prep = dict(DEFAULT_PREPROCESSING)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != COEFF_HEADER:
            raise ParseError(f"expected header {','.join(COEFF_HEADER)}", str(path), 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", str(path), line)
            a, b, v = (c.strip() for c in row)
            try:
                value = float(v)
            except ValueError:
                raise ParseError(f"not a number: {v!r}", str(path), line) from None
            if a == "preprocess":
                prep[b] = value
                continue
            if (a, b) in table:
                raise ParseError(f"duplicate coefficient ({a}, {b})", str(path), line)
            table[(a, b)] = value
    try:
        return LatencyCoeffs(table, prep)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def layer_latency_ns(layer: LayerNode, scheme: PrecisionScheme, coeffs: LatencyCoeffs) -> float:
    """Latency of one layer in nanoseconds, including the bit-plane factor."""
    c = coeffs.coeff(OP_CLASS_OF[layer.kind], precision_class(scheme))
    return bit_plane_factor(scheme) * (layer.opcount * c)


def model_latency(graph: ArchGraph, scheme: PrecisionScheme, coeffs: LatencyCoeffs) -> float:
    """Seconds for one forward pass of ``graph`` under ``scheme``."""
    prec = precision_class(scheme)
    base_ns = 0.0
    for layer in graph.layers:
        base_ns += layer.opcount * coeffs.coeff(OP_CLASS_OF[layer.kind], prec)
    # scale once at the end so latency(a, w) == a * w * latency(1, 1) holds bit-for-bit
    return bit_plane_factor(scheme) * (base_ns * 1e-9)


@dataclass(frozen=True)
class PipelineLatency:
    branch_seconds: tuple[tuple[str, float], ...]
    preprocessing_seconds: tuple[tuple[str, float], ...]
    compute_seconds: float
    total_seconds: float
    core_assignment: tuple[int, ...]
    cores: int


def _lpt(times: Sequence[float], workers: int) -> tuple[float, tuple[int, ...]]:
    order = sorted(range(len(times)), key=lambda i: (-times[i], i))
    heap = [(0.0, w) for w in range(workers)]
    assignment = [0] * len(times)
    for i in order:
        load, w = heapq.heappop(heap)
        assignment[i] = w
        heapq.heappush(heap, (load + times[i], w))
    return max(load for load, _ in heap), tuple(assignment)


def schedule(times: Sequence[float], cores: int) -> tuple[float, tuple[int, ...]]:
    """Longest-processing-time list scheduling.

    Plain LPT can get worse when a worker is added, so every worker count up
    to ``cores`` is tried and the best kept; idle cores are always allowed.
    Returns the makespan and the worker index of every job.
    """
    best = None
    for k in range(1, min(cores, max(len(times), 1)) + 1):
        cand = _lpt(times, k)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def system_latency(
    branches: Sequence[tuple[str, float]],
    cores: int,
    preprocessing: Mapping[str, float] | None = None,
    include_preprocessing: bool = False,
) -> PipelineLatency:
    """Run independent modality branches on ``cores`` workers.

    A single branch never spreads over several cores. Preprocessing is
    added serially, once per modality, when requested.
    """
    if not branches:
        raise ConfigError("at least one branch is required")
    if cores < 1:
        raise ConfigError(f"cores must be >= 1, got {cores}")
    times = [t for _, t in branches]
    if any(t < 0 for t in times):
        raise ConfigError("branch times must be >= 0")
    compute, assignment = schedule(times, cores)
    prep: list[tuple[str, float]] = []
    if include_preprocessing:
        table = DEFAULT_PREPROCESSING if preprocessing is None else preprocessing
        for modality in dict.fromkeys(m for m, _ in branches):
            if modality not in table:
                raise ConfigError(f"no preprocessing time for modality {modality!r}")
            prep.append((modality, table[modality]))
    total = compute + sum(t for _, t in prep)
    return PipelineLatency(tuple(branches), tuple(prep), compute, total, assignment, cores)


def effective_latency(latency: float, frr: float) -> float:
    """Expected time to a successful authentication.

    Every attempt is rejected independently with probability ``frr``, so the
    number of attempts is geometric with mean ``1 / (1 - frr)``.
    """
    if frr < 0:
        raise ValueError(f"false reject rate must be >= 0, got {frr}")
    if frr >= 1:
        raise ValueError(f"false reject rate {frr} >= 1: a genuine user is never accepted")
    return latency / (1.0 - frr)

"""Verification metrics from labelled distances or embedding pairs.

A probe is accepted when its Euclidean distance to the enrolled embedding is
strictly below the threshold. False accepts are impostor ("different") pairs
that get accepted, false rejects are genuine ("same") pairs that do not.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EvaluationError, ParseError

LABELS = ("same", "different")
DEFAULT_GRANULARITY = 100_000


@dataclass(frozen=True)
class Embedding:
    values: np.ndarray
    modality: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError(f"embedding must be 1-D, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def normalized(self) -> Embedding:
        n = np.linalg.norm(self.values)
        if n == 0:
            raise EvaluationError("cannot normalize a zero embedding")
        return Embedding(self.values / n, self.modality)


def distance(a: Embedding | np.ndarray, b: Embedding | np.ndarray) -> float:
    va = a.values if isinstance(a, Embedding) else np.asarray(a, dtype=float)
    vb = b.values if isinstance(b, Embedding) else np.asarray(b, dtype=float)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(np.linalg.norm(va - vb))


def fuse(face: tuple[Embedding, Embedding], voice: tuple[Embedding, Embedding]) -> float:
    """Distance between face||voice concatenations of the two sides (no re-normalization)."""
    (fa, fb), (va, vb) = face, voice
    if fa.dim != fb.dim:
        raise ValueError(f"face dimension mismatch: {fa.dim} vs {fb.dim}")
    if va.dim != vb.dim:
        raise ValueError(f"voice dimension mismatch: {va.dim} vs {vb.dim}")
    left = np.concatenate([fa.values, va.values])
    right = np.concatenate([fb.values, vb.values])
    return float(np.linalg.norm(left - right))


@dataclass(frozen=True)
class ScoreSet:
    """Genuine (same-identity) and impostor (different-identity) distances."""

    genuine: np.ndarray
    impostor: np.ndarray

    def __post_init__(self):
        for name in ("genuine", "impostor"):
            arr = np.asarray(getattr(self, name), dtype=float).ravel()
            if not np.all(np.isfinite(arr)):
                raise EvaluationError(f"{name} distances must be finite")
            if np.any(arr < 0):
                raise EvaluationError(f"{name} distances must be >= 0")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, float]]) -> ScoreSet:
        gen = [d for lab, d in pairs if lab == "same"]
        imp = [d for lab, d in pairs if lab == "different"]
        bad = {lab for lab, _ in pairs} - set(LABELS)
        if bad:
            raise EvaluationError(f"unknown labels {sorted(bad)}")
        return cls(np.array(gen, dtype=float), np.array(imp, dtype=float))

    def __len__(self) -> int:
        return self.genuine.size + self.impostor.size


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def __len__(self) -> int:
        return self.thresholds.size


def sweep_thresholds(values: np.ndarray, granularity: int = DEFAULT_GRANULARITY) -> np.ndarray:
    """Midpoints between consecutive unique scores, bracketed by the extremes.

    The lowest threshold (the minimum score) accepts nothing; the highest
    (the next float above the maximum) accepts everything.
    """
    u = np.unique(values)
    if u.size > granularity:
        idx = np.unique(np.linspace(0, u.size - 1, granularity).round().astype(int))
        u = u[idx]
    mids = u[:-1] + (u[1:] - u[:-1]) / 2
    return np.concatenate([u[:1], mids, [np.nextafter(u[-1], np.inf)]])


def rates_at(scores: ScoreSet, thresholds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gen = np.sort(scores.genuine)
    imp = np.sort(scores.impostor)
    far = np.searchsorted(imp, thresholds, side="left") / imp.size
    frr = (gen.size - np.searchsorted(gen, thresholds, side="left")) / gen.size
    return far, frr


def roc(scores: ScoreSet, granularity: int = DEFAULT_GRANULARITY) -> RocCurve:
    if scores.genuine.size == 0 or scores.impostor.size == 0:
        raise EvaluationError("need at least one 'same' and one 'different' pair")
    if granularity < 2:
        raise ValueError("granularity must be >= 2")
    t = sweep_thresholds(np.concatenate([scores.genuine, scores.impostor]), granularity)
    far, frr = rates_at(scores, t)
    return RocCurve(t, far, frr)


def eer_point(curve: RocCurve) -> tuple[float, float]:
    """``(threshold, eer)`` where FAR and FRR cross, interpolating linearly on FAR - FRR."""
    diff = curve.far - curve.frr  # non-decreasing, from -1 up to +1
    exact = np.flatnonzero(diff == 0)
    if exact.size:
        i = exact[0]
        return float(curve.thresholds[i]), float(curve.far[i])
    k = int(np.searchsorted(diff, 0.0)) - 1
    k = min(max(k, 0), diff.size - 2)
    d0, d1 = diff[k], diff[k + 1]
    alpha = -d0 / (d1 - d0)
    rate = curve.far[k] + alpha * (curve.far[k + 1] - curve.far[k])
    thr = curve.thresholds[k] + alpha * (curve.thresholds[k + 1] - curve.thresholds[k])
    return float(thr), float(rate)


def eer(curve: RocCurve) -> float:
    return eer_point(curve)[1]


def frr_at_far(curve: RocCurve, far_target: float) -> tuple[float, float]:
    """Largest sweep threshold whose FAR stays within ``far_target``, and its FRR."""
    if not 0 <= far_target <= 1:
        raise ValueError(f"far_target must be in [0, 1], got {far_target}")
    i = int(np.searchsorted(curve.far, far_target, side="right")) - 1
    i = max(i, 0)
    return float(curve.thresholds[i]), float(curve.frr[i])


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    same: np.ndarray
    different: np.ndarray


def _bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, edges.size - 2)


def histogram(scores: ScoreSet, bins: int = 15, range: tuple[float, float] = (0.4, 1.7)) -> Histogram:
    """Aligned per-label counts over left-closed bins; out-of-range values land in the end bins."""
    lo, hi = range
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not lo < hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    edges = np.linspace(lo, hi, bins + 1)
    same = np.bincount(_bin_index(scores.genuine, edges), minlength=bins)
    diff = np.bincount(_bin_index(scores.impostor, edges), minlength=bins)
    return Histogram(edges, same, diff)


# -- files -------------------------------------------------------------------


def load_scores(path: str | Path) -> ScoreSet:
    path = Path(path)
    pairs = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["label", "distance"]:
            raise ParseError("expected header label,distance", str(path), 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", str(path), line)
            label, d = row[0].strip(), row[1].strip()
            if label not in LABELS:
                raise ParseError(f"label must be 'same' or 'different', got {label!r}", str(path), line)
            try:
                value = float(d)
            except ValueError:
                raise ParseError(f"not a number: {d!r}", str(path), line) from None
            if not np.isfinite(value) or value < 0:
                raise ParseError(f"distance must be finite and >= 0, got {d}", str(path), line)
            pairs.append((label, value))
    return ScoreSet.from_pairs(pairs)


@dataclass
class EmbeddingPair:
    label: str | None
    # modality -> {"enroll": Embedding, "probe": Embedding}
    sides: dict[str, dict[str, Embedding]]


def load_embeddings(path: str | Path, normalize: bool = True) -> dict[str, EmbeddingPair]:
    """Read ``pair_id,side,modality[,label],v0..v{d-1}`` rows into pairs keyed by id.

    The optional ``label`` column (``same``/``different``) is needed for any
    error-rate computation. Vectors are scaled to unit norm unless
    ``normalize`` is false.
    """
    path = Path(path)
    pairs: dict[str, EmbeddingPair] = {}
    dims: dict[str, int] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in (next(reader, None) or [])]
        if header[:3] != ["pair_id", "side", "modality"]:
            raise ParseError("expected header pair_id,side,modality,...", str(path), 1)
        has_label = len(header) > 3 and header[3] == "label"
        first = 4 if has_label else 3
        vec_cols = header[first:]
        if not vec_cols or vec_cols != [f"v{i}" for i in range(len(vec_cols))]:
            raise ParseError("vector columns must be v0..v{d-1}", str(path), 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", str(path), line)
            pid, side, modality = (c.strip() for c in row[:3])
            if side not in ("enroll", "probe"):
                raise ParseError(f"side must be enroll or probe, got {side!r}", str(path), line)
            label = row[3].strip() if has_label else None
            if has_label and label not in LABELS:
                raise ParseError(f"label must be 'same' or 'different', got {label!r}", str(path), line)
            cells = [c.strip() for c in row[first:]]
            # trailing empty cells let a lower-dimensional modality share the file
            while cells and cells[-1] == "":
                cells.pop()
            try:
                vec = np.array([float(c) for c in cells])
            except ValueError as exc:
                raise ParseError(str(exc), str(path), line) from None
            if vec.size == 0 or not np.all(np.isfinite(vec)):
                raise ParseError("embedding must be non-empty and finite", str(path), line)
            if dims.setdefault(modality, vec.size) != vec.size:
                raise ParseError(
                    f"{modality} embeddings have dimension {dims[modality]}, this row has {vec.size}", str(path), line
                )
            emb = Embedding(vec, modality)
            if normalize:
                try:
                    emb = emb.normalized()
                except EvaluationError as exc:
                    raise ParseError(str(exc), str(path), line) from None
            pair = pairs.setdefault(pid, EmbeddingPair(label, {}))
            if pair.label != label:
                raise ParseError(f"pair {pid!r} has conflicting labels", str(path), line)
            slot = pair.sides.setdefault(modality, {})
            if side in slot:
                raise ParseError(f"pair {pid!r} repeats {modality}/{side}", str(path), line)
            slot[side] = emb
    return pairs


def score_embeddings(pairs: dict[str, EmbeddingPair]) -> dict[str, ScoreSet]:
    """Per-modality score sets, plus ``fusion`` when pairs carry both face and voice."""
    per: dict[str, list[tuple[str, float]]] = {}
    fused: list[tuple[str, float]] = []
    for pid in sorted(pairs):
        pair = pairs[pid]
        if pair.label is None:
            raise EvaluationError(f"pair {pid!r} has no label")
        complete = {m: s for m, s in pair.sides.items() if "enroll" in s and "probe" in s}
        missing = set(pair.sides) - set(complete)
        if missing:
            raise EvaluationError(f"pair {pid!r} lacks an enroll or probe side for {sorted(missing)}")
        for m, s in complete.items():
            per.setdefault(m, []).append((pair.label, distance(s["enroll"], s["probe"])))
        if "face" in complete and "voice" in complete:
            f, v = complete["face"], complete["voice"]
            fused.append((pair.label, fuse((f["enroll"], f["probe"]), (v["enroll"], v["probe"]))))
    out = {m: ScoreSet.from_pairs(p) for m, p in sorted(per.items())}
    if fused:
        out["fusion"] = ScoreSet.from_pairs(fused)
    return out

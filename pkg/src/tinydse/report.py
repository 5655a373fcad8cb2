"""Deterministic tabular output shared by the CLI and the demos.

Every table is a header plus rows of already-formatted strings. CSV writes
the strings verbatim; JSON converts each cell back to a number when it
parses as one, so the two encodings carry identical values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

from .dse import DesignPoint, far_label

Table = tuple[list[str], list[list[str]]]


def fmt_int(v: int | None) -> str:
    return "" if v is None else str(int(v))


def fmt_seconds(v: float | None) -> str:
    if v is None:
        return ""
    return "inf" if math.isinf(v) else f"{v:.6f}"


def fmt_pct(v: float | None) -> str:
    if v is None:
        return ""
    return "inf" if math.isinf(v) else f"{v:.3f}"


def fmt_float(v: float | None, digits: int = 6) -> str:
    return "" if v is None else f"{v:.{digits}f}"


def point_header(fars: Sequence[float]) -> list[str]:
    cols = [
        "name",
        "arch",
        "blocks",
        "scheme",
        "modality",
        "processor",
        "cores",
        "feasible",
        "reason",
        "sensors",
        "psram_part",
        "flash_part",
        "param_bytes",
        "peak_bytes",
        "flash_required_bytes",
        "cost_cents",
        "latency_s",
        "eer_pct",
    ]
    cols += [f"frr_at_far_{far_label(f)}_pct" for f in fars]
    cols += [f"effective_latency_far_{far_label(f)}_s" for f in fars]
    return cols


def point_row(p: DesignPoint, fars: Sequence[float]) -> list[str]:
    m = p.metrics
    board = p.board
    row = [
        p.name,
        p.arch.name,
        p.arch.blocks_tag,
        p.scheme.tag,
        p.modality,
        p.processor.name,
        str(p.processor.cores),
        "1" if p.feasible else "0",
        p.reason,
        "+".join(sorted(p.sensors)),
        board.psram.name if board and board.psram else "",
        board.flash.name if board and board.flash else "",
        fmt_int(m.param_bytes),
        fmt_int(m.peak_bytes),
        fmt_int(m.flash_required_bytes),
        fmt_int(m.cost_cents),
        fmt_seconds(m.latency_s),
        fmt_pct(m.eer_pct),
    ]
    row += [fmt_pct(m.frr(f)) for f in fars]
    row += [fmt_seconds(m.effective(f)) for f in fars]
    return row


def points_table(points: Sequence[DesignPoint], fars: Sequence[float]) -> Table:
    return point_header(fars), [point_row(p, fars) for p in points]


def _json_cell(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        v = float(text)
    except ValueError:
        return text
    return v if math.isfinite(v) else text


def to_csv(table: Table) -> str:
    header, rows = table
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def to_records(table: Table) -> list[dict]:
    header, rows = table
    return [{h: _json_cell(c) for h, c in zip(header, r)} for r in rows]


def to_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def render(table: Table, fmt: str) -> str:
    return to_csv(table) if fmt == "csv" else to_json(to_records(table))


def write_text(text: str, out: str | Path | None) -> None:
    if out is None or str(out) == "-":
        print(text, end="")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)

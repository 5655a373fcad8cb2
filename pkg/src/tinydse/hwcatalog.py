"""Priced hardware parts and minimal board composition.

Prices are held as integer cents so that bill-of-materials sums are exact.
Memory parts come in power-of-two capacity tiers; the tier picked for a
requirement is the cheapest one that fits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import CatalogError, InfeasibleError, ParseError, SpecError
from .footprint import MB

PART_KINDS = ("sensor", "processor", "psram", "flash")
MEMORY_KINDS = ("psram", "flash")
CATALOG_HEADER = ["kind", "name", "capacity_mb", "cores", "price_usd"]


def parse_cents(text: str) -> int:
    try:
        value = Decimal(text.strip())
    except InvalidOperation:
        raise ValueError(f"not a price: {text!r}") from None
    if value < 0:
        raise ValueError(f"negative price {text!r}")
    cents = value * 100
    if cents != cents.to_integral_value():
        raise ValueError(f"price {text!r} has more than two decimal places")
    return int(cents)


def format_usd(cents: int) -> str:
    sign = "-" if cents < 0 else ""
    return f"{sign}{abs(cents) // 100}.{abs(cents) % 100:02d}"


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class Part:
    kind: str
    name: str
    price_cents: int
    capacity_mb: int | None = None
    cores: int | None = None

    @property
    def price_usd(self) -> Decimal:
        return Decimal(self.price_cents) / 100

    @property
    def capacity_bytes(self) -> int:
        return (self.capacity_mb or 0) * MB


class PartCatalog:
    """Validated, immutable collection of parts."""

    def __init__(self, parts: Iterable[Part]):
        parts = tuple(parts)
        if not parts:
            raise CatalogError("empty catalog")
        seen = set()
        for p in parts:
            _check_part(p)
            key = (p.kind, p.name)
            if key in seen:
                raise CatalogError(f"duplicate part {p.kind}/{p.name}")
            seen.add(key)
        for kind in MEMORY_KINDS:
            tiers = sorted((p for p in parts if p.kind == kind), key=lambda p: p.capacity_mb)
            for lo, hi in zip(tiers, tiers[1:]):
                if hi.capacity_mb == lo.capacity_mb:
                    raise CatalogError(f"two {kind} parts with capacity {lo.capacity_mb} MB")
                if hi.price_cents <= lo.price_cents:
                    raise CatalogError(
                        f"{kind} prices must rise with capacity: {hi.name} ({format_usd(hi.price_cents)}) "
                        f"is not dearer than {lo.name} ({format_usd(lo.price_cents)})"
                    )
        self._parts = parts

    def __len__(self) -> int:
        return len(self._parts)

    def __iter__(self):
        return iter(self._parts)

    def of_kind(self, kind: str) -> list[Part]:
        return [p for p in self._parts if p.kind == kind]

    def get(self, kind: str, name: str) -> Part:
        for p in self._parts:
            if p.kind == kind and p.name == name:
                return p
        raise KeyError(f"no {kind} named {name!r}")

    @property
    def processors(self) -> list[Part]:
        return sorted(self.of_kind("processor"), key=lambda p: (p.price_cents, p.name))


def _check_part(p: Part) -> None:
    if p.kind not in PART_KINDS:
        raise CatalogError(f"unknown part kind {p.kind!r}")
    if not p.name:
        raise CatalogError("part name must be non-empty")
    if p.price_cents < 0:
        raise CatalogError(f"{p.name}: negative price")
    if p.kind in MEMORY_KINDS:
        if p.capacity_mb is None or not is_power_of_two(p.capacity_mb):
            raise CatalogError(f"{p.name}: memory capacity must be a power of two in MB, got {p.capacity_mb}")
    elif p.capacity_mb is not None:
        raise CatalogError(f"{p.name}: only memories carry a capacity")
    if p.kind == "processor":
        if p.cores is None or p.cores < 1:
            raise CatalogError(f"{p.name}: processor needs cores >= 1")
    elif p.cores is not None:
        raise CatalogError(f"{p.name}: only processors carry a core count")


def _opt_int(text: str) -> int | None:
    text = text.strip()
    return int(text) if text else None


def load_catalog(source: str | Path) -> PartCatalog:
    path = Path(source)
    parts = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CatalogError("empty catalog", str(path))
        if [h.strip() for h in header] != CATALOG_HEADER:
            raise ParseError(f"expected header {','.join(CATALOG_HEADER)}", str(path), 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CATALOG_HEADER):
                raise ParseError(f"expected {len(CATALOG_HEADER)} fields, got {len(row)}", str(path), line)
            kind, name, cap, cores, price = row
            try:
                part = Part(
                    kind=kind.strip(),
                    name=name.strip(),
                    capacity_mb=_opt_int(cap),
                    cores=_opt_int(cores),
                    price_cents=parse_cents(price),
                )
                _check_part(part)
            except ValueError as exc:
                raise ParseError(str(exc), str(path), line) from exc
            except CatalogError as exc:
                raise CatalogError(str(exc), str(path), line) from exc
            parts.append(part)
    if not parts:
        raise CatalogError("empty catalog", str(path))
    try:
        return PartCatalog(parts)
    except CatalogError as exc:
        raise CatalogError(str(exc), str(path)) from exc


def default_catalog_path() -> Path:
    return Path(str(resources.files("tinydse") / "data" / "catalog.csv"))


def default_catalog() -> PartCatalog:
    """Sensor, processor and memory prices from a 2023 distributor survey,
    plus a 16 MB flash tier at $1.44."""
    return load_catalog(default_catalog_path())


# -- board composition -------------------------------------------------------


def select_memory_tier(kind: str, required: int, catalog: PartCatalog) -> Part:
    """Cheapest part of ``kind`` holding at least ``required`` bytes."""
    if kind not in MEMORY_KINDS:
        raise SpecError("kind", f"must be one of {MEMORY_KINDS}, got {kind!r}")
    if required < 0:
        raise SpecError("required", f"must be >= 0, got {required}")
    tiers = catalog.of_kind(kind)
    if not tiers:
        raise InfeasibleError(f"catalog has no {kind} parts")
    fits = [p for p in tiers if p.capacity_bytes >= required]
    if not fits:
        largest = max(tiers, key=lambda p: p.capacity_mb)
        short = required - largest.capacity_bytes
        raise InfeasibleError(
            f"{kind} requirement of {required} bytes ({required / MB:.3f} MB) exceeds the largest tier "
            f"{largest.name} ({largest.capacity_mb} MB) by {short} bytes"
        )
    return min(fits, key=lambda p: (p.price_cents, p.capacity_mb, p.name))


@dataclass(frozen=True)
class Requirements:
    flash_bytes: int
    psram_bytes: int
    sensors: frozenset[str] = frozenset()
    min_cores: int = 1
    processor: str | None = None  # pin a specific processor by name

    def __post_init__(self):
        object.__setattr__(self, "sensors", frozenset(self.sensors))
        if self.flash_bytes < 0 or self.psram_bytes < 0:
            raise SpecError("requirements", "byte requirements must be >= 0")
        if self.min_cores < 1:
            raise SpecError("min_cores", f"must be >= 1, got {self.min_cores}")


@dataclass(frozen=True)
class BoardConfig:
    processor: Part
    sensors: tuple[Part, ...] = ()
    psram: Part | None = None
    flash: Part | None = None

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(sorted(self.sensors, key=lambda p: p.name)))
        names = [s.name for s in self.sensors]
        if len(set(names)) != len(names):
            raise SpecError("sensors", f"duplicate sensors {names}")
        if self.processor.kind != "processor":
            raise SpecError("processor", f"{self.processor.name} is a {self.processor.kind}")
        if self.psram is not None and self.psram.kind != "psram":
            raise SpecError("psram", f"{self.psram.name} is a {self.psram.kind}")
        if self.flash is not None and self.flash.kind != "flash":
            raise SpecError("flash", f"{self.flash.name} is a {self.flash.kind}")

    @property
    def sensor_names(self) -> frozenset[str]:
        return frozenset(s.name for s in self.sensors)

    @property
    def parts(self) -> list[Part]:
        out = [self.processor, *self.sensors]
        if self.psram is not None:
            out.append(self.psram)
        if self.flash is not None:
            out.append(self.flash)
        return out


@dataclass(frozen=True)
class CostBreakdown:
    items: tuple[tuple[str, int], ...]
    total_cents: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_cents", sum(c for _, c in self.items))

    @property
    def total_usd(self) -> Decimal:
        return Decimal(self.total_cents) / 100

    def __str__(self) -> str:
        lines = [f"{name:<16}{format_usd(c):>8}" for name, c in self.items]
        lines.append(f"{'total':<16}{format_usd(self.total_cents):>8}")
        return "\n".join(lines)


def min_board(req: Requirements, catalog: PartCatalog) -> BoardConfig:
    sensors = []
    for name in sorted(req.sensors):
        try:
            sensors.append(catalog.get("sensor", name))
        except KeyError:
            raise InfeasibleError(f"catalog has no sensor named {name!r}") from None
    candidates = [p for p in catalog.processors if p.cores >= req.min_cores]
    if req.processor is not None:
        candidates = [p for p in candidates if p.name == req.processor]
    if not candidates:
        pinned = f" named {req.processor!r}" if req.processor else ""
        raise InfeasibleError(f"no processor{pinned} with at least {req.min_cores} core(s)")
    return BoardConfig(
        processor=candidates[0],
        sensors=tuple(sensors),
        psram=select_memory_tier("psram", req.psram_bytes, catalog),
        flash=select_memory_tier("flash", req.flash_bytes, catalog),
    )


def board_cost(board: BoardConfig) -> CostBreakdown:
    return CostBreakdown(tuple((p.name, p.price_cents) for p in board.parts))

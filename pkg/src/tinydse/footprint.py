"""Storage and working-memory footprint of a quantized graph.

Weights live in flash next to the program image; activations live in PSRAM.
The working-memory requirement is the single largest activation buffer of
the graph (no tiling, no double buffering). The network input is always
held as 32-bit floats whatever the scheme.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .archmodel import ArchGraph, layer_activation_elems
from .errors import SpecError

MB = 2**20
DEFAULT_CODE_SIZE = MB // 4  # 0.25 MB program image

XNOR_ACT_BITS = (1, 2, 3)
XNOR_WEIGHT_BITS = (1, 2)
PACK_WORD_BITS = 32


@dataclass(frozen=True)
class PrecisionScheme:
    kind: str
    a_bits: int = 32
    w_bits: int = 32

    def __post_init__(self):
        if self.kind == "float32":
            if (self.a_bits, self.w_bits) != (32, 32):
                raise SpecError("scheme", "float32 uses 32-bit weights and activations")
        elif self.kind == "fixed8":
            if (self.a_bits, self.w_bits) != (8, 8):
                raise SpecError("scheme", "fixed8 uses 8-bit weights and activations")
        elif self.kind == "xnor":
            if self.a_bits not in XNOR_ACT_BITS:
                raise SpecError("a_bits", f"xnor activations must be one of {XNOR_ACT_BITS}, got {self.a_bits}")
            if self.w_bits not in XNOR_WEIGHT_BITS:
                raise SpecError("w_bits", f"xnor weights must be one of {XNOR_WEIGHT_BITS}, got {self.w_bits}")
        else:
            raise SpecError("scheme", f"unknown precision class {self.kind!r}")

    @classmethod
    def float32(cls) -> PrecisionScheme:
        return cls("float32", 32, 32)

    @classmethod
    def fixed8(cls) -> PrecisionScheme:
        return cls("fixed8", 8, 8)

    @classmethod
    def xnor(cls, a_bits: int, w_bits: int) -> PrecisionScheme:
        return cls("xnor", a_bits, w_bits)

    @classmethod
    def parse(cls, tag: str) -> PrecisionScheme:
        """Accepts ``float32``, ``fixed8`` and ``xnor_A_W`` (also ``xnorA/W``)."""
        t = tag.strip().lower()
        if t in ("float32", "float", "fp32"):
            return cls.float32()
        if t in ("fixed8", "fxp", "int8"):
            return cls.fixed8()
        m = re.fullmatch(r"xnor[_\s]?(\d+)[_/](\d+)", t)
        if m:
            return cls.xnor(int(m.group(1)), int(m.group(2)))
        raise SpecError("scheme", f"unrecognised scheme tag {tag!r}")

    @property
    def tag(self) -> str:
        if self.kind == "xnor":
            return f"xnor_{self.a_bits}_{self.w_bits}"
        return self.kind

    def __str__(self) -> str:
        return self.tag


DEFAULT_SCHEMES = (
    PrecisionScheme.float32(),
    PrecisionScheme.fixed8(),
    PrecisionScheme.xnor(3, 1),
    PrecisionScheme.xnor(2, 1),
    PrecisionScheme.xnor(2, 2),
)


def packed_bytes(n_params: int, bits: int) -> int:
    """Bytes for ``n_params`` values of ``bits`` each, padded to whole 32-bit words."""
    total_bits = bits * n_params
    words = -(-total_bits // PACK_WORD_BITS)
    return words * PACK_WORD_BITS // 8


def layer_param_bytes(n_params: int, scheme: PrecisionScheme) -> int:
    if scheme.kind == "float32":
        return 4 * n_params
    if scheme.kind == "fixed8":
        return n_params
    return packed_bytes(n_params, scheme.w_bits)


def param_bytes(graph: ArchGraph, scheme: PrecisionScheme) -> int:
    return sum(layer_param_bytes(l.param_count, scheme) for l in graph.layers)


def activation_bytes(elems: int, scheme: PrecisionScheme, is_network_input: bool = False) -> int:
    if elems < 0:
        raise ValueError(f"element count must be >= 0, got {elems}")
    if is_network_input or scheme.kind == "float32":
        return 4 * elems
    if scheme.kind == "fixed8":
        return elems
    return math.ceil(scheme.a_bits * elems / 8)


def activation_profile(graph: ArchGraph, scheme: PrecisionScheme) -> list[tuple[str, int]]:
    """``(name, bytes)`` for the input pseudo-layer followed by every layer output."""
    return [
        (name, activation_bytes(n, scheme, is_network_input=(i == 0)))
        for i, (name, n) in enumerate(layer_activation_elems(graph))
    ]


def peak_memory_bytes(graph: ArchGraph, scheme: PrecisionScheme) -> int:
    return max(b for _, b in activation_profile(graph, scheme))


def flash_required_bytes(param_bytes: int, code_size: int = DEFAULT_CODE_SIZE) -> int:
    if param_bytes < 0 or code_size < 0:
        raise ValueError("sizes must be >= 0")
    return param_bytes + code_size


@dataclass(frozen=True)
class LayerFootprint:
    name: str
    kind: str
    param_bytes: int
    activation_bytes: int


@dataclass(frozen=True)
class SizeReport:
    param_bytes: int
    peak_activation_bytes: int
    flash_required_bytes: int
    psram_required_bytes: int
    code_size_bytes: int
    per_layer_breakdown: tuple[LayerFootprint, ...] = ()

    @property
    def peak_layer(self) -> str:
        best = max(self.per_layer_breakdown, key=lambda l: l.activation_bytes, default=None)
        return best.name if best else ""


def size_report(graph: ArchGraph, scheme: PrecisionScheme, code_size: int = DEFAULT_CODE_SIZE) -> SizeReport:
    acts = activation_profile(graph, scheme)
    rows = [LayerFootprint("input", "input", 0, acts[0][1])]
    for layer, (_, act) in zip(graph.layers, acts[1:]):
        rows.append(LayerFootprint(layer.name, layer.kind, layer_param_bytes(layer.param_count, scheme), act))
    pbytes = sum(r.param_bytes for r in rows)
    peak = max(r.activation_bytes for r in rows)
    return SizeReport(
        param_bytes=pbytes,
        peak_activation_bytes=peak,
        flash_required_bytes=flash_required_bytes(pbytes, code_size),
        psram_required_bytes=peak,
        code_size_bytes=code_size,
        per_layer_breakdown=tuple(rows),
    )

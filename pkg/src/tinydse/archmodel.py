"""Block-list ResNet architectures and their elaborated layer graphs.

An :class:`ArchSpec` is the compact description (blocks per stage, base
width, input geometry); :func:`build_arch` expands it into an
:class:`ArchGraph` of :class:`LayerNode` objects whose parameter counts,
operation counts and activation sizes drive every downstream estimate.

The graph is the inference-time network: the identity classifier used during
training is dropped and the embedding layer is the last node.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ParseError, SpecError

LAYER_KINDS = ("conv", "batchnorm", "relu", "maxpool", "avgpool", "fc", "residual_add")
STEM_VARIANTS = ("standard", "modified")

# stem conv is 7x7; downstream block convs are 3x3
STEM_KERNEL = 7
BLOCK_KERNEL = 3

Shape = tuple[int, ...]


@dataclass(frozen=True)
class ArchSpec:
    name: str
    stage_blocks: tuple[int, ...]
    base_channels: int = 64
    input_shape: tuple[int, int, int] = (224, 224, 3)
    embedding_dim: int = 512
    stem_variant: str = "standard"

    def __post_init__(self):
        object.__setattr__(self, "stage_blocks", tuple(self.stage_blocks))
        object.__setattr__(self, "input_shape", tuple(self.input_shape))
        if not self.name:
            raise SpecError("name", "must be non-empty")
        if len(self.stage_blocks) == 0:
            raise SpecError("stage_blocks", "at least one stage is required")
        for i, b in enumerate(self.stage_blocks):
            if not isinstance(b, int) or b < 1:
                raise SpecError("stage_blocks", f"stage {i + 1} has {b!r} blocks; need an integer >= 1")
        if self.base_channels < 1:
            raise SpecError("base_channels", f"must be >= 1, got {self.base_channels}")
        if self.embedding_dim < 1:
            raise SpecError("embedding_dim", f"must be >= 1, got {self.embedding_dim}")
        if len(self.input_shape) != 3 or any(d < 1 for d in self.input_shape):
            raise SpecError("input_shape", f"need (height, width, channels) all >= 1, got {self.input_shape}")
        if self.stem_variant not in STEM_VARIANTS:
            raise SpecError("stem_variant", f"must be one of {STEM_VARIANTS}, got {self.stem_variant!r}")

    def stage_channels(self, stage: int) -> int:
        """Channel width of a 0-based stage: doubles at every stage boundary."""
        return self.base_channels * 2**stage

    @property
    def blocks_tag(self) -> str:
        return "-".join(str(b) for b in self.stage_blocks)


@dataclass(frozen=True)
class LayerNode:
    """One node of the inference graph.

    ``inputs`` holds indices of producer layers; ``-1`` is the network input.
    ``opcount`` is multiply-accumulates for conv/fc and element operations
    for everything else.
    """

    kind: str
    name: str
    in_shape: Shape
    out_shape: Shape
    inputs: tuple[int, ...]
    kernel: tuple[int, int] | None = None
    stride: int = 1
    has_bias: bool = False
    param_count: int = 0
    opcount: int = 0

    @property
    def out_elems(self) -> int:
        return math.prod(self.out_shape)


@dataclass(frozen=True)
class ArchGraph:
    spec: ArchSpec
    layers: tuple[LayerNode, ...]
    residual_edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        for idx, layer in enumerate(self.layers):
            if any(src >= idx or src < -1 for src in layer.inputs):
                raise SpecError("layers", f"layer {idx} ({layer.name}) is not topologically ordered")
            if layer.kind == "residual_add":
                if len(layer.inputs) != 2:
                    raise SpecError("layers", f"{layer.name} needs exactly two inputs")
                a, b = (self._shape_of(i) for i in layer.inputs)
                if a != b:
                    raise SpecError("layers", f"{layer.name} adds mismatched shapes {a} and {b}")

    def _shape_of(self, idx: int) -> Shape:
        return self.spec.input_shape if idx == -1 else self.layers[idx].out_shape

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    @property
    def weight_layers(self) -> list[LayerNode]:
        return [l for l in self.layers if l.kind in ("conv", "fc")]

    @property
    def total_params(self) -> int:
        return param_count(self)

    @property
    def total_ops(self) -> int:
        return sum(l.opcount for l in self.layers)


# -- geometry helpers --------------------------------------------------------


def conv_out(size: int, kernel: int, stride: int) -> int:
    pad = kernel // 2
    return (size + 2 * pad - kernel) // stride + 1


def pool_out(size: int, kernel: int) -> int:
    return (size - kernel) // kernel + 1


def conv_params(kh: int, kw: int, cin: int, cout: int, bias: bool = False) -> int:
    return kh * kw * cin * cout + (cout if bias else 0)


def fc_params(n_in: int, n_out: int, bias: bool = True) -> int:
    return n_in * n_out + (n_out if bias else 0)


def batchnorm_params(channels: int) -> int:
    # affine scale and shift; running statistics fold into them at inference
    return 2 * channels


def conv_layer(name, in_shape, inputs, cout, kernel, stride, bias=False) -> LayerNode:
    h, w, cin = in_shape
    oh, ow = conv_out(h, kernel, stride), conv_out(w, kernel, stride)
    return LayerNode(
        kind="conv",
        name=name,
        in_shape=tuple(in_shape),
        out_shape=(oh, ow, cout),
        inputs=tuple(inputs),
        kernel=(kernel, kernel),
        stride=stride,
        has_bias=bias,
        param_count=conv_params(kernel, kernel, cin, cout, bias),
        opcount=oh * ow * kernel * kernel * cin * cout,
    )


def fc_layer(name, n_in, n_out, inputs, bias=True) -> LayerNode:
    return LayerNode(
        kind="fc",
        name=name,
        in_shape=(n_in,),
        out_shape=(n_out,),
        inputs=tuple(inputs),
        has_bias=bias,
        param_count=fc_params(n_in, n_out, bias),
        opcount=n_in * n_out,
    )


def _elementwise(kind, name, shape, inputs) -> LayerNode:
    n = math.prod(shape)
    params = batchnorm_params(shape[-1]) if kind == "batchnorm" else 0
    return LayerNode(kind, name, tuple(shape), tuple(shape), tuple(inputs), param_count=params, opcount=n)


def pool_layer(kind, name, in_shape, inputs, kernel) -> LayerNode:
    h, w, c = in_shape
    if kind == "avgpool":
        kh, kw = h, w
        out: Shape = (c,)
    else:
        kh = kw = kernel
        out = (pool_out(h, kernel), pool_out(w, kernel), c)
    return LayerNode(
        kind=kind,
        name=name,
        in_shape=tuple(in_shape),
        out_shape=out,
        inputs=tuple(inputs),
        kernel=(kh, kw),
        stride=kernel if kind == "maxpool" else 1,
        opcount=kh * kw * math.prod(out),
    )


# -- construction ------------------------------------------------------------


class _Builder:
    def __init__(self, spec: ArchSpec):
        self.spec = spec
        self.layers: list[LayerNode] = []
        self.residuals: list[tuple[int, int]] = []

    def add(self, node: LayerNode) -> int:
        if any(d < 1 for d in node.out_shape):
            raise SpecError(
                "input_shape", f"{self.spec.input_shape} is too small: {node.name} would produce {node.out_shape}"
            )
        self.layers.append(node)
        return len(self.layers) - 1

    def shape(self, idx: int) -> Shape:
        return self.spec.input_shape if idx == -1 else self.layers[idx].out_shape

    def stem(self) -> int:
        spec = self.spec
        modified = spec.stem_variant == "modified"
        stride, pool_k = (1, 4) if modified else (2, 2)
        cur = self.add(conv_layer("stem.conv", spec.input_shape, [-1], spec.base_channels, STEM_KERNEL, stride))
        if modified:
            cur = self.add(pool_layer("maxpool", "stem.pool", self.shape(cur), [cur], pool_k))
            cur = self.add(_elementwise("batchnorm", "stem.bn", self.shape(cur), [cur]))
            cur = self.add(_elementwise("relu", "stem.relu", self.shape(cur), [cur]))
        else:
            cur = self.add(_elementwise("batchnorm", "stem.bn", self.shape(cur), [cur]))
            cur = self.add(_elementwise("relu", "stem.relu", self.shape(cur), [cur]))
            cur = self.add(pool_layer("maxpool", "stem.pool", self.shape(cur), [cur], pool_k))
        return cur

    def basic_block(self, prefix: str, src: int, cout: int, stride: int) -> int:
        in_shape = self.shape(src)
        cur = self.add(conv_layer(f"{prefix}.conv1", in_shape, [src], cout, BLOCK_KERNEL, stride))
        cur = self.add(_elementwise("batchnorm", f"{prefix}.bn1", self.shape(cur), [cur]))
        cur = self.add(_elementwise("relu", f"{prefix}.relu1", self.shape(cur), [cur]))
        cur = self.add(conv_layer(f"{prefix}.conv2", self.shape(cur), [cur], cout, BLOCK_KERNEL, 1))
        main = self.add(_elementwise("batchnorm", f"{prefix}.bn2", self.shape(cur), [cur]))
        shortcut = src
        if stride != 1 or in_shape[-1] != cout:
            ds = self.add(conv_layer(f"{prefix}.downsample.conv", in_shape, [src], cout, 1, stride))
            shortcut = self.add(_elementwise("batchnorm", f"{prefix}.downsample.bn", self.shape(ds), [ds]))
        add = self.add(_elementwise("residual_add", f"{prefix}.add", self.shape(main), [main, shortcut]))
        self.residuals.append((shortcut, add))
        return self.add(_elementwise("relu", f"{prefix}.relu2", self.shape(add), [add]))

    def build(self) -> ArchGraph:
        spec = self.spec
        cur = self.stem()
        for stage, n_blocks in enumerate(spec.stage_blocks):
            cout = spec.stage_channels(stage)
            for b in range(n_blocks):
                stride = 2 if (stage > 0 and b == 0) else 1
                cur = self.basic_block(f"stage{stage + 1}.block{b + 1}", cur, cout, stride)
        cur = self.add(pool_layer("avgpool", "avgpool", self.shape(cur), [cur], 0))
        self.add(fc_layer("embedding", self.shape(cur)[0], spec.embedding_dim, [cur]))
        return ArchGraph(spec, tuple(self.layers), tuple(self.residuals))


@lru_cache(maxsize=256)
def build_arch(spec: ArchSpec) -> ArchGraph:
    """Expand a block-list spec into its inference-time layer graph.

    Layout: 7x7 stem conv with batchnorm, relu and max pooling; then for
    every stage a run of basic blocks (two 3x3 convs and a shortcut) at
    ``base_channels * 2**stage`` channels, downsampling by 2 at the first
    block of every stage after the first; then global average pooling and
    a biased fully-connected layer to the embedding.
    """
    return _Builder(spec).build()


def param_count(graph: ArchGraph) -> int:
    return sum(l.param_count for l in graph.layers)


def layer_opcounts(graph: ArchGraph) -> list[tuple[LayerNode, int]]:
    return [(l, l.opcount) for l in graph.layers]


def layer_activation_elems(graph: ArchGraph) -> list[tuple[str, int]]:
    """Output element count per layer, with the network input as entry 0."""
    out = [("input", math.prod(graph.spec.input_shape))]
    out.extend((l.name, l.out_elems) for l in graph.layers)
    return out


# -- architecture files ------------------------------------------------------

ARCH_HEADER = ["name", "blocks", "base_channels", "input_h", "input_w", "input_c", "embedding_dim", "stem"]


def parse_blocks(text: str) -> tuple[int, ...]:
    text = text.strip().strip("[]")
    parts = [p for p in text.replace(",", "-").split("-") if p.strip()]
    return tuple(int(p) for p in parts)


def load_archs(path: str | Path) -> dict[str, ArchSpec]:
    """Read an architecture CSV into specs keyed by name, preserving file order."""
    path = Path(path)
    specs: dict[str, ArchSpec] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty architecture file", str(path))
        if [h.strip() for h in header] != ARCH_HEADER:
            raise ParseError(f"expected header {','.join(ARCH_HEADER)}", str(path), 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(ARCH_HEADER):
                raise ParseError(f"expected {len(ARCH_HEADER)} fields, got {len(row)}", str(path), line)
            name, blocks, base, ih, iw, ic, emb, stem = (c.strip() for c in row)
            try:
                spec = ArchSpec(
                    name=name,
                    stage_blocks=parse_blocks(blocks),
                    base_channels=int(base),
                    input_shape=(int(ih), int(iw), int(ic)),
                    embedding_dim=int(emb),
                    stem_variant=stem or "standard",
                )
            except (ValueError, SpecError) as exc:
                raise ParseError(str(exc), str(path), line) from exc
            if name in specs:
                raise ParseError(f"duplicate architecture {name!r}", str(path), line)
            specs[name] = spec
    if not specs:
        raise ParseError("no architectures defined", str(path))
    return specs


def default_archs_path() -> Path:
    return Path(str(resources.files("tinydse") / "data" / "archs.csv"))


def default_archs() -> dict[str, ArchSpec]:
    """The six-model family from ResNet-6 ([1, 1]) up to ResNet-18 ([2, 2, 2, 2])."""
    return load_archs(default_archs_path())


def dump_archs(specs: Iterable[ArchSpec]) -> str:
    lines = [",".join(ARCH_HEADER)]
    for s in specs:
        h, w, c = s.input_shape
        lines.append(f"{s.name},{s.blocks_tag},{s.base_channels},{h},{w},{c},{s.embedding_dim},{s.stem_variant}")
    return "\n".join(lines) + "\n"

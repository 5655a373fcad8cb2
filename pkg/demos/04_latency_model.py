# # Latency from operation counts
#
# Every layer costs opcount x a per-op coefficient. The bundled coefficients
# are illustrative placeholders, not measurements from a device; calibrate
# your own and pass them with --coeffs.

# -
from tinydse.archmodel import build_arch, default_archs, layer_opcounts
from tinydse.footprint import DEFAULT_SCHEMES, PrecisionScheme
from tinydse.perfmodel import DEFAULT_PREPROCESSING, effective_latency, load_coeffs, model_latency, system_latency
from tinydse.hwcatalog import default_catalog_path

coeffs = load_coeffs(default_catalog_path().with_name("coeffs_illustrative.csv"))
archs = default_archs()

# -
graph = build_arch(archs["resnet10"])
by_kind = {}
for layer, ops in layer_opcounts(graph):
    by_kind[layer.kind] = by_kind.get(layer.kind, 0) + ops
for kind, ops in sorted(by_kind.items(), key=lambda kv: -kv[1]):
    print(f"{kind:<13}{ops:>15,}")

# -
# Multi-bit XNOR repeats the binary pass once per activation/weight bit
# plane, so xnor 2/1 takes exactly twice as long as xnor 1/1.

for scheme in [*DEFAULT_SCHEMES, PrecisionScheme.xnor(1, 1)]:
    print(f"{scheme.tag:<9}{model_latency(graph, scheme, coeffs):9.3f} s")

# -
# Fusion runs two identical branches. A dual-core part runs them side by
# side; preprocessing (capture, crop, audio recording) stays serial.

t = model_latency(graph, PrecisionScheme.fixed8(), coeffs)
for cores in (1, 2):
    pipe = system_latency([("face", t), ("voice", t)], cores, DEFAULT_PREPROCESSING, include_preprocessing=True)
    print(f"{cores} core(s): compute {pipe.compute_seconds:.3f} s, total {pipe.total_seconds:.3f} s")

# -
# A false reject costs a retry. With independent attempts the expected time
# to get in is L / (1 - FRR).

for frr in (0.0, 0.05, 0.2, 0.5):
    print(f"FRR {frr:4.2f}: {effective_latency(t, frr):.3f} s")

# # Parameter sizes of the six-model ResNet family
#
# Each model is a block list: the number of basic blocks per stage. The
# graph builder expands it into layers, and the footprint module turns
# parameter counts into bytes.

# -
from tinydse.archmodel import build_arch, default_archs
from tinydse.footprint import MB, DEFAULT_SCHEMES, param_bytes

# published float32 sizes in MB
published = {"resnet6": 1.453, "resnet8a": 1.736, "resnet8b": 2.583, "resnet10": 2.860, "resnet14": 11.124, "resnet18": 43.564}

# -
archs = default_archs()
print(f"{'model':<10}{'blocks':<10}{'params':>12}{'float MB':>10}{'published':>11}{'diff %':>8}")
for name, spec in archs.items():
    g = build_arch(spec)
    mb = param_bytes(g, DEFAULT_SCHEMES[0]) / MB
    diff = 100 * (mb - published[name]) / published[name]
    print(f"{name:<10}{spec.blocks_tag:<10}{g.total_params:>12,}{mb:>10.3f}{published[name]:>11.3f}{diff:>8.2f}")

# -
# The other precision schemes shrink the same weights. XNOR packs w_bits per
# weight into 32-bit words, so a 1-bit model is about 1/32 of float32.

print()
print(f"{'model':<10}" + "".join(f"{s.tag:>11}" for s in DEFAULT_SCHEMES))
for name, spec in archs.items():
    g = build_arch(spec)
    print(f"{name:<10}" + "".join(f"{param_bytes(g, s) / MB:>11.3f}" for s in DEFAULT_SCHEMES))

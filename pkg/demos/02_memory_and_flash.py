# # Peak activation memory and flash sizing
#
# Activations live in PSRAM and the largest single buffer sets the
# requirement. The network input is always stored as float32.

# -
from tinydse.archmodel import ArchSpec, build_arch, layer_activation_elems
from tinydse.footprint import MB, DEFAULT_SCHEMES, flash_required_bytes, size_report
from tinydse.hwcatalog import default_catalog, select_memory_tier

catalog = default_catalog()

# -
# With a 32-channel stem the first conv writes 112x112x32 values: 1.53 MB as
# float, larger than the 0.57 MB input. Any narrower format falls below the
# input, so the input buffer becomes the peak.

narrow = build_arch(ArchSpec("narrow10", (2, 2), base_channels=32))
for scheme in DEFAULT_SCHEMES:
    rep = size_report(narrow, scheme)
    tier = select_memory_tier("psram", rep.peak_activation_bytes, catalog)
    print(f"{scheme.tag:<9} peak {rep.peak_activation_bytes:>9,} B at {rep.peak_layer:<10} -> {tier.name}")

# -
# The first few activation sizes show where the peak comes from.

for name, elems in layer_activation_elems(narrow)[:6]:
    print(f"  {name:<14}{elems:>10,} elements")

# -
# Flash holds the weights plus the program image (256 KiB by default).

need = flash_required_bytes(3 * MB, MB // 4)
print(f"\n3 MB weights + 0.25 MB code = {need / MB:.2f} MB -> {select_memory_tier('flash', need, catalog).name}")

wide = build_arch(ArchSpec("resnet10", (2, 2)))
for scheme in DEFAULT_SCHEMES:
    rep = size_report(wide, scheme)
    tier = select_memory_tier("flash", rep.flash_required_bytes, catalog)
    print(f"resnet10 {scheme.tag:<9} flash {rep.flash_required_bytes / MB:6.3f} MB -> {tier.name}")

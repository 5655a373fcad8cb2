# # Bill of materials for a minimal board
#
# A board is one processor, the sensors a modality needs, and the cheapest
# PSRAM and flash tiers that fit. Prices are kept in integer cents.

# -
from tinydse.archmodel import build_arch, default_archs
from tinydse.footprint import MB, PrecisionScheme, flash_required_bytes, param_bytes, peak_memory_bytes
from tinydse.hwcatalog import BoardConfig, Requirements, board_cost, default_catalog, format_usd, min_board

catalog = default_catalog()
for part in catalog:
    print(f"{part.kind:<10}{part.name:<12}{format_usd(part.price_cents):>7}")

# -
# The full dual-core face+voice board with 8 MB PSRAM and 4 MB flash.

g = catalog.get
full = BoardConfig(
    g("processor", "esp32s3"),
    (g("sensor", "camera"), g("sensor", "microphone")),
    g("psram", "psram_8mb"),
    g("flash", "flash_4mb"),
)
cost = board_cost(full)
for name, cents in cost.items:
    print(f"  {name:<12}{format_usd(cents):>7}")
print(f"  {'total':<12}{format_usd(cost.total_cents):>7}")

# -
# The camera alone outprices the largest memory upgrade, so dropping a
# modality saves more than shrinking the model.

cam = g("sensor", "camera").price_cents
mem = g("flash", "flash_8mb").price_cents + g("psram", "psram_16mb").price_cents
print(f"\ncamera {format_usd(cam)} vs 8 MB flash + 16 MB PSRAM {format_usd(mem)}")

# -
# Derived boards for resnet10 across precisions and modalities.

spec = default_archs()["resnet10"]
graph = build_arch(spec)
for tag in ("float32", "fixed8", "xnor_2_1"):
    scheme = PrecisionScheme.parse(tag)
    for modality, sensors, n in (("voice", {"microphone"}, 1), ("face", {"camera"}, 1), ("fusion", {"camera", "microphone"}, 2)):
        flash = flash_required_bytes(n * param_bytes(graph, scheme))
        board = min_board(Requirements(flash, peak_memory_bytes(graph, scheme), sensors), catalog)
        print(f"{tag:<9}{modality:<7}{board.psram.name:<11}{board.flash.name:<11}{format_usd(board_cost(board).total_cents):>7}")

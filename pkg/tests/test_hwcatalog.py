import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tinydse.errors import CatalogError, InfeasibleError, ParseError
from tinydse.footprint import MB
from tinydse.hwcatalog import (
    BoardConfig,
    Requirements,
    board_cost,
    load_catalog,
    min_board,
    parse_cents,
    select_memory_tier,
)

HEADER = "kind,name,capacity_mb,cores,price_usd\n"


def write(tmp_path, body):
    p = tmp_path / "cat.csv"
    p.write_text(body)
    return p


def test_base_catalog_loads_13_parts(base_catalog_file):
    cat = load_catalog(base_catalog_file)
    assert len(cat) == 13
    assert cat.get("sensor", "camera").price_cents == 760


def test_default_catalog_has_16mb_flash(catalog):
    assert len(catalog) == 14
    assert catalog.get("flash", "flash_16mb").price_cents == 144


def test_empty_file(tmp_path):
    with pytest.raises(CatalogError, match="empty"):
        load_catalog(write(tmp_path, ""))
    with pytest.raises(CatalogError, match="empty"):
        load_catalog(write(tmp_path, HEADER))


def test_non_power_of_two_capacity(tmp_path):
    with pytest.raises(CatalogError, match="power of two") as err:
        load_catalog(write(tmp_path, HEADER + "psram,p3,3,,2.50\n"))
    assert err.value.line == 2


def test_non_monotone_tier_price(tmp_path):
    body = HEADER + "flash,a,1,,0.50\nflash,b,2,,0.40\n"
    with pytest.raises(CatalogError, match="rise with capacity"):
        load_catalog(write(tmp_path, body))


def test_duplicate_part(tmp_path):
    body = HEADER + "sensor,camera,,,7.60\nsensor,camera,,,7.00\n"
    with pytest.raises(CatalogError, match="duplicate"):
        load_catalog(write(tmp_path, body))


@pytest.mark.parametrize(
    "row",
    ["sensor,camera,,,abc\n", "sensor,camera,,,1.234\n", "sensor,camera,,\n", "processor,p,,x,1.00\n"],
)
def test_parse_errors_have_line_numbers(tmp_path, row):
    with pytest.raises(ParseError) as err:
        load_catalog(write(tmp_path, HEADER + "sensor,mic,,,1.00\n" + row))
    assert err.value.line == 3


def test_parse_cents_exact():
    assert parse_cents("3.3") == 330
    assert parse_cents("0.07") == 7
    assert parse_cents("19.90") == 1990


def test_select_tier(catalog):
    assert select_memory_tier("flash", int(3.25 * MB), catalog).capacity_mb == 4
    assert select_memory_tier("flash", 1, catalog).capacity_mb == 1
    assert select_memory_tier("flash", 4 * MB, catalog).capacity_mb == 4
    assert select_memory_tier("flash", 4 * MB + 1, catalog).capacity_mb == 8


def test_select_tier_infeasible(base_catalog_file):
    cat = load_catalog(base_catalog_file)
    with pytest.raises(InfeasibleError, match="exceeds the largest tier flash_8mb"):
        select_memory_tier("flash", 12 * MB, cat)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 16 * MB))
def test_tier_tightness(catalog, required):
    part = select_memory_tier("psram", required, catalog)
    assert part.capacity_bytes >= required
    assert part.capacity_bytes < 2 * required or part.capacity_mb == 1


def test_min_board_fusion(catalog):
    req = Requirements(int(3.25 * MB), int(0.57 * MB), {"camera", "microphone"}, 2)
    board = min_board(req, catalog)
    assert board.processor.name == "esp32s3"
    assert board.sensor_names == {"camera", "microphone"}
    assert board.psram.capacity_mb == 1
    assert board.flash.capacity_mb == 4


def test_min_board_minimal(catalog):
    board = min_board(Requirements(1, 1, set(), 1), catalog)
    assert board.processor.name == "esp32c3"
    assert board.sensors == ()
    assert (board.psram.capacity_mb, board.flash.capacity_mb) == (1, 1)


def test_min_board_errors(catalog):
    with pytest.raises(InfeasibleError, match="lidar"):
        min_board(Requirements(1, 1, {"lidar"}, 1), catalog)
    with pytest.raises(InfeasibleError, match="4 core"):
        min_board(Requirements(1, 1, set(), 4), catalog)


def test_board_costs(catalog):
    g = catalog.get
    full = BoardConfig(
        g("processor", "esp32s3"),
        (g("sensor", "camera"), g("sensor", "microphone")),
        g("psram", "psram_8mb"),
        g("flash", "flash_4mb"),
    )
    cost = board_cost(full)
    assert cost.total_cents == 1671
    assert str(cost.total_usd) == "16.71"
    assert cost.total_cents < 1990
    voice = BoardConfig(g("processor", "esp32c3"), (g("sensor", "microphone"),), g("psram", "psram_1mb"), g("flash", "flash_1mb"))
    assert board_cost(voice).total_cents == 517
    assert board_cost(BoardConfig(g("processor", "esp32s3"))).total_cents == 352


def test_table_anchored_deltas(catalog):
    g = catalog.get
    assert g("flash", "flash_16mb").price_cents - g("flash", "flash_1mb").price_cents == 100
    assert g("sensor", "camera").price_cents > g("flash", "flash_8mb").price_cents + g("psram", "psram_16mb").price_cents


req_strategy = st.tuples(
    st.integers(0, 16 * MB),
    st.integers(0, 16 * MB),
    st.sets(st.sampled_from(["camera", "microphone"])),
    st.integers(1, 2),
)


@settings(max_examples=200, deadline=None)
@given(req_strategy, st.integers(0, 3), st.integers(0, MB))
def test_min_board_cost_monotone(catalog, base, which, bump):
    flash, psram, sensors, cores = base
    req = Requirements(flash, psram, sensors, cores)
    grown = list(base)
    if which == 0:
        grown[0] = min(16 * MB, flash + bump)
    elif which == 1:
        grown[1] = min(16 * MB, psram + bump)
    elif which == 2:
        grown[2] = sensors | {"camera"}
    else:
        grown[3] = 2
    before = board_cost(min_board(req, catalog)).total_cents
    after = board_cost(min_board(Requirements(*grown), catalog)).total_cents
    assert after >= before

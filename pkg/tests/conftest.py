from pathlib import Path

import pytest

from tinydse.archmodel import ArchSpec, default_archs
from tinydse.hwcatalog import default_catalog
from tinydse.perfmodel import load_coeffs

DATA = Path(__file__).resolve().parents[1] / "src" / "tinydse" / "data"

BASE_CATALOG_ROWS = """kind,name,capacity_mb,cores,price_usd
sensor,camera,,,7.6
sensor,microphone,,,1.56
processor,esp32c3,,1,1.1
processor,esp32s3,,2,3.52
psram,psram_1mb,1,,2.07
psram,psram_2mb,2,,2.48
psram,psram_4mb,4,,2.81
psram,psram_8mb,8,,3.3
psram,psram_16mb,16,,3.88
flash,flash_1mb,1,,0.44
flash,flash_2mb,2,,0.57
flash,flash_4mb,4,,0.73
flash,flash_8mb,8,,0.92
"""

# (blocks, published float32 parameter size in MB) for the six-model family
PUBLISHED_SIZES = [
    ((1, 1), 1.453),
    ((2, 1), 1.736),
    ((1, 2), 2.583),
    ((2, 2), 2.860),
    ((2, 2, 2), 11.124),
    ((2, 2, 2, 2), 43.564),
]

# lines reported by test_acceptance.py, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def base_catalog_file(tmp_path):
    path = tmp_path / "base_catalog.csv"
    path.write_text(BASE_CATALOG_ROWS)
    return path


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def coeffs():
    return load_coeffs(DATA / "coeffs_illustrative.csv")


@pytest.fixture(scope="session")
def archs():
    return default_archs()


@pytest.fixture
def resnet6():
    return ArchSpec("resnet6", (1, 1))


def family_spec(blocks, **kw) -> ArchSpec:
    return ArchSpec("r" + "".join(map(str, blocks)), blocks, **kw)

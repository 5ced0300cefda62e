import json
from functools import lru_cache
from pathlib import Path

import pytest

from bccspec.spectrum import compute_spectrum

DATA = Path(__file__).parent / "data"
RATES = ("1/2", "2/3", "3/4", "5/6")


@lru_cache(maxsize=None)
def spectrum_at(rate: str, d_max: int):
    """Spectra are pure functions of (rate, d_max); share them across tests."""
    return compute_spectrum(rate, d_max)


@pytest.fixture(scope="session")
def reference_spectra():
    with open(DATA / "reference_spectra.json") as fh:
        raw = json.load(fh)
    return {rate: [tuple(int(v) for v in row) for row in rows] for rate, rows in raw.items()}

"""Union bounds on bit and frame error probability over AWGN.

All bounds share the pairwise error kernel

    P2(d) = Q(sqrt(2 * Rc * d * delta_M * Eb/N0))

where ``delta_M`` is 1 for BPSK/QPSK and ``3m / (2(M-1))`` for Gray-coded
square M-QAM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .spectrum import DistanceSpectrum

SUPPORTED_M = (2, 4, 16, 64, 256)

MODULATION_NAMES = {
    "bpsk": 2,
    "qpsk": 4,
    "16qam": 16,
    "64qam": 64,
    "256qam": 256,
}


@dataclass(frozen=True)
class ModulationSpec:
    M: int

    def __post_init__(self):
        if self.M not in SUPPORTED_M:
            raise ValueError(f"unsupported constellation size M={self.M}; choose from {SUPPORTED_M}")

    @classmethod
    def from_name(cls, name: str) -> "ModulationSpec":
        try:
            return cls(MODULATION_NAMES[name.lower()])
        except KeyError:
            raise ValueError(f"unknown modulation {name!r}; choose from {', '.join(MODULATION_NAMES)}") from None

    @property
    def m(self) -> int:
        return self.M.bit_length() - 1

    @property
    def delta(self) -> Fraction:
        """Per-bit minimum-distance penalty relative to BPSK."""
        if self.M <= 4:
            return Fraction(1)
        return Fraction(3 * self.m, 2 * (self.M - 1))

    @property
    def penalty_db(self) -> float:
        return 10 * math.log10(1 / self.delta)

    @property
    def name(self) -> str:
        return {v: k for k, v in MODULATION_NAMES.items()}[self.M]


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def q_function(x):
    """Gaussian tail probability ``Q(x) = erfc(x / sqrt 2) / 2``."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def pairwise_error(d: int, rate, delta, ebno_db):
    if d < 1:
        raise ValueError(f"distance must be >= 1, got {d}")
    snr = db_to_linear(ebno_db)
    return q_function(np.sqrt(2.0 * float(rate) * d * float(delta) * snr))


def uncoded_bpsk(ebno_db):
    return q_function(np.sqrt(2.0 * db_to_linear(ebno_db)))


def uncoded_qam(M: int, ebno_db):
    """Gray-coded square M-QAM bit error probability (nearest-neighbour approximation)."""
    if M not in (4, 16, 64, 256):
        raise ValueError(f"uncoded QAM reference needs square M in (4, 16, 64, 256), got {M}")
    m = int(math.log2(M))
    return (4.0 / m) * (1 - 1 / math.sqrt(M)) * q_function(np.sqrt(3.0 * m / (M - 1) * db_to_linear(ebno_db)))


@dataclass
class BoundQuery:
    spectrum: DistanceSpectrum
    ebno_db: Sequence[float]
    modulation: ModulationSpec = field(default_factory=lambda: ModulationSpec(4))
    terms: int | None = None
    frame_bits: int = 1
    rate: Fraction | None = None

    def __post_init__(self):
        if self.spectrum.is_empty:
            raise ValueError(f"spectrum is empty: no terms with d <= {self.spectrum.d_max}")
        if self.rate is None:
            self.rate = self.spectrum.schedule.rate
        available = len(self.spectrum)
        if self.terms is None:
            self.terms = available
        if self.terms < 1:
            raise ValueError("terms must be >= 1")
        if self.terms > available:
            raise ValueError(
                f"requested {self.terms} spectrum terms but only {available} are available "
                f"at d_max={self.spectrum.d_max}"
            )
        if self.frame_bits < 1:
            raise ValueError("frame_bits must be >= 1")
        grid = np.atleast_1d(np.asarray(self.ebno_db, dtype=float))
        if not np.all(np.isfinite(grid)):
            raise ValueError("Eb/N0 grid must be finite")
        self.ebno_db = grid


@dataclass
class BoundCurve:
    ebno_db: np.ndarray
    raw: np.ndarray
    kind: str
    rate: Fraction | None = None
    M: int = 4
    terms: int | None = None
    frame_bits: int | None = None

    @property
    def values(self) -> np.ndarray:
        """Probabilities clamped to 1."""
        return np.minimum(self.raw, 1.0)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.ebno_db.tolist(), self.values.tolist()))


def _weighted_sum(query: BoundQuery, coeffs: dict[int, int]) -> np.ndarray:
    total = np.zeros_like(query.ebno_db)
    for d in query.spectrum.distances()[: query.terms]:
        total += float(coeffs[d]) * pairwise_error(d, query.rate, query.modulation.delta, query.ebno_db)
    return total


def bep_union_bound(query: BoundQuery) -> BoundCurve:
    raw = _weighted_sum(query, query.spectrum.beta)
    return BoundCurve(query.ebno_db, raw, "bep", query.rate, query.modulation.M, query.terms)


def fer_union_bound(query: BoundQuery) -> BoundCurve:
    raw = query.frame_bits * _weighted_sum(query, query.spectrum.alpha)
    return BoundCurve(query.ebno_db, raw, "fer", query.rate, query.modulation.M, query.terms, query.frame_bits)


def single_term_approx(spectrum: DistanceSpectrum, rate, delta, ebno_db):
    if spectrum.is_empty:
        raise ValueError("spectrum is empty")
    d = spectrum.d_free
    return spectrum.beta[d] * pairwise_error(d, rate, delta, ebno_db)


def uncoded_curve(M: int, ebno_db) -> BoundCurve:
    grid = np.atleast_1d(np.asarray(ebno_db, dtype=float))
    raw = uncoded_bpsk(grid) if M == 2 else uncoded_qam(M, grid)
    return BoundCurve(grid, np.asarray(raw), "uncoded", None, M)


def parse_grid(text: str) -> np.ndarray:
    """``"start:stop:step"`` in dB, endpoints included within half a step."""
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise ValueError(f"invalid SNR grid {text!r}; expected start:stop:step") from None
    if len(parts) == 1:
        parts = [parts[0], parts[0], 1.0]
    if len(parts) != 3:
        raise ValueError(f"invalid SNR grid {text!r}; expected start:stop:step")
    start, stop, step = parts
    if not all(map(math.isfinite, parts)):
        raise ValueError("SNR grid values must be finite")
    if step <= 0:
        raise ValueError("SNR grid step must be positive")
    if stop < start:
        raise ValueError("SNR grid stop must be >= start")
    n = int(math.floor((stop - start) / step + 0.5)) + 1
    return np.round(start + step * np.arange(n), 10)

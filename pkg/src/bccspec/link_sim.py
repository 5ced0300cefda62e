"""Monte Carlo AWGN link: encode, puncture, interleave, Gray M-QAM, soft Viterbi.

Frames are simulated in fixed-size batches.  Batch ``i`` draws from its own
generator, seeded by ``(seed, i)``, and tallies are merged in batch order, so
a run is reproducible for a given seed whatever the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import beta as beta_dist

from .bounds import ModulationSpec, db_to_linear
from .code_model import MEMORY, PunctureSchedule, as_schedule, encode, puncture
from .viterbi import viterbi_decode_batch

# --------------------------------------------------------------------------
# Gray square QAM


@lru_cache(maxsize=None)
def _pam_axis(bits_per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Gray-labelled PAM levels, highest amplitude first.

    Returns ``(levels, labels)`` where ``labels[i]`` is the integer label
    (MSB first) of ``levels[i]``.  Label 0 sits on the largest positive level.
    """
    n = 1 << bits_per_axis
    idx = np.arange(n)
    levels = (n - 1 - 2 * idx).astype(float)
    labels = idx ^ (idx >> 1)
    return levels, labels


@lru_cache(maxsize=None)
def constellation(M: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``M`` unit-energy points with their integer labels.

    The first ``m/2`` bits of a symbol select the in-phase level, the rest
    the quadrature level.  BPSK uses the real axis only.
    """
    mod = ModulationSpec(M)
    if M == 2:
        return np.array([1.0 + 0j, -1.0 + 0j]), np.array([0, 1])
    k = mod.m // 2
    levels, labels = _pam_axis(k)
    scale = math.sqrt(2 * (M - 1) / 3)
    pts, labs = [], []
    for li, ai in zip(labels, levels):
        for lq, aq in zip(labels, levels):
            pts.append((ai + 1j * aq) / scale)
            labs.append((int(li) << k) | int(lq))
    return np.array(pts), np.array(labs)


def _axis_tables(M: int):
    mod = ModulationSpec(M)
    k = 1 if M == 2 else mod.m // 2
    levels, labels = _pam_axis(k)
    scale = 1.0 if M == 2 else math.sqrt(2 * (M - 1) / 3)
    # amplitude indexed by label value
    amp = np.empty(1 << k)
    amp[labels] = levels / scale
    return k, amp


def map_symbols(bits, modulation: ModulationSpec) -> np.ndarray:
    """Map coded bits (last axis) to Gray square-QAM symbols with unit mean energy."""
    b = np.asarray(bits, dtype=np.int64)
    m = modulation.m
    if b.shape[-1] % m:
        raise ValueError(f"{b.shape[-1]} bits is not a multiple of {m} bits per symbol")
    k, amp = _axis_tables(modulation.M)
    groups = b.reshape(b.shape[:-1] + (-1, m))
    weights = 1 << np.arange(k - 1, -1, -1)
    if modulation.M == 2:
        return amp[groups[..., 0]].astype(complex)
    i_lab = groups[..., :k] @ weights
    q_lab = groups[..., k:] @ weights
    return amp[i_lab] + 1j * amp[q_lab]


def noise_variance(ebno_db: float, rate, modulation: ModulationSpec) -> float:
    """Complex noise variance ``N0`` for unit symbol energy: ``Es = m * Rc * Eb``."""
    return 1.0 / (modulation.m * float(rate) * float(db_to_linear(ebno_db)))


def awgn_channel(symbols, ebno_db: float, rate, modulation: ModulationSpec,
                 rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of total variance ``N0``."""
    s = np.asarray(symbols, dtype=complex)
    n0 = noise_variance(ebno_db, rate, modulation)
    sd = math.sqrt(n0 / 2)
    return s + sd * (rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape))


def demap_llr(received, modulation: ModulationSpec, noise_var: float) -> np.ndarray:
    """Max-log per-bit LLRs, positive favouring bit 0.

    Square QAM separates into two PAM axes, so each bit only needs the
    distances along its own axis.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(received, dtype=complex)
    k, amp = _axis_tables(modulation.M)
    labels = np.arange(1 << k)
    axes = [y.real] if modulation.M == 2 else [y.real, y.imag]
    out = []
    for comp in axes:
        d2 = (comp[..., None] - amp[None, :]) ** 2  # (..., levels) indexed by label
        for bit in range(k - 1, -1, -1):
            one = (labels >> bit) & 1
            llr = (d2[..., one == 1].min(axis=-1) - d2[..., one == 0].min(axis=-1)) / noise_var
            out.append(llr)
    return np.stack(out, axis=-1).reshape(y.shape[:-1] + (-1,))


# --------------------------------------------------------------------------
# puncturing and interleaving on the receive side


def depuncture(llrs, schedule: PunctureSchedule, n_coded: int | None = None) -> np.ndarray:
    """Re-insert zero LLRs (erasures) at punctured positions.

    ``n_coded`` is the full-rate length; by default the shortest length whose
    kept count matches is used.
    """
    schedule = as_schedule(schedule)
    x = np.asarray(llrs, dtype=float)
    n_kept = x.shape[-1]
    if n_coded is None:
        full, rest = divmod(n_kept, schedule.kept)
        n_coded = full * schedule.period
        if rest:
            cum = np.cumsum(schedule.mask)
            n_coded += int(np.searchsorted(cum, rest)) + 1
    keep = schedule.keep_array(n_coded)
    if int(keep.sum()) != n_kept:
        raise ValueError(
            f"{n_kept} LLRs do not match mask {schedule} over {n_coded} coded bits "
            f"(expected {int(keep.sum())})"
        )
    out = np.zeros(x.shape[:-1] + (n_coded,))
    out[..., keep] = x
    return out


@lru_cache(maxsize=64)
def _permutation(seed: int, length: int) -> np.ndarray:
    return np.random.default_rng([seed, length]).permutation(length)


def interleave(x, seed: int, direction: str = "forward") -> np.ndarray:
    """Seeded pseudo-random permutation along the last axis.

    The permutation depends only on ``(seed, length)``;
    ``direction="inverse"`` undoes ``"forward"``.
    """
    a = np.asarray(x)
    perm = _permutation(seed, a.shape[-1])
    if direction == "forward":
        return a[..., perm]
    if direction == "inverse":
        out = np.empty_like(a)
        out[..., perm] = a
        return out
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def deinterleave(x, seed: int) -> np.ndarray:
    return interleave(x, seed, "inverse")


# --------------------------------------------------------------------------
# simulation driver


@dataclass(frozen=True)
class StopRule:
    """Stop as soon as any threshold is reached."""

    min_frame_errors: int = 100
    min_bit_errors: int = 500
    max_frames: int = 10_000_000

    def __post_init__(self):
        for name in ("min_frame_errors", "min_bit_errors", "max_frames"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def done(self, frames: int, bit_errors: int, frame_errors: int) -> bool:
        return (
            frame_errors >= self.min_frame_errors
            or bit_errors >= self.min_bit_errors
            or frames >= self.max_frames
        )


# "none": coded bits fill symbol labels in order, so consecutive bits cycle
# through every bit level of the constellation.  "random": seeded permutation.
INTERLEAVERS = ("none", "random")


@dataclass(frozen=True)
class SimConfig:
    schedule: PunctureSchedule
    modulation: ModulationSpec
    ebno_db: float
    frame_bits: int = 1024
    seed: int = 0
    stop: StopRule = field(default_factory=StopRule)
    workers: int = 1
    batch_frames: int = 32
    interleaver: str = "none"
    backend: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "schedule", as_schedule(self.schedule))
        if self.frame_bits < 1:
            raise ValueError("frame_bits must be >= 1")
        if self.workers < 1 or self.batch_frames < 1:
            raise ValueError("workers and batch_frames must be >= 1")
        if not math.isfinite(self.ebno_db):
            raise ValueError("ebno_db must be finite")
        if self.interleaver not in INTERLEAVERS:
            raise ValueError(f"interleaver must be one of {INTERLEAVERS}, got {self.interleaver!r}")

    @property
    def rate(self) -> Fraction:
        return self.schedule.rate

    @property
    def coded_bits(self) -> int:
        return 2 * (self.frame_bits + MEMORY)

    @property
    def channel_bits(self) -> int:
        return self.schedule.punctured_length(self.coded_bits)

    @property
    def pad_bits(self) -> int:
        return -self.channel_bits % self.modulation.m


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval for ``k`` successes in ``n`` trials."""
    if n == 0:
        return (0.0, 1.0)
    a = (1 - level) / 2
    lo = 0.0 if k == 0 else float(beta_dist.ppf(a, k, n - k + 1))
    hi = 1.0 if k == n else float(beta_dist.ppf(1 - a, k + 1, n - k))
    return (lo, hi)


@dataclass
class SimResult:
    ebno_db: float
    frames: int = 0
    bits: int = 0
    bit_errors: int = 0
    frame_errors: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else float("nan")

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def ber_ci(self) -> tuple[float, float]:
        return clopper_pearson(self.bit_errors, self.bits)

    @property
    def fer_ci(self) -> tuple[float, float]:
        return clopper_pearson(self.frame_errors, self.frames)

    def add(self, frames: int, bit_errors: int, frame_errors: int, frame_bits: int) -> None:
        self.frames += frames
        self.bits += frames * frame_bits
        self.bit_errors += bit_errors
        self.frame_errors += frame_errors


def simulate_batch(config: SimConfig, batch_index: int, n_frames: int) -> tuple[int, int]:
    """Run ``n_frames`` frames with the generator for ``batch_index``.

    Returns ``(bit_errors, frame_errors)``.
    """
    rng = np.random.default_rng([config.seed, batch_index])
    K = config.frame_bits
    mod = config.modulation
    info = rng.integers(0, 2, size=(n_frames, K), dtype=np.uint8)
    tx = puncture(encode(info, terminate=True), config.schedule)
    if config.interleaver == "random":
        tx = interleave(tx, config.seed)
    if config.pad_bits:
        tx = np.concatenate([tx, np.zeros((n_frames, config.pad_bits), dtype=np.uint8)], axis=1)
    rx = awgn_channel(map_symbols(tx, mod), config.ebno_db, config.rate, mod, rng)
    llr = demap_llr(rx, mod, noise_variance(config.ebno_db, config.rate, mod))
    llr = llr[:, : config.channel_bits]
    if config.interleaver == "random":
        llr = deinterleave(llr, config.seed)
    full = depuncture(llr, config.schedule, config.coded_bits)
    decoded = viterbi_decode_batch(full, terminated=True, backend=config.backend)
    errs = decoded != info
    return int(errs.sum()), int(errs.any(axis=1).sum())


def _batch_job(args):
    config, index, n = args
    return simulate_batch(config, index, n)


def run_point(config: SimConfig, executor=None) -> SimResult:
    """Simulate one Eb/N0 point until the stop rule fires."""
    result = SimResult(config.ebno_db)
    stop = config.stop
    index = 0
    own_pool = None
    if executor is None and config.workers > 1:
        own_pool = executor = ProcessPoolExecutor(max_workers=config.workers)
    try:
        while not stop.done(result.frames, result.bit_errors, result.frame_errors):
            width = config.workers if executor is not None else 1
            jobs = []
            frames_left = stop.max_frames - result.frames
            for _ in range(width):
                n = min(config.batch_frames, frames_left)
                if n <= 0:
                    break
                jobs.append((config, index, n))
                index += 1
                frames_left -= n
            if executor is None:
                outcomes = [_batch_job(j) for j in jobs]
            else:
                outcomes = list(executor.map(_batch_job, jobs))
            # merge in batch order; batches past the stopping point are discarded
            for (_, _, n), (be, fe) in zip(jobs, outcomes):
                result.add(n, be, fe, config.frame_bits)
                if stop.done(result.frames, result.bit_errors, result.frame_errors):
                    break
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    return result


def run_sweep(configs: Sequence[SimConfig]) -> list[SimResult]:
    """Run each configuration in order."""
    configs = list(configs)
    workers = max((c.workers for c in configs), default=1)
    if workers <= 1:
        return [run_point(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [run_point(c, executor=pool) for c in configs]


def sweep_configs(base: SimConfig, ebno_grid: Sequence[float]) -> list[SimConfig]:
    return [replace(base, ebno_db=float(x)) for x in ebno_grid]

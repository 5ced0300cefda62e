"""Encoder, trellis and puncture schedules for the 802.11 K=7 mother code.

State convention: bit ``i`` of the 6-bit state holds ``u[n-1-i]``, so the
most recent input sits in the LSB and a transition is
``next = ((state << 1) & 0x3F) | u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

NUM_STATES = 64
MEMORY = 6
STATE_MASK = 0x3F

G1 = 0o133
G2 = 0o171

# Serial masks, read column by column from the 2-row puncture matrices.
# Rate 5/6 is [[1,1,0,1,0],[1,0,1,0,1]] -> 11 10 01 10 01.
STANDARD_MASKS = {
    "1/2": "11",
    "2/3": "1110",
    "3/4": "111001",
    "5/6": "1110011001",
}


def _reverse_bits(x: int, width: int) -> int:
    return int(format(x, f"0{width}b")[::-1], 2)


@dataclass(frozen=True)
class GeneratorSet:
    """Generator pair in the usual octal notation.

    The octal labels are read MSB-first, i.e. the leading digit carries the
    ``D**0`` tap: 133 is ``1 + D^2 + D^3 + D^5 + D^6``.  :attr:`taps` holds
    the same polynomials as integer masks with bit ``i`` = coefficient of
    ``D**i``, which is what the encoder XORs against.
    """

    g1: int = G1
    g2: int = G2
    constraint_length: int = 7

    def __post_init__(self):
        if self.constraint_length != MEMORY + 1:
            raise ValueError(f"only constraint length {MEMORY + 1} is supported, got {self.constraint_length}")
        top = 1 << (self.constraint_length - 1)
        for g in (self.g1, self.g2):
            if not 0 < g < (top << 1):
                raise ValueError(f"generator {g:o} does not fit constraint length {self.constraint_length}")
            if not (g & 1 and g & top):
                raise ValueError(f"generator {g:o} must tap both D^0 and D^{self.constraint_length - 1}")

    @property
    def taps(self) -> tuple[int, int]:
        k = self.constraint_length
        return (_reverse_bits(self.g1, k), _reverse_bits(self.g2, k))


STANDARD_GENERATORS = GeneratorSet()


@dataclass(frozen=True)
class TrellisBranch:
    from_state: int
    input: int
    to_state: int
    outputs: tuple[int, int]


def _check_state(state: int) -> None:
    if not 0 <= state < NUM_STATES:
        raise ValueError(f"state {state} outside [0, {NUM_STATES})")


def _check_bit(u: int) -> None:
    if u not in (0, 1):
        raise ValueError(f"input bit must be 0 or 1, got {u!r}")


def next_state(state: int, u: int) -> int:
    _check_state(state)
    _check_bit(u)
    return ((state << 1) & STATE_MASK) | u


def _register(state: int, u: int) -> int:
    # r = (u, s0, ..., s5) packed with r_i at bit i
    return u | (state << 1)


def branch_outputs(state: int, u: int, gens: GeneratorSet = STANDARD_GENERATORS) -> tuple[int, int]:
    """Output pair ``(v1, v2)`` for input ``u`` leaving ``state``."""
    _check_state(state)
    _check_bit(u)
    r = _register(state, u)
    t1, t2 = gens.taps
    return (bin(r & t1).count("1") & 1, bin(r & t2).count("1") & 1)


def build_trellis(gens: GeneratorSet = STANDARD_GENERATORS) -> list[TrellisBranch]:
    """All 128 branches, ordered by ``(from_state, input)``."""
    return [
        TrellisBranch(s, u, next_state(s, u), branch_outputs(s, u, gens))
        for s in range(NUM_STATES)
        for u in (0, 1)
    ]


def trellis_arrays(gens: GeneratorSet = STANDARD_GENERATORS) -> tuple[np.ndarray, np.ndarray]:
    """Dense tables ``next[s, u]`` and ``out[s, u, k]`` as uint8 arrays."""
    nxt = np.zeros((NUM_STATES, 2), dtype=np.uint8)
    out = np.zeros((NUM_STATES, 2, 2), dtype=np.uint8)
    for b in build_trellis(gens):
        nxt[b.from_state, b.input] = b.to_state
        out[b.from_state, b.input] = b.outputs
    return nxt, out


def encode(info_bits: Iterable[int], terminate: bool = True,
           gens: GeneratorSet = STANDARD_GENERATORS) -> np.ndarray:
    """Encode from the zero state; ``terminate`` appends six zero tail bits.

    Returns the serial coded stream ``v1[0], v2[0], v1[1], v2[1], ...``.
    A 2-D array is treated as a batch of frames along the last axis.
    """
    if isinstance(info_bits, np.ndarray):
        u = info_bits.astype(np.uint8, copy=False)
    else:
        u = np.asarray(list(info_bits), dtype=np.uint8)
    if u.size and u.max() > 1:
        raise ValueError("info bits must be 0/1")
    lead = u.shape[:-1]
    if terminate:
        u = np.concatenate([u, np.zeros(lead + (MEMORY,), dtype=np.uint8)], axis=-1)
    n = u.shape[-1]
    # v_k[t] = XOR_i g_k[i] u[t - i]
    padded = np.concatenate([np.zeros(lead + (MEMORY,), dtype=np.uint8), u], axis=-1)
    out = np.empty(lead + (2 * n,), dtype=np.uint8)
    for k, g in enumerate(gens.taps):
        acc = np.zeros(lead + (n,), dtype=np.uint8)
        for i in range(MEMORY + 1):
            if g >> i & 1:
                acc ^= padded[..., MEMORY - i: MEMORY - i + n]
        out[..., k::2] = acc
    return out


@dataclass(frozen=True)
class PunctureSchedule:
    """Serial puncture mask; position ``i`` of the coded stream is sent iff ``mask[i % L]``."""

    mask: tuple[int, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        m = tuple(int(b) for b in self.mask)
        object.__setattr__(self, "mask", m)
        if any(b not in (0, 1) for b in m):
            raise ValueError("puncture mask entries must be 0 or 1")
        if len(m) < 2 or len(m) % 2:
            raise ValueError(f"puncture period must be even and >= 2, got {len(m)}")
        if not any(m):
            raise ValueError("puncture mask transmits nothing")

    @classmethod
    def from_string(cls, text: str) -> "PunctureSchedule":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"invalid mask string {text!r}; expected only '0'/'1'")
        name = next((r for r, m in STANDARD_MASKS.items() if m == text), None)
        return cls(tuple(int(c) for c in text), name=name)

    @property
    def period(self) -> int:
        return len(self.mask)

    @property
    def kept(self) -> int:
        return sum(self.mask)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.period // 2, self.kept)

    def __str__(self) -> str:
        return "".join(map(str, self.mask))

    @property
    def label(self) -> str:
        return self.name or f"mask {self}"

    def keep_array(self, n: int) -> np.ndarray:
        """Boolean keep-pattern for ``n`` serial coded bits."""
        reps = -(-n // self.period)
        return np.tile(np.asarray(self.mask, dtype=bool), reps)[:n]

    def punctured_length(self, n: int) -> int:
        full, rest = divmod(n, self.period)
        return full * self.kept + sum(self.mask[:rest])


def schedule_for_rate(name: str) -> PunctureSchedule:
    try:
        mask = STANDARD_MASKS[name]
    except KeyError:
        raise ValueError(f"unknown rate {name!r}; choose from {', '.join(STANDARD_MASKS)}") from None
    return PunctureSchedule.from_string(mask)


def as_schedule(spec: "PunctureSchedule | str | Sequence[int]") -> PunctureSchedule:
    """Accept a schedule, a rate name like ``"3/4"``, a mask string or a bit list."""
    if isinstance(spec, PunctureSchedule):
        return spec
    if isinstance(spec, str):
        if spec in STANDARD_MASKS:
            return schedule_for_rate(spec)
        return PunctureSchedule.from_string(spec)
    return PunctureSchedule(tuple(spec))


def puncture(coded_bits, schedule: PunctureSchedule) -> np.ndarray:
    """Drop the masked-out positions (along the last axis for batches)."""
    x = np.asarray(coded_bits)
    return x[..., schedule.keep_array(x.shape[-1])]

"""Soft-decision Viterbi decoding for the 64-state mother code.

The add-compare-select loop runs in a compiled extension when it is built;
otherwise a numpy implementation is used.  Set ``BCCSPEC_PURE_PYTHON=1`` to
force the fallback.  :data:`BACKEND` names the one in use.

Metric: the decoder maximises ``sum_i llr_i * (1 - 2 v_i)`` over paths that
start in state 0, which is the ML path for LLRs with positive values
favouring bit 0.  Erased positions carry LLR 0 and drop out of the sum.
"""

from __future__ import annotations

import os

import numpy as np

from . import _viterbi_fallback
from .code_model import MEMORY, STANDARD_GENERATORS, GeneratorSet, trellis_arrays

if os.environ.get("BCCSPEC_PURE_PYTHON"):
    _core = None
else:
    try:
        from . import _viterbi_core as _core
    except ImportError:  # extension not built
        _core = None

BACKEND = "cython" if _core is not None else "numpy"

_SIGN_CACHE: dict[GeneratorSet, np.ndarray] = {}


def branch_signs(gens: GeneratorSet = STANDARD_GENERATORS) -> np.ndarray:
    """``sign[s, u, k] = 1 - 2 * v_k`` as int8, shape (64, 2, 2)."""
    sign = _SIGN_CACHE.get(gens)
    if sign is None:
        _, out = trellis_arrays(gens)
        sign = np.ascontiguousarray(1 - 2 * out.astype(np.int8))
        _SIGN_CACHE[gens] = sign
    return sign


def viterbi_decode_batch(llrs, terminated: bool = True, backend: str | None = None,
                         gens: GeneratorSet = STANDARD_GENERATORS) -> np.ndarray:
    """Decode ``(frames, 2 * steps)`` full-rate LLRs into ``(frames, K)`` info bits.

    With ``terminated`` the path is forced to end in state 0 and the six tail
    decisions are stripped, so ``K = steps - 6``.
    """
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.ndim != 2 or llr.shape[1] % 2:
        raise ValueError(f"expected (frames, even length) LLR array, got shape {llr.shape}")
    steps = llr.shape[1] // 2
    if terminated and steps < MEMORY:
        raise ValueError(f"terminated frame needs at least {2 * MEMORY} LLRs, got {llr.shape[1]}")
    llr = np.ascontiguousarray(llr.reshape(llr.shape[0], steps, 2))
    kernel = _pick(backend)
    bits = kernel(llr, branch_signs(gens), bool(terminated))
    return bits[:, : steps - MEMORY] if terminated else bits


def viterbi_decode(llrs, terminated: bool = True, backend: str | None = None,
                   gens: GeneratorSet = STANDARD_GENERATORS) -> np.ndarray:
    """Single-frame wrapper around :func:`viterbi_decode_batch`."""
    llr = np.asarray(llrs, dtype=np.float64)
    if llr.ndim != 1:
        raise ValueError("viterbi_decode takes one frame; use viterbi_decode_batch for several")
    return viterbi_decode_batch(llr[None, :], terminated, backend, gens)[0]


def _pick(backend):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _core is None:
            raise RuntimeError("compiled Viterbi extension is not available")
        return _core.viterbi_batch
    if backend == "numpy":
        return _viterbi_fallback.viterbi_batch
    raise ValueError(f"unknown backend {backend!r}")

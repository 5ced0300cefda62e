"""Pure numpy decoder, vectorised across frames and states."""

import numpy as np

from .code_model import NUM_STATES

_DST = np.arange(NUM_STATES)
_P0 = _DST >> 1
_P1 = _P0 | 32
_U = _DST & 1


def viterbi_batch(llr: np.ndarray, sign: np.ndarray, terminated: bool) -> np.ndarray:
    """Same contract as the compiled kernel."""
    B, T, _ = llr.shape
    s0 = sign[_P0, _U].astype(float)  # (64, 2)
    s1 = sign[_P1, _U].astype(float)
    pm = np.full((B, NUM_STATES), -1e300)
    pm[:, 0] = 0.0
    dec = np.empty((T, B, NUM_STATES), dtype=bool)
    for t in range(T):
        l1 = llr[:, t, 0:1]
        l2 = llr[:, t, 1:2]
        # same association as the compiled kernel so both backends agree bit for bit
        c0 = pm[:, _P0] + (l1 * s0[:, 0] + l2 * s0[:, 1])
        c1 = pm[:, _P1] + (l1 * s1[:, 0] + l2 * s1[:, 1])
        d = c1 > c0
        dec[t] = d
        pm = np.where(d, c1, c0)
    s = np.zeros(B, dtype=np.int64) if terminated else pm.argmax(axis=1)
    out = np.empty((B, T), dtype=np.uint8)
    rows = np.arange(B)
    for t in range(T - 1, -1, -1):
        out[:, t] = s & 1
        s = (s >> 1) | (dec[t, rows, s].astype(np.int64) << 5)
    return out

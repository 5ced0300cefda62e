# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled add-compare-select and traceback for the 64-state decoder."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    NS = 64
    HALF = 32


def viterbi_batch(const double[:, :, ::1] llr, const signed char[:, :, ::1] sign,
                  bint terminated):
    """Decode a batch of frames.

    llr: (frames, steps, 2) soft values, positive favours bit 0.
    sign: (64, 2, 2) bipolar branch outputs, sign[s, u, k] = 1 - 2 v_k.
    Returns (frames, steps) uint8 input decisions.
    """
    cdef Py_ssize_t B = llr.shape[0], T = llr.shape[1]
    cdef Py_ssize_t b, t, j, s, best_s
    cdef double pm[NS]
    cdef double nm[NS]
    cdef double bm[4]
    # metric selector per (predecessor, input): index into bm by output signs
    cdef int sel[NS][2]
    cdef double l1, l2, m0, m1, best
    cdef int u, p
    cdef unsigned char* drow

    for p in range(NS):
        for u in range(2):
            sel[p][u] = (sign[p, u, 0] < 0) * 2 + (sign[p, u, 1] < 0)

    dec_arr = np.zeros((T, NS), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dec = dec_arr
    out_arr = np.zeros((B, T), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef double NEG = -1e300

    for b in range(B):
        pm[0] = 0.0
        for s in range(1, NS):
            pm[s] = NEG
        for t in range(T):
            l1 = llr[b, t, 0]
            l2 = llr[b, t, 1]
            # bm[2*a + c]: v1 sign negative iff a, v2 sign negative iff c
            bm[0] = l1 + l2
            bm[1] = l1 + (-l2)
            bm[2] = (-l1) + l2
            bm[3] = (-l1) + (-l2)
            drow = &dec[t, 0]
            # butterfly: predecessors j and j + 32 feed states 2j and 2j + 1
            for j in range(HALF):
                for u in range(2):
                    s = 2 * j + u
                    m0 = pm[j] + bm[sel[j][u]]
                    m1 = pm[j + HALF] + bm[sel[j + HALF][u]]
                    if m1 > m0:
                        nm[s] = m1
                        drow[s] = 1
                    else:
                        nm[s] = m0
                        drow[s] = 0
            for s in range(NS):
                pm[s] = nm[s]
        best_s = 0
        if not terminated:
            best = pm[0]
            for s in range(1, NS):
                if pm[s] > best:
                    best = pm[s]
                    best_s = s
        s = best_s
        for t in range(T - 1, -1, -1):
            out[b, t] = s & 1
            s = (s >> 1) | (dec[t, s] << 5)
    return out_arr

"""Acceptance checks, one printed PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` to see the report lines.
"""

import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from bccspec.bounds import BoundQuery, ModulationSpec, bep_union_bound, fer_union_bound, uncoded_curve
from bccspec.code_model import schedule_for_rate
from bccspec.link_sim import SimConfig, StopRule, run_point
from bccspec.spectrum import brute_force_spectrum, compute_spectrum

from conftest import RATES, spectrum_at


@pytest.fixture
def report(capsys):
    def _report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {criterion:<4} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return _report


# 1 -------------------------------------------------------------------------

def test_criterion_1_spectrum_exactness(report, reference_spectra):
    mismatches, timings = [], {}
    for rate in RATES:
        t0 = time.perf_counter()
        spec = compute_spectrum(rate, 200)
        timings[rate] = time.perf_counter() - t0
        expect = reference_spectra[rate]
        got = spec.rows(len(expect))
        mismatches += [(rate, e, g) for e, g in zip(expect, got) if e != g]
        if len(got) != len(expect):
            mismatches.append((rate, "row count", len(got)))
    big = spectrum_at("1/2", 200).alpha.get(88)
    ok = not mismatches and big == 2_066_059_586_301_199_607_386_445_446_232 and max(timings.values()) < 10
    rows = sum(len(v) for v in reference_spectra.values())
    times = ", ".join(f"{r}: {t:.2f}s" for r, t in timings.items())
    report("1", ok, f"{rows} table rows exact, alpha_88={big}, d_max=200 runtimes {times}; mismatches={mismatches[:3]}")


# 2 -------------------------------------------------------------------------

def test_criterion_2_free_distances(report):
    expect = {"1/2": 10, "2/3": 6, "3/4": 5, "5/6": 4}
    got = {r: compute_spectrum(r, 12).d_free for r in RATES}
    masks = {r: str(schedule_for_rate(r)) for r in RATES}
    report("2", got == expect, f"d_free {got} for masks {masks}")


@pytest.mark.xfail(strict=True, reason="mask string 1110011010 as printed has d_free=3; "
                   "the rate-5/6 code with d_free=4 uses 1110011001")
def test_criterion_2_literal_five_sixths_string(capsys):
    d = compute_spectrum("1110011010", 12).d_free
    with capsys.disabled():
        print(f"\nACCEPTANCE 2*   NOTE  literal mask string 1110011010 gives d_free={d} (misprint, expected xfail)")
    assert d == 4


# 3 -------------------------------------------------------------------------

def test_criterion_3_mother_code_anchor(report):
    spec = compute_spectrum("1/2", 10)
    got = (spec.d_free, spec.alpha[10], spec.beta[10])
    report("3", got == (10, 11, 36), f"(d_free, alpha, beta) = {got}")


# 4 -------------------------------------------------------------------------

def test_criterion_4_oracle_equivalence(report):
    t0 = time.perf_counter()
    results = {}
    for rate, dfree in zip(RATES, (10, 6, 5, 4)):
        brute = brute_force_spectrum(rate, dfree + 4)
        results[rate] = brute.complete and brute.same_terms(compute_spectrum(rate, dfree + 4))
    elapsed = time.perf_counter() - t0
    report("4", all(results.values()) and elapsed < 60,
           f"brute force == series at d_free+4: {results}; total {elapsed:.1f}s")


# 5 -------------------------------------------------------------------------

BOUND_POINTS = [
    ("BEP 1/2 QPSK 5 dB", "1/2", 4, "bep", 5.0, 4.427e-7),
    ("BEP 2/3 QPSK 5 dB", "2/3", 4, "bep", 5.0, 4.567e-6),
    ("BEP 3/4 QPSK 5 dB", "3/4", 4, "bep", 5.0, 4.732e-5),
    ("BEP 5/6 QPSK 5 dB", "5/6", 4, "bep", 5.0, 4.964e-4),
    ("FER 1/2 QPSK 5 dB K=1024", "1/2", 4, "fer", 5.0, 1.2340e-4),
    ("BEP 1/2 256-QAM 17 dB", "1/2", 256, "bep", 17.0, 5.0309e-5),
    ("uncoded BPSK 10 dB", None, 2, "uncoded", 10.0, 3.8721e-6),
    ("uncoded 256-QAM 18 dB", None, 256, "uncoded", 18.0, 3.4721e-3),
]


def test_criterion_5_bound_coordinates(report):
    for rate in RATES:
        spectrum_at(rate, 130)
    t0 = time.perf_counter()
    errors = {}
    for name, rate, M, kind, snr, expect in BOUND_POINTS:
        if kind == "uncoded":
            got = uncoded_curve(M, [snr]).raw[0]
        else:
            q = BoundQuery(spectrum_at(rate, 130), [snr], ModulationSpec(M), 30,
                           frame_bits=1024 if kind == "fer" else 1)
            got = (fer_union_bound(q) if kind == "fer" else bep_union_bound(q)).raw[0]
        errors[name] = abs(got / expect - 1)
    elapsed = time.perf_counter() - t0
    worst = max(errors, key=errors.get)
    report("5", max(errors.values()) <= 2e-3,
           f"8 coordinates, worst relative error {errors[worst]:.2e} ({worst}); evaluated in {elapsed * 1e3:.1f} ms")


# 6 -------------------------------------------------------------------------

def test_criterion_6_delta_table(report):
    expect = {4: (Fraction(1), 0.0), 16: (Fraction(2, 5), 4.0), 64: (Fraction(2, 14), 8.5), 256: (Fraction(8, 170), 13.3)}
    ok = True
    parts = []
    for M, (delta, db) in expect.items():
        mod = ModulationSpec(M)
        ok &= mod.delta == delta and abs(mod.penalty_db - db) <= 0.05
        parts.append(f"M={M}: {mod.delta} / {mod.penalty_db:.2f} dB")
    report("6", ok, "; ".join(parts))


# 7 -------------------------------------------------------------------------

def test_criterion_7_qam_shift(report):
    spec = spectrum_at("1/2", 130)
    x = np.linspace(3, 6, 61)
    qpsk = bep_union_bound(BoundQuery(spec, x, ModulationSpec(4), 30)).raw
    qam = bep_union_bound(BoundQuery(spec, x + 13.28, ModulationSpec(256), 30)).raw
    worst = float(np.max(np.abs(qam / qpsk - 1)))
    exact_shift = ModulationSpec(256).penalty_db
    exact = bep_union_bound(BoundQuery(spec, x + exact_shift, ModulationSpec(256), 30)).raw
    exact_worst = float(np.max(np.abs(exact / qpsk - 1)))
    report("7", worst <= 5e-3,
           f"max |BEP_256(x+13.28)/BEP_QPSK(x) - 1| = {worst:.2e} over x in [3, 6] dB; "
           f"with the exact shift {exact_shift:.4f} dB the deviation is {exact_worst:.1e}")


# 8 -------------------------------------------------------------------------

SIM_POINTS = [
    ("1/2", 4, 3.0, 3.5851e-4),
    ("3/4", 4, 4.0, 3.1007e-4),
    ("2/3", 256, 12.0, 3.1421e-3),
    ("5/6", 4, 4.0, 1.8482e-3),
]


@pytest.mark.slow
@pytest.mark.parametrize("rate,M,snr,marker", SIM_POINTS,
                         ids=[f"{r}-M{M}-{s:g}dB" for r, M, s, _ in SIM_POINTS])
def test_criterion_8_simulation_markers(report, rate, M, snr, marker):
    # bit errors arrive in bursts, so 500 of them can come from a handful of frames;
    # 100 independent frame errors keep the estimate stable, and >= 500 bit errors is asserted
    cfg = SimConfig(rate, ModulationSpec(M), snr, frame_bits=1024, seed=7,
                    stop=StopRule(min_frame_errors=100, min_bit_errors=10**9))
    t0 = time.perf_counter()
    res = run_point(cfg)
    elapsed = time.perf_counter() - t0
    ratio = res.ber / marker
    ok = res.bit_errors >= 500 and 1 / 1.5 <= ratio <= 1.5
    report("8", ok, f"rate {rate} M={M} {snr:g} dB: BER {res.ber:.4e} vs marker {marker:.4e} "
                    f"(ratio {ratio:.2f}, {res.bit_errors} bit errors, {res.frame_errors} frame errors, "
                    f"{res.frames} frames, {elapsed:.1f}s)")


# 9 -------------------------------------------------------------------------

def test_criterion_9_noiseless_roundtrip(report):
    failures = []
    t0 = time.perf_counter()
    for rate in RATES:
        for M in (2, 4, 16, 64, 256):
            cfg = SimConfig(rate, ModulationSpec(M), 100.0, frame_bits=1024, seed=M,
                            stop=StopRule(max_frames=100), batch_frames=50)
            res = run_point(cfg)
            if res.frames != 100 or res.bit_errors or res.frame_errors:
                failures.append((rate, M, res.bit_errors))
    elapsed = time.perf_counter() - t0
    report("9", not failures, f"4 rates x 5 constellations x 100 frames of 1024 bits at +100 dB, "
                              f"errors={failures}, {elapsed:.1f}s")


# 10 ------------------------------------------------------------------------

def test_criterion_10_cli_determinism(report, tmp_path):
    argv = [sys.executable, "-m", "bccspec", "simulate", "--rate", "1/2", "--mod", "qpsk",
            "--snr", "2:3:1", "--frame-bits", "1024", "--seed", "7"]
    outs = [subprocess.run(argv, check=True, capture_output=True).stdout for _ in range(2)]
    outs.append(subprocess.run(argv + ["--workers", "2"], check=True, capture_output=True).stdout)
    report("10", outs[0] == outs[1] == outs[2] and len(outs[0]) > 0,
           f"three simulate runs (workers 1, 1, 2) produced byte-identical CSV ({len(outs[0])} bytes)")

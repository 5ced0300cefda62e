import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bccspec.bounds import (
    BoundQuery,
    ModulationSpec,
    bep_union_bound,
    fer_union_bound,
    pairwise_error,
    parse_grid,
    q_function,
    single_term_approx,
    uncoded_curve,
    uncoded_qam,
)
from bccspec.spectrum import compute_spectrum

from conftest import DATA, RATES, spectrum_at

with open(DATA / "figure_curves.json") as fh:
    CURVES = json.load(fh)["curves"]


def _curve_id(c):
    return f"{c['panel']}:{c['legend']}"


def _evaluate(curve, x):
    if curve["kind"] == "uncoded":
        return uncoded_curve(curve["M"], x).raw
    query = BoundQuery(
        spectrum_at(curve["rate"], 130), x, ModulationSpec(curve["M"]), 30,
        frame_bits=1024 if curve["panel"] == "qpsk_fer" else 1,
    )
    return (fer_union_bound(query) if curve["panel"] == "qpsk_fer" else bep_union_bound(query)).raw


def _mp_q(x):
    return float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)


@pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 2.5, 5.0, 8.0, 12.0, 20.0, 37.0])
def test_q_function_against_mpmath(x):
    expect = _mp_q(x)
    assert q_function(x) == pytest.approx(expect, rel=1e-12)


@given(st.floats(0, 30))
def test_q_function_random_points(x):
    assert float(q_function(x)) == pytest.approx(_mp_q(x), rel=1e-12)


def test_q_function_symmetry():
    x = np.linspace(-4, 4, 17)
    assert np.allclose(q_function(x) + q_function(-x), 1.0)


@pytest.mark.parametrize(
    "curve",
    [c for c in CURVES if c["kind"] != "sim"],
    ids=_curve_id,
)
def test_plotted_curves(curve):
    pts = np.array(curve["points"])
    x, y = pts[:, 0], pts[:, 1]
    if curve["kind"] == "uncoded" and curve["M"] == 2:
        # the two leftmost BPSK points (negative Eb/N0) do not follow Q(sqrt(2 Eb/N0))
        keep = x >= 0
        x, y = x[keep], y[keep]
    got = _evaluate(curve, x)
    # plotted values carry four or five significant digits
    assert np.max(np.abs(got / y - 1)) < 6e-4


def test_uncoded_bpsk_negative_snr_discrepancy_is_bounded():
    (curve,) = [c for c in CURVES if c["legend"] == "Uncoded BPSK"]
    pts = np.array([p for p in curve["points"] if p[0] < 0])
    got = uncoded_curve(2, pts[:, 0]).raw
    assert np.all(np.abs(got / pts[:, 1] - 1) < 0.04)


@pytest.mark.parametrize("M,delta,penalty", [
    (4, Fraction(1), 0.0), (16, Fraction(2, 5), 4.0), (64, Fraction(1, 7), 8.5), (256, Fraction(4, 85), 13.3),
])
def test_modulation_penalty(M, delta, penalty):
    mod = ModulationSpec(M)
    assert mod.delta == delta
    assert mod.penalty_db == pytest.approx(penalty, abs=0.05)


def test_bpsk_and_qpsk_share_kernel():
    assert ModulationSpec(2).delta == ModulationSpec(4).delta == 1


def test_modulation_names():
    assert ModulationSpec.from_name("256QAM").M == 256
    with pytest.raises(ValueError):
        ModulationSpec.from_name("8psk")
    with pytest.raises(ValueError):
        ModulationSpec(8)


@pytest.mark.parametrize("M", [16, 64, 256])
def test_qam_curve_is_shifted_qpsk(M):
    spec = spectrum_at("1/2", 130)
    shift = ModulationSpec(M).penalty_db
    x = np.linspace(3, 6, 13)
    qpsk = bep_union_bound(BoundQuery(spec, x, ModulationSpec(4), 30)).raw
    qam = bep_union_bound(BoundQuery(spec, x + shift, ModulationSpec(M), 30)).raw
    assert np.allclose(qam, qpsk, rtol=1e-9)


@pytest.mark.parametrize("rate", RATES)
def test_bounds_decrease_with_snr(rate):
    x = np.arange(0, 12, 0.25)
    q = BoundQuery(spectrum_at(rate, 130), x, terms=30)
    assert np.all(np.diff(bep_union_bound(q).raw) < 0)
    assert np.all(np.diff(fer_union_bound(q).raw) < 0)


def test_more_terms_never_lower_the_bound():
    spec = spectrum_at("3/4", 130)
    x = np.array([4.0, 6.0])
    prev = np.zeros(2)
    for n in (1, 5, 10, 30):
        cur = bep_union_bound(BoundQuery(spec, x, terms=n)).raw
        assert np.all(cur >= prev)
        prev = cur


def test_single_term_matches_one_term_bound():
    spec = spectrum_at("1/2", 130)
    x = np.array([5.0, 7.0])
    one = bep_union_bound(BoundQuery(spec, x, terms=1)).raw
    assert np.allclose(single_term_approx(spec, Fraction(1, 2), 1, x), one)
    assert single_term_approx(spec, Fraction(1, 2), 1, 5.0) == pytest.approx(
        36 * float(q_function(np.sqrt(10 * 10 ** 0.5))))


def test_fer_scales_with_frame_bits():
    spec = spectrum_at("1/2", 130)
    a = fer_union_bound(BoundQuery(spec, [5.0], terms=30, frame_bits=1)).raw
    b = fer_union_bound(BoundQuery(spec, [5.0], terms=30, frame_bits=1024)).raw
    assert b == pytest.approx(1024 * a)


def test_values_clamped_but_raw_kept():
    curve = bep_union_bound(BoundQuery(spectrum_at("5/6", 130), [0.0], terms=30))
    assert curve.raw[0] > 1
    assert curve.values[0] == 1.0


def test_query_validation():
    spec = compute_spectrum("1/2", 20)
    with pytest.raises(ValueError, match="only"):
        BoundQuery(spec, [5.0], terms=30)
    with pytest.raises(ValueError):
        BoundQuery(compute_spectrum("1/2", 5), [5.0])
    with pytest.raises(ValueError):
        BoundQuery(spec, [float("nan")])
    with pytest.raises(ValueError):
        pairwise_error(0, 0.5, 1, 5.0)
    with pytest.raises(ValueError):
        uncoded_qam(8, 5.0)


def test_qpsk_uncoded_equals_bpsk():
    x = np.linspace(0, 10, 11)
    assert np.allclose(uncoded_curve(4, x).raw, uncoded_curve(2, x).raw)


@pytest.mark.parametrize("text,expect", [
    ("5:5:1", [5.0]),
    ("0:1:0.25", [0, 0.25, 0.5, 0.75, 1.0]),
    ("3", [3.0]),
    ("0:0.3:0.1", [0, 0.1, 0.2, 0.3]),
])
def test_parse_grid(text, expect):
    assert parse_grid(text).tolist() == pytest.approx(expect)


@pytest.mark.parametrize("bad", ["a:b:c", "1:2", "5:1:1", "0:1:0", "0:1:-1", "0:inf:1"])
def test_parse_grid_rejects(bad):
    with pytest.raises(ValueError):
        parse_grid(bad)

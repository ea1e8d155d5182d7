import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from softfec.channel import modulate
from softfec.chase import CandidateList, chase2_batch, chase2_list, path_metric
from softfec.ebch import CodeError, encode_batch
from softfec.softout import (
    PyndiahCoefficients, codebook, exact_app, proposed_soft_output, pyndiah_like_raw,
    pyndiah_raw, soft_output_batch,
)

GAMMA = 2.0**-17

# log-APP of the (8,4) code at this input, by 40-digit enumeration over the codebook
FIXTURE_L = [2, -1, 0.5, 3, -0.2, 1, 1, -1]
FIXTURE_APP = [
    1.6414017869079963, -0.49779496683243549, -0.10528926446279869, 2.159331769719264,
    0.38807647547740773, 0.78588932198888703, 0.2152794867578546, -0.64541544476821857,
]


def full_list(spec, l):
    return CandidateList([(c, path_metric(c, l)) for c in codebook(spec)], p=spec.n)


def brute_force_app(words, l, combine):
    """Reference per-bit log ratio, combining exp(-PM) terms with ``combine``."""
    out = []
    for i in range(len(l)):
        zero = [-path_metric(c, l) for c in words if c[i] == 0]
        one = [-path_metric(c, l) for c in words if c[i] == 1]
        out.append(combine(zero) - combine(one))
    return np.array(out)


def lse(values):
    top = max(values)
    return top + math.log(sum(math.exp(v - top) for v in values))


def test_exact_app_fixture(hamming8):
    assert exact_app(hamming8, FIXTURE_L) == pytest.approx(FIXTURE_APP, abs=1e-12)


def test_exact_app_zero_input(hamming8):
    # the codebook contains the all-ones word, so it is closed under complement
    assert np.allclose(exact_app(hamming8, np.zeros(8)), 0.0)


def test_exact_app_refuses_large_codes(ebch64):
    with pytest.raises(CodeError):
        exact_app(ebch64, np.zeros(64))


def test_proposed_empty_list_passes_input_through(rng):
    l = rng.normal(0, 3, 16)
    out = proposed_soft_output(CandidateList([], 5), l, GAMMA)
    assert np.array_equal(out.app, l)
    assert not out.extrinsic.any()
    assert not out.saturated.any()


def test_proposed_single_candidate_fixture():
    cands = CandidateList([(np.array([0, 0], np.uint8), 0.5)], 5)
    out = proposed_soft_output(cands, [1.0, 1.0], GAMMA)
    # max-star(-0.5, ln g - ln(1+e^-1)) - (ln g - ln(1+e)), 40-digit evaluation
    assert out.app == pytest.approx([12.596772952794486] * 2, abs=1e-12)
    assert out.extrinsic == pytest.approx([11.596772952794486] * 2, abs=1e-12)


def test_proposed_full_list_tiny_gamma_matches_exact(hamming8, rng):
    for _ in range(50):
        l = rng.normal(0, 2.5, 8)
        got = proposed_soft_output(full_list(hamming8, l), l, 1e-300).app
        assert got == pytest.approx(exact_app(hamming8, l), abs=1e-6)


def test_proposed_tends_to_input_for_large_gamma(hamming8, rng):
    l = rng.normal(0, 2, 8)
    cands = full_list(hamming8, l)
    gaps = [np.max(np.abs(proposed_soft_output(cands, l, g).app - l)) for g in (1e-3, 1, 1e3, 1e6)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


def test_pyndiah_single_codeword_saturates():
    c = np.array([0, 1, 1, 0], np.uint8)
    out = pyndiah_raw(CandidateList([(c, 1.0)], 5), [1.0, -2.0, 0.5, 3.0])
    assert out.saturated.all()
    assert out.app.tolist() == [1.0, -1.0, -1.0, 1.0]
    assert np.array_equal(pyndiah_like_raw(CandidateList([(c, 1.0)], 5), [1.0, -2.0, 0.5, 3.0]).saturated,
                          out.saturated)


def test_pyndiah_two_codewords():
    # correlations 10 and 6 (l chosen accordingly), differing in bit 0
    l = np.array([2.0, 4.0, 4.0])
    a = np.array([0, 0, 0], np.uint8)  # <x, l> = 10
    b = np.array([1, 0, 0], np.uint8)  # <x, l> = 6
    out = pyndiah_raw(CandidateList([(a, 0.0), (b, 0.0)], 5), l)
    assert out.app[0] == pytest.approx(2.0)
    assert not out.saturated[0] and out.saturated[1:].all()
    assert out.extrinsic[0] == pytest.approx(0.0)


def test_pyndiah_raw_is_max_of_brute_force(hamming8, rng):
    for _ in range(20):
        l = rng.normal(0, 2, 8)
        got = pyndiah_raw(full_list(hamming8, l), l).app
        assert got == pytest.approx(brute_force_app(codebook(hamming8), l, max), abs=1e-12)


def test_pyndiah_like_full_list_equals_exact(hamming8, rng):
    for _ in range(20):
        l = rng.normal(0, 2, 8)
        got = pyndiah_like_raw(full_list(hamming8, l), l).app
        assert got == pytest.approx(exact_app(hamming8, l), abs=1e-12)


def test_pyndiah_like_equals_pyndiah_for_singleton_sides():
    l = np.array([0.3, -1.2, 2.0, 0.7])
    a = np.array([0, 1, 0, 0], np.uint8)
    b = np.array([1, 1, 0, 1], np.uint8)
    cands = CandidateList([(a, path_metric(a, l)), (b, path_metric(b, l))], 5)
    x = pyndiah_raw(cands, l)
    y = pyndiah_like_raw(cands, l)
    assert np.array_equal(x.saturated, y.saturated)
    assert x.app == pytest.approx(y.app, abs=1e-12)


def test_pyndiah_rejects_empty_list():
    with pytest.raises(ValueError):
        pyndiah_raw(CandidateList([], 5), [1.0])
    with pytest.raises(ValueError):
        pyndiah_like_raw(CandidateList([], 5), [1.0])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 8, elements=st.floats(-8, 8)), st.floats(-50, 50))
def test_pyndiah_invariant_to_correlation_shift(l, shift):
    from softfec.ebch import make_code
    from softfec.softout import _saturating_core

    words = codebook(make_code(3, 1))[:5][None]
    keep = np.ones((1, 5), bool)
    corr = modulate(words[0]) @ l
    base = _saturating_core(words, keep, corr[None], l[None], np.max, 0.5)
    moved = _saturating_core(words, keep, corr[None] + shift, l[None], np.max, 0.5)
    assert np.array_equal(base.saturated, moved.saturated)
    assert np.allclose(base.app, moved.app, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 8, elements=st.floats(-30, 30)), st.floats(-200, 200))
def test_proposed_matches_direct_formula(l, log_gamma):
    from softfec.ebch import make_code

    spec = make_code(3, 1)
    words = codebook(spec)[::3]
    gamma = math.exp(log_gamma)
    cands = CandidateList([(c, path_metric(c, l)) for c in words], 3)
    out = proposed_soft_output(cands, l, gamma)
    for i in range(8):
        num = [-path_metric(c, l) for c in words if c[i] == 0]
        den = [-path_metric(c, l) for c in words if c[i] == 1]
        num.append(log_gamma - np.logaddexp(0, -l[i]))
        den.append(log_gamma - np.logaddexp(0, l[i]))
        assert out.app[i] == pytest.approx(lse(num) - lse(den), abs=1e-9)
    assert np.allclose(out.extrinsic, out.app - l, atol=1e-9)


@pytest.mark.parametrize("rule", ["proposed", "pyndiah", "pyndiah_like"])
def test_batch_rules_match_single_word(rule, ebch64, rng):
    cw = encode_batch(ebch64, rng.integers(0, 2, (30, ebch64.k), dtype=np.uint8))
    l = 2.0 * modulate(cw) + rng.normal(0, 1.4, cw.shape)
    batch = chase2_batch(ebch64, l, 5)
    out = soft_output_batch(batch, rule, GAMMA)
    single = {"proposed": lambda c, x: proposed_soft_output(c, x, GAMMA),
              "pyndiah": pyndiah_raw, "pyndiah_like": pyndiah_like_raw}[rule]
    for b in range(len(batch)):
        cands = chase2_list(ebch64, l[b], 5)
        if len(cands) == 0:
            continue
        ref = single(cands, l[b])
        assert np.array_equal(out.saturated[b], ref.saturated)
        assert out.app[b] == pytest.approx(ref.app, abs=1e-9)
        assert out.extrinsic[b] == pytest.approx(ref.extrinsic, abs=1e-9)


def test_batch_handles_underflowing_side():
    # one side's only candidate is ~1e9 nats below the best; fallback must be exact
    bits = np.array([[[0, 0], [1, 0]]], np.uint8)
    keep = np.ones((1, 2), bool)
    metric = np.array([[0.0, 1e9]])
    l = np.array([[1e9, 3.0]])
    from softfec.softout import proposed_core, pyndiah_like_core

    out = pyndiah_like_core(bits, keep, metric, l)
    assert out.app[0, 0] == pytest.approx(1e9)
    assert np.isfinite(proposed_core(bits, keep, metric, l, GAMMA).extrinsic).all()


def test_deterministic(ebch256, rng):
    l = rng.normal(1, 2, (8, ebch256.n))
    a = soft_output_batch(chase2_batch(ebch256, l), "proposed")
    b = soft_output_batch(chase2_batch(ebch256, l.copy()), "proposed")
    assert np.array_equal(a.app, b.app)


def test_coefficients():
    c = PyndiahCoefficients.classic()
    assert len(c) == 8
    assert c.at(0) == (0.2, 0.2)
    assert c.at(7) == (1.0, 1.0)
    with pytest.raises(ValueError):
        PyndiahCoefficients([0.1, 0.0], [1, 1])
    assert PyndiahCoefficients.constant(0.4, 3.6, 3).at(2) == (0.4, 3.6)

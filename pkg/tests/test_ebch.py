import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from softfec.ebch import (
    CodeError, decode_bounded, encode, encode_batch, gf2_poly_mod, is_codeword,
    locate_errors_batch, make_code, syndromes,
)
from softfec.softout import codebook


@pytest.mark.parametrize("m,t,n,k", [(3, 1, 8, 4), (6, 1, 64, 57), (8, 2, 256, 239)])
def test_code_parameters(m, t, n, k):
    spec = make_code(m, t)
    assert (spec.n, spec.k) == (n, k)
    assert spec.generator_poly.bit_length() - 1 == n - 1 - k
    assert gf2_poly_mod((1 << (n - 1)) | 1, spec.generator_poly) == 0


def test_unsupported_codes():
    with pytest.raises(CodeError):
        make_code(8, 3)
    with pytest.raises(CodeError):
        make_code(9, 1)


def test_encode_by_hand(hamming8):
    # x^3 * x^3 mod (x^3 + x + 1) = x^2 + 1 -> parity 101, weight 3 -> extension 1
    assert encode(hamming8, [1, 0, 0, 0]).tolist() == [1, 0, 0, 0, 1, 0, 1, 1]
    assert not encode(hamming8, [0, 0, 0, 0]).any()


def test_hamming8_codebook(hamming8):
    words = codebook(hamming8)
    assert len({w.tobytes() for w in words}) == 16
    weights = words.sum(axis=1)
    assert np.all(weights % 2 == 0)
    assert weights[weights > 0].min() == 4


@pytest.mark.parametrize("m,t", [(3, 1), (6, 1), (8, 2)])
def test_batch_encode_matches_division(m, t, rng):
    spec = make_code(m, t)
    msgs = rng.integers(0, 2, (20, spec.k), dtype=np.uint8)
    batch = encode_batch(spec, msgs)
    for msg, word in zip(msgs, batch):
        assert np.array_equal(encode(spec, msg), word)
        assert is_codeword(spec, word)


def test_linearity(ebch256, rng):
    a, b = rng.integers(0, 2, (2, ebch256.k), dtype=np.uint8)
    assert np.array_equal(encode(ebch256, a) ^ encode(ebch256, b), encode(ebch256, a ^ b))


def test_single_errors_exhaustive(hamming8):
    for c in codebook(hamming8):
        assert np.array_equal(decode_bounded(hamming8, c), c)
        for j in range(hamming8.n):
            r = c.copy()
            r[j] ^= 1
            assert np.array_equal(decode_bounded(hamming8, r), c)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_double_errors_corrected(data):
    spec = make_code(8, 2)
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    c = encode_batch(spec, rng.integers(0, 2, spec.k, dtype=np.uint8))
    flips = data.draw(st.lists(st.integers(0, spec.n - 2), max_size=2, unique=True))
    r = c.copy()
    r[flips] ^= 1
    assert np.array_equal(decode_bounded(spec, r), c)


def test_three_errors_fail_or_land_near(ebch256, rng):
    for _ in range(200):
        c = encode_batch(ebch256, rng.integers(0, 2, ebch256.k, dtype=np.uint8))
        r = c.copy()
        r[rng.choice(ebch256.n - 1, 3, replace=False)] ^= 1
        out = decode_bounded(ebch256, r)
        if out is not None:
            assert is_codeword(ebch256, out)
            assert not np.array_equal(out, c)
            assert np.count_nonzero(out[:-1] != r[:-1]) <= 2


def test_decoder_output_always_codeword(ebch64, rng):
    for _ in range(200):
        r = rng.integers(0, 2, ebch64.n, dtype=np.uint8)
        out = decode_bounded(ebch64, r)
        assert out is not None and is_codeword(ebch64, out)


def test_batched_peterson_matches_chien(ebch256, rng):
    words = rng.integers(0, 2, (3000, ebch256.n), dtype=np.uint8)
    # bias half the words toward the code so that all branches occur
    near = encode_batch(ebch256, rng.integers(0, 2, (1500, ebch256.k), dtype=np.uint8))
    for row, w in enumerate(rng.integers(0, 3, 1500)):
        near[row, rng.choice(ebch256.n - 1, w, replace=False)] ^= 1
    words[:1500] = near
    s1, s3 = syndromes(ebch256, words)
    ok, pos = locate_errors_batch(ebch256, s1, s3)
    for w, good, loc in zip(words, ok, pos):
        ref = decode_bounded(ebch256, w)
        assert good == (ref is not None)
        if good:
            fixed = w.copy()
            fixed[loc[loc >= 0]] ^= 1
            fixed[-1] = fixed[:-1].sum() & 1
            assert np.array_equal(fixed, ref)


def test_zero_syndrome_for_codewords(ebch256, rng):
    words = encode_batch(ebch256, rng.integers(0, 2, (50, ebch256.k), dtype=np.uint8))
    s1, s3 = syndromes(ebch256, words)
    assert not s1.any() and not s3.any()


def test_hamming8_miscorrects_double_errors(hamming8):
    # recomputing parity never rejects, so weight-2 inner errors become other codewords
    c = codebook(hamming8)[5]
    for i, j in itertools.combinations(range(7), 2):
        r = c.copy()
        r[[i, j]] ^= 1
        out = decode_bounded(hamming8, r)
        assert out is not None and is_codeword(hamming8, out)

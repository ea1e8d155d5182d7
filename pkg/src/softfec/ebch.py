"""Extended BCH constituent codes: construction, systematic encoding and
bounded-distance hard decoding for t = 1 and t = 2.

Bit layout of a length-n word: positions 0..n-2 hold the inner cyclic BCH
word, position j carrying the coefficient of x^(n-2-j) (so the k message bits
come first and the polynomial-remainder parity follows); position n-1 is the
overall even-parity bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .gf import FieldTable, default_field


class CodeError(ValueError):
    pass


# -- GF(2)[x] helpers on int bitmasks (bit i = coefficient of x^i) ----------

def gf2_poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def minimal_poly(gf: FieldTable, i: int) -> int:
    """Minimal polynomial of alpha^i over GF(2) as a bitmask."""
    coset = []
    e = i % gf.order
    while e not in coset:
        coset.append(e)
        e = (2 * e) % gf.order
    # multiply out prod (x + alpha^e) with GF(2^m) coefficients, low degree first
    poly = [1]
    for e in coset:
        root = gf.alpha_pow(e)
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] ^= c
            nxt[d] ^= gf.mul(c, root)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise AssertionError("minimal polynomial has non-binary coefficients")
    return sum(c << d for d, c in enumerate(poly))


@dataclass(frozen=True, eq=False)
class CodeSpec:
    n: int
    k: int
    t: int
    generator_poly: int
    field: FieldTable = dc_field(repr=False)
    # systematic generator matrix, k x n, uint8
    G: np.ndarray = dc_field(repr=False)
    # per-position syndrome contributions alpha^e and alpha^(3e); 0 at the parity bit
    s1_col: np.ndarray = dc_field(repr=False)
    s3_col: np.ndarray = dc_field(repr=False)
    # n x (2m) bit matrix mapping a word to its packed (S1, S3) bits
    H_bits: np.ndarray = dc_field(repr=False)
    # quad_root[c] = z with z^2 + z = c, or -1 when unsolvable
    quad_root: np.ndarray = dc_field(repr=False)

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n


def make_code(m: int, t: int) -> CodeSpec:
    """Extended BCH code of length 2^m with designed radius t in {1, 2}."""
    if t not in (1, 2):
        raise CodeError(f"only t=1 and t=2 are supported, got t={t}")
    try:
        gf = default_field(m)
    except (KeyError, ValueError) as exc:
        raise CodeError(f"unsupported extension degree m={m}") from exc

    gen = minimal_poly(gf, 1)
    if t == 2:
        m3 = minimal_poly(gf, 3)
        if m3 != gen:
            gen = gf2_poly_mul(gen, m3)
    n_inner = gf.order
    r = gen.bit_length() - 1
    k = n_inner - r
    if k < 1:
        raise CodeError(f"(m={m}, t={t}) leaves no information bits")
    n = n_inner + 1

    # x^(n-1) + 1 must be a multiple of the generator
    if gf2_poly_mod((1 << n_inner) | 1, gen) != 0:
        raise AssertionError("generator does not divide x^(n-1) + 1")

    G = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        msg = np.zeros(k, dtype=np.uint8)
        msg[i] = 1
        G[i] = _encode_poly(gen, n, k, msg)
    G.setflags(write=False)

    exps = (n_inner - 1 - np.arange(n_inner)) % gf.order
    s1 = np.zeros(n, dtype=np.int64)
    s3 = np.zeros(n, dtype=np.int64)
    s1[:n_inner] = gf.antilog[exps]
    s3[:n_inner] = gf.antilog[(3 * exps) % gf.order]
    bits = np.arange(m)
    H_bits = np.concatenate(
        [(s1[:, None] >> bits) & 1, (s3[:, None] >> bits) & 1], axis=1
    ).astype(np.float32)

    quad = np.full(gf.size, -1, dtype=np.int64)
    for z in range(gf.size):
        c = gf.mul(z, z) ^ z
        if quad[c] == -1:
            quad[c] = z

    for a in (s1, s3, H_bits, quad):
        a.setflags(write=False)
    return CodeSpec(n, k, t, gen, gf, G, s1, s3, H_bits, quad)


def _encode_poly(gen: int, n: int, k: int, message) -> np.ndarray:
    r = n - 1 - k
    mpoly = 0
    for b in message:
        mpoly = (mpoly << 1) | int(b)
    rem = gf2_poly_mod(mpoly << r, gen)
    word = np.zeros(n, dtype=np.uint8)
    word[:k] = np.asarray(message, dtype=np.uint8)
    for j in range(r):
        word[k + j] = (rem >> (r - 1 - j)) & 1
    word[n - 1] = word[: n - 1].sum() & 1
    return word


def encode(spec: CodeSpec, message) -> np.ndarray:
    """Systematic encoding of one k-bit message by polynomial division."""
    message = np.asarray(message)
    if message.shape != (spec.k,):
        raise CodeError(f"message must have {spec.k} bits, got shape {message.shape}")
    return _encode_poly(spec.generator_poly, spec.n, spec.k, message)


def encode_batch(spec: CodeSpec, messages: np.ndarray) -> np.ndarray:
    """Encode messages along the last axis with the generator matrix."""
    messages = np.asarray(messages, dtype=np.uint8)
    if messages.shape[-1] != spec.k:
        raise CodeError(f"last axis must have {spec.k} bits")
    out = messages.astype(np.float32) @ spec.G.astype(np.float32)
    return (out.astype(np.int64) & 1).astype(np.uint8)


def syndromes(spec: CodeSpec, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inner syndromes (S1, S3) as field elements for words on the last axis."""
    bits = np.asarray(words, dtype=np.float32) @ spec.H_bits
    bits = bits.astype(np.int64) & 1
    weights = 1 << np.arange(spec.m)
    return bits[..., : spec.m] @ weights, bits[..., spec.m :] @ weights


def is_codeword(spec: CodeSpec, word) -> bool:
    word = np.asarray(word)
    if word.shape != (spec.n,):
        return False
    s1, s3 = syndromes(spec, word)
    if s1 != 0 or (spec.t == 2 and s3 != 0):
        return False
    return int(word.sum()) % 2 == 0


def _scalar_syndromes(spec: CodeSpec, word: np.ndarray) -> tuple[int, int]:
    s1 = s3 = 0
    for j in np.flatnonzero(word[: spec.n - 1]):
        s1 ^= int(spec.s1_col[j])
        s3 ^= int(spec.s3_col[j])
    return s1, s3


def _error_locations(spec: CodeSpec, s1: int, s3: int) -> list[int] | None:
    """Peterson solution with Chien search; inner positions or None on failure."""
    gf = spec.field
    n_inner = spec.n - 1
    if spec.t == 1:
        if s1 == 0:
            return []
        return [n_inner - 1 - int(gf.log[s1])]
    if s1 == 0:
        return [] if s3 == 0 else None
    s1_cubed = gf.pow(s1, 3)
    if s3 == s1_cubed:
        return [n_inner - 1 - int(gf.log[s1])]
    sigma2 = gf.div(s3 ^ s1_cubed, s1)
    # locator 1 + s1 z + sigma2 z^2, roots at z = X^-1 for locators X
    roots = []
    for j in range(n_inner):
        z = gf.alpha_pow(-(n_inner - 1 - j))
        if 1 ^ gf.mul(s1, z) ^ gf.mul(sigma2, gf.mul(z, z)) == 0:
            roots.append(j)
    return roots if len(roots) == 2 else None


def decode_bounded(spec: CodeSpec, word) -> np.ndarray | None:
    """Bounded-distance decoding of one word.

    The inner BCH word is corrected by syndrome decoding and the overall
    parity bit is recomputed from the result; it is never used to reject.
    Returns None when the error locator has no valid roots.
    """
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (spec.n,):
        raise CodeError(f"word must have {spec.n} bits, got shape {word.shape}")
    s1, s3 = _scalar_syndromes(spec, word)
    locs = _error_locations(spec, s1, s3)
    if locs is None:
        return None
    out = word.copy()
    for j in locs:
        out[j] ^= 1
    out[spec.n - 1] = out[: spec.n - 1].sum() & 1
    return out


def locate_errors_batch(
    spec: CodeSpec, s1: np.ndarray, s3: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Peterson decoding of syndrome arrays.

    Returns ``(ok, pos)`` where ``pos`` has a trailing axis of length 2 holding
    inner error positions, -1 where unused. The t=2 quadratic is solved by
    substitution X = S1*z into z^2 + z = sigma2 / S1^2 and a root table.
    """
    gf = spec.field
    N = gf.order
    n_inner = spec.n - 1
    lg, al = gf.log, gf.antilog
    s1 = np.asarray(s1, dtype=np.int64)
    s3 = np.asarray(s3, dtype=np.int64)
    pos = np.full(s1.shape + (2,), -1, dtype=np.int64)
    nz1 = s1 != 0
    log1 = np.where(nz1, lg[s1], 0)

    if spec.t == 1:
        pos[..., 0] = np.where(nz1, n_inner - 1 - log1, -1)
        return np.ones(s1.shape, dtype=bool), pos

    ok = ~(~nz1 & (s3 != 0))
    s1_cubed = np.where(nz1, al[(3 * log1) % N], 0)
    single = nz1 & (s3 == s1_cubed)
    double = nz1 & ~single
    pos[..., 0] = np.where(single, n_inner - 1 - log1, -1)

    d = s3 ^ s1_cubed
    log_d = np.where(double, lg[d], 0)
    # c = sigma2 / S1^2 = (S3 + S1^3) / S1^3
    c = np.where(double, al[(log_d - 3 * log1) % N], 0)
    z = spec.quad_root[c]
    solvable = double & (z > 0)
    ok &= ~double | solvable
    # z and z+1 are both roots; neither is 0 or 1 because c != 0
    z1 = np.where(solvable, z, 2)
    z2 = z1 ^ 1
    x1 = al[(lg[z1] + log1) % N]
    x2 = al[(lg[z2] + log1) % N]
    pos[..., 0] = np.where(solvable, n_inner - 1 - lg[x1], pos[..., 0])
    pos[..., 1] = np.where(solvable, n_inner - 1 - lg[x2], -1)
    return ok, pos

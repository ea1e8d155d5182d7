"""Chase-II list generation with path metrics.

``chase2_list`` is the straightforward per-word implementation built on
``decode_bounded``; ``chase2_batch`` does the same for a stack of words at once
by updating syndromes incrementally per flip pattern. Both hard-decide
l >= 0 as bit 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ebch import CodeSpec, decode_bounded, locate_errors_batch, syndromes

DEFAULT_P = 5


def softplus(x):
    """ln(1 + e^x), overflow-safe."""
    return np.logaddexp(0.0, x)


def path_metric(word, l) -> float:
    """Sum of ln(1 + exp(-x_i l_i)) with x_i = (-1)^c_i; smaller is more likely."""
    word = np.asarray(word)
    l = np.asarray(l, dtype=np.float64)
    if word.shape != l.shape:
        raise ValueError("word and LLR vector lengths differ")
    return float(np.sum(np.where(word != 0, softplus(l), softplus(-l))))


def hard_decision(l) -> np.ndarray:
    return (np.asarray(l) < 0).astype(np.uint8)


def least_reliable_positions(l, p: int) -> np.ndarray:
    """Indices of the p smallest |l_i|, ties broken by lowest index."""
    l = np.asarray(l)
    if not 0 <= p <= l.shape[-1]:
        raise ValueError(f"p={p} out of range for length {l.shape[-1]}")
    return np.argsort(np.abs(l), axis=-1, kind="stable")[..., :p]


def flip_patterns(p: int) -> np.ndarray:
    """All 2^p test patterns; row q flips position b when bit b of q is set."""
    q = np.arange(1 << p)
    return ((q[:, None] >> np.arange(p)) & 1).astype(np.uint8)


@dataclass
class CandidateList:
    """Distinct valid codewords paired with their path metrics."""

    candidates: list[tuple[np.ndarray, float]]
    p: int

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def words(self) -> np.ndarray:
        if not self.candidates:
            return np.zeros((0, 0), dtype=np.uint8)
        return np.stack([c for c, _ in self.candidates])

    @property
    def metrics(self) -> np.ndarray:
        return np.array([pm for _, pm in self.candidates], dtype=np.float64)

    def best(self) -> np.ndarray | None:
        if not self.candidates:
            return None
        return min(self.candidates, key=lambda c: c[1])[0]


def chase2_list(spec: CodeSpec, l, p: int = DEFAULT_P) -> CandidateList:
    l = np.asarray(l, dtype=np.float64)
    hard = hard_decision(l)
    lrp = least_reliable_positions(l, p)
    seen = {}
    for pattern in flip_patterns(p):
        test = hard.copy()
        test[lrp[pattern == 1]] ^= 1
        cw = decode_bounded(spec, test)
        if cw is None:
            continue
        key = cw.tobytes()
        if key not in seen:
            seen[key] = (cw, path_metric(cw, l))
    # canonical order: by metric, then by bit pattern
    cands = sorted(seen.values(), key=lambda c: (c[1], c[0].tobytes()))
    return CandidateList(cands, p)


@dataclass
class CandidateBatch:
    """Chase-II lists for a stack of B words, padded to 2^p slots each.

    ``bits`` is (B, P, n); ``keep`` marks slots holding a valid codeword that
    is not a duplicate of an earlier slot; ``metric`` is the path metric
    (meaningful only where ``keep``).
    """

    bits: np.ndarray
    keep: np.ndarray
    metric: np.ndarray
    p: int
    llr: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.bits.shape[0]

    def sizes(self) -> np.ndarray:
        return self.keep.sum(axis=1)

    def to_list(self, b: int) -> CandidateList:
        idx = np.flatnonzero(self.keep[b])
        cands = [(self.bits[b, q].copy(), float(self.metric[b, q])) for q in idx]
        cands.sort(key=lambda c: (c[1], c[0].tobytes()))
        return CandidateList(cands, self.p)

    def ml_decision(self) -> tuple[np.ndarray, np.ndarray]:
        """Minimum-metric candidate per word, falling back to input signs.

        Returns ``(bits, has_list)``.
        """
        masked = np.where(self.keep, self.metric, np.inf)
        best = np.argmin(masked, axis=1)
        has = self.keep.any(axis=1)
        rows = np.arange(len(self))
        out = np.where(has[:, None], self.bits[rows, best], hard_decision(self.llr))
        return out.astype(np.uint8), has


def _dedup(bits: np.ndarray, valid: np.ndarray) -> np.ndarray:
    B, P, n = bits.shape
    packed = np.packbits(bits, axis=2)
    pad = (-packed.shape[2]) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros((B, P, pad), np.uint8)], axis=2)
    keys = packed.view(np.uint64)
    eq = np.all(keys[:, :, None, :] == keys[:, None, :, :], axis=-1)
    earlier = np.tril(np.ones((P, P), dtype=bool), k=-1)
    dup = np.any(eq & earlier & valid[:, None, :], axis=2)
    return valid & ~dup


def chase2_batch(spec: CodeSpec, llr: np.ndarray, p: int = DEFAULT_P) -> CandidateBatch:
    """Chase-II decoding of every row of a (B, n) LLR array."""
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    B, n = llr.shape
    if n != spec.n:
        raise ValueError(f"expected words of length {spec.n}, got {n}")
    hard = hard_decision(llr)
    lrp = least_reliable_positions(llr, p)
    pats = flip_patterns(p)
    P = pats.shape[0]

    s1, s3 = syndromes(spec, hard)
    s1 = np.repeat(s1[:, None], P, axis=1)
    s3 = np.repeat(s3[:, None], P, axis=1)
    bits = np.repeat(hard[:, None, :], P, axis=1)
    rows = np.arange(B)[:, None]
    for b in range(p):
        sel = pats[:, b] == 1
        pos = lrp[:, b]
        s1[:, sel] ^= spec.s1_col[pos][:, None]
        s3[:, sel] ^= spec.s3_col[pos][:, None]
        bits[rows, np.flatnonzero(sel)[None, :], pos[:, None]] ^= 1

    ok, err = locate_errors_batch(spec, s1, s3)
    bi, qi = np.nonzero(ok)
    for e in range(2):
        pe = err[bi, qi, e]
        hit = pe >= 0
        bits[bi[hit], qi[hit], pe[hit]] ^= 1
    bits[:, :, n - 1] = bits[:, :, : n - 1].sum(axis=2, dtype=np.int64) & 1

    keep = _dedup(bits, ok)
    sp_one = softplus(llr)
    sp_zero = softplus(-llr)
    metric = np.sum(np.where(bits != 0, sp_one[:, None, :], sp_zero[:, None, :]), axis=2)
    return CandidateBatch(bits, keep, metric, p, llr)

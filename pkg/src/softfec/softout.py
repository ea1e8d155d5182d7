"""Soft-output rules for one constituent word (or a stack of them).

Three rules share the same candidate-list input:

* ``proposed``: both per-bit sums run over the whole list plus a gamma
  weighted bitwise posterior, so neither side is ever empty and no fallback
  coefficient is needed.
* ``pyndiah``: max-approximation over correlations, positions where the list
  agrees are flagged as saturated.
* ``pyndiah_like``: as ``pyndiah`` but with full log-sum-exp over the list.

``exact_app`` enumerates the codebook and is only meant as a test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .chase import CandidateBatch, CandidateList, hard_decision, path_metric, softplus
from .ebch import CodeError, CodeSpec, encode_batch

GAMMA_DEFAULT = 2.0**-17
MAX_ORACLE_K = 20

max_star = np.logaddexp


@dataclass
class SoftOutput:
    app: np.ndarray
    extrinsic: np.ndarray
    saturated: np.ndarray


@dataclass
class PyndiahCoefficients:
    """Per-half-iteration weights; entry ell scales the extrinsic produced in
    half-iteration ell."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if self.alpha.shape != self.beta.shape or self.alpha.ndim != 1:
            raise ValueError("alpha and beta must be 1-D arrays of equal length")
        if np.any(self.alpha <= 0) or np.any(self.beta <= 0):
            raise ValueError("Pyndiah coefficients must be positive")

    def __len__(self) -> int:
        return len(self.alpha)

    @classmethod
    def classic(cls) -> "PyndiahCoefficients":
        # Pyndiah (1998) schedule, shifted so alpha[ell] weights the output of
        # half-iteration ell rather than the input of ell + 1
        return cls(
            alpha=[0.2, 0.3, 0.5, 0.7, 0.9, 1.0, 1.0, 1.0],
            beta=[0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0],
        )

    @classmethod
    def constant(cls, alpha: float, beta: float, length: int = 1) -> "PyndiahCoefficients":
        return cls(alpha=[alpha] * length, beta=[beta] * length)

    def at(self, ell: int) -> tuple[float, float]:
        """Coefficients for half-iteration ``ell``; the last entry repeats."""
        i = min(ell, len(self) - 1)
        return float(self.alpha[i]), float(self.beta[i])


# -- list-level primitives on (B, P, n) candidate stacks ----------------------

def _side_reduce(values, bits, keep, bit, reducer):
    """Reduce ``values`` (B, P) over candidates with c_i == bit, per position.

    Returns (B, n) with -inf where the subset is empty.
    """
    B, P, n = bits.shape
    if P == 0:
        return np.full((B, n), -np.inf)
    mask = (bits == bit) & keep[:, :, None]
    stacked = np.where(mask, values[:, :, None], -np.inf)
    return reducer(stacked, axis=1)


def _lse(x, axis):
    return np.logaddexp.reduce(x, axis=axis)


_UNDERFLOW = 1e-250


def _side_lse(values, bits, keep):
    """Log-sum-exp of ``values`` (B, P) over each side c_i = 0 / c_i = 1.

    Sums are shifted by the per-word maximum and formed with a batched
    matmul; positions where a nonempty side underflows are redone exactly
    with max-star accumulation.
    """
    B, P, n = bits.shape
    if P == 0:
        empty = np.full((B, n), -np.inf)
        return empty, empty.copy()
    top = np.max(np.where(keep, values, -np.inf), axis=1)
    top = np.where(np.isfinite(top), top, 0.0)
    e = np.exp(np.where(keep, values - top[:, None], -np.inf))
    ones = bits.astype(np.float64)
    zeros = 1.0 - ones
    kf = keep[:, None, :].astype(np.float64)
    sums = ((e[:, None, :] @ zeros)[:, 0, :], (e[:, None, :] @ ones)[:, 0, :])
    counts = ((kf @ zeros)[:, 0, :], (kf @ ones)[:, 0, :])
    out = []
    for bit, s, cnt in ((0, sums[0], counts[0]), (1, sums[1], counts[1])):
        with np.errstate(divide="ignore"):
            lse = np.where(cnt > 0, top[:, None] + np.log(s), -np.inf)
        bad = (cnt > 0) & (s < _UNDERFLOW)
        if bad.any():
            bi, ni = np.nonzero(bad)
            sel = (bits[bi, :, ni] == bit) & keep[bi]
            lse[bi, ni] = _lse(np.where(sel, values[bi], -np.inf), axis=1)
        out.append(lse)
    return out[0], out[1]


def proposed_core(bits, keep, metric, llr, gamma: float) -> SoftOutput:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    log_gamma = np.log(gamma)
    lse0, lse1 = _side_lse(-metric, bits, keep)
    # list mass on each side measured relative to that side's gamma term,
    # ln(gamma * P(c_i = b | l_i)) = ln(gamma) - softplus(-+l_i)
    t0 = lse0 - log_gamma + softplus(-llr)
    t1 = lse1 - log_gamma + softplus(llr)
    # max-star(side, gamma term) = gamma term + softplus(t); the two gamma
    # terms differ by exactly l_i, so the extrinsic is the softplus difference
    extrinsic = softplus(t0) - softplus(t1)
    app = llr + extrinsic
    return SoftOutput(app, extrinsic, np.zeros(llr.shape, dtype=bool))


def _saturating_core(bits, keep, values, llr, reducer, scale) -> SoftOutput:
    if reducer is _lse:
        top0, top1 = _side_lse(values, bits, keep)
    else:
        top0 = _side_reduce(values, bits, keep, 0, reducer)
        top1 = _side_reduce(values, bits, keep, 1, reducer)
    has0 = np.isfinite(top0)
    has1 = np.isfinite(top1)
    saturated = ~(has0 & has1)
    # agreed bit for saturated positions; empty lists fall back to input signs
    agreed = np.where(has0, 1.0, np.where(has1, -1.0, 1.0 - 2.0 * hard_decision(llr)))
    with np.errstate(invalid="ignore"):
        app = np.where(saturated, agreed, scale * (top0 - top1))
    extrinsic = np.where(saturated, agreed, app - llr)
    return SoftOutput(app, extrinsic, saturated)


def pyndiah_core(bits, keep, llr) -> SoftOutput:
    x = 1.0 - 2.0 * bits
    corr = np.einsum("bpn,bn->bp", x, llr)
    return _saturating_core(bits, keep, corr, llr, np.max, 0.5)


def pyndiah_like_core(bits, keep, metric, llr) -> SoftOutput:
    return _saturating_core(bits, keep, -metric, llr, _lse, 1.0)


def soft_output_batch(batch: CandidateBatch, rule: str, gamma: float = GAMMA_DEFAULT) -> SoftOutput:
    if rule == "proposed":
        return proposed_core(batch.bits, batch.keep, batch.metric, batch.llr, gamma)
    if rule == "pyndiah":
        return pyndiah_core(batch.bits, batch.keep, batch.llr)
    if rule == "pyndiah_like":
        return pyndiah_like_core(batch.bits, batch.keep, batch.metric, batch.llr)
    raise ValueError(f"unknown soft-output rule {rule!r}")


# -- single-word API ----------------------------------------------------------

def _as_stack(cands: CandidateList, l):
    l = np.asarray(l, dtype=np.float64)
    n = l.shape[0]
    if len(cands):
        bits = cands.words.astype(np.uint8)[None]
        metric = cands.metrics[None]
    else:
        bits = np.zeros((1, 0, n), dtype=np.uint8)
        metric = np.zeros((1, 0))
    keep = np.ones(metric.shape, dtype=bool)
    return bits, keep, metric, l[None]


def _squeeze(out: SoftOutput) -> SoftOutput:
    return SoftOutput(out.app[0], out.extrinsic[0], out.saturated[0])


def proposed_soft_output(cands: CandidateList, l, gamma: float = GAMMA_DEFAULT) -> SoftOutput:
    """Soft output with a gamma-weighted bitwise posterior added to each side.

    An empty list returns the input unchanged (zero extrinsic).
    """
    return _squeeze(proposed_core(*_as_stack(cands, l), gamma))


def pyndiah_raw(cands: CandidateList, l) -> SoftOutput:
    """Half the difference of the best correlations with c_i = 0 and c_i = 1.

    Saturated positions hold the agreed symbol (+1 or -1) in both ``app`` and
    ``extrinsic``.
    """
    if len(cands) == 0:
        raise ValueError("Pyndiah soft output needs a nonempty candidate list")
    bits, keep, _, llr = _as_stack(cands, l)
    return _squeeze(pyndiah_core(bits, keep, llr))


def pyndiah_like_raw(cands: CandidateList, l) -> SoftOutput:
    if len(cands) == 0:
        raise ValueError("Pyndiah soft output needs a nonempty candidate list")
    bits, keep, metric, llr = _as_stack(cands, l)
    return _squeeze(pyndiah_like_core(bits, keep, metric, llr))


@lru_cache(maxsize=8)
def codebook(spec: CodeSpec) -> np.ndarray:
    if spec.k > MAX_ORACLE_K:
        raise CodeError(f"codebook of 2^{spec.k} words is too large to enumerate")
    idx = np.arange(1 << spec.k)
    msgs = ((idx[:, None] >> np.arange(spec.k)[::-1]) & 1).astype(np.uint8)
    return encode_batch(spec, msgs)


def exact_app(spec: CodeSpec, l) -> np.ndarray:
    """Log-APP ratios by enumerating every codeword (uniform prior)."""
    l = np.asarray(l, dtype=np.float64)
    words = codebook(spec)
    weights = -np.array([path_metric(c, l) for c in words])
    num = logsumexp(np.where(words == 0, weights[:, None], -np.inf), axis=0)
    den = logsumexp(np.where(words == 1, weights[:, None], -np.inf), axis=0)
    return num - den

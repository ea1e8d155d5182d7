"""Product codes: encoding and iterative row/column soft decoding.

Arrays may carry a leading frame axis, (F, n, n); every frame is an
independent product codeword, but all rows (or columns) of all frames are
handed to the constituent decoder as one batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chase import DEFAULT_P, CandidateBatch, chase2_batch
from .ebch import CodeSpec, encode_batch
from .softout import GAMMA_DEFAULT, PyndiahCoefficients, soft_output_batch

ROWS, COLS = "rows", "cols"
RULES = ("proposed", "pyndiah", "pyndiah_like")


@dataclass
class LlrPlane:
    """Channel LLRs of one or more product words plus the extrinsic stored
    by the last row and the last column half-iteration."""

    channel: np.ndarray
    extrinsic_rows: np.ndarray = field(default=None)
    extrinsic_cols: np.ndarray = field(default=None)

    def __post_init__(self):
        self.channel = np.asarray(self.channel, dtype=np.float64)
        if self.channel.ndim not in (2, 3) or self.channel.shape[-1] != self.channel.shape[-2]:
            raise ValueError(f"expected (n, n) or (F, n, n) LLRs, got {self.channel.shape}")
        if self.extrinsic_rows is None:
            self.extrinsic_rows = np.zeros_like(self.channel)
        if self.extrinsic_cols is None:
            self.extrinsic_cols = np.zeros_like(self.channel)

    @property
    def n(self) -> int:
        return self.channel.shape[-1]

    def stored(self, orientation: str) -> np.ndarray:
        return self.extrinsic_rows if orientation == ROWS else self.extrinsic_cols


def _frames(a: np.ndarray) -> np.ndarray:
    return a if a.ndim == 3 else a[None]


def _to_words(a: np.ndarray, orientation: str) -> np.ndarray:
    a = _frames(a)
    if orientation == COLS:
        a = a.transpose(0, 2, 1)
    return a.reshape(-1, a.shape[-1])


def _from_words(w: np.ndarray, orientation: str, like: np.ndarray) -> np.ndarray:
    F = 1 if like.ndim == 2 else like.shape[0]
    n = like.shape[-1]
    a = w.reshape(F, n, n)
    if orientation == COLS:
        a = a.transpose(0, 2, 1)
    return a.reshape(like.shape)


def _other(orientation: str) -> str:
    if orientation not in (ROWS, COLS):
        raise ValueError(f"orientation must be {ROWS!r} or {COLS!r}")
    return COLS if orientation == ROWS else ROWS


def encode_product(spec: CodeSpec, info: np.ndarray) -> np.ndarray:
    """Encode k x k information bits (optionally stacked) into n x n words."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-2:] != (spec.k, spec.k):
        raise ValueError(f"information block must be {spec.k} x {spec.k}")
    rows = encode_batch(spec, info)
    return np.swapaxes(encode_batch(spec, np.swapaxes(rows, -1, -2)), -1, -2)


def product_rate(spec: CodeSpec) -> float:
    return spec.k**2 / spec.n**2


def info_errors(spec: CodeSpec, decided: np.ndarray, info: np.ndarray) -> int:
    """Bit errors in the k x k information region; parity rows and columns
    are ignored."""
    k = spec.k
    return int(np.count_nonzero(decided[..., :k, :k] != info))


def half_iteration_proposed(
    plane: LlrPlane, orientation: str, spec: CodeSpec, p: int = DEFAULT_P,
    gamma: float = GAMMA_DEFAULT,
) -> CandidateBatch:
    """Decode every word of one orientation with the proposed rule.

    Input is channel plus the extrinsic of the other orientation; the output
    extrinsic overwrites this orientation's store. Returns the lists.
    """
    other = _other(orientation)
    llr = plane.channel + plane.stored(other)
    batch = chase2_batch(spec, _to_words(llr, orientation), p)
    out = soft_output_batch(batch, "proposed", gamma)
    plane.stored(orientation)[...] = _from_words(out.extrinsic, orientation, plane.channel)
    return batch


def pyndiah_input(plane: LlrPlane, orientation: str, variant: str) -> np.ndarray:
    """Decoder input for a Chase-Pyndiah half-iteration: extrinsic of the other
    orientation plus channel LLRs, the latter scaled to unit mean magnitude
    per product word in the classic variant."""
    other = _other(orientation)
    if variant == "classic":
        ch = _frames(plane.channel)
        scale = np.mean(np.abs(ch), axis=(1, 2), keepdims=True)
        scale = np.where(scale > 0, scale, 1.0)
        base = (ch / scale).reshape(plane.channel.shape)
    else:
        base = plane.channel
    return base + plane.stored(other)


def half_iteration_pyndiah(
    plane: LlrPlane, orientation: str, spec: CodeSpec, p: int,
    coeffs: PyndiahCoefficients, ell: int, variant: str = "classic",
) -> CandidateBatch:
    """Chase-Pyndiah half-iteration.

    ``classic``: max-approximation, extrinsic normalized by the mean
    |app - l| over non-saturated positions of each product word, channel
    LLRs normalized by their mean magnitude. ``like``: log-sum-exp over the
    list and no normalization at all.
    """
    if variant not in ("classic", "like"):
        raise ValueError(f"unknown Pyndiah variant {variant!r}")
    if ell >= len(coeffs):
        raise ValueError(f"half-iteration {ell} beyond coefficient schedule of {len(coeffs)}")
    alpha, beta = coeffs.at(ell)
    llr = pyndiah_input(plane, orientation, variant)
    batch = chase2_batch(spec, _to_words(llr, orientation), p)
    out = soft_output_batch(batch, "pyndiah" if variant == "classic" else "pyndiah_like")
    sat = _frames(_from_words(out.saturated, orientation, plane.channel))
    delta = _frames(_from_words(out.extrinsic, orientation, plane.channel))

    if variant == "classic":
        # delta holds app - l where unsaturated and the agreed symbol otherwise
        live = ~sat
        count = live.sum(axis=(1, 2), keepdims=True)
        total = np.where(live, np.abs(delta), 0.0).sum(axis=(1, 2), keepdims=True)
        norm = np.where(count > 0, total / np.maximum(count, 1), 1.0)
        norm = np.where(norm > 0, norm, 1.0)
        ext = np.where(sat, alpha * beta * delta / norm, alpha * delta / norm)
    else:
        ext = np.where(sat, alpha * beta * delta, alpha * delta)
    plane.stored(orientation)[...] = ext.reshape(plane.channel.shape)
    return batch


def decode_product_trace(
    plane: LlrPlane, spec: CodeSpec, p: int = DEFAULT_P, rule: str = "proposed",
    iterations: int = 4, gamma: float = GAMMA_DEFAULT,
    coeffs: PyndiahCoefficients | None = None,
) -> list[np.ndarray]:
    """Like ``decode_product`` but returns the decision after every full
    iteration (taken from that iteration's column lists)."""
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    if rule == "pyndiah" and coeffs is None:
        coeffs = PyndiahCoefficients.classic()
    if rule == "pyndiah_like" and coeffs is None:
        raise ValueError("pyndiah_like needs explicit coefficients")

    decisions = []
    for ell in range(2 * iterations):
        orientation = ROWS if ell % 2 == 0 else COLS
        if rule == "proposed":
            batch = half_iteration_proposed(plane, orientation, spec, p, gamma)
        else:
            variant = "classic" if rule == "pyndiah" else "like"
            batch = half_iteration_pyndiah(plane, orientation, spec, p, coeffs, ell, variant)
        if orientation == COLS:
            bits, _ = batch.ml_decision()
            decisions.append(_from_words(bits, COLS, plane.channel).astype(np.uint8))
    return decisions


def decode_product(
    plane: LlrPlane, spec: CodeSpec, p: int = DEFAULT_P, rule: str = "proposed",
    iterations: int = 4, gamma: float = GAMMA_DEFAULT,
    coeffs: PyndiahCoefficients | None = None,
) -> np.ndarray:
    """Iterative decoding, rows first, for ``iterations`` full iterations.

    The decision for each word of the last (column) half-iteration is its
    minimum-metric candidate, or the sign of its input if the list is empty.
    """
    return decode_product_trace(plane, spec, p, rule, iterations, gamma, coeffs)[-1]

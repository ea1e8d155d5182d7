"""Staircase codes: encoding and sliding-window soft decoding.

Blocks are h x h with h = n/2. The constituent code protects every row of
[B_{i-1}^T, B_i]; the pair (B_{i-1}, B_i) is called an interface. Each bit
lies in two interfaces: as part of a row of B_i (the "new" half) and as part
of a column of B_i inside the next interface (the "old" half). A block
stores the extrinsic produced by each of the two.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, modulate, transmit
from .chase import DEFAULT_P, CandidateBatch, chase2_batch
from .ebch import CodeSpec, encode_batch
from .softout import GAMMA_DEFAULT, soft_output_batch

KNOWN_LLR = 1e9
RULES = ("proposed", "pyndiah_like")


@dataclass
class StairBlock:
    """One staircase block: bits on the encoder side, LLRs on the decoder side."""

    index: int
    bits: np.ndarray
    ext_new: np.ndarray = field(default=None, repr=False)
    ext_old: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.ext_new is None:
            self.ext_new = np.zeros(self.bits.shape)
        if self.ext_old is None:
            self.ext_old = np.zeros(self.bits.shape)


def half_width(spec: CodeSpec) -> int:
    return spec.n // 2


def info_width(spec: CodeSpec) -> int:
    """Information columns per block row, k - n/2."""
    return spec.k - spec.n // 2


def staircase_rate(spec: CodeSpec) -> float:
    return 2 * spec.k / spec.n - 1


def _check(spec: CodeSpec) -> None:
    if info_width(spec) <= 0:
        raise ValueError(f"({spec.n},{spec.k}) code is too weak for a staircase: k <= n/2")


def encode_block(spec: CodeSpec, previous: np.ndarray, info: np.ndarray) -> np.ndarray:
    """Next block given the previous one and h x (k - h) information bits."""
    _check(spec)
    h = half_width(spec)
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (h, info_width(spec)):
        raise ValueError(f"block information must be {h} x {info_width(spec)}")
    rows = encode_batch(spec, np.concatenate([previous.T, info], axis=1))
    return rows[:, h:]


def encode_staircase(spec: CodeSpec, info_stream) -> list[StairBlock]:
    """Encode a chain; returns [B_0, B_1, ...] with B_0 all zero."""
    _check(spec)
    h = half_width(spec)
    blocks = [StairBlock(0, np.zeros((h, h), dtype=np.uint8))]
    for i, info in enumerate(info_stream, start=1):
        blocks.append(StairBlock(i, encode_block(spec, blocks[-1].bits, info)))
    return blocks


def interface_words(older: np.ndarray, newer: np.ndarray) -> np.ndarray:
    """Rows of [older^T, newer]."""
    return np.concatenate([older.T, newer], axis=1)


def interface_schedule(w: int) -> list[tuple[int, int]]:
    """Window-relative interfaces in decoding order, newest first."""
    return [(j, j + 1) for j in range(w - 2, -1, -1)]


class DecodeWindow:
    """The w most recent decoder-side blocks, oldest first."""

    def __init__(self, blocks, w: int):
        if w < 2:
            raise ValueError("window must span at least two blocks")
        self.w = w
        self.blocks: deque[StairBlock] = deque(blocks, maxlen=w)
        if len(self.blocks) != len(blocks):
            raise ValueError(f"got {len(blocks)} blocks for a window of {w}")

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def full(self) -> bool:
        return len(self.blocks) == self.w

    @property
    def indices(self) -> list[int]:
        return [b.index for b in self.blocks]


def _interface_extrinsic(batch, rule, gamma, alpha, beta):
    if rule == "proposed":
        return soft_output_batch(batch, "proposed", gamma).extrinsic
    out = soft_output_batch(batch, "pyndiah_like")
    return np.where(out.saturated, alpha * beta * out.extrinsic, alpha * out.extrinsic)


def decode_window(
    window: DecodeWindow, spec: CodeSpec, p: int = DEFAULT_P, rule: str = "proposed",
    gamma: float = GAMMA_DEFAULT, alpha: float = 0.4, beta: float = 3.6,
) -> np.ndarray:
    """Decode all w-1 interfaces of a full window, newest first, and return
    the decision for the oldest block.

    The ``pyndiah_like`` rule uses constant coefficients and no
    normalization: extrinsic = alpha (app - l), or alpha beta x on positions
    where the list agrees.
    """
    if not window.full:
        raise ValueError("window is not full")
    if rule not in RULES:
        raise ValueError(f"unknown staircase rule {rule!r}")
    h = half_width(spec)
    blocks = window.blocks
    batch: CandidateBatch | None = None
    for older_i, newer_i in interface_schedule(window.w):
        older, newer = blocks[older_i], blocks[newer_i]
        llr = interface_words(older.bits + older.ext_new, newer.bits + newer.ext_old)
        batch = chase2_batch(spec, llr, p)
        ext = _interface_extrinsic(batch, rule, gamma, alpha, beta)
        older.ext_old = ext[:, :h].T.copy()
        newer.ext_new = ext[:, h:].copy()
    decided, _ = batch.ml_decision()
    return decided[:, :h].T.copy()


def slide(window: DecodeWindow, next_block: StairBlock) -> DecodeWindow:
    """Drop the oldest block and append ``next_block`` with zero extrinsic."""
    if window.blocks and next_block.index != window.blocks[-1].index + 1:
        raise ValueError("blocks must enter the window in order")
    next_block.ext_new = np.zeros(next_block.bits.shape)
    next_block.ext_old = np.zeros(next_block.bits.shape)
    window.blocks.append(next_block)
    return window


def known_block(spec: CodeSpec) -> StairBlock:
    """Decoder view of B_0: all-zero bits with effectively infinite LLRs."""
    h = half_width(spec)
    return StairBlock(0, np.full((h, h), KNOWN_LLR))


def block_errors(spec: CodeSpec, decided: np.ndarray, info: np.ndarray) -> int:
    """Bit errors on the information columns of one block; parity is ignored."""
    kk = info_width(spec)
    return int(np.count_nonzero(decided[:, :kk] != info))


def run_chain(
    spec: CodeSpec, params: ChannelParams, rng: np.random.Generator, *, w: int = 8,
    warmup: int = 20, counted: int = 200, p: int = DEFAULT_P, rule: str = "proposed",
    gamma: float = GAMMA_DEFAULT, alpha: float = 0.4, beta: float = 3.6,
) -> tuple[int, int]:
    """Simulate one chain; returns (bit errors, information bits counted).

    Blocks 1..warmup are decoded but not counted; the next ``counted``
    blocks are. Only information columns are compared.
    """
    _check(spec)
    h = half_width(spec)
    kk = info_width(spec)
    last = warmup + counted
    sent: dict[int, np.ndarray] = {}
    prev = np.zeros((h, h), dtype=np.uint8)

    def emit(i: int) -> StairBlock:
        nonlocal prev
        info = rng.integers(0, 2, size=(h, kk), dtype=np.uint8)
        prev = encode_block(spec, prev, info)
        if i > warmup:
            sent[i] = info
        return StairBlock(i, transmit(modulate(prev), params, rng))

    window = DecodeWindow([known_block(spec)] + [emit(i) for i in range(1, w)], w)
    errors = bits = 0
    nxt = w
    while True:
        decided = decode_window(window, spec, p, rule, gamma, alpha, beta)
        idx = window.blocks[0].index
        if idx > warmup:
            errors += block_errors(spec, decided, sent.pop(idx))
            bits += h * kk
        if idx >= last:
            break
        slide(window, emit(nxt))
        nxt += 1
    return errors, bits

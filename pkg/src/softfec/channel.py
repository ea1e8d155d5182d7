"""BPSK over AWGN: modulation, noise, channel LLRs and SNR bookkeeping.

Noise comes from numpy's PCG64 generator through ``Generator.normal``
(ziggurat sampler). Per-trial generators are derived from a master seed and
a tuple key with ``SeedSequence`` so that results do not depend on which
worker ran the trial.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"code rate must lie in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        """Noise variance from Eb/N0 = 1 / (2 R sigma^2)."""
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))


def modulate(bits) -> np.ndarray:
    """0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def transmit(symbols, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Add N(0, sigma^2) noise and return channel LLRs 2 y / sigma^2."""
    symbols = np.asarray(symbols, dtype=np.float64)
    sigma2 = params.sigma2
    y = symbols + rng.normal(0.0, np.sqrt(sigma2), size=symbols.shape)
    return (2.0 / sigma2) * y


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (master_seed, key...)."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))

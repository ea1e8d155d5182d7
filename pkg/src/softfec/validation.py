"""Fast oracle and invariant checks, runnable from the CLI (``validate``).

Each check returns a CheckResult; none of them needs more than a few
seconds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, modulate, substream, transmit
from .chase import CandidateList, path_metric
from .ebch import decode_bounded, encode_batch, is_codeword, make_code
from .product import encode_product
from .softout import codebook, exact_app, proposed_soft_output
from .staircase import encode_staircase, info_width, interface_words


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_oracle_equivalence(trials: int = 1000, seed: int = 1) -> CheckResult:
    spec = make_code(3, 1)
    words = codebook(spec)
    rng = np.random.default_rng(seed)
    sigma2 = 1.0
    worst = 0.0
    for _ in range(trials):
        x = modulate(words[rng.integers(len(words))])
        l = 2.0 / sigma2 * (x + rng.normal(0.0, np.sqrt(sigma2), spec.n))
        full = CandidateList([(c, path_metric(c, l)) for c in words], p=spec.n)
        got = proposed_soft_output(full, l, gamma=1e-300).app
        worst = max(worst, float(np.max(np.abs(got - exact_app(spec, l)))))
    return CheckResult("oracle equivalence (8,4)", worst <= 1e-6, f"max |diff| = {worst:.3e}")


def check_empty_list_identity(trials: int = 1000, seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        n = int(rng.integers(1, 300))
        l = rng.normal(0.0, 10.0 ** rng.uniform(-3, 3), n)
        gamma = 10.0 ** rng.uniform(-300, 300)
        out = proposed_soft_output(CandidateList([], p=5), l, gamma)
        bad += int(np.any(out.extrinsic != 0.0))
    return CheckResult("empty-list identity", bad == 0, f"{bad} of {trials} nonzero")


def check_metric_duality(trials: int = 10_000, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    mismatched = 0
    for _ in range(trials):
        n = int(rng.integers(2, 65))
        size = int(rng.integers(1, 33))
        words = rng.integers(0, 2, size=(size, n), dtype=np.uint8)
        l = rng.normal(0.0, 4.0, n)
        x = modulate(words)
        corr = x @ l
        pm = np.array([path_metric(c, l) for c in words])
        mismatched += int(np.argmax(corr) != np.argmin(pm))
        rhs = corr / 2 - np.sum(np.log(2 * np.cosh(l / 2)))
        worst = max(worst, float(np.max(np.abs(-pm - rhs))))
    ok = mismatched == 0 and worst <= 1e-9
    return CheckResult("ML/path-metric duality", ok,
                       f"{mismatched} argmax mismatches, max identity error {worst:.2e}")


def check_algebraic_decoder(trials: int = 10_000, seed: int = 4) -> CheckResult:
    failures = 0
    small = make_code(3, 1)
    for c in codebook(small):
        for j in range(small.n - 1):
            r = c.copy()
            r[j] ^= 1
            out = decode_bounded(small, r)
            failures += int(out is None or np.any(out != c))
    big = make_code(8, 2)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = encode_batch(big, rng.integers(0, 2, big.k, dtype=np.uint8))
        r = c.copy()
        weight = int(rng.integers(0, 3))
        r[rng.choice(big.n - 1, size=weight, replace=False)] ^= 1
        out = decode_bounded(big, r)
        failures += int(out is None or np.any(out != c))
    return CheckResult("algebraic decoder exhaustiveness", failures == 0,
                       f"{failures} failures ((8,4) exhaustive + {trials} (256,239) patterns)")


def check_constructions(seed: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    spec = make_code(6, 1)
    for _ in range(100):
        word = encode_product(spec, rng.integers(0, 2, (spec.k, spec.k), dtype=np.uint8))
        bad += sum(not is_codeword(spec, r) for r in word)
        bad += sum(not is_codeword(spec, c) for c in word.T)
    stair = make_code(8, 2)
    h = stair.n // 2
    info = rng.integers(0, 2, (10, h, info_width(stair)), dtype=np.uint8)
    blocks = encode_staircase(stair, info)
    for prev, cur in zip(blocks, blocks[1:]):
        bad += sum(not is_codeword(stair, r) for r in interface_words(prev.bits, cur.bits))
    return CheckResult("construction validity", bad == 0,
                       f"{bad} invalid rows/columns (100 (64,57)^2 words, 10 staircase blocks)")


def check_channel_statistics(samples: int = 10**6, seed: int = 6) -> CheckResult:
    params = ChannelParams(ebn0_db=3.5, rate=0.872)
    s2 = params.sigma2
    l = transmit(np.ones(samples), params, substream(seed, 0))
    mean_err = abs(l.mean() / (2 / s2) - 1)
    var_err = abs(l.var() / (4 / s2) - 1)
    ok = mean_err < 0.01 and var_err < 0.01
    return CheckResult("channel statistics", ok,
                       f"mean off by {mean_err:.2%}, variance off by {var_err:.2%}")


QUICK_CHECKS = (
    check_oracle_equivalence,
    check_empty_list_identity,
    check_metric_duality,
    check_algebraic_decoder,
    check_constructions,
    check_channel_statistics,
)


def run_quick_checks() -> list[CheckResult]:
    return [check() for check in QUICK_CHECKS]

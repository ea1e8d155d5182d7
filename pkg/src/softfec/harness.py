"""Monte-Carlo BER experiments.

A point is simulated as a sequence of numbered trials (a few product frames,
or one staircase chain). Trial i draws all its randomness from
``substream(master_seed, point_key, i)``. Trials may run on several
processes, but the stopping rule is applied to the results in trial order,
so the outcome does not depend on the number of workers.
"""
from __future__ import annotations

import json
import logging
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml
from scipy.stats import chi2

from . import __version__
from .channel import ChannelParams, modulate, substream, transmit
from .ebch import CodeSpec, make_code
from .product import LlrPlane, decode_product, encode_product, info_errors, product_rate
from .softout import GAMMA_DEFAULT, PyndiahCoefficients
from .staircase import run_chain, staircase_rate

log = logging.getLogger(__name__)

SCHEMES = ("product", "staircase")
RULES = ("proposed", "pyndiah", "pyndiah_like")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scheme: str = "product"
    m: int = 8
    t: int = 2
    rule: str = "proposed"
    gamma: float = GAMMA_DEFAULT
    # scalars for pyndiah_like, per-half-iteration lists (or None) for pyndiah
    alpha: float | list[float] | None = None
    beta: float | list[float] | None = None
    p: int = 5
    iterations: int = 4
    window: int = 8
    warmup: int = 20
    counted_blocks: int = 200
    ebn0: list[float] = field(default_factory=list)
    min_errors: int = 100
    max_bits: int = 10**9
    frames_per_trial: int | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.rule not in RULES:
            raise ConfigError(f"rule must be one of {RULES}, got {self.rule!r}")
        if self.scheme == "staircase" and self.rule == "pyndiah":
            raise ConfigError("staircase codes support the proposed and pyndiah_like rules")
        if self.rule == "proposed" and not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if self.scheme == "staircase" and self.window < 2:
            raise ConfigError("window must be at least 2")
        if not self.ebn0:
            raise ConfigError("Eb/N0 sweep list is empty")
        if self.iterations < 1 or self.p < 0 or self.min_errors < 1 or self.max_bits < 1:
            raise ConfigError("iterations, min_errors and max_bits must be positive, p >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.code()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.scheme == "staircase" and 2 * self.code().k <= self.code().n:
            raise ConfigError("constituent code too weak for a staircase")
        if self.rule != "proposed":
            try:
                self.coefficients()
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "constituent" in data:
            data["m"], data["t"] = data.pop("constituent")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "ebn0" in data:
            ebn0 = data["ebn0"]
            data["ebn0"] = [float(x) for x in (ebn0 if isinstance(ebn0, list) else [ebn0])]
        if "gamma" in data:
            data["gamma"] = float(eval_number(data["gamma"]))
        for key in ("max_bits", "min_errors"):
            if key in data:
                data[key] = int(float(data[key]))
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold key: value pairs")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(data)

    def code(self) -> CodeSpec:
        return make_code(self.m, self.t)

    @property
    def rate(self) -> float:
        spec = self.code()
        return product_rate(spec) if self.scheme == "product" else staircase_rate(spec)

    def coefficients(self) -> PyndiahCoefficients:
        if self.rule == "pyndiah":
            if self.alpha is None and self.beta is None:
                return PyndiahCoefficients.classic()
            if isinstance(self.alpha, list) and isinstance(self.beta, list):
                return PyndiahCoefficients(self.alpha, self.beta)
            raise ValueError("pyndiah needs alpha and beta schedules (lists) or neither")
        alpha = 0.4 if self.alpha is None else self.alpha
        beta = 3.6 if self.beta is None else self.beta
        if isinstance(alpha, list) or isinstance(beta, list):
            raise ValueError("pyndiah_like takes scalar alpha and beta")
        return PyndiahCoefficients.constant(float(alpha), float(beta), 2 * self.iterations)

    def trial_frames(self) -> int:
        if self.frames_per_trial:
            return self.frames_per_trial
        return max(1, 1024 // self.code().n)


def eval_number(value) -> float:
    """Accept plain numbers or strings such as '2**-17'."""
    if isinstance(value, (int, float)):
        return value
    text = str(value).strip()
    if "**" in text:
        base, exp = text.split("**", 1)
        return float(base) ** float(exp)
    if "^" in text:
        base, exp = text.split("^", 1)
        return float(base) ** float(exp)
    return float(text)


@dataclass
class BerRecord:
    ebn0_db: float
    bits_counted: int
    bit_errors: int
    ber: float
    wall_time: float
    seed: int
    trials: int = 0
    censored: bool = False

    @property
    def ber_upper(self) -> float:
        """One-sided 95% Poisson upper bound on the BER."""
        return chi2.ppf(0.95, 2 * (self.bit_errors + 1)) / 2 / self.bits_counted


def point_key(ebn0_db: float) -> int:
    return int(round(ebn0_db * 1000)) & 0xFFFFFFFF


def run_trial(config: ExperimentConfig, ebn0_db: float, index: int) -> tuple[int, int]:
    """One independent trial; returns (bit errors, information bits)."""
    spec = config.code()
    rng = substream(config.seed, point_key(ebn0_db), index)
    params = ChannelParams(ebn0_db, config.rate)
    if config.scheme == "staircase":
        coeffs = config.coefficients() if config.rule != "proposed" else None
        alpha, beta = coeffs.at(0) if coeffs else (0.4, 3.6)
        return run_chain(
            spec, params, rng, w=config.window, warmup=config.warmup,
            counted=config.counted_blocks, p=config.p, rule=config.rule,
            gamma=config.gamma, alpha=alpha, beta=beta,
        )
    F = config.trial_frames()
    info = rng.integers(0, 2, size=(F, spec.k, spec.k), dtype=np.uint8)
    llr = transmit(modulate(encode_product(spec, info)), params, rng)
    decided = decode_product(
        LlrPlane(llr), spec, config.p, config.rule, config.iterations, config.gamma,
        config.coefficients() if config.rule != "proposed" else None,
    )
    return info_errors(spec, decided, info), info.size


def _trial_results(config, ebn0_db, pool):
    """Yield trial results in index order."""
    index = 0
    if pool is None:
        while True:
            yield run_trial(config, ebn0_db, index)
            index += 1
    wave = 2 * config.workers
    while True:
        futures = [pool.submit(run_trial, config, ebn0_db, i) for i in range(index, index + wave)]
        for fut in futures:
            yield fut.result()
        index += wave


def run_point(config: ExperimentConfig, ebn0_db: float, pool=None) -> BerRecord:
    """Simulate until ``min_errors`` bit errors or ``max_bits`` bits.

    A point stopped by the bit cap is marked censored.
    """
    start = time.perf_counter()
    errors = bits = trials = 0
    own_pool = pool is None and config.workers > 1
    if own_pool:
        pool = ProcessPoolExecutor(config.workers)
    try:
        gen = _trial_results(config, ebn0_db, pool)
        for e, b in gen:
            errors += e
            bits += b
            trials += 1
            if errors >= config.min_errors or bits >= config.max_bits:
                break
        gen.close()
    finally:
        if own_pool:
            pool.shutdown(cancel_futures=True)
    record = BerRecord(
        ebn0_db=float(ebn0_db), bits_counted=bits, bit_errors=errors, ber=errors / bits,
        wall_time=time.perf_counter() - start, seed=config.seed, trials=trials,
        censored=errors < config.min_errors,
    )
    log.info("Eb/N0 %.3f dB: %d errors / %d bits, BER %.3e%s", ebn0_db, errors, bits,
             record.ber, " (censored)" if record.censored else "")
    return record


def version_string() -> str:
    try:
        rev = subprocess.run(
            ["git", "describe", "--always", "--dirty"], capture_output=True, text=True,
            cwd=Path(__file__).parent, timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"{__version__}+{rev}" if rev else __version__


def format_table(records: Sequence[BerRecord]) -> str:
    """``Eb_N0 BER`` table sorted by Eb/N0.

    Censored points carry the 95% upper bound in the BER column and are listed
    in a trailing comment line.
    """
    recs = sorted(records, key=lambda r: r.ebn0_db)
    lines = ["Eb_N0 BER"]
    for r in recs:
        value = r.ber_upper if r.censored else r.ber
        lines.append(f"{r.ebn0_db:.4f} {value:.6e}")
    censored = [f"{r.ebn0_db:.4f}" for r in recs if r.censored]
    if censored:
        lines.append("# censored (BER column is a 95% upper bound): " + " ".join(censored))
    return "\n".join(lines) + "\n"


def run_sweep(config: ExperimentConfig, out_dir=None, name: str = "ber") -> list[BerRecord]:
    """Run every sweep point and, if ``out_dir`` is given, write
    ``<name>.txt`` and the ``<name>.json`` metadata sidecar."""
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        records = [run_point(config, e, pool) for e in sorted(config.ebn0)]
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.txt").write_text(format_table(records))
        meta = {
            "version": version_string(),
            "config": asdict(config),
            "rate": config.rate,
            "points": [asdict(r) | {"ber_upper": r.ber_upper} for r in records],
        }
        (out / f"{name}.json").write_text(json.dumps(meta, indent=2) + "\n")
    return records


def read_table(path) -> np.ndarray:
    """Load an ``Eb_N0 BER`` table as an (N, 2) array."""
    data = np.loadtxt(path, skiprows=1, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns Eb_N0 BER")
    return data


def _crossing(curve, target_ber: float) -> float:
    curve = np.asarray(curve, dtype=np.float64)
    curve = curve[np.argsort(curve[:, 0])]
    curve = curve[curve[:, 1] > 0]
    if len(curve) < 2:
        raise ValueError("curve needs at least two nonzero BER points")
    snr, logb = curve[:, 0], np.log10(curve[:, 1])
    target = math.log10(target_ber)
    for i in range(len(curve) - 1):
        lo, hi = logb[i], logb[i + 1]
        if min(lo, hi) <= target <= max(lo, hi):
            if hi == lo:
                return float(snr[i])
            frac = (target - lo) / (hi - lo)
            return float(snr[i] + frac * (snr[i + 1] - snr[i]))
    raise ValueError(f"target BER {target_ber:g} is outside the curve's range")


def measure_gain(curve_a, curve_b, target_ber: float) -> float:
    """Eb/N0 needed by curve_b minus that needed by curve_a at ``target_ber``.

    Curves are (Eb/N0 dB, BER) pairs; each is interpolated linearly in
    log10(BER). Positive means curve_a is better.
    """
    return _crossing(curve_b, target_ber) - _crossing(curve_a, target_ber)

"""Outage lower bound from the inverted MGF, and Monte Carlo estimators.

Without a direct link the constant-modulus SNR bound is
``(gamma / M) * ||E||_{1,1}^2``, so ``P[SNR_UB <= beta]`` is the CDF of
``||E||_{1,1}`` at ``sqrt(M * beta / gamma)``. The variant without the 1/M
factor, ``sqrt(beta / gamma)``, is available as ``variant="no_m"``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamforming import beamform
from .bounds import snr_upper_bound
from .channel import draw_channel, trial_rng
from .config import SystemConfig, to_db
from .inversion import EulerSettings, invert_mgf_to_cdf
from .mgf import MgfEvaluator

__all__ = [
    "OutageCurve",
    "CapacityEstimate",
    "SnrSamples",
    "wilson_interval",
    "outage_lower_bound",
    "simulate_snr",
    "monte_carlo_outage",
    "monte_carlo_capacity",
    "outage_from_samples",
    "capacity_from_samples",
]

log = logging.getLogger(__name__)

KINDS = ("analytical_lower_bound", "monte_carlo_fd", "monte_carlo_fa", "monte_carlo_mrt")


@dataclass
class OutageCurve:
    thresholds: np.ndarray
    probabilities: np.ndarray
    kind: str
    trials: int | None = None
    ci_low: np.ndarray | None = None
    ci_high: np.ndarray | None = None
    raw: np.ndarray | None = None

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @property
    def std_err(self) -> np.ndarray:
        """Binomial standard error with the Agresti-Coull (+2, +4) adjustment."""
        if not self.trials:
            return np.zeros_like(self.probabilities)
        n = self.trials
        p = (self.probabilities * n + 2.0) / (n + 4.0)
        return np.sqrt(p * (1.0 - p) / (n + 4.0))

    def rows(self) -> list[dict]:
        lo = self.ci_low if self.ci_low is not None else self.probabilities
        hi = self.ci_high if self.ci_high is not None else self.probabilities
        return [
            {"beta": float(b), "beta_db": to_db(float(b)), "p_out": float(p),
             "ci_low": float(l), "ci_high": float(h), "kind": self.kind}
            for b, p, l, h in zip(self.thresholds, self.probabilities, lo, hi)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["beta", "beta_db", "p_out", "ci_low", "ci_high", "kind"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "trials": self.trials, "points": self.rows()})


@dataclass(frozen=True)
class CapacityEstimate:
    mean: float
    std_err: float
    trials: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.mean - 1.96 * self.std_err, self.mean + 1.96 * self.std_err


@dataclass
class SnrSamples:
    """Per-trial SNR achieved, its upper bound and the iteration count."""

    snr: np.ndarray
    snr_ub: np.ndarray
    iterations: np.ndarray
    architecture: str
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def capacity(self) -> np.ndarray:
        return np.log2(1.0 + self.snr)


def wilson_interval(successes, n, z: float = 1.96):
    successes = np.asarray(successes, dtype=float)
    if n <= 0:
        return np.zeros_like(successes), np.ones_like(successes)
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return np.clip(centre - half, 0.0, 1.0), np.clip(centre + half, 0.0, 1.0)


def outage_lower_bound(ev: MgfEvaluator, gamma: float, betas, variant: str = "with_m",
                       settings: EulerSettings = EulerSettings()) -> OutageCurve:
    """P[SNR upper bound <= beta] for each beta, by MGF inversion.

    ``variant="with_m"`` maps beta to ``||E||_{1,1} <= sqrt(M beta / gamma)``;
    ``"no_m"`` drops the factor M. A pure line-of-sight evaluator gives the
    exact step instead of inverting a point mass.
    """
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0):
        raise ValueError("thresholds must be positive")
    if variant == "with_m":
        y = np.sqrt(ev.M * betas / gamma)
    elif variant == "no_m":
        y = np.sqrt(betas / gamma)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if ev.degenerate:
        c = ev.deterministic_value
        raw = (y >= c * (1 - 1e-12)).astype(float)
    else:
        raw = invert_mgf_to_cdf(ev, y, settings)
    order = np.argsort(betas)
    probs = np.empty_like(raw)
    probs[order] = np.maximum.accumulate(np.clip(raw[order], 0.0, 1.0))
    return OutageCurve(betas, probs, "analytical_lower_bound", raw=raw)


def _simulate_chunk(args):
    cfg, architecture, seed, start, stop, kw = args
    gamma = cfg.gamma
    out = np.empty((stop - start, 3))
    for i, t in enumerate(range(start, stop)):
        ch = draw_channel(cfg, trial_rng(seed, t))
        res = beamform(ch, architecture, gamma, **kw)
        out[i] = (res.snr, snr_upper_bound(ch, gamma), res.iterations)
    return out


def simulate_snr(cfg: SystemConfig, architecture: str, trials: int, seed: int,
                 workers: int = 1, **kw) -> SnrSamples:
    """Run the beamformer on ``trials`` independent channel draws.

    Trial ``t`` always sees the channel drawn from stream ``(seed, t)``, so
    results do not depend on ``workers`` and different architectures run on
    the same channels.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if workers <= 1:
        block = _simulate_chunk((cfg, architecture, seed, 0, trials, kw))
    else:
        edges = np.linspace(0, trials, workers + 1).astype(int)
        jobs = [(cfg, architecture, seed, int(a), int(b), kw) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            block = np.vstack(list(pool.map(_simulate_chunk, jobs)))
    return SnrSamples(snr=block[:, 0], snr_ub=block[:, 1], iterations=block[:, 2].astype(int),
                      architecture=architecture, seed=seed)


def outage_from_samples(snr, betas, kind: str) -> OutageCurve:
    snr = np.sort(np.asarray(snr, dtype=float))
    betas = np.asarray(betas, dtype=float)
    n = snr.size
    hits = np.searchsorted(snr, betas, side="left")  # count of snr < beta
    lo, hi = wilson_interval(hits, n)
    return OutageCurve(betas, hits / n, kind, trials=n, ci_low=lo, ci_high=hi)


def monte_carlo_outage(cfg: SystemConfig, architecture: str, betas, trials: int, seed: int,
                       workers: int = 1) -> OutageCurve:
    """Empirical P[SNR < beta] with Wilson 95% intervals."""
    samples = simulate_snr(cfg, architecture, trials, seed, workers)
    return outage_from_samples(samples.snr, betas, f"monte_carlo_{architecture}")


def capacity_from_samples(snr) -> CapacityEstimate:
    cap = np.log2(1.0 + np.asarray(snr, dtype=float))
    n = cap.size
    sd = float(np.std(cap, ddof=1)) if n > 1 else 0.0
    return CapacityEstimate(mean=float(np.sum(cap) / n), std_err=sd / math.sqrt(n), trials=n)


def monte_carlo_capacity(cfg: SystemConfig, architecture: str, trials: int, seed: int,
                         workers: int = 1) -> CapacityEstimate:
    """Sample mean of log2(1 + SNR) over independent channel draws."""
    return capacity_from_samples(simulate_snr(cfg, architecture, trials, seed, workers).snr)

"""Parameter sweeps behind the command-line front end.

Each command returns a :class:`SweepResult` in long format: one row per grid
cell (capacity) or per cell and threshold (outage). Rows depend only on the
config and seed; wall time lives in the metadata, which the CSV omits.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .config import SystemConfig, to_db
from .inversion import EulerSettings
from .mgf import MgfEvaluator
from .outage import (
    capacity_from_samples,
    outage_from_samples,
    outage_lower_bound,
    simulate_snr,
)

__all__ = [
    "EXPERIMENT_DEFAULTS",
    "SweepResult",
    "capacity_sweep",
    "outage_sweep",
    "default_beta_db",
]

# M = 4, N = 64, mu = 5 dB, gamma = 1
EXPERIMENT_DEFAULTS = SystemConfig(M=4, N=64, gamma_fixed=1.0, mu_fixed=10 ** (5 / 20))


@dataclass
class SweepResult:
    axes: dict[str, list]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"axes": self.axes, "metadata": self.metadata, "rows": self.rows},
                          default=_fmt, indent=1)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _run_cells(fn: Callable, cells: Sequence, workers: int) -> list:
    if workers <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))  # map keeps cell order


def _metadata(cfg: SystemConfig, seed: int, started: float) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "config": {k: _fmt(v) for k, v in cfg.to_dict().items()},
        "seed": seed,
        "code_version": __version__,
        "wall_time_s": time.time() - started,
    }


def _db(x: float) -> float:
    return to_db(x)


def _capacity_cell(args):
    cfg, arch, trials, seed = args
    samples = simulate_snr(cfg, arch, trials, seed)
    cap = capacity_from_samples(samples.snr)
    ub = capacity_from_samples(samples.snr_ub)
    lo, hi = cap.ci
    snr_mean = float(np.mean(samples.snr))
    ub_mean = float(np.mean(samples.snr_ub))
    return {
        "capacity": cap.mean,
        "ci": 1.96 * cap.std_err,
        "ci_low": lo,
        "ci_high": hi,
        "capacity_ub": ub.mean,
        "snr_mean": snr_mean,
        "snr_mean_db": _db(snr_mean),
        "snr_ub_mean": ub_mean,
        "snr_ub_mean_db": _db(ub_mean),
        "ub_violation_frac": float(np.mean(samples.snr > samples.snr_ub * (1 + 1e-9))),
        "iterations_mean": float(np.mean(samples.iterations)),
    }


def capacity_sweep(base: SystemConfig, N_grid: Sequence[int], K_grid: Sequence[float],
                   archs: Sequence[str] = ("fd", "fa"), mu_grid: Sequence[float | None] | None = None,
                   trials: int = 1000, seed: int = 0, workers: int = 1) -> SweepResult:
    """Mean capacity and its bound over N x K x mu x architecture.

    ``mu_grid`` holds linear direct-link amplitudes; ``None`` switches the
    direct link off. By default the base config's direct-link setting is kept.
    All cells share ``seed`` so neighbouring cells are paired.
    """
    if not N_grid or not K_grid or not archs:
        raise ValueError("every sweep axis needs at least one value")
    if trials < 1:
        raise ValueError("capacity sweep needs trials >= 1")
    mu_grid = list(mu_grid) if mu_grid else [base.mu if base.direct_link else None]
    started = time.time()
    cells, keys = [], []
    for mu, N, K, arch in itertools.product(mu_grid, N_grid, K_grid, archs):
        cfg = base.replace(N=int(N), direct_link=mu is not None, mu_fixed=mu).with_k(float(K))
        cells.append((cfg, arch, trials, seed))
        keys.append((mu, N, K, arch, cfg))
    results = _run_cells(_capacity_cell, cells, workers)
    rows = []
    for (mu, N, K, arch, cfg), res in zip(keys, results):
        rows.append({
            "N": int(N), "K": float(K), "K_db": _db(float(K)),
            "mu": 0.0 if mu is None else mu, "mu_db": to_db(mu, amplitude=True) if mu else -math.inf,
            "direct_link": mu is not None, "gamma": cfg.gamma, "gamma_db": _db(cfg.gamma),
            "arch": arch, **res, "trials": trials, "seed": seed, "config_hash": cfg.config_hash(),
        })
    axes = {"mu": [m if m is not None else "off" for m in mu_grid], "N": [int(n) for n in N_grid],
            "K": [float(k) for k in K_grid], "arch": list(archs)}
    return SweepResult(axes, rows, _metadata(base, seed, started))


def default_beta_db(cfg: SystemConfig, points: int = 45) -> np.ndarray:
    """Thresholds from 10 dB below to 1 dB above the line-of-sight SNR gamma*M*N^2."""
    los_db = to_db(cfg.gamma * cfg.M * cfg.N ** 2)
    return np.linspace(los_db - 10.0, los_db + 1.0, points)


def _outage_cell(args):
    cfg, kind, betas, trials, seed, variant, settings = args
    if kind == "analytical_lower_bound":
        curve = outage_lower_bound(MgfEvaluator.from_config(cfg), cfg.gamma, betas, variant, settings)
    else:
        arch = kind.rsplit("_", 1)[1]
        curve = outage_from_samples(simulate_snr(cfg, arch, trials, seed).snr, betas, kind)
    return curve


def outage_sweep(base: SystemConfig, K_grid: Sequence[float], beta_db: Sequence[float] | None = None,
                 trials: int = 10000, seed: int = 0, archs: Sequence[str] = ("fd", "fa"),
                 variant: str = "with_m", settings: EulerSettings = EulerSettings(),
                 workers: int = 1) -> SweepResult:
    """Outage curves without the direct link: Monte Carlo per architecture plus the analytic bound.

    ``trials == 0`` skips the Monte Carlo curves.
    """
    if not K_grid:
        raise ValueError("K grid is empty")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    base = base.replace(direct_link=False)
    beta_db = np.asarray(default_beta_db(base) if beta_db is None else beta_db, dtype=float)
    betas = 10.0 ** (beta_db / 10.0)
    kinds = ["analytical_lower_bound"] + ([f"monte_carlo_{a}" for a in archs] if trials > 0 else [])
    started = time.time()
    cells, keys = [], []
    for K in K_grid:
        cfg = base.with_k(float(K))
        for kind in kinds:
            cells.append((cfg, kind, betas, trials, seed, variant, settings))
            keys.append((K, kind, cfg))
    curves = _run_cells(_outage_cell, cells, workers)
    rows = []
    for (K, kind, cfg), curve in zip(keys, curves):
        lo = curve.ci_low if curve.ci_low is not None else curve.probabilities
        hi = curve.ci_high if curve.ci_high is not None else curve.probabilities
        for b, bdb, p, l, h in zip(betas, beta_db, curve.probabilities, lo, hi):
            rows.append({
                "K": float(K), "K_db": _db(float(K)), "kind": kind, "beta": float(b), "beta_db": float(bdb),
                "p_out": float(p), "ci_low": float(l), "ci_high": float(h),
                "trials": curve.trials or 0, "config_hash": cfg.config_hash(),
            })
    axes = {"K": [float(k) for k in K_grid], "kind": kinds, "beta_db": [float(b) for b in beta_db]}
    meta = _metadata(base, seed, started)
    meta["lower_bound_variant"] = variant
    return SweepResult(axes, rows, meta)

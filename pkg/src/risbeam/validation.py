"""Quick oracle suite run by ``risbeam validate``."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .beamforming import analog_beamformer, digital_beamformer, oracle_grid_search
from .bounds import snr_upper_bound
from .channel import crandn, draw_channel, los_channel, trial_rng
from .config import SystemConfig
from .inversion import invert_mgf_to_cdf
from .mgf import MgfEvaluator


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    # value must stay at or below tolerance unless higher_is_better
    higher_is_better: bool = False

    @property
    def passed(self) -> bool:
        if self.higher_is_better:
            return self.value >= self.tolerance
        return self.value <= self.tolerance

    def line(self) -> str:
        op = ">=" if self.higher_is_better else "<="
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34} {self.value:.3e} {op} {self.tolerance:.3e}"


def load_regression_fixture() -> dict:
    text = resources.files("risbeam").joinpath("data/regression_m2n2.json").read_text()
    return json.loads(text)


def _los_check(scale):
    cfg = SystemConfig(M=4, N=64, gamma_fixed=1.0, direct_link=False)
    ch = los_channel(cfg)
    target = cfg.gamma * cfg.M * cfg.N ** 2
    err = max(abs(digital_beamformer(ch).snr / target - 1), abs(analog_beamformer(ch).snr / target - 1))
    return Check("los_exactness_rel_err", err, 1e-6 * scale)


def _oracle_checks(seed, n_trials, scale):
    cfg = SystemConfig(M=2, N=2, gamma_fixed=1.0, mu_fixed=10 ** (5 / 20)).with_k(1.0)
    ok_fd = ok_fa = 0
    for t in range(n_trials):
        ch = draw_channel(cfg, trial_rng(seed, t))
        ofd = oracle_grid_search(ch, "fd", 360).snr
        ofa = oracle_grid_search(ch, "fa", 360).snr
        ok_fd += digital_beamformer(ch).snr >= (1 - 0.005 * scale) * ofd
        ok_fa += analog_beamformer(ch).snr >= (1 - 0.01 * scale) * ofa
    return [Check("oracle_fd_within_0.5pct_frac", ok_fd / n_trials, 0.95, True),
            Check("oracle_fa_within_1pct_frac", ok_fa / n_trials, 0.95, True)]


def _regression_checks(scale):
    fx = load_regression_fixture()
    c = fx["config"]
    cfg = SystemConfig(M=c["M"], N=c["N"], gamma_fixed=c["gamma"],
                       mu_fixed=10 ** (c["mu_db"] / 20)).with_k(c["K"])
    ch = draw_channel(cfg, trial_rng(fx["seed"], fx["trial"]))
    ofd = oracle_grid_search(ch, "fd", fx["grid_points"]).snr
    fd = digital_beamformer(ch).snr
    fa = analog_beamformer(ch).snr
    return [
        Check("regression_oracle_fd_rel_err", abs(ofd / fx["oracle_fd_snr"] - 1), 1e-9 * scale),
        Check("regression_fd_shortfall", max(0.0, 1 - fd / fx["oracle_fd_snr"]), 0.005 * scale),
        Check("regression_fa_shortfall", max(0.0, 1 - fa / fx["oracle_fa_snr"]), 0.01 * scale),
    ]


def _mgf_check(seed, draws, scale):
    cfg = SystemConfig(M=2, N=2).with_k(5.0)
    ev = MgfEvaluator.from_config(cfg)
    kl, kn = cfg.kappas(5.0)
    rng = np.random.default_rng(seed)
    H = kl + kn * crandn(rng, draws, 2, 2)
    h = kl + kn * crandn(rng, draws, 2)
    Y = np.sum(np.abs(h) * np.abs(H).sum(-1), -1)
    s = np.array([0.1, 0.5, 1.0, 2.0])
    mc = np.array([np.mean(np.exp(-si * Y)) for si in s])
    err = float(np.max(np.abs(np.real(ev(s)) / mc - 1)))
    return Check("mgf_vs_monte_carlo_rel_err", err, 0.01 * scale)


def _inversion_checks(scale):
    y1 = np.linspace(-math.log(0.995), -math.log(0.005), 200)
    e1 = np.max(np.abs(invert_mgf_to_cdf(lambda s: 1 / (1 + s), y1) - (1 - np.exp(-y1))))
    y2 = np.linspace(0.1035, 7.430, 200)  # Erlang-2 0.5% and 99.5% quantiles
    e2 = np.max(np.abs(invert_mgf_to_cdf(lambda s: (1 + s) ** -2.0, y2) - (1 - np.exp(-y2) * (1 + y2))))
    return [Check("inversion_exponential_abs_err", float(e1), 1e-3 * scale),
            Check("inversion_erlang2_abs_err", float(e2), 1e-3 * scale)]


def _dominance_check(seed, n, scale):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for t in range(n):
        M = int(rng.integers(1, 7))
        N = int(rng.integers(1, 17))
        cfg = SystemConfig(M=M, N=N, gamma_fixed=1.0, direct_link=bool(t % 2)).with_k([0.0, 1.0, 10.0][t % 3])
        ch = draw_channel(cfg, trial_rng(seed, t))
        worst = max(worst, analog_beamformer(ch).snr / snr_upper_bound(ch) - 1)
    return Check("fa_bound_excess_rel", worst, 1e-9 * scale)


def run_validation(seed: int = 0, tolerance_scale: float = 1.0, quick: bool = False) -> list[Check]:
    """Every check; tolerances are multiplied by ``tolerance_scale``."""
    checks = [_los_check(tolerance_scale)]
    checks += _oracle_checks(seed, 20 if quick else 100, tolerance_scale)
    checks += _regression_checks(tolerance_scale)
    checks.append(_mgf_check(seed, 200_000 if quick else 1_000_000, tolerance_scale * (2 if quick else 1)))
    checks += _inversion_checks(tolerance_scale)
    checks.append(_dominance_check(seed, 200 if quick else 1000, tolerance_scale))
    return checks

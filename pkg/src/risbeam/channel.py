"""Rician-faded direct and RIS-assisted channels."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import SystemConfig

__all__ = [
    "ChannelRealization",
    "steering_vector",
    "draw_channel",
    "los_channel",
    "trial_rng",
    "crandn",
]


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of (H, h, g) together with E = diag(h) H and G = [E; mu g^T].

    ``mu`` is the direct-link amplitude baked into the last row of ``G``.
    """

    H: np.ndarray
    h: np.ndarray
    g: np.ndarray
    mu: float

    @cached_property
    def E(self) -> np.ndarray:
        return self.h[:, None] * self.H

    @cached_property
    def G(self) -> np.ndarray:
        return np.vstack([self.E, self.mu * self.g[None, :]])

    @property
    def M(self) -> int:
        return self.H.shape[1]

    @property
    def N(self) -> int:
        return self.H.shape[0]

    @property
    def has_direct(self) -> bool:
        return self.mu != 0.0

    @classmethod
    def from_matrix(cls, E, g=None, mu: float = 0.0) -> "ChannelRealization":
        """Wrap a given indirect matrix E (h taken as all-ones)."""
        E = np.asarray(E, dtype=complex)
        if E.ndim != 2:
            raise ValueError("E must be a 2-D matrix")
        g = np.zeros(E.shape[1], dtype=complex) if g is None else np.asarray(g, dtype=complex)
        return cls(H=E, h=np.ones(E.shape[0], dtype=complex), g=g, mu=float(mu))

    def scaled(self, c: float) -> "ChannelRealization":
        """Scale G by c > 0 (applied to H and g)."""
        return ChannelRealization(self.H * c, self.h, self.g * c, self.mu)


def steering_vector(L: int, psi: float, d_over_lambda: float = 0.5) -> np.ndarray:
    """ULA response with element l equal to exp(-j*pi*(d/lambda)*l*cos(psi))."""
    if L < 1:
        raise ValueError("array length must be >= 1")
    ell = np.arange(L)
    return np.exp(-1j * np.pi * d_over_lambda * ell * np.cos(psi))


def crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts each of variance 1/2."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial`` under master ``seed``.

    Streams come from the seed-sequence spawn tree, so trial order and worker
    assignment do not affect any draw.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(trial),)))


def _los_parts(cfg: SystemConfig):
    dl = cfg.d_over_lambda
    g_bar = steering_vector(cfg.M, cfg.theta_bd_d, dl)
    h_bar = steering_vector(cfg.N, cfg.theta_rd, dl)
    H_bar = np.outer(steering_vector(cfg.N, cfg.theta_ra, dl), steering_vector(cfg.M, cfg.theta_bd_i, dl))
    return H_bar, h_bar, g_bar


def draw_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw H (BS-RIS, K1), h (RIS-user, K2) and g (BS-user, K0).

    Scattered parts are always drawn, even for K = inf, so the random stream
    advances identically whatever the Rician factors are.
    """
    H_bar, h_bar, g_bar = _los_parts(cfg)
    H_t = crandn(rng, cfg.N, cfg.M)
    h_t = crandn(rng, cfg.N)
    g_t = crandn(rng, cfg.M)
    kl1, kn1 = cfg.kappas(cfg.K1)
    kl2, kn2 = cfg.kappas(cfg.K2)
    kl0, kn0 = cfg.kappas(cfg.K0)
    return ChannelRealization(
        H=kl1 * H_bar + kn1 * H_t,
        h=kl2 * h_bar + kn2 * h_t,
        g=kl0 * g_bar + kn0 * g_t,
        mu=cfg.mu,
    )


def los_channel(cfg: SystemConfig) -> ChannelRealization:
    """Deterministic pure line-of-sight realization (all K = inf)."""
    H_bar, h_bar, g_bar = _los_parts(cfg)
    return ChannelRealization(H=H_bar, h=h_bar, g=g_bar, mu=cfg.mu)

"""Special functions used by the outage analysis.

Modified Bessel function I0 (plain and exponentially scaled), the first-order
Marcum Q function and the Rician density / distribution function. Everything
here is self-contained numpy so every module shares one numeric truth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RicianParams",
    "bessel_i0",
    "bessel_i0e",
    "marcum_q1",
    "marcum_p1",
    "rician_pdf",
    "rician_cdf",
]

# power series below, asymptotic expansion above
_I0_SWITCH = 30.0
# Marcum Q1: Poisson-mixture series while a*b is below this
_MARCUM_SERIES_AB = 30.0
_MARCUM_SERIES_MAX_ARG = 60.0
_TINY = 1e-300


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function ``exp(-|x|) * I0(x)``."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < _I0_SWITCH
    if np.any(small):
        xs = x[small]
        q = 0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        for k in range(1, 200):
            term = term * q / (k * k)
            total = total + term
            if np.all(term <= 1e-17 * total):
                break
        out[small] = total * np.exp(-xs)
    if np.any(~small):
        xl = x[~small]
        # e^x/sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
        term = np.ones_like(xl)
        total = np.ones_like(xl)
        for k in range(1, 60):
            term = term * (2 * k - 1) ** 2 / (8.0 * k * xl)
            total = total + term
            if np.all(term <= 1e-17 * total):
                break
        out[~small] = total / np.sqrt(2.0 * np.pi * xl)
    return out if out.ndim else float(out)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero (even in x)."""
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(over="ignore"):
        out = bessel_i0e(x) * np.exp(x)
    return out if np.ndim(out) else float(out)


def _poisson_logpmf(k, lam):
    k = np.asarray(k, dtype=float)
    if lam == 0.0:
        return np.where(k == 0, 0.0, -np.inf)
    lgam = np.array([math.lgamma(kk + 1.0) for kk in k.ravel()]).reshape(k.shape)
    return k * math.log(lam) - lam - lgam


def _window(lam):
    half = 10.0 * math.sqrt(lam) + 40.0
    return max(0, int(math.floor(lam - half))), int(math.ceil(lam + half))


def _marcum_series(a, b):
    """Poisson-mixture series, returning the two tails (Q1, P1) summed separately.

    Q1(a, b) = sum_k Pois(k; a^2/2) * P[Pois(b^2/2) <= k]
    P1(a, b) = sum_k Pois(k; a^2/2) * P[Pois(b^2/2) >  k]
    """
    lam = 0.5 * a * a
    mu = 0.5 * b * b
    k_lo, k_hi = _window(lam)
    ks = np.arange(k_lo, k_hi + 1)
    w = np.exp(_poisson_logpmf(ks, lam))

    j_lo, j_hi = _window(mu)
    j_hi = max(j_hi, k_hi + 1)
    js = np.arange(j_lo, j_hi + 1)
    pj = np.exp(_poisson_logpmf(js, mu))
    cdf = np.cumsum(pj)
    sf = np.cumsum(pj[::-1])[::-1]  # sf[i] = P[N >= js[i]]

    # P[N <= k] and P[N > k] looked up on the j-grid
    idx = ks - j_lo
    below = idx < 0
    idx_c = np.clip(idx, 0, len(js) - 1)
    cdf_k = np.where(below, 0.0, cdf[idx_c])
    nxt = np.clip(idx + 1, 0, len(js) - 1)
    sf_k = np.where(below, 1.0, np.where(idx + 1 > len(js) - 1, 0.0, sf[nxt]))
    return float(np.sum(w * cdf_k)), float(np.sum(w * sf_k))


def _gl_panels(lo, hi, width=2.0, nodes=24):
    """Composite Gauss-Legendre nodes/weights on [lo, hi]."""
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    n_pan = max(1, int(math.ceil((hi - lo) / width)))
    t, wt = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, n_pan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    w = (half[:, None] * wt[None, :]).ravel()
    return x, w


def _marcum_kernel(x, a):
    # x exp(-(x^2+a^2)/2) I0(a x), written to stay finite for large a x
    return x * np.exp(-0.5 * (x - a) ** 2) * bessel_i0e(a * x)


def _marcum_quadrature(a, b):
    """Direct integration of the Rician kernel; returns (Q1, P1)."""
    reach = 40.0
    if b >= a:
        x, w = _gl_panels(b, max(b, a) + reach)
        q = float(np.sum(w * _marcum_kernel(x, a)))
        return q, 1.0 - q
    x, w = _gl_panels(max(0.0, a - reach), b)
    p = float(np.sum(w * _marcum_kernel(x, a)))
    return 1.0 - p, p


def _marcum_pair(a, b):
    if a < 0 or b < 0:
        raise ValueError("Marcum Q arguments must be non-negative")
    if b == 0.0:
        return 1.0, 0.0
    if a * b < _MARCUM_SERIES_AB and max(a, b) <= _MARCUM_SERIES_MAX_ARG:
        return _marcum_series(a, b)
    return _marcum_quadrature(a, b)


def _scalar_q1(a, b):
    q, p = _marcum_pair(a, b)
    val = q if q < 0.5 else 1.0 - p
    return min(1.0, max(0.0, val))


def _scalar_p1(a, b):
    q, p = _marcum_pair(a, b)
    val = p if p < 0.5 else 1.0 - q
    return min(1.0, max(0.0, val))


def marcum_q1(a, b):
    """First-order Marcum Q function Q1(a, b), broadcasting over arrays.

    The smaller of the two tails is always summed directly, so values close to
    0 keep their relative accuracy and values close to 1 are returned as
    one minus the directly summed lower tail.
    """
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    out = np.array([_scalar_q1(aa, bb) for aa, bb in zip(a_arr.ravel(), b_arr.ravel())])
    out = out.reshape(a_arr.shape)
    return out if out.ndim else float(out)


def marcum_p1(a, b):
    """Lower tail ``1 - Q1(a, b)``, computed from its own series."""
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    out = np.array([_scalar_p1(aa, bb) for aa, bb in zip(a_arr.ravel(), b_arr.ravel())])
    out = out.reshape(a_arr.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RicianParams:
    """Rice distribution of ``|nu + sigma*(X + jY)|`` with X, Y standard normal.

    ``sigma`` is the per-component standard deviation. ``sigma == 0`` is the
    pure line-of-sight limit (a point mass at ``nu``); the density and CDF
    reject it, callers that integrate against the law handle it explicitly.
    """

    nu: float
    sigma: float

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")

    @classmethod
    def from_k_factor(cls, K: float) -> "RicianParams":
        """Envelope law of ``kl + kn*CN(0, 1)`` for Rician factor ``K``."""
        if K < 0:
            raise ValueError("Rician factor must be non-negative")
        if math.isinf(K):
            return cls(1.0, 0.0)
        return cls(math.sqrt(K / (1.0 + K)), math.sqrt(1.0 / (1.0 + K)) / math.sqrt(2.0))

    @property
    def degenerate(self) -> bool:
        return self.sigma == 0.0

    @property
    def support(self) -> tuple[float, float]:
        """Interval carrying all but ~1e-20 of the probability mass."""
        if self.degenerate:
            return self.nu, self.nu
        return max(0.0, self.nu - 10.0 * self.sigma), self.nu + 10.0 * self.sigma


def _check_sigma(p: RicianParams):
    if p.sigma <= 0:
        raise ValueError("Rician density needs sigma > 0")


def rician_pdf(x, p: RicianParams):
    _check_sigma(p)
    x = np.asarray(x, dtype=float)
    s2 = p.sigma * p.sigma
    xc = np.maximum(x, 0.0)
    val = xc / s2 * np.exp(-0.5 * (xc - p.nu) ** 2 / s2) * bessel_i0e(xc * p.nu / s2)
    val = np.where(x < 0, 0.0, val)
    return val if val.ndim else float(val)


def rician_cdf(x, p: RicianParams):
    """``P[R <= x] = 1 - Q1(nu/sigma, x/sigma)``."""
    _check_sigma(p)
    x = np.asarray(x, dtype=float)
    xc = np.maximum(x, 0.0)
    val = marcum_p1(p.nu / p.sigma, xc / p.sigma)
    val = np.where(x <= 0, 0.0, val)
    return val if val.ndim else float(val)

"""CDF recovery from an MGF by Bromwich-contour inversion with Euler summation.

For a non-negative Y with ``mgf(s) = E[exp(-s Y)]`` the Laplace transform of
its CDF is ``mgf(s) / s``. The contour integral is discretized by the
trapezoidal rule (discretization error about ``exp(-A)``) and the resulting
alternating series is accelerated by binomial averaging of ``m + 1``
consecutive partial sums starting at term ``n``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["InversionError", "EulerSettings", "invert_mgf_to_cdf", "invert_laplace"]

log = logging.getLogger(__name__)


class InversionError(ArithmeticError):
    """Euler partial sums did not settle."""

    def __init__(self, y, estimate, disagreement, terms):
        super().__init__(
            f"Euler summation not settled at y={y:.6g}: estimate {estimate:.6g}, "
            f"tail disagreement {disagreement:.3g} after {terms} terms"
        )
        self.y = y
        self.estimate = estimate
        self.disagreement = disagreement
        self.terms = terms


@dataclass(frozen=True)
class EulerSettings:
    A: float = 18.4
    n: int = 21
    m: int = 15
    tol: float = 1e-7
    max_doublings: int = 4


def _euler(transform, y, A, n, m):
    """Euler estimates with ``n`` and ``n + 1`` leading terms, for every y."""
    y = np.asarray(y, dtype=float)
    k = np.arange(n + m + 2)
    s = (A + 2j * np.pi * k[None, :]) / (2.0 * y[:, None])
    vals = np.real(transform(s))
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    coef = math.exp(A / 2.0) / y[:, None]
    terms = coef * sign[None, :] * vals
    terms[:, 0] *= 0.5
    partial = np.cumsum(terms, axis=1)
    binom = np.array([math.comb(m, j) for j in range(m + 1)], dtype=float) / 2.0 ** m
    est_n = partial[:, n:n + m + 1] @ binom
    est_n1 = partial[:, n + 1:n + m + 2] @ binom
    return est_n, est_n1


def invert_laplace(transform, y, settings: EulerSettings = EulerSettings(), strict: bool = True):
    """Invert a Laplace transform ``transform(s)`` (vectorized in s) at points y > 0.

    The number of leading terms is doubled where the Euler estimates with
    ``n`` and ``n + 1`` terms differ by more than ``settings.tol``; points that
    never settle raise :class:`InversionError` when ``strict``, otherwise they
    are logged and the last estimate is kept.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= 0):
        raise ValueError("inversion points must be positive")
    out = np.empty_like(y)
    todo = np.arange(y.size)
    n = settings.n
    for attempt in range(settings.max_doublings + 1):
        est, est1 = _euler(transform, y[todo], settings.A, n, settings.m)
        gap = np.abs(est - est1)
        ok = gap <= settings.tol
        out[todo] = est
        last = attempt == settings.max_doublings
        if last and not np.all(ok):
            bad = int(np.argmax(gap))
            if strict:
                raise InversionError(float(y[todo][bad]), float(est[bad]), float(gap[bad]), n + settings.m)
            log.warning("Euler summation unsettled at %d point(s), worst gap %.3g", int(np.sum(~ok)), gap[bad])
        todo = todo[~ok]
        if todo.size == 0:
            break
        n *= 2
    return out


def invert_mgf_to_cdf(mgf, y, settings: EulerSettings = EulerSettings(), strict: bool = True):
    """P[Y <= y] from ``mgf(s) = E[exp(-s Y)]``, clipped to [0, 1].

    Accepts a scalar or an array of points; returns the same shape.
    """
    scalar = np.ndim(y) == 0
    raw = invert_laplace(lambda s: np.asarray(mgf(s)) / s, y, settings, strict)
    if np.any((raw < -1e-6) | (raw > 1 + 1e-6)):
        log.debug("inverted CDF outside [0, 1] before clipping: min %.3g max %.3g", raw.min(), raw.max())
    out = np.clip(raw, 0.0, 1.0)
    return float(out[0]) if scalar else out

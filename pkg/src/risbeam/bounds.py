"""Closed-form SNR / capacity upper bounds."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .beamforming import BeamformingResult
from .channel import ChannelRealization

__all__ = ["Exactness", "BoundReport", "snr_upper_bound", "capacity", "bound_gap", "bound_report"]


class Exactness(enum.Enum):
    GENERIC = "generic"
    LOS_TIGHT = "los_tight"
    UNIT_RANK_EXACT = "unit_rank_exact"


@dataclass(frozen=True)
class BoundReport:
    snr_ub: float
    capacity_ub: float
    exactness_flag: Exactness


def capacity(snr: float) -> float:
    """log2(1 + snr) in bits/s/Hz."""
    if snr < 0:
        raise ValueError(f"SNR must be non-negative, got {snr}")
    return math.log2(1.0 + snr)


def snr_upper_bound(ch: ChannelRealization, gamma: float = 1.0, M: int | None = None) -> float:
    """(gamma / M) * ||G||_{1,1}^2.

    Holds for every constant-modulus beamformer by the triangle inequality;
    a digital beamformer may exceed it.
    """
    M = ch.M if M is None else M
    l11 = float(np.sum(np.abs(ch.G)))
    return gamma / M * l11 * l11


def bound_gap(ch: ChannelRealization, gamma: float, result: BeamformingResult) -> float:
    """Upper bound minus achieved SNR (non-negative for analog results)."""
    return snr_upper_bound(ch, gamma) - result.snr


def _numerical_rank(A, rtol=1e-10) -> int:
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0


def bound_report(ch: ChannelRealization, gamma: float = 1.0) -> BoundReport:
    """Bound plus a flag telling when it is known to be attained.

    ``unit_rank_exact``: G has rank one, so the bound is attained by both
    architectures. ``los_tight``: the indirect part alone has rank one (the
    bound is attained without the direct link). Otherwise ``generic``.
    """
    ub = snr_upper_bound(ch, gamma)
    if _numerical_rank(ch.G) == 1:
        flag = Exactness.UNIT_RANK_EXACT
    elif _numerical_rank(ch.E) == 1:
        flag = Exactness.LOS_TIGHT
    else:
        flag = Exactness.GENERIC
    return BoundReport(snr_ub=ub, capacity_ub=capacity(ub), exactness_flag=flag)

"""Transmit beamformers and RIS phase configurations.

With the RIS co-phasing every reflected path onto the direct path, the
received amplitude for a beamformer ``f`` is ``||G f||_1`` where
``G = [diag(h) H; mu g^T]``. The digital (unit-norm) beamformer is then an
L1 principal component of ``G``; the analog (constant-modulus) beamformer is
found by alternating closed-form phase updates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization

__all__ = [
    "BeamformingResult",
    "snr",
    "optimal_ris_phases",
    "digital_beamformer",
    "analog_beamformer",
    "mrt_beamformer",
    "oracle_grid_search",
    "beamform",
    "ARCHITECTURES",
]

ARCHITECTURES = ("fd", "fa", "mrt")


@dataclass
class BeamformingResult:
    f: np.ndarray
    psi: np.ndarray
    snr: float
    objective_trace: list[float] = field(default_factory=list)
    iterations: int = 1
    converged: bool = True
    architecture: str = "fd"

    @property
    def capacity(self) -> float:
        return math.log2(1.0 + self.snr)


def _unit_phase(z):
    """exp(j*angle(z)) with angle(0) taken as 0."""
    z = np.asarray(z, dtype=complex)
    mag = np.abs(z)
    out = np.ones_like(z)
    nz = mag > 0
    out[nz] = z[nz] / mag[nz]
    return out


def snr(ch: ChannelRealization, f, psi, gamma: float = 1.0) -> float:
    """gamma * |psi^T E f + mu g^T f|^2 for any f and psi (no constraint check)."""
    f = np.asarray(f, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if f.shape != (ch.M,) or psi.shape != (ch.N,):
        raise ValueError(f"expected f of shape ({ch.M},) and psi of shape ({ch.N},), got {f.shape} and {psi.shape}")
    amp = psi @ (ch.E @ f) + ch.mu * (ch.g @ f)
    return float(gamma * abs(amp) ** 2)


def optimal_ris_phases(ch: ChannelRealization, f) -> np.ndarray:
    """RIS phases aligning every reflected term with the direct term ``mu g^T f``.

    When the direct term vanishes the reflected terms are aligned to phase 0.
    """
    f = np.asarray(f, dtype=complex)
    ref = _unit_phase(ch.mu * (ch.g @ f))
    return ref * np.conj(_unit_phase(ch.E @ f))


def _l1(G, f) -> float:
    return float(np.sum(np.abs(G @ f)))


def _check_nonzero(G):
    if not np.any(G):
        raise ValueError("channel matrix G is identically zero")


def mrt_beamformer(ch: ChannelRealization, gamma: float = 1.0) -> BeamformingResult:
    """Matched filter to the RIS-adjusted effective channel, one pass.

    Starts from the dominant right singular vector of G, sets the RIS phases
    for it, then matches ``f`` to ``psi^T E + mu g^T``.
    """
    G = ch.G
    _check_nonzero(G)
    f0 = np.conj(np.linalg.svd(G)[2][0])
    psi0 = optimal_ris_phases(ch, f0)
    w = psi0 @ ch.E + ch.mu * ch.g
    nw = np.linalg.norm(w)
    f = np.conj(w) / nw if nw > 0 else f0
    psi = optimal_ris_phases(ch, f)
    val = gamma * _l1(G, f) ** 2
    return BeamformingResult(f=f, psi=psi, snr=val, objective_trace=[val], iterations=1, converged=True, architecture="mrt")


def _l1pca_iterate(G, u, tol, max_iter):
    """Fixed-point L1-PCA ascent from combining vector ``u``.

    Returns (f, trace, iterations, converged); trace holds Re{u^H G f} after
    each u-update, which equals ||G f||_1.
    """
    trace = []
    f_best = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        v = G.conj().T @ u
        nv = np.linalg.norm(v)
        if nv == 0:
            break
        f = v / nv
        u = _unit_phase(G @ f)
        val = float(np.real(np.vdot(u, G @ f)))
        if trace and val <= trace[-1]:
            # ascent is exact, a non-increase is rounding at the fixed point
            converged = trace[-1] - val <= tol * max(trace[-1], 1e-300) or val == trace[-1]
            break
        trace.append(val)
        f_best = f
        if len(trace) > 1 and trace[-1] - trace[-2] < tol * trace[-2]:
            converged = True
            break
    return f_best, trace, it, converged


def digital_beamformer(ch: ChannelRealization, gamma: float = 1.0, tol: float = 1e-9,
                       max_iter: int = 1000, restarts: int = 0,
                       rng: np.random.Generator | None = None,
                       analog_start: bool = True) -> BeamformingResult:
    """Fully digital beamformer maximizing ``||G f||_1`` over ``||f||_2 = 1``.

    Alternates ``f = G^H u / ||G^H u||`` and ``u = exp(j angle(G f))`` from a
    warm start at the MRT solution. With ``analog_start`` a second run starts
    from the analog solution; since every step ascends, the result can then
    never fall below the analog architecture. ``restarts`` adds random
    unimodular starts (needs ``rng``). The best run is returned.
    """
    G = ch.G
    _check_nonzero(G)
    f_mrt = mrt_beamformer(ch, gamma).f
    starts = [_unit_phase(G @ f_mrt)]
    if analog_start and ch.M > 1:
        starts.append(_unit_phase(G @ analog_beamformer(ch, gamma, tol, max_iter).f))
    if restarts:
        if rng is None:
            raise ValueError("restarts need an rng")
        for _ in range(restarts):
            starts.append(np.exp(2j * np.pi * rng.random(G.shape[0])))

    best = None
    for u0 in starts:
        f, trace, it, conv = _l1pca_iterate(G, u0, tol, max_iter)
        if f is None:
            continue
        if best is None or trace[-1] > best[1][-1]:
            best = (f, trace, it, conv)
    if best is None:
        f = f_mrt
        best = (f, [_l1(G, f)], 1, False)
    f, trace, it, conv = best
    psi = optimal_ris_phases(ch, f)
    return BeamformingResult(f=f, psi=psi, snr=gamma * trace[-1] ** 2, objective_trace=list(trace),
                             iterations=it, converged=conv, architecture="fd")


def _psi_indirect(ch: ChannelRealization, f):
    # reflected terms aligned to phase 0, direct-term phase ignored
    return np.conj(_unit_phase(ch.E @ f))


def analog_beamformer(ch: ChannelRealization, gamma: float = 1.0, tol: float = 1e-9,
                      max_iter: int = 1000, psi_update: str = "aligned") -> BeamformingResult:
    """Fully analog beamformer (|f_m| = 1/sqrt(M)) by alternating closed forms.

    ``psi_update="aligned"`` is the exact RIS maximizer for a given ``f``
    (reflected terms co-phased with the direct term). ``"indirect"`` drops the
    direct-term phase reference; it coincides with ``"aligned"`` without a
    direct link and is kept for comparison only.
    """
    if psi_update not in ("aligned", "indirect"):
        raise ValueError(f"unknown psi_update {psi_update!r}")
    G = ch.G
    _check_nonzero(G)
    M = ch.M
    psi_of = optimal_ris_phases if psi_update == "aligned" else _psi_indirect

    f = _unit_phase(mrt_beamformer(ch, gamma).f) / math.sqrt(M)
    psi = psi_of(ch, f)
    trace = [snr(ch, f, psi, gamma)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = psi @ ch.E + ch.mu * ch.g
        f_new = np.conj(_unit_phase(w)) / math.sqrt(M)
        psi_new = psi_of(ch, f_new)
        val = snr(ch, f_new, psi_new, gamma)
        if val <= trace[-1]:
            converged = trace[-1] - val <= tol * max(trace[-1], 1e-300) or val == trace[-1]
            break
        f, psi = f_new, psi_new
        trace.append(val)
        if trace[-1] - trace[-2] < tol * trace[-2]:
            converged = True
            break
    return BeamformingResult(f=f, psi=psi, snr=trace[-1], objective_trace=trace,
                             iterations=it, converged=converged, architecture="fa")


def beamform(ch: ChannelRealization, architecture: str, gamma: float = 1.0, **kw) -> BeamformingResult:
    """Dispatch on ``"fd"``, ``"fa"`` or ``"mrt"``."""
    if architecture == "fd":
        return digital_beamformer(ch, gamma, **kw)
    if architecture == "fa":
        return analog_beamformer(ch, gamma, **kw)
    if architecture == "mrt":
        return mrt_beamformer(ch, gamma)
    raise ValueError(f"unknown architecture {architecture!r}")


def _phase_grid(points: int, dims: int, chunk: int = 1 << 16):
    """Yield blocks of unit phasors covering the grid {2 pi k / points}^dims."""
    base = np.exp(2j * np.pi * np.arange(points) / points)
    if dims == 0:
        yield np.ones((1, 0), dtype=complex)
        return
    idx_iter = itertools.product(range(points), repeat=max(dims - 2, 0))
    if dims == 1:
        yield base[:, None]
        return
    tail = np.stack(np.meshgrid(base, base, indexing="ij"), axis=-1).reshape(-1, 2)
    for head in idx_iter:
        head_ph = base[list(head)] if head else np.zeros(0, dtype=complex)
        block = np.hstack([np.broadcast_to(head_ph, (tail.shape[0], len(head_ph))), tail])
        for start in range(0, block.shape[0], chunk):
            yield block[start:start + chunk]


def oracle_grid_search(ch: ChannelRealization, architecture: str = "fd",
                       grid_points_per_dim: int = 360, gamma: float = 1.0) -> BeamformingResult:
    """Exhaustive phase-grid optimum for tiny instances (validation only).

    FD: grid over RIS phases, closed-form matched filter per point.
    FA: grid over beamformer phases (first antenna fixed), optimal RIS per point.
    Without a direct link the first RIS phase is fixed as well, which loses
    nothing because the objective ignores a common RIS phase.
    """
    if ch.N > 3 or (architecture == "fa" and ch.M > 3):
        raise ValueError("grid oracle limited to N <= 3 (and M <= 3 for FA)")
    P = int(grid_points_per_dim)
    best_val, best_x = -1.0, None
    E, g, mu = ch.E, ch.g, ch.mu
    if architecture == "fd":
        free = ch.N - (0 if ch.has_direct else 1)
        for block in _phase_grid(P, free):
            psi = block if ch.has_direct else np.hstack([np.ones((block.shape[0], 1)), block])
            w = psi @ E + mu * g[None, :]
            vals = np.sum(np.abs(w) ** 2, axis=1)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_x = float(vals[k]), w[k]
        f = np.conj(best_x) / np.linalg.norm(best_x)
    elif architecture == "fa":
        G = ch.G
        for block in _phase_grid(P, ch.M - 1):
            F = np.hstack([np.ones((block.shape[0], 1)), block]) / math.sqrt(ch.M)
            vals = np.sum(np.abs(F @ G.T), axis=1) ** 2
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_x = float(vals[k]), F[k]
        f = best_x
    else:
        raise ValueError(f"grid oracle supports 'fd' and 'fa', got {architecture!r}")
    psi = optimal_ris_phases(ch, f)
    val = snr(ch, f, psi, gamma)
    return BeamformingResult(f=f, psi=psi, snr=val, objective_trace=[val], iterations=1,
                             converged=True, architecture=f"oracle-{architecture}")

import math

import numpy as np
import pytest

from risbeam.beamforming import analog_beamformer, digital_beamformer
from risbeam.bounds import Exactness, bound_gap, bound_report, capacity, snr_upper_bound
from risbeam.channel import ChannelRealization, draw_channel, los_channel, trial_rng
from risbeam.config import SystemConfig

MU5 = 10 ** (5 / 20)


def test_capacity_examples():
    assert capacity(0.0) == 0.0
    assert capacity(1.0) == 1.0
    # log2(16385) = 14 + log2(1 + 2^-14)
    assert capacity(16384) == pytest.approx(14 + math.log1p(2.0 ** -14) / math.log(2), rel=1e-15)
    with pytest.raises(ValueError):
        capacity(-1.0)


def test_los_bounds():
    cfg = SystemConfig(M=4, N=64, gamma_fixed=2.0, mu_fixed=MU5)
    assert snr_upper_bound(los_channel(cfg), 2.0) == pytest.approx(2.0 * 4 * (64 + MU5) ** 2, rel=1e-12)
    cfg = cfg.replace(direct_link=False)
    assert snr_upper_bound(los_channel(cfg), 2.0) == pytest.approx(2.0 * 4 * 64 ** 2, rel=1e-12)


def test_zero_channel():
    assert snr_upper_bound(ChannelRealization.from_matrix(np.zeros((3, 2)))) == 0.0


def test_fa_gap_non_negative():
    for t in range(300):
        K = [0.0, 1.0, 10.0][t % 3]
        ch = draw_channel(SystemConfig(M=3, N=6, gamma_fixed=1.0, mu_fixed=1.0).with_k(K), trial_rng(1, t))
        res = analog_beamformer(ch)
        assert bound_gap(ch, 1.0, res) >= -1e-9 * res.snr


def test_unit_rank_exact():
    cfg = SystemConfig(M=4, N=32, gamma_fixed=1.0, direct_link=False)
    ch = los_channel(cfg)
    for res in (digital_beamformer(ch), analog_beamformer(ch)):
        assert abs(bound_gap(ch, 1.0, res)) <= 1e-6 * res.snr
    rep = bound_report(ch)
    assert rep.exactness_flag is Exactness.UNIT_RANK_EXACT
    assert rep.capacity_ub == pytest.approx(math.log2(1 + rep.snr_ub))


def test_report_flags():
    ch = los_channel(SystemConfig(M=4, N=8, mu_fixed=1.0, theta_bd_d=0.3, theta_bd_i=1.2))
    assert bound_report(ch).exactness_flag is Exactness.LOS_TIGHT
    ch = draw_channel(SystemConfig(M=4, N=8).with_k(1.0), trial_rng(0, 0))
    assert bound_report(ch).exactness_flag is Exactness.GENERIC


def test_gap_shrinks_with_k():
    def mean_rel_gap(K):
        cfg = SystemConfig(M=4, N=16, gamma_fixed=1.0, direct_link=False).with_k(K)
        gaps = []
        for t in range(1000):
            ch = draw_channel(cfg, trial_rng(3, t))
            ub = snr_upper_bound(ch)
            gaps.append((ub - analog_beamformer(ch).snr) / ub)
        return np.mean(gaps)

    assert mean_rel_gap(10.0) < mean_rel_gap(1.0)


def test_bound_monotone_in_rows():
    rng = np.random.default_rng(0)
    E = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    vals = [snr_upper_bound(ChannelRealization.from_matrix(E[:n])) for n in range(1, 7)]
    assert np.all(np.diff(vals) >= 0)

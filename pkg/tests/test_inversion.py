import math

import numpy as np
import pytest
from oracles import crandn
from scipy import stats

from risbeam.config import SystemConfig
from risbeam.inversion import EulerSettings, InversionError, invert_laplace, invert_mgf_to_cdf
from risbeam.mgf import MgfEvaluator


def test_exponential():
    y = np.linspace(0.1, 5.0, 60)
    err = np.abs(invert_mgf_to_cdf(lambda s: 1 / (1 + s), y) - (1 - np.exp(-y)))
    assert err.max() < 1e-4


@pytest.mark.parametrize("dist,mgf", [
    (stats.expon(), lambda s: 1 / (1 + s)),
    (stats.gamma(2.0), lambda s: (1 + s) ** -2.0),
    (stats.gamma(3.5, scale=0.4), lambda s: (1 + 0.4 * s) ** -3.5),
])
def test_central_mass_round_trip(dist, mgf):
    y = np.linspace(dist.ppf(0.005), dist.ppf(0.995), 150)
    assert np.max(np.abs(invert_mgf_to_cdf(mgf, y) - dist.cdf(y))) < 1e-3


def test_deterministic_step():
    c = 10.0
    mgf = lambda s: np.exp(-c * s)  # noqa: E731
    lo, hi = invert_mgf_to_cdf(mgf, np.array([0.9 * c, 1.1 * c]), strict=False)
    assert lo < 0.05 and hi > 0.95


def test_scalar_in_scalar_out():
    v = invert_mgf_to_cdf(lambda s: 1 / (1 + s), 1.0)
    assert isinstance(v, float)
    assert v == pytest.approx(1 - math.exp(-1), abs=1e-7)


def test_laplace_inverse_of_sine():
    # L{sin t} = 1 / (s^2 + 1)
    t = np.linspace(0.2, 6.0, 30)
    np.testing.assert_allclose(invert_laplace(lambda s: 1 / (s * s + 1), t), np.sin(t), atol=1e-6)


def test_divergence_is_reported():
    settings = EulerSettings(n=3, m=1, tol=1e-12, max_doublings=0)
    with pytest.raises(InversionError) as err:
        invert_mgf_to_cdf(lambda s: np.exp(-10.0 * s), np.array([9.0]), settings)
    e = err.value
    assert e.y == 9.0 and e.terms == 4 and e.disagreement > 1e-12


def test_rejects_non_positive_points():
    with pytest.raises(ValueError):
        invert_mgf_to_cdf(lambda s: 1 / (1 + s), np.array([0.0, 1.0]))


def test_envelope_sum_cdf_against_monte_carlo():
    cfg = SystemConfig(M=2, N=2).with_k(5.0)
    kl, kn = cfg.kappas(5.0)
    rng = np.random.default_rng(17)
    H = kl + kn * crandn(rng, 10 ** 6, 2, 2)
    h = kl + kn * crandn(rng, 10 ** 6, 2)
    Y = np.sort(np.sum(np.abs(h) * np.abs(H).sum(-1), -1))
    y = np.quantile(Y, np.linspace(0.01, 0.99, 15))
    emp = np.searchsorted(Y, y, side="right") / Y.size
    ana = invert_mgf_to_cdf(MgfEvaluator.from_config(cfg), y)
    assert np.max(np.abs(ana - emp)) < 0.01

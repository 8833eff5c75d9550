import math

import numpy as np
import pytest
from oracles import ks_upper_bound
from scipy import special, stats

from risbeam.specfun import (
    RicianParams,
    _marcum_quadrature,
    _marcum_series,
    bessel_i0,
    bessel_i0e,
    marcum_p1,
    marcum_q1,
    rician_cdf,
    rician_pdf,
)


def i0_series(x, terms=50):
    total, term = 1.0, 1.0
    for k in range(1, terms):
        term *= (x / 2) ** 2 / (k * k)
        total += term
    return total


def marcum_bessel_series(a, b, tol=1e-14):
    # Q1(a, b) = exp(-(a^2+b^2)/2) * sum_{k>=0} (a/b)^k I_k(ab)
    total, k = 0.0, 0
    while True:
        term = (a / b) ** k * special.iv(k, a * b)
        total += term
        if k > 5 and term * math.exp(-(a * a + b * b) / 2) < tol:
            break
        k += 1
    return total * math.exp(-(a * a + b * b) / 2)


def ncx2_q1(a, b):
    return stats.ncx2.sf(b * b, 2, a * a)


class TestBessel:
    def test_known_values(self):
        assert bessel_i0(0.0) == 1.0
        assert bessel_i0(1.0) == pytest.approx(1.2660658777520084, rel=1e-15)
        assert bessel_i0(1.0) == pytest.approx(i0_series(1.0), rel=1e-15)

    @pytest.mark.parametrize("x", [0.1, 2.5, 10.0, 29.9, 30.1, 55.0])
    def test_series_oracle(self, x):
        assert bessel_i0(x) == pytest.approx(i0_series(x, 120), rel=1e-12)

    def test_against_scipy_grid(self):
        x = np.concatenate([np.linspace(0, 60, 601), np.geomspace(60, 1e5, 200)])
        assert np.max(np.abs(bessel_i0e(x) / special.i0e(x) - 1)) < 1e-12

    def test_scaled_asymptote(self):
        x = 700.0
        assert bessel_i0e(x) * math.sqrt(2 * math.pi * x) == pytest.approx(1.0, rel=1e-3)

    def test_even(self):
        x = np.linspace(0.1, 40, 50)
        np.testing.assert_array_equal(bessel_i0e(-x), bessel_i0e(x))


class TestMarcum:
    def test_b_zero(self):
        for a in (0.0, 0.5, 3.0, 40.0):
            assert marcum_q1(a, 0.0) == 1.0

    @pytest.mark.parametrize("b", [0.1, 1.0, 2.5, 6.0])
    def test_rayleigh_tail(self, b):
        assert marcum_q1(0.0, b) == pytest.approx(math.exp(-b * b / 2), rel=1e-13)

    def test_bessel_series_oracle(self):
        assert marcum_q1(1.0, 2.0) == pytest.approx(marcum_bessel_series(1.0, 2.0), rel=1e-12)

    @pytest.mark.parametrize("a,b", [(0.3, 0.2), (2.0, 1.0), (4.0, 5.0), (10.0, 9.0), (20.0, 21.0),
                                     (35.0, 30.0), (50.0, 52.0), (3.0, 14.0)])
    def test_against_ncx2(self, a, b):
        q = marcum_q1(a, b)
        assert q == pytest.approx(ncx2_q1(a, b), rel=1e-9, abs=1e-300)

    def test_crossover_agreement(self):
        # both regimes evaluated on either side of a*b = 30
        for a, b in [(5.0, 5.9), (5.0, 6.1), (6.0, 5.0), (3.0, 10.0), (10.0, 3.0)]:
            qs, ps = _marcum_series(a, b)
            qq, pq = _marcum_quadrature(a, b)
            assert qs == pytest.approx(qq, rel=1e-10, abs=1e-15)
            assert ps == pytest.approx(pq, rel=1e-10, abs=1e-15)

    def test_complement(self):
        rng = np.random.default_rng(3)
        for a, b in rng.uniform(0, 20, size=(200, 2)):
            assert marcum_q1(a, b) + marcum_p1(a, b) == pytest.approx(1.0, abs=1e-13)

    def test_monotone_and_bounded(self):
        b = np.linspace(0, 12, 400)
        for a in (0.0, 1.0, 4.0, 8.0):
            q = marcum_q1(a, b)
            assert np.all((q >= 0) & (q <= 1))
            assert np.all(np.diff(q) <= 1e-15)
        a = np.linspace(0, 12, 400)
        q = marcum_q1(a, 5.0)
        assert np.all(np.diff(q) >= -1e-15)


class TestRician:
    def test_k_factor_convention(self):
        p = RicianParams.from_k_factor(5.0)
        kl, kn = math.sqrt(5 / 6), math.sqrt(1 / 6)
        assert p.nu == pytest.approx(kl) and p.sigma == pytest.approx(kn / math.sqrt(2))
        assert RicianParams.from_k_factor(math.inf).degenerate

    def test_rayleigh_cdf(self):
        p = RicianParams(0.0, 0.7)
        x = np.linspace(0, 4, 50)
        np.testing.assert_allclose(rician_cdf(x, p), 1 - np.exp(-x ** 2 / (2 * 0.49)), atol=1e-14)

    def test_matches_scipy_rice(self):
        p = RicianParams(1.3, 0.4)
        x = np.linspace(0.01, 4, 100)
        np.testing.assert_allclose(rician_pdf(x, p), stats.rice.pdf(x, 1.3 / 0.4, scale=0.4), rtol=1e-10)
        np.testing.assert_allclose(rician_cdf(x, p), stats.rice.cdf(x, 1.3 / 0.4, scale=0.4), atol=1e-12)

    def test_near_step(self):
        p = RicianParams(0.9, 1e-6)
        assert rician_cdf(0.9 - 1e-4, p) < 1e-12
        assert rician_cdf(0.9 + 1e-4, p) > 1 - 1e-12

    def test_limits(self):
        p = RicianParams(0.8, 0.3)
        assert rician_cdf(0.0, p) == 0.0
        assert rician_cdf(50.0, p) == pytest.approx(1.0, abs=1e-15)

    def test_pdf_normalized(self):
        p = RicianParams.from_k_factor(3.0)
        x, w = np.polynomial.legendre.leggauss(200)
        lo, hi = p.support
        x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        assert np.sum(0.5 * (hi - lo) * w * rician_pdf(x, p)) == pytest.approx(1.0, abs=1e-8)

    def test_pdf_is_cdf_derivative(self):
        p = RicianParams.from_k_factor(2.0)
        x = np.geomspace(1e-2, 3.0, 60)
        h = 1e-5
        fd = (rician_cdf(x + h, p) - rician_cdf(x - h, p)) / (2 * h)
        np.testing.assert_allclose(fd, rician_pdf(x, p), atol=1e-6)

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            rician_cdf(1.0, RicianParams(1.0, 0.0))
        with pytest.raises(ValueError):
            rician_pdf(1.0, RicianParams(1.0, 0.0))

    def test_ks_against_generative_model(self):
        K = 5.0
        kl, kn = math.sqrt(K / (1 + K)), math.sqrt(1 / (1 + K))
        rng = np.random.default_rng(11)
        z = (rng.standard_normal(10 ** 6) + 1j * rng.standard_normal(10 ** 6)) / math.sqrt(2)
        r = np.abs(kl + kn * z)
        p = RicianParams.from_k_factor(K)
        assert ks_upper_bound(r, lambda x: rician_cdf(x, p)) < 0.005

    def test_ks_bound_is_conservative(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(20000) ** 2
        exact = stats.kstest(x, stats.chi2(1).cdf).statistic
        assert ks_upper_bound(x, stats.chi2(1).cdf) >= exact

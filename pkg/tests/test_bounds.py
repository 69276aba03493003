import math
from fractions import Fraction

import numpy as np
import pytest

from ordstat.bounds import (
    alpha_beta,
    covariance_bound_check,
    hdg_discrete_bound,
    is_lattice,
    rational_p_reduction_bound,
    rational_R,
    sigma_from_deltas,
    sigma_terrell_hahn,
    terrell_discrete_bound,
    tsm_bound,
)
from ordstat.errors import (
    DimensionError,
    DomainError,
    ExactInputRequired,
    InvalidIndicesError,
    InvalidSizeError,
    UnsupportedPopulationError,
)
from ordstat.hahn import build_basis, fourier_coefficients
from ordstat.populations import lattice_population, make_population, order_stat_joint


def brute_sigmas(N, g):
    joint = order_stat_joint(lattice_population(N), 1, 2, 2)
    return joint.moments(g, g)


def test_bound_values():
    assert terrell_discrete_bound(2) == pytest.approx(1 / 3, abs=1e-15)
    assert terrell_discrete_bound(3) == pytest.approx(8 / 19, abs=1e-15)
    assert terrell_discrete_bound(3, exact=True) == Fraction(8, 19)
    with pytest.raises(InvalidSizeError):
        terrell_discrete_bound(1)


def test_bound_monotone_exact():
    prev = terrell_discrete_bound(2, exact=True)
    for N in range(3, 400):
        cur = terrell_discrete_bound(N, exact=True)
        assert prev < cur < Fraction(1, 2)
        prev = cur


def test_tsm():
    assert tsm_bound(1, 2, 2) == pytest.approx(0.5)
    assert tsm_bound(1, 3, 3) == pytest.approx(1 / 3)
    with pytest.raises(InvalidIndicesError):
        tsm_bound(2, 2, 3)


def test_rational_R_examples():
    assert rational_R(0, 7) == 1
    assert rational_R(1, 1) == 1
    assert rational_R(1, 9) == Fraction(19, 27)
    assert rational_R(2, 9) == Fraction(15, 19)
    assert rational_R(3, 9) == 1
    assert rational_R(1, 5.0) == pytest.approx((2 + 1 / 5) / 3, abs=1e-15)
    with pytest.raises(DomainError):
        rational_R(3, 8)


@pytest.mark.parametrize("k", [1, 2, 5, 17, 50])
def test_rational_R_bracketing(k):
    for x in np.geomspace(k * k * (1 + 1e-9), 1e8, 60):
        r = rational_R(k, float(x))
        assert (k + 1) / (2 * k + 1) < r < 1


def test_alpha_beta_small():
    ab = alpha_beta(3, exact=True)
    assert ab.alpha == [Fraction(19, 27), Fraction(15, 19)]
    assert ab.beta == [Fraction(4, 19), 0]
    assert ab.alpha[0] * ab.beta[0] == Fraction(4, 27)


@pytest.mark.parametrize("N", [2, 3, 7, 20])
def test_alpha_beta_identities_exact(N):
    ab = alpha_beta(N, exact=True)
    a, b = ab.alpha, ab.beta
    assert a[0] == (2 + Fraction(1, N * N)) / 3
    assert b[-1] == 0
    for k in range(2, N):
        assert a[k - 1] + b[k - 2] == 1
        assert a[k - 1] > b[k - 2] > 0
    for k in range(1, N):
        assert a[k - 1] * b[k - 1] == Fraction((k + 1) ** 2, (2 * k + 1) * (2 * k + 3)) * (1 - Fraction((k + 1) ** 2, N * N))


@pytest.mark.parametrize("N", [5, 50, 100])
def test_alpha_beta_identities_float(N):
    ab = alpha_beta(N)
    a, b = ab.alpha, ab.beta
    k = np.arange(1, N)
    assert a[0] == pytest.approx((2 + N**-2) / 3, abs=1e-15)
    assert abs(b[-1]) < 1e-12
    np.testing.assert_allclose(a[1:] + b[:-1], 1.0, atol=1e-12)
    prod = (k + 1) ** 2 / ((2 * k + 1) * (2 * k + 3)) * (1 - (k + 1) ** 2 / N**2)
    np.testing.assert_allclose(a * b, prod, rtol=1e-12, atol=1e-14)
    assert np.all(a[1:] > b[:-1]) and np.all(b[:-1] > 0)


def test_sigma_identity_example():
    N = 3
    d = fourier_coefficients(build_basis(N), np.arange(1.0, 4.0))
    s = sigma_from_deltas(N, d)
    assert s.sigma1_sq == pytest.approx(38 / 81, abs=1e-14)
    assert s.sigma2_sq == pytest.approx(38 / 81, abs=1e-14)
    assert s.sigma12 == pytest.approx(16 / 81, abs=1e-14)
    assert sigma_from_deltas(4, [3.0, 0, 0, 0]) == (0.0, 0.0, 0.0)
    with pytest.raises(DimensionError):
        sigma_from_deltas(4, [1.0, 2.0])


def test_hahn_sigmas_against_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(120):
        N = int(rng.integers(2, 31))
        g = rng.normal(size=N)
        d = fourier_coefficients(build_basis(N), g)
        s = sigma_from_deltas(N, d)
        v1, v2, cov = brute_sigmas(N, g)
        np.testing.assert_allclose([s.sigma1_sq, s.sigma2_sq, s.sigma12], [v1, v2, cov], rtol=1e-9, atol=1e-12)
        assert s.sigma12 == pytest.approx(d[1] ** 2 / 3 * (1 - N**-2), rel=1e-12, abs=1e-15)
        assert s.sigma12**2 <= s.sigma1_sq * s.sigma2_sq * (1 + 1e-12)


def test_sum_of_squares_matches_hahn_sigmas():
    rng = np.random.default_rng(2)
    for _ in range(120):
        N = int(rng.integers(2, 51))
        d = rng.normal(size=N)
        s = sigma_from_deltas(N, d)
        s1, s2 = sigma_terrell_hahn(N, d)
        assert s1 == pytest.approx(s.sigma1_sq, rel=1e-10, abs=1e-12)
        assert s2 == pytest.approx(s.sigma2_sq, rel=1e-10, abs=1e-12)
    with pytest.raises(DimensionError):
        sigma_terrell_hahn(5, np.ones(5), alpha_beta(4))


def test_cauchy_chain_gives_bound():
    rng = np.random.default_rng(3)
    for _ in range(100):
        N = int(rng.integers(2, 25))
        d = rng.normal(size=N)
        linear = rng.random() < 0.3
        if linear:
            d[2:] = 0.0
        s = sigma_from_deltas(N, d)
        a1 = (2 + N**-2) / 3
        assert s.sigma1_sq * s.sigma2_sq >= (a1 * d[1] ** 2) ** 2 * (1 - 1e-12)
        rho = s.sigma12 / math.sqrt(s.sigma1_sq * s.sigma2_sq)
        bound = terrell_discrete_bound(N)
        assert rho <= bound + 1e-12
        if linear:
            assert abs(rho - bound) <= 1e-10
        elif N > 2 and np.any(np.abs(d[2:]) > 1e-3):
            assert bound - rho > 1e-10


def test_hdg_and_covariance_fixture():
    pop = make_population([1, 2, 4])
    cov = covariance_bound_check(pop)
    assert cov.cov == pytest.approx(4 / 9, abs=1e-14)
    assert cov.cov <= cov.bound
    hdg = hdg_discrete_bound(pop)
    assert hdg.bound == pytest.approx(7 / 3 + math.sqrt(112 / 243), abs=1e-12)
    assert 3.0 <= hdg.bound and not hdg.attained


@pytest.mark.parametrize("N", [2, 3, 6, 11])
def test_hdg_attained_on_lattice(N):
    pop = make_population(-4.0 + 0.7 * np.arange(N))
    assert is_lattice(pop)
    assert hdg_discrete_bound(pop).attained
    c = covariance_bound_check(pop)
    assert abs(c.cov - c.bound) <= 1e-10 * pop.variance


def test_hdg_with_ties():
    pop = make_population([1, 1, 2, 5])
    assert not is_lattice(pop)
    c = covariance_bound_check(pop)
    assert c.cov < c.bound
    assert not hdg_discrete_bound(pop).attained


def test_hdg_rejects_weighted():
    with pytest.raises(UnsupportedPopulationError):
        hdg_discrete_bound(make_population([1, 2, 3], [0.2, 0.3, 0.5]))


def test_rational_p_reduction():
    assert rational_p_reduction_bound(["1/4", "1/2", "1/4"]) == Fraction(5, 11)
    assert rational_p_reduction_bound([Fraction(1, 16), Fraction(3, 8), Fraction(9, 16)]) == Fraction(85, 171)
    with pytest.raises(ExactInputRequired):
        rational_p_reduction_bound([0.25, 0.5, 0.25])
    with pytest.raises(DomainError):
        rational_p_reduction_bound(["1/2", "1/3"])

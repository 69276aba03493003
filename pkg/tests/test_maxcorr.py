import math

import numpy as np
import pytest
import sympy

from ordstat.bounds import terrell_discrete_bound
from ordstat.errors import InvalidSizeError, UndefinedCorrelationError
from ordstat.maxcorr import (
    ace_maximal_correlation,
    maximal_correlation,
    perturbation_check,
    renyi_functional,
    w_polynomial,
    w_polynomial_unshifted,
)
from ordstat.populations import (
    OrderStatJoint,
    conditional_expectation,
    correlation,
    lattice_population,
    make_population,
    order_stat_joint,
)

S19 = math.sqrt(19)


def lattice_joint(N, i=1, j=2, n=2):
    return order_stat_joint(lattice_population(N), i, j, n)


def test_three_point_value_and_extremizers():
    res = maximal_correlation(lattice_joint(3))
    assert res.R == pytest.approx((2 + S19) / 15, abs=1e-12)
    xs = [-math.sqrt(2 / 5 + 13 / (10 * S19)), math.sqrt(1 - 2 / S19), math.sqrt(4 - 1 / (2 * S19))]
    ys = [-math.sqrt(4 - 1 / (2 * S19)), -math.sqrt(1 - 2 / S19), math.sqrt(2 / 5 + 13 / (10 * S19))]
    np.testing.assert_allclose(res.f_opt, xs, atol=1e-10)
    np.testing.assert_allclose(res.g_opt, ys, atol=1e-10)
    assert res.unique


@pytest.mark.parametrize("N", [3, 6, 12])
def test_certificate_and_standardization(N):
    joint = lattice_joint(N)
    res = maximal_correlation(joint)
    y, h = conditional_expectation(joint, res.f_opt)
    np.testing.assert_allclose(res.g_opt, h / res.R, atol=1e-10)
    assert joint.px @ res.f_opt == pytest.approx(0.0, abs=1e-12)
    assert joint.px @ res.f_opt**2 == pytest.approx(1.0, abs=1e-12)
    assert joint.py @ res.g_opt**2 == pytest.approx(1.0, abs=1e-10)
    assert correlation(joint, res.f_opt, res.g_opt) == pytest.approx(res.R, abs=1e-10)
    assert res.singular_values[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("N", [2, 3, 5, 10, 25])
def test_ace_matches_svd(N):
    joint = lattice_joint(N)
    assert ace_maximal_correlation(joint) == pytest.approx(maximal_correlation(joint).R, abs=1e-8)


def test_renyi_dominated_by_R():
    joint = lattice_joint(7)
    res = maximal_correlation(joint)
    assert renyi_functional(joint, res.f_opt) == pytest.approx(res.R**2, abs=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert renyi_functional(joint, rng.normal(size=7)) <= res.R**2 + 1e-12
    with pytest.raises(UndefinedCorrelationError):
        renyi_functional(joint, np.ones(7))


def test_transpose_symmetry():
    joint = order_stat_joint(make_population([0, 1, 3, 4], [0.1, 0.4, 0.2, 0.3]), 1, 3, 3)
    flipped = OrderStatJoint(joint.j, joint.i, joint.n, joint.y_support, joint.x_support, joint.pmf.T.copy())
    assert maximal_correlation(flipped).R == pytest.approx(maximal_correlation(joint).R, abs=1e-12)


@pytest.mark.parametrize("N", [2, 3, 8, 30])
def test_sandwich(N):
    R = maximal_correlation(lattice_joint(N)).R
    rho = correlation(lattice_joint(N))
    assert rho == pytest.approx(terrell_discrete_bound(N), abs=1e-10)
    assert rho - 1e-12 <= R < 0.5
    if N >= 3:
        assert R > rho


def test_two_point_is_trivial():
    # with two support points every transform is affine
    joint = order_stat_joint(make_population([0, 1]), 1, 2, 2)
    assert maximal_correlation(joint).R == pytest.approx(1 / 3, abs=1e-14)
    with pytest.raises(UndefinedCorrelationError):
        maximal_correlation(order_stat_joint(make_population([2.0]), 1, 2, 2))


@pytest.mark.parametrize("N", [3, 4, 10, 50])
def test_perturbation(N):
    pc = perturbation_check(N)
    assert pc.passes and pc.rho0 > pc.rhoN


def test_perturbation_errors():
    with pytest.raises(InvalidSizeError):
        perturbation_check(2)


def test_w_polynomial_matches_symbolic_shift():
    N, n = sympy.symbols("N n")
    unshifted = sum(c * N**k for k, c in enumerate([-666, -1332, 846, 2952, 1077, -828, -934, -792, -485, 0, 34, 0, 20]))
    shifted = sympy.Poly(sympy.expand(unshifted.subs(N, n + 3)), n)
    coeffs = [int(c) for c in reversed(shifted.all_coeffs())]
    assert all(c > 0 for c in coeffs)
    for k in range(0, 30):
        assert w_polynomial(k) == sum(c * k**p for p, c in enumerate(coeffs))
    assert w_polynomial(0) == 7010100
    assert w_polynomial_unshifted(3) == 7010100


@pytest.mark.parametrize("N", [3, 5, 10])
def test_w_is_the_scaled_gap(N):
    pc = perturbation_check(N)
    x = np.arange(1, N + 1, dtype=float)
    joint = lattice_joint(N)
    f0, g0 = x - 3 * x**2 / N**3, x + 3 * x**2 / N**3
    v1, v2, _ = joint.moments(f0, g0)
    scale = 3600 * v1 * v2 * N**14 * (2 * N**2 + 1) ** 2 / ((N**2 - 1) ** 2 * (N**2 - 4))
    assert scale * (pc.rho0**2 - pc.rhoN**2) == pytest.approx(w_polynomial_unshifted(N), rel=1e-6)

"""Maximal correlation of a finite bivariate law via the SVD of its kernel.

For a joint pmf P with marginals p, q the kernel

    K[a, b] = P[a, b] / sqrt(p[a] q[b])

has top singular value 1 (constants).  The second singular value is the
maximal correlation R, and its singular vectors divided by sqrt(p), sqrt(q)
are the optimal transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bounds import terrell_discrete_bound
from .errors import InvalidSizeError, UndefinedCorrelationError
from .populations import OrderStatJoint, correlation, lattice_population, order_stat_joint

__all__ = [
    "MaxCorrResult",
    "maximal_correlation",
    "renyi_functional",
    "ace_maximal_correlation",
    "perturbation_check",
    "w_polynomial",
    "w_polynomial_unshifted",
]

DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class MaxCorrResult:
    """Optimal pair on the positive-mass support points.

    ``x_support``/``y_support`` list the points where ``f_opt``/``g_opt`` are
    defined.  ``unique`` is False when the second and third singular values
    are within ``DEGENERACY_GAP``, in which case the extremizers are not
    determined.
    """

    R: float
    f_opt: np.ndarray
    g_opt: np.ndarray
    singular_values: np.ndarray
    x_support: np.ndarray
    y_support: np.ndarray
    unique: bool = True


def _restricted(joint: OrderStatJoint):
    px, py = joint.px, joint.py
    rows, cols = px > 0, py > 0
    if rows.sum() < 2 or cols.sum() < 2:
        raise UndefinedCorrelationError("maximal correlation needs two non-degenerate marginals")
    return joint.pmf[np.ix_(rows, cols)], px[rows], py[cols], rows, cols


def maximal_correlation(joint: OrderStatJoint) -> MaxCorrResult:
    P, p, q, rows, cols = _restricted(joint)
    K = P / np.sqrt(np.outer(p, q))
    U, s, Vt = np.linalg.svd(K)
    R = float(s[1])
    f = U[:, 1] / np.sqrt(p)
    if f[-1] < 0:
        f = -f
    # g = E[f(X) | Y] / R fixes the sign of g relative to f
    g = (f @ P) / q / R if R > 0 else Vt[1] / np.sqrt(q)
    unique = s.size < 3 or s[1] - s[2] > DEGENERACY_GAP
    return MaxCorrResult(
        R=R,
        f_opt=f,
        g_opt=g,
        singular_values=s,
        x_support=joint.x_support[rows],
        y_support=joint.y_support[cols],
        unique=bool(unique),
    )


def renyi_functional(joint: OrderStatJoint, f) -> float:
    """E[(E[f(X) | Y])^2] after standardizing f under the X marginal."""
    P, p, q, rows, _ = _restricted(joint)
    fx = np.asarray(f, dtype=float)
    if fx.shape == joint.x_support.shape:
        fx = fx[rows]
    scale = max(float(np.max(fx**2)), 1e-300)
    fx = fx - p @ fx
    var = p @ fx**2
    if var <= 1e-24 * scale:
        raise UndefinedCorrelationError("f is constant on the support of X")
    fx = fx / math.sqrt(var)
    h = (fx @ P) / q
    return float(q @ h**2)


def ace_maximal_correlation(
    joint: OrderStatJoint, iters: int = 10_000, tol: float = 1e-14, seed: int = 0
) -> float:
    """Maximal correlation by alternating conditional expectations.

    Independent of the SVD path; used to cross-check it.  Converges
    geometrically at rate (s_3 / s_2)^2.
    """
    P, p, q, _, _ = _restricted(joint)
    f = np.random.default_rng(seed).normal(size=p.size)
    r = 0.0
    for _ in range(iters):
        f = f - p @ f
        f = f / math.sqrt(p @ f**2)
        g = (f @ P) / q  # E[f(X) | Y]
        g = g - q @ g
        r_new = math.sqrt(q @ g**2)
        f = (P @ g) / p  # E[g(Y) | X]
        if abs(r_new - r) < tol:
            return r_new
        r = r_new
    return r


class PerturbationCheck(NamedTuple):
    rho0: float
    rhoN: float
    passes: bool


def perturbation_check(N: int) -> PerturbationCheck:
    """corr(f0(U_{1:2}), g0(U_{2:2})) with f0(x) = x - 3x^2/N^3, g0(y) = y + 3y^2/N^3.

    Exceeding the linear value shows that the maximal correlation of the
    ordered pair is strictly larger than the bound for same-g transforms.
    """
    if isinstance(N, bool) or int(N) != N or N < 3:
        raise InvalidSizeError(f"perturbation check needs N >= 3, got {N!r}")
    x = np.arange(1, N + 1, dtype=float)
    f0 = x - 3 * x**2 / N**3
    g0 = x + 3 * x**2 / N**3
    if not (np.all(np.diff(f0) > 0) and np.all(np.diff(g0) > 0)):
        raise AssertionError("perturbed transforms are not strictly increasing")
    joint = order_stat_joint(lattice_population(N), 1, 2, 2)
    rho0 = correlation(joint, f0, g0)
    rhoN = terrell_discrete_bound(N)
    return PerturbationCheck(rho0, rhoN, rho0 > rhoN)


# -666 - 1332 N + ... + 20 N^12, lowest degree first
_UNSHIFTED = (-666, -1332, 846, 2952, 1077, -828, -934, -792, -485, 0, 34, 0, 20)
# the same polynomial in n = N - 3
_SHIFTED = (
    7010100, 35183016, 72768816, 86119956, 66523137, 35823456,
    13910474, 3946848, 815185, 119820, 11914, 720, 20,
)


def _horner(coeffs, t):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def w_polynomial_unshifted(N):
    """Scaled gap (rho0^2 - rhoN^2) as a polynomial in N (see perturbation_check)."""
    return _horner(_UNSHIFTED, N)


def w_polynomial(n: int):
    """The scaled gap written in n = N - 3; every coefficient is positive.

    Cross-checks itself against the unshifted form at N = n + 3.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    value = _horner(_SHIFTED, n)
    unshifted = w_polynomial_unshifted(n + 3)
    if value != unshifted and not math.isclose(value, unshifted, rel_tol=1e-12):
        raise AssertionError(f"shifted and unshifted forms disagree at n={n}: {value} vs {unshifted}")
    return value

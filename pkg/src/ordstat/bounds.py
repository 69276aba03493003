"""Closed-form bounds and Hahn-coefficient representations for ordered pairs.

Notation: U is uniform on {1, ..., N}, g a grid function with Hahn
coefficients ``delta`` (index 0 is the mean and is ignored here), and

    sigma1^2 = Var g(U_{1:2}),  sigma2^2 = Var g(U_{2:2}),
    sigma12  = Cov(g(U_{1:2}), g(U_{2:2})).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    ExactInputRequired,
    InvalidIndicesError,
    InvalidSizeError,
    UndefinedCorrelationError,
    UnsupportedPopulationError,
)
from .hahn import lambda_coefficients
from .populations import Population, order_stat_joint

__all__ = [
    "AlphaBetaSeq",
    "SigmaTriple",
    "terrell_discrete_bound",
    "tsm_bound",
    "rational_R",
    "alpha_beta",
    "sigma_from_deltas",
    "sigma_terrell_hahn",
    "hdg_discrete_bound",
    "covariance_bound_check",
    "is_lattice",
    "rational_p_reduction_bound",
]

EQUALITY_RTOL = 1e-10


def _check_N(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise InvalidSizeError(f"N must be an integer >= 2, got {N!r}")
    return int(N)


def terrell_discrete_bound(N: int, exact: bool = False) -> float | Fraction:
    """(1 - N^-2) / (2 + N^-2), written as (N^2 - 1) / (2 N^2 + 1)."""
    N = _check_N(N)
    if exact:
        return Fraction(N * N - 1, 2 * N * N + 1)
    return (N * N - 1) / (2 * N * N + 1)


def tsm_bound(i: int, j: int, n: int) -> float:
    """sqrt(i (n+1-j) / (j (n+1-i))), valid for any law and 1 <= i < j <= n."""
    if not 1 <= i < j <= n:
        raise InvalidIndicesError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    return math.sqrt(i * (n + 1 - j) / (j * (n + 1 - i)))


def rational_R(k: int, x):
    """R_0 = 1, R_k(x) = 1 - k^2 (1 - k^2/x) / ((4k^2 - 1) R_{k-1}(x)).

    Defined for x >= k^2 (then every earlier R is positive). Pass a
    :class:`~fractions.Fraction` (or int) with ``x`` to stay exact.
    """
    if k < 0:
        raise DomainError("k must be non-negative")
    if k > 0 and x < k * k:
        raise DomainError(f"R_{k} needs x >= {k * k}, got {x}")
    exact = isinstance(x, (int, Fraction)) and not isinstance(x, bool)
    x = Fraction(x) if exact else float(x)
    one = Fraction(1) if exact else 1.0
    r = one
    for q in range(1, k + 1):
        r = one - q * q * (one - q * q / x) / ((4 * q * q - 1) * r)
    return r


class AlphaBetaSeq(NamedTuple):
    """alpha[k-1] = alpha_k, beta[k-1] = beta_k for k = 1..N-1."""

    N: int
    alpha: np.ndarray | list
    beta: np.ndarray | list


def alpha_beta(N: int, exact: bool = False) -> AlphaBetaSeq:
    """alpha_k = R_k(N^2), beta_k = 1 - R_{k+1}(N^2); one pass of the recurrence."""
    N = _check_N(N)
    x = Fraction(N * N) if exact else float(N * N)
    one = Fraction(1) if exact else 1.0
    R = [one]
    for q in range(1, N + 1):
        R.append(one - q * q * (one - q * q / x) / ((4 * q * q - 1) * R[-1]))
    alpha = R[1:N]
    beta = [one - r for r in R[2 : N + 1]]
    if exact:
        return AlphaBetaSeq(N, alpha, beta)
    return AlphaBetaSeq(N, np.array(alpha), np.array(beta))


class SigmaTriple(NamedTuple):
    sigma1_sq: float
    sigma2_sq: float
    sigma12: float


def _deltas(N: int, deltas) -> np.ndarray:
    d = np.asarray(deltas, dtype=float)
    if d.shape != (N,):
        raise DimensionError(f"expected {N} Hahn coefficients delta_0..delta_{N - 1}, got shape {d.shape}")
    return d


def sigma_from_deltas(N: int, deltas) -> SigmaTriple:
    """Variances and covariance of g(U_{1:2}), g(U_{2:2}) from Hahn coefficients."""
    N = _check_N(N)
    d = _deltas(N, deltas)[1:]  # delta_1..delta_{N-1}
    lam = lambda_coefficients(N)[1 : N - 1]  # lambda_1..lambda_{N-2}
    cross = 2.0 / N * float(np.sum(lam * d[:-1] * d[1:]))
    s12 = float(d[0] ** 2 / 3.0 * (1.0 - 1.0 / N**2))
    base = float(d @ d) - s12
    return SigmaTriple(base - cross, base + cross, s12)


def sigma_terrell_hahn(N: int, deltas, ab: AlphaBetaSeq | None = None) -> tuple[float, float]:
    """Sum-of-squares form of (sigma1^2, sigma2^2), with delta_N := 0."""
    N = _check_N(N)
    ab = alpha_beta(N) if ab is None else ab
    if ab.N != N:
        raise DimensionError(f"alpha/beta sequence is for N={ab.N}, not {N}")
    d = np.append(_deltas(N, deltas)[1:], 0.0)
    a = np.sqrt(np.asarray(ab.alpha, dtype=float))
    b = np.sqrt(np.asarray(ab.beta, dtype=float))
    lo = a * d[:-1] - b * d[1:]
    hi = a * d[:-1] + b * d[1:]
    return float(lo @ lo), float(hi @ hi)


def is_lattice(pop: Population, rtol: float = 1e-9) -> bool:
    """True when the N-point list is an arithmetic progression with no ties.

    Diagnostic only.
    """
    values = pop.raw_values() if pop.is_uniform else pop.support
    if len(values) < 2 or len(np.unique(values)) != len(values):
        return False
    gaps = np.diff(values)
    return bool(np.all(np.abs(gaps - gaps.mean()) <= rtol * abs(gaps.mean())))


def _require_uniform(pop: Population) -> int:
    if not pop.is_uniform:
        raise UnsupportedPopulationError(
            "only unweighted N-point populations (ties allowed) are supported"
        )
    if pop.m < 2:
        raise UndefinedCorrelationError("population is degenerate")
    return pop.raw_size


class HDGBound(NamedTuple):
    bound: float
    attained: bool


class CovarianceCheck(NamedTuple):
    cov: float
    bound: float


def _max_pair_moments(pop: Population) -> tuple[float, float]:
    joint = order_stat_joint(pop, 1, 2, 2)
    e_max = float(joint.py @ joint.y_support)
    _, _, cov = joint.moments()
    return e_max, cov


def hdg_discrete_bound(pop: Population) -> HDGBound:
    """E X_{2:2} <= mu + sqrt(1 - N^-2) sigma / sqrt(3) for N-point populations."""
    N = _require_uniform(pop)
    mu, sigma = pop.mean, math.sqrt(pop.variance)
    bound = mu + math.sqrt(1.0 - N**-2) * sigma / math.sqrt(3.0)
    e_max, _ = _max_pair_moments(pop)
    attained = abs(bound - e_max) <= EQUALITY_RTOL * max(sigma, abs(mu), 1e-300)
    return HDGBound(bound, bool(attained))


def covariance_bound_check(pop: Population) -> CovarianceCheck:
    """Cov(X_{1:2}, X_{2:2}) alongside its ceiling sigma^2 (1 - N^-2) / 3."""
    N = _require_uniform(pop)
    _, cov = _max_pair_moments(pop)
    return CovarianceCheck(cov, pop.variance * (1.0 - N**-2) / 3.0)


def rational_p_reduction_bound(p: Sequence) -> Fraction:
    """(1 - M^-2) / (2 + M^-2) where M is the common denominator of ``p``.

    Entries must be exact rationals (ints, Fractions or strings like "3/8").
    Usually far from sharp.
    """
    ps = []
    for v in p:
        if isinstance(v, (float, np.floating)):
            raise ExactInputRequired("probabilities must be exact rationals, not floats")
        try:
            ps.append(Fraction(v))
        except (TypeError, ValueError) as exc:
            raise ExactInputRequired(f"cannot read {v!r} as a rational") from exc
    if not ps or any(q <= 0 for q in ps) or sum(ps) != 1:
        raise DomainError("probabilities must be positive and sum to exactly 1")
    M = math.lcm(*(q.denominator for q in ps))
    return Fraction(M * M - 1, 2 * M * M + 1)

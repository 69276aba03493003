"""Finite populations and the exact law of a pair of order statistics.

Everything here is brute force or exact combinatorics; the analytic formulas
elsewhere in the package are checked against these results.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    DimensionError,
    InvalidIndicesError,
    UndefinedCorrelationError,
)

__all__ = [
    "Population",
    "OrderStatJoint",
    "make_population",
    "lattice_population",
    "order_stat_joint",
    "order_stat_pmf",
    "exact_joint_pmf",
    "correlation",
    "rho_order_stats",
    "conditional_expectation",
    "enumeration_budget",
]

DEFAULT_ENUM_BUDGET = 10**7
_CHUNK = 1 << 20


def enumeration_budget() -> int:
    """Outcome budget for brute-force enumeration (env ``ORDSTAT_ENUM_BUDGET``)."""
    raw = os.environ.get("ORDSTAT_ENUM_BUDGET")
    if raw is None:
        return DEFAULT_ENUM_BUDGET
    return int(float(raw))


@dataclass(frozen=True)
class Population:
    """A discrete law with strictly increasing ``support`` and positive ``probs``.

    ``raw_size`` is the list length N when the population came from an
    unweighted N-point list (uniform in the sense of tied counts k_j / N).
    """

    support: np.ndarray
    probs: np.ndarray
    raw_size: int | None = None

    @property
    def m(self) -> int:
        return len(self.support)

    @property
    def mean(self) -> float:
        return float(self.probs @ self.support)

    @property
    def variance(self) -> float:
        return float(self.probs @ (self.support - self.mean) ** 2)

    @property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probs)

    @property
    def is_uniform(self) -> bool:
        return self.raw_size is not None

    @property
    def counts(self) -> np.ndarray | None:
        if self.raw_size is None:
            return None
        return np.rint(self.probs * self.raw_size).astype(int)

    def raw_values(self) -> np.ndarray:
        """The sorted N-point list (ties repeated); only for uniform populations."""
        if self.raw_size is None:
            raise ValueError("population was built from explicit weights")
        return np.repeat(self.support, self.counts)


def make_population(values: Sequence[float], probs: Sequence[float] | None = None) -> Population:
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("population needs at least one value")
    if not np.all(np.isfinite(vals)):
        raise ValueError("population values must be finite")

    if probs is None:
        support, counts = np.unique(vals, return_counts=True)
        return Population(support, counts / vals.size, raw_size=int(vals.size))

    w = np.asarray([float(p) for p in probs], dtype=float)
    if w.shape != vals.shape:
        raise DimensionError(f"{vals.size} values but {w.size} probabilities")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("probabilities must be finite and non-negative")
    total = w.sum()
    if total <= 0:
        raise ValueError("probabilities sum to zero")
    w = w / total
    support, inverse = np.unique(vals, return_inverse=True)
    merged = np.zeros(support.size)
    np.add.at(merged, inverse, w)
    keep = merged > 0
    return Population(support[keep], merged[keep])


def lattice_population(N: int, probs: Sequence[float] | None = None) -> Population:
    """{1, ..., N}, uniform unless ``probs`` is given."""
    return make_population(np.arange(1, N + 1), probs)


@dataclass(frozen=True)
class OrderStatJoint:
    """``pmf[a, b] = Pr(X_{i:n} = x_support[a], X_{j:n} = y_support[b])``."""

    i: int
    j: int
    n: int
    x_support: np.ndarray
    y_support: np.ndarray
    pmf: np.ndarray

    @property
    def px(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.pmf.sum(axis=0)

    def moments(self, f=None, g=None) -> tuple[float, float, float]:
        """(Var f(X), Var g(Y), Cov(f(X), g(Y))); identity maps by default."""
        fx = self.x_support if f is None else _on_support(f, self.x_support)
        gy = self.y_support if g is None else _on_support(g, self.y_support)
        px, py = self.px, self.py
        mf, mg = px @ fx, py @ gy
        fc, gc = fx - mf, gy - mg
        return float(px @ fc**2), float(py @ gc**2), float(fc @ self.pmf @ gc)


def _on_support(f, support: np.ndarray) -> np.ndarray:
    if callable(f):
        return np.asarray([f(v) for v in support], dtype=float)
    arr = np.asarray(f, dtype=float)
    if arr.shape != support.shape:
        raise DimensionError(f"function has {arr.size} values for {support.size} support points")
    return arr


def _check_indices(i: int, j: int, n: int) -> None:
    if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise InvalidIndicesError("order-statistic indices must be integers")
    if not 1 <= i < j <= n:
        raise InvalidIndicesError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")


def _enumerate(probs: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    m = probs.size
    out = np.zeros(m * m)
    total = m**n
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        digits = np.stack(np.unravel_index(flat, (m,) * n), axis=1)
        weight = np.prod(probs[digits], axis=1)
        digits.sort(axis=1)
        # bincount sums in index order, so the result is deterministic
        out += np.bincount(digits[:, i - 1] * m + digits[:, j - 1], weights=weight, minlength=m * m)
    return out.reshape(m, m)


def _joint_cdf(u, v, i: int, j: int, n: int):
    """Pr(X_{i:n} <= a, X_{j:n} <= b) given u = F(a) <= v = F(b).

    r points fall at or below a, s at or below b: the event is r >= i, s >= j.
    Works with floats or Fractions.
    """
    total = 0
    for s in range(j, n + 1):
        for r in range(i, s + 1):
            coeff = math.factorial(n) // (math.factorial(r) * math.factorial(s - r) * math.factorial(n - s))
            total += coeff * u**r * (v - u) ** (s - r) * (1 - v) ** (n - s)
    return total


def _single_cdf(u, k: int, n: int):
    return sum(math.comb(n, s) * u**s * (1 - u) ** (n - s) for s in range(k, n + 1))


def _by_formula(cdf: Sequence, i: int, j: int, n: int, exact: bool) -> list[list]:
    m = len(cdf)
    zero = Fraction(0) if exact else 0.0
    F = [zero] + list(cdf)
    # H[a][b] over the padded grid, a, b = 0..m
    H = [[zero] * (m + 1) for _ in range(m + 1)]
    for a in range(m + 1):
        for b in range(m + 1):
            if a >= b:
                H[a][b] = _single_cdf(F[b], j, n)
            else:
                H[a][b] = _joint_cdf(F[a], F[b], i, j, n)
    return [
        [H[a + 1][b + 1] - H[a][b + 1] - H[a + 1][b] + H[a][b] if a <= b else zero for b in range(m)]
        for a in range(m)
    ]


def order_stat_joint(
    pop: Population,
    i: int,
    j: int,
    n: int,
    method: str = "auto",
    budget: int | None = None,
) -> OrderStatJoint:
    """Exact joint pmf of (X_{i:n}, X_{j:n}) for an i.i.d. sample from ``pop``.

    ``method`` is ``"enumerate"`` (all m**n ordered samples), ``"formula"``
    (inclusion-exclusion on the joint CDF) or ``"auto"``, which enumerates
    whenever m**n fits in the budget.
    """
    _check_indices(i, j, n)
    budget = enumeration_budget() if budget is None else budget
    m = pop.m
    fits = n * math.log(m) <= math.log(budget) + 1e-12 if m > 1 else True
    if method == "auto":
        method = "enumerate" if fits else "formula"
    if method == "enumerate":
        if not fits:
            raise BudgetExceededError(f"{m}**{n} outcomes exceed the enumeration budget {budget}")
        pmf = _enumerate(pop.probs, i, j, n)
    elif method == "formula":
        cdf = pop.cdf
        cdf[-1] = 1.0
        pmf = np.array(_by_formula(cdf.tolist(), i, j, n, exact=False), dtype=float)
        pmf[pmf < 0] = 0.0  # rounding residue below the diagonal-adjacent cells
    else:
        raise ValueError(f"unknown method {method!r}")
    return OrderStatJoint(i, j, n, pop.support, pop.support, pmf)


def exact_joint_pmf(probs: Sequence[Fraction], i: int, j: int, n: int) -> list[list[Fraction]]:
    """Rational joint pmf from rational probabilities (formula path, exact)."""
    _check_indices(i, j, n)
    ps = [Fraction(p) for p in probs]
    cdf, acc = [], Fraction(0)
    for p in ps:
        acc += p
        cdf.append(acc)
    return _by_formula(cdf, i, j, n, exact=True)


def order_stat_pmf(pop: Population, k: int, n: int) -> np.ndarray:
    """Marginal pmf of X_{k:n}."""
    if not 1 <= k <= n:
        raise InvalidIndicesError(f"need 1 <= k <= n, got k={k}, n={n}")
    G = np.array([_single_cdf(u, k, n) for u in np.concatenate([[0.0], pop.cdf])])
    G[-1] = 1.0
    return np.diff(G)


def correlation(joint: OrderStatJoint, f=None, g=None) -> float:
    """Pearson correlation of f(X_{i:n}) and g(X_{j:n}) from the exact table."""
    fx = joint.x_support if f is None else _on_support(f, joint.x_support)
    gy = joint.y_support if g is None else _on_support(g, joint.y_support)
    vx, vy, cov = joint.moments(fx, gy)
    if vx <= 1e-24 * max(np.max(fx**2), 1e-300) or vy <= 1e-24 * max(np.max(gy**2), 1e-300):
        raise UndefinedCorrelationError("a transformed order statistic is degenerate")
    return cov / math.sqrt(vx * vy)


def rho_order_stats(pop: Population, i: int, j: int, n: int) -> float:
    if pop.m < 2:
        raise UndefinedCorrelationError("population is degenerate (single support point)")
    return correlation(order_stat_joint(pop, i, j, n))


def conditional_expectation(joint: OrderStatJoint, g) -> tuple[np.ndarray, np.ndarray]:
    """E[g(X_{i:n}) | X_{j:n} = y] for each y with positive probability.

    Returns ``(y_values, h_values)``; zero-probability rows are dropped.
    """
    gx = _on_support(g, joint.x_support)
    py = joint.py
    keep = py > 0
    h = (gx @ joint.pmf)[keep] / py[keep]
    return joint.y_support[keep], h

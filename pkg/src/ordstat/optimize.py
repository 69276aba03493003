"""Searches for the extremes that have no closed form.

* the quartic ``f(x) = (lam + |x|^2)^2 - (g1 x_2 + g2 x_2 x_3 + ...)^2`` whose
  global minimum at 0 is equivalent to the discrete Terrell bound;
* sup over a single transform g of corr(g(X_{i:n}), g(X_{j:n})), with or
  without a monotonicity constraint on g.

Both are multi-start local searches from a deterministic seed set, so their
answers are certified lower bounds (upper bounds for the quartic), not
proofs of optimality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .bounds import terrell_discrete_bound
from .errors import DimensionError, InvalidSizeError, UndefinedCorrelationError
from .hahn import build_basis, lambda_coefficients
from .populations import Population, correlation, lattice_population, order_stat_joint

__all__ = [
    "QuarticProblem",
    "QuarticOutcome",
    "SearchResult",
    "default_quartic_params",
    "quartic_value",
    "quartic_gradient",
    "quartic_hessian",
    "minimize_quartic",
    "inverse_rho_squared",
    "search_same_g",
]

MIN_AT_ZERO = "min_at_zero"
INTERIOR_MIN_POSITIVE = "interior_min_positive"
MIN_NEGATIVE = "min_negative"
UNBOUNDED_BELOW = "unbounded_below"

DEFAULT_RESTARTS = 64


@dataclass(frozen=True)
class QuarticProblem:
    """Variables x_2..x_n (``n - 1`` of them) and weights gamma_1..gamma_{n-1}."""

    n: int
    lam: float
    gamma: tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSizeError("n must be at least 1")
        if len(self.gamma) != max(self.n - 1, 0):
            raise DimensionError(f"need {self.n - 1} gamma weights, got {len(self.gamma)}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("lambda must be positive and finite")
        if any(not (g > 0 and math.isfinite(g)) for g in self.gamma):
            raise ValueError("gamma weights must be positive and finite")

    @property
    def dim(self) -> int:
        return self.n - 1


@dataclass
class QuarticOutcome:
    kind: str
    minimizers: list[np.ndarray]
    min_value: float | None
    converged: bool = True
    restarts: int = 0
    # direction along which f -> -inf, when unbounded
    ray: np.ndarray | None = None


def default_quartic_params(N: int) -> QuarticProblem:
    """The instance equivalent to the ordered-pair bound on {1..N}."""
    if N < 2:
        raise InvalidSizeError("N must be >= 2")
    lam_k = lambda_coefficients(N)[1 : N - 1]  # lambda_1..lambda_{N-2}
    return QuarticProblem(n=N - 1, lam=(2 + N**-2) / 3, gamma=tuple(2 * lam_k / N))


def _pieces(p: QuarticProblem, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dim,):
        raise DimensionError(f"expected {p.dim} coordinates, got shape {x.shape}")
    gam = np.asarray(p.gamma)
    S = p.lam + x @ x
    T = gam[0] * x[0] + np.sum(gam[1:] * x[:-1] * x[1:]) if p.dim else 0.0
    M = np.zeros((p.dim, p.dim))
    if p.dim > 1:
        idx = np.arange(p.dim - 1)
        M[idx, idx + 1] = gam[1:]
        M[idx + 1, idx] = gam[1:]
    dT = M @ x
    if p.dim:
        dT[0] += gam[0]
    return x, S, T, dT, M


def quartic_value(p: QuarticProblem, x) -> float:
    _, S, T, _, _ = _pieces(p, x)
    return float(S * S - T * T)


def quartic_gradient(p: QuarticProblem, x) -> np.ndarray:
    x, S, T, dT, _ = _pieces(p, x)
    return 4 * S * x - 2 * T * dT


def quartic_hessian(p: QuarticProblem, x) -> np.ndarray:
    x, S, T, dT, M = _pieces(p, x)
    return 4 * S * np.eye(p.dim) + 8 * np.outer(x, x) - 2 * np.outer(dT, dT) - 2 * T * M


def inverse_rho_squared(N: int, deltas) -> float:
    """(1/rho)^2 for g(U_{1:2}), g(U_{2:2}) written through the quartic's weights.

    ``deltas`` are the Hahn coefficients delta_0..delta_{N-1}; returns inf
    when delta_1 = 0.
    """
    d = np.asarray(deltas, dtype=float)[1:]
    if d.size != N - 1:
        raise DimensionError(f"expected {N} coefficients")
    if d[0] == 0:
        return math.inf
    p = default_quartic_params(N)
    gam = np.asarray(p.gamma)
    head = p.lam * d[0] ** 2 + d[1:] @ d[1:]
    cross = np.sum(gam * d[:-1] * d[1:])
    return 9 * N**4 / (N * N - 1) ** 2 * (head**2 - cross**2) / d[0] ** 4


def _quartic_direction_check(p: QuarticProblem, tol: float = 1e-10):
    """Decide unboundedness from the top-degree terms.

    The quartic part is |x|^4 - (x' M x)^2 with M having gamma_2.. on the
    off-diagonals (halved).  If the spectral radius of M/2 exceeds 1 the
    quartic part is negative somewhere; if it equals 1 the cubic term
    -2 t^3 (gamma_1 v_1)(v' M v / 2) along a unit eigenvector v decides.
    Returns ``(unbounded, ray, borderline)``.
    """
    if p.dim == 0:
        return False, None, False
    _, _, _, _, M = _pieces(p, np.zeros(p.dim))
    w, V = np.linalg.eigh(M / 2)
    rho = np.max(np.abs(w))
    top = np.argmax(np.abs(w))
    if rho > 1 + tol:
        return True, V[:, top], False
    if rho < 1 - tol:
        return False, None, False
    for k in np.flatnonzero(np.abs(np.abs(w) - 1) <= tol):
        same = np.flatnonzero(np.abs(w - w[k]) <= tol)
        # component of e_1 inside this eigenspace
        v = V[:, same] @ V[0, same]
        if np.linalg.norm(v) > tol:
            v = v / np.linalg.norm(v)
            cubic = -2 * p.gamma[0] * v[0] * w[k]
            return True, (v if cubic < 0 else -v), True
    return False, None, True


def _newton_polish(p: QuarticProblem, x: np.ndarray, steps: int = 20) -> np.ndarray:
    for _ in range(steps):
        g = quartic_gradient(p, x)
        if np.linalg.norm(g) < 1e-14:
            break
        try:
            step = np.linalg.solve(quartic_hessian(p, x), g)
        except np.linalg.LinAlgError:
            break
        trial = x - step
        if np.linalg.norm(quartic_gradient(p, trial)) >= np.linalg.norm(g):
            break
        x = trial
    return x


def minimize_quartic(
    p: QuarticProblem, restarts: int = DEFAULT_RESTARTS, seed: int = 0
) -> QuarticOutcome:
    lam2 = p.lam**2
    if p.dim == 0:
        return QuarticOutcome(MIN_AT_ZERO, [np.zeros(0)], lam2, True, 0)

    unbounded, ray, borderline = _quartic_direction_check(p)
    if unbounded:
        vals = [quartic_value(p, t * ray) for t in (1e2, 1e3, 1e4)]
        if vals[0] > vals[1] > vals[2] and vals[2] < 0:
            return QuarticOutcome(UNBOUNDED_BELOW, [], None, True, 0, ray=ray)

    rng = np.random.default_rng(seed)
    scale = math.sqrt(p.lam)
    starts = [np.zeros(p.dim)]
    for k in range(p.dim):
        for s in (1.0, -1.0):
            e = np.zeros(p.dim)
            e[k] = s * scale
            starts.append(e)
    while len(starts) < restarts:
        starts.append(rng.normal(size=p.dim) * scale * rng.choice([0.5, 1.0, 2.0]))
    starts = starts[: max(restarts, 1 + 2 * p.dim)]

    found = []
    for x0 in starts:
        res = minimize(
            lambda x: quartic_value(p, x),
            x0,
            jac=lambda x: quartic_gradient(p, x),
            method="BFGS",
            options={"gtol": 1e-11, "maxiter": 2000},
        )
        x = _newton_polish(p, res.x)
        found.append((quartic_value(p, x), x))

    best = min(v for v, _ in found)
    tol = 1e-9 * max(1.0, lam2)
    grad_ok = True
    minimizers: list[np.ndarray] = []
    for v, x in sorted(found, key=lambda t: t[0]):
        if v > best + tol:
            break
        if all(np.linalg.norm(x - y) > 1e-6 for y in minimizers):
            minimizers.append(x)
            grad_ok &= bool(np.linalg.norm(quartic_gradient(p, x)) < 1e-8)

    if best >= lam2 - tol:
        return QuarticOutcome(MIN_AT_ZERO, [np.zeros(p.dim)], lam2, grad_ok and not borderline, len(starts))
    kind = MIN_NEGATIVE if best < 0 else INTERIOR_MIN_POSITIVE
    return QuarticOutcome(kind, minimizers, float(best), grad_ok and not borderline, len(starts))


@dataclass
class SearchResult:
    """Best corr(g(X_{i:n}), g(X_{j:n})) found; ``g_star`` is on the population support.

    ``g_star`` is standardized (zero mean, unit variance under the law of
    X_{i:n}) and oriented so that g_star[-1] >= g_star[0].
    """

    value: float
    g_star: np.ndarray
    restarts: int
    converged: bool
    monotone_constraint: bool
    seed: int = 0
    baseline: float = 0.0  # correlation of the identity transform
    support: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _moment_matrices(joint):
    px, py, P = joint.px, joint.py, joint.pmf
    A = np.diag(px) - np.outer(px, px)
    B = np.diag(py) - np.outer(py, py)
    C0 = P - np.outer(px, py)
    return A, B, (C0 + C0.T) / 2, px


def _corr_and_grad(g, A, B, C):
    Ag, Bg, Cg = A @ g, B @ g, C @ g
    a, b, c = g @ Ag, g @ Bg, g @ Cg
    if a <= 1e-14 or b <= 1e-14:
        return 0.0, np.zeros_like(g)
    r = c / math.sqrt(a * b)
    return r, 2 * Cg / math.sqrt(a * b) - r * (Ag / a + Bg / b)


def _search_starts(support, m, monotone, restarts, rng):
    starts = [np.asarray(support, dtype=float)]
    basis = build_basis(m) if m >= 2 else None
    for k in (1, 2, 3):
        if basis is not None and k < m:
            starts.append(basis.psi[k].copy())
    while len(starts) < restarts:
        if monotone:
            starts.append(np.concatenate([[0.0], np.cumsum(rng.exponential(size=m - 1))]))
        else:
            starts.append(rng.normal(size=m))
    return starts[: max(restarts, 1)]


def search_same_g(
    pop: Population | int,
    i: int,
    j: int,
    n: int,
    monotone: bool = False,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> SearchResult:
    """Maximize corr(g(X_{i:n}), g(X_{j:n})) over non-constant g.

    ``pop`` may be an int N (uniform on {1..N}).  With ``monotone=True`` g is
    parameterized as cumulative sums of squared increments, so every
    candidate is nondecreasing.
    """
    if isinstance(pop, (int, np.integer)):
        pop = lattice_population(int(pop))
    if pop.m < 2:
        raise UndefinedCorrelationError("support needs at least two points")
    joint = order_stat_joint(pop, i, j, n)
    A, B, C, px = _moment_matrices(joint)
    m = pop.m
    rng = np.random.default_rng(seed)

    if monotone:
        def to_g(s):
            return np.concatenate([[0.0], np.cumsum(s * s)])

        def objective(s):
            g = to_g(s)
            r, dg = _corr_and_grad(g, A, B, C)
            a = g @ A @ g
            dg_total = -dg + 4 * (a - 1) * (A @ g)
            # g_k depends on s_1..s_{k-1}
            tail = np.cumsum(dg_total[::-1])[::-1][1:]
            return -r + (a - 1) ** 2, 2 * s * tail

        def from_g(g):
            return np.sqrt(np.abs(np.diff(g)))
    else:
        def to_g(s):
            return s

        def objective(g):
            r, dg = _corr_and_grad(g, A, B, C)
            a, mean = g @ A @ g, px @ g
            return -r + (a - 1) ** 2 + mean**2, -dg + 4 * (a - 1) * (A @ g) + 2 * mean * px

        def from_g(g):
            return g

    baseline = correlation(joint, pop.support, pop.support)
    best_val, best_g, best_ok = baseline, np.asarray(pop.support, dtype=float), True
    starts = _search_starts(pop.support, m, monotone, restarts, rng)
    for g0 in starts:
        g0 = g0 - px @ g0
        sd = math.sqrt(max(g0 @ A @ g0, 1e-300))
        x0 = from_g(g0 / sd)
        if np.all(np.abs(to_g(x0) - to_g(x0)[0]) < 1e-12):
            continue
        res = minimize(objective, x0, jac=True, method="BFGS", options={"gtol": 1e-10, "maxiter": 5000})
        g = to_g(res.x)
        try:
            val = correlation(joint, g, g)
        except UndefinedCorrelationError:
            continue
        # strict improvement only, so ties keep the earliest start
        if val > best_val + 1e-14:
            best_val, best_g, best_ok = val, g, bool(res.success)

    g = best_g - px @ best_g
    g = g / math.sqrt(g @ A @ g)
    if g[-1] < g[0]:
        g = -g
    value = correlation(joint, g, g)
    return SearchResult(
        value=value,
        g_star=g,
        restarts=len(starts),
        converged=best_ok,
        monotone_constraint=monotone,
        seed=seed,
        baseline=baseline,
        support=pop.support,
    )

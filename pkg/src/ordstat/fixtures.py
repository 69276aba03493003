"""Published reference values, each paired with the computation that should reproduce it.

Used by ``ordstat verify``; every entry compares an observed number to an
expected one at a fixed absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bounds, maxcorr, optimize
from .populations import conditional_expectation, lattice_population, make_population, order_stat_joint, rho_order_stats


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float

    def as_dict(self) -> dict:
        return asdict(self)


def check(name: str, observed, expected, tolerance: float) -> Check:
    observed, expected = float(observed), float(expected)
    ok = math.isfinite(observed) and abs(observed - expected) <= tolerance
    return Check(name, bool(ok), observed, expected, tolerance)


def check_true(name: str, condition: bool, observed=1.0) -> Check:
    return Check(name, bool(condition), float(observed), 1.0 if condition else float(observed), 0.0)


def _sqrt19() -> float:
    return math.sqrt(19.0)


def _fixtures() -> list[Callable[[], list[Check]]]:
    def terrell():
        return [
            check("bound(N=2) = 1/3", bounds.terrell_discrete_bound(2), 1 / 3, 1e-14),
            check("bound(N=3) = 8/19", bounds.terrell_discrete_bound(3), 8 / 19, 1e-14),
            check("bound(N=1e6) -> 1/2", bounds.terrell_discrete_bound(10**6), 0.5, 1e-11),
            check("two-point population rho = 1/3", rho_order_stats(make_population([0.0, 7.5]), 1, 2, 2), 1 / 3, 1e-12),
            check("lattice {1,2,3} rho = 8/19", rho_order_stats(lattice_population(3), 1, 2, 2), 8 / 19, 1e-12),
            check("TSM(1,2:2) = 1/2", bounds.tsm_bound(1, 2, 2), 0.5, 1e-15),
        ]

    def regression():
        out = []
        for N in (2, 5, 9):
            joint = order_stat_joint(lattice_population(N), 1, 2, 2)
            y, h = conditional_expectation(joint, joint.x_support)
            out.append(check(f"E(U1:2 | U2:2=y) = y^2/(2y-1), N={N}", np.max(np.abs(h - y**2 / (2 * y - 1))), 0.0, 1e-12))
            out.append(check(f"Pr(U2:2=y) = (2y-1)/N^2, N={N}", np.max(np.abs(joint.py - (2 * y - 1) / N**2)), 0.0, 1e-14))
        return out

    def recurrence():
        ab = bounds.alpha_beta(7, exact=True)
        return [
            check("R_1(x) = (2 + 1/x)/3 at x=5", bounds.rational_R(1, 5.0), (2 + 1 / 5) / 3, 1e-15),
            check("R_1(1) = 1", bounds.rational_R(1, 1), 1.0, 0.0),
            check("alpha_1 = (2 + N^-2)/3, N=7", ab.alpha[0], (2 + Fraction(1, 49)) / 3, 0.0),
            check("beta_{N-1} = 0, N=7", ab.beta[-1], 0.0, 0.0),
            check("alpha_1 beta_1 = (4/15)(1-4/9), N=3", bounds.alpha_beta(3).alpha[0] * bounds.alpha_beta(3).beta[0], Fraction(4, 15) * Fraction(5, 9), 1e-15),
        ]

    def extremal_lattice():
        lattice = make_population(5.0 + 2.0 * math.sqrt(3) * (2 * np.arange(1, 7) - 7) / math.sqrt(35))
        return [
            check_true("HDG bound attained on lattice x_k = mu + sigma sqrt3 (2k-N-1)/sqrt(N^2-1)", bounds.hdg_discrete_bound(lattice).attained),
        ]

    def quartic():
        p = lambda g: optimize.QuarticProblem(3, 11 / 16, g)
        r6 = math.sqrt(6.0)
        pos = optimize.minimize_quartic(p((4 / 3, 2 / 3)))
        x = max(pos.minimizers, key=lambda v: v[0]) if pos.minimizers else np.full(2, np.nan)
        return [
            check("lambda = alpha_1 (N=4)", optimize.default_quartic_params(4).lam, bounds.alpha_beta(4).alpha[0], 1e-15),
            check_true("quartic gamma=(1,1): minimum at 0", optimize.minimize_quartic(p((1, 1))).kind == optimize.MIN_AT_ZERO),
            check_true("quartic gamma=(4/3,2/3): positive interior minimum", pos.kind == optimize.INTERIOR_MIN_POSITIVE),
            check("quartic gamma=(4/3,2/3): x2 = sqrt(66 sqrt6 - 81)/16", x[0], math.sqrt(66 * r6 - 81) / 16, 1e-6),
            check("quartic gamma=(4/3,2/3): x3 = (3 sqrt6 - 5)/16", x[1], (3 * r6 - 5) / 16, 1e-6),
            check_true("quartic gamma=(1,8/5): negative minimum", optimize.minimize_quartic(p((1, 8 / 5))).kind == optimize.MIN_NEGATIVE),
            check_true("quartic gamma=(1,2): unbounded below", optimize.minimize_quartic(p((1, 2))).kind == optimize.UNBOUNDED_BELOW),
        ] + [
            check_true(f"default quartic N={N}: minimum at 0", optimize.minimize_quartic(optimize.default_quartic_params(N)).kind == optimize.MIN_AT_ZERO)
            for N in range(2, 13)
        ]

    def three_point():
        s = _sqrt19()
        res = maxcorr.maximal_correlation(order_stat_joint(lattice_population(3), 1, 2, 2))
        xs = [-math.sqrt(2 / 5 + 13 / (10 * s)), math.sqrt(1 - 2 / s), math.sqrt(4 - 1 / (2 * s))]
        ys = [-math.sqrt(4 - 1 / (2 * s)), -math.sqrt(1 - 2 / s), math.sqrt(2 / 5 + 13 / (10 * s))]
        out = [check("R_3 = (2 + sqrt19)/15", res.R, (2 + s) / 15, 1e-9)]
        out += [check(f"x{k + 1}* (N=3)", res.f_opt[k], xs[k], 1e-8) for k in range(3)]
        out += [check(f"y{k + 1}* (N=3)", res.g_opt[k], ys[k], 1e-8) for k in range(3)]
        out.append(check("w(0) = 7010100", maxcorr.w_polynomial(0), 7010100, 0.0))
        for N in (3, 10):
            pc = maxcorr.perturbation_check(N)
            out.append(check_true(f"perturbation f0/g0 beats rho_N, N={N}", pc.passes, pc.rho0))
        return out

    def weighted_and_same_g():
        w1 = make_population([1, 2, 3], [0.25, 0.5, 0.25])
        w2 = make_population([1, 2, 3], [1 / 16, 3 / 8, 9 / 16])
        out = [
            check("rho_3 = 9/23 for p=(1/4,1/2,1/4)", rho_order_stats(w1, 1, 2, 2), 9 / 23, 1e-12),
            check("R'_3 = 9/23 for p=(1/4,1/2,1/4)", optimize.search_same_g(w1, 1, 2, 2).value, 9 / 23, 1e-6),
            check("rho_3 = 169 sqrt3/sqrt655027 for p=(1/16,3/8,9/16)", rho_order_stats(w2, 1, 2, 2), 169 * math.sqrt(3) / math.sqrt(655027), 1e-12),
            check("R'_3 ~ 0.362354 for p=(1/16,3/8,9/16)", optimize.search_same_g(w2, 1, 2, 2).value, 0.362354, 1e-6),
            check("reduction bound p=(1/4,1/2,1/4) = 5/11", bounds.rational_p_reduction_bound(["1/4", "1/2", "1/4"]), 5 / 11, 0.0),
            check("reduction bound p=(1/16,3/8,9/16) = 85/171", bounds.rational_p_reduction_bound(["1/16", "3/8", "9/16"]), 85 / 171, 0.0),
        ]
        for N in range(3, 9):
            out.append(
                check(
                    f"R'_N(1,3:3) = (3-7N^-2)/(9-N^-2), N={N}",
                    optimize.search_same_g(N, 1, 3, 3).value,
                    (3 - 7 / N**2) / (9 - 1 / N**2),
                    1e-6,
                )
            )
        return out

    return [terrell, regression, recurrence, extremal_lattice, quartic, three_point, weighted_and_same_g]


def run_fixtures() -> list[Check]:
    checks: list[Check] = []
    for group in _fixtures():
        checks.extend(group())
    return checks

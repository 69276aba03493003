"""Orthonormal Hahn (discrete Chebyshev) polynomials on the grid {1, ..., N}.

The inner product is the one of the discrete uniform law,
``<u, v> = (1/N) * sum_x u(x) v(x)``, and every polynomial has a positive
leading coefficient.  The polynomials satisfy the three-term recurrence

    b_{k+1} psi_{k+1}(x) = (x - (N+1)/2) psi_k(x) - b_k psi_{k-1}(x),
    b_{k+1} = lambda_k / 2,

but running it forward loses all accuracy by N ~ 50.  Instead the values are
read off the eigenvectors of the N x N Jacobi matrix of that recurrence: its
eigenvalues are exactly 1..N and the eigenvector for eigenvalue x is
``(psi_0(x), ..., psi_{N-1}(x)) / sqrt(N)``.  The explicit alternating binomial
sum is kept only as an exact-integer oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DimensionError, InvalidIndicesError, InvalidSizeError

__all__ = [
    "HahnBasis",
    "build_basis",
    "leading_coefficients",
    "lambda_coefficients",
    "fourier_coefficients",
    "reconstruct",
    "hahn_explicit",
]

#: Largest N for which the orthonormality tolerance is guaranteed.
STABLE_MAX_N = 200


@dataclass(frozen=True)
class HahnBasis:
    """Evaluated basis: ``psi[k, x-1] = psi_k(x)`` for k, x-1 in 0..N-1.

    ``A[k]`` and ``B[k]`` are the coefficients of x^k and x^(k-1) in psi_k
    (``B[0] = 0``); ``lam[k-1]`` is lambda_k for k = 1..N-1, so the last
    entry is zero.
    """

    N: int
    psi: np.ndarray
    A: np.ndarray
    B: np.ndarray
    lam: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.N + 1, dtype=float)

    def gram(self) -> np.ndarray:
        return self.psi @ self.psi.T / self.N


def _check_size(N: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise InvalidSizeError(f"grid size must be an integer >= 2, got {N!r}")
    return int(N)


def lambda_coefficients(N: int) -> np.ndarray:
    """lambda_k = (k+1) sqrt((N^2-(k+1)^2) / ((2k+1)(2k+3))) for k = 0..N-1.

    Index 0 is included because lambda_0 / 2 = 1 / A_1 starts the recurrence.
    """
    N = _check_size(N)
    k = np.arange(N, dtype=float)
    return (k + 1) * np.sqrt((N * N - (k + 1) ** 2) / ((2 * k + 1) * (2 * k + 3)))


def _log_leading(N: int, k: int) -> float:
    # log A_k = 0.5 log N - log k! + 0.5 log C(2k,k) - 0.5 log C(N+k, 2k+1)
    lc = lambda a, b: math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)
    return (
        0.5 * math.log(N)
        - math.lgamma(k + 1)
        + 0.5 * lc(2 * k, k)
        - 0.5 * lc(N + k, 2 * k + 1)
    )


def leading_coefficients(N: int, k: int) -> tuple[float, float]:
    """Return ``(A_k, B_k)``, the two top monomial coefficients of psi_k."""
    N = _check_size(N)
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= N - 1:
        raise InvalidIndicesError(f"degree k must lie in 1..{N - 1}, got {k!r}")
    k = int(k)
    A = math.exp(_log_leading(N, k))
    # B_k / A_k = -k (N+1) / 2 because C(2k-1, k) = C(2k, k) / 2
    return A, -k * (N + 1) / 2 * A


def build_basis(N: int) -> HahnBasis:
    N = _check_size(N)
    if N > STABLE_MAX_N:
        warnings.warn(
            f"Hahn basis accuracy is only verified for N <= {STABLE_MAX_N}; got N={N}",
            RuntimeWarning,
            stacklevel=2,
        )
    lam = lambda_coefficients(N)
    b = lam / 2.0  # b[k] couples psi_k and psi_{k+1}
    # centred diagonal keeps the spectrum symmetric about zero
    _, vecs = eigh_tridiagonal(np.zeros(N), b[:-1])
    # columns follow eigenvalues -(N-1)/2, ..., (N-1)/2, i.e. x = 1..N
    vecs = vecs * np.sign(vecs[0])
    psi = np.sqrt(N) * vecs
    psi[0] = 1.0

    A = np.empty(N)
    A[0] = 1.0
    for k in range(1, N):
        A[k] = A[k - 1] / b[k - 1]
    B = -np.arange(N) * (N + 1) / 2.0 * A
    return HahnBasis(N=N, psi=psi, A=A, B=B, lam=lam[1:].copy())


def _values(g, N: int | None = None) -> np.ndarray:
    arr = np.asarray(g, dtype=float)
    if arr.ndim != 1:
        raise DimensionError("grid function must be a one-dimensional vector")
    if N is not None and arr.shape[0] != N:
        raise DimensionError(f"expected {N} values, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("grid function has non-finite entries")
    return arr


def fourier_coefficients(basis: HahnBasis, g) -> np.ndarray:
    """delta_k = (1/N) sum_x psi_k(x) g(x), k = 0..N-1."""
    return basis.psi @ _values(g, basis.N) / basis.N


def reconstruct(basis: HahnBasis, delta) -> np.ndarray:
    """Inverse of :func:`fourier_coefficients`: g(x) = sum_k delta_k psi_k(x)."""
    return _values(delta, basis.N) @ basis.psi


def hahn_explicit(N: int, k: int, x: int) -> float:
    """psi_k(x) from the closed binomial sum, with the sum done in exact integers.

    Slow but free of cancellation; intended as a reference for tests.
    """
    N = _check_size(N)
    if not 0 <= k <= N - 1 or not 1 <= x <= N:
        raise InvalidIndicesError(f"need 0 <= k < N and 1 <= x <= N, got k={k}, x={x}")
    total = sum(
        (-1) ** (k - j) * math.comb(k + j, j) * math.comb(N - 1 - j, k - j) * math.comb(x - 1, j)
        for j in range(k + 1)
    )
    log_pref = 0.5 * math.log(N) - 0.5 * math.log(math.comb(N + k, 2 * k + 1)) - 0.5 * math.log(
        math.comb(2 * k, k)
    )
    if total == 0:
        return 0.0
    return math.copysign(math.exp(log_pref + math.log(abs(total))), total)

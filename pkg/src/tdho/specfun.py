"""Special-function kernels for the closed forms: Hermite, Fock radial
polynomials, a terminating 2F1 and Gamma at half integers.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import CapabilityError

N_MAX = 30


def hermite(n: int, z: float, n_max: int = N_MAX) -> float:
    """Physicists' Hermite polynomial H_n(z) by three-term recurrence."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n > n_max:
        raise CapabilityError(f"hermite order {n} exceeds n_max={n_max}")
    h_prev, h = 0.0, 1.0
    for k in range(n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    return h


def fock_radial_coeffs(n: int) -> list[float]:
    """Coefficients c_j of eps^j in sum_k C(n,k) (-1)^k 2^(n-k)/(n-k)! eps^(n-k)."""
    # c_j = C(n, j) (-1)^(n-j) 2^j / j!, exact as a rational before rounding
    return [float(Fraction(math.comb(n, j) * (-1) ** (n - j) * 2**j, math.factorial(j)))
            for j in range(n + 1)]


def fock_radial(n: int, eps):
    """(1/n!) U(-n, 1, 2 eps) = (-1)^n L_n(2 eps).

    Evaluated with the three-term Laguerre recurrence, which keeps full
    relative accuracy near the roots where the expanded k-sum cancels.
    Accepts scalars or arrays.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    x = 2.0 * np.asarray(eps, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    out = -cur if n % 2 else cur
    return float(out) if out.ndim == 0 else out


def _hyp2f1_exact(n: int, m: int) -> Fraction:
    total = Fraction(0)
    term = Fraction(1)
    for k in range(n + 1):
        total += term
        # consecutive-term ratio: (k-n)^2 / ((k-n-m)(k+1)) * 1/2
        if k < n:
            term *= Fraction((k - n) * (k - n), (k - n - m) * (k + 1) * 2)
    return total


def hyp2f1_nn(n: int, m: int) -> float:
    """2F1(-n, -n; -n-m; 1/2), a terminating sum summed in exact rationals."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be >= 0")
    return float(_hyp2f1_exact(n, m))


def _gamma_half_over_sqrt_pi(m: int) -> Fraction:
    # Gamma(m + 1/2) / sqrt(pi) = (2m)! / (4^m m!)
    return Fraction(math.factorial(2 * m), 4**m * math.factorial(m))


def gamma_half(m: int) -> float:
    """Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return float(_gamma_half_over_sqrt_pi(m)) * math.sqrt(math.pi)


def moment_prefactor(n: int, m: int) -> float:
    """2^n (m+n)! / (m! n! sqrt(pi)) Gamma(m + 1/2) 2F1(-n,-n;-n-m;1/2).

    This is <x^(2m)> of Fock level n at unit effective frequency. The
    sqrt(pi) cancels, so the whole product is formed exactly.
    """
    ratio = Fraction(2**n * math.factorial(m + n), math.factorial(m) * math.factorial(n))
    return float(ratio * _gamma_half_over_sqrt_pi(m) * _hyp2f1_exact(n, m))

"""Reduced one-oscillator state of the two-coupled system.

The partial trace over oscillator B gives a Wigner function for A that is a
finite sum of mixed mu-derivatives of

    Omega(mu)^(-1/2) exp(-2 Theta(mu) / Omega(mu))

at mu1 = mu2 = 1, and a purity that is a sum of mixed derivatives of
Gamma(mu, nu)^(-1/2) at the all-ones point. Both are read off truncated
Taylor series (see :mod:`tdho.jet`), either term by term or, after the
substitution mu = (1 - s)/(1 + s), as a single coefficient.

The purity ratios P_{n,m}/P_{0,0} depend on the mixedness z alone and are
polynomials in z with rational coefficients. They are recovered exactly by
running the same jets over ``Fraction`` at rational z and interpolating.

Mode 1 is the centre-of-mass mode (quantum number n), mode 2 the relative
mode (quantum number m).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .ermakov import ModeState
from .errors import CapabilityError
from .jet import Jet

WIGNER_MAX_ORDER = 12
PURITY_MAX_ORDER = 8
Z_NODES = (1 / 20, 1 / 4)
# working precision of the floating jets; the mixed derivatives cancel
# heavily, so the extra bits of extended precision show up in the result
WORK_DTYPE = np.longdouble
AUTO_SWITCH = 6


@dataclass(frozen=True)
class TwoModeContext:
    omega1: float
    omega2: float
    r1: float = 0.0
    r2: float = 0.0

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega2 > 0):
            raise ValueError("effective frequencies must be positive")

    @property
    def D(self) -> float:
        return (self.r1 - self.r2) ** 2

    @classmethod
    def from_states(cls, com: ModeState, rel: ModeState) -> "TwoModeContext":
        return cls(com.omega_eff, rel.omega_eff, com.rate, rel.rate)

    def swapped(self) -> "TwoModeContext":
        return TwoModeContext(self.omega2, self.omega1, self.r2, self.r1)


def mixedness_z(ctx: TwoModeContext) -> float:
    """z = w1 w2 / Omega(1, 1), in (0, 1/4]."""
    w1, w2 = ctx.omega1, ctx.omega2
    return w1 * w2 / (2 * w1 * w2 + w1 * w1 + w2 * w2 + ctx.D)


def context_for_z(z: float) -> TwoModeContext:
    """A static context (w1 = 1, D = 0) with mixedness z; w2 solves z = w2/(1 + w2)^2."""
    if not 0 < z <= 0.25:
        raise ValueError(f"z must lie in (0, 1/4], got {z}")
    w2 = ((1 - 2 * z) + math.sqrt(max(1 - 4 * z, 0.0))) / (2 * z)
    return TwoModeContext(1.0, w2)


def _weights(n: int) -> np.ndarray:
    # C(n, a) 2^a, the coefficient pattern left after the signs cancel
    return np.array([math.comb(n, a) * 2.0**a for a in range(n + 1)])


def _check_orders(n: int, m: int, bound: int, what: str) -> None:
    if min(n, m) < 0:
        raise ValueError("quantum numbers must be >= 0")
    if max(n, m) > bound:
        raise CapabilityError(f"{what} supports n, m <= {bound}")


def _laguerre_args(orders):
    """mu_i = (1 - s_i)/(1 + s_i) and 1/(1 + s_i) as jets in s_i about 0.

    With this substitution e^(-eps) (-1)^n L_n(2 eps) = [s^n] e^(-mu eps)/(1 + s),
    so every weighted sum of mu-derivatives collapses to one Taylor
    coefficient, without the alternating C(n, a) 2^a weights.
    """
    mus, dens = [], []
    for i in range(len(orders)):
        v = Jet.variable(i, orders, dtype=WORK_DTYPE)  # 1 + s_i
        inv = v.reciprocal()
        mus.append((2.0 - v) * inv)
        dens.append(inv)
    return mus, dens


def _omega(ctx: TwoModeContext, mu1: Jet, mu2: Jet) -> Jet:
    w1, w2 = ctx.omega1, ctx.omega2
    return w1 * w2 * (mu1 * mu1 + mu2 * mu2) + (w1 * w1 + w2 * w2 + ctx.D) * (mu1 * mu2)


def _theta(ctx: TwoModeContext, mu1: Jet, mu2: Jet, x1, p1) -> Jet:
    w1, w2, r1, r2 = ctx.omega1, ctx.omega2, ctx.r1, ctx.r2
    q_a = w1 * (w2 * w2 * x1 * x1 + (p1 + r2 * x1) ** 2)
    q_b = w2 * (w1 * w1 * x1 * x1 + (p1 + r1 * x1) ** 2)
    return (mu1 * mu1 * mu2) * q_a + (mu1 * mu2 * mu2) * q_b


def _gaussian_kernel(ctx: TwoModeContext, mu1: Jet, mu2: Jet, x1, p1) -> Jet:
    """Omega^(-1/2) exp(-2 Theta / Omega)."""
    omega = _omega(ctx, mu1, mu2)
    return omega.inv_sqrt() * (_theta(ctx, mu1, mu2, x1, p1) * omega.reciprocal() * -2.0).exp()


def reduced_wigner(ctx: TwoModeContext, n: int, m: int, x1, p1, method: str = "laguerre"):
    """Reduced Wigner function W_{n,m}(x1, p1) of oscillator A.

    Accepts scalars or broadcastable arrays for x1, p1. ``method="derivative"``
    evaluates the weighted sum of mixed mu-derivatives at mu = 1 term by
    term; the default reads the same quantity off a single coefficient after
    the Laguerre substitution and keeps full precision at higher n, m.
    """
    _check_orders(n, m, WIGNER_MAX_ORDER, "reduced_wigner")
    x1, p1 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(p1, float))
    orders = (n, m)
    pref = math.sqrt(4 * ctx.omega1 * ctx.omega2) / math.pi
    if method == "derivative":
        mu1, mu2 = (Jet.variable(i, orders, dtype=WORK_DTYPE) for i in (0, 1))
        F = _gaussian_kernel(ctx, mu1, mu2, x1, p1)
        # (-d/dmu)^a (-d/dmu)^b brings (-1)^(a+b) a! b!, which cancels the
        # 1/(n-k)!(m-l)! and, with (-1)^(k+l), leaves an overall (-1)^(n+m)
        total = np.tensordot(_weights(n), np.tensordot(_weights(m), F.c, axes=(0, 1)),
                             axes=(0, 0))
        out = (-1) ** (n + m) * pref * total
    elif method == "laguerre":
        (mu1, mu2), (d1, d2) = _laguerre_args(orders)
        F = _gaussian_kernel(ctx, mu1, mu2, x1, p1) * (d1 * d2)
        out = pref * F.c[n, m]
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def reduced_wigner_ground(ctx: TwoModeContext, x1, p1):
    """W_{0,0}(x1, p1) written out directly."""
    w1, w2, r1, r2 = ctx.omega1, ctx.omega2, ctx.r1, ctx.r2
    x1, p1 = np.asarray(x1, float), np.asarray(p1, float)
    om = 2 * w1 * w2 + w1 * w1 + w2 * w2 + ctx.D
    th = w1 * (w2 * w2 * x1 * x1 + (p1 + r2 * x1) ** 2) + w2 * (w1 * w1 * x1 * x1 + (p1 + r1 * x1) ** 2)
    out = math.sqrt(4 * w1 * w2 / om) / math.pi * np.exp(-2 * th / om)
    return float(out) if out.ndim == 0 else out


def _gamma(ctx: TwoModeContext, mu1: Jet, mu2: Jet, nu1: Jet, nu2: Jet) -> Jet:
    w1, w2 = ctx.omega1, ctx.omega2
    s1, s2 = mu1 + nu1, mu2 + nu2
    a = mu1 * mu1 * (nu1 * nu1) * (s2 * s2) + mu2 * mu2 * (nu2 * nu2) * (s1 * s1)
    b = mu1 * mu2 * (nu1 * nu2) * (s1 * s2)
    return a * (w1 * w2) + b * (w1 * w1 + w2 * w2 + ctx.D)


def purity(ctx: TwoModeContext, n: int, m: int, method: str = "auto") -> float:
    """Tr rho_A^2 of the reduced state for mode quantum numbers (n, m).

    Both methods read the same quantity off a 4-variable jet. The direct
    derivative sum is the more accurate one at low orders; past n + m = 6
    its alternating weights cost more digits than the Laguerre substitution,
    so ``"auto"`` switches there.
    """
    _check_orders(n, m, PURITY_MAX_ORDER, "purity")
    if method == "auto":
        method = "derivative" if n + m <= AUTO_SWITCH else "laguerre"
    # variable order: mu1, mu2, nu1, nu2
    orders = (n, m, n, m)
    pref = 4 * math.sqrt(ctx.omega1 * ctx.omega2)
    if method == "derivative":
        G = _gamma(ctx, *(Jet.variable(i, orders, dtype=WORK_DTYPE) for i in range(4))).inv_sqrt().c
        wn, wm = _weights(n), _weights(m)
        # the four sign factors pair up to +1
        return float(pref * np.einsum("abcd,a,b,c,d->", G, wn, wm, wn, wm))
    if method == "laguerre":
        mus, dens = _laguerre_args(orders)
        F = _gamma(ctx, *mus).inv_sqrt() * ((dens[0] * dens[1]) * (dens[2] * dens[3]))
        return float(pref * F.c[n, m, n, m])
    raise ValueError(f"unknown method {method!r}")


def purity_ratio(ctx: TwoModeContext, n: int, m: int) -> float:
    return purity(ctx, n, m) / purity(ctx, 0, 0)


def exact_purity_ratio(z: Fraction, n: int, m: int) -> Fraction:
    """P_{n,m} / P_{0,0} at rational z, in exact arithmetic.

    Gamma / (w1 w2) = a + (1/z - 2) b with a, b the frequency-free parts, so
    after dividing by its constant term 4/z every coefficient is rational.
    """
    _check_orders(n, m, PURITY_MAX_ORDER, "purity")
    z = Fraction(z)
    if not 0 < z <= Fraction(1, 4):
        raise ValueError(f"z must lie in (0, 1/4], got {z}")
    orders = (n, m, n, m)
    mus, dens = [], []
    for i in range(4):
        v = Jet.variable(i, orders, exact=True)
        inv = v.reciprocal()
        mus.append((2 - v) * inv)
        dens.append(inv)
    mu1, mu2, nu1, nu2 = mus
    s1, s2 = mu1 + nu1, mu2 + nu2
    a = mu1 * mu1 * (nu1 * nu1) * (s2 * s2) + mu2 * mu2 * (nu2 * nu2) * (s1 * s1)
    b = mu1 * mu2 * (nu1 * nu2) * (s1 * s2)
    g = (a * z + b * (1 - 2 * z)) * Fraction(1, 4)
    F = g.inv_sqrt() * ((dens[0] * dens[1]) * (dens[2] * dens[3]))
    return F.c[n, m, n, m]


def chebyshev_z_nodes(count: int, lo: float = Z_NODES[0], hi: float = Z_NODES[1]) -> np.ndarray:
    k = np.arange(count)
    x = np.cos((2 * k + 1) * np.pi / (2 * count))
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)


def _solve_exact(A: list[list[Fraction]], y: list[Fraction]) -> list[Fraction]:
    n = len(y)
    M = [row[:] + [y[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def ratio_coefficients(n: int, m: int, degree: int, nodes: int | None = None) -> tuple[Fraction, ...]:
    """Exact monomial coefficients (ascending in z) of P_{n,m}/P_{0,0}.

    The ratio is sampled at rational approximations of Chebyshev nodes on
    [1/20, 1/4] and interpolated exactly.
    """
    count = degree + 1 if nodes is None else nodes
    if count < degree + 1:
        raise ValueError(f"{count} nodes cannot determine a degree-{degree} polynomial")
    zs = [Fraction(float(z)).limit_denominator(10**4) for z in chebyshev_z_nodes(count)]
    if len(set(zs)) < count:
        raise ValueError("interpolation nodes collapsed after rationalisation")
    vals = [exact_purity_ratio(z, n, m) for z in zs]
    A = [[z**k for k in range(degree + 1)] for z in zs[: degree + 1]]
    coef = _solve_exact(A, vals[: degree + 1])
    # surplus nodes must be reproduced exactly, otherwise the degree is wrong
    for z, v in zip(zs[degree + 1:], vals[degree + 1:]):
        if sum(c * z**k for k, c in enumerate(coef)) != v:
            raise ValueError(f"ratio ({n},{m}) is not a polynomial of degree {degree}")
    return tuple(coef)


def ratio_gamma(n: int) -> Polynomial:
    """P_{n,0} / P_{0,0} as a degree-n polynomial in z."""
    return Polynomial([float(c) for c in ratio_coefficients(n, 0, n)])


def ratio_delta(n: int) -> Polynomial:
    """P_{n,n} / P_{0,0} as a degree-2n polynomial in z."""
    return Polynomial([float(c) for c in ratio_coefficients(n, n, 2 * n)])


def ratio_series(com_traj, rel_traj, times, nmax: int = 3):
    """Rows (t, z, gamma_1..gamma_nmax, delta_1..delta_nmax) along two mode trajectories."""
    from .ermakov import mode_state

    rows = []
    for t in times:
        ctx = TwoModeContext.from_states(mode_state(com_traj, 0, t), mode_state(rel_traj, 0, t))
        p00 = purity(ctx, 0, 0)
        g = [purity(ctx, k, 0) / p00 for k in range(1, nmax + 1)]
        d = [purity(ctx, k, k) / p00 for k in range(1, nmax + 1)]
        rows.append([float(t), mixedness_z(ctx), *g, *d])
    return rows


def write_ratio_csv(path, rows, nmax: int = 3) -> None:
    header = ["t", "z"] + [f"gamma_{k}" for k in range(1, nmax + 1)] + \
        [f"delta_{k}" for k in range(1, nmax + 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([f"{v:.17g}" for v in r])

"""Brute-force phase-space quadrature used to check every closed form.

The Wigner function of N oscillators in normal-mode Fock states is a
product over modes of exp(-eps_k) (-1)^n_k L_n_k(2 eps_k) / pi with
eps_k = w_k y_k^2 + (pi_k + r_k y_k)^2 / w_k. Its Gaussian part is
exp(-z^T A z) in the phase-space vector z = (x_1..x_N, p_1..p_N). Every
integral below maps z to coordinates s in which that weight is exp(-|s|^2)
and applies a tensor Gauss-Hermite rule, which is exact for the polynomial
remainder once the rule order is high enough.

Nothing here uses the closed-form moments, reduced functions or purities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import eval_laguerre

from .ermakov import ModeState
from .errors import QuadratureOrderError

DEFAULT_ORDER = 40
MAX_POINTS = 2**21
CHUNK = 2**18


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes/weights for the weight exp(-s^2), per dimension.

    An n-point rule integrates polynomial * exp(-s^2) exactly up to degree
    2n - 1 in each coordinate.
    """

    order: int = DEFAULT_ORDER
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")
        x, w = hermgauss(self.order)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    @property
    def exact_degree(self) -> int:
        return 2 * self.order - 1

    def doubled(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.order)


def required_order(degree: int) -> int:
    return max(1, (degree + 2) // 2)


def default_rule(dims: int, degree: int) -> QuadratureRule:
    """40 points per dimension when the tensor grid stays small, else the
    smallest exact order plus a margin of two."""
    if dims == 0 or DEFAULT_ORDER**dims <= MAX_POINTS:
        return QuadratureRule(DEFAULT_ORDER)
    return QuadratureRule(required_order(degree) + 2)


def _check_rule(rule: QuadratureRule | None, dims: int, degree: int) -> QuadratureRule:
    if rule is None:
        rule = default_rule(dims, degree)
    if degree > rule.exact_degree:
        need = required_order(degree)
        raise QuadratureOrderError(
            f"rule of order {rule.order} is exact to degree {rule.exact_degree}, integrand "
            f"needs degree {degree}; use order >= {need}", required_order=need)
    return rule


def _tensor_grid(rule: QuadratureRule, dims: int):
    """Yield (points (P, dims), weights (P,)) in chunks."""
    if dims == 0:
        yield np.zeros((1, 0)), np.ones(1)
        return
    x, w = rule.nodes, rule.weights
    total = rule.order**dims
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total))
        digits = np.empty((idx.size, dims), dtype=np.int64)
        rem = idx
        for d in range(dims - 1, -1, -1):
            digits[:, d] = rem % rule.order
            rem = rem // rule.order
        yield x[digits], np.prod(w[digits], axis=1)


def _whitening(A: np.ndarray) -> tuple[np.ndarray, float]:
    """L with L^T A L = I, and |det L|."""
    C = np.linalg.cholesky(A)
    L = np.linalg.inv(C).T
    return L, abs(float(np.prod(1.0 / np.diag(C))))


@dataclass(frozen=True)
class ProductWigner:
    """Wigner function of independent normal modes in Fock states.

    ``modes`` holds mode vectors as rows: y = modes @ x and pi = modes @ p.
    """

    modes: np.ndarray
    omega: np.ndarray
    rate: np.ndarray
    n: tuple[int, ...]

    @classmethod
    def from_states(cls, modes, states: Sequence[ModeState]) -> "ProductWigner":
        return cls(np.atleast_2d(np.asarray(modes, float)),
                   np.array([s.omega_eff for s in states]),
                   np.array([s.rate for s in states]),
                   tuple(s.n for s in states))

    @classmethod
    def single(cls, state: ModeState) -> "ProductWigner":
        return cls.from_states(np.eye(1), [state])

    @property
    def N(self) -> int:
        return self.modes.shape[0]

    @property
    def degree(self) -> int:
        """Total polynomial degree of the non-Gaussian factor in z."""
        return 2 * sum(self.n)

    def quadratic_form(self) -> np.ndarray:
        """A with sum_k eps_k = z^T A z."""
        M, w, r = self.modes, self.omega, self.rate
        xx = M.T @ np.diag(w + r * r / w) @ M
        xp = M.T @ np.diag(r / w) @ M
        pp = M.T @ np.diag(1.0 / w) @ M
        return np.block([[xx, xp], [xp.T, pp]])

    def eps(self, z: np.ndarray) -> np.ndarray:
        """Per-mode quadratic forms, shape (..., N)."""
        N = self.N
        y = z[..., :N] @ self.modes.T
        pi = z[..., N:] @ self.modes.T
        return self.omega * y * y + (pi + self.rate * y) ** 2 / self.omega

    def poly(self, z: np.ndarray) -> np.ndarray:
        """Non-Gaussian factor: W(z) = exp(-z^T A z) * poly(z)."""
        e = self.eps(z)
        out = np.full(e.shape[:-1], math.pi ** -self.N)
        for k, nk in enumerate(self.n):
            if nk:
                out = out * (-1) ** nk * eval_laguerre(nk, 2.0 * e[..., k])
        return out

    def __call__(self, x, p) -> np.ndarray:
        z = np.concatenate([np.atleast_1d(np.asarray(x, float)),
                            np.atleast_1d(np.asarray(p, float))], axis=-1)
        return np.exp(-self.eps(z).sum(axis=-1)) * self.poly(z)


def _monomial(z: np.ndarray, N: int, px: Sequence[int], pp: Sequence[int]) -> np.ndarray:
    out = np.ones(z.shape[:-1])
    for i, a in enumerate(px):
        if a:
            out = out * z[..., i] ** a
    for i, b in enumerate(pp):
        if b:
            out = out * z[..., N + i] ** b
    return out


def quad_moment(wigner: ProductWigner, px: Sequence[int] | None = None,
                pp: Sequence[int] | None = None, rule: QuadratureRule | None = None) -> float:
    """<prod_i x_i^px[i] p_i^pp[i]> by tensor quadrature over all of phase space."""
    N = wigner.N
    px = tuple(px or (0,) * N)
    pp = tuple(pp or (0,) * N)
    dims = 2 * N
    rule = _check_rule(rule, dims, wigner.degree + sum(px) + sum(pp))
    L, jac = _whitening(wigner.quadratic_form())
    total = 0.0
    for s, w in _tensor_grid(rule, dims):
        z = s @ L.T
        total += float(w @ (wigner.poly(z) * _monomial(z, N, px, pp)))
    return jac * total


def _split(A: np.ndarray, fixed: Sequence[int]):
    free = [i for i in range(A.shape[0]) if i not in fixed]
    fixed = list(fixed)
    Aff = A[np.ix_(fixed, fixed)]
    Afb = A[np.ix_(fixed, free)]
    Abb = A[np.ix_(free, free)]
    return fixed, free, Aff, Afb, Abb


def partial_integral(wigner: ProductWigner, fixed: Sequence[int], values,
                     rule: QuadratureRule | None = None, _poly_only: bool = False):
    """Integrate W over every phase-space coordinate not listed in ``fixed``.

    ``fixed`` indexes z = (x_1..x_N, p_1..p_N); ``values`` has shape
    (..., len(fixed)). For each fixed point the free block is whitened about
    the minimum of the quadratic form, so the Gauss-Hermite nodes sit where
    the integrand lives.
    """
    A = wigner.quadratic_form()
    fixed, free, Aff, Afb, Abb = _split(A, fixed)
    a = np.asarray(values, float)
    batch = a.shape[:-1]
    a = a.reshape(-1, len(fixed))
    dims = len(free)
    rule = _check_rule(rule, dims, wigner.degree)
    if dims:
        L, jac = _whitening(Abb)
        center = -np.linalg.solve(Abb, Afb.T @ a.T).T  # (P, dims)
        schur = Aff - Afb @ np.linalg.solve(Abb, Afb.T)
    else:
        L, jac, center, schur = np.zeros((0, 0)), 1.0, np.zeros((a.shape[0], 0)), Aff
    acc = np.zeros(a.shape[0])
    for s, w in _tensor_grid(rule, dims):
        b = center[:, None, :] + (s @ L.T)[None, :, :]
        z = np.empty(b.shape[:2] + (A.shape[0],))
        z[..., fixed] = a[:, None, :]
        z[..., free] = b
        acc += wigner.poly(z) @ w
    acc *= jac
    if not _poly_only:
        acc = acc * np.exp(-np.einsum("pi,ij,pj->p", a, schur, a))
    return acc.reshape(batch), schur


def quad_reduced(wigner: ProductWigner, x, p, keep: int = 0,
                 rule: QuadratureRule | None = None):
    """Reduced Wigner function of oscillator ``keep`` at (x, p)."""
    x, p = np.broadcast_arrays(np.asarray(x, float), np.asarray(p, float))
    vals, _ = partial_integral(wigner, [keep, wigner.N + keep], np.stack([x, p], axis=-1), rule)
    return float(vals) if vals.ndim == 0 else vals


def quad_marginal_x(wigner: ProductWigner, x, keep: int = 0,
                    rule: QuadratureRule | None = None):
    """Position density of oscillator ``keep``."""
    x = np.asarray(x, float)
    vals, _ = partial_integral(wigner, [keep], x[..., None], rule)
    return float(vals) if vals.ndim == 0 else vals


def quad_purity(wigner: ProductWigner, keep: int = 0, rule: QuadratureRule | None = None,
                inner: QuadratureRule | None = None) -> float:
    """2 pi times the integral of the squared reduced Wigner function of ``keep``.

    The reduced function is exp(-a^T S a) R(a) with S the Schur complement of
    the free block; the outer rule is whitened for exp(-2 a^T S a).
    """
    fixed = [keep, wigner.N + keep]
    A = wigner.quadratic_form()
    _, _, Aff, Afb, Abb = _split(A, fixed)
    schur = Aff - Afb @ np.linalg.solve(Abb, Afb.T) if Abb.size else Aff
    rule = _check_rule(rule, 2, 2 * wigner.degree)
    L, jac = _whitening(2.0 * schur)
    total = 0.0
    for s, w in _tensor_grid(rule, 2):
        R, _ = partial_integral(wigner, fixed, s @ L.T, inner, _poly_only=True)
        total += float(w @ (R * R))
    return 2 * math.pi * jac * total


def quad_purity_full(wigner: ProductWigner, rule: QuadratureRule | None = None) -> float:
    """(2 pi)^N times the integral of W^2 over all of phase space."""
    dims = 2 * wigner.N
    rule = _check_rule(rule, dims, 2 * wigner.degree)
    L, jac = _whitening(2.0 * wigner.quadratic_form())
    total = 0.0
    for s, w in _tensor_grid(rule, dims):
        P = wigner.poly(s @ L.T)
        total += float(w @ (P * P))
    return (2 * math.pi) ** wigner.N * jac * total


def covariance(wigner: ProductWigner, rule: QuadratureRule | None = None):
    """(<x_j^2>, <p_j^2>) for every oscillator j."""
    N = wigner.N
    vx, vp = [], []
    for j in range(N):
        e = [0] * N
        e[j] = 2
        vx.append(quad_moment(wigner, px=e, rule=rule))
        vp.append(quad_moment(wigner, pp=e, rule=rule))
    return np.array(vx), np.array(vp)


def grid_indices(shape):
    return itertools.product(*(range(s) for s in shape))

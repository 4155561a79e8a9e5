"""Wigner function, even moments and uncertainties of one oscillator in a
Fock level with a time-dependent frequency.

The complex Gaussian width omega' - i b'/b is carried as the real pair
(omega_eff, rate) of a :class:`~tdho.ermakov.ModeState`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ermakov import ModeState
from .specfun import fock_radial, moment_prefactor


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float


class Uncertainty(NamedTuple):
    variance_x: float
    variance_p: float
    product_squared: float


def phase_form(state: ModeState, x, p):
    """omega' x^2 + (p + r x)^2 / omega', the argument of the Fock radial factor."""
    w, r = state.omega_eff, state.rate
    return w * x * x + (p + r * x) ** 2 / w


def wigner_single(state: ModeState, pt: PhasePoint | None = None, *, x=None, p=None):
    """W_n(x, p) = exp(-eps) (-1)^n L_n(2 eps) / pi.

    Pass a :class:`PhasePoint`, or arrays via ``x=`` and ``p=`` for grid
    evaluation (broadcast together).
    """
    if pt is not None:
        x, p = pt.x, pt.p
    eps = phase_form(state, np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    out = np.exp(-eps) * fock_radial(state.n, eps) / math.pi
    return float(out) if out.ndim == 0 else out


def even_moment_x(state: ModeState, m: int) -> float:
    """<x^(2m)> in closed form."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return moment_prefactor(state.n, m) / state.omega_eff**m


def even_moment_p(state: ModeState, m: int) -> float:
    """<p^(2m)> in closed form."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    w, r = state.omega_eff, state.rate
    return moment_prefactor(state.n, m) * (w + r * r / w) ** m


def odd_moment(state: ModeState, m: int) -> float:
    """<x^(2m+1)> = <p^(2m+1)> = 0 by parity of W_n."""
    return 0.0


def uncertainty_single(state: ModeState) -> Uncertainty:
    h = state.n + 0.5
    w, r = state.omega_eff, state.rate
    vx = h / w
    vp = h * (w + r * r / w)
    return Uncertainty(vx, vp, h * h * (1.0 + (r / w) ** 2))


def wigner_grid(state: ModeState, xs, ps) -> np.ndarray:
    """W on the rectangular grid xs x ps, shape (len(xs), len(ps))."""
    X, P = np.meshgrid(np.asarray(xs, float), np.asarray(ps, float), indexing="ij")
    return wigner_single(state, x=X, p=P)


def write_wigner_csv(path, state: ModeState, xs, ps) -> None:
    W = wigner_grid(state, xs, ps)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p", "wigner"])
        for i, x in enumerate(xs):
            for j, p in enumerate(ps):
                w.writerow([f"{x:.17g}", f"{p:.17g}", f"{W[i, j]:.17g}"])

"""Coupled oscillator chains: normal modes, closed-form position/momentum
variances and the uncertainty sum rule.

Two families are supported:

* the symmetric chain, every pair coupled by the same J(t); one
  centre-of-mass mode at sqrt(k0) and N - 1 degenerate modes at
  sqrt(k0 + N J);
* the general three-oscillator system with distinct J12, J13, J23.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ermakov import DEFAULT_TOL, ModeState, ScaleTrajectory, mode_state, solve_ermakov
from .errors import DegenerateCouplingError, StabilityError
from .schedule import ModeFrequencySpec, parse_schedule
from .single_osc import uncertainty_single

ZETA_REL_MIN = 1e-9
# below this |J13 - J23| / max|J| the closed-form A+- lose too many digits
PAIR_REL_MIN = 1e-8


def build_normal_modes(N: int) -> np.ndarray:
    """Orthogonal mode matrix of the symmetric chain, rows are mode vectors.

    Row 1 is (1, ..., 1)/sqrt(N); row j >= 2 is
    (1, ..., 1, -(j-1), 0, ..., 0)/sqrt(j(j-1)).
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    M = np.zeros((N, N))
    M[0, :] = 1.0 / math.sqrt(N)
    for j in range(2, N + 1):
        M[j - 1, : j - 1] = 1.0
        M[j - 1, j - 1] = -(j - 1)
        M[j - 1] /= math.sqrt(j * (j - 1))
    return M


@dataclass(frozen=True)
class General3Modes:
    matrix: np.ndarray
    zeta: float
    omega1: float
    omega_plus: float
    omega_minus: float
    # per-mode coefficient c in omega^2 = k0 + c * scale, order (1, +, -)
    c: tuple[float, float, float] = (0.0, 0.0, 0.0)
    closed_form: bool = True


def _zeta(J12: float, J13: float, J23: float) -> float:
    arg = J12**2 + J13**2 + J23**2 - (J12 * J13 + J12 * J23 + J13 * J23)
    return math.sqrt(max(arg, 0.0))


def general3_amplitudes(J12: float, J13: float, J23: float) -> tuple[float, float]:
    """Normalisations A+ and A- of the two non-trivial mode vectors."""
    zeta = _zeta(J12, J13, J23)
    d = J13 + J23 - 2 * J12
    a_p = math.sqrt(max(2 * zeta + d, 0.0) / (6 * zeta)) / (J13 - J23)
    a_m = math.sqrt(max(2 * zeta - d, 0.0) / (6 * zeta)) / (J13 - J23)
    return a_p, a_m


def general3_modes(J12: float, J13: float, J23: float, k0: float) -> General3Modes:
    """Normal modes (y1, y+, y-) and frequencies of the general 3-system."""
    zeta = _zeta(J12, J13, J23)
    scale = max(abs(J12), abs(J13), abs(J23))
    if zeta <= ZETA_REL_MIN * scale or scale == 0.0:
        raise DegenerateCouplingError(
            f"couplings J12={J12}, J13={J13}, J23={J23} are degenerate (zeta={zeta:.3g}); "
            "use the symmetric chain solver instead")
    S = J12 + J13 + J23
    if not k0 > 0:
        raise StabilityError(f"k0 = {k0} gives an imaginary centre-of-mass frequency")
    if not k0 + S - zeta > 0:
        raise StabilityError(f"k0 + S - zeta = {k0 + S - zeta} <= 0: omega_- is imaginary")

    M = np.empty((3, 3))
    M[0] = 1.0 / math.sqrt(3.0)
    closed = abs(J13 - J23) > PAIR_REL_MIN * scale
    if closed:
        a_p, a_m = general3_amplitudes(J12, J13, J23)
        M[1] = a_p * np.array([-J12 + J23 - zeta, J12 - J13 + zeta, J13 - J23])
        M[2] = a_m * np.array([-J12 + J23 + zeta, J12 - J13 - zeta, J13 - J23])
    else:
        L = np.array([[J12 + J13, -J12, -J13],
                      [-J12, J12 + J23, -J23],
                      [-J13, -J23, J13 + J23]])
        vals, vecs = np.linalg.eigh(L)
        for row, target in ((1, S + zeta), (2, S - zeta)):
            v = vecs[:, int(np.argmin(np.abs(vals - target)))]
            # project out the uniform mode then renormalise; fixes sign too
            v = v - v.mean()
            v /= np.linalg.norm(v)
            if v[np.argmax(np.abs(v) > 1e-12)] < 0:
                v = -v
            M[row] = v
    return General3Modes(M, zeta, math.sqrt(k0), math.sqrt(k0 + S + zeta),
                         math.sqrt(k0 + S - zeta), (0.0, S + zeta, S - zeta), closed)


def general3_coefficients(J12: float, J13: float, J23: float) -> np.ndarray:
    """C[k, j]: weight of mode k's variance in oscillator j's variance.

    Rows are modes (1, +, -), columns oscillators. Written out from the
    explicit mode vectors: u+- = -J12 + J23 +- zeta, v+- = J12 - J13 +- zeta.
    """
    zeta = _zeta(J12, J13, J23)
    a_p, a_m = general3_amplitudes(J12, J13, J23)
    u_p, u_m = -J12 + J23 + zeta, -J12 + J23 - zeta
    v_p, v_m = J12 - J13 + zeta, J12 - J13 - zeta
    d = J13 - J23
    return np.array([
        [1 / 3, 1 / 3, 1 / 3],
        [a_p**2 * u_m**2, a_p**2 * v_p**2, d**2 * a_p**2],
        [a_m**2 * u_p**2, a_m**2 * v_m**2, d**2 * a_m**2],
    ])


@dataclass(frozen=True)
class CoupledSystem:
    """A coupled chain with solved per-mode scale factors.

    ``trajectories[k]`` belongs to mode k (row k of ``modes``). For the
    symmetric chain all degenerate modes share one trajectory object.
    """

    N: int
    modes: np.ndarray
    freqs: tuple[ModeFrequencySpec, ...]
    trajectories: tuple[ScaleTrajectory, ...]
    kind: str = "symmetric"
    couplings: tuple[float, float, float] | None = None
    general3: General3Modes | None = field(default=None, repr=False)

    @property
    def t_end(self) -> float:
        return min(tr.t_end for tr in self.trajectories)

    def mode_states(self, exc: Sequence[int], t: float) -> list[ModeState]:
        exc = check_excitation(exc, self.N)
        return [mode_state(tr, n, t) for tr, n in zip(self.trajectories, exc)]


def check_excitation(exc: Sequence[int], N: int) -> tuple[int, ...]:
    exc = tuple(int(n) for n in exc)
    if len(exc) != N:
        raise ValueError(f"need {N} quantum numbers, got {len(exc)}")
    if any(n < 0 for n in exc):
        raise ValueError(f"quantum numbers must be >= 0, got {exc}")
    return exc


def symmetric_system(N: int, k0, J, t_end: float = 1.0,
                     tolerance: float = DEFAULT_TOL) -> CoupledSystem:
    """Symmetric N-chain with schedules (or constants) k0 and J."""
    k0, J = parse_schedule(k0), parse_schedule(J)
    com = ModeFrequencySpec(k0, J, 0.0)
    rel = ModeFrequencySpec(k0, J, float(N))
    tr_com = solve_ermakov(com, t_end, tolerance)
    tr_rel = solve_ermakov(rel, t_end, tolerance)
    return CoupledSystem(N, build_normal_modes(N), (com,) + (rel,) * (N - 1),
                         (tr_com,) + (tr_rel,) * (N - 1))


def general3_system(J12: float, J13: float, J23: float, k0, scale=1.0,
                    t_end: float = 1.0, tolerance: float = DEFAULT_TOL) -> CoupledSystem:
    """General three-oscillator system with J_ij(t) = J_ij * scale(t).

    Only a common time dependence of the couplings is allowed, so the mode
    vectors stay fixed in time.
    """
    k0, scale = parse_schedule(k0), parse_schedule(scale)
    # mode vectors do not depend on k0 or the common scale; stability at
    # later times is checked while the scale factors are integrated
    g = general3_modes(J12, J13, J23, k0(0.0))
    freqs = tuple(ModeFrequencySpec(k0, scale, c) for c in g.c)
    trajs = tuple(solve_ermakov(f, t_end, tolerance) for f in freqs)
    return CoupledSystem(3, g.matrix, freqs, trajs, "general3", (J12, J13, J23), g)


@dataclass(frozen=True)
class UncertaintyReport:
    """Per-oscillator variances plus the arithmetic mean of the mode variances."""

    t: float
    var_x: np.ndarray
    var_p: np.ndarray
    mean_x: float
    mean_p: float

    @property
    def dev_x(self) -> np.ndarray:
        return self.var_x - self.mean_x

    @property
    def dev_p(self) -> np.ndarray:
        return self.var_p - self.mean_p

    def rows(self):
        for j in range(len(self.var_x)):
            yield (self.t, j + 1, self.var_x[j], self.var_p[j], self.dev_x[j], self.dev_p[j])


def _mode_arrays(states: Sequence[ModeState]):
    vy = np.array([uncertainty_single(s).variance_x for s in states])
    vpi = np.array([uncertainty_single(s).variance_p for s in states])
    return vy, vpi


def modal_variances(matrix: np.ndarray, states: Sequence[ModeState], t: float = 0.0
                    ) -> UncertaintyReport:
    """Variances of x_j = sum_k M[k, j] y_k from independent mode variances."""
    vy, vpi = _mode_arrays(states)
    W = np.asarray(matrix) ** 2
    return UncertaintyReport(t, W.T @ vy, W.T @ vpi, float(vy.mean()), float(vpi.mean()))


def nchain_bracket(exc: Sequence[int], j: int) -> float:
    """2N(j-1)/j n_j + 2N sum_{k>j} n_k/(k(k-1)) + (N-1), 1-based j."""
    N = len(exc)
    tail = sum(exc[k - 1] / (k * (k - 1)) for k in range(j + 1, N + 1))
    return 2 * N * (j - 1) / j * exc[j - 1] + 2 * N * tail + (N - 1)


def nchain_variances(exc: Sequence[int], com: ModeState, rel: ModeState, t: float = 0.0
                     ) -> UncertaintyReport:
    """Closed-form symmetric-chain variances for every oscillator j."""
    N = len(exc)
    n1 = exc[0]
    w1, r1 = com.omega_eff, com.rate
    w, r = rel.omega_eff, rel.rate
    g1 = w1 + r1 * r1 / w1
    g = w + r * r / w
    var_x = np.empty(N)
    var_p = np.empty(N)
    for j in range(1, N + 1):
        B = nchain_bracket(exc, j)
        var_x[j - 1] = ((2 * n1 + 1) / (2 * w1) + B / (2 * w)) / N
        var_p[j - 1] = ((2 * n1 + 1) / 2 * g1 + B / 2 * g) / N
    mean_x = ((n1 + 0.5) / w1 + sum(n + 0.5 for n in exc[1:]) / w) / N
    mean_p = ((n1 + 0.5) * g1 + sum(n + 0.5 for n in exc[1:]) * g) / N
    return UncertaintyReport(t, var_x, var_p, mean_x, mean_p)


def two_coupled_variances(n: int, m: int, com: ModeState, rel: ModeState,
                          t: float = 0.0) -> UncertaintyReport:
    """N = 2: both oscillators carry the plain average of the two mode variances."""
    g1 = com.omega_eff + com.rate**2 / com.omega_eff
    g2 = rel.omega_eff + rel.rate**2 / rel.omega_eff
    vx = 0.5 * ((2 * n + 1) / (2 * com.omega_eff) + (2 * m + 1) / (2 * rel.omega_eff))
    vp = 0.5 * ((2 * n + 1) / 2 * g1 + (2 * m + 1) / 2 * g2)
    return UncertaintyReport(t, np.array([vx, vx]), np.array([vp, vp]), vx, vp)


def three_coupled_variances(n: int, m: int, ell: int, com: ModeState, rel: ModeState,
                            t: float = 0.0) -> UncertaintyReport:
    """N = 3 symmetric chain, oscillators 1 and 2 share a value; 3 differs unless m == ell."""
    w1, w = com.omega_eff, rel.omega_eff
    g1 = w1 + com.rate**2 / w1
    g = w + rel.rate**2 / w
    a = (2 * n + 1) / (2 * w1)
    vx12 = (a + (3 * (2 * m + 1) + (2 * ell + 1)) / (4 * w)) / 3
    vx3 = (a + 2 * (2 * ell + 1) / (2 * w)) / 3
    ap = (2 * n + 1) / 2 * g1
    vp12 = (ap + (3 * (2 * m + 1) + (2 * ell + 1)) / 4 * g) / 3
    vp3 = (ap + 2 * (2 * ell + 1) / 2 * g) / 3
    mean_x = ((n + 0.5) / w1 + (m + ell + 1) / w) / 3
    mean_p = ((n + 0.5) * g1 + (m + ell + 1) * g) / 3
    return UncertaintyReport(t, np.array([vx12, vx12, vx3]), np.array([vp12, vp12, vp3]),
                             mean_x, mean_p)


def coupled_variances(sys: CoupledSystem, exc: Sequence[int], t: float) -> UncertaintyReport:
    """Closed-form per-oscillator variances at time t."""
    if sys.kind == "general3":
        return general3_variances(sys, exc, t)
    exc = check_excitation(exc, sys.N)
    com = mode_state(sys.trajectories[0], exc[0], t)
    rel = mode_state(sys.trajectories[1], 0, t)
    return nchain_variances(exc, com, rel, t)


def general3_variances(sys: CoupledSystem, exc: Sequence[int], t: float) -> UncertaintyReport:
    """Closed-form variances of the general three-oscillator system."""
    if sys.kind != "general3":
        raise ValueError("general3_variances needs a system from general3_system()")
    states = sys.mode_states(exc, t)
    if sys.general3.closed_form:
        C = general3_coefficients(*sys.couplings)
    else:
        C = sys.modes**2
    vy, vpi = _mode_arrays(states)
    return UncertaintyReport(t, C.T @ vy, C.T @ vpi, float(vy.mean()), float(vpi.mean()))


def sum_rule_deviation(sys: CoupledSystem, exc: Sequence[int], t: float
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Per-oscillator (x, p) deviations from the arithmetic mean of mode variances."""
    rep = coupled_variances(sys, exc, t)
    return rep.dev_x, rep.dev_p


def uncertainty_table(sys: CoupledSystem, exc: Sequence[int], times: Sequence[float]):
    """Rows (t, j, var_x, var_p, sum_rule_dev_x, sum_rule_dev_p)."""
    rows = []
    for t in times:
        rows.extend(coupled_variances(sys, exc, float(t)).rows())
    return rows

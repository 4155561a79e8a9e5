"""Ermakov scale factors b(t) for time-dependent oscillator frequencies.

b'' + omega(t)^2 b = omega(0)^2 / b^3,   b(0) = 1,   b'(0) = 0.

The state (b, b', tau) is integrated with an adaptive 8(5,3) Runge-Kutta
pair, restarting at every schedule breakpoint so that jumps in omega^2
never fall inside a step. tau(t) = int_0^t ds / b(s)^2 rides along as a
third state component.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, StepSizeError, TrajectoryRangeError
from .schedule import ModeFrequencySpec, ParamSchedule

DEFAULT_TOL = 1e-10
# b below this counts as a collapse of the wave packet width
B_FLOOR = 1e-8


@dataclass(frozen=True)
class ModeState:
    """One normal mode at one instant.

    ``omega_eff`` is omega(0)/b^2, ``rate`` is b'/b and ``tau`` the phase
    time. ``omega0`` is kept so the level energy (n + 1/2) omega(0) can be
    recovered.
    """

    n: int
    omega_eff: float
    rate: float
    tau: float = 0.0
    omega0: float = float("nan")

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"quantum number must be >= 0, got {self.n}")
        if not self.omega_eff > 0:
            raise ValueError(f"effective frequency must be > 0, got {self.omega_eff}")

    @property
    def energy(self) -> float:
        return (self.n + 0.5) * self.omega0

    def with_n(self, n: int) -> "ModeState":
        return ModeState(n, self.omega_eff, self.rate, self.tau, self.omega0)


@dataclass(frozen=True)
class ScaleTrajectory:
    """Solved b(t), b'(t), tau(t) on [0, t_end] with dense output."""

    t: np.ndarray
    b: np.ndarray
    bdot: np.ndarray
    tau: np.ndarray
    omega0: float
    segments: tuple = field(default=(), repr=False)
    seg_starts: tuple[float, ...] = field(default=(), repr=False)

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def _state(self, t: float) -> np.ndarray:
        if not (0.0 <= t <= self.t_end):
            raise TrajectoryRangeError(f"t={t} outside trajectory domain [0, {self.t_end}]")
        if t == 0.0:
            return np.array([1.0, 0.0, 0.0])
        if not self.segments:  # static mode, b identically 1
            return np.array([1.0, 0.0, t])
        # a breakpoint belongs to the segment that ends there; (b, b') are continuous anyway
        i = max(bisect.bisect_left(self.seg_starts, t) - 1, 0)
        return self.segments[i](t)

    def __call__(self, t: float) -> tuple[float, float]:
        """(b, b') at time t."""
        s = self._state(t)
        return float(s[0]), float(s[1])

    def omega_eff(self, t: float) -> float:
        b, _ = self(t)
        return self.omega0 / b**2

    def phase_time(self, t: float) -> float:
        return float(self._state(t)[2])

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """Rows (t, b, bdot, omega_eff) for each requested time."""
        rows = []
        for t in times:
            b, bd = self(float(t))
            rows.append((float(t), b, bd, self.omega0 / b**2))
        return np.array(rows)

    def to_csv(self, path, times: Sequence[float] | None = None) -> None:
        rows = self.sample(self.t if times is None else times)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "b", "bdot", "omega_eff"])
            for r in rows:
                w.writerow([f"{v:.17g}" for v in r])


def _rhs(w2_right, omega0_sq):
    def f(t, y):
        b, bd, _ = y
        return [bd, omega0_sq / b**3 - w2_right(t) * b, 1.0 / (b * b)]
    return f


def _collapse(t, y):
    return y[0] - B_FLOOR


_collapse.terminal = True
_collapse.direction = -1


def solve_ermakov(freq: ModeFrequencySpec, t_end: float,
                  tolerance: float = DEFAULT_TOL) -> ScaleTrajectory:
    """Integrate the Ermakov equation for one mode frequency on [0, t_end]."""
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if not tolerance > 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")

    omega0_sq = freq.omega_squared(0.0)
    omega0 = math.sqrt(omega0_sq)
    # validate the right limit at 0 as well (quench at t = 0)
    freq.omega_squared(0.0, right=True)

    if freq.is_static and freq.omega_squared(0.0, right=True) == omega0_sq:
        grid = np.array([0.0, t_end])
        return ScaleTrajectory(grid, np.ones(2), np.zeros(2), grid.copy(), omega0)

    edges = [0.0] + [bp for bp in freq.breakpoints() if bp < t_end] + [t_end]
    w2_right = lambda t: freq.omega_squared(t, right=True)  # noqa: E731
    rhs = _rhs(w2_right, omega0_sq)

    ts, ys, segs = [np.array([0.0])], [np.array([[1.0], [0.0], [0.0]])], []
    y0 = np.array([1.0, 0.0, 0.0])
    for a, b in zip(edges, edges[1:]):
        # omega^2 on (a, b) is the right limit at a; freeze it at a so
        # evaluation right at the restart never picks up the left value
        seg_rhs = rhs
        if freq.k0.kind != "tabulated" and freq.J.kind != "tabulated":
            w2 = w2_right(a)
            seg_rhs = _rhs(lambda t, w2=w2: w2, omega0_sq)
        sol = solve_ivp(seg_rhs, (a, b), y0, method="DOP853", rtol=tolerance,
                        atol=tolerance * 1e-2, dense_output=True, events=_collapse)
        if sol.status == 1:
            last = float(sol.t[-1])
            raise IntegrationError(f"scale factor b(t) collapsed below {B_FLOOR} near t={last}",
                                   last_t=last)
        if sol.status != 0:
            last = float(sol.t[-1])
            raise StepSizeError(f"Ermakov integration failed at t={last}: {sol.message}",
                                last_t=last)
        if np.any(sol.y[0] <= 0):
            raise IntegrationError("non-positive b(t) in accepted step", last_t=float(sol.t[-1]))
        ts.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        segs.append(sol.sol)
        y0 = sol.y[:, -1].copy()

    t = np.concatenate(ts)
    y = np.concatenate(ys, axis=1)
    return ScaleTrajectory(t, y[0], y[1], y[2], omega0, tuple(segs), tuple(edges[:-1]))


def quench_scale_factor(omega_i: float, omega_f: float, t: float) -> tuple[float, float]:
    """Closed-form (b, b') after an instantaneous frequency change at t = 0."""
    if not (omega_i > 0 and omega_f > 0):
        raise ValueError("quench frequencies must be positive")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    wf2 = omega_f * omega_f
    amp = (wf2 - omega_i * omega_i) / (2 * wf2)
    b2 = amp * math.cos(2 * omega_f * t) + (wf2 + omega_i * omega_i) / (2 * wf2)
    b = math.sqrt(b2)
    bdot = -amp * omega_f * math.sin(2 * omega_f * t) / b
    return b, bdot


def mode_state(traj: ScaleTrajectory, n: int, t: float) -> ModeState:
    """Effective frequency, log-derivative and phase time of a mode at time t."""
    s = traj._state(t)
    b, bd, tau = float(s[0]), float(s[1]), float(s[2])
    return ModeState(n, traj.omega0 / (b * b), bd / b, tau, traj.omega0)


def static_trajectory(omega: float, t_end: float) -> ScaleTrajectory:
    """Trajectory for a frequency that never changes."""
    return solve_ermakov(ModeFrequencySpec(ParamSchedule.constant(omega * omega)), t_end)


def quench_invariant(b: np.ndarray, bdot: np.ndarray, omega_i: float, omega_f: float) -> np.ndarray:
    """bdot^2 + omega_f^2 b^2 + omega_i^2 / b^2, conserved after a step quench."""
    return bdot**2 + omega_f**2 * b**2 + omega_i**2 / b**2

"""Time-dependent parameters k0(t), J(t) and the normal-mode frequencies built from them.

Units are fixed to hbar = 1 and unit mass everywhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import FrequencyDomainError, ScheduleDomainError, ScheduleRangeError

KINDS = ("constant", "quench", "piecewise", "tabulated")


@dataclass(frozen=True)
class ParamSchedule:
    """A real scalar parameter as a function of time t >= 0.

    Use the ``constant``, ``quench``, ``piecewise`` and ``tabulated``
    constructors rather than building instances by hand.

    Piecewise values are right-continuous. The one exception is a quench at
    ``t_q == 0``: the initial value is returned at exactly ``t == 0`` and the
    final value for every ``t > 0``.
    """

    kind: str
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    _interp: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "ParamSchedule":
        return cls("constant", (0.0,), (float(value),))

    @classmethod
    def quench(cls, initial: float, final: float, t_q: float = 0.0) -> "ParamSchedule":
        if t_q < 0:
            raise ScheduleDomainError(f"quench time must be >= 0, got {t_q}")
        return cls("quench", (0.0, float(t_q)), (float(initial), float(final)))

    @classmethod
    def piecewise(cls, points: Sequence[Sequence[float]]) -> "ParamSchedule":
        if not points:
            raise ScheduleDomainError("piecewise schedule needs at least one breakpoint")
        ts = [float(t) for t, _ in points]
        vs = [float(v) for _, v in points]
        if ts[0] != 0.0:
            raise ScheduleDomainError("first piecewise breakpoint must be at t = 0")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ScheduleDomainError("piecewise breakpoints must be strictly increasing")
        return cls("piecewise", tuple(ts), tuple(vs))

    @classmethod
    def tabulated(cls, times: Sequence[float], values: Sequence[float]) -> "ParamSchedule":
        ts = np.asarray(times, dtype=float)
        vs = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
            raise ScheduleDomainError("tabulated schedule needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(ts) <= 0):
            raise ScheduleDomainError("tabulated times must be strictly increasing")
        if ts[0] < 0:
            raise ScheduleDomainError("tabulated times must be >= 0")
        return cls("tabulated", tuple(ts.tolist()), tuple(vs.tolist()), PchipInterpolator(ts, vs))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t: float) -> float:
        return eval_param(self, t)

    def right_value(self, t: float) -> float:
        """Right limit of the schedule at ``t`` (what an integrator sees on (t, t + dt))."""
        if t < 0:
            raise ScheduleDomainError(f"schedule evaluated at negative time t={t}")
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "tabulated":
            return self._tabulated(t)
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.values[max(idx, 0)]

    def breakpoints(self) -> tuple[float, ...]:
        """Times where the schedule may jump. Integrators restart exactly here."""
        if self.kind in ("quench", "piecewise"):
            return tuple(t for t in self.times if t > 0)
        return ()

    @property
    def is_constant(self) -> bool:
        if self.kind == "tabulated":
            return False
        return len(set(self.values)) == 1

    def _tabulated(self, t: float) -> float:
        lo, hi = self.times[0], self.times[-1]
        if t < lo or t > hi:
            raise ScheduleRangeError(f"t={t} outside tabulated range [{lo}, {hi}]")
        return float(self._interp(t))

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.values[0]}
        if self.kind == "quench":
            return {"kind": "quench", "initial": self.values[0], "final": self.values[1],
                    "t_q": self.times[1]}
        if self.kind == "piecewise":
            return {"kind": "piecewise", "points": [list(p) for p in zip(self.times, self.values)]}
        return {"kind": "tabulated", "t": list(self.times), "values": list(self.values)}


def eval_param(schedule: ParamSchedule, t: float) -> float:
    """Value of ``schedule`` at time ``t >= 0``."""
    if t < 0:
        raise ScheduleDomainError(f"schedule evaluated at negative time t={t}")
    if schedule.kind == "quench" and schedule.times[1] == 0.0 and t == 0.0:
        return schedule.values[0]
    return schedule.right_value(t)


def parse_schedule(spec) -> ParamSchedule:
    """Build a schedule from a config entry.

    Accepted forms::

        1.5                                           # constant
        {kind: constant, value: 1.5}
        {kind: quench, initial: 1, final: 2, t_q: 0}  # t_q defaults to 0
        {kind: piecewise, points: [[0, 1], [2, 3]]}
        {kind: tabulated, t: [...], values: [...]}
    """
    if isinstance(spec, ParamSchedule):
        return spec
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return ParamSchedule.constant(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScheduleDomainError(f"cannot parse schedule from {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "constant":
            return ParamSchedule.constant(spec["value"])
        if kind == "quench":
            return ParamSchedule.quench(spec["initial"], spec["final"], spec.get("t_q", 0.0))
        if kind == "piecewise":
            return ParamSchedule.piecewise(spec["points"])
        if kind == "tabulated":
            return ParamSchedule.tabulated(spec["t"], spec["values"])
    except KeyError as exc:
        raise ScheduleDomainError(f"{kind} schedule missing key {exc}") from None
    raise ScheduleDomainError(f"unknown schedule kind {kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class ModeFrequencySpec:
    """omega(t) = sqrt(k0(t) + c * J(t)) for one normal mode.

    ``c = 0`` is the centre-of-mass mode, ``c = N`` the degenerate modes of the
    symmetric N-chain. The general three-oscillator system uses
    ``c = S +/- zeta`` with ``J`` a common dimensionless coupling scale.
    """

    k0: ParamSchedule
    J: ParamSchedule = field(default_factory=lambda: ParamSchedule.constant(0.0))
    c: float = 0.0

    def omega_squared(self, t: float, right: bool = False) -> float:
        if right:
            k0, J = self.k0.right_value(t), self.J.right_value(t)
        else:
            k0, J = eval_param(self.k0, t), eval_param(self.J, t)
        w2 = k0 if self.c == 0 else k0 + self.c * J
        if not w2 > 0:
            raise FrequencyDomainError(
                f"k0 + c*J = {w2!r} <= 0 at t={t} (k0={k0}, J={J}, c={self.c})", t=t, value=w2)
        return w2

    def breakpoints(self) -> tuple[float, ...]:
        bps = set(self.k0.breakpoints())
        if self.c != 0:
            bps.update(self.J.breakpoints())
        return tuple(sorted(bps))

    @property
    def is_static(self) -> bool:
        return self.k0.is_constant and (self.c == 0 or self.J.is_constant)


def mode_frequency(spec: ModeFrequencySpec, t: float) -> float:
    """Angular frequency sqrt(k0(t) + c J(t)) of a normal mode."""
    return math.sqrt(spec.omega_squared(t))

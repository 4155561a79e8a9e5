"""Command-line entry point: ``tdho <command> [options]``.

Commands
--------
ermakov      scale factor b(t) of one mode -> columns t,b,bdot,omega_eff
uncertainty  per-oscillator variances -> t,j,var_x,var_p,sum_rule_dev_x,sum_rule_dev_p
table1       interpolated purity-ratio polynomials (JSON report, or CSV rows)
fig1         purity ratios along the k0 = J: 1 -> 2 quench -> t,z,gamma_1..3,delta_1..3
verify       quadrature cross-checks, JSON report, exit status 1 on any failure

Options shared by all commands: --config (YAML or JSON), --out (default
stdout), --format {csv,json}, --tol. Command-line overrides (--n, --m, --ell,
--N, --t-end, --steps) win over config values. See README.md for the config
grammar.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np
import yaml

from . import coupled, oracle, reduced
from .ermakov import DEFAULT_TOL, ModeState, quench_scale_factor, solve_ermakov
from .errors import TdhoError
from .schedule import ModeFrequencySpec, ParamSchedule, parse_schedule
from .single_osc import even_moment_p, even_moment_x

# Reference coefficients (ascending powers of z) for the purity ratios.
REFERENCE_RATIOS: dict[str, tuple[Fraction, ...]] = {
    "gamma_1": (Fraction(3, 4), Fraction(-1)),
    "gamma_2": tuple(Fraction(c, 64) for c in (41, -104, 144)),
    "gamma_3": tuple(Fraction(c, 256) for c in (147, -540, 1488, -1600)),
    "delta_1": tuple(Fraction(c, 16) for c in (9, -40, 144)),
    "delta_2": tuple(Fraction(c, 4096) for c in (1681, -19344, 256608, -1440000, 2822400)),
}

DELTA3_SEED = 20240101
FIG1_STEPS = 20


@dataclass
class RunConfig:
    command: str
    schedules: dict[str, Any] = field(default_factory=dict)
    N: int = 2
    excitation: tuple[int, ...] = ()
    t_start: float = 0.0
    t_end: float = 1.0
    steps: int = 11
    out: str | None = None
    fmt: str = "csv"
    tol: float | None = None
    checks: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.t_start < 0:
            raise ValueError(f"t_start must be >= 0, got {self.t_start}")
        if self.t_end < self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must be >= t_start ({self.t_start})")

    @property
    def horizon(self) -> float:
        """Integration end time; a one-point grid at t = 0 still needs a positive span."""
        return self.t_end if self.t_end > 0 else 1.0

    def grid(self) -> np.ndarray:
        """``steps`` equally spaced points from t_start to t_end inclusive."""
        if self.steps == 1:
            return np.array([self.t_start])
        return np.linspace(self.t_start, self.t_end, self.steps)


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(fmt(v))
    if isinstance(v, Fraction):
        return str(v)
    return v


def emit_table(header, rows, cfg: RunConfig) -> str:
    if cfg.fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in _jsonable(rows)], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def emit_report(report: dict, cfg: RunConfig) -> str:
    return json.dumps(_jsonable(report), indent=1, sort_keys=False) + "\n"


# -- commands -----------------------------------------------------------------

def _squared(sched: ParamSchedule) -> ParamSchedule:
    d = sched.to_dict()
    if d["kind"] == "constant":
        d["value"] = d["value"] ** 2
    elif d["kind"] == "quench":
        d["initial"], d["final"] = d["initial"] ** 2, d["final"] ** 2
    elif d["kind"] == "piecewise":
        d["points"] = [[t, v * v] for t, v in d["points"]]
    else:
        d["values"] = [v * v for v in d["values"]]
    return parse_schedule(d)


def _tolerance(cfg: RunConfig) -> float:
    return DEFAULT_TOL if cfg.tol is None else cfg.tol


def cmd_ermakov(cfg: RunConfig) -> str:
    s = cfg.schedules
    if "omega" in s:
        freq = ModeFrequencySpec(_squared(parse_schedule(s["omega"])))
    else:
        freq = ModeFrequencySpec(parse_schedule(s.get("k0", 1.0)), parse_schedule(s.get("J", 0.0)),
                                 float(cfg.extra.get("c", 0.0)))
    times = cfg.grid()
    traj = solve_ermakov(freq, cfg.horizon, _tolerance(cfg))
    rows = [(t, b, bd, traj.omega_eff(t)) for t, (b, bd) in zip(times, map(traj, times))]
    return emit_table(["t", "b", "bdot", "omega_eff"], rows, cfg)


def _system(cfg: RunConfig, t_end: float):
    s = cfg.schedules
    tol = _tolerance(cfg)
    if any(k in s for k in ("J12", "J13", "J23")):
        return coupled.general3_system(float(s.get("J12", 0.0)), float(s.get("J13", 0.0)),
                                       float(s.get("J23", 0.0)), s.get("k0", 1.0),
                                       s.get("scale", 1.0), t_end, tol)
    return coupled.symmetric_system(cfg.N, s.get("k0", 1.0), s.get("J", 1.0), t_end, tol)


def cmd_uncertainty(cfg: RunConfig) -> str:
    times = cfg.grid()
    sys_ = _system(cfg, cfg.horizon)
    exc = cfg.excitation or (0,) * sys_.N
    rows = coupled.uncertainty_table(sys_, exc, times)
    return emit_table(["t", "j", "var_x", "var_p", "sum_rule_dev_x", "sum_rule_dev_p"], rows, cfg)


def table1_report(seed: int = DELTA3_SEED) -> dict:
    entries = {}
    for n in (1, 2, 3):
        for name, m, deg in ((f"gamma_{n}", 0, n), (f"delta_{n}", n, 2 * n)):
            coeffs = reduced.ratio_coefficients(n, m, deg)
            entry: dict[str, Any] = {
                "coefficients": [float(c) for c in coeffs],
                "exact": [str(c) for c in coeffs],
            }
            ref = REFERENCE_RATIOS.get(name)
            if ref is not None:
                entry["reference"] = [str(c) for c in ref]
                entry["max_abs_error"] = max(abs(float(a - b)) for a, b in zip(coeffs, ref))
            entries[name] = entry
    rng = np.random.default_rng(seed)
    poly = np.polynomial.Polynomial([float(c) for c in reduced.ratio_coefficients(3, 3, 6)])
    checks = []
    for z in rng.uniform(0.0, 0.25, 3):
        z = float(max(z, 1e-3))
        ctx = reduced.context_for_z(z)
        direct = reduced.purity(ctx, 3, 3) / reduced.purity(ctx, 0, 0)
        checks.append({"z": z, "polynomial": float(poly(z)), "direct": direct,
                       "rel_error": abs(poly(z) - direct) / abs(direct)})
    entries["delta_3"]["validation"] = checks
    errs = [e["max_abs_error"] for e in entries.values() if "max_abs_error" in e]
    return {"ratios": entries, "max_abs_error": max(errs),
            "delta_3_max_rel_error": max(c["rel_error"] for c in checks)}


def cmd_table1(cfg: RunConfig) -> str:
    rep = table1_report(int(cfg.extra.get("seed", DELTA3_SEED)))
    if cfg.fmt == "json":
        return emit_report(rep, cfg)
    rows = []
    for name, e in rep["ratios"].items():
        refs = e.get("reference", [])
        for k, (c, ex) in enumerate(zip(e["coefficients"], e["exact"])):
            rows.append((name, k, c, ex, refs[k] if k < len(refs) else ""))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ratio", "power", "coefficient", "exact", "reference"])
    for name, k, c, ex, ref in rows:
        w.writerow([name, k, fmt(c), ex, ref])
    return buf.getvalue()


def fig1_rows(cfg: RunConfig):
    s = cfg.schedules
    k0 = parse_schedule(s.get("k0", {"kind": "quench", "initial": 1.0, "final": 2.0}))
    J = parse_schedule(s.get("J", {"kind": "quench", "initial": 1.0, "final": 2.0}))
    times = cfg.grid()
    tol = _tolerance(cfg)
    com = solve_ermakov(ModeFrequencySpec(k0, J, 0.0), cfg.horizon, tol)
    rel = solve_ermakov(ModeFrequencySpec(k0, J, 2.0), cfg.horizon, tol)
    return reduced.ratio_series(com, rel, times, nmax=3)


def cmd_fig1(cfg: RunConfig) -> str:
    header = ["t", "z"] + [f"gamma_{k}" for k in (1, 2, 3)] + [f"delta_{k}" for k in (1, 2, 3)]
    return emit_table(header, fig1_rows(cfg), cfg)


# -- verify -------------------------------------------------------------------

def _rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _check_single():
    err = 0.0
    for n in range(6):
        st = ModeState(n, 1.3, 0.4)
        W = oracle.ProductWigner.single(st)
        err = max(err, abs(oracle.quad_moment(W) - 1.0),
                  abs(oracle.quad_purity_full(W) - 1.0),
                  _rel(oracle.quad_moment(W, [4]), even_moment_x(st, 2)),
                  _rel(oracle.quad_moment(W, pp=[4]), even_moment_p(st, 2)))
    return err


def _coupled_err(sys_, exc, t):
    W = oracle.ProductWigner.from_states(sys_.modes, sys_.mode_states(exc, t))
    vx, vp = oracle.covariance(W)
    rep = coupled.coupled_variances(sys_, exc, t)
    return max(_rel(rep.var_x, vx), _rel(rep.var_p, vp))


def _check_two_coupled():
    s = coupled.symmetric_system(2, {"kind": "quench", "initial": 1, "final": 2},
                                 {"kind": "quench", "initial": 1, "final": 2}, t_end=2.0)
    return max(_coupled_err(s, (n, m), t) for n in range(3) for m in range(3) for t in (0.0, 1.3))


def _check_three_coupled():
    s = coupled.symmetric_system(3, 1.0, 1.0, t_end=1.0)
    return max(_coupled_err(s, e, 0.7) for e in ((0, 1, 0), (1, 2, 2), (2, 0, 1)))


def _check_general3():
    s = coupled.general3_system(1.0, 2.0, 3.0, 1.0, t_end=1.0)
    return max(_coupled_err(s, e, 0.5) for e in ((0, 0, 0), (1, 2, 0)))


def _two_mode(n, m):
    s = coupled.symmetric_system(2, 1.0, 1.0)
    states = s.mode_states((n, m), 0.0)
    return oracle.ProductWigner.from_states(s.modes, states), reduced.TwoModeContext.from_states(*states)


def _check_reduced():
    xs = np.array([-0.8, 0.0, 0.5])
    X, P = np.meshgrid(xs, xs + 0.1, indexing="ij")
    err = 0.0
    for n in range(3):
        for m in range(3):
            W, ctx = _two_mode(n, m)
            q = oracle.quad_reduced(W, X, P)
            j = reduced.reduced_wigner(ctx, n, m, X, P)
            err = max(err, float(np.max(np.abs(q - j)) / np.max(np.abs(q))))
    return err


def _check_purity():
    err = 0.0
    for n, m in ((0, 0), (1, 0), (2, 1), (2, 2)):
        W, ctx = _two_mode(n, m)
        err = max(err, _rel(oracle.quad_purity(W), reduced.purity(ctx, n, m)))
    return err


def _check_ermakov():
    spec = ModeFrequencySpec(ParamSchedule.quench(1.0, 4.0))
    traj = solve_ermakov(spec, 10.0)
    ts = np.linspace(0.0, 10.0, 201)
    num = traj.sample(ts)[:, 1]
    ana = np.array([quench_scale_factor(1.0, 2.0, t)[0] for t in ts])
    return float(np.max(np.abs(num - ana)))


CHECKS: dict[str, tuple[Callable[[], float], float]] = {
    "single_oscillator": (_check_single, 1e-6),
    "two_coupled_variances": (_check_two_coupled, 1e-6),
    "three_coupled_variances": (_check_three_coupled, 1e-6),
    "general3_variances": (_check_general3, 1e-6),
    "reduced_wigner": (_check_reduced, 1e-5),
    "purity": (_check_purity, 1e-6),
    "ermakov_quench": (_check_ermakov, 1e-8),
}


def verify(names=(), tol: float | None = None) -> dict:
    names = tuple(names) or tuple(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s) {unknown}; available: {sorted(CHECKS)}")
    results = []
    for name in names:
        fn, default = CHECKS[name]
        limit = default if tol is None else tol
        err = fn()
        results.append({"name": name, "error": err, "tolerance": limit, "passed": bool(err <= limit)})
    return {"passed": all(r["passed"] for r in results), "checks": results}


def cmd_verify(cfg: RunConfig) -> str:
    rep = verify(cfg.checks, cfg.tol)
    cfg.extra["_failed"] = not rep["passed"]
    return emit_report(rep, cfg)


COMMANDS = {
    "ermakov": cmd_ermakov,
    "uncertainty": cmd_uncertainty,
    "table1": cmd_table1,
    "fig1": cmd_fig1,
    "verify": cmd_verify,
}

_DEFAULTS = {
    "ermakov": {"t_end": 10.0, "steps": 101},
    "uncertainty": {"t_end": 1.0, "steps": 11},
    "table1": {"fmt": "json"},
    "fig1": {"t_end": 2 * math.pi, "steps": FIG1_STEPS},
    "verify": {"fmt": "json"},
}

_SCHEDULE_KEYS = ("k0", "J", "omega", "J12", "J13", "J23", "scale")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdho", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML or JSON config file")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), dest="fmt")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--ell", type=int)
        sp.add_argument("--N", type=int, dest="N")
        sp.add_argument("--t-start", type=float, dest="t_start")
        sp.add_argument("--t-end", type=float, dest="t_end")
        sp.add_argument("--steps", type=int)
        if name == "verify":
            sp.add_argument("--check", action="append", default=[],
                            help=f"run only this check (repeatable): {', '.join(CHECKS)}")
    return p


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a mapping")
    return data


def make_config(args: argparse.Namespace) -> RunConfig:
    raw = load_config(args.config)
    vals: dict[str, Any] = dict(_DEFAULTS[args.command])
    grid = raw.get("grid", {})
    for key in ("t_start", "t_end", "steps"):
        if key in grid:
            vals[key] = grid[key]
        if key in raw:
            vals[key] = raw[key]
    for key in ("N", "out", "tol"):
        if key in raw:
            vals[key] = raw[key]
    if "format" in raw:
        vals["fmt"] = raw["format"]
    exc = list(raw.get("excitation", []))
    for key in ("t_start", "t_end", "steps", "N", "out", "tol", "fmt"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    if any(k in raw for k in ("J12", "J13", "J23")):
        vals["N"] = 3
    overrides = [args.n, args.m, args.ell]
    if any(v is not None for v in overrides):
        N = int(vals.get("N", 2))
        exc = (exc + [0] * N)[:N] if exc else [0] * N
        for i, v in enumerate(overrides):
            if v is not None:
                if i >= N:
                    raise ValueError(f"--ell needs N >= 3, got N={N}")
                exc[i] = v
    schedules = {k: raw[k] for k in _SCHEDULE_KEYS if k in raw}
    extra = {k: v for k, v in raw.items() if k in ("c", "seed")}
    return RunConfig(args.command, schedules, int(vals.pop("N", 2)), tuple(int(e) for e in exc),
                     float(vals.pop("t_start", 0.0)), float(vals.pop("t_end", 1.0)),
                     int(vals.pop("steps", 11)), vals.pop("out", None), vals.pop("fmt", "csv"),
                     None if vals.get("tol") is None else float(vals.pop("tol")),
                     tuple(getattr(args, "check", []) or raw.get("checks", [])), extra)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (ValueError, OSError, yaml.YAMLError) as exc:
        parser.error(str(exc))
    try:
        text = COMMANDS[cfg.command](cfg)
    except (TdhoError, ValueError) as exc:
        print(f"tdho {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if cfg.extra.get("_failed") else 0


if __name__ == "__main__":
    sys.exit(main())

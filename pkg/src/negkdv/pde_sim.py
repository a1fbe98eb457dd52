"""Method-of-lines evolution of (-u_xx/u)_t = 2 u u_x.

Writing w = u_t the equation reads u w'' - u'' w = -(u^4/2)', i.e.

    u w' - u' w = F,   F = const - u^4/2,

so w/u = c0 + D^{-1}(F/u^2).  The constant in F is fixed by the boundary
closure and c0 (the multiple of u that may be added to u_t without changing
m = -u_xx/u) by the gauge.  No spatial derivatives of u enter w, only
antiderivatives, so the scheme has no dispersive time-step restriction.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PositivityLossError, RejectedInput
from .grid import Grid, GridFunction, cumtrapz_array, diff_array

SLICES_SCHEMA = "negkdv.slices.v1"
SUMMARY_SCHEMA = "negkdv.sim_summary.v1"
U_MIN = 1e-6


@dataclass(frozen=True)
class SimState:
    grid: Grid
    u: GridFunction
    t: float = 0.0
    closure: str = "periodic"
    gauge: str = "conserve_L2"
    u_min: float = U_MIN

    def __post_init__(self):
        if self.closure not in ("periodic", "decaying"):
            raise RejectedInput(f"unknown closure {self.closure!r}")
        if self.gauge not in ("conserve_L2", "anchored"):
            raise RejectedInput(f"unknown gauge {self.gauge!r}")
        if (self.closure == "periodic") != self.grid.is_periodic:
            raise RejectedInput("closure must match the grid boundary mode")

    def floor(self) -> float:
        # decaying data only has to stay positive; its tails are ~1e-10 * max u
        return self.u_min if self.closure == "periodic" else 0.0

    def check_positive(self, u=None) -> None:
        vals = self.u.values if u is None else u
        m = float(np.min(vals))
        if not m > self.floor():
            raise PositivityLossError(
                f"min(u) = {m:.3e} dropped below {self.floor():g} at t = {self.t:.6g}", self)


def _quad(values, grid):
    if grid.is_periodic:
        return float(np.sum(values)) * grid.dx
    return float(np.trapezoid(values, dx=grid.dx))


def _velocity(u: np.ndarray, grid: Grid, closure: str, gauge: str) -> np.ndarray:
    i0 = int(np.argmax(u))
    u2 = u * u
    if closure == "decaying":
        # F0 = -u(x0)^4/2 makes F vanish in both tails
        q = -0.5 * u2
    else:
        const = 0.5 * np.sum(u2) / np.sum(1.0 / u2)
        q = const / u2 - 0.5 * u2
        q = q - q.mean()  # round-off only; the mean is zero by construction
    G = cumtrapz_array(q, grid.dx)
    G = G - G[i0]
    if gauge == "anchored":
        c0 = 0.0
    else:
        c0 = -_quad(u2 * G, grid) / _quad(u2, grid)
    return u * (c0 + G)


def time_derivative(state: SimState) -> GridFunction:
    """u_t for the given state (see the module docstring)."""
    state.check_positive()
    return GridFunction(state.grid, _velocity(state.u.values, state.grid, state.closure, state.gauge))


def step(state: SimState, dt: float) -> SimState:
    """One classical RK4 step."""
    if not dt > 0:
        raise RejectedInput("dt must be positive")
    g, cl, ga = state.grid, state.closure, state.gauge
    u = state.u.values

    def f(v):
        state.check_positive(v)
        return _velocity(v, g, cl, ga)

    k1 = f(u)
    k2 = f(u + 0.5 * dt * k1)
    k3 = f(u + 0.5 * dt * k2)
    k4 = f(u + dt * k3)
    un = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    new = replace(state, u=GridFunction(g, un), t=state.t + dt)
    new.check_positive()
    return new


def m_field(u: GridFunction, accuracy: str = "second") -> GridFunction:
    g = u.grid
    return GridFunction(g, -diff_array(u.values, g.dx, 2, accuracy, g.is_periodic) / u.values)


@dataclass
class Diagnostics:
    l2: float
    min_u: float
    m_field: GridFunction


def diagnostics(state: SimState) -> Diagnostics:
    u = state.u.values
    return Diagnostics(_quad(u * u, state.grid), float(np.min(u)), m_field(state.u))


def residual_check(slices, dt: float, zero_guard: float = 0.05, edge: int = 3) -> float:
    """max |(-u_xx/u)_t - 2 u u_x| over interior points of the middle slices.

    Centered differences in t (spacing ``dt``) and x.  Points where |u| is
    below ``zero_guard * max|u|`` are skipped since m = -u_xx/u is formed by
    division; on decaying grids ``edge`` points at each end are dropped.
    """
    if len(slices) < 3:
        raise RejectedInput("residual_check needs at least three time slices")
    g = slices[0].grid
    us = [s.values for s in slices]
    with np.errstate(divide="ignore", invalid="ignore"):
        ms = [-diff_array(u, g.dx, 2, "second", g.is_periodic) / u for u in us]
    worst = 0.0
    for k in range(1, len(us) - 1):
        u = us[k]
        mt = (ms[k + 1] - ms[k - 1]) / (2.0 * dt)
        rhs = 2.0 * u * diff_array(u, g.dx, 1, "second", g.is_periodic)
        ok = np.ones(g.n, dtype=bool)
        for uu in us[k - 1:k + 2]:
            ok &= np.abs(uu) >= zero_guard * np.max(np.abs(uu))
        if not g.is_periodic:
            ok[:edge] = False
            ok[-edge:] = False
        if np.any(ok):
            worst = max(worst, float(np.max(np.abs(mt - rhs)[ok])))
    return worst


# ---------------------------------------------------------------------------
# configured runs

@dataclass
class RunResult:
    times: list
    slices: list
    m_slices: list
    summary: dict

    def slices_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={SLICES_SCHEMA}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "u", "m"])
        for t, s, m in zip(self.times, self.slices, self.m_slices):
            for x, u, mv in zip(s.grid.x, s.values, m.values):
                w.writerow([repr(float(t)), repr(float(x)), repr(float(u)), repr(float(mv))])
        return buf.getvalue()


def initial_profile(config: dict):
    """Closed-form profile named by a run configuration (derived widths)."""
    from .closed_form import make_profile
    from .phase_plane import TravelingWaveParams

    params = TravelingWaveParams(float(config["c"]), float(config["g"]))
    case = config["case"]
    h = config.get("h")
    return make_profile(params, case, h=h)


def build_grid(config: dict, profile) -> Grid:
    gc = config["grid"]
    n = int(gc["n"])
    if config["closure"] == "periodic":
        dx = gc.get("dx")
        if dx is None:
            if profile.period is None:
                raise RejectedInput("periodic closure needs a periodic profile or an explicit dx")
            dx = profile.period / n
        return Grid(float(gc.get("x0", 0.0) or 0.0), float(dx), n, "periodic")
    return Grid(float(gc["x0"]), float(gc["dx"]), n, "decaying")


def run(config: dict) -> RunResult:
    """Evolve a positive traveling wave and compare with its exact translate."""
    profile = initial_profile(config)
    grid = build_grid(config, profile)
    c = profile.params.c
    x = grid.x
    u0 = GridFunction(grid, profile.eval(x))
    state = SimState(grid, u0, 0.0, config["closure"], config.get("gauge", "conserve_L2"),
                     float(config.get("u_min", U_MIN)))
    dt = float(config["dt"])
    t_end = float(config["t_end"])
    nsteps = int(round(t_end / dt))
    if not math.isclose(nsteps * dt, t_end, rel_tol=1e-9, abs_tol=1e-12):
        raise RejectedInput("t_end must be an integer multiple of dt")
    every = int(config.get("output_every", nsteps) or nsteps)
    l2_0 = diagnostics(state).l2
    times, slices, ms = [0.0], [u0], [m_field(u0)]
    for i in range(1, nsteps + 1):
        state = step(state, dt)
        if i % every == 0 or i == nsteps:
            times.append(state.t)
            slices.append(state.u)
            ms.append(m_field(state.u))
    exact = profile.eval(x - c * state.t)
    d = diagnostics(state)
    summary = {
        "schema": SUMMARY_SCHEMA,
        "final_error_vs_translate": float(np.max(np.abs(state.u.values - exact))),
        "l2_drift": abs(d.l2 - l2_0) / l2_0,
        "min_u": d.min_u,
        "t": state.t,
        "steps": nsteps,
        "dx": grid.dx,
        "n": grid.n,
    }
    return RunResult(times, slices, ms, summary)

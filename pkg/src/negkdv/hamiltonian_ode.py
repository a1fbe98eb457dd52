"""Numerical integration of the planar traveling-wave system.

    U' = y,   y' = g U + U**3 / c

The Hamiltonian is separable (kinetic y^2/2, potential -g U^2/2 - U^4/(4c)),
so the default integrator is leapfrog in velocity-Verlet form.  Classical
RK4 is kept as a non-symplectic reference.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, RejectedInput
from .phase_plane import TravelingWaveParams, hamiltonian

TRAJECTORY_SCHEMA = "negkdv.trajectory.v1"
OVERFLOW_GUARD = 1e8


@dataclass(frozen=True)
class OdeState:
    U: float
    y: float
    xi: float = 0.0


@dataclass
class Trajectory:
    params: TravelingWaveParams
    xi: np.ndarray
    U: np.ndarray
    y: np.ndarray
    dxi: float
    method: str
    max_energy_error: float
    energy_drift: float

    @property
    def H(self) -> np.ndarray:
        return hamiltonian(self.params, self.U, self.y)

    @property
    def states(self):
        return [OdeState(float(u), float(v), float(x)) for x, u, v in zip(self.xi, self.U, self.y)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={TRAJECTORY_SCHEMA}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi", "U", "y", "H"])
        for row in zip(self.xi, self.U, self.y, self.H):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def _leapfrog(U, y, h, g, inv_c, steps, every, guard):
    xs, ys, n_done = [U], [y], 0
    half = 0.5 * h
    a = g * U + inv_c * U * U * U
    for i in range(1, steps + 1):
        y += half * a
        U += h * y
        a = g * U + inv_c * U * U * U
        y += half * a
        if not abs(U) <= guard:
            return xs, ys, n_done, (U, y)
        n_done = i
        if i % every == 0:
            xs.append(U)
            ys.append(y)
    return xs, ys, n_done, None


def _rk4(U, y, h, g, inv_c, steps, every, guard):
    def f(u):
        return g * u + inv_c * u * u * u

    xs, ys, n_done = [U], [y], 0
    for i in range(1, steps + 1):
        k1u, k1y = y, f(U)
        k2u, k2y = y + 0.5 * h * k1y, f(U + 0.5 * h * k1u)
        k3u, k3y = y + 0.5 * h * k2y, f(U + 0.5 * h * k2u)
        k4u, k4y = y + h * k3y, f(U + h * k3u)
        U += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        if not abs(U) <= guard:
            return xs, ys, n_done, (U, y)
        n_done = i
        if i % every == 0:
            xs.append(U)
            ys.append(y)
    return xs, ys, n_done, None


_METHODS = {"leapfrog": _leapfrog, "rk4": _rk4}


def integrate(params: TravelingWaveParams, initial: OdeState, dxi: float, steps: int,
              method: str = "leapfrog", every: int = 1,
              overflow_guard: float = OVERFLOW_GUARD) -> Trajectory:
    """Advance ``initial`` by ``steps`` steps of size ``dxi``.

    Only every ``every``-th state is stored.  Raises :class:`DivergenceError`
    (carrying the partial trajectory) when |U| leaves ``overflow_guard``,
    which is the expected outcome on the unbounded orbits of panels F1_1/F1_2.
    """
    if method not in _METHODS:
        raise RejectedInput(f"unknown method {method!r}")
    if not dxi > 0:
        raise RejectedInput("dxi must be positive")
    if steps < 1 or every < 1:
        raise RejectedInput("steps and every must be >= 1")
    U0, y0 = float(initial.U), float(initial.y)
    Us, ys, n_done, bad = _METHODS[method](U0, y0, float(dxi), params.g, 1.0 / params.c,
                                           int(steps), int(every), overflow_guard)
    U = np.array(Us)
    y = np.array(ys)
    xi = initial.xi + dxi * every * np.arange(U.size)
    traj = _annotate(params, xi, U, y, dxi, method)
    if bad is not None:
        last = OdeState(float(U[-1]), float(y[-1]), float(xi[-1]))
        raise DivergenceError(
            f"|U| exceeded {overflow_guard:g} after {n_done} steps (xi = {initial.xi + n_done * dxi:.6g})",
            last_state=last, trajectory=traj)
    return traj


def _annotate(params, xi, U, y, dxi, method):
    H = hamiltonian(params, U, y)
    err = float(np.max(np.abs(H - H[0]))) if H.size else 0.0
    traj = Trajectory(params, xi, U, y, dxi, method, err, math.nan)
    traj.energy_drift = secular_energy_drift(traj)
    return traj


def _section_crossings(xi, U, y, anchor):
    """Indices i and fractions s with y crossing 0 downward between i and i+1, U > anchor."""
    down = (y[:-1] > 0) & (y[1:] <= 0)
    idx = np.nonzero(down)[0]
    s = y[idx] / (y[idx] - y[idx + 1])
    Uc = U[idx] + s * (U[idx + 1] - U[idx])
    keep = Uc > anchor
    return idx[keep], s[keep]


def secular_energy_drift(traj: Trajectory) -> float:
    """Largest change of H between returns to the Poincare section.

    Leapfrog conserves a modified Hamiltonian, so H itself oscillates at
    O(dxi^2) around its initial value within every revolution.  Comparing H
    at the same phase (the section y = 0 from above) isolates the secular
    part.  Falls back to the end-to-end change if the orbit never returns.
    """
    H = traj.H
    if H.size < 3:
        return 0.0
    anchor = 0.5 * (float(np.min(traj.U)) + float(np.max(traj.U)))
    idx, s = _section_crossings(traj.xi, traj.U, traj.y, anchor)
    if idx.size < 2:
        return float(abs(H[-1] - H[0]))
    Hc = H[idx] + s * (H[idx + 1] - H[idx])
    return float(np.max(np.abs(Hc - Hc[0])))


def measure_period(traj: Trajectory, anchor: float | None = None) -> float | None:
    """Mean spacing of successive downward y = 0 crossings with U > anchor."""
    if traj.U.size < 3 or np.ptp(traj.U) == 0.0:
        return None
    if anchor is None:
        anchor = 0.5 * (float(np.min(traj.U)) + float(np.max(traj.U)))
    idx, s = _section_crossings(traj.xi, traj.U, traj.y, anchor)
    if idx.size < 2:
        return None
    step = traj.xi[1] - traj.xi[0]
    times = traj.xi[idx] + s * step
    return float((times[-1] - times[0]) / (times.size - 1))


def reverse(state: OdeState) -> OdeState:
    return OdeState(state.U, -state.y, state.xi)

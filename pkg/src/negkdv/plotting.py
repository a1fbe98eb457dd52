"""Matplotlib figures for the ``report`` command.

Figures are written with the non-interactive Agg backend next to the CSV and
JSON files they are drawn from, so every plotted number can be read back.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .closed_form import make_profile  # noqa: E402
from .phase_plane import TravelingWaveParams, classify, level_curve  # noqa: E402

PANEL_PARAMS = {
    "F1_1": (1.0, 0.0), "F1_2": (1.0, 1.0), "F1_3": (-1.0, 1.0),
    "F1_4": (-1.0, 0.0), "F1_5": (-1.0, -1.0), "F1_6": (1.0, -1.0),
}

STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "lines.linewidth": 1.1,
}


def _levels(params):
    p = classify(params)
    levels = [0.0]
    if p.h1 is not None:
        levels.append(p.h1)
        levels += [p.h1 * f for f in (0.3, 0.7)]
    levels += [0.15, 0.6, -0.15]
    return sorted(set(levels)), p


def portrait_grid(path, U_max: float = 2.5):
    """Six-panel phase-portrait figure, one panel per (sign c, sign g)."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(2, 3, figsize=(9, 6))
        U = np.linspace(-U_max, U_max, 1201)
        for ax, (panel, (c, g)) in zip(axes.ravel(), PANEL_PARAMS.items()):
            params = TravelingWaveParams(c, g)
            levels, portrait = _levels(params)
            for h in levels:
                y = level_curve(params, h, U)
                special = h == 0.0 or (portrait.h1 is not None and h == portrait.h1)
                kw = dict(color="C3" if special else "0.4", lw=1.3 if special else 0.8)
                ax.plot(U, y, **kw)
                ax.plot(U, -y, **kw)
            for e in portrait.equilibria:
                ax.plot(e.U, e.y, "o" if e.kind == "center" else "x", color="k", ms=4)
            ax.set_xlim(-U_max, U_max)
            ax.set_ylim(-U_max, U_max)
            ax.set_title(f"{panel}: c={c:g}, g={g:g}")
            ax.set_xlabel("U")
            ax.set_ylabel("y")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def profile_panels(path, profiles: dict, window: float = 12.0):
    """One axis per closed-form family; poles are left as gaps."""
    with plt.rc_context(STYLE):
        n = len(profiles)
        cols = 4
        rows = math.ceil(n / cols)
        fig, axes = plt.subplots(rows, cols, figsize=(11, 2.6 * rows), squeeze=False)
        for ax in axes.ravel()[n:]:
            ax.set_visible(False)
        for ax, (label, prof) in zip(axes.ravel(), profiles.items()):
            xi = np.linspace(-window, window, 2001)
            for s in prof.singularities:
                xi = xi[np.abs(xi - s) > 0.05]
            U = prof.eval(xi)
            if prof.singularities:
                U = np.where(np.abs(U) > 10, np.nan, U)
            ax.plot(xi, U)
            ax.axhline(0.0, color="0.8", lw=0.6)
            ax.set_title(label)
            ax.set_xlabel("xi")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def breaking_figure(path, c: float = 1.0, xi0: float = -1.0):
    """Both breaking-wave branches with the pole at xi = -xi0."""
    params = TravelingWaveParams(c, 0.0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 4))
        xi = np.linspace(-4, 6, 2001)
        xi = xi[np.abs(xi + xi0) > 0.02]
        for branch in ("plus", "minus"):
            prof = make_profile(params, "BREAKING_23", branch=branch, xi0=xi0)
            U = prof.eval(xi)
            U = np.where(np.abs(U) > 8, np.nan, U)
            ax.plot(xi, U, label=branch)
        ax.set_ylim(-8, 8)
        ax.set_xlabel("xi")
        ax.set_ylabel("U")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def convergence_figure(path, report: dict):
    keys = ["L_sum_vs_factored", "K_sum_vs_factored", "K_u2", "lenard_max", "lax"]
    rows = report["levels"]
    dx = np.array([r["dx"] for r in rows])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 4))
        for k in keys:
            ax.loglog(dx, [r[k] for r in rows], "o-", label=k)
        ax.loglog(dx, (dx / dx[0]) ** 2 * rows[0]["K_u2"], "k--", lw=0.7, label="dx^2")
        ax.set_xlabel("dx")
        ax.set_ylabel("relative residual")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def simulation_figure(path, result, profile):
    with plt.rc_context(STYLE):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.5))
        c = profile.params.c
        for t, s in zip(result.times, result.slices):
            a1.plot(s.grid.x, s.values, lw=0.8)
            a2.plot(s.grid.x, s.values - profile.eval(s.grid.x - c * t), lw=0.8, label=f"t={t:.2f}")
        a1.set_xlabel("x")
        a1.set_ylabel("u")
        a2.set_xlabel("x")
        a2.set_ylabel("u - exact translate")
        a2.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)

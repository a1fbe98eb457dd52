"""Phase-plane analysis of the traveling-wave reduction.

Substituting u(x, t) = U(x - c t) and integrating once gives the planar
system

    U' = y,    y' = g U + U**3 / c,

with Hamiltonian H(U, y) = y**2/2 - g U**2/2 - U**4/(4 c).  The sign pattern
of (c, g) selects one of six phase portraits (panels F1_1 ... F1_6).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RejectedInput

SCHEMA = "negkdv.portrait.v1"

# orbit family kind -> closed-form case id
FAMILY_CASE = {
    "unbounded_breaking": "BREAKING_23",
    "saddle_level_exponential": "EXP_24",
    "homoclinic_soliton": "SOLITON_25",
    "periodic_dn": "DN_26",
    "periodic_cn_outer": "CN_27",
    "heteroclinic_kink": "KINK_28",
    "periodic_sn_inner": "SN_29",
}


@dataclass(frozen=True)
class TravelingWaveParams:
    c: float
    g: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.g)):
            raise RejectedInput("c and g must be finite")
        if self.c == 0:
            raise RejectedInput("wave speed c must be non-zero")

    @property
    def h1(self) -> float:
        """Energy of the off-origin equilibria, c g^2 / 4."""
        return 0.25 * self.c * self.g**2


@dataclass(frozen=True)
class Equilibrium:
    U: float
    y: float
    kind: str
    eigenvalues: tuple = ()


@dataclass(frozen=True)
class OrbitFamily:
    kind: str
    h_range: tuple
    solution_case: str
    # signed squares of the quartic roots, e.g. {"r1_sq": .., "r2_sq": ..}
    roots: dict = field(default_factory=dict)

    def contains(self, h: float) -> bool:
        lo, hi = self.h_range
        if lo == hi:
            return h == lo
        return lo < h < hi

    def to_dict(self) -> dict:
        lo, hi = self.h_range
        d = {"kind": self.kind,
             "h_range": [_json_float(lo), _json_float(hi)],
             "solution_case": self.solution_case}
        if self.roots:
            d["roots"] = dict(self.roots)
        return d


@dataclass(frozen=True)
class PhasePortrait:
    params: TravelingWaveParams
    equilibria: tuple
    h0: float
    h1: float | None
    panel: str
    families: tuple

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "c": self.params.c,
            "g": self.params.g,
            "h0": self.h0,
            "h1": self.h1,
            "panel": self.panel,
            "equilibria": [{"U": e.U, "y": e.y, "kind": e.kind} for e in self.equilibria],
            "families": [f.to_dict() for f in self.families],
        }


def _json_float(x):
    return None if math.isinf(x) else x


def hamiltonian(params: TravelingWaveParams, U, y):
    return 0.5 * y**2 - 0.5 * params.g * U**2 - U**4 / (4.0 * params.c)


def vector_field(params: TravelingWaveParams, U, y):
    return y, params.g * U + U**3 / params.c


def panel(c: float, g: float) -> str:
    """Portrait panel id (F1_1 ... F1_6) for the sign pattern of (c, g)."""
    if c == 0:
        raise RejectedInput("wave speed c must be non-zero")
    if c > 0:
        return "F1_1" if g == 0 else ("F1_2" if g > 0 else "F1_6")
    return "F1_4" if g == 0 else ("F1_3" if g > 0 else "F1_5")


def _linear_kind(params, U):
    a = params.g + 3.0 * U**2 / params.c
    if a > 0:
        return "saddle", (math.sqrt(a), -math.sqrt(a))
    if a < 0:
        w = math.sqrt(-a)
        return "center", (complex(0, w), complex(0, -w))
    return "degenerate", (0.0, 0.0)


def classify(params: TravelingWaveParams) -> PhasePortrait:
    c, g = params.c, params.g
    eq = []
    Us = [0.0]
    if c * g < 0:
        r = math.sqrt(abs(c * g))
        Us = [-r, 0.0, r]
    for U in Us:
        kind, eig = _linear_kind(params, U)
        if kind == "degenerate" and U == 0.0 and c < 0:
            # nilpotent origin; H = y^2/2 + U^4/(4|c|) is definite there
            kind = "center"
        eq.append(Equilibrium(U, 0.0, kind, eig))
    h1 = params.h1 if c * g < 0 else None
    return PhasePortrait(params, tuple(eq), 0.0, h1, panel(c, g), tuple(_families(params)))


def _families(params):
    c, g = params.c, params.g
    inf = math.inf
    if c > 0 and g == 0:
        return [OrbitFamily("unbounded_breaking", (0.0, 0.0), "BREAKING_23")]
    if c > 0 and g > 0:
        return [OrbitFamily("saddle_level_exponential", (0.0, 0.0), "EXP_24")]
    if c > 0:  # g < 0
        h1 = params.h1
        return [OrbitFamily("heteroclinic_kink", (h1, h1), "KINK_28"),
                OrbitFamily("periodic_sn_inner", (0.0, h1), "SN_29")]
    if g > 0:  # c < 0
        h1 = params.h1
        return [OrbitFamily("homoclinic_soliton", (0.0, 0.0), "SOLITON_25"),
                OrbitFamily("periodic_dn", (h1, 0.0), "DN_26"),
                OrbitFamily("periodic_cn_outer", (0.0, inf), "CN_27")]
    return [OrbitFamily("periodic_cn_outer", (0.0, inf), "CN_27")]


def quartic_roots(params: TravelingWaveParams, h: float) -> dict | None:
    """Signed squares of the turning points of the level H = h.

    For c < 0 returns ``r1_sq >= r2_sq`` with
    y^2 = (r1^2 - U^2)(U^2 - r2^2) / (2|c|); for c > 0 returns ``z1_sq >= z2_sq``
    with y^2 = (z1^2 - U^2)(z2^2 - U^2) / (2c).  None when the discriminant
    g^2 c^2 - 4 c h is negative (no real factorization).
    """
    c, g = params.c, params.g
    disc = g * g * c * c - 4.0 * c * h
    if disc < 0:
        return None
    s = math.sqrt(disc)
    if c < 0:
        base = g * abs(c)
        return {"r1_sq": base + s, "r2_sq": base - s}
    base = abs(g) * c
    return {"z1_sq": base + s, "z2_sq": base - s}


def orbit_for_level(params: TravelingWaveParams, h: float) -> OrbitFamily | None:
    for fam in _families(params):
        if fam.contains(h):
            roots = quartic_roots(params, h)
            if fam.kind in ("periodic_dn", "periodic_cn_outer", "periodic_sn_inner"):
                if roots is None:
                    return None
                return OrbitFamily(fam.kind, fam.h_range, fam.solution_case, roots)
            return fam
    return None


def level_curve(params: TravelingWaveParams, h: float, U):
    """Upper branch y >= 0 of the level set H = h over the given U samples.

    Points where the level set has no real y are returned as NaN.
    """
    U = np.asarray(U, dtype=float)
    y2 = 2.0 * h + params.g * U**2 + U**4 / (2.0 * params.c)
    with np.errstate(invalid="ignore"):
        return np.where(y2 >= 0, np.sqrt(np.abs(y2)), np.nan)

"""Traveling waves of (-u_xx/u)_t = 2 u u_x and numerical checks of its Lax pair."""
from .closed_form import WaveProfile, audit_all, make_profile
from .grid import Grid, GridFunction
from .phase_plane import TravelingWaveParams, classify, hamiltonian

__all__ = ["Grid", "GridFunction", "TravelingWaveParams", "WaveProfile", "audit_all",
           "classify", "hamiltonian", "make_profile"]
__version__ = "0.1.0"

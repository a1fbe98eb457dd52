"""Jacobi elliptic functions and the complete elliptic integral K.

Everything is parametrised by the modulus ``k`` (``0 <= k <= 1``), not by
the parameter ``m = k**2`` used by scipy and by Abramowitz & Stegun.  Use
:func:`modulus_from_parameter` / :func:`parameter_from_modulus` to convert.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import RejectedInput

AGM_MAX_ITER = 64
# 1 - k below this is treated as k = 1 (hyperbolic limit)
HYPERBOLIC_CUTOFF = 1e-12


def modulus_from_parameter(m: float) -> float:
    if not 0.0 <= m <= 1.0:
        raise RejectedInput(f"parameter m must lie in [0, 1], got {m}")
    return math.sqrt(m)


def parameter_from_modulus(k: float) -> float:
    _check_modulus(k)
    return k * k


def complementary_modulus(k: float) -> float:
    """k' = sqrt(1 - k^2), computed without cancellation near k = 1."""
    return math.sqrt((1.0 - k) * (1.0 + k))


def _check_modulus(k: float) -> None:
    if not (math.isfinite(k) and 0.0 <= k <= 1.0):
        raise RejectedInput(f"modulus must lie in [0, 1], got {k}")


def _agm_sequence(k: float):
    a, b, c = 1.0, complementary_modulus(k), k
    seq = [(a, c)]
    for _ in range(AGM_MAX_ITER):
        if abs(c) <= 4.0 * np.finfo(float).eps * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        seq.append((a, c))
    return seq


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 AGM(1, k'))."""
    _check_modulus(k)
    if k == 1.0:
        raise RejectedInput("K(k) diverges at k = 1")
    a = _agm_sequence(k)[-1][0]
    return math.pi / (2.0 * a)


def jacobi(x, k: float):
    """Return ``(sn, cn, dn)`` of ``x`` (scalar or array) for modulus ``k``.

    Uses the AGM / descending Landen scheme: run the AGM forward, scale the
    argument to ``2**N a_N x`` and recover the amplitude by the backward
    arcsine recursion.
    """
    _check_modulus(k)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise RejectedInput("jacobi() needs a finite argument")
    if k == 0.0:
        sn, cn, dn = np.sin(xa), np.cos(xa), np.ones_like(xa)
    elif 1.0 - k < HYPERBOLIC_CUTOFF:
        sech = 1.0 / np.cosh(xa)
        sn, cn, dn = np.tanh(xa), sech, sech.copy()
    else:
        seq = _agm_sequence(k)
        nsteps = len(seq) - 1
        a_n = seq[-1][0]
        phi = (2.0**nsteps) * a_n * xa
        for a_j, c_j in reversed(seq[1:]):
            phi = 0.5 * (phi + np.arcsin(c_j / a_j * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        dn = np.sqrt(1.0 - (k * sn) ** 2)
    if np.ndim(x) == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def sn(x, k):
    return jacobi(x, k)[0]


def cn(x, k):
    return jacobi(x, k)[1]


def dn(x, k):
    return jacobi(x, k)[2]

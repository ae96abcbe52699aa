"""Harmonic quantization of current-biased junctions and an anharmonic check.

A phase qubit (or a shared junction) near the biased minimum ``phi0`` is
treated as an oscillator with curvature ``K = E_J cos(phi0) + E_r``::

    lambda = (2 E_C / K) ** 0.25        phi - phi0 = lambda (a + a^+)
    f      = sqrt(8 E_C K)              (GHz)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import PhaseQubitParams, SharedJunctionParams, josephson_inductance_ph

__all__ = [
    "PhaseMode",
    "junction_inductance",
    "oracle_diagonalize",
    "quantize",
    "quantize_full",
    "ring_inductance",
]


@dataclass(frozen=True)
class PhaseMode:
    label: str
    role: str  # "p" (phase qubit), "P" (shared, per axis) or "O"
    lam: float
    omega_ghz: float
    curvature_ghz: float


def _mode(label, role, ec, ej, bias, er) -> PhaseMode:
    if not abs(bias) < 1:
        raise ValueError(f"{label}: bias at or beyond the critical current")
    k = ej * math.cos(math.asin(bias)) + er
    if k <= 0:
        raise ValueError(f"{label}: well curvature not positive")
    return PhaseMode(label, role, (2 * ec / k) ** 0.25, math.sqrt(8 * ec * k), k)


def quantize(params: PhaseQubitParams | SharedJunctionParams) -> PhaseMode:
    """Closed-form (lambda, omega) of a phase qubit or shared junction.

    Shared junctions use the approximate form without the loop energy, as the
    coupling formulas downstream assume ``lambda^2 / f = 1 / (2 E_J)``.
    """
    if isinstance(params, PhaseQubitParams):
        return _mode(params.label, "p", params.ecp_ghz, params.ejp_ghz, params.bias_ratio, params.er_ghz)
    role = "O" if params.label == "O" else "P"
    return _mode(params.label, role, params.ec_ghz, params.ej_ghz, params.bias_ratio, 0.0)


def quantize_full(shared: SharedJunctionParams, el_ghz: float) -> PhaseMode:
    """Shared-junction mode including the loop energy ``E_Lp`` in the curvature."""
    role = "O" if shared.label == "O" else "P"
    return _mode(shared.label, role, shared.ec_ghz, shared.ej_ghz, shared.bias_ratio, el_ghz)


def junction_inductance(ej_ghz: float) -> float:
    """Josephson inductance Phi0^2 / (4 pi^2 E_J) in pH."""
    return josephson_inductance_ph(ej_ghz)


def ring_inductance(lg_ph: float, shared_ej_ghz) -> float:
    """Ring inductance of a flux-qubit loop: geometric part plus the shared junctions."""
    return lg_ph + sum(junction_inductance(e) for e in shared_ej_ghz)


def _ladder(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n)), 1)


def oracle_diagonalize(ec_ghz: float, ej_ghz: float, bias: float, er_ghz: float,
                       basis_size: int = 60) -> dict:
    """Diagonalize 4E_C N^2 - E_J(cos phi + bias phi) + E_r (phi - phi0)^2 / 2.

    The oscillator basis is centred on the biased minimum, which keeps the
    calculation inside the local well of the tilted washboard. ``N^2`` and the
    quadratic terms are exact band matrices; cos and sin of the displacement
    are evaluated in the eigenbasis of the (truncated) position operator.
    """
    if basis_size < 30:
        raise ValueError("basis_size must be >= 30")
    phi0 = math.asin(bias)
    mode = _mode("oracle", "p", ec_ghz, ej_ghz, bias, er_ghz)
    lam = mode.lam
    a = _ladder(basis_size + 2)
    ad = a.T
    # exact squares on the enlarged space, then truncated
    x2 = (lam**2 * (a + ad) @ (a + ad))[:basis_size, :basis_size]
    n2 = (-(a - ad) @ (a - ad) / (4 * lam**2))[:basis_size, :basis_size]
    x = lam * (a + ad)[:basis_size, :basis_size]
    w, v = np.linalg.eigh(x)
    cos_x = (v * np.cos(w)) @ v.T
    sin_x = (v * np.sin(w)) @ v.T
    # cos(phi0 + x) + bias (phi0 + x), constant dropped
    pot = -ej_ghz * (math.cos(phi0) * cos_x - math.sin(phi0) * sin_x + bias * x)
    h = 4 * ec_ghz * n2 + pot + 0.5 * er_ghz * x2
    e = scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=[0, 2])
    return {
        "omega_numeric": float(e[1] - e[0]),
        "anharmonicity": float((e[2] - e[1]) - (e[1] - e[0])),
        "omega_closed": mode.omega_ghz,
    }

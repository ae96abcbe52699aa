"""Relaxation and dephasing of the flux qubits and the feasibility comparison.

Rates are in 1/us (so T = 1/Gamma is in microseconds). For a transition at
``f10`` the Ohmic environment gives::

    Gamma_1 = [(2e Cg/C)^2 |N_01|^2 Re Z + M^2 |I_01|^2 Re Y] (2 pi f10) / hbar
    Gamma_phi = sum_i 2 pi |A_i| sqrt(alpha_i ln(w_t / w_c))
    Gamma_2 = Gamma_1 / 2 + Gamma_phi

with ``A_i = d f10 / d f1`` in GHz per flux quantum. No thermal factor is
applied (the operating temperature is far below ``h f10 / k_B``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import fluxqubit
from .core import CONSTANTS, FluxQubitParams, NoiseEnvironment, SimulationConfig

__all__ = [
    "DecoherenceReport",
    "Transition",
    "dephasing_rate",
    "feasibility_report",
    "flux_sensitivity",
    "gap_sweep",
    "relaxation_rate",
    "transition_of",
    "transition_time_us",
]

MICROSECOND_THRESHOLD_US = 1.0
RATIO_CLAIM = 3.0


@dataclass(frozen=True)
class Transition:
    f10_ghz: float
    current_na: float  # current matrix element used for flux noise
    charge_element: float  # |<0|N|1>|


@dataclass
class DecoherenceReport:
    gamma1: float
    gamma_phi: float
    gamma2: float
    t1_us: float
    t2_us: float
    transition_us: dict
    ratio: dict
    satisfied: bool
    notes: list
    per_qubit: list

    def as_dict(self) -> dict:
        return {
            "gamma1_per_us": self.gamma1, "gamma_phi_per_us": self.gamma_phi,
            "gamma2_per_us": self.gamma2, "t1_us": self.t1_us, "t2_us": self.t2_us,
            "transition_us": dict(self.transition_us), "ratio": dict(self.ratio),
            "satisfied": self.satisfied, "notes": list(self.notes),
            "per_qubit": list(self.per_qubit),
        }


def _inv(rate: float) -> float:
    return math.inf if rate == 0 else 1.0 / rate


def transition_of(sol: fluxqubit.FluxQubitSolution, element: str = "offdiag") -> Transition:
    """Splitting and matrix elements of a solved flux qubit.

    ``element="offdiag"`` uses ``|<0|I|1>|``; ``"diagonal"`` uses the
    persistent-current difference ``|<1|I|1> - <0|I|0>| / 2``.
    """
    cur = fluxqubit.circulating_current(sol)
    if element == "offdiag":
        i01 = cur["I_ge"]
    elif element == "diagonal":
        i01 = abs(cur["I_ee"] - cur["I_gg"]) / 2
    else:
        raise ValueError("element must be 'offdiag' or 'diagonal'")
    n_s = fluxqubit.charge_operators(sol.params, sol.grid)["n_s"]
    n01 = abs(np.vdot(sol.ground, n_s @ sol.excited))
    return Transition(sol.gap, i01, float(n01))


def relaxation_rate(tr: Transition, env: NoiseEnvironment) -> float:
    """Gamma_1 in 1/us from the charge and flux channels."""
    omega = 2 * math.pi * tr.f10_ghz * 1e9
    q = 2 * CONSTANTS.electron_charge * env.gate_capacitance_ratio * tr.charge_element
    charge = q**2 * env.re_z(tr.f10_ghz)
    flux = (env.mutual_inductance_ph * 1e-12 * tr.current_na * 1e-9) ** 2 * env.re_y(tr.f10_ghz)
    return (charge + flux) * omega / CONSTANTS.hbar * 1e-6


def dephasing_rate(env: NoiseEnvironment, sensitivities) -> float:
    """Gamma_phi in 1/us; ``sensitivities`` are |A_i| in GHz per flux quantum.

    A single float is one flux channel with ``env.flux_noise_alpha``; a list
    of ``(A_i, alpha_i)`` pairs gives several channels.
    """
    if not env.omega_t_ghz > env.omega_c_ghz > 0:
        raise ValueError("need omega_t > omega_c > 0")
    log = math.log(env.omega_t_ghz / env.omega_c_ghz)
    if isinstance(sensitivities, (int, float)):
        sensitivities = [(sensitivities, env.flux_noise_alpha)]
    total = sum(abs(a) * math.sqrt(alpha * log) for a, alpha in sensitivities)
    return 2 * math.pi * total * 1e3


def gap_sweep(params: FluxQubitParams, f1_values, grid=None) -> np.ndarray:
    """f10 (GHz) along a sweep of f1 with f2 fixed."""
    return np.array([fluxqubit.solve(replace(params, f1=float(f)), grid, k=2).gap for f in f1_values])


def flux_sensitivity(params: FluxQubitParams, grid=None, step: float = 1e-4) -> float:
    """Central difference d f10 / d f1 in GHz per flux quantum."""
    lo, hi = gap_sweep(params, [params.f1 - step, params.f1 + step], grid)
    return float((hi - lo) / (2 * step))


def transition_time_us(omega_tilde_mhz: float) -> float:
    """Half period of the sideband Rabi cycle: pi / (2 * 2 pi * Omega~)."""
    if omega_tilde_mhz == 0:
        return math.inf
    return 1.0 / (4 * abs(omega_tilde_mhz))


def feasibility_report(cfg: SimulationConfig, omega_tilde: dict | None = None,
                       element: str = "offdiag") -> DecoherenceReport:
    """Worst-qubit T1, T2 against the per-axis transition times.

    ``omega_tilde`` (axis -> MHz) defaults to the effective couplings of ``cfg``.
    """
    if omega_tilde is None:
        from .diracmap import map_parameters
        from .rwa import effective_hamiltonian

        omega_tilde = map_parameters(effective_hamiltonian(cfg)).omega_tilde
    grid = fluxqubit.ChargeBasisGrid(cfg.grid.n_max_a, cfg.grid.n_max_s)
    per_qubit = []
    for q in cfg.flux:
        tr = transition_of(fluxqubit.solve(q, grid, k=2), element)
        g1 = relaxation_rate(tr, cfg.noise)
        gp = dephasing_rate(cfg.noise, abs(flux_sensitivity(q, grid)))
        per_qubit.append({"qubit": q.index, "f10_ghz": tr.f10_ghz, "I01_na": tr.current_na,
                          "gamma1": g1, "gamma_phi": gp, "gamma2": g1 / 2 + gp})
    worst = max(per_qubit, key=lambda r: r["gamma2"])
    g1, gp = worst["gamma1"], worst["gamma_phi"]
    g2 = g1 / 2 + gp
    t2 = _inv(g2)
    trans = {ax: transition_time_us(w) for ax, w in omega_tilde.items()}
    ratio = {ax: t2 / t for ax, t in trans.items()}
    notes = []
    if t2 < MICROSECOND_THRESHOLD_US:
        notes.append(f"T2 = {t2:.3g} us is below the 1 us target")
    else:
        notes.append(f"T2 = {t2:.3g} us reaches the 1 us target")
    return DecoherenceReport(
        gamma1=g1, gamma_phi=gp, gamma2=g2, t1_us=_inv(g1), t2_us=t2,
        transition_us=trans, ratio=ratio,
        satisfied=all(r > RATIO_CLAIM for r in ratio.values()),
        notes=notes, per_qubit=per_qubit,
    )

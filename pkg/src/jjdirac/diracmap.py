"""From effective couplings to a Dirac Hamiltonian.

Basis order is ``{|10>, |11>} x {|20>, |21>}`` (qubit 1 outer), so
``beta = sigma_z x I`` and ``alpha_i = sigma_x x sigma_i``. In 1+1D the
Hamiltonian is the 2x2 matrix ``mc2 sigma_z + cp sigma_x``, which is the
restriction of the 4x4 form to the states ``|10 20>`` and ``|11 21>``.
All Dirac-level energies are in MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rwa import EffectiveHamiltonian, _expand_expression

__all__ = [
    "BETA",
    "ALPHA",
    "BOOST_GENERATOR",
    "DiracParameters",
    "assemble_standard",
    "boost_matrix",
    "boost_rapidity",
    "d_matrix",
    "decompose",
    "diagonal_transform",
    "lorentz_boost",
    "map_parameters",
    "mass_angle",
]

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}

BETA = np.kron(SZ, I2)
ALPHA = {"x": np.kron(SX, SX), "y": np.kron(SX, SY), "z": np.kron(SX, SZ)}
# term removed by the boost; it is the sigma_x(1) sigma_z(2) product
BOOST_GENERATOR = np.kron(SX, SZ)


@dataclass
class DiracParameters:
    mc2: float  # MHz
    cp0: float
    cp: dict  # axis -> MHz
    delta: dict  # axis -> zero-point spread lambda_p
    omega_tilde: dict  # axis -> MHz
    big_omega: float  # mass-term Rabi scale, MHz
    az: float
    theta: float
    dimension: int
    provenance: dict = field(default_factory=dict)

    def speed(self, axis: str) -> float:
        """Velocity scale c in zero-point lengths per microsecond (4 pi Omega~)."""
        return 4 * math.pi * self.omega_tilde[axis]


def d_matrix(theta: float) -> np.ndarray:
    """[[cos(t/2), -i sin(t/2)], [i sin(t/2), -cos(t/2)]]; Hermitian, unitary, involutive."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [1j * s, -c]])


def mass_angle(mz: float, my: float) -> float:
    """Angle that rotates ``mz sigma_z + my sigma_y`` onto sigma_z.

    The arccos of ``mz/|m|`` fixes the magnitude; its sign follows ``my``.
    """
    r = math.hypot(mz, my)
    if r == 0:
        return 0.0
    th = math.acos(max(-1.0, min(1.0, mz / r)))
    return -th if my < 0 else th


def diagonal_transform(h: np.ndarray, theta: float) -> np.ndarray:
    """D^-1 H D with D acting on qubit 1 (outer factor for 4x4 input)."""
    d = d_matrix(theta)
    if h.shape == (4, 4):
        d = np.kron(d, I2)
    return np.linalg.inv(d) @ h @ d


def boost_rapidity(mc2: float, cp0: float) -> float:
    if cp0 == 0:
        return 0.0
    if mc2 == 0:
        raise ZeroDivisionError("boost rapidity diverges for mc2 = 0 with cp0 != 0")
    r = cp0 / mc2
    return 0.5 * math.atanh(-r / math.sqrt(1 + r * r))


def boost_matrix(az: float) -> np.ndarray:
    c, s = math.cosh(az), math.sinh(az)
    if not (math.isfinite(c) and math.isfinite(s)):
        raise OverflowError("boost matrix singular (rapidity overflow)")
    return np.array([[c, 0, s, 0], [0, c, 0, -s], [-s, 0, c, 0], [0, s, 0, c]], dtype=float)


def lorentz_boost(h: np.ndarray, az: float) -> np.ndarray:
    """S^-1 H S.

    S is a scaled rotation (S^T S = cosh(2 az) I), so S^-1 = S(-az) / cosh(2 az).
    With the rapidity of :func:`boost_rapidity` this order of the similarity
    transform is the one that removes the ``sigma_x sigma_z`` term.
    """
    if h.shape != (4, 4):
        raise ValueError("boost acts on 4x4 Dirac matrices")
    s = boost_matrix(az)
    s_inv = boost_matrix(-az) / math.cosh(2 * az)
    return s_inv @ h @ s


def decompose(h: np.ndarray) -> dict:
    """Coefficients on the 16 products sigma_a x sigma_b (keys like 'XZ')."""
    if h.shape == (2, 2):
        return {a: complex(np.trace(PAULI[a] @ h) / 2) for a in PAULI}
    out = {}
    for a, pa in PAULI.items():
        for b, pb in PAULI.items():
            out[a + b] = complex(np.trace(np.kron(pa, pb) @ h) / 4)
    return out


def assemble_standard(mc2: float, cp: dict, dimension: int, cp0: float = 0.0) -> np.ndarray:
    """Standard-form matrix; missing axes count as zero momentum."""
    if dimension == 1:
        if cp0:
            raise ValueError("cp0 term needs the 4x4 form")
        return mc2 * SZ + cp.get("x", 0.0) * SX
    if dimension not in (2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    h = mc2 * BETA + cp0 * BOOST_GENERATOR
    for ax in ("x", "y", "z")[:dimension]:
        h = h + cp.get(ax, 0.0) * ALPHA[ax]
    return h


def _project(word_map: dict, unit_map: dict):
    """Least-squares scalar g with word_map ~ g * unit_map, and the relative residual."""
    num = sum(np.conj(u) * word_map.get(w, 0) for w, u in unit_map.items())
    den = sum(abs(u) ** 2 for u in unit_map.values())
    g = num / den
    words = set(word_map) | set(unit_map)
    res = math.sqrt(sum(abs(word_map.get(w, 0) - g * unit_map.get(w, 0)) ** 2 for w in words))
    scale = math.sqrt(sum(abs(v) ** 2 for v in word_map.values())) or 1.0
    return complex(g), res / scale


def map_parameters(eh: EffectiveHamiltonian, cp0_source: str = "engine") -> DiracParameters:
    """Read mc2, Omega~ per axis and cp0 off the engine's effective couplings.

    ``cp`` per axis is the coupling at unit momentum quadrature
    ``i(a^+ - a^-) = 1``. ``cp0_source="hand"`` substitutes the hand value
    ``X1 Z1 / E_JO`` for the engine's (which is zero: no such word survives).
    """
    cc = eh.couplings
    table = cc.table(eh.drives)
    mass = eh.word_map("mass")
    gz, _ = _project(mass, _expand_expression(1.0, [("q1", "sz")], table))
    gy, _ = _project(mass, _expand_expression(1.0, [("q1", "sy")], table))
    mz, my = gz.real * 1e3, gy.real * 1e3
    mc2 = math.hypot(mz, my)
    theta = mass_angle(mz, my)
    cp, omega, delta, prov = {}, {}, {}, {"mass": {"mz_mhz": mz, "my_mhz": my}}
    for ax in "xyz"[: cc.dimension]:
        if ax not in eh.blocks:
            raise KeyError(f"missing axis coupling {ax!r}")
        if cc.dimension == 1:
            unit = _expand_expression(1.0, [("q1", "sx"), ("x", "p")], table)
        else:
            op = {"x": "sx", "y": "sy", "z": "sz"}[ax]
            unit = _expand_expression(1.0, [("q1", "sx"), ("q2", op), (ax, "p")], table)
        g, res = _project(eh.word_map(ax), unit)
        # after D(theta), sigma_x(1) -> -sigma_x(1)
        cp[ax] = -g.real * 1e3
        omega[ax] = abs(g) * 1e3
        delta[ax] = cc.modes[ax].lam
        prov[ax] = {"structure_residual": res, "engine_mode": eh.mode}
    cp0 = 0.0
    if cp0_source == "hand" and "O" in cc.shared_ej:
        cp0 = cc.q1["X1"] * cc.q1["Z1"] / cc.shared_ej["O"] * 1e3
    elif cp0_source not in ("engine", "hand"):
        raise ValueError("cp0_source must be 'engine' or 'hand'")
    prov["cp0"] = cp0_source
    az = boost_rapidity(mc2, cp0) if cc.dimension > 1 else 0.0
    return DiracParameters(
        mc2=mc2, cp0=cp0, cp=cp, delta=delta, omega_tilde=dict(omega),
        big_omega=mc2, az=az, theta=theta, dimension=cc.dimension, provenance=prov,
    )


def standard_hamiltonian(params: DiracParameters, cp: dict | None = None):
    """Boosted standard form and the (mc2', cp') read back from it."""
    cp = params.cp if cp is None else cp
    h = assemble_standard(params.mc2, cp, params.dimension, params.cp0 if params.dimension > 1 else 0.0)
    if params.dimension > 1 and params.cp0:
        h = lorentz_boost(h, params.az)
    return h

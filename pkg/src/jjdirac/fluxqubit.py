"""Static three-junction flux qubit in the two-mode charge basis.

Conventions
-----------
Charge states ``|N_a, N_s>`` are plane waves ``exp(i N_a phi_a + i N_s phi_s)``
so ``exp(i k phi)`` raises ``N`` by ``k``. A wavefunction is single-valued in the
original junction phases only when ``N_a + N_s`` is even; the basis keeps that
sublattice alone. With ``c = 2 pi f3``::

    <N_a+2| sin(2 phi_a + c) |N_a> = -i exp(+ic) / 2
    <N_a-2| sin(2 phi_a + c) |N_a> = +i exp(-ic) / 2
    <N_a+-2| cos(2 phi_a + c) |N_a> = exp(+-ic) / 2

Eigenvectors are gauge fixed with the antiunitary symmetry ``K P`` (complex
conjugation combined with ``N -> -N``) of the Hamiltonian: every eigenvector
obeys ``psi(-N)* = psi(N)``, which makes sin/cos matrix elements real and the
charge matrix elements purely imaginary. The remaining sign makes the
largest-magnitude component have positive real part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .core import CONSTANTS, FluxQubitParams, energy_ghz_to_joule, josephson_inductance_ph

__all__ = [
    "ChargeBasisGrid",
    "FluxQubitSolution",
    "build_h_q0",
    "charge_operators",
    "circulating_current",
    "current_operator",
    "matrix_elements",
    "rotated_couplings",
    "solve",
    "solve_spectrum",
]


@dataclass(frozen=True)
class ChargeBasisGrid:
    n_max_a: int = 16
    n_max_s: int = 24

    def __post_init__(self):
        if min(self.n_max_a, self.n_max_s) < 8:
            raise ValueError("charge-basis truncation must be >= 8")

    def states(self) -> np.ndarray:
        """(dim, 2) array of (N_a, N_s) with N_a + N_s even."""
        na = np.arange(-self.n_max_a, self.n_max_a + 1)
        ns = np.arange(-self.n_max_s, self.n_max_s + 1)
        a, s = np.meshgrid(na, ns, indexing="ij")
        keep = (a + s) % 2 == 0
        return np.column_stack([a[keep], s[keep]])

    @property
    def dim(self) -> int:
        return len(self.states())


@lru_cache(maxsize=64)
def _shift(grid: ChargeBasisGrid, da: int, ds: int) -> np.ndarray:
    """Matrix of |N + (da, ds)><N|, truncated at the grid boundary."""
    st = grid.states()
    index = {(int(a), int(s)): i for i, (a, s) in enumerate(st)}
    m = np.zeros((len(st), len(st)))
    for j, (a, s) in enumerate(st):
        i = index.get((int(a) + da, int(s) + ds))
        if i is not None:
            m[i, j] = 1.0
    m.setflags(write=False)
    return m


def charge_operators(params: FluxQubitParams, grid: ChargeBasisGrid) -> dict:
    """sin_l, cos_l, N_a and the two circulating-current pieces as dense matrices."""
    c = 2 * math.pi * params.f3
    up_a, dn_a = _shift(grid, 2, 0), _shift(grid, -2, 0)
    sin_l = (-0.5j * np.exp(1j * c)) * up_a + (0.5j * np.exp(-1j * c)) * dn_a
    cos_l = 0.5 * np.exp(1j * c) * up_a + 0.5 * np.exp(-1j * c) * dn_a
    st = grid.states()
    n_a = np.diag(st[:, 0].astype(float))
    n_s = np.diag(st[:, 1].astype(float))
    # sin(phi_s) cos(phi_a)
    sc = sum(
        (sgn_s / 4j) * _shift(grid, da, sgn_s) for sgn_s in (1, -1) for da in (1, -1)
    )
    # sin(2 phi_s + c)
    s2 = np.exp(1j * c) / 2j * _shift(grid, 0, 2) - np.exp(-1j * c) / 2j * _shift(grid, 0, -2)
    # sin(phi_1) cos(phi_1) = sin(2 phi_s + 2 phi_a) / 2
    s1c1 = (_shift(grid, 2, 2) - _shift(grid, -2, -2)) / 4j
    return {"sin": sin_l, "cos": cos_l, "n_a": n_a, "n_s": n_s, "sin_s_cos_a": sc,
            "sin_2s": s2, "sin1_cos1": s1c1}


def build_h_q0(params: FluxQubitParams, grid: ChargeBasisGrid | None = None) -> np.ndarray:
    """Static Hamiltonian (GHz) on the physical charge sublattice."""
    grid = grid or ChargeBasisGrid()
    st = grid.states()
    ec, ecs, ej = params.ec_ghz, params.ec_s_ghz, params.ej_ghz
    h = np.diag(2 * ec * st[:, 0] ** 2 + 2 * ecs * st[:, 1] ** 2).astype(complex)
    for da in (1, -1):
        for ds in (1, -1):
            h -= 0.5 * ej * _shift(grid, da, ds)
    amp = params.alpha * ej * math.cos(math.pi * params.f2)
    ph = np.exp(2j * math.pi * params.f3)
    h -= amp * ph * _shift(grid, 0, 2)
    h -= amp * np.conj(ph) * _shift(grid, 0, -2)
    return 0.5 * (h + h.conj().T)


def _fix_gauge(vecs: np.ndarray, states: np.ndarray) -> np.ndarray:
    st_index = {(int(a), int(s)): i for i, (a, s) in enumerate(states)}
    mirror = np.array([st_index[(-int(a), -int(s))] for a, s in states])
    out = vecs.copy()
    for k in range(vecs.shape[1]):
        v = vecs[:, k]
        # K P v = exp(i chi) v for a non-degenerate level
        overlap = np.vdot(v, np.conj(v[mirror]))
        if abs(overlap) > 1e-8:
            v = v * np.exp(0.5j * np.angle(overlap))
        j = int(np.argmax(np.abs(v)))
        ref = v[j].real if abs(v[j].real) > 1e-12 else v[j].imag
        if ref < 0:
            v = -v
        out[:, k] = v
    return out


def solve_spectrum(h: np.ndarray, k: int = 4, states: np.ndarray | None = None):
    """Lowest ``k`` eigenpairs of a Hermitian matrix, ascending and gauge fixed.

    Without ``states`` only the sign/phase rule on the largest component is applied.
    """
    h = np.asarray(h)
    if not np.allclose(h, h.conj().T, atol=1e-12 * max(1.0, np.abs(h).max())):
        raise ValueError("matrix is not Hermitian")
    try:
        w, v = scipy.linalg.eigh(h, subset_by_index=[0, min(k, len(h)) - 1])
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed (cond={np.linalg.cond(h):.3g})") from exc
    w, v = w[:k], v[:, :k]
    if states is not None:
        return w, _fix_gauge(v, states)
    for i in range(v.shape[1]):
        j = int(np.argmax(np.abs(v[:, i])))
        v[:, i] *= np.exp(-1j * np.angle(v[j, i]))
    return w, v


@dataclass
class FluxQubitSolution:
    params: FluxQubitParams
    grid: ChargeBasisGrid
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns: charge-basis eigenvectors, ascending

    @property
    def gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    @property
    def ground(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def excited(self) -> np.ndarray:
        return self.eigenvectors[:, 1]


def solve(params: FluxQubitParams, grid: ChargeBasisGrid | None = None, k: int = 4) -> FluxQubitSolution:
    grid = grid or ChargeBasisGrid()
    w, v = solve_spectrum(build_h_q0(params, grid), k, grid.states())
    return FluxQubitSolution(params, grid, w, v)


def _pauli_parts(op: np.ndarray, g: np.ndarray, e: np.ndarray):
    ee = np.vdot(e, op @ e)
    gg = np.vdot(g, op @ g)
    return (ee - gg) / 2, np.vdot(e, op @ g)


def matrix_elements(sol: FluxQubitSolution, charge: str = "s") -> dict:
    """Pauli-decomposition elements z0..z3, x0..x3 in the {|g>, |e>} basis.

    z0, x0 and the sin/cos elements are real in the chosen gauge. The i = 3
    pair comes from the charge operator that multiplies the flux-rate term of
    the driven Hamiltonian, ``N_s`` by default (``charge="a"`` selects ``N_a``,
    whose elements vanish identically because every level has definite
    ``phi_a`` parity). Charge operators have purely imaginary off-diagonal
    elements; ``x3`` is returned as ``Im <e|N|g>``, the factor ``i`` being
    carried by the quarter-period phase of the corresponding drive.
    """
    if charge not in ("a", "s"):
        raise ValueError("charge must be 'a' or 's'")
    g, e = sol.ground, sol.excited
    ops = charge_operators(sol.params, sol.grid)
    out = {}
    h = build_h_q0(sol.params, sol.grid)
    for i, op in enumerate((h, ops["sin"], ops["cos"])):
        z, x = _pauli_parts(op, g, e)
        out[f"z{i}"] = float(z.real)
        out[f"x{i}"] = float(x.real)
    z, x = _pauli_parts(ops["n_" + charge], g, e)
    out["z3"] = float(z.real)
    out["x3"] = float(x.imag)
    return out


def rotated_couplings(sol_or_elements, params: FluxQubitParams) -> dict:
    """Rotation into the working basis of qubit ``params.index`` and the scaled couplings.

    Qubit 1 ends with ``H = X_0 sigma_x``, qubit 2 with ``H = Z_0 sigma_z``.
    The static splitting (i = 0) is the rotated energy itself and carries no
    multiplier; drive couplings i = 1, 2 are scaled by ``mu`` and i = 3 by ``nu``.
    """
    el = sol_or_elements if isinstance(sol_or_elements, dict) else matrix_elements(sol_or_elements)
    z0, x0 = el["z0"], el["x0"]
    r = math.hypot(z0, x0)
    theta = math.acos(max(-1.0, min(1.0, z0 / r))) if r > 0 else 0.0
    ct, stt = math.cos(theta), math.sin(theta)
    mu = 2 * params.alpha * params.ej_ghz * math.cos(math.pi * params.f1)
    nu = 2 * params.beta / (1 + 4 * params.beta)
    out = {"theta": theta, "mu": mu, "nu": nu}
    for i in range(4):
        z, x = el[f"z{i}"], el[f"x{i}"]
        if params.index == 1:
            zr, xr = x * ct - z * stt, x * stt + z * ct
        else:
            zr, xr = z * ct + x * stt, z * stt - x * ct
        m = 1.0 if i == 0 else (mu if i < 3 else nu)
        out[f"zr{i}"], out[f"xr{i}"] = zr, xr
        out[f"Z{i}"], out[f"X{i}"] = m * zr, m * xr
    out["splitting"] = out["X0"] if params.index == 1 else out["Z0"]
    return out


def current_operator(sol: FluxQubitSolution, lr_ph: float | None = None) -> np.ndarray:
    """Circulating-current operator in nA on the charge basis.

    ``lr_ph`` switches on the ring-inductance correction ``l sin(phi1) cos(phi1)``
    with ``l = L_r / L_J``.
    """
    p = sol.params
    ops = charge_operators(p, sol.grid)
    i_c = energy_ghz_to_joule(p.ej_ghz) / CONSTANTS.reduced_flux_quantum  # A
    op = 2 * ops["sin_s_cos_a"] - (2 * p.alpha / p.beta) * math.cos(math.pi * p.f2) * ops["sin_2s"]
    if lr_ph:
        op = op + (lr_ph / josephson_inductance_ph(p.ej_ghz)) * ops["sin1_cos1"]
    return op * (p.beta / (1 + 2 * p.beta)) * i_c * 1e9


def circulating_current(sol: FluxQubitSolution, lr_ph: float | None = None) -> dict:
    """<g|I|g>, <e|I|e> and |<g|I|e>| in nA, with the critical current I_c."""
    op = current_operator(sol, lr_ph)
    i_c = energy_ghz_to_joule(sol.params.ej_ghz) / CONSTANTS.reduced_flux_quantum
    g, e = sol.ground, sol.excited
    return {
        "I_gg": float(np.vdot(g, op @ g).real),
        "I_ee": float(np.vdot(e, op @ e).real),
        "I_ge": float(abs(np.vdot(g, op @ e))),
        "I_c": i_c * 1e9,
    }

"""Independent reference calculations used by the tests.

None of these reuse the package's numerical kernels: the flux-qubit oracle
builds its matrix from Kronecker products, the phase-qubit oracle works on a
position grid, and the propagator oracle integrates the lab-frame
Schroedinger equation with a fixed-step RK4.
"""

import math

import numpy as np
import scipy.linalg

from jjdirac.phasequbit import PhaseMode
from jjdirac.rwa import CircuitCouplings


def flux_levels(params, n_a=16, n_s=24, k=4):
    """Lowest ``k`` levels of the flux qubit on the full (N_a, N_s) grid.

    The grid is restricted to N_a + N_s even afterwards by masking.
    """
    na = np.arange(-n_a, n_a + 1)
    ns = np.arange(-n_s, n_s + 1)
    ia, is_ = np.eye(len(na)), np.eye(len(ns))

    def up(n, step):
        return np.eye(n, k=-step)

    h = 2 * params.ec_ghz * np.kron(np.diag(na**2), is_) + 2 * params.ec_s_ghz * np.kron(ia, np.diag(ns**2))
    # -E_J(cos phi_1 + cos phi_2) = -E_J/2 sum over (+-1, +-1) shifts
    for sa in (1, -1):
        for ss in (1, -1):
            h -= 0.5 * params.ej_ghz * np.kron(up(len(na), sa), up(len(ns), ss))
    amp = params.alpha * params.ej_ghz * math.cos(math.pi * params.f2)
    c = np.exp(2j * math.pi * params.f3)
    h = h.astype(complex) - amp * (c * np.kron(ia, up(len(ns), 2)) + np.conj(c) * np.kron(ia, up(len(ns), -2)))
    a, s = np.meshgrid(na, ns, indexing="ij")
    keep = ((a + s) % 2 == 0).ravel()
    return np.linalg.eigvalsh(h[np.ix_(keep, keep)])[:k]


def washboard_levels(ec, ej, bias, er, points=4001, half_width=14.0):
    """Three lowest levels of a biased junction on a finite-difference phase grid.

    H = 4 E_C (-d^2/dphi^2) - E_J (cos phi + bias phi) + E_r (phi - phi0)^2 / 2
    """
    phi0 = math.asin(bias)
    lam = (2 * ec / (ej * math.cos(phi0) + er)) ** 0.25
    x = np.linspace(-half_width * lam, half_width * lam, points)
    dx = x[1] - x[0]
    phi = phi0 + x
    pot = -ej * (np.cos(phi) + bias * phi) + 0.5 * er * x**2
    diag = 8 * ec / dx**2 + pot
    off = np.full(points - 1, -4 * ec / dx**2)
    return scipy.linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 2))[0]


# -- lab-frame propagator for the 1+1D sideband --------------------------------

def toy_couplings(f_bus=10.0, f_mode=1.0, drive_scale=1.0, mode_coupling=0.01, n=0.01,
                  lam_bus=0.1, lam_mode=0.03, x0=3.0):
    """1+1D couplings with chosen frequency ratios.

    ``drive_scale`` is D = X2 lambda_X n / 2 and ``mode_coupling`` is
    g = E_L lambda_x lambda_X.
    """
    x2 = 2 * drive_scale / (lam_bus * n)
    el = mode_coupling / (lam_mode * lam_bus)
    ej_bus = f_bus / (2 * lam_bus**2)
    q1 = {"X2": x2, "Z1": 0.0, "X1": 0.0, "Z3": 0.0, "X3": 0.0, "splitting": x0}
    modes = {"x": PhaseMode("x", "p", lam_mode, f_mode, 0.0),
             "X": PhaseMode("X", "P", lam_bus, f_bus, ej_bus)}
    return CircuitCouplings(dimension=1, q1=q1, q2=None, modes=modes, el_ghz={"x": el},
                            shared_ej={"X": ej_bus}, n_m=n, n_axis={"x": n})


def _ladder(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1)


def lab_propagator(cc, drive, t_end, fock=3, steps_per_period=80):
    """Interaction-picture propagator on the qubit x mode x bus space.

    Ordering of the tensor product: qubit (2) x mode x (fock) x bus X (fock).
    The free part is ``X0 sigma_x + f_x a^+a + f_X b^+b``; the coupling is
    ``X2 lambda_X sigma_x (b + b^+) n cos(2 pi f t + phase) - E_L lambda_x lambda_X (a + a^+)(b + b^+)``.
    Returns the block on {qubit} x {all n_x} x {n_X = 0}, reached by
    RK4 integration of i dU/dt = 2 pi H(t) U on the full space.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    a = _ladder(fock)
    i2, ik = np.eye(2), np.eye(fock)
    sig = np.kron(np.kron(sx, ik), ik)
    qa = np.kron(np.kron(i2, a + a.T), ik)
    qb = np.kron(np.kron(i2, ik), a + a.T)
    f_x, f_X = cc.modes["x"].omega_ghz, cc.modes["X"].omega_ghz
    lam_x, lam_X = cc.modes["x"].lam, cc.modes["X"].lam
    x0 = cc.q1["splitting"]
    h0 = x0 * sig + f_x * np.kron(np.kron(i2, a.T @ a), ik) + f_X * np.kron(np.kron(i2, ik), a.T @ a)
    h_drive = cc.q1["X2"] * lam_X * drive.amplitude * (sig @ qb)
    h_static = h0 - cc.el_ghz["x"] * lam_x * lam_X * (qa @ qb)

    def rhs(t, u):
        h = h_static + math.cos(2 * math.pi * drive.frequency_ghz * t + drive.phase) * h_drive
        return -2j * math.pi * (h @ u)

    fmax = f_X + drive.frequency_ghz + f_x
    n_steps = int(math.ceil(t_end * fmax * steps_per_period))
    dt = t_end / n_steps
    dim = h0.shape[0]
    # columns: the states |q, n_x, n_X=0>
    cols = [np.ravel_multi_index((q, nx, 0), (2, fock, fock)) for q in range(2) for nx in range(fock)]
    u = np.eye(dim, dtype=complex)[:, cols]
    t = 0.0
    for _ in range(n_steps):
        k1 = rhs(t, u)
        k2 = rhs(t + dt / 2, u + dt / 2 * k1)
        k3 = rhs(t + dt / 2, u + dt / 2 * k2)
        k4 = rhs(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    u_int = scipy.linalg.expm(2j * math.pi * h0 * t_end) @ u
    return u_int[cols, :]


def effective_block(word_map, t_end, fock=3):
    """exp(-2 pi i H_eff t) on the same block, H_eff from engine words."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    a = _ladder(fock)
    units = {"Zs": sx, "I": np.eye(2)}
    h = np.zeros((2 * fock, 2 * fock), dtype=complex)
    for word, c in word_map.items():
        ops = dict(word)
        q = units[ops.get("q1", "I")]
        tok = ops.get("x", "")
        m = np.eye(fock)
        for ch in tok:
            m = m @ (a.T if ch == "+" else a)
        h += c * np.kron(q, m)
    u = scipy.linalg.expm(-2j * math.pi * h * t_end)
    cols = [q * fock + nx for q in range(2) for nx in range(fock)]
    return u[np.ix_(cols, cols)]


def trace_fidelity(u, v):
    return abs(np.trace(u.conj().T @ v)) / u.shape[0]


def random_couplings(base, rng):
    """Perturb a CircuitCouplings: qubit couplings +-20 %, phase modes +-10 %,
    bus junctions re-quantized from perturbed E_J, E_C, drives in [0.005, 0.02]."""
    from dataclasses import replace

    from jjdirac.core import SharedJunctionParams
    from jjdirac.phasequbit import quantize

    def jitter(d):
        if d is None:
            return None
        return {k: (v * rng.uniform(0.8, 1.2) if k not in ("theta", "mu", "nu") else v)
                for k, v in d.items()}

    q1, q2 = jitter(base.q1), jitter(base.q2)
    if q2 is not None:
        q2["splitting"] = base.q2["splitting"] * rng.uniform(0.9, 1.1)
    modes, shared_ej = {}, {}
    for k, m in base.modes.items():
        if k in ("X", "Y", "Z", "O"):
            ej = base.shared_ej[k] * rng.uniform(0.9, 1.1)
            ec = m.omega_ghz**2 / (8 * base.shared_ej[k]) * rng.uniform(0.9, 1.1)
            modes[k] = quantize(SharedJunctionParams(k, ej, ec, 0.0))
            shared_ej[k] = ej
        else:
            modes[k] = replace(m, lam=m.lam * rng.uniform(0.9, 1.1),
                               omega_ghz=m.omega_ghz * rng.uniform(0.9, 1.1))
    return replace(base, q1=q1, q2=q2, modes=modes, shared_ej=shared_ej,
                   el_ghz={k: v * rng.uniform(0.8, 1.2) for k, v in base.el_ghz.items()},
                   n_m=rng.uniform(0.0002, 0.001),
                   n_axis={k: rng.uniform(0.005, 0.02) for k in base.n_axis})

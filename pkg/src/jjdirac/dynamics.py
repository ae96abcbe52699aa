"""Zitterbewegung of the mean position for a fixed-momentum Dirac Hamiltonian.

Energies are E/h in MHz and times in microseconds, so the propagator is
``U(t) = exp(-2 pi i H t)`` and the tremor term oscillates as
``exp(4 pi i H t)``. The position operator obeys ``dr/dt = c alpha`` with a
velocity scale ``c`` in zero-point lengths per microsecond, which gives::

    r(t) = c (cp) H^-1 t + c (exp(4 pi i H t) - 1) (4 pi i H)^-1 eta
    eta  = alpha - (cp) H^-1

with ``r(0) = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.stats

from .core import MomentumSpec
from .diracmap import ALPHA, SX, assemble_standard

__all__ = [
    "SingularHamiltonianError",
    "StepSizeWarning",
    "Trajectory",
    "alpha_matrix",
    "analyze_tremor",
    "momentum_samples",
    "spinor",
    "standard_trajectory",
    "wavepacket_average",
    "zb_closed_form",
    "zb_oracle",
]

AXES = ("x", "y", "z")


class SingularHamiltonianError(ValueError):
    """H has a zero eigenvalue; the closed form needs H^-1."""


class StepSizeWarning(RuntimeWarning):
    pass


@dataclass
class Trajectory:
    times: np.ndarray  # us
    position: np.ndarray  # (n_times, n_axes), zero-point lengths
    axes: tuple
    velocity: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.position = np.asarray(self.position, dtype=float).reshape(len(self.times), -1)
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.position)):
            raise ValueError("non-finite position")

    def axis(self, name: str) -> np.ndarray:
        return self.position[:, self.axes.index(name)]


def spinor(amplitudes) -> np.ndarray:
    """Normalized complex spinor of length 2 or 4."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    if v.size not in (2, 4):
        raise ValueError("spinor must have 2 or 4 components")
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero spinor")
    return v / n


def alpha_matrix(axis: str, size: int) -> np.ndarray:
    if size == 2:
        if axis != "x":
            raise ValueError("2x2 Hamiltonians only carry the x axis")
        return SX
    return ALPHA[axis]


def _axes_for(h, axes):
    if axes is None:
        axes = ("x",) if h.shape[0] == 2 else AXES
    return tuple(axes)


def _check_inputs(h, psi0):
    h = np.asarray(h, dtype=complex)
    if h.shape not in ((2, 2), (4, 4)):
        raise ValueError("H must be 2x2 or 4x4")
    if not np.allclose(h, h.conj().T, atol=1e-13 * max(1.0, np.abs(h).max())):
        raise ValueError("H is not Hermitian")
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (h.shape[0],):
        raise ValueError("spinor size does not match H")
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise ValueError("spinor is not normalized")
    return h, psi


def zb_closed_form(h, psi0, times, speed: float = 1.0, axes=None) -> Trajectory:
    """Mean position from the operator solution, evaluated in the eigenbasis of H."""
    h, psi = _check_inputs(h, psi0)
    axes = _axes_for(h, axes)
    t = np.asarray(times, dtype=float)
    e, v = np.linalg.eigh(h)
    if np.min(np.abs(e)) <= 1e-12 * np.linalg.norm(h, 2):
        raise SingularHamiltonianError("H is singular (massless at p = 0); use the oracle")
    h_inv = (v / e) @ v.conj().T
    phi = v.conj().T @ psi
    # (exp(4 pi i E t) - 1) / (4 pi i E) for every eigenvalue and time
    kern = np.expm1(4j * math.pi * np.outer(t, e)) / (4j * math.pi * e)
    pos = np.empty((len(t), len(axes)))
    for k, ax in enumerate(axes):
        a = alpha_matrix(ax, h.shape[0])
        cp = np.trace(a @ h).real / h.shape[0]
        drift = cp * np.vdot(psi, h_inv @ psi)
        eta = a - cp * h_inv
        right = v.conj().T @ (eta @ psi)
        r = drift * t + kern @ (np.conj(phi) * right)
        if np.max(np.abs(r.imag)) > 1e-12 * max(1.0, np.max(np.abs(r.real))):
            raise ArithmeticError("mean position acquired an imaginary part")
        pos[:, k] = speed * r.real
    return Trajectory(t, pos, axes)


def _propagators(h, dt, n):
    """Stack of U(j dt) for j = 0 .. n, each from its own matrix exponential."""
    return np.array([scipy.linalg.expm(-2j * math.pi * h * (j * dt)) for j in range(n + 1)])


def _integrate(h, psi, times, speed, a_mats, steps_per_period, refresh=16):
    """Simpson integral of <c alpha> between successive output times.

    Each interval is split into an even number of sub-steps. The state at the
    start of an interval is carried over from the previous one and replaced by
    a fresh matrix exponential every ``refresh`` intervals to bound rounding.
    """
    e_max = np.max(np.abs(np.linalg.eigvalsh(h)))
    period = 1.0 / (2 * e_max) if e_max > 0 else np.inf
    t = np.concatenate([[0.0], times]) if times[0] != 0 else times
    pos = [np.zeros(len(a_mats))]
    cache = {}
    cur = pos[0]
    state = psi
    for k, (ta, tb) in enumerate(zip(t[:-1], t[1:])):
        span = tb - ta
        n = max(2, 2 * math.ceil(span * steps_per_period / (2 * period))) if np.isfinite(period) else 2
        key = (n, round(span / n, 15))
        if key not in cache:
            cache[key] = _propagators(h, span / n, n)
        pw = cache[key]
        if k % refresh == 0:
            state = scipy.linalg.expm(-2j * math.pi * h * ta) @ psi
        states = pw @ state  # (n + 1, dim)
        norms = np.linalg.norm(states, axis=1)
        if np.max(np.abs(norms - 1)) > 1e-13:
            raise ArithmeticError("norm drift in the propagator")
        vel = speed * np.stack([np.einsum("ij,jk,ik->i", states.conj(), a, states).real
                                for a in a_mats], axis=1)
        w = np.ones(n + 1)
        w[1:-1:2], w[2:-1:2] = 4, 2
        cur = cur + (span / n) / 3 * (w @ vel)
        pos.append(cur)
        state = states[-1]
    pos = np.array(pos)
    return pos if times[0] == 0 else pos[1:]


def zb_oracle(h, psi0, times, speed: float = 1.0, axes=None, steps_per_period: int = 128,
              check: bool = True) -> Trajectory:
    """Integrate the Heisenberg velocity with matrix-exponential stepping and Simpson's rule.

    A second pass at twice the resolution estimates the quadrature error
    (Richardson); a :class:`StepSizeWarning` is issued above 1e-8 relative.
    """
    if steps_per_period < 64:
        raise ValueError("steps_per_period must be >= 64")
    h, psi = _check_inputs(h, psi0)
    axes = _axes_for(h, axes)
    t = np.asarray(times, dtype=float)
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("times must start at or after 0 and increase")
    a_mats = [alpha_matrix(ax, h.shape[0]) for ax in axes]
    pos = _integrate(h, psi, t, speed, a_mats, steps_per_period)
    if check:
        fine = _integrate(h, psi, t, speed, a_mats, 2 * steps_per_period)
        err = np.max(np.abs(fine - pos)) / 15
        scale = max(np.max(np.abs(fine)), 1e-300)
        if err > 1e-8 * scale:
            warnings.warn(f"quadrature error estimate {err / scale:.2e} exceeds 1e-8",
                          StepSizeWarning, stacklevel=2)
        pos = fine + (fine - pos) / 15
    return Trajectory(t, pos, axes)


def momentum_samples(spec: MomentumSpec):
    """(cp vectors, weights). Gaussian samples sit at equally spaced quantiles."""
    mean = np.asarray(spec.mean, dtype=float)
    if spec.kind == "point" or spec.width == 0 or spec.samples == 1:
        return mean[None, :], np.ones(1)
    norm = np.linalg.norm(mean)
    direction = mean / norm if norm > 0 else np.eye(len(mean))[0]
    q = (np.arange(spec.samples) + 0.5) / spec.samples
    offsets = spec.width * scipy.stats.norm.ppf(q)
    return mean[None, :] + offsets[:, None] * direction[None, :], np.full(spec.samples, 1 / spec.samples)


def wavepacket_average(spec: MomentumSpec, per_p) -> Trajectory:
    """Weighted sum of ``per_p(cp_vector)`` trajectories in a fixed order."""
    cps, weights = momentum_samples(spec)
    total = None
    for cp, w in zip(cps, weights):
        tr = per_p(cp)
        total = w * tr.position if total is None else total + w * tr.position
    return Trajectory(tr.times, total, tr.axes)


def standard_trajectory(mc2: float, cp_vec, psi0, times, speed=1.0, dimension=None, oracle=False,
                        cp0: float = 0.0):
    """Trajectory of the standard-form Hamiltonian at momentum ``cp_vec``."""
    cp_vec = np.atleast_1d(np.asarray(cp_vec, dtype=float))
    dimension = dimension or len(cp_vec)
    h = assemble_standard(mc2, dict(zip(AXES, cp_vec)), dimension, cp0)
    psi = spinor(psi0)
    axes = AXES[:dimension]
    if oracle:
        return zb_oracle(h, psi, times, speed, axes)
    return zb_closed_form(h, psi, times, speed, axes)


def _sinusoid(t, f, a, b, c0, c1):
    return a * np.sin(2 * math.pi * f * t) + b * np.cos(2 * math.pi * f * t) + c0 + c1 * t


def analyze_tremor(traj: Trajectory, axis: str | None = None, min_periods: float = 5) -> dict:
    """Frequency (MHz), tremor amplitude and drift velocity along one axis."""
    axis = axis or traj.axes[0]
    t, x = traj.times, traj.axis(axis)
    slope, icpt = np.polyfit(t, x, 1)
    res = x - (slope * t + icpt)
    scale = max(np.max(np.abs(x)), 1.0)
    if np.max(np.abs(res)) < 1e-10 * scale:
        return {"frequency_mhz": float("nan"), "amplitude": float(np.max(np.abs(res))),
                "drift": float(slope)}
    crossings = np.nonzero(np.diff(np.signbit(res)))[0]
    periods = len(crossings) / 2
    if periods < min_periods:
        raise ValueError(f"trajectory covers {periods:.1f} tremor periods, need {min_periods}")
    f0 = (len(crossings) - 1) / (2 * (t[crossings[-1]] - t[crossings[0]]))
    amp0 = 0.5 * (res.max() - res.min())
    p, _ = scipy.optimize.curve_fit(_sinusoid, t, x, p0=[f0, amp0, 0.0, icpt, slope])
    return {"frequency_mhz": float(abs(p[0])), "amplitude": float(math.hypot(p[1], p[2])),
            "drift": float(p[4])}

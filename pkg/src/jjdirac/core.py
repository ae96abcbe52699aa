"""Constants, unit conventions, parameter containers and config loading.

Every energy is stored as a linear frequency E/h. Circuit-level energies are
in GHz, the low-energy Dirac quantities (mc^2, cp) in MHz and times in ns
(circuit level) or microseconds (Dirac level). The factor 2*pi only appears
where a phase is accumulated: see :func:`to_angular`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import yaml
from scipy import constants as _sc

__all__ = [
    "CONSTANTS",
    "ConfigError",
    "DrivePulse",
    "DriveSettings",
    "FluxQubitParams",
    "GridSettings",
    "MomentumSpec",
    "NoiseEnvironment",
    "PhaseQubitParams",
    "PhysicalConstants",
    "SharedJunctionParams",
    "SimulationConfig",
    "TimeGrid",
    "config_hash",
    "config_to_dict",
    "default_config",
    "energy_ghz_to_joule",
    "from_angular",
    "hierarchy_warnings",
    "joule_to_ghz",
    "load_config",
    "serialize_config",
    "to_angular",
    "validate_hierarchy",
]


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class PhysicalConstants:
    flux_quantum: float = _sc.h / (2 * _sc.e)
    electron_charge: float = _sc.e
    planck: float = _sc.h

    @property
    def hbar(self) -> float:
        return self.planck / (2 * math.pi)

    @property
    def reduced_flux_quantum(self) -> float:
        """Phi0 / 2pi in Wb."""
        return self.flux_quantum / (2 * math.pi)


CONSTANTS = PhysicalConstants()

# thresholds for the qualitative orderings ">>" and "!="
MUCH_GREATER_RATIO = 5.0
DISTINCT_REL_GAP = 0.01


def to_angular(f):
    """Linear frequency -> angular frequency (same time unit)."""
    return 2 * math.pi * f


def from_angular(w):
    return w / (2 * math.pi)


def energy_ghz_to_joule(e_ghz: float) -> float:
    return e_ghz * 1e9 * CONSTANTS.planck


def joule_to_ghz(e_joule: float) -> float:
    return e_joule / CONSTANTS.planck / 1e9


def inductive_energy_ghz(inductance_ph: float) -> float:
    """(Phi0/2pi)^2 / L expressed as a frequency in GHz."""
    if inductance_ph <= 0:
        raise ConfigError("inductance must be positive")
    return joule_to_ghz(CONSTANTS.reduced_flux_quantum**2 / (inductance_ph * 1e-12))


def josephson_inductance_ph(ej_ghz: float) -> float:
    """L_J = Phi0^2 / (4 pi^2 E_J), in pH."""
    if ej_ghz <= 0:
        raise ValueError("E_J must be positive")
    return CONSTANTS.reduced_flux_quantum**2 / energy_ghz_to_joule(ej_ghz) * 1e12


# ---------------------------------------------------------------------------
# parameter containers


@dataclass(frozen=True)
class DrivePulse:
    """Weak flux drive n*cos(2 pi f t + phase) on one drive line of a flux qubit."""

    amplitude: float
    frequency_ghz: float
    phase: float
    target: int
    qubit: int = 1

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 0.05:
            raise ConfigError(f"drive amplitude {self.amplitude} outside [0, 0.05]")
        if not self.frequency_ghz > 0:
            raise ConfigError("drive frequency must be positive")
        if self.target not in (1, 2, 3):
            raise ConfigError("drive target must be 1, 2 or 3")

    @property
    def name(self) -> str:
        return f"d{self.qubit}{self.target}"


@dataclass(frozen=True)
class FluxQubitParams:
    index: int
    ej_ghz: float
    ec_ghz: float
    alpha: float
    beta: float
    f1: float
    f2: float
    lg_ph: float = 33.0
    lambda_ratio: float = 0.0

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ConfigError("flux qubit index must be 1 or 2")
        if not self.ec_ghz > 0 or not self.ej_ghz / self.ec_ghz > 1:
            raise ConfigError(f"flux{self.index}: E_J/E_C must exceed 1")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"flux{self.index}: alpha out of range (0, 1)")
        if not self.beta > 0:
            raise ConfigError(f"flux{self.index}: beta must be positive")
        for name in ("f1", "f2"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ConfigError(f"flux{self.index}: {name} out of range [0, 1)")
        if self.lambda_ratio < 0:
            raise ConfigError(f"flux{self.index}: lambda_ratio must be >= 0")

    @property
    def f3(self) -> float:
        return self.f1 + self.f2 / 2

    @property
    def ec_s_ghz(self) -> float:
        return self.ec_ghz / (1 + 4 * self.beta)


@dataclass(frozen=True)
class SharedJunctionParams:
    label: str
    ej_ghz: float
    ec_ghz: float
    bias_ratio: float = 0.0

    def __post_init__(self):
        if self.label not in ("X", "Y", "Z", "O"):
            raise ConfigError(f"unknown shared junction {self.label!r}")
        if self.ej_ghz <= 0 or self.ec_ghz <= 0:
            raise ConfigError(f"shared {self.label}: energies must be positive")
        if not abs(self.bias_ratio) < 1:
            raise ConfigError(f"shared {self.label}: |bias_ratio| must be < 1")

    @property
    def inductance_ph(self) -> float:
        return josephson_inductance_ph(self.ej_ghz)


@dataclass(frozen=True)
class PhaseQubitParams:
    label: str
    ejp_ghz: float
    ecp_ghz: float
    bias_ratio: float
    lp_ph: float
    lrp_ph: float

    def __post_init__(self):
        if self.label not in ("x", "y", "z"):
            raise ConfigError(f"unknown phase qubit {self.label!r}")
        if self.ejp_ghz <= 0 or self.ecp_ghz <= 0:
            raise ConfigError(f"phase {self.label}: energies must be positive")
        if not abs(self.bias_ratio) < 1:
            raise ConfigError(f"phase {self.label}: |bias_ratio| must be < 1")
        if self.lp_ph <= 0 or self.lrp_ph < self.lp_ph:
            raise ConfigError(f"phase {self.label}: need 0 < L_p <= L_rp")

    @property
    def er_ghz(self) -> float:
        return inductive_energy_ghz(self.lrp_ph)

    @property
    def el_ghz(self) -> float:
        return inductive_energy_ghz(self.lp_ph)


@dataclass(frozen=True)
class DriveSettings:
    """Drive amplitudes (flux-quantum fractions) shared by the resonance solver."""

    n_m: float = 0.0006
    n_x: float = 0.01
    n_y: float = 0.01
    n_z: float = 0.01

    def __post_init__(self):
        for k in ("n_m", "n_x", "n_y", "n_z"):
            v = getattr(self, k)
            if not 0 <= v <= 0.05:
                raise ConfigError(f"drives: {k}={v} outside [0, 0.05]")


@dataclass(frozen=True)
class TimeGrid:
    t_max_us: float = 5.0
    steps: int = 2001

    def __post_init__(self):
        if self.t_max_us <= 0 or self.steps < 2:
            raise ConfigError("time grid needs t_max_us > 0 and steps >= 2")


@dataclass(frozen=True)
class MomentumSpec:
    """Momentum distribution of the initial wavepacket.

    ``mean`` is the cp vector in MHz (one entry per spatial axis). For a
    Gaussian the spread ``width`` (MHz) is taken along the mean direction.
    """

    kind: str = "point"
    mean: tuple = (0.1,)
    width: float = 0.0
    samples: int = 1

    def __post_init__(self):
        if self.kind not in ("point", "gaussian"):
            raise ConfigError(f"wavepacket kind {self.kind!r} unknown")
        if self.width < 0:
            raise ConfigError("wavepacket width must be >= 0")
        if self.samples < 1:
            raise ConfigError("wavepacket samples must be >= 1")
        object.__setattr__(self, "mean", tuple(float(m) for m in self.mean))


@dataclass(frozen=True)
class NoiseEnvironment:
    resistance_ohm: float = 50.0
    mutual_inductance_ph: float = 5.0
    gate_capacitance_ratio: float = 0.0
    flux_noise_alpha: float = 1e-12
    omega_t_ghz: float = 3.0
    omega_c_ghz: float = 1e-9

    def __post_init__(self):
        if self.resistance_ohm <= 0:
            raise ConfigError("noise: resistance must be positive")
        if not self.omega_t_ghz > self.omega_c_ghz > 0:
            raise ConfigError("noise: need omega_t > omega_c > 0")
        if self.flux_noise_alpha < 0 or self.mutual_inductance_ph < 0:
            raise ConfigError("noise: amplitudes must be non-negative")

    def re_z(self, f_ghz: float) -> float:
        return self.resistance_ohm

    def re_y(self, f_ghz: float) -> float:
        return 1.0 / self.resistance_ohm


@dataclass(frozen=True)
class GridSettings:
    n_max_a: int = 16
    n_max_s: int = 24

    def __post_init__(self):
        if min(self.n_max_a, self.n_max_s) < 8:
            raise ConfigError("charge-basis truncation must be >= 8")


@dataclass(frozen=True)
class SimulationConfig:
    dimension: int
    flux: tuple
    phase: Mapping[str, PhaseQubitParams]
    shared: Mapping[str, SharedJunctionParams]
    drives: DriveSettings = field(default_factory=DriveSettings)
    time: TimeGrid = field(default_factory=TimeGrid)
    wavepacket: MomentumSpec = field(default_factory=MomentumSpec)
    noise: NoiseEnvironment = field(default_factory=NoiseEnvironment)
    grid: GridSettings = field(default_factory=GridSettings)
    mc2_mhz: float | None = None
    flags: tuple = ()

    @property
    def axes(self) -> tuple:
        return "xyz"[: self.dimension]

    def flux_qubit(self, index: int) -> FluxQubitParams:
        return self.flux[index - 1]


# ---------------------------------------------------------------------------
# defaults and inventory rules

DELTA_F = 0.015
INVENTORY = {
    1: {"flux": 1, "phase": ("x",), "shared": ("X",)},
    2: {"flux": 2, "phase": ("x", "y"), "shared": ("X", "Y", "O")},
    3: {"flux": 2, "phase": ("x", "y", "z"), "shared": ("X", "Y", "Z", "O")},
}

# operating points where the drive couplings Z2, X2 are large and flat
_FLUX_DEFAULTS = {
    1: {"ej_ghz": 300.0, "ej_over_ec": 30.0, "alpha": 0.6, "beta": 6.0,
        "f1": 0.3310, "f2": 1 / 3 - DELTA_F, "lg_ph": 33.0},
    2: {"ej_ghz": 400.0, "ej_over_ec": 30.0, "alpha": 0.6, "beta": 6.0,
        "f1": 0.3555, "f2": 1 / 3 - DELTA_F, "lg_ph": 33.0},
}
SYMMETRIC_F1 = 1 / 3 + DELTA_F / 2
# E_Jp/E_Cp is printed as 1e-6 in the source table; a phase qubit needs the inverse
_PHASE_DEFAULTS = {
    "x": {"ejp_ghz": 850.0, "ejp_over_ecp": 1e6, "bias_ratio": 0.99, "lp_ph": 40.0},
    "y": {"ejp_ghz": 1100.0, "ejp_over_ecp": 1e6, "bias_ratio": 0.99, "lp_ph": 40.0},
    "z": {"ejp_ghz": 1350.0, "ejp_over_ecp": 1e6, "bias_ratio": 0.99, "lp_ph": 40.0},
}
# charging energies of the buses are not given; chosen so that
# omega_O >> omega_X,Y,Z >> qubit and drive frequencies
_SHARED_DEFAULTS = {
    "X": {"ej_ghz": 8000.0, "ec_ghz": 0.40, "bias_ratio": 0.0},
    "Y": {"ej_ghz": 8000.0, "ec_ghz": 0.42, "bias_ratio": 0.0},
    "Z": {"ej_ghz": 8000.0, "ec_ghz": 0.44, "bias_ratio": 0.0},
    "O": {"ej_ghz": 8000.0, "ec_ghz": 12.0, "bias_ratio": 0.0},
}


def _take(section: Mapping, key: str, default, cast=float):
    v = section.get(key, default)
    if v is None:
        return None
    try:
        return cast(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {key!r}: cannot interpret {v!r}") from exc


def _section(doc: Mapping, key: str) -> Mapping:
    sec = doc.get(key) or {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"section {key!r} must be a mapping")
    return sec


def _build_flux(doc, index, flags):
    sec = _section(doc, f"flux{index}")
    d = _FLUX_DEFAULTS[index]
    ej = _take(sec, "ej_ghz", d["ej_ghz"])
    if "ec_ghz" in sec:
        ec = _take(sec, "ec_ghz", None)
    else:
        ec = ej / _take(sec, "ej_over_ec", d["ej_over_ec"])
    if "f3" in sec:
        raise ConfigError(f"flux{index}: f3 is derived from f1 and f2, do not set it")
    return FluxQubitParams(
        index=index,
        ej_ghz=ej,
        ec_ghz=ec,
        alpha=_take(sec, "alpha", d["alpha"]),
        beta=_take(sec, "beta", d["beta"]),
        f1=_take(sec, "f1", d["f1"]),
        f2=_take(sec, "f2", d["f2"]),
        lg_ph=_take(sec, "lg_ph", d["lg_ph"]),
        lambda_ratio=_take(sec, "lambda_ratio", 0.0),
    )


def _build_shared(doc, label):
    sec = _section(doc, f"shared_{label}")
    d = _SHARED_DEFAULTS[label]
    return SharedJunctionParams(
        label=label,
        ej_ghz=_take(sec, "ej_ghz", d["ej_ghz"]),
        ec_ghz=_take(sec, "ec_ghz", d["ec_ghz"]),
        bias_ratio=_take(sec, "bias_ratio", d["bias_ratio"]),
    )


def _build_phase(doc, label, shared_bus, flags):
    sec = _section(doc, f"phase_{label}")
    d = _PHASE_DEFAULTS[label]
    ej = _take(sec, "ejp_ghz", d["ejp_ghz"])
    if "ecp_ghz" in sec:
        ec = _take(sec, "ecp_ghz", None)
    else:
        if "ejp_over_ecp" not in sec:
            flags.append(f"phase_{label}: E_Jp/E_Cp default 1e6 (inverted from printed 1e-6)")
        ec = ej / _take(sec, "ejp_over_ecp", d["ejp_over_ecp"])
    lp = _take(sec, "lp_ph", d["lp_ph"])
    # ring enclosing the phase qubit: L_rp = L_p + L_JP
    lrp = _take(sec, "lrp_ph", lp + shared_bus.inductance_ph)
    return PhaseQubitParams(
        label=label,
        ejp_ghz=ej,
        ecp_ghz=ec,
        bias_ratio=_take(sec, "bias_ratio", d["bias_ratio"]),
        lp_ph=lp,
        lrp_ph=lrp,
    )


def _from_dict(doc: Mapping) -> SimulationConfig:
    if not isinstance(doc, Mapping):
        raise ConfigError("config document must be a mapping at top level")
    known = {"dimension", "drives", "time", "wavepacket", "noise", "grid", "mc2_mhz",
             "flux1", "flux2"}
    known |= {f"phase_{p}" for p in "xyz"} | {f"shared_{p}" for p in "XYZO"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(map(str, unknown)))}")

    dim = _take(doc, "dimension", 1, int)
    if dim not in INVENTORY:
        raise ConfigError("dimension must be 1, 2 or 3")
    inv = INVENTORY[dim]
    for p in "xyz":
        if f"phase_{p}" in doc and p not in inv["phase"]:
            raise ConfigError(f"phase_{p} not part of a {dim}+1D circuit")
    for p in "XYZO":
        if f"shared_{p}" in doc and p not in inv["shared"]:
            raise ConfigError(f"shared_{p} not part of a {dim}+1D circuit")
    if "flux2" in doc and inv["flux"] < 2:
        raise ConfigError("flux2 not part of a 1+1D circuit")

    flags: list[str] = []
    flux = tuple(_build_flux(doc, i, flags) for i in range(1, inv["flux"] + 1))
    shared = {lab: _build_shared(doc, lab) for lab in inv["shared"]}
    phase = {lab: _build_phase(doc, lab, shared[lab.upper()], flags) for lab in inv["phase"]}

    # E_JP, E_JO >> E_J, E_Jp
    for lab, sj in shared.items():
        if lab == "O":
            small = max(q.ej_ghz for q in flux)
        else:
            small = max(phase[lab.lower()].ejp_ghz, flux[0].ej_ghz)
        if sj.ej_ghz < MUCH_GREATER_RATIO * small:
            raise ConfigError(
                f"shared_{lab}: ej_ghz={sj.ej_ghz} violates E_J hierarchy "
                f"(needs >= {MUCH_GREATER_RATIO} x {small})"
            )

    dr = _section(doc, "drives")
    drives = DriveSettings(**{k: _take(dr, k, getattr(DriveSettings, k)) for k in
                              ("n_m", "n_x", "n_y", "n_z")})
    tg = _section(doc, "time")
    time = TimeGrid(t_max_us=_take(tg, "t_max_us", 5.0), steps=_take(tg, "steps", 2001, int))
    wp = _section(doc, "wavepacket")
    mean = wp.get("mean_mhz")
    if mean is None:
        mean = [0.1] * dim
    elif not isinstance(mean, (list, tuple)):
        mean = [float(mean)] + [0.0] * (dim - 1)
    if len(mean) != dim:
        raise ConfigError(f"wavepacket.mean_mhz needs {dim} entries")
    kind = str(wp.get("kind", "gaussian"))
    # default spread: a fifth of the mean momentum
    width = _take(wp, "width_mhz", math.hypot(*map(float, mean)) / 5 if kind == "gaussian" else 0.0)
    wavepacket = MomentumSpec(
        kind=kind,
        mean=tuple(mean),
        width=width,
        samples=_take(wp, "samples", 41 if kind == "gaussian" else 1, int),
    )
    nz = _section(doc, "noise")
    noise = NoiseEnvironment(**{
        k: _take(nz, k, getattr(NoiseEnvironment, k))
        for k in ("resistance_ohm", "mutual_inductance_ph", "gate_capacitance_ratio",
                  "flux_noise_alpha", "omega_t_ghz", "omega_c_ghz")
    })
    gr = _section(doc, "grid")
    grid = GridSettings(n_max_a=_take(gr, "n_max_a", 16, int), n_max_s=_take(gr, "n_max_s", 24, int))
    mc2 = _take(doc, "mc2_mhz", None)
    if mc2 is not None and mc2 < 0:
        raise ConfigError("mc2_mhz must be >= 0")
    return SimulationConfig(
        dimension=dim, flux=flux, phase=phase, shared=shared, drives=drives, time=time,
        wavepacket=wavepacket, noise=noise, grid=grid, mc2_mhz=mc2, flags=tuple(flags),
    )


def load_config(document: str | Mapping | None) -> SimulationConfig:
    """Parse and validate a YAML config document (or an already-parsed mapping).

    Omitted fields fall back to the reference circuit parameters.
    """
    if document is None:
        doc: Any = {}
    elif isinstance(document, Mapping):
        doc = document
    else:
        try:
            doc = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            raise ConfigError(f"parse error: {exc}") from exc
        if doc is None:
            doc = {}
    return _from_dict(doc)


def default_config(dimension: int = 1) -> SimulationConfig:
    return load_config({"dimension": dimension})


def config_to_dict(cfg: SimulationConfig) -> dict:
    """Explicit document form of a config; every field written out."""
    out: dict[str, Any] = {"dimension": cfg.dimension}
    for q in cfg.flux:
        out[f"flux{q.index}"] = {
            "ej_ghz": q.ej_ghz, "ec_ghz": q.ec_ghz, "alpha": q.alpha, "beta": q.beta,
            "f1": q.f1, "f2": q.f2, "lg_ph": q.lg_ph, "lambda_ratio": q.lambda_ratio,
        }
    for lab, p in cfg.phase.items():
        out[f"phase_{lab}"] = {
            "ejp_ghz": p.ejp_ghz, "ecp_ghz": p.ecp_ghz, "bias_ratio": p.bias_ratio,
            "lp_ph": p.lp_ph, "lrp_ph": p.lrp_ph,
        }
    for lab, s in cfg.shared.items():
        out[f"shared_{lab}"] = {"ej_ghz": s.ej_ghz, "ec_ghz": s.ec_ghz, "bias_ratio": s.bias_ratio}
    out["drives"] = dataclasses.asdict(cfg.drives)
    out["time"] = dataclasses.asdict(cfg.time)
    out["wavepacket"] = {
        "kind": cfg.wavepacket.kind, "mean_mhz": list(cfg.wavepacket.mean),
        "width_mhz": cfg.wavepacket.width, "samples": cfg.wavepacket.samples,
    }
    out["noise"] = dataclasses.asdict(cfg.noise)
    out["grid"] = dataclasses.asdict(cfg.grid)
    out["mc2_mhz"] = cfg.mc2_mhz
    return out


def serialize_config(cfg: SimulationConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=True, default_flow_style=False)


def config_hash(cfg: SimulationConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


# ---------------------------------------------------------------------------
# frequency hierarchy


def hierarchy_warnings(freqs: Mapping[str, float]) -> list[str]:
    """Check omega_O >> omega_X != omega_Y != omega_Z >> qubit and drive frequencies.

    ``freqs`` maps names to linear frequencies. Bus keys are ``"O"``, ``"X"``,
    ``"Y"``, ``"Z"``; every other key counts as a slow (qubit/drive) frequency.
    """
    warnings = []
    buses = {k: freqs[k] for k in ("X", "Y", "Z") if k in freqs}
    slow = {k: v for k, v in freqs.items() if k not in ("O", "X", "Y", "Z")}
    if "O" in freqs:
        for k, w in buses.items():
            ratio = freqs["O"] / w
            if ratio < MUCH_GREATER_RATIO:
                warnings.append(f"omega_O/omega_{k} = {ratio:.6g} < {MUCH_GREATER_RATIO:g}")
    names = sorted(buses)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            gap = abs(buses[a] - buses[b]) / max(buses[a], buses[b])
            if gap < DISTINCT_REL_GAP:
                warnings.append(
                    f"degenerate bus frequencies omega_{a}, omega_{b} (relative gap {gap:.3g})"
                )
    if buses and slow:
        low = min(buses.values())
        k_fast = max(slow, key=lambda k: abs(slow[k]))
        ratio = low / abs(slow[k_fast])
        if ratio < MUCH_GREATER_RATIO:
            warnings.append(f"min bus / {k_fast} = {ratio:.6g} < {MUCH_GREATER_RATIO:g}")
    return warnings


def validate_hierarchy(cfg: SimulationConfig, slow: Mapping[str, float] | None = None) -> list[str]:
    """Hierarchy warnings for the bus modes of ``cfg`` plus optional slow frequencies."""
    from .phasequbit import quantize

    freqs = {lab: quantize(sj).omega_ghz for lab, sj in cfg.shared.items()}
    freqs.update(slow or {})
    return hierarchy_warnings(freqs)

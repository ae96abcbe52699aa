"""Iterated Dyson expansion with rotating-wave selection.

Every operator is written in the interaction picture of its own free
Hamiltonian, so each factor carries a definite frequency:

* qubit 1 (free part ``X0 sigma_x``): units ``I``, ``Zs = sigma_x`` (static),
  ``+ = (sigma_z - i sigma_y)/2`` at ``+2 X0`` and ``-`` its adjoint;
* qubit 2 (free part ``Z0 sigma_z``): ``I``, ``Zs = sigma_z``, ``sigma_+`` at
  ``+2 Z0`` and ``sigma_-``;
* bosons ``a^+`` at ``+f`` and ``a^-`` at ``-f``;
* drives ``n/2 exp(+-i(2 pi f t + phase))`` as scalar factors.

A product of ``k`` interaction terms taken in a time ordering (outer first)
is integrated with the running exponential only; the lower-limit boundary
terms are dropped. The Dyson prefactor ``-i 2 pi`` combined with each
``1/(i 2 pi f)`` gives a factor ``-1/f`` per integral (see
:func:`integral_factor`). Shared-bus modes X, Y, Z, O are then reduced
against the vacuum.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BUS_MODES",
    "DriveLine",
    "EffectiveCoupling",
    "FrequencyTable",
    "InteractionTerm",
    "RotatingMonomial",
    "SmallDenominatorError",
    "collect_secular",
    "expand_orderings",
    "integral_factor",
    "monomial",
    "operator_terms",
    "ordered_integral",
    "vacuum_reduce",
]

SITE_ORDER = ("q1", "q2", "x", "y", "z", "X", "Y", "Z", "O")
BUS_MODES = ("X", "Y", "Z", "O")
QUBIT_UNITS = ("I", "Zs", "+", "-")

_sx = np.array([[0, 1], [1, 0]], dtype=complex)
_sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
_sz = np.array([[1, 0], [0, -1]], dtype=complex)
_id = np.eye(2, dtype=complex)

UNIT_MATRICES = {
    "q1": {"I": _id, "Zs": _sx, "+": (_sz - 1j * _sy) / 2, "-": (_sz + 1j * _sy) / 2},
    "q2": {"I": _id, "Zs": _sz, "+": (_sx + 1j * _sy) / 2, "-": (_sx - 1j * _sy) / 2},
}
_DECOMP = {
    site: np.linalg.inv(np.column_stack([m[u].ravel() for u in QUBIT_UNITS]))
    for site, m in UNIT_MATRICES.items()
}


class SmallDenominatorError(ArithmeticError):
    pass


def integral_factor(f_ghz: float) -> float:
    """Dyson prefactor times one running-exponential integral.

    ``(-i 2 pi) * 1/(i 2 pi f) = -1/f``; the only place where the 2 pi of the
    linear-frequency convention enters the engine.
    """
    return (-2j * math.pi / (2j * math.pi * f_ghz)).real


@dataclass(frozen=True)
class DriveLine:
    name: str
    amplitude: float
    frequency_ghz: float
    phase: float


@dataclass(frozen=True)
class FrequencyTable:
    """Frequencies (GHz) of every site and drive line in a calculation."""

    qubit: dict = field(default_factory=dict)  # site -> splitting frequency 2X0 / 2Z0
    boson: dict = field(default_factory=dict)  # mode -> f
    drive: dict = field(default_factory=dict)  # name -> f

    def token_frequency(self, site: str, token: str) -> float:
        if site in ("q1", "q2"):
            return {"I": 0.0, "Zs": 0.0, "+": 1.0, "-": -1.0}[token] * self.qubit[site]
        return sum(self.boson[site] * (1 if c == "+" else -1) for c in token)

    def bus_frequencies(self, word) -> Counter:
        """Net signed count of every bus mode in ``word``."""
        out = Counter()
        for site, token in word:
            if site in BUS_MODES:
                out[site] += token.count("+") - token.count("-")
        return out


@dataclass(frozen=True)
class RotatingMonomial:
    """amplitude * word * drive factors; the frequency is always derived."""

    amplitude: complex
    word: tuple  # ((site, token), ...) in canonical site order
    drives: tuple  # ((name, +-1), ...) sorted
    table: FrequencyTable = field(compare=False, repr=False)
    provenance: tuple = field(default=(), compare=False)

    def __post_init__(self):
        sites = [s for s, _ in self.word]
        if sites != sorted(sites, key=SITE_ORDER.index) or len(set(sites)) != len(sites):
            raise ValueError(f"word not canonical: {self.word}")
        for site, tok in self.word:
            if site in ("q1", "q2"):
                if tok not in QUBIT_UNITS or tok == "I":
                    raise ValueError(f"bad qubit token {tok!r}")
            elif site in SITE_ORDER:
                if not tok or set(tok) - {"+", "-"}:
                    raise ValueError(f"bad boson token {tok!r}")
            else:
                raise ValueError(f"unknown site {site!r}")

    @property
    def frequency(self) -> float:
        f = sum(self.table.token_frequency(s, t) for s, t in self.word)
        return f + sum(sgn * self.table.drive[name] for name, sgn in self.drives)

    def label(self) -> str:
        parts = [f"{s}[{t}]" for s, t in self.word]
        return " ".join(parts) if parts else "1"


def monomial(amplitude, ops: dict, drives=(), table: FrequencyTable | None = None) -> RotatingMonomial:
    unknown = set(ops) - set(SITE_ORDER)
    if unknown:
        raise ValueError(f"unknown site(s) {sorted(unknown)}")
    word = tuple((s, ops[s]) for s in SITE_ORDER if s in ops and ops[s] != "I")
    return RotatingMonomial(complex(amplitude), word, tuple(sorted(drives)), table or FrequencyTable())


@dataclass(frozen=True)
class InteractionTerm:
    name: str
    monomials: tuple

    def __post_init__(self):
        keys = Counter((m.word, m.drives) for m in self.monomials)
        for m in self.monomials:
            if (_adjoint_word(m.word), tuple(sorted((n, -s) for n, s in m.drives))) not in keys:
                raise ValueError(f"{self.name}: missing conjugate partner of {m.label()}")


_ADJ_Q = {"Zs": "Zs", "+": "-", "-": "+"}


def _adjoint_word(word):
    out = []
    for s, t in word:
        if s in ("q1", "q2"):
            out.append((s, _ADJ_Q[t]))
        else:
            out.append((s, "".join("-" if c == "+" else "+" for c in reversed(t))))
    return tuple(out)


# ---------------------------------------------------------------------------
# building blocks


def operator_terms(site: str, op: str):
    """Expand a named Hermitian single-site operator into rotating units.

    Qubit names: ``sx``, ``sy``, ``sz`` (lab Pauli matrices in the working
    basis of that qubit). Boson name ``q`` gives ``a^+ + a^-``.
    Returns a list of (coefficient, token).
    """
    if site in ("q1", "q2"):
        mat = {"sx": _sx, "sy": _sy, "sz": _sz}[op]
        coef = _DECOMP[site] @ mat.ravel()
        return [(c, u) for c, u in zip(coef, QUBIT_UNITS) if abs(c) > 1e-14]
    if op != "q":
        raise ValueError(f"unknown boson operator {op!r}")
    return [(1.0, "+"), (1.0, "-")]


def build_term(name, amplitude, factors, drive_lines=(), table=None) -> InteractionTerm:
    """amplitude * prod(single-site operators) * (sum of drive lines).

    ``factors`` is a list of (site, op, scale) with op as in :func:`operator_terms`.
    Each drive line contributes ``amp/2 exp(+-i phase)`` with sign +-1.
    """
    choices = [[(scale * c, site, tok) for c, tok in operator_terms(site, op)]
               for site, op, scale in factors]
    drive_choices = [[]]
    if drive_lines:
        drive_choices = [
            [(0.5 * d.amplitude * complex(math.cos(d.phase), sgn * math.sin(d.phase)), d.name, sgn)]
            for d in drive_lines for sgn in (1, -1)
        ]
    out = []
    for combo in itertools.product(*choices):
        amp = complex(amplitude)
        ops = {}
        for c, site, tok in combo:
            amp *= c
            ops[site] = tok
        for dc in drive_choices:
            a2 = amp
            drv = []
            for c, dname, sgn in dc:
                a2 *= c
                drv.append((dname, sgn))
            out.append(monomial(a2, ops, drv, table))
    return InteractionTerm(name, tuple(out))


def _multiply_site(site, t1, t2):
    if site in ("q1", "q2"):
        mats = UNIT_MATRICES[site]
        prod = (mats.get(t1, _id)) @ (mats.get(t2, _id))
        coef = _DECOMP[site] @ prod.ravel()
        return [(c, u) for c, u in zip(coef, QUBIT_UNITS) if abs(c) > 1e-14]
    return [(1.0, t1 + t2)]


def multiply(a: RotatingMonomial, b: RotatingMonomial) -> list:
    """Operator product a*b expanded into canonical monomials."""
    da, db = dict(a.word), dict(b.word)
    per_site = []
    for site in SITE_ORDER:
        if site in da and site in db:
            per_site.append([(c, site, t) for c, t in _multiply_site(site, da[site], db[site])])
        elif site in da or site in db:
            per_site.append([(1.0, site, da.get(site, db.get(site)))])
    drives = tuple(sorted(a.drives + b.drives))
    out = []
    for combo in itertools.product(*per_site):
        amp = a.amplitude * b.amplitude
        ops = {}
        for c, site, tok in combo:
            amp *= c
            ops[site] = tok
        out.append(monomial(amp, ops, drives, a.table))
    return out


def _vacuum_element(token: str) -> float:
    """<0| a^{s1} a^{s2} ... |0> with operators applied right to left."""
    n = len(token) + 1
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    vec = np.zeros(n)
    vec[0] = 1.0
    for c in reversed(token):
        vec = (a.T if c == "+" else a) @ vec
    return float(vec[0])


def vacuum_reduce(m: RotatingMonomial) -> RotatingMonomial | None:
    """Replace every bus-mode string by its vacuum expectation value."""
    amp = m.amplitude
    word = []
    for site, tok in m.word:
        if site in BUS_MODES:
            amp *= _vacuum_element(tok)
        else:
            word.append((site, tok))
    if amp == 0:
        return None
    return RotatingMonomial(amp, tuple(word), m.drives, m.table, m.provenance)


# ---------------------------------------------------------------------------
# ordered integrals


def _closed_denominator(counts: Counter, table: FrequencyTable) -> tuple:
    """Bus-only partial sum collapsed onto its fastest mode, as in the hand derivation."""
    live = [(table.boson[k], k, v) for k, v in counts.items() if v != 0]
    if not live:
        return 0.0, ""
    f, k, v = max(live)
    return v * f, k


def ordered_integral(product, ordering=None, mode: str = "exact", eps_den: float = 0.1,
                     keep_boundary: bool = False) -> list:
    """Expand ``I_o int I_m int I_i`` (outer first) into reduced monomials.

    ``product`` is a list of :class:`InteractionTerm`; ``ordering`` a tuple of
    indices into it (default: as given). ``mode="exact"`` uses the full
    partial frequency sums; ``mode="closed"`` keeps only the bus-mode part of
    each sum, collapsed onto its fastest mode. ``keep_boundary`` is accepted
    for diagnostics only; boundary terms carry a time dependence that is not a
    monomial and are therefore never produced.
    """
    if keep_boundary:
        raise NotImplementedError("boundary terms are not representable as rotating monomials")
    if mode not in ("exact", "closed"):
        raise ValueError("mode must be 'exact' or 'closed'")
    ordering = tuple(range(len(product))) if ordering is None else tuple(ordering)
    if len(ordering) not in (2, 3):
        raise ValueError("only second and third order are supported")
    terms = [product[i] for i in ordering]
    tag = "".join(t.name for t in terms)
    out = []
    for combo in itertools.product(*(t.monomials for t in terms)):
        # operator product outer * ... * inner
        expanded = [combo[0]]
        for m in combo[1:]:
            expanded = [p for e in expanded for p in multiply(e, m)]
        reduced = [r for r in (vacuum_reduce(e) for e in expanded) if r is not None]
        if not reduced:
            continue
        dens, labels, ocount = [], [], 0
        running_counts = Counter()
        running = 0.0
        for m in reversed(combo[1:]):
            if mode == "exact":
                running += m.frequency
                den = running
                lab = f"{den:.6g}"
            else:
                running_counts.update(m.table.bus_frequencies(m.word))
                den, lab = _closed_denominator(running_counts, m.table)
                ocount += lab == "O"
            dens.append(den)
            labels.append(lab)
        bad = [d for d in dens if abs(d) < eps_den]
        if bad:
            raise SmallDenominatorError(
                f"ordering {tag}: partial frequency sum {bad[0]:.3g} GHz below {eps_den} GHz "
                f"({' '.join(m.label() for m in combo)})"
            )
        factor = 1.0
        for d in dens:
            factor *= integral_factor(d)
        for r in reduced:
            out.append(RotatingMonomial(
                r.amplitude * factor, r.word, r.drives, r.table,
                provenance=((tag, tuple(labels), tuple(dens), ocount),),
            ))
    return out


def expand_orderings(terms, mode="exact", eps_den=0.1):
    """All k! orderings of the product, concatenated."""
    out = []
    for perm in itertools.permutations(range(len(terms))):
        out.extend(ordered_integral(terms, perm, mode=mode, eps_den=eps_den))
    return out


@dataclass
class EffectiveCoupling:
    word: tuple
    coefficient_ghz: complex
    provenance: list

    @property
    def coefficient_mhz(self) -> complex:
        return self.coefficient_ghz * 1e3

    def label(self) -> str:
        return " ".join(f"{s}[{t}]" for s, t in self.word) or "1"


@dataclass
class SecularResult:
    couplings: list
    census: dict


def collect_secular(monomials, tol: float = 1e-3, mode: str = "exact") -> SecularResult:
    """Keep monomials with |frequency| <= tol, merge by operator word.

    In ``closed`` mode only orderings with the fewest fast-bus (O) denominators
    survive for each word, matching the hand derivation that drops the
    orderings suppressed by an extra 1/omega_O.
    """
    kept = defaultdict(list)
    discarded = Counter()
    for m in monomials:
        f = m.frequency
        if abs(f) <= tol:
            kept[m.word].append(m)
        else:
            discarded[round(f, 6)] += 1
    dropped_o = 0
    couplings = []
    for word in sorted(kept, key=_word_key):
        ms = kept[word]
        if mode == "closed" and any(m.provenance for m in ms):
            low = min(m.provenance[0][3] for m in ms if m.provenance)
            survivors = [m for m in ms if not m.provenance or m.provenance[0][3] == low]
            dropped_o += len(ms) - len(survivors)
            ms = survivors
        ms = sorted(ms, key=lambda m: (m.provenance, m.drives))
        coef = sum((m.amplitude for m in ms), 0j)
        prov = [(m.provenance[0][0] if m.provenance else "first-order", m.drives,
                 m.provenance[0][2] if m.provenance else ()) for m in ms]
        if abs(coef) > 0:
            couplings.append(EffectiveCoupling(word, coef, prov))
    census = {
        "kept_monomials": sum(len(v) for v in kept.values()) - dropped_o,
        "discarded_fast": sum(discarded.values()),
        "discarded_fast_by_frequency": dict(sorted(discarded.items())),
        "discarded_extra_fast_denominator": dropped_o,
    }
    return SecularResult(couplings, census)


def _word_key(word):
    return tuple((SITE_ORDER.index(s), t) for s, t in word)


# ---------------------------------------------------------------------------
# circuit-level interaction lists


@dataclass(frozen=True)
class CircuitCouplings:
    """Everything the interaction lists need, in GHz.

    ``q1``/``q2`` are the dictionaries of :func:`fluxqubit.rotated_couplings`;
    ``modes`` maps x, y, z, X, Y, Z, O to :class:`phasequbit.PhaseMode`.
    """

    dimension: int
    q1: dict
    q2: dict | None
    modes: dict
    el_ghz: dict  # axis -> E_L of that phase-qubit loop
    shared_ej: dict  # bus label -> E_J
    n_m: float
    n_axis: dict  # axis -> drive amplitude

    @property
    def two_x0(self) -> float:
        return 2 * self.q1["splitting"]

    @property
    def two_z0(self) -> float:
        return 2 * self.q2["splitting"] if self.q2 else float("nan")

    def table(self, drives: dict | None = None) -> FrequencyTable:
        qubit = {"q1": self.two_x0}
        if self.q2:
            qubit["q2"] = self.two_z0
        return FrequencyTable(
            qubit=qubit,
            boson={k: m.omega_ghz for k, m in self.modes.items()},
            drive={k: d.frequency_ghz for k, d in (drives or {}).items()},
        )


def circuit_couplings(cfg) -> CircuitCouplings:
    from . import fluxqubit, phasequbit

    grid = fluxqubit.ChargeBasisGrid(cfg.grid.n_max_a, cfg.grid.n_max_s)
    rc = []
    for q in cfg.flux:
        sol = fluxqubit.solve(q, grid)
        rc.append(fluxqubit.rotated_couplings(fluxqubit.matrix_elements(sol), q))
    modes = {lab: phasequbit.quantize(p) for lab, p in cfg.phase.items()}
    modes.update({lab: phasequbit.quantize(s) for lab, s in cfg.shared.items()})
    dr = cfg.drives
    return CircuitCouplings(
        dimension=cfg.dimension,
        q1=rc[0],
        q2=rc[1] if len(rc) > 1 else None,
        modes=modes,
        el_ghz={lab: p.el_ghz for lab, p in cfg.phase.items()},
        shared_ej={lab: s.ej_ghz for lab, s in cfg.shared.items()},
        n_m=dr.n_m,
        n_axis={"x": dr.n_x, "y": dr.n_y, "z": dr.n_z},
    )


# frequency conditions: name -> (description, target frequency, phase, amplitude key)
def resonance_conditions(cc: CircuitCouplings) -> dict:
    w = {k: m.omega_ghz for k, m in cc.modes.items()}
    out = {"d13": ("2X0(1) - w3(1) = 0", cc.two_x0, 0.0, "m")}
    if cc.dimension == 1:
        out["d11"] = ("w_x - w1(1) = 0", w["x"], math.pi / 2, "x")
        return out
    z2 = cc.two_z0
    out.update({
        "d11": ("2Z0(2) + w_y - w1(1) = 0", z2 + w["y"], 0.0, "y"),
        "d12": ("2Z0(2) - w_y - w2(1) = 0", z2 - w["y"], math.pi, "y"),
        "d21": ("2Z0(2) + w_x - w1(2) = 0", z2 + w["x"], -math.pi / 2, "x"),
        "d22": ("2Z0(2) - w_x - w2(2) = 0", z2 - w["x"], math.pi / 2, "x"),
    })
    if cc.dimension == 3:
        out["d23"] = ("w_z - w3(2) = 0", w["z"], -math.pi / 2, "z")
    return out


def solve_resonance(cc: CircuitCouplings) -> dict:
    """Drive lines that satisfy every frequency condition exactly."""
    out = {}
    for name, (_, f, ph, key) in resonance_conditions(cc).items():
        if f <= 0:
            raise ValueError(f"{name}: resonance condition needs a positive frequency, got {f}")
        amp = cc.n_m if key == "m" else cc.n_axis[key]
        out[name] = DriveLine(name, amp, f, ph)
    return out


def validate_resonance(drives: dict, cc: CircuitCouplings, tol: float = 1e-6) -> dict:
    """Residual (GHz) and phase error of every frequency condition plus hierarchy warnings."""
    from .core import hierarchy_warnings

    rows = []
    for name, (desc, f, ph, _) in resonance_conditions(cc).items():
        d = drives.get(name)
        if d is None:
            rows.append({"drive": name, "condition": desc, "residual_ghz": None, "ok": False,
                         "note": "missing drive"})
            continue
        res = f - d.frequency_ghz
        dph = math.remainder(d.phase - ph, 2 * math.pi)
        rows.append({"drive": name, "condition": desc, "residual_ghz": res,
                     "phase_error": dph, "ok": abs(res) < tol and abs(dph) < 1e-9})
    freqs = {k: cc.modes[k].omega_ghz for k in BUS_MODES if k in cc.modes}
    freqs["2X0(1)"] = cc.two_x0
    if cc.q2:
        freqs["2Z0(2)"] = cc.two_z0
    return {"conditions": rows, "flagged": [r["drive"] for r in rows if not r["ok"]],
            "hierarchy": hierarchy_warnings(freqs)}


def build_interactions(cc: CircuitCouplings, drives: dict) -> dict:
    """Interaction lists: ``mass`` (first order) and one list per spatial axis."""
    t = cc.table(drives)
    lam = {k: m.lam for k, m in cc.modes.items()}
    x2a = cc.q1["X2"]
    out = {}
    d13 = drives["d13"]
    rate = DriveLine("d13", d13.amplitude * d13.frequency_ghz, d13.frequency_ghz, d13.phase - math.pi / 2)
    mass = []
    for coeff, op in ((cc.q1["Z1"], "sz"), (cc.q1["X1"], "sx")):
        mass += build_term("M", coeff, [("q1", op, 1.0)], [d13], t).monomials
    for coeff, op in ((cc.q1["Z3"], "sz"), (cc.q1["X3"], "sx")):
        mass += build_term("M", coeff, [("q1", op, 1.0)], [rate], t).monomials
    out["mass"] = [InteractionTerm("M", tuple(mass))]
    if cc.dimension == 1:
        out["x"] = [
            build_term("1", x2a, [("q1", "sx", 1.0), ("X", "q", lam["X"])], [drives["d11"]], t),
            build_term("2", -cc.el_ghz["x"], [("x", "q", lam["x"]), ("X", "q", lam["X"])], (), t),
        ]
        return out
    x2b, z2b = cc.q2["X2"], cc.q2["Z2"]
    out["x"] = [
        build_term("1", -x2a, [("q1", "sx", 1.0), ("X", "q", lam["X"]), ("O", "q", lam["O"])], (), t),
        build_term("2", x2b, [("q2", "sx", 1.0), ("O", "q", lam["O"])],
                   [drives["d21"], drives["d22"]], t),
        build_term("3", -cc.el_ghz["x"], [("x", "q", lam["x"]), ("X", "q", lam["X"])], (), t),
    ]
    out["y"] = [
        build_term("1", -x2a, [("q1", "sx", 1.0), ("O", "q", lam["O"])],
                   [drives["d11"], drives["d12"]], t),
        build_term("2", x2b, [("q2", "sx", 1.0), ("Y", "q", lam["Y"]), ("O", "q", lam["O"])], (), t),
        build_term("3", -cc.el_ghz["y"], [("y", "q", lam["y"]), ("Y", "q", lam["Y"])], (), t),
    ]
    if cc.dimension == 3:
        out["z"] = [
            build_term("1", -x2a, [("q1", "sx", 1.0), ("Z", "q", lam["Z"]), ("O", "q", lam["O"])], (), t),
            build_term("2", z2b, [("q2", "sz", 1.0), ("O", "q", lam["O"])], [drives["d23"]], t),
            build_term("3", -cc.el_ghz["z"], [("z", "q", lam["z"]), ("Z", "q", lam["Z"])], (), t),
        ]
    return out


def _expand_expression(coeff, factors, table):
    """Word map of coeff * prod(site operators); boson factor ``p`` means i(a^+ - a^-)."""
    choices = []
    for site, op in factors:
        if op == "p":
            choices.append([(1j, site, "+"), (-1j, site, "-")])
        elif op == "-p":
            choices.append([(-1j, site, "+"), (1j, site, "-")])
        else:
            choices.append([(c, site, tok) for c, tok in operator_terms(site, op)])
    out = {}
    for combo in itertools.product(*choices):
        amp = complex(coeff)
        ops = {}
        for c, site, tok in combo:
            amp *= c
            ops[site] = tok
        word = monomial(0, ops, (), table).word
        out[word] = out.get(word, 0) + amp
    return out


def closed_forms(cc: CircuitCouplings, drives: dict) -> dict:
    """Hand-derived effective Hamiltonians as word -> coefficient (GHz).

    mass: n_m/2 (Z1 sigma_z + f3 Z3 sigma_y) on qubit 1;
    1+1D: n/2 X2 E_L lambda_x / E_JX  sigma_x i(a - a^+);
    axis c: n_c/2 X2(1) K2(2) E_L lambda_c / (E_JO E_JC)  sigma_x(1) s_c(2) i(a^+ - a^-),
    with K2 = X2 and s = sigma_x, sigma_y for c = x, y and K2 = Z2, s = sigma_z for c = z.
    """
    t = cc.table(drives)
    lam = {k: m.lam for k, m in cc.modes.items()}
    d13 = drives["d13"]
    out = {"mass": {}}
    for coeff, op in ((0.5 * cc.n_m * cc.q1["Z1"], "sz"),
                      (0.5 * cc.n_m * d13.frequency_ghz * cc.q1["Z3"], "sy")):
        for w, c in _expand_expression(coeff, [("q1", op)], t).items():
            out["mass"][w] = out["mass"].get(w, 0) + c
    if cc.dimension == 1:
        c = 0.5 * cc.q1["X2"] * cc.el_ghz["x"] * lam["x"] * cc.n_axis["x"] / cc.shared_ej["X"]
        out["x"] = _expand_expression(c, [("q1", "sx"), ("x", "-p")], t)
        return out
    for ax, k2, op in (("x", "X2", "sx"), ("y", "X2", "sy"), ("z", "Z2", "sz")):
        if ax not in cc.el_ghz:
            continue
        c = (0.5 * cc.q1["X2"] * cc.q2[k2] * cc.el_ghz[ax] * lam[ax] * cc.n_axis[ax]
             / (cc.shared_ej["O"] * cc.shared_ej[ax.upper()]))
        out[ax] = _expand_expression(c, [("q1", "sx"), ("q2", op), (ax, "p")], t)
    return out


@dataclass
class EffectiveHamiltonian:
    mode: str
    blocks: dict  # name -> SecularResult
    closed: dict  # name -> word map (GHz)
    drives: dict
    couplings: CircuitCouplings

    def word_map(self, block: str) -> dict:
        return {c.word: c.coefficient_ghz for c in self.blocks[block].couplings}

    def deviation(self, block: str) -> float:
        """max |engine - closed| / max |closed| over the union of words."""
        eng, cf = self.word_map(block), self.closed[block]
        scale = max((abs(v) for v in cf.values()), default=0.0)
        words = set(eng) | set(cf)
        diff = max((abs(eng.get(w, 0) - cf.get(w, 0)) for w in words), default=0.0)
        return diff / scale if scale else diff


def effective_hamiltonian(cfg_or_cc, mode: str = "closed", drives: dict | None = None,
                          tol: float = 1e-3, eps_den: float = 0.1) -> EffectiveHamiltonian:
    """Run the expansion for the mass term and every axis of the circuit."""
    cc = cfg_or_cc if isinstance(cfg_or_cc, CircuitCouplings) else circuit_couplings(cfg_or_cc)
    drives = drives or solve_resonance(cc)
    inter = build_interactions(cc, drives)
    blocks = {"mass": collect_secular(inter["mass"][0].monomials, tol, mode)}
    for ax in ("x", "y", "z"):
        if ax in inter:
            mons = expand_orderings(inter[ax], mode=mode, eps_den=eps_den)
            blocks[ax] = collect_secular(mons, tol, mode)
    return EffectiveHamiltonian(mode, blocks, closed_forms(cc, drives), drives, cc)

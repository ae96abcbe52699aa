"""Command-line front end.

Every subcommand writes CSV files plus ``manifest.json`` into ``--out``.
CSV schemas:

    spectrum.csv       qubit,quantity,value
    modes.csv          label,role,lambda,omega_ghz,curvature_ghz
    effective.csv      block,word,engine_re_mhz,engine_im_mhz,closed_re_mhz,closed_im_mhz
    dirac.csv          quantity,value
    trajectory.csv     t_us,x,y,z
    decoherence.csv    quantity,value
    sweep.csv          key,value,<section-specific columns>

Errors end the run with a single ``<category>: <detail>`` line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, decoherence, diracmap, dynamics, fluxqubit, phasequbit, rwa
from .core import ConfigError, config_hash, config_to_dict, load_config

SUBCOMMANDS = ("spectrum", "quantize", "effective", "dirac", "zitter", "decohere", "sweep", "all",
               "golden")
ALL_STAGES = ("spectrum", "quantize", "effective", "dirac", "zitter", "decohere")
DEFAULT_SWEEP = "flux1.f1=0.30:0.36:81"
EXIT = {"config-error": 2, "numeric-error": 3, "golden-mismatch": 4, "io-error": 5}


class GoldenMismatch(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


class Run:
    """Lazily computed pipeline state shared by the stages of one invocation."""

    def __init__(self, cfg, out: Path, oracle=False, sweep=None, seed=None):
        self.cfg, self.out, self.oracle, self.sweep = cfg, out, oracle, sweep
        self._cc = self._eh = self._dirac = None
        self.manifest = {
            "tool_version": __version__, "config_hash": config_hash(cfg),
            "config": config_to_dict(cfg), "flags": list(cfg.flags), "seed": seed,
            "derived": {}, "timing": {}, "artifacts": [],
        }

    @property
    def cc(self):
        if self._cc is None:
            self._cc = rwa.circuit_couplings(self.cfg)
        return self._cc

    @property
    def eh(self):
        if self._eh is None:
            self._eh = rwa.effective_hamiltonian(self.cc)
        return self._eh

    @property
    def dirac(self):
        if self._dirac is None:
            self._dirac = diracmap.map_parameters(self.eh)
        return self._dirac

    @property
    def mc2(self) -> float:
        return self.dirac.mc2 if self.cfg.mc2_mhz is None else self.cfg.mc2_mhz

    def emit(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.manifest["artifacts"].append(name)

    # -- stages ----------------------------------------------------------
    def spectrum(self):
        grid = fluxqubit.ChargeBasisGrid(self.cfg.grid.n_max_a, self.cfg.grid.n_max_s)
        rows = []
        for q in self.cfg.flux:
            sol = fluxqubit.solve(q, grid, k=4)
            rows += [(q.index, f"E{k}_ghz", e) for k, e in enumerate(sol.eigenvalues)]
            rows.append((q.index, "gap_ghz", sol.gap))
            el = fluxqubit.matrix_elements(sol)
            rows += [(q.index, k, v) for k, v in el.items()]
            rc = fluxqubit.rotated_couplings(el, q)
            rows += [(q.index, k, v) for k, v in rc.items()]
            cur = fluxqubit.circulating_current(sol)
            rows += [(q.index, k + "_na", v) for k, v in cur.items()]
        self.emit("spectrum.csv", ("qubit", "quantity", "value"), rows)

    def quantize(self):
        rows = [(lab, m.role, m.lam, m.omega_ghz, m.curvature_ghz) for lab, m in self.cc.modes.items()]
        self.emit("modes.csv", ("label", "role", "lambda", "omega_ghz", "curvature_ghz"), rows)
        self.manifest["derived"]["hierarchy"] = rwa.validate_resonance(self.eh.drives, self.cc)["hierarchy"]

    def effective(self):
        rows = []
        for block, res in self.eh.blocks.items():
            closed = self.eh.closed.get(block, {})
            words = {c.word: c for c in res.couplings}
            for w in sorted(set(words) | set(closed), key=str):
                eng = words[w].coefficient_ghz * 1e3 if w in words else 0j
                cf = closed.get(w, 0j) * 1e3
                label = " ".join(f"{s}[{t}]" for s, t in w) or "1"
                rows.append((block, label, eng.real, eng.imag, cf.real, cf.imag))
        self.emit("effective.csv", ("block", "word", "engine_re_mhz", "engine_im_mhz",
                                    "closed_re_mhz", "closed_im_mhz"), rows)
        val = rwa.validate_resonance(self.eh.drives, self.cc)
        self.manifest["derived"]["resonance"] = val["conditions"]
        self.manifest["derived"]["drives"] = {
            k: {"frequency_ghz": d.frequency_ghz, "phase": d.phase, "amplitude": d.amplitude}
            for k, d in self.eh.drives.items()}
        self.manifest["derived"]["closed_form_deviation"] = {b: self.eh.deviation(b) for b in self.eh.blocks}

    def dirac_stage(self):
        p = self.dirac
        rows = [("mc2_engine_mhz", p.mc2), ("mc2_used_mhz", self.mc2), ("cp0_mhz", p.cp0),
                ("theta", p.theta), ("az", p.az)]
        for ax in sorted(p.cp):
            rows += [(f"omega_tilde_{ax}_mhz", p.omega_tilde[ax]), (f"cp_unit_{ax}_mhz", p.cp[ax]),
                     (f"delta_{ax}", p.delta[ax]), (f"speed_{ax}", p.speed(ax))]
        h = diracmap.assemble_standard(self.mc2, dict(zip("xyz", self.cfg.wavepacket.mean)),
                                       self.cfg.dimension)
        rows += [(f"eigenvalue_{k}_mhz", e) for k, e in enumerate(np.linalg.eigvalsh(h))]
        self.emit("dirac.csv", ("quantity", "value"), rows)

    def zitter(self):
        cfg, p = self.cfg, self.dirac
        times = np.linspace(0.0, cfg.time.t_max_us, cfg.time.steps)
        psi0 = np.eye(2 if cfg.dimension == 1 else 4)[0]

        def per_p(cp):
            return dynamics.standard_trajectory(self.mc2, cp, psi0, times, 1.0, cfg.dimension,
                                                oracle=self.oracle)

        tr = dynamics.wavepacket_average(cfg.wavepacket, per_p)
        pos = np.zeros((len(times), 3))
        analysis = {}
        for k, ax in enumerate(tr.axes):
            pos[:, k] = p.speed(ax) * tr.position[:, k]
            try:
                analysis[ax] = dynamics.analyze_tremor(
                    dynamics.Trajectory(times, pos[:, k], (ax,)))
            except ValueError as exc:
                analysis[ax] = {"error": str(exc)}
        self.emit("trajectory.csv", ("t_us", "x", "y", "z"),
                  ((t, *row) for t, row in zip(times, pos)))
        self.manifest["derived"]["tremor"] = analysis
        self.manifest["derived"]["initial_spinor"] = psi0.tolist()
        self.manifest["derived"]["engine"] = "oracle" if self.oracle else "closed_form"

    def decohere(self):
        rep = decoherence.feasibility_report(self.cfg, self.dirac.omega_tilde)
        rows = [("gamma1_per_us", rep.gamma1), ("gamma_phi_per_us", rep.gamma_phi),
                ("gamma2_per_us", rep.gamma2), ("t1_us", rep.t1_us), ("t2_us", rep.t2_us)]
        for ax in sorted(rep.ratio):
            rows += [(f"transition_{ax}_us", rep.transition_us[ax]), (f"ratio_{ax}", rep.ratio[ax])]
        rows.append(("claim_satisfied", rep.satisfied))
        self.emit("decoherence.csv", ("quantity", "value"), rows)
        self.manifest["derived"]["decoherence"] = rep.as_dict()
        if self.sweep and self.sweep[0].startswith("noise."):
            self.sweep_stage(fname="decoherence_sweep.csv")

    def sweep_stage(self, fname="sweep.csv"):
        key, values = self.sweep or parse_sweep(DEFAULT_SWEEP)
        section, field = key.split(".", 1)
        rows = []
        for v in values:
            doc = config_to_dict(self.cfg)
            if section not in doc or field not in doc[section]:
                raise ConfigError(f"sweep key {key!r} is not a config field")
            doc[section][field] = float(v)
            cfg = load_config(doc)
            rows.append((key, v, *_sweep_point(cfg, section)))
        self.emit(fname, ("key", "value", *SWEEP_COLUMNS[_sweep_kind(section)]), rows)


SWEEP_COLUMNS = {
    "flux": ("gap_ghz", "splitting_ghz", "Z1", "X1", "Z2", "X2", "Z3", "X3"),
    "noise": ("t1_us", "t2_us"),
    "mode": ("lambda", "omega_ghz"),
}


def _sweep_kind(section: str) -> str:
    if section.startswith("flux"):
        return "flux"
    if section == "noise":
        return "noise"
    if section.startswith(("phase_", "shared_")):
        return "mode"
    raise ConfigError(f"cannot sweep section {section!r}")


def _sweep_point(cfg, section):
    kind = _sweep_kind(section)
    grid = fluxqubit.ChargeBasisGrid(cfg.grid.n_max_a, cfg.grid.n_max_s)
    if kind == "flux":
        q = cfg.flux_qubit(int(section[4:]))
        sol = fluxqubit.solve(q, grid, k=2)
        rc = fluxqubit.rotated_couplings(sol, q)
        return (sol.gap, rc["splitting"], *(rc[k] for k in SWEEP_COLUMNS["flux"][2:]))
    if kind == "noise":
        q = cfg.flux[0]
        tr = decoherence.transition_of(fluxqubit.solve(q, grid, k=2))
        g1 = decoherence.relaxation_rate(tr, cfg.noise)
        gp = decoherence.dephasing_rate(cfg.noise, abs(decoherence.flux_sensitivity(q, grid)))
        return (1 / g1 if g1 else math.inf, 1 / (g1 / 2 + gp) if g1 / 2 + gp else math.inf)
    lab = section.split("_", 1)[1]
    m = phasequbit.quantize(cfg.phase[lab] if section.startswith("phase_") else cfg.shared[lab])
    return (m.lam, m.omega_ghz)


def parse_sweep(spec: str):
    try:
        key, rng = spec.split("=", 1)
        start, stop, n = rng.split(":")
        values = np.linspace(float(start), float(stop), int(n))
    except ValueError as exc:
        raise ConfigError(f"bad --sweep {spec!r} (want KEY=START:STOP:N)") from exc
    if "." not in key or int(n) < 1:
        raise ConfigError(f"bad --sweep {spec!r} (want KEY=START:STOP:N)")
    return key.strip(), values


# -- golden comparison -----------------------------------------------------

def golden_check(out_dir, golden_dir, rtol: float = 1e-9, atol: float = 1e-12) -> list:
    """Compare every CSV of ``golden_dir`` numerically and the manifests exactly.

    The manifest's ``timing`` block is ignored. Returns a list of mismatch
    descriptions (empty when everything agrees).
    """
    out_dir, golden_dir = Path(out_dir), Path(golden_dir)
    problems = []
    for g in sorted(golden_dir.glob("*.csv")):
        o = out_dir / g.name
        if not o.exists():
            problems.append(f"{g.name}: missing")
            continue
        problems += _diff_csv(o, g, rtol, atol)
    gm, om = golden_dir / "manifest.json", out_dir / "manifest.json"
    if gm.exists():
        if not om.exists():
            problems.append("manifest.json: missing")
        else:
            a, b = json.loads(om.read_text()), json.loads(gm.read_text())
            a.pop("timing", None), b.pop("timing", None)
            if a != b:
                keys = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
                problems.append(f"manifest.json: differs in {', '.join(keys)}")
    return problems


def _diff_csv(o: Path, g: Path, rtol, atol) -> list:
    with open(o) as fa, open(g) as fb:
        ra, rb = list(csv.reader(fa)), list(csv.reader(fb))
    if ra[:1] != rb[:1] or len(ra) != len(rb):
        return [f"{g.name}: header or row count differs"]
    worst = []
    for i, (x, y) in enumerate(zip(ra[1:], rb[1:]), start=2):
        for col, (u, v) in enumerate(zip(x, y)):
            if u == v:
                continue
            try:
                fu, fv = float(u), float(v)
            except ValueError:
                worst.append((math.inf, i, ra[0][col], u, v))
                continue
            err = abs(fu - fv)
            if not err <= atol + rtol * abs(fv):
                worst.append((err, i, ra[0][col], u, v))
    worst.sort(key=lambda w: -w[0])
    return [f"{g.name}: row {i} column {c}: {u} != {v}" for _, i, c, u, v in worst[:5]]


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jjdirac", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", help="YAML config (default: bundled 1+1D config)")
    ap.add_argument("--out", default="jjdirac-out", help="output directory")
    ap.add_argument("--oracle", action="store_true", help="use the brute-force trajectory engine")
    ap.add_argument("--sweep", help="KEY=START:STOP:N, e.g. " + DEFAULT_SWEEP)
    ap.add_argument("--seed", type=int, default=None, help="recorded in the manifest")
    ap.add_argument("--golden", help="reference directory for the golden subcommand")
    return ap


def _read_config(path):
    if path is None:
        text = resources.files("jjdirac").joinpath("data/default_1d.yaml").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return load_config(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "golden":
            if not args.golden:
                raise ConfigError("golden needs --golden DIR")
            problems = golden_check(args.out, args.golden)
            if problems:
                raise GoldenMismatch("; ".join(problems))
            print("golden: ok")
            return 0
        cfg = _read_config(args.config)
        sweep = parse_sweep(args.sweep) if args.sweep else None
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        r = Run(cfg, out, args.oracle, sweep, args.seed)
        stages = ALL_STAGES if args.subcommand == "all" else (args.subcommand,)
        for st in stages:
            t0 = time.perf_counter()
            {"dirac": r.dirac_stage, "sweep": r.sweep_stage}.get(st, getattr(r, st, None))()
            r.manifest["timing"][st] = time.perf_counter() - t0
        (out / "manifest.json").write_text(
            json.dumps(_jsonable(r.manifest), indent=2, sort_keys=True) + "\n")
        print(f"wrote {', '.join(r.manifest['artifacts'])} and manifest.json to {out}")
        return 0
    except ConfigError as exc:
        return _fail("config-error", exc)
    except GoldenMismatch as exc:
        return _fail("golden-mismatch", exc)
    except OSError as exc:
        return _fail("io-error", exc)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return _fail("numeric-error", exc)


def _fail(category, exc) -> int:
    detail = " ".join(str(exc).split())
    print(f"{category}: {detail}", file=sys.stderr)
    return EXIT[category]


def main() -> None:
    sys.exit(run())

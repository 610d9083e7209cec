"""Config-driven experiments: validation, presets, single runs and sweeps."""

from __future__ import annotations

import copy
import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .diagnostics import (constant_targets, detect_kinks, dist_to_stationary, internal_mode_frequency,
                          packet_group_velocities, point_trace_spectrum, track)
from .effdyn import (EffectiveState, build_chart, compare_adiabatic, integrate_effective, phase_error,
                     track_soliton)
from .grid import FieldState, Grid1D, charge, energy, read_snapshot
from .integrator import Observer, RunRecord, StepParams, run
from .models import (ModelSpec, excited_kink, kink_boost, soliton_boost, soliton_inco,
                     soliton_profile)

SCHEMA_VERSION = 1

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "model", "grid", "initial", "integrator", "T"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "model": {"type": "object", "required": ["family"]},
        "grid": {
            "type": "object",
            "required": ["x_min", "x_max"],
            "properties": {
                "x_min": {"type": "number"}, "x_max": {"type": "number"},
                "dx": {"type": "number", "exclusiveMinimum": 0},
                "n_points": {"type": "integer", "minimum": 3},
                "periodic": {"type": "boolean"},
            },
        },
        "initial": {"type": "object", "required": ["kind"], "properties": {"kind": {"type": "string"}}},
        "integrator": {
            "type": "object",
            "required": ["dt"],
            "properties": {
                "dt": {"type": "number"},
                "boundary": {"enum": ["fixed_vacuum", "periodic", "sponge"]},
                "sponge_width": {"type": "number", "minimum": 0},
                "sponge_strength": {"type": "number", "minimum": 0},
            },
        },
        "T": {"type": "number", "minimum": 0},
        "observers": {"type": "array", "items": {"type": "object", "required": ["kind", "every"]}},
        "analyses": {"type": "array", "items": {"type": "object", "required": ["kind"]}},
        "seed": {"type": "integer"},
    },
}

INITIAL_KINDS = ("kink", "excited_kink", "three_kinks_random", "soliton", "soliton_inco",
                 "gaussian", "bumps", "snapshot")


class ConfigError(ValueError):
    """Validation failure; ``errors`` holds (JSON pointer, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p or '/'}: {m}" for p, m in self.errors))


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate_config(cfg: dict, base_dir: Path | None = None) -> list:
    """Structural (JSON schema) and semantic checks; returns error list."""
    v = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = [(_pointer(e.absolute_path), e.message) for e in v.iter_errors(cfg)]
    if errors:
        return errors
    try:
        model = ModelSpec.from_json(cfg["model"])
    except (KeyError, ValueError, TypeError) as exc:
        return [("/model", str(exc))]
    try:
        grid = Grid1D.from_dict(cfg["grid"])
    except (KeyError, ValueError) as exc:
        return [("/grid", str(exc))]
    try:
        model.site_indices(grid)
    except ValueError as exc:
        errors.append(("/model/sites", str(exc)))
    try:
        params = StepParams.from_dict(cfg["integrator"])
    except (KeyError, ValueError) as exc:
        errors.append(("/integrator", str(exc)))
        params = None
    if params is not None:
        if abs(params.dt) / grid.dx > 0.9 + 1e-12:
            errors.append(("/integrator/dt", f"CFL violated: |dt|/dx = {abs(params.dt) / grid.dx:.3f} > 0.9"))
        if (params.boundary == "periodic") != grid.periodic:
            errors.append(("/integrator/boundary", "periodic boundary requires a periodic grid"))
        n = cfg["T"] / params.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
            errors.append(("/T", "T must be an integer multiple of dt"))
        for i, ob in enumerate(cfg.get("observers", [])):
            k = ob["every"] / abs(params.dt)
            if abs(k - round(k)) > 1e-9 * max(1.0, k) or round(k) < 1:
                errors.append((f"/observers/{i}/every", "cadence must be a multiple of dt"))
            if ob["kind"] not in ("snapshot", "point", "comoving", "energy"):
                errors.append((f"/observers/{i}/kind", f"unknown observer kind {ob['kind']!r}"))
    ini = cfg["initial"]
    if ini["kind"] not in INITIAL_KINDS:
        errors.append(("/initial/kind", f"unknown initial kind {ini['kind']!r}"))
    if ini["kind"] == "snapshot":
        p = Path(ini.get("path", ""))
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        if not p.exists():
            errors.append(("/initial/path", f"file not found: {p}"))
    for i, an in enumerate(cfg.get("analyses", [])):
        if an["kind"] not in ANALYSES:
            errors.append((f"/analyses/{i}/kind", f"unknown analysis {an['kind']!r}"))
    return errors


@dataclass
class ExperimentConfig:
    model: dict
    grid: dict
    initial: dict
    integrator: dict
    T: float
    observers: list = field(default_factory=list)
    analyses: list = field(default_factory=list)
    seed: int = 0
    name: str = "experiment"
    schema_version: int = SCHEMA_VERSION
    base_dir: Path | None = None

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        errors = validate_config(d, base_dir)
        if errors:
            raise ConfigError(errors)
        return cls(copy.deepcopy(d["model"]), dict(d["grid"]), copy.deepcopy(d["initial"]),
                   dict(d["integrator"]), float(d["T"]), copy.deepcopy(d.get("observers", [])),
                   copy.deepcopy(d.get("analyses", [])), int(d.get("seed", 0)),
                   d.get("name", "experiment"), d["schema_version"], base_dir)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError([("", f"invalid JSON: {exc}")]) from exc
        return cls.from_dict(d, path.parent)

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "name": self.name, "model": self.model,
                "grid": self.grid, "initial": self.initial, "integrator": self.integrator,
                "T": self.T, "observers": self.observers, "analyses": self.analyses, "seed": self.seed}

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def apply_overrides(cfg: dict, overrides) -> dict:
    """Apply ``key.sub=value`` overrides; values parse as JSON when possible."""
    out = copy.deepcopy(cfg)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError([("", f"override {item!r} is not key=value")])
        key, raw = item.split("=", 1)
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        parts = key.split(".")
        node = out
        for p in parts[:-1]:
            if isinstance(node, list):
                node = node[int(p)]
            else:
                node = node.setdefault(p, {})
        if isinstance(node, list):
            node[int(parts[-1])] = val
        else:
            node[parts[-1]] = val
    return out


# ---------------------------------------------------------------------------
# initial data

def _bumps(x, rng, n, amp, lo, hi, wmin, wmax):
    out = np.zeros_like(x)
    for _ in range(n):
        c = rng.uniform(lo, hi)
        a = rng.uniform(-amp, amp)
        w = rng.uniform(wmin, wmax)
        out += a * np.exp(-((x - c) / w) ** 2)
    return out


def build_initial(cfg: ExperimentConfig, model: ModelSpec, grid: Grid1D) -> tuple[FieldState, dict]:
    """Initial state plus a record of every random draw (for the manifest)."""
    ini = cfg.initial
    kind = ini["kind"]
    x = grid.x
    rng = np.random.default_rng(cfg.seed)
    info = {"kind": kind, "seed": cfg.seed}
    if kind == "kink":
        return kink_boost(grid, ini.get("x0", 0.0), ini.get("v", 0.0)), info
    if kind == "excited_kink":
        return excited_kink(grid, ini.get("x0", 0.0), ini.get("v", 0.0), ini.get("amplitude", 0.5)), info
    if kind == "three_kinks_random":
        # seeded smooth data with three sign changes inside [-support, support]
        sup = ini.get("support", 20.0)
        while True:
            pos = np.sort(rng.uniform(-0.85 * sup, 0.85 * sup, 3))
            if np.min(np.diff(pos)) >= ini.get("min_separation", 8.0):
                break
        widths = rng.uniform(0.5, 1.5, 3) * math.sqrt(2.0)
        psi = np.ones_like(x)
        for p, w in zip(pos, widths):
            psi *= np.tanh((x - p) / w)
        env = np.exp(-(np.maximum(np.abs(x) - sup, 0.0) / 2.0) ** 2) * (np.abs(x) < sup + 8)
        psi += env * _bumps(x, rng, ini.get("n_bumps", 12), ini.get("amplitude", 0.4), -sup, sup, 0.5, 2.0)
        pi = env * _bumps(x, rng, ini.get("n_bumps", 12), ini.get("momentum_amplitude", 0.6), -sup, sup, 0.5, 2.0)
        info.update(kink_positions=pos.tolist(), kink_widths=widths.tolist())
        return FieldState(grid, psi, pi), info
    if kind in ("soliton", "soliton_inco"):
        # the profile only depends on the local nonlinearity, not on V
        prof = soliton_profile(model, ini["omega"], grid)
        if kind == "soliton":
            return soliton_boost(prof, ini.get("v", 0.0), ini.get("x0", 0.0), grid, ini.get("theta", 0.0)), info
        return soliton_inco(prof, ini.get("v0", 0.0), ini.get("q0", 0.0), grid), info
    if kind == "gaussian":
        a, c, w = ini.get("amplitude", 1.0), ini.get("center", 0.0), ini.get("width", 1.0)
        k, om = ini.get("wavenumber", 0.0), ini.get("omega", 0.0)
        psi = a * np.exp(-((x - c) / w) ** 2)
        if model.field_kind == "complex":
            psi = psi * np.exp(1j * k * x)
            return FieldState(grid, psi, 1j * om * psi), info
        return FieldState(grid, psi, -om * psi), info
    if kind == "bumps":
        sup = ini.get("support", 20.0)
        n = ini.get("n_bumps", 8)
        psi = _bumps(x, rng, n, ini.get("amplitude", 1.0), -sup, sup, 1.0, 4.0)
        if model.field_kind == "complex":
            phase = np.exp(1j * _bumps(x, rng, n, ini.get("phase_amplitude", 3.0), -sup, sup, 2.0, 8.0))
            psi = psi * phase
            pi = 1j * ini.get("omega", 0.8) * psi
        else:
            pi = _bumps(x, rng, n, ini.get("amplitude", 1.0), -sup, sup, 1.0, 4.0)
        psi[np.abs(x) > sup + 10] = 0
        pi[np.abs(x) > sup + 10] = 0
        return FieldState(grid, psi, pi), info
    if kind == "snapshot":
        p = Path(ini["path"])
        if cfg.base_dir is not None and not p.is_absolute():
            p = cfg.base_dir / p
        s = read_snapshot(p)
        if s.grid != grid:
            raise ConfigError([("/initial/path", "snapshot grid differs from config grid")])
        return s, info
    raise ConfigError([("/initial/kind", f"unknown initial kind {kind!r}")])


# ---------------------------------------------------------------------------
# analyses

def _an_kinks(rec: RunRecord, spec: dict) -> dict:
    eps = spec.get("eps", 0.1)
    series = [(s.time, detect_kinks(s, eps)) for s in rec.snapshots]
    t_min = spec.get("t_min", 20.0)
    tr = track([(t, r) for t, r in series if t >= t_min])
    persistent = tr.persistent(min(t for t, _ in series if t >= t_min))
    return {"n_final": len(series[-1][1]), "fragments": tr.fragments,
            "persistent_tracks": [{"velocity": p.velocity, "polarity": p.polarity,
                                   "start": p.positions[0], "end": p.positions[-1],
                                   "mean_width": float(np.mean(p.widths))} for p in persistent]}


def _an_spectrum(rec: RunRecord, spec: dict) -> dict:
    t, z = rec.trace(spec["trace"])
    out = []
    for start in spec.get("starts", [t[0]]):
        end = start + spec.get("length", t[-1] - t[0])
        r = point_trace_spectrum(t, z, (start, end), spec.get("m", rec.model.mass or 1.0),
                                 spec.get("delta"))
        out.append(r.to_json())
    return {"windows": out}


def _an_internal_mode(rec: RunRecord, spec: dict) -> dict:
    t, z = rec.trace(spec["trace"])
    w = internal_mode_frequency(t, z.real)
    return {"frequency": w, "period": None if w is None else 2 * math.pi / w}


def _an_packets(rec: RunRecord, spec: dict) -> dict:
    src = {k: (float(k.split("_")[1]), v) for k, v in rec.traces.items() if k.startswith("point_")}
    packs = packet_group_velocities(src, spec.get("vacuum", 1.0), spec.get("threshold", 0.01))
    return {"packets": [{"speed": p.speed, "frequency": p.frequency, "predicted": p.predicted_speed(),
                         "n_probes": p.n_probes} for p in packs]}


def _an_energy(rec: RunRecord, spec: dict) -> dict:
    e0 = energy(rec.model, rec.initial).total
    e1 = energy(rec.model, rec.final).total
    T = rec.final.time - rec.initial.time
    return {"initial": e0, "final": e1, "drift_per_time": abs(e1 - e0) / max(abs(e0), 1e-300) / max(T, 1e-300),
            "energy_conserving_scheme": rec.energy_conserving}


def _an_solitons(rec: RunRecord, spec: dict) -> dict:
    """Count localized lumps of |psi| in the final state.

    A lump is a connected run above ``threshold``; for complex fields it must
    also carry local charge |Q| >= ``min_charge`` within ``pad`` of its edges,
    which discards dispersive wave crests.
    """
    thr = spec.get("threshold", 0.2)
    s = rec.final
    a = np.abs(s.psi)
    x = s.grid.x
    above = a > thr
    edges = np.diff(np.r_[0, above.astype(int), 0])
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    complex_field = rec.model.field_kind == "complex"
    dens = np.imag(np.conj(s.psi) * s.pi) * s.grid.weights() if complex_field else None
    pad = spec.get("pad", 3.0)
    blobs = []
    for i0, i1 in zip(starts, ends):
        j = i0 + int(np.argmax(a[i0:i1]))
        b = {"center": float(x[j]), "peak": float(a[j]), "extent": float(x[i1 - 1] - x[i0])}
        if complex_field:
            w = (x > x[i0] - pad) & (x < x[i1 - 1] + pad)
            b["charge"] = float(np.sum(dens[w]))
            if abs(b["charge"]) < spec.get("min_charge", 0.3):
                continue
        blobs.append(b)
    out = {"count": len(blobs), "solitons": blobs}
    if complex_field:
        out["total_charge"] = charge(s)
    return out


def _an_adiabatic(rec: RunRecord, spec: dict) -> dict:
    model = rec.model
    p = model.params
    base = ModelSpec.relativistic_nlw(p["a"], p["m_exp"], p["b"], p["n_exp"], model.mass)
    v = 0.9 * np.sin(np.linspace(-np.pi / 2, np.pi / 2, 73))
    chart = build_chart(base, spec["omega0"], v)
    T = rec.final.time - rec.initial.time
    eff = integrate_effective(chart, model.external, EffectiveState(spec["q0"], spec.get("Pi0", 0.0)),
                              T, spec.get("dt", 1e-3))
    eps = abs(model.external.get("amplitude", 0.0)) if model.external else 0.0
    rep = compare_adiabatic(rec, eff, eps, spec.get("window", 10.0))
    tr = track_soliton(rec, spec.get("window", 10.0))
    if tr.t.size > 2:
        rep.update(phase_error(tr.t, tr.q, eff.t, eff.Q, spec.get("center", 0.0), 2))
    return rep


def _an_dist(rec: RunRecord, spec: dict) -> dict:
    targets = constant_targets(rec.final.grid, spec["values"])
    d, i = dist_to_stationary(rec.final, targets, spec.get("R", 5.0), rec.model.seminorm_variant)
    return {"distance": d, "nearest": spec["values"][i]}


ANALYSES = {"kinks": _an_kinks, "spectrum": _an_spectrum, "internal_mode": _an_internal_mode,
            "packets": _an_packets, "energy": _an_energy, "solitons": _an_solitons,
            "adiabatic": _an_adiabatic, "dist_to_stationary": _an_dist}


def run_analysis(rec: RunRecord, spec: dict) -> dict:
    kind = spec["kind"]
    if kind not in ANALYSES:
        raise ConfigError([("/kind", f"unknown analysis {kind!r}")])
    return ANALYSES[kind](rec, spec)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=float)


# ---------------------------------------------------------------------------
# runs

def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> Path:
    """Simulate, analyse and write a self-describing artifact directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_wall = time.perf_counter()
    model = ModelSpec.from_json(cfg.model)
    grid = Grid1D.from_dict(cfg.grid)
    params = StepParams.from_dict(cfg.integrator)
    state, init_info = build_initial(cfg, model, grid)
    observers = [Observer.from_dict(o) for o in cfg.observers]
    try:
        rec = run(model, state, cfg.T, params, observers)
    except Exception as exc:
        raise RuntimeError(f"simulation of {cfg.name!r} failed: {exc}") from exc
    rec.save(out / "run")
    reports = {}
    (out / "reports").mkdir(exist_ok=True)
    for i, an in enumerate(cfg.analyses):
        name = an.get("name", f"{i:02d}_{an['kind']}")
        try:
            rep = run_analysis(rec, an)
        except Exception as exc:
            raise RuntimeError(f"analysis {name!r} failed: {exc}") from exc
        (out / "reports" / f"{name}.json").write_text(_dump(rep))
        reports[name] = rep
    (out / "config.json").write_text(_dump(cfg.to_dict()))
    manifest = {
        "config_hash": cfg.config_hash(),
        "tool": "attractor-lab",
        "version": __version__,
        "wall_time_s": time.perf_counter() - t_wall,
        "initial_data": init_info,
        "reports": sorted(reports),
        "artifact_hash": artifact_hash(out),
    }
    (out / "manifest.json").write_text(_dump(manifest))
    return out


def artifact_hash(directory: str | Path) -> str:
    """sha256 over all data files (manifest excluded, since it holds wall time)."""
    d = Path(directory)
    h = hashlib.sha256()
    for p in sorted(d.rglob("*")):
        if p.is_file() and p != d / "manifest.json":
            h.update(str(p.relative_to(d)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def analyze_artifact(directory: str | Path, spec: dict) -> dict:
    rec = RunRecord.load(Path(directory) / "run")
    return run_analysis(rec, spec)


def _sweep_one(args):
    cfg_dict, base_dir, out = args
    t0 = time.perf_counter()
    try:
        cfg = ExperimentConfig.from_dict(cfg_dict, base_dir)
        path = run_experiment(cfg, out)
        man = json.loads((path / "manifest.json").read_text())
        return {"name": cfg.name, "status": "ok", "artifact": str(path),
                "artifact_hash": man["artifact_hash"], "config_hash": man["config_hash"],
                "wall_time_s": time.perf_counter() - t0, "error": ""}
    except Exception as exc:  # isolated per run
        return {"name": cfg_dict.get("name", "?"), "status": "failed", "artifact": str(out),
                "artifact_hash": "", "config_hash": "", "wall_time_s": time.perf_counter() - t0,
                "error": f"{type(exc).__name__}: {exc}"}


SUMMARY_FIELDS = ["name", "status", "artifact", "artifact_hash", "config_hash", "wall_time_s", "error"]


def sweep(configs, out_root: str | Path, parallelism: int = 1) -> list[dict]:
    """Run independent configs, at most ``parallelism`` at a time; writes summary.csv."""
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    jobs = []
    for i, c in enumerate(configs):
        d = c.to_dict() if isinstance(c, ExperimentConfig) else c
        base = c.base_dir if isinstance(c, ExperimentConfig) else None
        jobs.append((d, base, out_root / f"{i:03d}_{d.get('name', 'run')}"))
    if not jobs:
        rows = []
    elif parallelism <= 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    with open(out_root / "summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return rows


# ---------------------------------------------------------------------------
# presets

def _preset_e1(seed: int = 7) -> dict:
    return {
        "schema_version": SCHEMA_VERSION, "name": "E1_three_kinks", "seed": seed,
        "model": {"family": "ginzburg_landau"},
        "grid": {"x_min": -140.0, "x_max": 140.0, "dx": 0.02},
        "initial": {"kind": "three_kinks_random", "support": 20.0, "min_separation": 14.0,
                    "amplitude": 0.4, "momentum_amplitude": 0.4},
        "integrator": {"dt": 0.01, "boundary": "sponge", "sponge_width": 25.0},
        "T": 100.0,
        "observers": [{"kind": "snapshot", "every": 1.0, "stride": 2},
                      {"kind": "point", "every": 0.05, "x0": 0.0}],
        "analyses": [{"kind": "kinks", "eps": 0.1, "t_min": 20.0},
                     {"kind": "spectrum", "trace": "point_0", "starts": [20.0], "length": 80.0, "m": 1.4142135623730951},
                     {"kind": "energy"}],
    }


E2_ROWS = {1: (1.0, 3, 0.61, 2), 2: (10.0, 4, 2.1, 2), 3: (10.0, 6, 8.75, 5)}


def _preset_e2(seed: int = 0, row: int = 3) -> dict:
    a, m, b, n = E2_ROWS[row]
    return {
        "schema_version": SCHEMA_VERSION, "name": f"E2_soliton_decay_row{row}", "seed": seed,
        "model": {"family": "relativistic_nlw", "params": {"a": a, "m_exp": m, "b": b, "n_exp": n},
                  "mass": 1.0, "field_kind": "complex"},
        "grid": {"x_min": -150.0, "x_max": 150.0, "dx": 0.02},
        "initial": {"kind": "bumps", "support": 20.0, "n_bumps": 8, "amplitude": 0.9, "omega": 0.7},
        "integrator": {"dt": 0.01, "boundary": "sponge", "sponge_width": 25.0},
        "T": 120.0,
        "observers": [{"kind": "snapshot", "every": 5.0, "stride": 4}],
        "analyses": [{"kind": "solitons", "threshold": 0.2}, {"kind": "energy"}],
    }


def _preset_e3(seed: int = 0, epsilon: float = 0.2, initial: str = "soliton_inco") -> dict:
    V = {"kind": "cosine", "amplitude": -epsilon, "wavenumber": 0.31}
    ini = ({"kind": "soliton_inco", "omega": 0.6, "v0": 0.0, "q0": 5.0} if initial == "soliton_inco"
           else {"kind": "soliton", "omega": 0.6, "v": 0.0, "x0": 5.0})
    return {
        "schema_version": SCHEMA_VERSION, "name": f"E3_adiabatic_eps{epsilon:g}", "seed": seed,
        "model": {"family": "external_potential", "params": {"a": 10.0, "m_exp": 6, "b": 8.75, "n_exp": 5},
                  "mass": 1.0, "field_kind": "complex", "external": V},
        "grid": {"x_min": -60.0, "x_max": 60.0, "dx": 0.02},
        "initial": ini,
        "integrator": {"dt": 0.01, "boundary": "sponge", "sponge_width": 15.0},
        "T": 100.0,
        "observers": [{"kind": "snapshot", "every": 0.5, "stride": 2}],
        "analyses": [{"kind": "adiabatic", "omega0": 0.6, "q0": 5.0}, {"kind": "energy"}],
    }


PRESETS = {
    "E1_three_kinks": (_preset_e1, "Ginzburg-Landau decay of seeded random data into kinks (T=100)"),
    "E2_soliton_decay": (_preset_e2, "relativistic NLW rows 1-3; soliton count of seeded bump data"),
    "E3_adiabatic": (_preset_e3, "soliton in V = -eps cos(0.31 x); full vs effective trajectory"),
}


def preset_config(name: str, seed: int | None = None, **kw) -> dict:
    if name not in PRESETS:
        raise ConfigError([("", f"unknown preset {name!r}; available: {', '.join(PRESETS)}")])
    fn = PRESETS[name][0]
    return fn(seed, **kw) if seed is not None else fn(**kw)

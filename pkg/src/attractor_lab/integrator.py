"""Leapfrog (Stormer-Verlet) time stepping with point, distributed and external forces."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import FieldState, Grid1D, energy, read_snapshot, write_snapshot
from .models import ModelSpec

CFL_MAX = 0.9
BLOWUP = 1e6
BOUNDARIES = ("fixed_vacuum", "periodic", "sponge")


class CFLError(ValueError):
    pass


class BlowUpError(FloatingPointError):
    pass


@dataclass(frozen=True)
class StepParams:
    dt: float
    scheme: str = "leapfrog"
    boundary: str = "fixed_vacuum"
    sponge_width: float = 0.0
    sponge_strength: float = 1.0

    def __post_init__(self):
        if self.scheme != "leapfrog":
            raise ValueError(f"unsupported scheme {self.scheme!r}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.dt == 0:
            raise ValueError("dt must be nonzero")
        if self.boundary == "sponge" and self.sponge_width <= 0:
            raise ValueError("sponge boundary needs sponge_width > 0")

    def reversed(self) -> "StepParams":
        return StepParams(-self.dt, self.scheme, self.boundary, self.sponge_width, self.sponge_strength)

    def to_dict(self) -> dict:
        return {"dt": self.dt, "scheme": self.scheme, "boundary": self.boundary,
                "sponge_width": self.sponge_width, "sponge_strength": self.sponge_strength}

    @classmethod
    def from_dict(cls, d: dict) -> "StepParams":
        return cls(float(d["dt"]), d.get("scheme", "leapfrog"), d.get("boundary", "fixed_vacuum"),
                   float(d.get("sponge_width", 0.0)), float(d.get("sponge_strength", 1.0)))


class Stepper:
    """Precomputed leapfrog kernel for one (model, grid, params) triple.

    Forces: three-point Laplacian, -m^2 psi, chi F(psi) or F(psi) everywhere,
    F(psi_k)/dx at delta sites, -V psi. The Lamb site mass is lumped into the
    nodal mass 1 + m/dx. With fixed or sponge boundaries the two end nodes are
    frozen. The sponge multiplies pi by exp(-sigma dt/2) around each kick.
    """

    def __init__(self, model: ModelSpec, grid, params: StepParams):
        dx = grid.dx
        if abs(params.dt) / dx > CFL_MAX + 1e-12:
            raise CFLError(f"CFL violated: |dt|/dx = {abs(params.dt) / dx:.3f} > {CFL_MAX}")
        if (params.boundary == "periodic") != grid.periodic:
            raise ValueError("periodic boundary requires a periodic grid (and vice versa)")
        self.model, self.grid, self.params = model, grid, params
        self.dt = params.dt
        self.dx = dx
        self.m2 = model.mass ** 2
        self.pot = model.potential
        self.periodic = grid.periodic
        n = grid.n_points
        self.inv_mass = None
        self.sites = np.array([], dtype=int)
        self.chi = None
        if model.placement == "sites":
            self.sites = model.site_indices(grid)
            if model.site_mass:
                mass = np.ones(n)
                mass[self.sites] += model.site_mass / dx
                self.inv_mass = 1.0 / mass
        elif model.placement == "chi":
            self.chi = model.chi_values(grid)
        self.ext = model.external_values(grid)
        self.damp = None
        if params.boundary == "sponge":
            x = grid.x
            w = params.sponge_width
            d = np.maximum(np.maximum(grid.x_min + w - x, x - (grid.x_max - w)), 0.0) / w
            sigma = params.sponge_strength * d ** 2
            self.damp = np.exp(-sigma * abs(self.dt) / 2)
        self.reversible = params.boundary != "sponge"

    def acceleration(self, psi: np.ndarray) -> np.ndarray:
        dx2 = self.dx * self.dx
        acc = np.empty_like(psi)
        if self.periodic:
            acc[:] = (np.roll(psi, 1) - 2 * psi + np.roll(psi, -1)) / dx2
        else:
            acc[1:-1] = (psi[:-2] - 2 * psi[1:-1] + psi[2:]) / dx2
            acc[0] = acc[-1] = 0
        if self.m2:
            acc -= self.m2 * psi
        pot = self.pot
        placement = self.model.placement
        if placement == "everywhere":
            acc += pot.force(psi)
        elif placement == "chi":
            acc += self.chi * pot.force(psi)
        elif placement == "sites":
            acc[self.sites] += pot.force(psi[self.sites]) / self.dx
        if self.ext is not None:
            acc -= self.ext * psi
        if self.inv_mass is not None:
            acc *= self.inv_mass
        if not self.periodic:
            acc[0] = acc[-1] = 0
        return acc

    def advance(self, psi: np.ndarray, pi: np.ndarray, n_steps: int):
        """In-place kick-drift-kick updates; returns (psi, pi)."""
        dt = self.dt
        h = 0.5 * dt
        frozen = not self.periodic
        if frozen:
            psi_ends = psi[[0, -1]].copy()
        acc = self.acceleration(psi)
        for _ in range(n_steps):
            if self.damp is not None:
                pi *= self.damp
            pi += h * acc
            psi += dt * pi
            if frozen:
                psi[[0, -1]] = psi_ends
            acc = self.acceleration(psi)
            pi += h * acc
            if self.damp is not None:
                pi *= self.damp
        return psi, pi

    def check(self, psi: np.ndarray, t: float) -> None:
        amax = float(np.max(np.abs(psi)))
        if not math.isfinite(amax) or amax > BLOWUP:
            raise BlowUpError(f"blow-up guard: max|psi| = {amax:.3g} at t = {t:.6g}")


def _initial_arrays(model: ModelSpec, state: FieldState):
    dtype = complex if model.field_kind == "complex" else float
    if dtype is float and (np.iscomplexobj(state.psi) or np.iscomplexobj(state.pi)):
        if np.any(np.imag(state.psi)) or np.any(np.imag(state.pi)):
            raise ValueError("complex data given to a real-field model")
    psi = np.array(np.real(state.psi) if dtype is float else state.psi, dtype=dtype)
    pi = np.array(np.real(state.pi) if dtype is float else state.pi, dtype=dtype)
    return psi, pi


def step(model: ModelSpec, state: FieldState, params: StepParams, n_steps: int = 1) -> FieldState:
    """Advance ``state`` by ``n_steps`` leapfrog steps of size ``params.dt``."""
    stepper = Stepper(model, state.grid, params)
    psi, pi = _initial_arrays(model, state)
    stepper.advance(psi, pi, n_steps)
    t = state.time + n_steps * params.dt
    stepper.check(psi, t)
    return FieldState(state.grid, psi, pi, t)


# ---------------------------------------------------------------------------
# Observers and run records

@dataclass(frozen=True)
class Observer:
    """What to record and how often (``every`` is a time cadence).

    kind: "snapshot" (full state, optional node ``stride``), "point" (psi at
    ``x0``, linearly interpolated), "comoving" (psi at ``x0 + v t``),
    "energy" (total discrete energy).
    """

    kind: str
    every: float
    x0: float = 0.0
    v: float = 0.0
    stride: int = 1
    name: str = ""

    def key(self) -> str:
        if self.name:
            return self.name
        if self.kind == "point":
            return f"point_{self.x0:g}"
        if self.kind == "comoving":
            return f"comoving_{self.x0:g}_{self.v:g}"
        return self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "every": self.every, "x0": self.x0, "v": self.v,
                "stride": self.stride, "name": self.name}

    @classmethod
    def from_dict(cls, d: dict) -> "Observer":
        return cls(d["kind"], float(d["every"]), float(d.get("x0", 0.0)), float(d.get("v", 0.0)),
                   int(d.get("stride", 1)), d.get("name", ""))


@dataclass
class RunRecord:
    model: ModelSpec
    params: StepParams
    initial: FieldState
    final: FieldState
    snapshots: list = field(default_factory=list)
    traces: dict = field(default_factory=dict)       # key -> (t, values)
    energy: tuple | None = None                      # (t, H)
    energy_conserving: bool = True
    meta: dict = field(default_factory=dict)

    def trace(self, key: str):
        return self.traces[key]

    def snapshot_at(self, t: float) -> FieldState:
        times = np.array([s.time for s in self.snapshots])
        j = int(np.argmin(np.abs(times - t)))
        if abs(times[j] - t) > 1e-9 + 0.5 * abs(self.params.dt):
            raise KeyError(f"no snapshot at t={t}")
        return self.snapshots[j]

    def save(self, directory: str | Path) -> Path:
        """Directory with manifest.json, snapshot CSVs and trace CSVs ``t,re,im``."""
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        hashes = {}
        snap_names = []
        for k, s in enumerate(self.snapshots):
            p = d / f"snapshot_{k:05d}.csv"
            write_snapshot(s, p)
            snap_names.append(p.name)
            hashes[p.name] = _sha256(p)
        for name, st in (("initial.csv", self.initial), ("final.csv", self.final)):
            write_snapshot(st, d / name)
            hashes[name] = _sha256(d / name)
        trace_names = {}
        for key, (t, vals) in self.traces.items():
            p = d / f"trace_{_safe(key)}.csv"
            _write_trace(p, t, vals)
            trace_names[key] = p.name
            hashes[p.name] = _sha256(p)
        if self.energy is not None:
            p = d / "energy.csv"
            with open(p, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "H"])
                for a, b in zip(*self.energy):
                    w.writerow([repr(float(a)), repr(float(b))])
            hashes[p.name] = _sha256(p)
        manifest = {"model": self.model.to_json(), "params": self.params.to_dict(),
                    "snapshots": snap_names, "traces": trace_names,
                    "energy_conserving": self.energy_conserving, "meta": self.meta, "hashes": hashes}
        (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
        return d

    @classmethod
    def load(cls, directory: str | Path) -> "RunRecord":
        d = Path(directory)
        man = json.loads((d / "manifest.json").read_text())
        model = ModelSpec.from_json(man["model"])
        params = StepParams.from_dict(man["params"])
        snaps = [read_snapshot(d / n) for n in man["snapshots"]]
        traces = {}
        for key, name in man["traces"].items():
            data = np.loadtxt(d / name, delimiter=",", skiprows=1, ndmin=2)
            traces[key] = (data[:, 0], data[:, 1] + 1j * data[:, 2])
        en = None
        if (d / "energy.csv").exists():
            data = np.loadtxt(d / "energy.csv", delimiter=",", skiprows=1, ndmin=2)
            en = (data[:, 0], data[:, 1])
        return cls(model, params, read_snapshot(d / "initial.csv"), read_snapshot(d / "final.csv"),
                   snaps, traces, en, man["energy_conserving"], man.get("meta", {}))


def _safe(key: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in key)


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_trace(path: Path, t, vals) -> None:
    vals = np.asarray(vals).astype(complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for a, z in zip(t, vals):
            w.writerow([repr(float(a)), repr(float(z.real)), repr(float(z.imag))])


def _sample_at(grid, psi, xq):
    s = (xq - grid.x_min) / grid.dx
    i = int(math.floor(s))
    i = min(max(i, 0), grid.n_points - 2)
    f = s - i
    return (1 - f) * psi[i] + f * psi[i + 1]


def run(model: ModelSpec, state: FieldState, T: float, params: StepParams,
        observers=(), check_every: int = 200) -> RunRecord:
    """Evolve to time ``T`` (relative to ``state.time``) recording the observers.

    Observer cadences must be integer multiples of ``dt``. Deterministic for
    identical inputs.
    """
    stepper = Stepper(model, state.grid, params)
    dt = params.dt
    n_total = int(round(T / dt))
    if n_total < 0:
        raise ValueError("T and dt must have the same sign")
    if abs(n_total * dt - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError("T must be an integer multiple of dt")
    cadences = []
    for ob in observers:
        k = int(round(ob.every / abs(dt)))
        if k < 1 or abs(k * abs(dt) - ob.every) > 1e-9 * max(1.0, ob.every):
            raise ValueError(f"observer cadence {ob.every} is not a multiple of dt")
        cadences.append(k)
    psi, pi = _initial_arrays(model, state)
    grid = state.grid
    t0 = state.time
    snaps, traces, en = [], {ob.key(): ([], []) for ob in observers if ob.kind in ("point", "comoving")}, None
    if any(ob.kind == "energy" for ob in observers):
        en = ([], [])

    def observe(n):
        t = t0 + n * dt
        for ob, k in zip(observers, cadences):
            if n % k:
                continue
            if ob.kind == "snapshot":
                st = slice(None, None, ob.stride)
                if ob.stride == 1:
                    snaps.append(FieldState(grid, psi.copy(), pi.copy(), t))
                else:
                    g2 = Grid1D(grid.x_min, grid.x[st][-1], len(grid.x[st]), grid.periodic)
                    snaps.append(FieldState(g2, psi[st].copy(), pi[st].copy(), t))
            elif ob.kind == "point":
                traces[ob.key()][0].append(t)
                traces[ob.key()][1].append(_sample_at(grid, psi, ob.x0))
            elif ob.kind == "comoving":
                traces[ob.key()][0].append(t)
                traces[ob.key()][1].append(_sample_at(grid, psi, ob.x0 + ob.v * (t - t0)))
            elif ob.kind == "energy":
                en[0].append(t)
                en[1].append(energy(model, FieldState(grid, psi, pi, t)).total)
            else:
                raise ValueError(f"unknown observer kind {ob.kind!r}")

    # chunk boundaries: every observer sample point and guard check
    events = {n_total}
    for k in cadences:
        events.update(range(0, n_total + 1, k))
    events.update(range(0, n_total + 1, check_every))
    events = sorted(events)
    observe(0)
    n = 0
    for e in events:
        if e == 0:
            continue
        stepper.advance(psi, pi, e - n)
        n = e
        stepper.check(psi, t0 + n * dt)
        observe(n)
    final = FieldState(grid, psi.copy(), pi.copy(), t0 + n_total * dt)
    out_traces = {k: (np.array(v[0]), np.array(v[1])) for k, v in traces.items()}
    energy_series = None if en is None else (np.array(en[0]), np.array(en[1]))
    return RunRecord(model, params, state.copy(), final, snaps, out_traces, energy_series,
                     energy_conserving=stepper.reversible,
                     meta={"T": T, "n_steps": n_total, "observers": [o.to_dict() for o in observers]})

"""Uniform 1D grids, field states, discrete energies, seminorms and metrics."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid1D:
    """Uniform node grid ``x_i = x_min + i*dx``, ``i = 0..n_points-1``.

    With ``periodic=True`` the nodes are ``n_points`` distinct points on a
    circle of length ``n_points*dx``; node ``n_points`` is identified with
    node 0.
    """

    x_min: float
    x_max: float
    n_points: int
    periodic: bool = False

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("Grid1D needs n_points >= 3")
        if not self.x_max > self.x_min:
            raise ValueError("Grid1D needs x_max > x_min")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, dx: float, periodic: bool = False) -> "Grid1D":
        n = int(round((x_max - x_min) / dx)) + 1
        return cls(float(x_min), float(x_min + (n - 1) * dx), n, periodic)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def half_width(self) -> float:
        return min(abs(self.x_min), abs(self.x_max))

    def node_index(self, x0: float, tol: float = 1e-9) -> int:
        """Index of the node at ``x0``; raises if ``x0`` is not on a node."""
        s = (x0 - self.x_min) / self.dx
        i = int(round(s))
        if abs(s - i) > tol or not 0 <= i < self.n_points:
            raise ValueError(f"position {x0} is not a grid node")
        return i

    def nearest_index(self, x0: float) -> int:
        return int(np.clip(round((x0 - self.x_min) / self.dx), 0, self.n_points - 1))

    def weights(self) -> np.ndarray:
        """Quadrature weights: trapezoid, or uniform for periodic grids."""
        w = np.full(self.n_points, self.dx)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.dx
        return w

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points,
                "periodic": self.periodic}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid1D":
        if "dx" in d and "n_points" not in d:
            return cls.from_spacing(d["x_min"], d["x_max"], d["dx"], d.get("periodic", False))
        return cls(float(d["x_min"]), float(d["x_max"]), int(d["n_points"]), bool(d.get("periodic", False)))


@dataclass
class FieldState:
    grid: Grid1D
    psi: np.ndarray
    pi: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.psi = np.asarray(self.psi)
        self.pi = np.asarray(self.pi)
        n = self.grid.n_points
        if self.psi.shape != (n,) or self.pi.shape != (n,):
            raise ValueError(f"psi and pi must have shape ({n},)")
        if not (np.all(np.isfinite(self.psi)) and np.all(np.isfinite(self.pi))):
            raise ValueError("FieldState entries must be finite")

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.psi) or np.iscomplexobj(self.pi)

    def copy(self) -> "FieldState":
        return FieldState(self.grid, self.psi.copy(), self.pi.copy(), self.time)

    def as_complex(self) -> "FieldState":
        return FieldState(self.grid, self.psi.astype(complex), self.pi.astype(complex), self.time)

    def rotated(self, theta: float) -> "FieldState":
        ph = np.exp(1j * theta)
        return FieldState(self.grid, ph * self.psi, ph * self.pi, self.time)

    def shifted(self, nodes: int) -> "FieldState":
        """Cyclic shift by ``nodes`` grid cells (meaningful on periodic grids)."""
        return FieldState(self.grid, np.roll(self.psi, nodes), np.roll(self.pi, nodes), self.time)


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    gradient: float
    mass_term: float
    potential: float
    total: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.total):
            object.__setattr__(self, "total",
                               self.kinetic + self.gradient + self.mass_term + self.potential)

    def as_dict(self) -> dict:
        return {"kinetic": self.kinetic, "gradient": self.gradient, "mass_term": self.mass_term,
                "potential": self.potential, "total": self.total}


def _check_same_grid(a: FieldState, b: FieldState) -> None:
    if a.grid != b.grid:
        raise GridMismatchError("states live on different grids")


def derivative(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Centered second-order derivative, one-sided (second order) at the ends."""
    if grid.periodic:
        return (np.roll(f, -1) - np.roll(f, 1)) / (2 * grid.dx)
    return np.gradient(f, grid.dx, edge_order=2)


def integrate(f: np.ndarray, grid: Grid1D) -> float | complex:
    return np.sum(grid.weights() * f)


def energy_density_terms(model, state: FieldState, mask: np.ndarray | None = None) -> EnergyBreakdown:
    """Discrete Hamiltonian of ``model`` at ``state``, optionally restricted to ``mask``.

    The gradient term is the midpoint rule for ``|psi'|^2`` on cell midpoints,
    i.e. the exact conjugate of the three-point Laplacian used by the integrator.
    Point terms ``U(psi(x_k))`` and the lumped site mass count only for sites
    inside ``mask``.
    """
    grid = state.grid
    psi, pi = state.psi, state.pi
    w = grid.weights()
    cell = np.ones(grid.n_points, dtype=bool) if mask is None else mask
    wm = np.where(cell, w, 0.0)

    kinetic = 0.5 * np.sum(wm * np.abs(pi) ** 2)
    if grid.periodic:
        diffs = np.roll(psi, -1) - psi
        cw = cell & np.roll(cell, -1)
    else:
        diffs = np.diff(psi)
        cw = cell[:-1] & cell[1:]
    gradient = 0.5 * np.sum(np.abs(diffs[cw]) ** 2) / grid.dx

    s = np.abs(psi) ** 2
    mass_term = 0.5 * model.mass ** 2 * np.sum(wm * s)
    potential = 0.0
    pot = model.potential
    if pot is not None and model.placement == "everywhere":
        potential += np.sum(wm * pot.U(psi))
    elif pot is not None and model.placement == "chi":
        potential += np.sum(wm * model.chi_values(grid) * pot.U(psi))
    elif pot is not None and model.placement == "sites":
        for k in model.site_indices(grid):
            if cell[k]:
                potential += float(pot.U(psi[k]))
    if model.placement == "sites" and model.site_mass:
        for k in model.site_indices(grid):
            if cell[k]:
                kinetic += 0.5 * model.site_mass * abs(pi[k]) ** 2
    ext = model.external_values(grid)
    if ext is not None:
        potential += 0.5 * np.sum(wm * ext * s)
    return EnergyBreakdown(float(kinetic), float(gradient), float(mass_term), float(potential))


def energy(model, state: FieldState) -> EnergyBreakdown:
    """Discrete Hamiltonian for every model family (see ``energy_density_terms``)."""
    if not (np.all(np.isfinite(state.psi)) and np.all(np.isfinite(state.pi))):
        raise ValueError("non-finite state")
    return energy_density_terms(model, state)


def local_energy(model, state: FieldState, R: float) -> float:
    """Energy restricted to ``[-R, R]`` (cells with both ends inside)."""
    mask = np.abs(state.grid.x) <= R + 1e-12
    return energy_density_terms(model, state, mask).total


def local_seminorm(state: FieldState, other: FieldState, R: float, variant: str = "kg") -> float:
    """Local energy seminorm of ``state - other`` on ``[-R, R]``.

    ``variant="kg"``: ||d psi||_{H1(-R,R)} + ||d pi||_{L2(-R,R)}.
    ``variant="dalembert"``: ||d psi'||_R + |d psi(0)| + ||d pi||_R.
    """
    _check_same_grid(state, other)
    grid = state.grid
    if R > grid.half_width + 1e-12:
        raise ValueError(f"R={R} exceeds the domain half-width {grid.half_width}")
    dpsi = state.psi - other.psi
    dpi = state.pi - other.pi
    ddpsi = derivative(dpsi, grid)
    x = grid.x
    inside = np.abs(x) <= R + 1e-12
    xs = x[inside]

    def l2sq(f):
        return float(np.trapezoid(np.abs(f[inside]) ** 2, xs))

    if variant == "kg":
        return math.sqrt(l2sq(dpsi) + l2sq(ddpsi)) + math.sqrt(l2sq(dpi))
    if variant == "dalembert":
        d0 = np.interp(0.0, x, dpsi.real) + 1j * np.interp(0.0, x, np.imag(dpsi))
        return math.sqrt(l2sq(ddpsi)) + abs(d0) + math.sqrt(l2sq(dpi))
    raise ValueError(f"unknown seminorm variant {variant!r}")


def weighted_metric_dist(state1: FieldState, state2: FieldState, variant: str = "kg") -> float:
    """sum_{R=1}^{R_max} 2^-R s_R / (1 + s_R), truncated at R_max = floor(half-width)."""
    _check_same_grid(state1, state2)
    r_max = int(math.floor(state1.grid.half_width + 1e-12))
    total = 0.0
    for R in range(1, r_max + 1):
        s = local_seminorm(state1, state2, R, variant)
        total += 2.0 ** -R * s / (1.0 + s)
    return total


def charge(state: FieldState, field_kind: str | None = None) -> float:
    """Noether charge Im int conj(psi) pi dx of a complex field."""
    if field_kind == "real":
        raise ValueError("charge is undefined for real-field models")
    return float(np.imag(integrate(np.conj(state.psi) * state.pi, state.grid)))


def field_momentum(state: FieldState) -> float:
    """P = -Re int conj(pi) psi' dx (sign chosen so P and velocity agree)."""
    return float(-np.real(integrate(np.conj(state.pi) * derivative(state.psi, state.grid), state.grid)))


def write_snapshot(state: FieldState, path: str | Path) -> None:
    """CSV ``x,re_psi,im_psi,re_pi,im_pi`` plus a JSON sidecar with grid and time."""
    path = Path(path)
    x = state.grid.x
    psi = state.psi.astype(complex)
    pi = state.pi.astype(complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re_psi", "im_psi", "re_pi", "im_pi"])
        for row in zip(x, psi.real, psi.imag, pi.real, pi.imag):
            w.writerow([repr(float(v)) for v in row])
    meta = {"grid": state.grid.to_dict(), "time": state.time,
            "complex": bool(state.is_complex)}
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def read_snapshot(path: str | Path) -> FieldState:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = Grid1D.from_dict(meta["grid"])
    psi = data[:, 1] + 1j * data[:, 2]
    pi = data[:, 3] + 1j * data[:, 4]
    if not meta.get("complex", True):
        psi, pi = psi.real.copy(), pi.real.copy()
    return FieldState(grid, psi, pi, float(meta["time"]))

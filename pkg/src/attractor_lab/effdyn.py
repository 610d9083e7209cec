"""Adiabatic effective dynamics of solitons and related scalar utilities."""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.optimize import brentq

from .grid import Grid1D, energy, field_momentum
from .models import (ModelSpec, external_potential_gradient, external_potential_values,
                     soliton_boost, soliton_profile)


class ChartRangeError(ValueError):
    pass


@dataclass
class SolitonChart:
    """Momentum and energy of the boosted soliton family against velocity."""

    v_grid: np.ndarray
    P_of_v: np.ndarray
    E_of_v: np.ndarray
    omega0: float = float("nan")
    _inverse: PchipInterpolator | None = field(default=None, repr=False)
    _E_of_P: CubicSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        order = np.argsort(self.P_of_v)
        P = self.P_of_v[order]
        if np.any(np.diff(P) <= 0) or np.any(np.diff(self.v_grid[order]) <= 0):
            raise ValueError("P(v) is not strictly monotone")
        self._inverse = PchipInterpolator(P, self.v_grid[order], extrapolate=False)
        # E(P) has its minimum at P = 0, where a monotone interpolant would flatten it
        self._E_of_P = CubicSpline(P, self.E_of_v[order], extrapolate=False)

    @property
    def P_range(self) -> tuple[float, float]:
        return float(self.P_of_v.min()), float(self.P_of_v.max())

    def _guard(self, P):
        lo, hi = self.P_range
        if np.any(np.asarray(P) < lo) or np.any(np.asarray(P) > hi):
            raise ChartRangeError("momentum outside the chart range")

    def velocity(self, P):
        self._guard(P)
        return self._inverse(P)

    def E(self, P):
        """Effective kinetic Hamiltonian E(P)."""
        self._guard(P)
        return self._E_of_P(P)

    def dE(self, P):
        self._guard(P)
        return self._E_of_P.derivative()(P)

    def rest_mass(self) -> float:
        """Small-velocity slope M0 = lim P(v)/v."""
        i = np.argsort(np.abs(self.v_grid))
        nz = [j for j in i if self.v_grid[j] != 0][:2]
        return float(np.mean([self.P_of_v[j] / self.v_grid[j] for j in nz]))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["v", "P", "E"])
            for row in zip(self.v_grid, self.P_of_v, self.E_of_v):
                w.writerow([repr(float(c)) for c in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "SolitonChart":
        d = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(d[:, 0], d[:, 1], d[:, 2])


def build_chart(model: ModelSpec, omega0: float, v_grid, grid: Grid1D | None = None) -> SolitonChart:
    """Boost the rest soliton to each velocity and evaluate P and E by quadrature."""
    v_grid = np.asarray(v_grid, dtype=float)
    if np.any(np.abs(v_grid) > 0.9):
        raise ValueError("chart velocities limited to |v| <= 0.9")
    if grid is None:
        grid = Grid1D.from_spacing(-40.0, 40.0, 0.01)
    free = replace(model, external=None)
    prof = soliton_profile(free, omega0, grid)
    P, E = [], []
    for v in v_grid:
        s = soliton_boost(prof, float(v), 0.0, grid)
        P.append(field_momentum(s))
        E.append(energy(free, s).total)
    return SolitonChart(v_grid, np.array(P), np.array(E), omega0)


@dataclass(frozen=True)
class EffectiveState:
    Q: float
    Pi: float

    def __post_init__(self):
        if not (math.isfinite(self.Q) and math.isfinite(self.Pi)):
            raise ValueError("effective state must be finite")


@dataclass
class EffectivePotential:
    """Scalar potential for the effective particle: value and gradient."""

    value: Callable
    gradient: Callable
    amplitude: float = 0.0

    scalar_gradient: Callable | None = None

    @classmethod
    def from_spec(cls, spec: dict | None) -> "EffectivePotential":
        if spec is None or spec.get("kind") == "none":
            z = lambda q: np.zeros_like(np.asarray(q, dtype=float))
            return cls(z, z, 0.0, lambda q: 0.0)
        kind = spec.get("kind", "cosine")
        fast = None
        if kind == "cosine":
            a, k = spec["amplitude"], spec["wavenumber"]
            fast = lambda q: -a * k * math.sin(k * q)
        elif kind == "harmonic":
            st, c = spec["stiffness"], spec.get("center", 0.0)
            fast = lambda q: st * (q - c)
        amp = abs(spec.get("amplitude", spec.get("stiffness", 0.0)))
        return cls(lambda q: external_potential_values(spec, q),
                   lambda q: external_potential_gradient(spec, q), amp, fast)

    @classmethod
    def harmonic(cls, k: float, center: float = 0.0) -> "EffectivePotential":
        return cls.from_spec({"kind": "harmonic", "stiffness": k, "center": center})

    @classmethod
    def restricted(cls, spec: dict, model: ModelSpec, omega0: float,
                   grid: Grid1D | None = None) -> "EffectivePotential":
        """q -> 1/2 int V(x) phi(x - q)^2 dx, the potential term of the field
        Hamiltonian restricted to rest solitons centered at q.

        For the even profile this is again a cosine (amplitude scaled by
        1/2 int cos(k y) phi^2) or a harmonic well (stiffness scaled by N/2).
        """
        if grid is None:
            grid = Grid1D.from_spacing(-40.0, 40.0, 0.01)
        prof = soliton_profile(replace(model, external=None), omega0, grid)
        w = grid.weights() * prof.samples ** 2
        kind = spec.get("kind", "cosine")
        if kind == "cosine":
            c = float(np.sum(w * np.cos(spec["wavenumber"] * grid.x)))
            return cls.from_spec(dict(spec, amplitude=0.5 * c * spec["amplitude"]))
        if kind == "harmonic":
            return cls.from_spec(dict(spec, stiffness=0.5 * float(np.sum(w)) * spec["stiffness"]))
        if kind == "none":
            return cls.from_spec(spec)
        raise ValueError(f"no restricted form for potential kind {kind!r}")


@dataclass
class EffectiveTrajectory:
    t: np.ndarray
    Q: np.ndarray
    Pi: np.ndarray
    H: np.ndarray

    def state(self, i: int) -> EffectiveState:
        return EffectiveState(float(self.Q[i]), float(self.Pi[i]))


def integrate_effective(chart: SolitonChart, V, s0: EffectiveState, T: float,
                        dt: float) -> EffectiveTrajectory:
    """Kick-drift-kick leapfrog for Q' = E'(Pi), Pi' = -V'(Q)."""
    if not isinstance(V, EffectivePotential):
        V = EffectivePotential.from_spec(V)
    n = int(round(T / dt))
    Q = np.empty(n + 1)
    Pi = np.empty(n + 1)
    Q[0], Pi[0] = s0.Q, s0.Pi
    dE = _scalar_ppoly(chart._E_of_P.derivative())
    grad = V.scalar_gradient or (lambda q: float(V.gradient(q)))
    lo, hi = chart.P_range
    q, p = float(s0.Q), float(s0.Pi)
    g = grad(q)
    for i in range(n):
        p -= 0.5 * dt * g
        if not lo <= p <= hi:
            raise ChartRangeError(f"momentum {p:.4g} left the chart at t={i * dt:.4g}")
        q += dt * dE(p)
        g = grad(q)
        p -= 0.5 * dt * g
        Q[i + 1], Pi[i + 1] = q, p
    if np.any(Pi < lo) or np.any(Pi > hi):
        raise ChartRangeError("momentum left the chart")
    H = chart._E_of_P(Pi) + np.asarray(V.value(Q), dtype=float)
    return EffectiveTrajectory(dt * np.arange(n + 1), Q, Pi, H)


def _scalar_ppoly(pp):
    """Plain-float evaluator for a piecewise cubic (hot loop of the leapfrog)."""
    brk = pp.x.tolist()
    coef = pp.c.T.tolist()
    last = len(coef) - 1

    def f(x):
        i = min(max(bisect.bisect_right(brk, x) - 1, 0), last)
        h = x - brk[i]
        acc = 0.0
        for c in coef[i]:
            acc = acc * h + c
        return acc

    return f


def soliton_center(state, window: float, guess: float) -> tuple[float, float]:
    """|psi|-weighted centroid within ``guess +- window``; also the peak |psi| there."""
    x = state.grid.x
    a = np.abs(state.psi)
    sel = np.abs(x - guess) <= window
    w = a[sel]
    if w.sum() == 0:
        return float("nan"), 0.0
    return float(np.sum(x[sel] * w) / w.sum()), float(w.max())


@dataclass
class FullTrack:
    t: np.ndarray
    q: np.ndarray
    P: np.ndarray
    peak: np.ndarray
    lost_at: float | None = None


def track_soliton(run, window: float = 10.0, lost_fraction: float = 0.2) -> FullTrack:
    """Center q(t) and field momentum P(t) from the snapshots of a run."""
    snaps = run.snapshots
    guess = soliton_center(snaps[0], 1e9, 0.0)[0]
    ts, qs, Ps, peaks = [], [], [], []
    peak0 = None
    lost = None
    for s in snaps:
        q, pk = soliton_center(s, window, guess)
        if peak0 is None:
            peak0 = pk
        if not math.isfinite(q) or pk < lost_fraction * peak0:
            lost = s.time
            break
        ts.append(s.time)
        qs.append(q)
        Ps.append(field_momentum(s))
        peaks.append(pk)
        guess = q
    return FullTrack(np.array(ts), np.array(qs), np.array(Ps), np.array(peaks), lost)


def zero_crossings(t, q, center: float = 0.0) -> np.ndarray:
    y = np.asarray(q) - center
    i = np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]
    return t[i] + (t[i + 1] - t[i]) * y[i] / (y[i] - y[i + 1])


def phase_error(t_full, q_full, t_eff, Q_eff, center: float = 0.0, periods: int = 2) -> dict:
    """Crossing-time mismatch of two oscillations over their first periods.

    Returns the largest difference between matching crossings of ``center``
    divided by the full oscillation period (two crossings per period).
    """
    cf = zero_crossings(np.asarray(t_full), q_full, center)
    ce = zero_crossings(np.asarray(t_eff), Q_eff, center)
    k = 2 * periods
    if cf.size < k or ce.size < k:
        return {"phase_error": float("inf"), "crossings_full": cf.tolist(), "crossings_eff": ce.tolist()}
    period_full = 2 * float(np.mean(np.diff(cf[:k]))) if k > 1 else float("nan")
    period_eff = 2 * float(np.mean(np.diff(ce[:k])))
    err = float(np.max(np.abs(cf[:k] - ce[:k]))) / period_full
    return {"phase_error": err, "period_full": period_full, "period_eff": period_eff,
            "crossings_full": cf[:k].tolist(), "crossings_eff": ce[:k].tolist()}


def compare_adiabatic(full_run, eff_traj: EffectiveTrajectory, epsilon: float,
                      window: float = 10.0) -> dict:
    """max |q - Q| and max |P - Pi| over t <= min(run length, 1/epsilon)."""
    tr = track_soliton(full_run, window)
    T = tr.t[-1] if tr.t.size else 0.0
    if epsilon > 0:
        T = min(T, 1.0 / epsilon)
    sel = tr.t <= T + 1e-9
    Q = np.interp(tr.t[sel], eff_traj.t, eff_traj.Q)
    Pi = np.interp(tr.t[sel], eff_traj.t, eff_traj.Pi)
    return {
        "epsilon": float(epsilon),
        "T": float(T),
        "max_position_deviation": float(np.max(np.abs(tr.q[sel] - Q))) if sel.any() else float("nan"),
        "max_momentum_deviation": float(np.max(np.abs(tr.P[sel] - Pi))) if sel.any() else float("nan"),
        "soliton_lost_at": tr.lost_at,
        "samples": int(sel.sum()),
    }


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# form-factor utilities (radial densities in 3D)

def radial_transform(r, rho, k) -> np.ndarray:
    """rho_hat(k) = (4 pi / k) int r sin(k r) rho dr, with rho_hat(0) = 4 pi int r^2 rho dr."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.size)
    for j, kk in enumerate(k):
        if kk == 0:
            out[j] = 4 * np.pi * simpson(r * r * rho, x=r)
        else:
            out[j] = 4 * np.pi / kk * simpson(r * np.sin(kk * r) * rho, x=r)
    return out


def _check_decay(r, rho):
    if not np.all(np.isfinite(rho)):
        raise ValueError("density must be finite")
    scale = np.max(np.abs(rho))
    if scale > 0 and abs(rho[-1]) > 1e-10 * scale:
        raise ValueError("density does not decay at r_max")


def effective_mass_increment(r, rho, path: str = "fourier", k_max: float | None = None,
                             n_k: int = 8001) -> float:
    """m_e = -1/3 <rho, Delta^{-1} rho> for a radial density.

    ``path="fourier"``: (4 pi / 3) (2 pi)^-3 int_0^inf |rho_hat(k)|^2 dk.
    ``path="real"``: (1/3) int 4 pi r^2 rho(r) Phi(r) dr with the Newtonian
    potential Phi(r) = (1/r) int_0^r rho s^2 ds + int_r^inf rho s ds.
    """
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    _check_decay(r, rho)
    if not np.any(rho):
        return 0.0
    if path == "real":
        inner = cumulative_simpson(rho * r * r, x=r, initial=0.0)
        outer_c = cumulative_simpson(rho * r, x=r, initial=0.0)
        outer = outer_c[-1] - outer_c
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = np.where(r > 0, inner / np.where(r > 0, r, 1.0), 0.0) + outer
        return float(simpson(4 * np.pi * r * r * rho * phi, x=r) / 3.0)
    if path != "fourier":
        raise ValueError(f"unknown path {path!r}")
    if k_max is None:
        k_max = _transform_cutoff(r, rho)
    k = np.linspace(0.0, k_max, n_k)
    rh = _fast_transform(r, rho, k)
    return float(4 * np.pi / 3 * (2 * np.pi) ** -3 * simpson(rh * rh, x=k))


def _fast_transform(r, rho, k, chunk: int = 256) -> np.ndarray:
    out = np.empty(k.size)
    out[k == 0] = 4 * np.pi * simpson(r * r * rho, x=r)
    nz = np.nonzero(k)[0]
    for s in range(0, nz.size, chunk):
        idx = nz[s:s + chunk]
        kk = k[idx][:, None]
        out[idx] = 4 * np.pi / kk[:, 0] * simpson(r * np.sin(kk * r) * rho, x=r, axis=1)
    return out


def _transform_cutoff(r, rho, rel: float = 1e-9) -> float:
    """Wavenumber beyond which |rho_hat|^2 stays below ``rel`` of its peak."""
    dr = float(r[1] - r[0])
    k = np.linspace(0.0, np.pi / dr, 2049)
    rh2 = _fast_transform(r, rho, k) ** 2
    big = np.nonzero(rh2 > rel * rh2.max())[0]
    return float(k[min(big[-1] + 2, k.size - 1)])


def wiener_check(r, rho, k_max: float, n_k: int = 2001, tol: float = 1e-8) -> dict:
    """Sign and size of rho_hat on [0, k_max]; zeros refined by bisection."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    k = np.linspace(0.0, k_max, n_k)
    rh = _fast_transform(r, rho, k)
    flips = np.nonzero(np.sign(rh[:-1]) * np.sign(rh[1:]) < 0)[0]
    f = lambda kk: float(radial_transform(r, rho, kk)[0])
    zeros = [float(brentq(f, k[i], k[i + 1], xtol=1e-12)) for i in flips]
    min_abs = float(np.min(np.abs(rh)))
    return {"passes": bool(flips.size == 0 and min_abs > tol), "min_abs": min_abs, "zeros": zeros}

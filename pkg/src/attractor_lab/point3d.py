"""Radial 3D wave equation with a nonlinearity concentrated at the origin.

The field splits into a free (dispersive) part driven by the regular data and
an outgoing spherical wave ``theta(t-r) zeta(t-r) / (4 pi r)``.  The charge
``zeta`` obeys the scalar ODE ``zeta' = 4 pi (lambda(t) - F(zeta))``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline

FOUR_PI = 4.0 * math.pi
TAIL_TOL = 1e-8


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class PointNonlinearity:
    """Polynomial force ``F`` with potential ``U = int_0 F`` (so ``F = U'``)."""

    coeffs: tuple

    @classmethod
    def cubic(cls) -> "PointNonlinearity":
        # F = zeta^3 - zeta, U = zeta^4/4 - zeta^2/2
        return cls((0.0, -1.0, 0.0, 1.0))

    @property
    def F(self) -> Polynomial:
        return Polynomial(self.coeffs)

    @property
    def U(self) -> Polynomial:
        return self.F.integ()

    def zeros(self) -> np.ndarray:
        r = self.F.roots()
        return np.sort(r[np.abs(r.imag) < 1e-10].real)

    def confining(self) -> bool:
        c = self.U.coef
        return len(c) > 1 and (len(c) - 1) % 2 == 0 and c[-1] > 0


@dataclass
class RadialInitialData:
    """Regular radial data on ``r = 0..R_max`` plus the singular amplitudes."""

    r: np.ndarray
    psi0_reg: np.ndarray
    pi0_reg: np.ndarray
    zeta0: float = 0.0
    eta0: float = 0.0

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.psi0_reg = np.asarray(self.psi0_reg, dtype=float)
        self.pi0_reg = np.asarray(self.pi0_reg, dtype=float)
        if not (self.r.shape == self.psi0_reg.shape == self.pi0_reg.shape):
            raise ValueError("r, psi0_reg and pi0_reg must have equal shapes")
        if self.r[0] != 0.0 or np.any(np.diff(self.r) <= 0):
            raise ValueError("radial grid must start at 0 and increase")
        if not (np.all(np.isfinite(self.psi0_reg)) and np.all(np.isfinite(self.pi0_reg))):
            raise ValueError("radial samples must be finite")
        if abs(self.psi0_reg[-1]) > TAIL_TOL or abs(self.pi0_reg[-1]) > TAIL_TOL:
            raise ValueError(f"regular data must decay below {TAIL_TOL} at R_max")
        self._psi = CubicSpline(self.r, self.psi0_reg)
        self._rpi = CubicSpline(self.r, self.r * self.pi0_reg)
        self._G = self._rpi.antiderivative()

    @classmethod
    def from_functions(cls, psi0: Callable, pi0: Callable, zeta0: float = 0.0, eta0: float = 0.0,
                       r_max: float = 100.0, dr: float = 1e-2) -> "RadialInitialData":
        n = int(round(r_max / dr)) + 1
        r = np.linspace(0.0, r_max, n)
        return cls(r, psi0(r), pi0(r), zeta0, eta0)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    # data extended by zero beyond R_max (it decays there by construction)
    def _ext(self, spline, a, nu=0):
        inside = a <= self.r_max
        return np.where(inside, spline(np.minimum(a, self.r_max), nu), 0.0)

    # odd extensions f(s) = s psi0(|s|), g(s) = s pi0(|s|) of the 1D reduction u = r psi
    def _f(self, s):
        return s * self._ext(self._psi, np.abs(s))

    def _fp(self, s):
        a = np.abs(s)
        return self._ext(self._psi, a) + a * self._ext(self._psi, a, 1)

    def _g(self, s):
        return np.sign(s) * self._ext(self._rpi, np.abs(s))

    def _gp(self, s):
        return self._ext(self._rpi, np.abs(s), 1)

    def _Gx(self, a):
        return self._G(np.minimum(a, self.r_max))

    def free_field(self, r, t):
        """Free radial wave ``(psi_f, d_t psi_f, d_r psi_f)`` at radii ``r > 0``."""
        r = np.asarray(r, dtype=float)
        a, b = r + t, r - t
        u = 0.5 * (self._f(a) + self._f(b)) + 0.5 * (self._Gx(a) - self._Gx(np.abs(b)))
        ut = 0.5 * (self._fp(a) - self._fp(b)) + 0.5 * (self._g(a) + self._g(b))
        ur = 0.5 * (self._fp(a) + self._fp(b)) + 0.5 * (self._g(a) - self._g(b))
        return u / r, ut / r, ur / r - u / r ** 2

    def energy0(self, nl: PointNonlinearity) -> float:
        """Initial energy; requires ``eta0 = 0`` (otherwise it is infinite)."""
        if self.eta0 != 0.0:
            return math.inf
        w = FOUR_PI * self.r ** 2
        dpsi = self._psi(self.r, 1)
        dens = 0.5 * (self.pi0_reg ** 2 + dpsi ** 2) * w
        return float(simpson(dens, x=self.r) + nl.U(self.zeta0))

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "psi0_reg", "pi0_reg"])
            for row in zip(self.r, self.psi0_reg, self.pi0_reg):
                w.writerow([repr(float(v)) for v in row])
        path.with_suffix(".json").write_text(
            json.dumps({"zeta0": self.zeta0, "eta0": self.eta0}, indent=2, sort_keys=True))

    @classmethod
    def from_csv(cls, path: str | Path) -> "RadialInitialData":
        path = Path(path)
        meta = json.loads(path.with_suffix(".json").read_text())
        d = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(d[:, 0], d[:, 1], d[:, 2], float(meta["zeta0"]), float(meta["eta0"]))


def lambda_trace(data: RadialInitialData, tgrid) -> np.ndarray:
    """Drive ``lambda(t) = psi0(t) + t psi0'(t) + t pi0(t) + eta0/(4 pi)``.

    Radial derivatives come from the cubic spline of the data, which agrees
    with centered differences to O(dr^2) on the grid.
    """
    t = np.asarray(tgrid, dtype=float)
    if np.any(t < 0) or np.any(t > data.r_max):
        raise CoverageError("lambda requested outside the radial grid")
    return data._psi(t) + t * data._psi(t, 1) + data._rpi(t) + data.eta0 / FOUR_PI


def a_priori_bound(nl: PointNonlinearity, H0: float) -> float:
    """sup{|zeta| : U(zeta) <= H0} for a confining U."""
    if not nl.confining():
        return math.inf
    roots = (nl.U - H0).roots()
    real = roots[np.abs(roots.imag) < 1e-9].real
    if real.size == 0:
        raise ValueError("energy below inf U")
    return float(np.max(np.abs(real)))


@dataclass
class ZetaTrajectory:
    t: np.ndarray
    zeta: np.ndarray
    lam: np.ndarray
    dzeta: np.ndarray
    targets: tuple = ()
    bound: float = math.inf
    U: Polynomial | None = None
    _spline: CubicHermiteSpline | None = field(default=None, repr=False)

    def __post_init__(self):
        self._spline = CubicHermiteSpline(self.t, self.zeta, self.dzeta)

    def zeta_at(self, s, nu: int = 0) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if np.any(s < self.t[0] - 1e-12) or np.any(s > self.t[-1] + 1e-12):
            raise CoverageError("trajectory does not cover the requested times")
        return self._spline(s, nu)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "zeta", "lambda"])
            for row in zip(self.t, self.zeta, self.lam):
                w.writerow([repr(float(v)) for v in row])


def solve_zeta(F, lam, tgrid, zeta0: float, bound: float = math.inf) -> ZetaTrajectory:
    """Classical RK4 for ``zeta' = 4 pi (lambda(t) - F(zeta))`` on ``tgrid``.

    ``lam`` is a callable or an array sampled on ``tgrid`` (cubic spline for
    the half steps).  ``bound`` is the a priori bound; leaving ``2*bound``
    raises, since that can only be a misconfigured integration.
    """
    t = np.asarray(tgrid, dtype=float)
    if callable(lam):
        lam_f = lam
        lam_v = np.asarray(lam(t), dtype=float)
    else:
        lam_v = np.asarray(lam, dtype=float)
        lam_f = CubicSpline(t, lam_v)
    Fp = F if callable(F) else Polynomial(F)

    def rhs(s, z):
        return FOUR_PI * (lam_f(s) - Fp(z))

    z = np.empty_like(t)
    z[0] = zeta0
    for i in range(len(t) - 1):
        h = t[i + 1] - t[i]
        s, y = t[i], z[i]
        k1 = rhs(s, y)
        k2 = rhs(s + h / 2, y + h / 2 * k1)
        k3 = rhs(s + h / 2, y + h / 2 * k2)
        k4 = rhs(s + h, y + h * k3)
        z[i + 1] = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not abs(z[i + 1]) <= 2 * bound:
            raise FloatingPointError(f"|zeta| left 2*Lambda at t={t[i + 1]:.4g}")
    dz = FOUR_PI * (lam_v - Fp(z))
    targets = ()
    U = None
    if isinstance(Fp, Polynomial):
        U = Fp.integ()
        roots = Fp.roots()
        real = np.sort(roots[np.abs(roots.imag) < 1e-10].real)
        targets = tuple(float(q) for q in real if abs(q) <= bound)
    return ZetaTrajectory(t, z, lam_v, dz, targets, bound, U)


def simulate(data: RadialInitialData, nl: PointNonlinearity, T: float, dt: float = 1e-2) -> ZetaTrajectory:
    """lambda trace plus zeta ODE on ``[0, T]`` with the energy bound attached.

    ``dt`` is refined when RK4 stability requires it: the linearised rate
    ``4 pi |F'|`` on ``[-Lambda, Lambda]`` times the step is kept below 2.
    """
    if T > data.r_max:
        raise CoverageError("T exceeds R_max")
    H0 = data.energy0(nl)
    bound = a_priori_bound(nl, H0) if math.isfinite(H0) else math.inf
    if math.isfinite(bound):
        zs = np.linspace(-bound, bound, 201)
        rate = FOUR_PI * float(np.max(np.abs(nl.F.deriv()(zs))))
        if rate * dt > 2.0:
            dt = dt / math.ceil(rate * dt / 2.0)
    n = int(round(T / dt))
    t = np.linspace(0.0, n * dt, n + 1)
    return solve_zeta(nl.F, lambda s: lambda_trace(data, s), t, data.zeta0, bound)


def _check_coverage(data, traj, r, t):
    if t > traj.t[-1] + 1e-12:
        raise CoverageError("trajectory does not reach t")
    if t + np.max(r) > data.r_max:
        raise CoverageError("t + r exceeds R_max")


def reconstruct_field(data: RadialInitialData, traj: ZetaTrajectory, r, t: float) -> np.ndarray:
    """psi(r, t) = psi_f(r, t) + theta(t-r) zeta(t-r) / (4 pi r) for ``r > 0``.

    ``psi_f`` is the free wave of the full data; its singular pieces are
    ``theta(r-t) zeta0 G`` and ``eta0 min(r, t) / (4 pi r)``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("reconstruction is defined for r > 0")
    _check_coverage(data, traj, r, t)
    psi_f, _, _ = data.free_field(r, t)
    inside = r < t
    zs = np.full_like(r, data.zeta0)
    zs[inside] = traj.zeta_at(t - r[inside])
    return psi_f + (zs + data.eta0 * np.minimum(r, t)) / (FOUR_PI * r)


def regular_part(data: RadialInitialData, traj: ZetaTrajectory, r, t: float) -> np.ndarray:
    """psi(r, t) - zeta(t) G(r); tends to F(zeta(t)) as r -> 0."""
    r = np.asarray(r, dtype=float)
    return reconstruct_field(data, traj, r, t) - traj.zeta_at(t) / (FOUR_PI * r)


def _densities(data, traj, r, t):
    psi_f, psi_ft, psi_fr = data.free_field(r, t)
    zt = float(traj.zeta_at(t))
    inside = r < t
    s = np.where(inside, t - r, 0.0)
    # zeta extended by zeta0 for negative retarded times
    zs = np.where(inside, traj.zeta_at(s), data.zeta0)
    dzs = np.where(inside, traj.zeta_at(s, 1), 0.0)
    psit = psi_ft + dzs / (FOUR_PI * r)
    # d/dr [(zeta(t-r) - zeta(t)) / (4 pi r)]
    dreg = psi_fr - dzs / (FOUR_PI * r) - (zs - zt) / (FOUR_PI * r ** 2)
    return 0.5 * (psit ** 2 + dreg ** 2) * FOUR_PI * r ** 2


def energy3d(data: RadialInitialData, traj: ZetaTrajectory, t: float, dr: float = 2.5e-3,
             r_cut: float | None = None) -> float:
    """0.5 (||psi_t||^2 + ||grad psi_reg||^2) + U(zeta(t)) by radial quadrature.

    The radial integral is split at the light cone ``r = t``.  Beyond ``r_cut``
    the regular data has left and ``grad psi_reg`` is the exact Coulomb tail of
    ``(zeta0 - zeta(t)) G``, whose energy is added in closed form.
    """
    if data.eta0 != 0.0:
        raise ValueError("energy is infinite for eta0 != 0")
    if traj.U is None:
        raise ValueError("energy needs a polynomial force (potential unknown)")
    if r_cut is None:
        live = (np.abs(data.psi0_reg) > 1e-14) | (np.abs(data.pi0_reg) > 1e-14)
        supp = data.r[live]
        r_cut = t + (supp.max() if supp.size else 0.0) + 1.0
    r_cut = max(r_cut, t + 1.0)
    # the free field is exact past R_max - r (zero extension), so only time coverage matters
    if t > traj.t[-1] + 1e-12:
        raise CoverageError("trajectory does not reach t")
    total = 0.0
    edges = [0.0, t, r_cut] if t > 0 else [0.0, r_cut]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(int(math.ceil((b - a) / dr)), 2)
        n += n % 2
        rr = np.linspace(a, b, n + 1)
        if a == 0.0:
            rr[0] = 1e-9
        total += simpson(_densities(data, traj, rr, t), x=rr)
    zt = float(traj.zeta_at(t))
    total += (zt - data.zeta0) ** 2 / (2 * FOUR_PI * r_cut)
    return float(total + traj.U(zt))

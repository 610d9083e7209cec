"""Model construction: nonlinearities, closed forms, kink and soliton profiles, boosts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as sp_integrate
from scipy.interpolate import CubicHermiteSpline

from .grid import FieldState, Grid1D, integrate

MODEL_SCHEMA = 1
FAMILIES = ("dalembert", "distributed", "lamb", "kg_point", "ginzburg_landau",
            "relativistic_nlw", "external_potential")
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PolyPotential:
    """U(psi) = sum_j coeffs[j] * |psi|^(2j) with force F = -grad U = -2 u'(|psi|^2) psi."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def ginzburg_landau(cls) -> "PolyPotential":
        # (|psi|^2 - 1)^2 / 4, zero at the vacua
        return cls((0.25, -0.5, 0.25))

    @classmethod
    def ginzburg_landau_oscillator(cls) -> "PolyPotential":
        # |psi|^4/4 - |psi|^2/2
        return cls((0.0, -0.5, 0.25))

    @classmethod
    def two_power(cls, a: float, m_exp: int, b: float, n_exp: int) -> "PolyPotential":
        # a|psi|^{2m} - b|psi|^{2n}
        c = [0.0] * (max(m_exp, n_exp) + 1)
        c[m_exp] += a
        c[n_exp] -= b
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _horner(self, c, s):
        out = np.zeros_like(s, dtype=float) + c[-1]
        for ck in c[-2::-1]:
            out = out * s + ck
        return out

    def u(self, s):
        return self._horner(self.coeffs, np.asarray(s, dtype=float))

    def du(self, s):
        d = [j * c for j, c in enumerate(self.coeffs)][1:] or [0.0]
        return self._horner(d, np.asarray(s, dtype=float))

    def U(self, psi):
        psi = np.asarray(psi)
        return self.u(np.real(psi * np.conj(psi)))

    def force(self, psi):
        psi = np.asarray(psi)
        return -2.0 * self.du(np.real(psi * np.conj(psi))) * psi

    def dforce_real(self, y):
        """dF/dy for real arguments."""
        y = np.asarray(y, dtype=float)
        d2 = [j * (j - 1) * c for j, c in enumerate(self.coeffs)][2:] or [0.0]
        return -2.0 * self.du(y * y) - 4.0 * y * y * self._horner(d2, y * y)

    @property
    def strictly_nonlinear(self) -> bool:
        return self.degree >= 2 and self.coeffs[-1] > 0

    @property
    def confining(self) -> bool:
        return self.degree >= 1 and self.coeffs[-1] > 0

    def real_zeros(self) -> np.ndarray:
        """Real zeros of F on the real line: 0 and +-sqrt(s) for u'(s) = 0, s > 0."""
        zs = [0.0]
        d = [j * c for j, c in enumerate(self.coeffs)][1:]
        if len(d) > 1:
            for r in np.roots(d[::-1]):
                if abs(r.imag) < 1e-12 and r.real > 0:
                    zs.extend([math.sqrt(r.real), -math.sqrt(r.real)])
        elif d and d[0] == 0.0:
            raise ValueError("F vanishes identically")
        return np.array(sorted(set(round(z, 14) for z in zs)))

    def check_consistency(self, samples=None, tol: float = 1e-6) -> float:
        """Max mismatch between -dU/dpsi (centered differences) and F on sample reals."""
        ys = np.linspace(-1.5, 1.5, 31) if samples is None else np.asarray(samples, float)
        h = 1e-5
        num = -(self.U(ys + h) - self.U(ys - h)) / (2 * h)
        err = float(np.max(np.abs(num - self.force(ys)) / (1.0 + np.abs(self.force(ys)))))
        if err > tol:
            raise ValueError(f"F/U inconsistency {err:.3e}")
        return err


@dataclass(frozen=True)
class ModelSpec:
    """One evolution law psi_tt = psi'' - m^2 psi + N(x, psi) - V(x) psi.

    ``placement`` says where the nonlinear force acts: nowhere (d'Alembert),
    everywhere, weighted by a bump ``chi`` or at point ``sites`` (delta terms).
    """

    family: str
    mass: float = 0.0
    field_kind: str = "real"
    potential: PolyPotential | None = None
    placement: str = "none"
    chi: dict | None = None
    sites: tuple = ()
    site_mass: float = 0.0
    external: dict | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if self.field_kind not in ("real", "complex"):
            raise ValueError("field_kind must be 'real' or 'complex'")
        if self.mass < 0:
            raise ValueError("mass must be >= 0")
        if self.placement not in ("none", "everywhere", "chi", "sites"):
            raise ValueError(f"unknown placement {self.placement!r}")
        if self.potential is not None:
            self.potential.check_consistency()

    # -- constructors -------------------------------------------------
    @classmethod
    def dalembert(cls) -> "ModelSpec":
        return cls("dalembert")

    @classmethod
    def ginzburg_landau(cls) -> "ModelSpec":
        return cls("ginzburg_landau", potential=PolyPotential.ginzburg_landau(), placement="everywhere")

    @classmethod
    def distributed(cls, potential: PolyPotential, center=0.0, radius=1.0, height=1.0,
                    mass: float = 0.0, field_kind: str = "real") -> "ModelSpec":
        return cls("distributed", mass=mass, field_kind=field_kind, potential=potential,
                   placement="chi", chi={"center": center, "radius": radius, "height": height})

    @classmethod
    def lamb(cls, site_mass: float, potential: PolyPotential) -> "ModelSpec":
        return cls("lamb", potential=potential, placement="sites", sites=(0.0,), site_mass=site_mass)

    @classmethod
    def kg_point(cls, mass: float = 1.0, sites=(0.0,), potential: PolyPotential | None = None,
                 field_kind: str = "complex") -> "ModelSpec":
        pot = potential or PolyPotential.ginzburg_landau_oscillator()
        return cls("kg_point", mass=mass, field_kind=field_kind, potential=pot, placement="sites",
                   sites=tuple(float(s) for s in sites))

    @classmethod
    def relativistic_nlw(cls, a: float, m_exp: int, b: float, n_exp: int, mass: float = 1.0,
                         field_kind: str = "complex") -> "ModelSpec":
        if not (a > 0 and b > 0 and m_exp > n_exp >= 2):
            raise ValueError("need a, b > 0 and m_exp > n_exp >= 2")
        return cls("relativistic_nlw", mass=mass, field_kind=field_kind,
                   potential=PolyPotential.two_power(a, m_exp, b, n_exp), placement="everywhere",
                   params={"a": a, "m_exp": m_exp, "b": b, "n_exp": n_exp})

    @classmethod
    def external_potential(cls, a: float, m_exp: int, b: float, n_exp: int, V: dict,
                           mass: float = 1.0, field_kind: str = "complex") -> "ModelSpec":
        base = cls.relativistic_nlw(a, m_exp, b, n_exp, mass, field_kind)
        return cls("external_potential", mass=mass, field_kind=field_kind, potential=base.potential,
                   placement="everywhere", external=dict(V), params=dict(base.params))

    # -- properties ---------------------------------------------------
    @property
    def strictly_nonlinear(self) -> bool:
        return self.potential is not None and self.potential.strictly_nonlinear

    @property
    def confining(self) -> bool:
        return self.potential is not None and self.potential.confining

    @property
    def translation_invariant(self) -> bool:
        return self.placement in ("none", "everywhere") and self.external is None

    @property
    def seminorm_variant(self) -> str:
        return "kg" if self.mass > 0 else "dalembert"

    def chi_values(self, grid: Grid1D) -> np.ndarray:
        c = self.chi or {}
        y = (grid.x - c.get("center", 0.0)) / c.get("radius", 1.0)
        out = np.zeros_like(y)
        inside = np.abs(y) < 1
        out[inside] = c.get("height", 1.0) * np.exp(1.0 - 1.0 / (1.0 - y[inside] ** 2))
        return out

    def site_indices(self, grid: Grid1D) -> np.ndarray:
        return np.array([grid.node_index(s) for s in self.sites], dtype=int)

    def external_values(self, grid: Grid1D) -> np.ndarray | None:
        return None if self.external is None else external_potential_values(self.external, grid.x)

    def nonlinear_force(self, psi):
        return self.potential.force(psi)

    def to_json(self) -> dict:
        d = {"model_schema": MODEL_SCHEMA, "family": self.family, "mass": self.mass,
             "field_kind": self.field_kind, "placement": self.placement}
        if self.potential is not None:
            d["potential"] = list(self.potential.coeffs)
        if self.chi is not None:
            d["chi"] = dict(self.chi)
        if self.sites:
            d["sites"] = list(self.sites)
        if self.site_mass:
            d["site_mass"] = self.site_mass
        if self.external is not None:
            d["external"] = dict(self.external)
        if self.params:
            d["params"] = dict(self.params)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ModelSpec":
        if d.get("model_schema", MODEL_SCHEMA) != MODEL_SCHEMA:
            raise ValueError(f"unsupported model_schema {d.get('model_schema')}")
        fam = d["family"]
        p = d.get("params", {})
        # shorthand forms
        if fam == "ginzburg_landau" and "potential" not in d:
            return cls.ginzburg_landau()
        if fam == "dalembert":
            return cls.dalembert()
        if fam in ("relativistic_nlw", "external_potential") and "potential" not in d:
            if fam == "relativistic_nlw":
                return cls.relativistic_nlw(p["a"], p["m_exp"], p["b"], p["n_exp"],
                                            d.get("mass", 1.0), d.get("field_kind", "complex"))
            return cls.external_potential(p["a"], p["m_exp"], p["b"], p["n_exp"], d["external"],
                                          d.get("mass", 1.0), d.get("field_kind", "complex"))
        pot = PolyPotential(tuple(d["potential"])) if "potential" in d else None
        return cls(fam, mass=float(d.get("mass", 0.0)), field_kind=d.get("field_kind", "real"),
                   potential=pot, placement=d.get("placement", "none"), chi=d.get("chi"),
                   sites=tuple(d.get("sites", ())), site_mass=float(d.get("site_mass", 0.0)),
                   external=d.get("external"), params=dict(p))


def _sech(y):
    e = np.exp(-np.abs(y))
    return 2 * e / (1 + e * e)


def external_potential_values(spec: dict, x) -> np.ndarray:
    """V(x) from a named description: cosine ``A cos(k x)`` or harmonic ``k x^2 / 2``."""
    x = np.asarray(x, dtype=float)
    kind = spec.get("kind", "cosine")
    if kind == "cosine":
        return spec["amplitude"] * np.cos(spec["wavenumber"] * x)
    if kind == "harmonic":
        return 0.5 * spec["stiffness"] * (x - spec.get("center", 0.0)) ** 2
    if kind == "none":
        return np.zeros_like(x)
    raise ValueError(f"unknown external potential kind {kind!r}")


def external_potential_gradient(spec: dict, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    kind = spec.get("kind", "cosine")
    if kind == "cosine":
        return -spec["amplitude"] * spec["wavenumber"] * np.sin(spec["wavenumber"] * x)
    if kind == "harmonic":
        return spec["stiffness"] * (x - spec.get("center", 0.0))
    if kind == "none":
        return np.zeros_like(x)
    raise ValueError(f"unknown external potential kind {kind!r}")


# ---------------------------------------------------------------------------
# d'Alembert and Lamb reductions

def asymptotic_constants(state: FieldState, fraction: float = 0.05) -> tuple[float, float]:
    """(C_minus, C_plus): psi averaged over the outermost ``fraction`` of nodes on each side."""
    n = max(1, int(round(fraction * state.grid.n_points)))
    psi = np.real(state.psi)
    return float(np.mean(psi[:n])), float(np.mean(psi[-n:]))


def dalembert_limits(initial: FieldState, c_minus: float | None = None,
                     c_plus: float | None = None) -> tuple[float, float]:
    """Long-time limits S_+ (t -> +inf) and S_- (t -> -inf) of the free string.

    S_pm = (C_+ + C_-)/2 +- (1/2) int pi dy.
    """
    cm, cp = asymptotic_constants(initial)
    cm = cm if c_minus is None else c_minus
    cp = cp if c_plus is None else c_plus
    half = 0.5 * float(np.real(integrate(initial.pi, initial.grid)))
    mid = 0.5 * (cp + cm)
    return mid + half, mid - half


def dalembert_solution(psi0, pi0, x, t, c_minus: float = 0.0, c_plus: float = 0.0):
    """Closed-form free string solution (psi, psi_t) at time ``t`` for callables ``psi0``, ``pi0``.

    ``pi0`` must be integrable; ``psi0`` tends to ``c_pm`` at +-infinity.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = x - t, x + t
    integral = np.array([sp_integrate.quad(pi0, a, b, limit=200, epsabs=1e-13, epsrel=1e-13)[0]
                         for a, b in zip(lo, hi)])
    psi = 0.5 * (psi0(hi) + psi0(lo)) + 0.5 * integral
    h = 1e-5
    dpsi0 = lambda s: (psi0(s + h) - psi0(s - h)) / (2 * h)  # noqa: E731
    pi = 0.5 * (dpsi0(hi) - dpsi0(lo)) + 0.5 * (pi0(hi) + pi0(lo))
    return psi, pi


def lamb_incoming_drive(psi0_prime, pi0, t) -> np.ndarray:
    """w_in'(t) = (psi0'(t) - psi0'(-t) + pi0(t) + pi0(-t)) / 2 from d'Alembert waves incoming on x = 0."""
    t = np.asarray(t, dtype=float)
    return 0.5 * (psi0_prime(t) - psi0_prime(-t) + pi0(t) + pi0(-t))


def solve_lamb_reduced(model: ModelSpec, y0: float, v0: float, w_in_dot, T: float,
                       dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrate m y'' = F(y) - 2 y' + 2 w_in'(t) (the oscillator at x = 0).

    Velocity Verlet with the damping taken at the averaged velocity of each
    half kick, which keeps the scheme second order. ``w_in_dot`` is an array
    on the time grid or a callable. Returns ``(t, y)``.
    """
    if model.family != "lamb":
        raise ValueError("solve_lamb_reduced needs a lamb model")
    m = model.site_mass
    F = model.nonlinear_force
    n = int(round(T / dt))
    t = dt * np.arange(n + 1)
    w = w_in_dot(t) if callable(w_in_dot) else np.asarray(w_in_dot, dtype=float)
    if w.shape != t.shape:
        raise ValueError("w_in_dot must be sampled on the same time grid")
    y = np.empty(n + 1)
    y[0] = y0
    v = float(v0)
    h = dt / (2 * m)
    lo, hi = 1.0 - h, 1.0 + h
    for k in range(n):
        vh = (lo * v + h * (float(F(y[k])) + 2 * w[k])) / hi
        y[k + 1] = y[k] + dt * vh
        v = (lo * vh + h * (float(F(y[k + 1])) + 2 * w[k + 1])) / hi
        if abs(y[k + 1]) > 1e6:
            raise FloatingPointError(f"reduced Lamb ODE blew up at t={t[k + 1]:.4g}")
    return t, y


# ---------------------------------------------------------------------------
# Ginzburg-Landau kinks

def kink(x, x0: float = 0.0, v: float = 0.0):
    g = 1.0 / math.sqrt(1.0 - v * v)
    return np.tanh(g * (np.asarray(x) - x0) / SQRT2)


def kink_profile(grid: Grid1D, x0: float = 0.0) -> FieldState:
    return FieldState(grid, kink(grid.x, x0), np.zeros(grid.n_points))


def kink_boost(grid: Grid1D, x0: float, v: float) -> FieldState:
    """Travelling kink S(gamma (x - x0 - v t)) at t = 0; pi = -v d/dx psi (analytic)."""
    if abs(v) >= 1:
        raise ValueError("|v| must be < 1")
    g = 1.0 / math.sqrt(1.0 - v * v)
    psi = kink(grid.x, x0, v)
    dpsi = g / SQRT2 * _sech(g * (grid.x - x0) / SQRT2) ** 2
    return FieldState(grid, psi, -v * dpsi)


def kink_internal_mode(x, x0: float = 0.0) -> np.ndarray:
    """Normalised odd shape mode of the linearised kink operator (eigenvalue 3/2)."""
    y = (np.asarray(x) - x0) / SQRT2
    return np.tanh(y) * _sech(y) * math.sqrt(3.0 / (2.0 * SQRT2))


def excited_kink(grid: Grid1D, x0: float, v: float, amplitude: float) -> FieldState:
    """Boosted kink with its internal mode excited.

    Rest frame: S(x') + a*phi(x') cos(w t'), w = sqrt(3/2); Lorentz boosted and
    sliced at t = 0. Exact only to first order in ``amplitude``.
    """
    if abs(v) >= 1:
        raise ValueError("|v| must be < 1")
    g = 1.0 / math.sqrt(1.0 - v * v)
    w2 = math.sqrt(1.5)
    x = grid.x
    xp = g * (x - x0)          # x' at t = 0
    tp = -g * v * (x - x0)     # t' at t = 0 (phase origin at the kink centre)
    y = xp / SQRT2
    S = np.tanh(y)
    dS = _sech(y) ** 2 / SQRT2
    phi = kink_internal_mode(xp)
    h = 1e-6
    dphi = (kink_internal_mode(xp + h) - kink_internal_mode(xp - h)) / (2 * h)
    psi = S + amplitude * phi * np.cos(w2 * tp)
    # d/dt: dx'/dt = -g v, dt'/dt = g
    pi = -g * v * (dS + amplitude * dphi * np.cos(w2 * tp)) - amplitude * phi * w2 * g * np.sin(w2 * tp)
    return FieldState(grid, psi, pi)


def gl_linearization_potential(grid_or_x) -> np.ndarray:
    """V(x) = 3 S(x)^2 - 3 = -3 / cosh^2(x / sqrt 2)."""
    x = grid_or_x.x if isinstance(grid_or_x, Grid1D) else np.asarray(grid_or_x, dtype=float)
    return -3.0 * _sech(x / SQRT2) ** 2


# ---------------------------------------------------------------------------
# Relativistic solitons

class NoSolitonError(ValueError):
    pass


@dataclass
class SolitonProfile:
    """Standing wave phi_omega of psi_tt = psi'' - m^2 psi + F(psi), phase e^{+i omega t}.

    Samples on ``grid`` are centred at 0. The profile is also callable at
    arbitrary positions (Hermite interpolation of the quadrature table in
    log phi, exponential tail beyond it).
    """

    omega: float
    mass: float
    potential: PolyPotential
    grid: Grid1D
    samples: np.ndarray
    amplitude: float
    decay_rate: float
    _x_levels: np.ndarray = field(repr=False, default=None)
    _interp: object = field(repr=False, default=None)

    def g(self, phi):
        """2(U_e(0) - U_e(phi)) = phi'^2 on the homoclinic orbit."""
        phi = np.asarray(phi, dtype=float)
        return self.decay_rate ** 2 * phi ** 2 + 2.0 * self.potential.u(phi ** 2)

    def __call__(self, y) -> np.ndarray:
        y = np.abs(np.asarray(y, dtype=float))
        xl = self._x_levels[-1]
        out = np.empty_like(y)
        inside = y <= xl
        out[inside] = np.exp(self._interp(y[inside]))
        tail = ~inside
        logphi_end = float(self._interp(xl))
        out[tail] = np.exp(logphi_end - self.decay_rate * (y[tail] - xl))
        return out

    def slope(self, y) -> np.ndarray:
        """phi'(y) = -sign(y) sqrt(g(phi))."""
        y = np.asarray(y, dtype=float)
        return -np.sign(y) * np.sqrt(np.maximum(self.g(self(y)), 0.0))

    def norm2(self) -> float:
        return float(integrate(self.samples ** 2, self.grid))


def _homoclinic_amplitude(kappa2: float, pot: PolyPotential) -> float:
    def g(p):
        return kappa2 * p * p + 2.0 * pot.u(p * p)

    # first sign change of g(p)/p^2 on a fine scan
    ps = np.linspace(1e-6, 10.0, 200001)
    gp = g(ps) / ps ** 2
    neg = np.nonzero(gp < 0)[0]
    if kappa2 <= 0 or len(neg) == 0:
        raise NoSolitonError("no homoclinic orbit: the effective potential never returns to its value at 0")
    j = neg[0]
    lo, hi = ps[j - 1], ps[j]
    width = hi - lo
    while hi - lo > 1e-12 * width and hi - lo > 4e-16:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    amp = 0.5 * (lo + hi)
    dg = 2 * kappa2 * amp + 4 * amp * float(pot.du(amp * amp))
    if not dg < 0:
        raise NoSolitonError("degenerate turning point (front, not soliton)")
    return amp


def soliton_profile(model: ModelSpec, omega: float, grid: Grid1D, n_levels: int = 4096) -> SolitonProfile:
    """Standing soliton by quadrature of phi'^2 / 2 = U_e(0) - U_e(phi).

    x(phi) = int_phi^{amp} ds / sqrt(g(s)) is tabulated at ``n_levels``
    uniformly spaced phi levels and inverted with cubic Hermite interpolation
    of log phi against x, using the exact slope from the first integral.
    """
    if model.potential is None or model.placement != "everywhere":
        raise ValueError("soliton_profile needs a distributed-everywhere nonlinearity")
    m = model.mass
    if not omega * omega < m * m:
        raise NoSolitonError(f"omega={omega} is outside the spectral gap (-{m}, {m})")
    pot = model.potential
    kappa2 = m * m - omega * omega
    kappa = math.sqrt(kappa2)
    amp = _homoclinic_amplitude(kappa2, pot)

    def g(p):
        return kappa2 * p * p + 2.0 * pot.u(p * p)

    levels = amp * (1.0 - np.arange(n_levels + 1) / n_levels)[:-1]   # amp .. amp/n
    # g(p) = (p - amp) q(p); deflation keeps the top-interval integrand accurate
    gpoly = np.zeros(2 * pot.degree + 1)
    for j, c in enumerate(pot.coeffs):
        gpoly[2 * j] += 2.0 * c
    gpoly[2] += kappa2
    q, _ = np.polynomial.polynomial.polydiv(gpoly, [-amp, 1.0])
    top = sp_integrate.quad(lambda s: 1.0 / math.sqrt(-np.polynomial.polynomial.polyval(s, q)),
                            levels[1], amp, weight="alg", wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-13)[0]
    inc = np.empty(n_levels - 1)
    inc[0] = top
    # Gauss-Legendre on the remaining (regular) intervals
    gx, gw = np.polynomial.legendre.leggauss(12)
    a, b = levels[2:], levels[1:-1]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * gx[None, :]
    inc[1:] = np.sum(gw[None, :] / np.sqrt(g(nodes)), axis=1) * half
    x_levels = np.concatenate([[0.0], np.cumsum(inc)])
    logphi = np.log(levels)
    dlog = -np.sqrt(np.maximum(g(levels), 0.0)) / levels
    # symmetric table through x = 0 keeps the interpolant even and smooth
    X = np.concatenate([-x_levels[:0:-1], x_levels])
    L = np.concatenate([logphi[:0:-1], logphi])
    D = np.concatenate([-dlog[:0:-1], dlog])
    interp = CubicHermiteSpline(X, L, D)
    prof = SolitonProfile(omega, m, pot, grid, np.zeros(grid.n_points), amp, kappa,
                          _x_levels=x_levels, _interp=interp)
    prof.samples = prof(grid.x)
    return prof


def soliton_boost(profile: SolitonProfile, v: float, x0: float, grid: Grid1D,
                  theta: float = 0.0) -> FieldState:
    """t = 0 slice of phi(gamma (x - v t - x0)) exp(i gamma omega (t - v (x - x0)) + i theta).

    For v = 0 this is psi = phi(x - x0), pi = i omega psi.
    """
    if abs(v) >= 1:
        raise ValueError("|v| must be < 1")
    g = 1.0 / math.sqrt(1.0 - v * v)
    w = profile.omega
    y = g * (grid.x - x0)
    phi = profile(y)
    dphi = profile.slope(y)
    phase = np.exp(1j * (theta - g * w * v * (grid.x - x0)))
    psi = phi * phase
    pi = (-g * v * dphi + 1j * g * w * phi) * phase
    return FieldState(grid, psi, pi)


def soliton_inco(profile: SolitonProfile, v0: float, q0: float, grid: Grid1D) -> FieldState:
    """psi(x,0) = phi(gamma_v0 (x - q0)), psi_t(x,0) = 0 (off the solitary manifold)."""
    g = 1.0 / math.sqrt(1.0 - v0 * v0)
    psi = profile(g * (grid.x - q0)).astype(complex)
    return FieldState(grid, psi, np.zeros(grid.n_points, dtype=complex))


def static_residual(profile: SolitonProfile) -> np.ndarray:
    """-omega^2 phi - (phi'' - m^2 phi + F(phi)) on interior samples (second differences)."""
    p = profile.samples
    dx = profile.grid.dx
    lap = (p[2:] - 2 * p[1:-1] + p[:-2]) / dx ** 2
    inner = p[1:-1]
    return -profile.omega ** 2 * inner - (lap - profile.mass ** 2 * inner + profile.potential.force(inner))


def soliton_charge(profile: SolitonProfile) -> float:
    return profile.omega * profile.norm2()


import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attractor_lab.grid import FieldState, Grid1D, charge, derivative, energy
from attractor_lab.integrator import (BlowUpError, CFLError, Observer, RunRecord, StepParams, run,
                                      step)
from attractor_lab.models import ModelSpec, PolyPotential, kink_boost, kink_profile


def _gauss(g, c=0.0, w=1.0):
    return np.exp(-((g.x - c) / w) ** 2)


def test_step_params_validation():
    with pytest.raises(ValueError):
        StepParams(0.0)
    with pytest.raises(ValueError):
        StepParams(0.01, boundary="open")
    with pytest.raises(ValueError):
        StepParams(0.01, boundary="sponge")
    with pytest.raises(CFLError):
        step(ModelSpec.dalembert(), FieldState(Grid1D(0, 1, 11), np.zeros(11), np.zeros(11)), StepParams(0.095))


def test_gl_vacuum_is_fixed_point():
    g = Grid1D.from_spacing(-5, 5, 0.05)
    s = FieldState(g, np.ones(g.n_points), np.zeros(g.n_points))
    out = step(ModelSpec.ginzburg_landau(), s, StepParams(0.01), 100)
    assert np.array_equal(out.psi, s.psi) and np.array_equal(out.pi, s.pi)
    assert out.time == pytest.approx(1.0)


def _free_pulse_error(dx):
    g = Grid1D.from_spacing(-10, 10, dx)
    f = lambda y: np.exp(-y ** 2)  # noqa: E731
    s = FieldState(g, f(g.x), 2 * g.x * f(g.x))      # right mover f(x - t): pi = -f'
    out = step(ModelSpec.dalembert(), s, StepParams(dx / 2), int(round(2 / dx)))
    e = out.psi - f(g.x - 1)
    de = derivative(e, g)
    return math.sqrt(np.sum(e ** 2 + de ** 2) * dx)


def test_free_pulse_second_order():
    e1, e2 = _free_pulse_error(0.04), _free_pulse_error(0.02)
    assert e1 < 1e-2
    assert 3.5 < e1 / e2 < 4.5


def _reversibility(model, state, params, n):
    fwd = step(model, state, params, n)
    back = step(model, fwd, params.reversed(), n)
    scale = np.max(np.abs(state.psi)) + np.max(np.abs(state.pi))
    return max(np.max(np.abs(back.psi - state.psi)), np.max(np.abs(back.pi - state.pi))) / scale


@pytest.mark.parametrize("name", ["dalembert", "gl", "kg_point", "lamb", "relativistic", "external", "distributed"])
def test_reversibility_all_models(name):
    g = Grid1D.from_spacing(-10, 10, 0.02)
    x = g.x
    models = {
        "dalembert": (ModelSpec.dalembert(), FieldState(g, _gauss(g), 0.3 * _gauss(g, 1))),
        "gl": (ModelSpec.ginzburg_landau(), kink_boost(g, 0.0, 0.4)),
        "kg_point": (ModelSpec.kg_point(1.0), FieldState(g, 0.8 * _gauss(g) * np.exp(0.2j * x), 0.5j * _gauss(g))),
        "lamb": (ModelSpec.lamb(2.0, PolyPotential((0.0, -0.5, 0.25))), FieldState(g, 0.5 * _gauss(g), 0.2 * _gauss(g))),
        "relativistic": (ModelSpec.relativistic_nlw(10, 6, 8.75, 5), FieldState(g, 0.6 * _gauss(g) + 0j, 0.4j * _gauss(g))),
        "external": (ModelSpec.external_potential(10, 6, 8.75, 5, {"kind": "cosine", "amplitude": -0.2, "wavenumber": 0.31}),
                     FieldState(g, 0.6 * _gauss(g) + 0j, 0.4j * _gauss(g))),
        "distributed": (ModelSpec.distributed(PolyPotential.ginzburg_landau_oscillator(), radius=2.0),
                        FieldState(g, 0.7 * _gauss(g), np.zeros(g.n_points))),
    }
    model, state = models[name]
    assert _reversibility(model, state, StepParams(0.01), 500) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 2 * math.pi))
def test_u1_equivariance(theta):
    g = Grid1D.from_spacing(-8, 8, 0.04)
    s = FieldState(g, 0.9 * _gauss(g) * np.exp(0.4j * g.x), 0.3j * _gauss(g, 1))
    p = StepParams(0.02)
    for model in (ModelSpec.kg_point(1.0), ModelSpec.relativistic_nlw(10, 6, 8.75, 5)):
        a = step(model, s.rotated(theta), p, 200)
        b = step(model, s, p, 200).rotated(theta)
        assert np.max(np.abs(a.psi - b.psi)) <= 1e-12 * np.max(np.abs(b.psi))
        assert np.max(np.abs(a.pi - b.pi)) <= 1e-12 * np.max(np.abs(b.pi))


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 80))
def test_translation_equivariance_periodic(k):
    g = Grid1D(-10, 10, 500, periodic=True)
    s = FieldState(g, 1 - 0.5 * _gauss(g), 0.2 * _gauss(g, 2))
    p = StepParams(0.02, boundary="periodic")
    m = ModelSpec.ginzburg_landau()
    a = step(m, s.shifted(k), p, 100)
    b = step(m, s, p, 100).shifted(k)
    assert np.max(np.abs(a.psi - b.psi)) <= 1e-13
    assert np.max(np.abs(a.pi - b.pi)) <= 1e-13


def test_run_zero_time():
    g = Grid1D.from_spacing(-5, 5, 0.1)
    s = kink_profile(g)
    rec = run(ModelSpec.ginzburg_landau(), s, 0.0, StepParams(0.05),
              [Observer("snapshot", 0.5), Observer("point", 0.05, x0=0.0), Observer("energy", 0.5)])
    assert len(rec.snapshots) == 1 and len(rec.trace("point_0")[0]) == 1
    assert np.array_equal(rec.final.psi, s.psi)


def test_point_trace_length_and_charge_conservation():
    g = Grid1D.from_spacing(-30, 30, 0.02)
    s = FieldState(g, 0.9 * _gauss(g) * np.exp(0.3j * g.x), 0.8j * _gauss(g))
    T, cad = 20.0, 0.05
    rec = run(ModelSpec.kg_point(1.0), s, T, StepParams(0.01), [Observer("point", cad, x0=0.0)])
    assert len(rec.trace("point_0")[0]) == math.ceil(T / cad) + 1
    assert charge(rec.final) == pytest.approx(charge(s), rel=1e-5)


def test_energy_drift_gl_kink():
    g = Grid1D.from_spacing(-30, 30, 0.01)
    T = 20.0
    rec = run(ModelSpec.ginzburg_landau(), kink_boost(g, 0.0, 0.5), T, StepParams(0.001),
              [Observer("energy", 0.1)])
    t, H = rec.energy
    assert np.max(np.abs(H - H[0])) / H[0] / T <= 1e-6


def test_energy_drift_oscillatory_not_accumulating():
    g = Grid1D.from_spacing(-20, 20, 0.02)
    s = FieldState(g, 0.8 * _gauss(g) + 0j, 0.7j * _gauss(g))
    rec = run(ModelSpec.relativistic_nlw(10, 6, 8.75, 5), s, 16.0, StepParams(0.01), [Observer("energy", 0.1)])
    t, H = rec.energy
    dev = np.abs(H - H[0]) / H[0]
    first, second = dev[: dev.size // 2].max(), dev[dev.size // 2:].max()
    assert second <= 2 * first + 1e-9


def test_boosted_kink_moves_at_v():
    g = Grid1D.from_spacing(-20, 80, 0.02)
    rec = run(ModelSpec.ginzburg_landau(), kink_boost(g, 0.0, 0.5), 50.0, StepParams(0.01),
              [Observer("snapshot", 50.0)])
    fin = rec.final
    i = np.nonzero(np.diff(np.sign(fin.psi)))[0][0]
    x0 = fin.grid.x[i] - fin.psi[i] * fin.grid.dx / (fin.psi[i + 1] - fin.psi[i])
    assert x0 / 50.0 == pytest.approx(0.5, rel=1e-2)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_guard():
    g = Grid1D.from_spacing(-5, 5, 0.05)
    # U = -|psi|^4 is not confining: finite-time blow-up
    m = ModelSpec("distributed", potential=PolyPotential((0.0, 0.0, -1.0)), placement="everywhere")
    with pytest.raises(BlowUpError):
        run(m, FieldState(g, 3 * _gauss(g), np.zeros(g.n_points)), 20.0, StepParams(0.01), check_every=10)


def test_sponge_flags_and_absorbs():
    g = Grid1D.from_spacing(-30, 30, 0.02)
    s = FieldState(g, _gauss(g), np.zeros(g.n_points))
    rec = run(ModelSpec.dalembert(), s, 60.0, StepParams(0.01, boundary="sponge", sponge_width=10.0))
    assert rec.energy_conserving is False
    assert energy(ModelSpec.dalembert(), rec.final).total < 1e-2 * energy(ModelSpec.dalembert(), s).total


def test_run_deterministic_and_roundtrip(tmp_path):
    g = Grid1D.from_spacing(-10, 10, 0.05)
    s = FieldState(g, 0.9 * _gauss(g) + 0j, 0.5j * _gauss(g))
    obs = [Observer("snapshot", 1.0, stride=2), Observer("point", 0.1, x0=0.0), Observer("comoving", 0.1, x0=0.0, v=0.5),
           Observer("energy", 0.5)]
    a = run(ModelSpec.kg_point(1.0), s, 5.0, StepParams(0.02), obs)
    b = run(ModelSpec.kg_point(1.0), s, 5.0, StepParams(0.02), obs)
    da, db = a.save(tmp_path / "a"), b.save(tmp_path / "b")
    for f in sorted(p.name for p in da.iterdir()):
        assert (da / f).read_bytes() == (db / f).read_bytes()
    r = RunRecord.load(da)
    assert len(r.snapshots) == 6
    assert np.array_equal(r.final.psi, a.final.psi)
    t, z = r.trace("comoving_0_0.5")
    assert np.array_equal(z, a.trace("comoving_0_0.5")[1])


def test_bad_cadence_rejected():
    g = Grid1D.from_spacing(-5, 5, 0.1)
    with pytest.raises(ValueError):
        run(ModelSpec.dalembert(), FieldState(g, _gauss(g), 0 * _gauss(g)), 1.0, StepParams(0.03),
            [Observer("point", 0.05)])

import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lorentzgeo import (
    FieldModel, FieldParams, LongitudinalState, ScalarField2D, TransverseMomenta, hamiltonian_residual,
    integrate_geodesic_affine, integrate_longitudinal, recover_transverse,
)
from lorentzgeo.dynamics import affine_initial
from lorentzgeo.exceptions import InitialConstraintViolated, ModelMismatch, NonTimelikeInitial

from oracles import lorentz_4d


def field(kind, eta, omega=1.0, delta=1.0, P=(0.0, 0.0)):
    params = FieldParams.from_eta(eta, omega, delta)
    model = FieldModel.plane_wave(params) if kind == "plane_wave" else FieldModel.standing_wave(params)
    return ScalarField2D(model, TransverseMomenta(*P))


def test_free_particle():
    f = field("standing_wave", 0.0)
    wl = integrate_longitudinal(f, LongitudinalState(1.0, 2.0, 1.0, 0.0), 7.0)
    assert np.allclose(wl.x, 2.0, atol=1e-14)
    assert np.allclose(wl.t, 1.0 + wl.tau, atol=1e-12)


def test_spatially_constant_orbit():
    f = field("standing_wave", 1.5, P=(0.4, 0.0))
    for n in (0, 1, -2):
        start = LongitudinalState.on_shell(f, 0.0, n * np.pi)
        wl = integrate_longitudinal(f, start, 20 * 2 * np.pi)
        assert np.max(np.abs(wl.x - n * np.pi)) < 1e-12


def test_residual_example_and_guard():
    f = field("standing_wave", 0.0)
    assert hamiltonian_residual(f, LongitudinalState(0, 0, 1.0, 0.0)) == 0.0
    assert hamiltonian_residual(f, LongitudinalState(0, 0, 2.0, 0.0)) == pytest.approx(-1.5)
    with pytest.raises(InitialConstraintViolated):
        integrate_longitudinal(f, LongitudinalState(0, 0, 2.0, 0.0), 1.0)


def test_output_cadence_and_monotone_tau():
    f = field("standing_wave", 0.5, omega=2.0)
    wl = integrate_longitudinal(f, LongitudinalState.on_shell(f, 0.0, 0.3), 3.3 * np.pi, samples_per_cycle=64)
    assert np.all(np.diff(wl.tau) > 0)
    assert np.allclose(np.diff(wl.tau)[:-1], np.pi / 64)
    assert wl.tau[-1] == 3.3 * np.pi


def test_recover_transverse_free_drift():
    f = field("standing_wave", 0.0, P=(0.5, 0.0))
    wl = recover_transverse(f.model, f.momenta, integrate_longitudinal(f, LongitudinalState.on_shell(f), 10.0))
    assert np.allclose(wl.y, 0.5 * wl.tau, atol=1e-13)
    assert np.all(wl.z == 0)
    f0 = field("standing_wave", 0.0)
    wl0 = recover_transverse(f0.model, f0.momenta, integrate_longitudinal(f0, LongitudinalState.on_shell(f0), 10.0))
    assert np.all(wl0.y == 0) and np.all(wl0.z == 0)


def test_recover_transverse_model_mismatch():
    f = field("standing_wave", 0.5)
    wl = integrate_longitudinal(f, LongitudinalState.on_shell(f), 1.0)
    with pytest.raises(ModelMismatch):
        recover_transverse(f.model, TransverseMomenta(0.1, 0.0), wl)
    with pytest.raises(ModelMismatch):
        recover_transverse(field("standing_wave", 0.6).model, f.momenta, wl)


@pytest.mark.parametrize("kind,eta,delta,P,x0,dx0", [
    ("plane_wave", 0.5, 0.0, (0.0, 0.0), 0.0, 0.0),
    ("plane_wave", 1.7, 0.6, (0.3, -0.2), 0.4, 0.1),
    ("standing_wave", 0.8, 1.0, (0.2, 0.1), 0.6, -0.2),
])
def test_reduced_dynamics_matches_4d_lorentz(kind, eta, delta, P, x0, dx0):
    f = field(kind, eta, 1.0, delta, P)
    start = LongitudinalState.on_shell(f, 0.0, x0, dx0)
    wl = recover_transverse(f.model, f.momenta, integrate_longitudinal(f, start, 4 * 2 * np.pi, tol=1e-12, atol=1e-14))
    ref, momenta = lorentz_4d(kind, eta, 1.0, delta, P, 0.0, x0, dx0, wl.tau)
    for got, want in zip((wl.t, wl.x, wl.y, wl.z), ref[:4]):
        assert np.max(np.abs(got - want)) < 1e-6
    # canonical momenta are conserved along the 4D orbit
    py, pz = momenta(ref)
    assert np.max(np.abs(py - P[0])) < 1e-9 and np.max(np.abs(pz - P[1])) < 1e-9


def test_affine_vacuum_straight_lines():
    f = field("standing_wave", 0.0)
    orb = integrate_geodesic_affine(f, (0.0, 1.0, 0.5, 2.0), 3.0, s_eval=np.linspace(0, 3, 7))
    assert np.allclose(orb.u, 0.5 * orb.s, atol=1e-13) and np.allclose(orb.v, 1.0 + 2.0 * orb.s, atol=1e-13)


def test_affine_node_orbit():
    f = field("standing_wave", 1.1, P=(0.3, 0.0))
    start = LongitudinalState.on_shell(f)
    orb = integrate_geodesic_affine(f, affine_initial(f, start), 20.0, s_eval=np.linspace(0, 20, 101), tol=1e-12)
    assert np.allclose(orb.u, orb.v, atol=1e-12)
    sigma = f.sigma(orb.t, 0.0)
    assert np.allclose(0.5 * (orb.du_ds + orb.dv_ds), np.exp(-sigma), rtol=1e-10)


def test_affine_plane_wave_null_momenta():
    f = field("plane_wave", 2.0, delta=0.5, P=(0.3, 0.4))
    start = LongitudinalState.on_shell(f, 0.0, 0.0, 0.2)
    orb = integrate_geodesic_affine(f, affine_initial(f, start), 30.0, s_eval=np.linspace(0, 30, 301), tol=1e-12, atol=1e-14)
    e2U = np.exp(2 * f.sigma(orb.u, 0.0))
    assert np.ptp(e2U * orb.du_ds) < 1e-8
    assert np.ptp(orb.dv_ds) < 1e-8


@pytest.mark.parametrize("kind", ["plane_wave", "standing_wave"])
def test_affine_and_proper_time_describe_same_curve(kind):
    f = field(kind, 0.9, delta=0.7, P=(0.2, 0.1))
    start = LongitudinalState.on_shell(f, 0.1, 0.3, 0.15)
    orb = integrate_geodesic_affine(f, affine_initial(f, start), 25.0, s_eval=np.linspace(0, 25, 200), tol=1e-12, atol=1e-14)
    wl = integrate_longitudinal(f, start, orb.tau[-1], tol=1e-12, atol=1e-14, tau_eval=orb.tau)
    assert np.max(np.abs(wl.t - orb.t)) < 1e-6 and np.max(np.abs(wl.x - orb.x)) < 1e-6


def test_affine_rejects_non_timelike():
    f = field("standing_wave", 0.3)
    with pytest.raises(NonTimelikeInitial):
        integrate_geodesic_affine(f, (0, 0, 1.0, -1.0), 1.0)
    with pytest.raises(NonTimelikeInitial):
        integrate_geodesic_affine(f, (0, 0, 1.0, 0.0), 1.0)


def test_world_line_csv_round_trip():
    f = field("plane_wave", 1.0, delta=0.3, P=(0.1, 0.2))
    wl = recover_transverse(f.model, f.momenta, integrate_longitudinal(f, LongitudinalState.on_shell(f), 3.0))
    buf = io.StringIO()
    wl.to_csv(buf, comments=["test"])
    text = buf.getvalue()
    assert text.splitlines()[1] == "tau,t,x,dt_dtau,dx_dtau,y,z"
    data = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", skiprows=2)
    assert np.array_equal(data, np.column_stack(list(wl.columns.values())))


@settings(max_examples=10)
@given(eta=st.floats(0.0, 3.0), p_y=st.floats(-1, 1), p_z=st.floats(-1, 1), x0=st.floats(-3, 3), dx0=st.floats(-1, 1))
def test_conservation_property(eta, p_y, p_z, x0, dx0):
    f = field("standing_wave", eta, P=(p_y, p_z))
    wl = integrate_longitudinal(f, LongitudinalState.on_shell(f, 0.0, x0, dx0), 5 * 2 * np.pi)
    assert np.max(np.abs(wl.hamiltonian_residual())) <= 100 * 1e-10
    assert np.all(wl.dt_dtau >= 1.0)


def test_chaotic_standing_wave_orbit_limits_pointwise_agreement():
    # at eta ~ 1.6 nearby orbits separate by ~e^3.5 per cycle, so two correct
    # integrators can only agree as well as a 1e-12 perturbation of the data
    eta, P, x0, dx0 = 1.6268, (0.1222, 0.4890), -0.5694, -0.2039
    f = field("standing_wave", eta, P=P)
    tau_end = 10 * 2 * np.pi
    a = integrate_longitudinal(f, LongitudinalState.on_shell(f, 0.0, x0, dx0), tau_end, tol=1e-12, atol=1e-14)
    b = integrate_longitudinal(f, LongitudinalState.on_shell(f, 0.0, x0 + 1e-12, dx0), tau_end, tol=1e-12, atol=1e-14)
    spread = np.max(np.abs(a.x - b.x))
    ref, _ = lorentz_4d("standing_wave", eta, 1.0, 1.0, P, 0.0, x0, dx0, a.tau)
    dev = np.max(np.abs(a.x - ref[1]))
    assert spread > 1e-6
    assert dev < 10 * spread
    early = a.tau <= 4 * 2 * np.pi
    assert np.max(np.abs(a.x - ref[1])[early]) < 1e-8

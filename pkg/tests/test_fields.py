import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorentzgeo import (
    FieldModel, FieldParams, ScalarField2D, TransverseMomenta, gaussian_curvature, scalar_potential, sigma_derivatives,
)
from lorentzgeo.exceptions import InvalidPolarization

from oracles import fd_derivatives, sigma_standing

etas = st.floats(0.0, 5.0)
moms = st.floats(-1.0, 1.0)
coords = st.floats(-20.0, 20.0)


def standing(eta, omega=1.0, p_y=0.0, p_z=0.0):
    return ScalarField2D(FieldModel.standing_wave(FieldParams.from_eta(eta, omega)), TransverseMomenta(p_y, p_z))


def plane(eta, delta, omega=1.0, p_y=0.0, p_z=0.0):
    return ScalarField2D(FieldModel.plane_wave(FieldParams.from_eta(eta, omega, delta)), TransverseMomenta(p_y, p_z))


def test_params_eta_and_validation():
    p = FieldParams(amplitude=3.0, omega=2.0, delta=0.5, charge_mass_ratio=-0.5)
    assert p.eta == pytest.approx(-0.75)
    assert p.optical_cycle == pytest.approx(np.pi)
    assert FieldParams.from_eta(0.7, omega=3.0).eta == pytest.approx(0.7)
    with pytest.raises(ValueError):
        FieldParams(1.0, 0.0)
    with pytest.raises(ValueError):
        FieldParams(-1.0, 1.0)
    with pytest.raises(InvalidPolarization):
        FieldModel.plane_wave(FieldParams(1.0, 1.0, delta=1.5))


def test_scalar_potential_examples():
    sw = FieldModel.standing_wave(FieldParams.from_eta(1.0))
    P0 = TransverseMomenta()
    assert scalar_potential(sw, P0, 0.0, 1.3) == 0.0
    assert scalar_potential(sw, P0, 2.0, np.pi) == pytest.approx(0.0, abs=1e-30)
    assert scalar_potential(sw, P0, np.pi / 2, np.pi / 2) == pytest.approx(0.5, abs=1e-15)
    pw = FieldModel.plane_wave(FieldParams.from_eta(0.5, delta=1.0))
    assert scalar_potential(pw, P0, 0.0, 0.0) == pytest.approx(0.125, abs=1e-15)


def test_standing_wave_on_node_orbit():
    for p_y in (0.0, 0.7):
        f = standing(0.8, omega=1.3, p_y=p_y)
        t = np.linspace(0, 10, 37)
        for n in (-2, 0, 1, 3):
            s = sigma_derivatives(f, t, n * np.pi / 1.3)
            assert np.allclose([s.t, s.x, s.tt, s.tx], 0, atol=1e-14)
            assert np.allclose(s.xx, (0.8 * 1.3 * np.sin(1.3 * t)) ** 2 / (1 + p_y**2), rtol=1e-13, atol=1e-15)


def printed_forms(eta, w, p_y, t, x):
    st_, ct, sx, cx = np.sin(w * t), np.cos(w * t), np.sin(w * x), np.cos(w * x)
    D = 1 + p_y**2 + eta**2 * st_**2 * sx**2
    a = eta**2 * w * ct * st_ * sx**2 / D
    b = eta**2 * w * st_**2 * cx * sx / D
    d = 2 * (eta * w) ** 2 * (1 + p_y**2) * ct * st_ * cx * sx / D**2
    c_printed = (eta * w) ** 2 * ((1 + p_y**2) * ct**2 * sx**2 - eta**2 * st_**2 * sx**4) / D**2
    e_printed = (eta * w) ** 2 * ((1 + p_y**2) * st_**2 * cx**2 - eta**2 * st_**4 * sx**2) / D**2
    c_fixed = (eta * w) ** 2 * ((1 + p_y**2) * (ct**2 - st_**2) * sx**2 - eta**2 * st_**2 * sx**4) / D**2
    e_fixed = (eta * w) ** 2 * ((1 + p_y**2) * st_**2 * (cx**2 - sx**2) - eta**2 * st_**4 * sx**2) / D**2
    return a, b, d, c_printed, e_printed, c_fixed, e_fixed


@given(eta=etas, w=st.floats(0.2, 3.0), p_y=moms, t=coords, x=coords)
def test_closed_form_standing_wave_derivatives(eta, w, p_y, t, x):
    s = standing(eta, w, p_y).sigma_jet(t, x)
    a, b, d, _, _, c, e = printed_forms(eta, w, p_y, t, x)
    scale = (eta * w) ** 2 + 1e-300
    for got, want in ((s.t, a), (s.x, b), (s.tx, d), (s.tt, c), (s.xx, e)):
        assert abs(got - want) <= 1e-12 * max(scale, 1.0)


def test_printed_second_derivatives_agree_on_nodes():
    t = np.linspace(0, 7, 50)
    for n in range(-2, 3):
        x = n * np.pi
        _, _, _, cp, ep, cf, ef = printed_forms(0.9, 1.0, 0.4, t, x)
        assert np.allclose(cp, cf, atol=1e-15) and np.allclose(ep, ef, atol=1e-15)


def test_sigma_fd_example_point():
    f = standing(0.5)
    s = f.sigma_jet(0.3, 0.7)
    fd = fd_derivatives(sigma_standing(0.5, 1.0, 0.0), 0.3, 0.7)
    for got, want in zip((s.t, s.x, s.tt, s.tx, s.xx), fd):
        assert abs(got - want) <= 1e-6 * abs(want)


def _fd_check(field, sigma_fn, rng, n=100):
    worst = 0.0
    for t, x in rng.uniform(-10, 10, size=(n, 2)):
        s = field.sigma_jet(t, x)
        fd = fd_derivatives(sigma_fn, t, x)
        for got, want in zip((s.t, s.x, s.tt, s.tx, s.xx), fd):
            worst = max(worst, abs(got - want) / max(abs(want), 1e-2))
    return worst


def test_sigma_fd_random_points_both_models():
    rng = np.random.default_rng(7)
    assert _fd_check(standing(0.5, 1.0, 0.3, 0.2), sigma_standing(0.5, 1.0, 0.3, 0.2), rng) < 1e-6
    f = plane(1.3, 0.4, omega=1.0, p_y=0.2, p_z=-0.5)
    assert _fd_check(f, lambda t, x: float(f.sigma(t, x)), rng) < 1e-6


def test_curvature_matches_fd_of_definition():
    f = standing(0.5)
    sig = sigma_standing(0.5, 1.0, 0.0)
    _, _, stt, _, sxx = fd_derivatives(sig, 0.3, 0.7)
    want = -np.exp(-2 * sig(0.3, 0.7)) * (sxx - stt)
    got = float(gaussian_curvature(f, 0.3, 0.7))
    assert abs(got - want) <= 1e-6 * abs(want)


@given(eta=etas, delta=st.floats(-1, 1), p_y=moms, p_z=moms, t=coords, x=coords)
def test_plane_wave_is_flat(eta, delta, p_y, p_z, t, x):
    assert abs(float(plane(eta, delta, 1.0, p_y, p_z).curvature(t, x))) < 1e-10


def test_vacuum_is_flat_and_sigma_zero():
    f = standing(0.0)
    t, x = np.meshgrid(np.linspace(-3, 3, 11), np.linspace(-3, 3, 11))
    s = f.sigma_jet(t, x)
    assert np.all(s.sigma == 0) and np.all(f.curvature(t, x) == 0)


@given(eta=etas, p_y=moms, p_z=moms, t=coords, x=coords, kind=st.sampled_from(["pw", "sw"]), delta=st.floats(-1, 1))
def test_phi_nonnegative_and_sigma_bounds(eta, p_y, p_z, t, x, kind, delta):
    f = plane(eta, delta, 1.0, p_y, p_z) if kind == "pw" else standing(eta, 1.0, p_y, p_z)
    phi = float(f.phi(t, x))
    assert phi >= 0
    assert float(f.sigma(t, x)) >= 0
    assert np.exp(2 * float(f.sigma(t, x))) >= 1


@given(eta=etas, w=st.floats(0.2, 3.0), p_y=moms, t=coords, n=st.integers(-5, 5))
def test_sigma_x_vanishes_on_all_node_orbits(eta, w, p_y, t, n):
    assert abs(float(standing(eta, w, p_y).sigma_jet(t, n * np.pi / w).x)) < 1e-12 * max(1.0, eta**2 * w)


def test_custom_model_reproduces_standing_wave():
    eta, w = 0.6, 1.4

    def zero(t, x):
        z = np.zeros(np.broadcast(t, x).shape)
        return z, z, z, z, z, z

    def az(t, x):
        st_, ct, sx, cx = np.sin(w * t), np.cos(w * t), np.sin(w * x), np.cos(w * x)
        e = eta / 1.0  # E / omega with q/m = 1 gives eta
        return e * st_ * sx, e * w * ct * sx, e * w * st_ * cx, -e * w * w * st_ * sx, e * w * w * ct * cx, -e * w * w * st_ * sx

    params = FieldParams.from_eta(eta, w)
    P = TransverseMomenta(0.3, 0.1)
    custom = ScalarField2D(FieldModel.custom(params, zero, az), P)
    ref = ScalarField2D(FieldModel.standing_wave(params), P)
    t, x = np.meshgrid(np.linspace(0, 5, 9), np.linspace(-2, 2, 7))
    for a, b in zip(custom.sigma_jet(t, x), ref.sigma_jet(t, x)):
        assert np.allclose(a, b, rtol=1e-14, atol=1e-15)
    assert np.allclose(custom.curvature(t, x), ref.curvature(t, x), atol=1e-14)


def test_scalar_fast_path_matches_vectorised():
    for f in (standing(0.7, 1.2, 0.3, -0.4), plane(2.0, 0.3, 0.8, 0.1, 0.5)):
        for t, x in ((0.3, 0.9), (-4.0, 2.2)):
            phi, pt, px = f.phi_gradient_scalar(t, x)
            jet = f.phi_jet(t, x)
            assert np.allclose([phi, pt, px], [jet[0], jet[1], jet[2]], rtol=1e-14, atol=1e-15)

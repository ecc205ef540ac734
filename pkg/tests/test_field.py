import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from stokeswave.errors import DegenerateJacobian, NotInFluid
from stokeswave.field import (
    ConformalPoint,
    PhysicalPoint,
    check_governing_equations,
    conformal_map,
    evaluate,
    field_dump,
    invert_map,
    invert_points,
    map_point,
    min_speed_gap,
    pressure,
    streamline,
    surface_elevation,
    surface_profile,
    velocity,
)
from stokeswave.functionals import mu_s
from stokeswave.solver import StokesWave

G = 9.8


def test_flat_map_is_linear(flat_c2):
    assert flat_c2.c == pytest.approx(2.0, rel=1e-15)
    pt = map_point(flat_c2, ConformalPoint(0.0, flat_c2.c))
    assert pt.x == pytest.approx(0.0, abs=1e-15) and pt.y == pytest.approx(-1.0, rel=1e-15)


def test_flat_inverse(flat_c2):
    c, cl = flat_c2.c, flat_c2.period_q
    w = invert_map(flat_c2, PhysicalPoint(1.0, -2.0))
    assert w.p == pytest.approx(4.0, rel=1e-14)
    assert w.q == pytest.approx((-c * 1.0) % cl, rel=1e-14)


def test_flat_velocity(flat):
    for q, p in [(0.0, 0.0), (3.3, 1.0), (17.0, 100.0)]:
        s = velocity(flat, ConformalPoint(q, p))
        assert s.u == 0.0 and s.v == 0.0 and s.E0 == 0.0
        assert s.E == pytest.approx(0.5 * flat.c**2, rel=1e-15)


@settings(derandomize=True, max_examples=50, deadline=None)
@given(q=st.floats(-200, 200), p=st.floats(0, 60))
def test_map_periodicity(wave, q, p):
    a = conformal_map(wave, q, p)
    b = conformal_map(wave, q + wave.period_q, p)
    assert abs((b - a).real + wave.wavelength) <= 1e-12 * (1 + abs(q) / wave.c)
    assert abs((b - a).imag) <= 1e-13


def test_crest_height_is_coefficient_sum(wave):
    pt = map_point(wave, ConformalPoint(0.0, 0.0))
    assert pt.x == 0.0
    assert pt.y == pytest.approx(wave.b.sum(), rel=1e-15)


@pytest.mark.parametrize("p", [0.0, 0.3, 2.0, 10.0])
def test_no_vertical_velocity_under_crest_and_trough(wave, p):
    for q in (0.0, 0.5 * wave.period_q):
        assert abs(velocity(wave, ConformalPoint(q, p)).v) <= 1e-13 * wave.c


def test_rest_at_depth(wave):
    s = velocity(wave, ConformalPoint(0.0, 5 * wave.period_q))
    assert math.hypot(s.u, s.v) <= 1e-6 * wave.c
    assert s.E == pytest.approx(0.5 * wave.c**2, rel=1e-12)


@settings(derandomize=True, max_examples=40, deadline=None)
@given(q=st.floats(0, 1), p=st.floats(0, 3))
def test_symmetry_about_crest(wave, q, p):
    q, p = q * wave.period_q, p * wave.period_q
    a = velocity(wave, ConformalPoint(q, p))
    b = velocity(wave, ConformalPoint(-q, p))
    assert abs(a.u - b.u) <= 1e-12 * wave.c
    assert abs(a.v + b.v) <= 1e-12 * wave.c


@pytest.mark.parametrize("frac", [0.0, 0.01, 0.05, 0.2, 1.0])
def test_vertical_velocity_sign_pattern(wave, frac):
    p = frac * wave.period_q
    q = np.linspace(0, wave.period_q, 201)[1:-1]
    f = evaluate(wave, q, np.full_like(q, p))
    x = f.z.real
    # x decreases with q; wrap into (-lambda/2, lambda/2]
    x_wrapped = np.where(x < -wave.wavelength / 2, x + wave.wavelength, x)
    left = x_wrapped < 0
    right = x_wrapped > 0
    assert np.all(f.v[left] <= 1e-14) and np.all(f.v[right] >= -1e-14)


def test_round_trip(wave):
    rng = np.random.default_rng(1)
    q = rng.uniform(0, wave.period_q, 100)
    p = rng.uniform(0, 2 * wave.period_q, 100)
    for qi, pi in zip(q, p):
        back = invert_map(wave, map_point(wave, ConformalPoint(qi, pi)))
        assert abs(back.q - qi) <= 1e-10 * wave.period_q or abs(abs(back.q - qi) - wave.period_q) <= 1e-10 * wave.period_q
        assert abs(back.p - pi) <= 1e-10 * wave.period_q


def test_inverse_residual(wave):
    x, y = np.array([0.3, -4.9, 2.0]), np.array([-0.1, -0.3, -7.0])
    w = invert_points(wave, x, y)
    z = conformal_map(wave, w.real, w.imag)
    assert np.max(np.abs(z - (x + 1j * y))) <= 1e-12 * wave.wavelength
    assert np.all(w.imag >= 0)


def test_point_above_surface(wave):
    crest = map_point(wave, ConformalPoint(0.0, 0.0)).y
    with pytest.raises(NotInFluid):
        invert_map(wave, PhysicalPoint(0.0, crest + 0.1))


def test_surface_point_inverts(wave):
    pt = map_point(wave, ConformalPoint(0.37 * wave.period_q, 0.0))
    back = invert_map(wave, pt)
    assert back.p == pytest.approx(0.0, abs=1e-12 * wave.period_q)


def test_surface_profile(flat, wave):
    assert all(pt.y == 0.0 for pt in surface_profile(flat, 16))
    two = surface_profile(wave, 2)
    assert len(two) == 2 and two[0].x == 0.0
    assert two[1].x == pytest.approx(-wave.wavelength / 2, rel=1e-14)


def test_streamline_at_zero_is_surface(wave):
    assert streamline(wave, 0.0, 32) == surface_profile(wave, 32)


def test_flat_streamline_is_level(flat):
    ys = [pt.y for pt in streamline(flat, flat.c, 16)]
    assert np.allclose(ys, -1.0, rtol=0, atol=1e-15)


def test_streamline_amplitude_decays(wave):
    def amp(p):
        ys = [pt.y for pt in streamline(wave, p, 128)]
        return max(ys) - min(ys)
    assert amp(1.0) < amp(0.0)
    assert amp(10.0) < amp(1.0)


@pytest.mark.parametrize("p", [0.0, 0.5, 5.0])
def test_streamline_monotone_either_side_of_crest(wave, p):
    pts = streamline(wave, p, 256)
    # crest first; q increasing moves x from 0 towards -lambda/2
    first_half = [pt.y for pt in pts[:129]]
    assert all(b <= a + 1e-14 for a, b in zip(first_half, first_half[1:]))


def test_pressure(flat, wave):
    assert pressure(flat, ConformalPoint(0.0, 2 * flat.c)) == pytest.approx(2 * G, rel=1e-14)
    for q in np.linspace(0, wave.period_q, 7):
        assert abs(pressure(wave, ConformalPoint(q, 0.0))) <= max(wave.residual_norm, 1e-15) * G * wave.wavelength * 10


def test_deep_pressure_offset(wave):
    # B - E - g y -> B - c^2/2 at depth, which equals g times the x-mean of eta
    p = 5 * wave.period_q
    z = complex(conformal_map(wave, 0.0, p))
    offset = pressure(wave, ConformalPoint(0.0, p)) + G * z.imag
    x = -wave.wavelength / 2 + (np.arange(4096) + 0.5) * wave.wavelength / 4096
    mean_eta = surface_elevation(wave, x).mean()
    assert offset == pytest.approx(wave.B - 0.5 * wave.c**2, rel=1e-10)
    assert offset == pytest.approx(G * mean_eta, rel=1e-9)


def test_governing_equations_flat(flat):
    r = check_governing_equations(flat)
    assert r.bernoulli == 0 and r.irrotationality == 0 and r.incompressibility == 0
    assert r.kinematic == 0 and r.deep_speed == 0
    assert r.max_u_minus_c < 0


def test_governing_equations(wave):
    r = check_governing_equations(wave)
    assert r.bernoulli <= 1e-12
    assert r.irrotationality <= 1e-6 and r.incompressibility <= 1e-6
    assert r.kinematic <= 1e-8
    assert r.max_u_minus_c < 0
    assert r.deep_speed <= 1e-6
    assert r.min_E >= 0.5 * r.delta0**2 * (1 - 1e-12)
    assert set(r.as_dict()) >= {"bernoulli", "kinematic", "delta0"}


def test_min_speed_gap_positive(wave):
    assert min_speed_gap(wave) > 0


def test_degenerate_jacobian():
    lam = 10.0
    c = math.sqrt(G * lam / (2 * math.pi))
    kappa = 2 * math.pi / lam
    w = StokesWave(lam, 2 / kappa, G, c, 0.5 * c * c, (1 / kappa,), 0.0)
    with pytest.raises(DegenerateJacobian):
        velocity(w, ConformalPoint(0.5 * w.period_q, 0.0))


def test_field_dump_columns(wave):
    d = field_dump(wave, 8, 4)
    assert list(d) == ["x", "y", "q", "p", "u", "v", "E", "E0", "P"]
    assert all(len(v) == 32 for v in d.values())


@pytest.mark.parametrize("s", [-1.0, 0.5, 2.0])
def test_mu_s_against_adaptive_quadrature(wave, s):
    p = 0.05 * wave.period_q
    f = lambda q: float(evaluate(wave, q, p, need_z=False).E) ** s
    ref, _ = quad(f, 0, wave.period_q, epsabs=0, epsrel=1e-13, limit=200)
    assert mu_s(wave, s, p) == pytest.approx(ref / wave.period_q, rel=1e-11)

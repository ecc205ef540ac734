import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokeswave.errors import NoConvergence
from stokeswave.field import surface_elevation, surface_profile
from stokeswave.solver import (
    StokesWave,
    WaveParameters,
    _galerkin_projector,
    _residual_and_jacobian,
    _theta,
    bernoulli_residual,
    continuation_sweep,
    linear_phase_speed,
    linear_wave,
    load_wave,
    residual_norm,
    save_wave,
    solve_stokes_wave,
)

LAM, G = 10.0, 9.8
C0 = math.sqrt(G * LAM / (2 * math.pi))


def test_parameters_validate():
    with pytest.raises(ValueError):
        WaveParameters(-1.0, 0.1)
    with pytest.raises(ValueError):
        WaveParameters(10.0, -0.1)
    with pytest.raises(ValueError):
        WaveParameters(10.0, 0.1, modes=0)
    with pytest.raises(ValueError):
        WaveParameters(10.0, 0.1, newton_tol=0.0)


def test_flat_water_is_exact(flat):
    assert np.all(flat.b == 0)
    assert flat.c == pytest.approx(C0, rel=1e-15)
    assert flat.B == 0.5 * flat.c**2
    assert flat.iterations == 0
    assert flat.residual_norm == 0.0
    assert np.all(bernoulli_residual(flat, 256) == 0)


def test_flat_speed_value():
    assert C0 == pytest.approx(3.94933, abs=1e-5)


def test_linear_wave_fixture():
    w = linear_wave(WaveParameters(LAM, 0.05))
    assert w.b[0] == 0.025 and np.all(w.b[1:] == 0)
    assert w.c == C0
    assert w.B == 0.5 * w.c**2
    # residual is reported honestly: second order in steepness, not forced to zero
    assert 1e-6 < w.residual_norm < 1e-2


def test_dispersion_identity_unit_speed():
    lam = 2 * math.pi / G
    assert linear_phase_speed(lam, G) == pytest.approx(1.0, rel=1e-15)
    assert linear_wave(WaveParameters(lam, 0.0)).c == pytest.approx(1.0, rel=1e-15)


def test_small_wave_near_linear(small_wave):
    assert abs(small_wave.b[0] - 0.05) <= 0.01 * 0.1
    assert abs(small_wave.c - C0) <= 2 * (2 * math.pi * 0.1 / LAM) ** 2 * C0
    assert small_wave.residual_norm <= 1e-12


def _third_order_speed(H):
    # weakly nonlinear deep-water dispersion c = c0 (1 + (kappa a)^2 / 2), a = H/2
    return C0 * (1 + 0.5 * (math.pi * H / LAM) ** 2)


@pytest.mark.parametrize("H, rel", [(0.1, 1e-6), (0.5, 3e-4)])
def test_speed_matches_weakly_nonlinear_theory(H, rel):
    w = solve_stokes_wave(WaveParameters(LAM, H, modes=64))
    assert w.c == pytest.approx(_third_order_speed(H), rel=rel)


def test_main_wave_converged(wave):
    assert wave.residual_norm <= 1e-12
    assert residual_norm(wave, 256) <= 1e-12
    assert wave.c > 0
    assert wave.k == 2 * math.pi / (wave.c * wave.wavelength)
    assert abs(wave.b[-1]) <= abs(wave.b[0])


def test_refinement_is_stable(wave):
    fine = solve_stokes_wave(WaveParameters(LAM, 0.5, modes=96))
    assert abs(fine.c / wave.c - 1) <= 1e-10


@pytest.mark.parametrize("H", [0.1, 0.3, 0.5])
def test_doubling_modes_changes_little(H):
    a = solve_stokes_wave(WaveParameters(LAM, H, modes=32))
    b = solve_stokes_wave(WaveParameters(LAM, H, modes=64))
    for x, y in [(a.c, b.c), (a.B, b.B), (a.b[0], b.b[0])]:
        assert abs(x / y - 1) <= 1e-9


def test_height_constraint(wave):
    pts = surface_profile(wave, 2)
    assert pts[0].y - pts[1].y == pytest.approx(0.5, abs=1e-12)
    ys = [pt.y for pt in surface_profile(wave, 512)]
    assert max(ys) - min(ys) == pytest.approx(0.5, abs=1e-10)
    assert pts[0].y == pytest.approx(wave.b.sum(), abs=1e-15)


def test_surface_is_symmetric(wave):
    x = np.linspace(0, LAM / 2, 41)
    assert np.max(np.abs(surface_elevation(wave, x) - surface_elevation(wave, -x))) < 1e-12


def test_surface_x_mean(wave):
    # y has zero mean in q; weighting by dx/dq gives the x-mean kappa/2 sum n b_n^2
    x = -LAM / 2 + (np.arange(2048) + 0.5) * LAM / 2048
    mean = surface_elevation(wave, x).mean()
    n = np.arange(1, wave.modes + 1)
    assert mean == pytest.approx(0.5 * wave.kappa * np.sum(n * wave.b**2), rel=1e-9)


def test_perturbed_coefficients_give_residual(wave):
    b = wave.b.copy()
    b[0] += 1e-3
    bad = StokesWave(wave.wavelength, wave.wave_height, wave.gravity, wave.c, wave.B, tuple(b), 0.0)
    assert np.max(np.abs(bernoulli_residual(bad, 256))) / (G * LAM) > 1e-6


def test_residual_samples_precondition(wave):
    with pytest.raises(ValueError):
        bernoulli_residual(wave, wave.modes)


def test_jacobian_matches_finite_differences(wave):
    theta = _theta(4 * 16)
    b = wave.b[:16].copy()
    c, B = wave.c, wave.B
    R, J = _residual_and_jacobian(b, c, B, wave.kappa, G, theta)
    x = np.concatenate([b, [c, B]])
    h = 1e-7
    for j in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        Rp, _ = _residual_and_jacobian(xp[:16], xp[16], xp[17], wave.kappa, G, theta, False)
        Rm, _ = _residual_and_jacobian(xm[:16], xm[16], xm[17], wave.kappa, G, theta, False)
        fd = (Rp - Rm) / (2 * h)
        assert np.max(np.abs(fd - J[:, j])) <= 1e-6 * max(1.0, np.max(np.abs(J[:, j])))


def test_galerkin_projector_recovers_cosines():
    theta = _theta(32)
    P = _galerkin_projector(8, theta)
    f = 3.0 + 2.0 * np.cos(theta) - 0.5 * np.cos(5 * theta)
    coef = P @ f
    expect = np.zeros(9)
    expect[[0, 1, 5]] = [3.0, 2.0, -0.5]
    assert np.allclose(coef, expect, atol=1e-14)


def test_steepness_cap():
    with pytest.raises(NoConvergence, match="continuation"):
        solve_stokes_wave(WaveParameters(LAM, 3.0))


def test_too_steep_for_modes_fails_fast():
    with pytest.raises(NoConvergence):
        solve_stokes_wave(WaveParameters(LAM, 1.3, modes=64, steepness_cap=0.2))


def test_json_round_trip_is_bit_exact(wave, tmp_path):
    path = save_wave(wave, tmp_path / "w.json")
    back = load_wave(path)
    assert back == wave
    assert back.to_json() == wave.to_json()
    keys = set(json.loads(path.read_text()))
    assert keys == {"lambda", "wave_height", "gravity", "c", "B", "k", "coefficients",
                    "residual_norm", "steepness", "modes"}


def test_wave_id_is_stable(wave):
    assert wave.wave_id == StokesWave.from_dict(wave.to_dict()).wave_id
    assert len(wave.wave_id) == 12


def test_continuation_single_step_equals_direct(small_wave64):
    (w,) = continuation_sweep(WaveParameters(LAM, 0.1, modes=64), [0.1])
    assert np.max(np.abs(w.b - small_wave64.b)) <= 1e-12
    assert w.c == pytest.approx(small_wave64.c, rel=1e-12)


def test_continuation_speed_increases():
    waves = continuation_sweep(WaveParameters(LAM, 0.2, modes=64), [0.2, 0.4, 0.6, 0.8])
    cs = [w.c for w in waves]
    assert len(waves) == 4
    assert all(b > a for a, b in zip(cs, cs[1:]))


def test_continuation_rejects_bad_heights():
    with pytest.raises(ValueError):
        continuation_sweep(WaveParameters(LAM, 0.8), [0.8, 0.4])


def test_continuation_reports_failure():
    with pytest.raises(NoConvergence) as info:
        continuation_sweep(WaveParameters(LAM, 0.5, modes=64), [0.5, 0.8, 1.0])
    err = info.value
    assert err.height == 1.0
    assert err.last_good is not None and err.last_good.wave_height == 0.8
    assert len(err.waves) == 2


@settings(derandomize=True, max_examples=15, deadline=None)
@given(st.floats(0.0, 0.06))
def test_solver_converges_over_steepness_range(steep):
    w = solve_stokes_wave(WaveParameters(LAM, steep * LAM, modes=32))
    assert w.residual_norm <= 1e-12
    # c is weakly determined as H -> 0 (its coupling is O(H^2))
    assert w.c >= C0 * (1 - 1e-9)
    if steep > 0:
        assert w.b[0] > 0

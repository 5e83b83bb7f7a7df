# -*- coding: utf-8 -*-
"""

unit tests for the airsec channel, beamforming, bound and planner modules

"""

import math

import numpy as np
import pytest
import scipy.linalg

from airsec.beamform import (effective_row, max_eigvec_hermitian, mrt_weights,
                             phase_normalise, quadratic_form,
                             rank1_phase_vector, reflection_phases,
                             scheme2_directions, scheme2_objective,
                             scheme2_rank1_directions, secrecy_rate, snr,
                             weights_scheme1, weights_scheme2)
from airsec.bounds import (array_factor, chi_bob, snr_upper_bound,
                           zeta_and_chi_eve)
from airsec.channel import (FadingDraw, build_irs_ground, build_sensor_irs,
                            bulk_phase, draw_fading, element_response_phase,
                            path_gain)
from airsec.config import parse_config
from airsec.errors import (DegenerateDirection, DimensionError, EmptyField,
                           Infeasible, ShapeError, Singularity, ZeroChannel)
from airsec.geometry import (FlightPlan, IrsGrid, Vec3, irs_element_positions,
                             lemma1_limits, place_sensors, plate_extent,
                             unit_vector)
from airsec.trajectory import (CubicCoeffs, Ring, candidate_ring,
                               choose_step, companion_roots,
                               cubic_coefficients, find_hover_site,
                               next_position, plan_trajectory, site_lattice,
                               solve_epsilon)

C = 3e8
F = 900e6
LAM = C / F

cfg = parse_config()  # reference scenario
omega_a = cfg.omega_a
omega_b = cfg.omega_b
q_o = cfg.flight_plan.start_position


# helper functions


def grid(kx=4, ky=4, spacing=0.25):
    return IrsGrid.from_spacing(kx, ky, spacing, F, C)


def flat(values):
    """Planner objective that ranks every candidate equal"""
    return np.zeros(len(values))


def random_hermitian(rng, m):
    x = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return (x + x.conj().T) / 2


""" BEGIN TESTS """


def test_unit_vector():
    """Directions between nodes"""
    assert unit_vector([0, 0, 0], [0, 0, 100]) == Vec3(0.0, 0.0, 1.0)
    u = unit_vector([0, -100, 0], [-100, 100, 100])
    assert np.allclose(u.as_array(), [-0.40825, 0.81650, 0.40825],
                       atol=1e-5)
    rng = np.random.default_rng(4)
    for _ in range(20):
        a, b = rng.normal(scale=100, size=(2, 3))
        assert unit_vector(a, b) == -unit_vector(b, a)
    with pytest.raises(DegenerateDirection):
        unit_vector([1, 2, 3], [1, 2, 3])


def test_vec3_rejects_nonfinite():
    with pytest.raises(ValueError):
        Vec3(0.0, math.nan, 1.0)


def test_place_sensors():
    """Sensor fields: degenerate, reproducible and inside the disk"""
    field = place_sensors(omega_a, 0, 4, 11)
    assert field.count == 4
    assert all(p == omega_a for p in field.points)
    f1 = place_sensors(omega_a, 1, 4, 7)
    f2 = place_sensors(omega_a, 1, 4, 7)
    assert np.array_equal(f1.positions, f2.positions)
    big = place_sensors(omega_a, 10, 1000, 3)
    dist = np.linalg.norm(big.positions - omega_a.as_array(), axis=1)
    assert dist.max() <= 10
    assert np.all(big.positions[:, 2] == 0)
    with pytest.raises(EmptyField):
        place_sensors(omega_a, 1, 0, 1)
    with pytest.raises(ValueError):
        place_sensors(omega_a, -1, 4, 1)


def test_sensor_field_centered():
    """Uniform disk draws average to the field center"""
    field = place_sensors(omega_a, 10, 100000, 9)
    mean = field.positions.mean(axis=0)
    assert np.linalg.norm(mean - omega_a.as_array()) < 0.2


def test_sensor_radius_scales_field():
    """Same seed, different radius: same pattern, scaled"""
    f1 = place_sensors(omega_a, 1, 4, 5)
    f10 = place_sensors(omega_a, 10, 4, 5)
    center = omega_a.as_array()
    assert np.allclose(f10.positions - center, 10 * (f1.positions - center))


def test_irs_element_positions():
    q = Vec3(0.0, 0.0, 100.0)
    assert irs_element_positions(q, grid(1, 1)) == [q]
    pos = irs_element_positions(q, grid(2, 1))
    assert np.allclose(pos[1].as_array(), [LAM / 4, 0, 100])
    pos = irs_element_positions(q, grid(4, 4))
    arr = np.array([p.as_array() for p in pos])
    assert len(pos) == 16
    assert np.allclose(arr.max(axis=0) - arr.min(axis=0),
                       [3 * LAM / 4, 3 * LAM / 4, 0])


def test_grid_spacing_limit():
    with pytest.raises(ValueError):
        grid(spacing=0.5)
    with pytest.raises(ValueError):
        IrsGrid(0, 4, 0.05, 0.05, LAM, F)


def test_lemma1_limits():
    """Plate size limits for a few spacings"""
    assert lemma1_limits(grid(4, 4)) == (4, 4, True)
    assert lemma1_limits(grid(1, 1, spacing=0.125)).kx_max == 8
    assert not lemma1_limits(grid(6, 4)).feasible
    for kx in range(1, 5):
        g = grid(kx, kx)
        assert g.dx * g.kx <= LAM + 1e-12
    ext = plate_extent(grid(4, 4))
    assert ext.width_wavelengths == pytest.approx(1.0)
    assert ext.area_wavelengths2 == pytest.approx(1.0)


def test_flight_plan():
    plan = FlightPlan(300.0, 600, 0.5, 3.0, 100.0, Vec3(-100, 100, 0))
    assert plan.step_limit == pytest.approx(1.5)
    assert plan.start_position == Vec3(-100.0, 100.0, 100.0)
    with pytest.raises(ValueError):
        FlightPlan(300.25, 600, 0.5, 3.0, 100.0, Vec3(0, 0, 0))


def test_path_gain_and_phase():
    a = np.zeros(3)
    assert path_gain(1, 1, a, [1, 0, 0]) == pytest.approx(1)
    assert path_gain(1, 1, a, [0, 2, 0]) == pytest.approx(0.25)
    with pytest.raises(Singularity):
        path_gain(1, 1, a, a)
    assert bulk_phase(a, [LAM, 0, 0], LAM) == pytest.approx(2 * np.pi)
    assert bulk_phase(a, [LAM / 2, 0, 0], LAM) == pytest.approx(np.pi)
    assert bulk_phase(a, [1, 0, 0], LAM) == pytest.approx(6 * np.pi)


def test_element_response_phase():
    g = grid(4, 4)
    assert element_response_phase(1, 1, g, [0.3, 0.4, -0.866]) == 0
    assert element_response_phase(2, 1, g, [1, 0, 0]) == pytest.approx(
        np.pi / 2)
    assert element_response_phase(3, 2, g, [0.6, 0.8, 0]) == pytest.approx(
        2 * np.pi / 2 * 0.6 + np.pi / 2 * 0.8)
    with pytest.raises(IndexError):
        element_response_phase(5, 1, g, [1, 0, 0])


def test_draw_fading():
    """Unit-mean draws, reproducible, prefix-stable and shareable"""
    d1 = draw_fading(np.random.SeedSequence(4), 1.0, 2000)
    d2 = draw_fading(np.random.SeedSequence(4), 1.0, 2000)
    short = draw_fading(np.random.SeedSequence(4), 1.0, 10)
    assert np.array_equal(d1.varsigma_b, d2.varsigma_b)
    assert np.array_equal(short.varsigma_g, d1.varsigma_g[:10])
    assert abs(np.mean(d1.varsigma_e) - 1) < 0.1
    shared = draw_fading(np.random.SeedSequence(4), 1.0, 10,
                         share_bob_eve=True)
    assert np.array_equal(shared.varsigma_b, shared.varsigma_e)
    with pytest.raises(ValueError):
        FadingDraw(1.0, 0.0, 1.0, 1.0)


def test_build_sensor_irs():
    """Rank of PhiG, single-element collapse and equal magnitudes"""
    fading = FadingDraw.mean(cfg.rho0)
    field = place_sensors(omega_a, 0, 2, 1)
    ch = build_sensor_irs(field, q_o, grid(), fading)
    assert ch.g.shape == (16, 2)
    assert np.array_equal(ch.phi_g[:, 0], ch.phi_g[:, 1])
    assert np.linalg.matrix_rank(ch.phi_g) <= 1
    one = place_sensors(omega_a, 0, 1, 1)
    ch1 = build_sensor_irs(one, q_o, grid(1, 1), fading)
    d = np.linalg.norm(q_o.as_array() - omega_a.as_array())
    expected = np.sqrt(cfg.rho0 / d ** 2) * np.exp(-2j * np.pi * d / LAM)
    assert ch1.g[0, 0] == pytest.approx(expected, rel=1e-9)
    field = place_sensors(omega_a, 1, 4, 9)
    ch = build_sensor_irs(field, q_o, grid(), fading)
    mag = np.abs(ch.g)
    assert np.all(np.abs(mag - mag[0]) <= 1e-12 * mag[0])


def test_fading_scales_magnitudes_only():
    field = place_sensors(omega_a, 1, 4, 9)
    ch1 = build_sensor_irs(field, q_o, grid(), FadingDraw(1.0, 1.0, 1.0, 1e6))
    ch4 = build_sensor_irs(field, q_o, grid(), FadingDraw(4.0, 1.0, 1.0, 1e6))
    assert np.allclose(np.abs(ch4.g), 2 * np.abs(ch1.g))
    assert np.allclose(ch4.g / np.abs(ch4.g), ch1.g / np.abs(ch1.g))


def test_build_irs_ground():
    h1 = build_irs_ground(q_o, omega_b, grid(1, 1), cfg.rho0, 1.0)
    # 180^2 + 0^2 + 100^2
    d = math.sqrt(42400)
    assert h1.gain == pytest.approx(cfg.rho0 / 42400)
    assert h1.h[0] == pytest.approx(np.sqrt(cfg.rho0) / d
                                    * np.exp(-2j * np.pi * d / LAM))
    hb = build_irs_ground(q_o, omega_b, grid(), cfg.rho0, 1.0)
    assert hb.u[0] == 0
    # a batch of UAV positions
    pts = np.array([[0, 0, 100], [10, 20, 100], [-50, 5, 100]])
    batch = build_irs_ground(pts, omega_b, grid(), cfg.rho0, 1.0)
    assert batch.h.shape == (3, 16)
    single = build_irs_ground(pts[1], omega_b, grid(), cfg.rho0, 1.0)
    assert np.allclose(batch.h[1], single.h)


def test_rank1_phase_vector():
    col = np.linspace(0, 3, 16)
    assert np.allclose(rank1_phase_vector(np.tile(col[:, None], (1, 4))), col)
    assert np.allclose(rank1_phase_vector(np.zeros((16, 4))), 0)
    field = place_sensors(omega_a, 10, 4, 2)
    phi = build_sensor_irs(field, q_o, grid(),
                           FadingDraw.mean(cfg.rho0)).phi_g
    u_g = rank1_phase_vector(phi)
    resid = np.linalg.norm(phi - u_g[:, None])
    for m in range(4):
        assert resid <= np.linalg.norm(phi - phi[:, m:m + 1]) + 1e-12
    with pytest.raises(DimensionError):
        rank1_phase_vector(np.zeros(4))


def test_reflection_phases():
    refl = reflection_phases(np.zeros(3), np.zeros(3), 0.0)
    assert np.array_equal(refl.theta, np.zeros(3))
    refl = reflection_phases([0, np.pi], [0, np.pi])
    assert np.allclose(refl.theta, 0)
    with pytest.raises(DimensionError):
        reflection_phases(np.zeros(3), np.zeros(4))


def test_cophasing_zero_radius():
    """r=0: Bob's per-sensor channel is coherent and beats random phases"""
    field = place_sensors(omega_a, 0, 4, 1)
    fading = FadingDraw.mean(cfg.rho0)
    g = grid()
    ch = build_sensor_irs(field, q_o, g, fading)
    hb = build_irs_ground(q_o, omega_b, g, cfg.rho0, 1.0)
    refl = reflection_phases(hb.u, rank1_phase_vector(ch.phi_g))
    row = effective_row(hb.h, refl, ch.g)
    expected = g.k * np.sqrt(hb.gain * ch.gains)
    assert np.allclose(np.abs(row), expected, rtol=1e-9)
    assert np.allclose(np.angle(row * np.conj(row[0])), 0, atol=1e-9)
    w = mrt_weights(row, cfg.power)
    best = abs(row @ w)
    rng = np.random.default_rng(0)
    for _ in range(200):
        other = effective_row(hb.h, rng.uniform(0, 2 * np.pi, g.k), ch.g)
        assert abs(other @ w) <= best * (1 + 1e-12)


def test_effective_row_dimensions():
    with pytest.raises(DimensionError):
        effective_row(np.ones(3), np.zeros(3), np.ones((4, 2)))


def test_max_eigvec_hermitian():
    val, vec = max_eigvec_hermitian(np.diag([2.0, 1.0]))
    assert val == pytest.approx(2)
    assert np.allclose(vec, [1, 0])
    val, vec = max_eigvec_hermitian([[2, 1], [1, 2]])
    assert val == pytest.approx(3)
    assert np.allclose(np.abs(vec), [1 / np.sqrt(2)] * 2)
    assert np.allclose(vec[0] * np.conj(vec[1]), 0.5)
    rng = np.random.default_rng(1)
    for _ in range(50):
        mat = random_hermitian(rng, 3)
        val, vec = max_eigvec_hermitian(mat)
        assert val == pytest.approx(np.linalg.eigvalsh(mat)[-1], abs=1e-8)
        assert np.allclose(mat @ vec, val * vec, atol=1e-8)
        assert np.linalg.norm(vec) == pytest.approx(1)
    with pytest.raises(ShapeError):
        max_eigvec_hermitian([[1, 2], [0, 1]])
    with pytest.raises(ShapeError):
        max_eigvec_hermitian(np.ones((2, 3)))


def test_repeated_top_eigenvalue_is_deterministic():
    val, vec = max_eigvec_hermitian(np.eye(3))
    assert val == pytest.approx(1)
    assert np.allclose(vec, [1, 0, 0])


def test_phase_normalise():
    vec = phase_normalise(np.array([0.1j, -2j, 0.5]))
    assert vec[1] == pytest.approx(2)


def test_weights_scheme1():
    w = weights_scheme1(np.array([1j]), np.zeros(1), np.array([[2.0]]),
                        4.0, 1.0).w
    assert abs(w[0]) == pytest.approx(2)
    rng = np.random.default_rng(2)
    h = rng.normal(size=16) + 1j * rng.normal(size=16)
    g = rng.normal(size=(16, 4)) + 1j * rng.normal(size=(16, 4))
    theta = rng.uniform(0, 2 * np.pi, 16)
    bf = weights_scheme1(h, theta, g, cfg.power, cfg.sigma_b2)
    row = effective_row(h, theta, g)
    assert np.vdot(bf.w, bf.w).real == pytest.approx(cfg.power, rel=1e-12)
    quad = np.real(np.conj(bf.w) @ bf.a_mat @ bf.w)
    assert quad == pytest.approx(cfg.power * np.linalg.norm(row) ** 2
                                 / cfg.sigma_b2)
    assert bf.b_mat is None
    with pytest.raises(ZeroChannel):
        mrt_weights(np.zeros(4), 1.0)


def test_weights_scheme2():
    """No Eve, Eve on Bob and random instances"""
    rng = np.random.default_rng(3)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    a_mat = quadratic_form(a, 1.0)
    mrt = np.conj(a) / np.linalg.norm(a)
    w = weights_scheme2(a_mat, np.zeros((4, 4)), 2.0).w
    assert abs(np.vdot(mrt, w)) / np.sqrt(2) == pytest.approx(1)
    w = weights_scheme2(a_mat, a_mat, 2.0).w
    assert abs(np.vdot(mrt, w)) / np.sqrt(2) == pytest.approx(1)
    assert scheme2_objective(w, a_mat, a_mat) == pytest.approx(1)
    for _ in range(100):
        e = rng.normal(size=4) + 1j * rng.normal(size=4)
        b_mat = quadratic_form(e, 1.0)
        power = rng.uniform(0.1, 10)
        w2 = weights_scheme2(a_mat, b_mat, power).w
        w1 = np.sqrt(power) * mrt
        assert scheme2_objective(w2, a_mat, b_mat) >= \
            scheme2_objective(w1, a_mat, b_mat) - 1e-9
        assert np.vdot(w2, w2).real == pytest.approx(power)
    with pytest.raises(ValueError):
        weights_scheme2(a_mat, a_mat, 0.0)


def test_weights_scheme2_link_budget_scale():
    """Reference-scenario magnitudes (|e|^2 up to 1e16, P near 1) reach the
    closed-form optimum, also with Eve almost aligned with Bob"""
    rng = np.random.default_rng(5)

    def ratio(w, a, e):
        return (1 + abs(np.vdot(a, w)) ** 2) / (1 + abs(np.vdot(e, w)) ** 2)

    for power in (1.0, cfg.power):
        for sin2 in (0.5, 1e-4, 1e-8):
            u = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
            u1 = u[0] / np.linalg.norm(u[0])
            u2 = u[1] - u1 * np.vdot(u1, u[1])
            u2 /= np.linalg.norm(u2)
            a = 5e7 * u1
            e = 1e8 * (np.sqrt(1 - sin2) * u1 + np.sqrt(sin2) * u2)
            pa, pe = power * 2.5e15, power * 1e16
            best = 1 + pa * (1 + pe * sin2) / (1 + pe)
            # A = a a^H, B = e e^H
            a_mat = quadratic_form(np.conj(a), 1.0)
            b_mat = quadratic_form(np.conj(e), 1.0)
            w = weights_scheme2(a_mat, b_mat, power).w
            assert np.vdot(w, w).real == pytest.approx(power, rel=1e-12)
            assert ratio(w, a, e) == pytest.approx(best, rel=1e-6)
            v = scheme2_rank1_directions(a, e, power)
            assert ratio(np.sqrt(power) * v, a, e) == \
                pytest.approx(best, rel=1e-6)
            mrt = np.sqrt(power) * u1
            assert ratio(w, a, e) >= ratio(mrt, a, e)


def test_scheme2_rank1_directions():
    """Degenerate spans, batching and phase invariance"""
    rng = np.random.default_rng(6)
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    e = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    v = scheme2_rank1_directions(a, e, 2.0)
    assert v.shape == (3, 4)
    assert np.allclose(np.linalg.norm(v, axis=1), 1)
    turned = scheme2_rank1_directions(a * np.exp(0.7j), e * np.exp(-2.1j),
                                      2.0)
    assert np.allclose(turned, v)
    # matches the matrix form row by row
    for i in range(3):
        w = weights_scheme2(quadratic_form(np.conj(a[i]), 1.0),
                            quadratic_form(np.conj(e[i]), 1.0), 2.0).w
        assert np.allclose(w / np.sqrt(2.0), v[i])
    # no Eve: MRT
    v = scheme2_rank1_directions(a[0], np.zeros(4), 2.0)
    assert abs(np.vdot(a[0], v)) == pytest.approx(np.linalg.norm(a[0]))
    # Eve along Bob and stronger: orthogonal to both
    v = scheme2_rank1_directions(a[0], 3 * a[0], 2.0)
    assert abs(np.vdot(a[0], v)) < 1e-12 * np.linalg.norm(a[0])
    assert np.linalg.norm(v) == pytest.approx(1)
    # Eve along Bob and weaker: MRT
    v = scheme2_rank1_directions(a[0], 0.5j * a[0], 2.0)
    assert abs(np.vdot(a[0], v)) == pytest.approx(np.linalg.norm(a[0]))
    v = scheme2_rank1_directions(np.array([2j]), np.array([5.0]), 1.0)
    assert np.allclose(v, [1.0])
    with pytest.raises(ShapeError):
        scheme2_rank1_directions(a, e[:, :3], 1.0)


def test_scheme2_directions_full_rank():
    """Full-rank forms against the generalized eigenvalue oracle"""
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.normal(size=(2, 4, 2)) + 1j * rng.normal(size=(2, 4, 2))
        a_mat = x[0] @ np.conj(x[0].T)
        b_mat = x[1] @ np.conj(x[1].T)
        power = rng.uniform(0.1, 10)
        ridge = np.eye(4) / power
        top = scipy.linalg.eigh(a_mat + ridge, b_mat + ridge,
                                eigvals_only=True)[-1]
        w = weights_scheme2(a_mat, b_mat, power).w
        assert scheme2_objective(w, a_mat, b_mat) == \
            pytest.approx(top, rel=1e-9)
    v = scheme2_directions(np.stack([a_mat, a_mat]),
                           np.stack([b_mat, np.zeros((4, 4))]), 1.0)
    assert v.shape == (2, 4)


def test_snr():
    g = np.array([[1.0]])
    assert snr(np.ones(1), np.zeros(1), g, np.array([np.sqrt(5)]), 1) == \
        pytest.approx(5)
    assert snr(np.ones(1), np.zeros(1), g, np.zeros(1), 1) == 0
    rng = np.random.default_rng(4)
    h = rng.normal(size=4) + 1j * rng.normal(size=4)
    gm = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    assert snr(h, np.zeros(4), gm, 2 * w, 2.0) == pytest.approx(
        4 * snr(h, np.zeros(4), gm, w, 2.0))
    with pytest.raises(DimensionError):
        snr(h, np.zeros(4), gm, np.ones(2), 1.0)
    with pytest.raises(ValueError):
        snr(h, np.zeros(4), gm, w, 0.0)


def test_secrecy_rate():
    assert secrecy_rate(2.5, 2.5)[0] == 0
    assert secrecy_rate(3, 1)[0] == pytest.approx(1)
    raw, clamped = secrecy_rate(0, 3)
    assert raw == pytest.approx(-2)
    assert clamped == 0


def test_chi_bob():
    assert np.allclose(chi_bob([1.0], 1.0, [0.0], 0.0, 1), [1])
    c4 = chi_bob([1.0, 2.0], 3.0, [0.1, 0.2], 0.3, 4)
    c8 = chi_bob([1.0, 2.0], 3.0, [0.1, 0.2], 0.3, 8)
    assert np.allclose(np.abs(c8), 2 * np.abs(c4))
    with pytest.raises(ValueError):
        chi_bob([0.0], 1.0, [0.0], 0.0, 1)


def test_zeta():
    g1 = grid(1, 1)
    down = np.array([0.0, 0.0, -1.0])
    sens = np.array([[0.0, 0.6, 0.8], [0.0, 0.0, 1.0]])
    zeta, _ = zeta_and_chi_eve(g1, down, down, sens, [0.3], np.ones(2), 1.0,
                               np.zeros(2), 0.0)
    assert np.allclose(zeta, np.exp(0.3j))
    g = grid()
    zeta, chi = zeta_and_chi_eve(g, down, down, -np.tile(down, (2, 1)),
                                 np.zeros(16), np.ones(2), 1.0, np.zeros(2),
                                 0.0)
    assert np.allclose(zeta, 16)
    assert np.allclose(np.abs(chi), 16)
    rng = np.random.default_rng(5)
    for _ in range(200):
        dirs = rng.normal(size=(4, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        zeta, _ = zeta_and_chi_eve(g, dirs[0], dirs[1], dirs[2:],
                                   rng.uniform(0, 2 * np.pi, 16), np.ones(2),
                                   1.0, np.zeros(2), 0.0)
        assert np.all(np.abs(zeta) <= 16 + 1e-9)


def test_array_factor():
    """Closed form against the lattice sum, including grating lobes"""
    pairs = grid().index_pairs() - 1
    for ax, ay in ((0.3, -1.1), (0.0, 0.7), (2 * np.pi, 0.2), (1e-9, 0.0)):
        direct = np.exp(1j * (pairs[:, 0] * ax + pairs[:, 1] * ay)).sum()
        assert array_factor(4, 4, ax, ay) == pytest.approx(direct, abs=1e-9)


def test_snr_upper_bound():
    assert snr_upper_bound(1, 1, 1, 1, 1, 1, m=1) == pytest.approx(1)
    b1 = snr_upper_bound(2, 3, 0.5, 16, 10, [20, 30])
    b2 = snr_upper_bound(2, 3, 0.5, 16, 20, [20, 30])
    assert b2 == pytest.approx(b1 / 4)
    with pytest.raises(ValueError):
        snr_upper_bound(1, 1, 1, 1, 0, 1, m=1)


def test_cubic_coefficients():
    """Reference geometry and a plug-in case"""
    coeffs = cubic_coefficients(omega_a, omega_b, q_o, 3.0, 0.5)
    assert coeffs.b == pytest.approx(4.60441, abs=1e-4)
    assert coeffs.c == pytest.approx(3.48604, abs=1e-4)
    assert coeffs.d == pytest.approx(3.42082, abs=1e-4)
    plug = cubic_coefficients(omega_a, [0, 0, 0], [0, 100, 0], 1.0, 1.0)
    assert plug.b == pytest.approx(2.5)
    oracle = companion_roots(coeffs)
    for root in coeffs.roots:
        assert np.min(np.abs(oracle - root)) < 1e-6


def test_solve_epsilon():
    assert np.allclose(solve_epsilon(CubicCoeffs.from_bcd(6, 11, -6)),
                       [1, 2, 3], atol=1e-10)
    assert np.allclose(solve_epsilon(CubicCoeffs.from_bcd(0, 0, -8)), [2])
    rng = np.random.default_rng(6)
    for _ in range(500):
        coeffs = CubicCoeffs.from_bcd(*rng.uniform(-10, 10, 3))
        roots = solve_epsilon(coeffs)
        assert 1 <= len(roots) <= 3
        assert np.all(np.abs(coeffs.residual(np.array(roots))) < 1e-9)
        real = companion_roots(coeffs)
        real = real[np.abs(real.imag) < 1e-6].real
        for root in roots:
            assert np.min(np.abs(real - root)) < 1e-6


def test_candidate_ring():
    assert candidate_ring(math.sqrt(2), [0, -100, 0], 100) == pytest.approx(
        100)
    assert candidate_ring(1.0, [0, -100, 0], 100) == 0
    with pytest.raises(Infeasible):
        candidate_ring(0.5, [0, -100, 0], 100)
    with pytest.raises(Infeasible):
        candidate_ring(-1.0, [0, -100, 0], 100)


def test_next_position_ties():
    """Flat objective keeps q_prev; a single reachable point wins"""
    rings = [Ring(1.0, 100.0)]
    q = Vec3(100.0, 0.0, 100.0)
    assert next_position(q, rings, 1.0, flat) == q
    q = np.array([101.0, 0.0, 100.0])
    assert next_position(q, rings, 1.0, flat) == Vec3(100.0, 0.0, 100.0)
    assert next_position(q, [], 1.0, flat) == Vec3.from_array(q)


def test_approach_step():
    """Out of reach of every ring: toward the nearest ring, or the target"""
    rings = [Ring(1.0, 100.0), Ring(2.0, 320.0)]
    q = np.array([200.0, 0.0, 100.0])
    choice = choose_step(q, rings, 1.5, flat)
    assert np.allclose(choice.position, [198.5, 0.0, 100.0])
    assert choice.displacement == pytest.approx(1.5)
    assert math.isnan(choice.epsilon)
    inner = np.array([0.0, 30.0, 100.0])
    assert np.allclose(choose_step(inner, rings, 1.5, flat).position,
                       [0.0, 31.5, 100.0])
    target = np.array([200.0, 10.0, 100.0])
    choice = choose_step(q, rings, 1.5, flat, target)
    assert np.allclose(choice.position, [200.0, 1.5, 100.0])
    near = np.array([200.0, 9.0, 100.0])
    choice = choose_step(near, rings, 1.5, flat, target)
    assert np.array_equal(choice.position, target)
    assert choice.displacement == pytest.approx(1.0)
    choice = choose_step(target, rings, 1.5, flat, target)
    assert np.array_equal(choice.position, target)
    assert choice.displacement == 0
    # no rings at all: hover, target or not
    assert np.array_equal(choose_step(q, [], 1.5, flat, target).position, q)
    assert next_position(q, rings, 1.5, flat, target) == \
        Vec3(200.0, 1.5, 100.0)


def test_site_lattice():
    pts = site_lattice(omega_a, omega_b, q_o, spacing=5.0, margin=50.0)
    assert np.all(pts[:, 2] == 100.0)
    assert np.allclose(pts[:, :2].min(axis=0), [-150, -150])
    assert np.allclose(pts[:, :2].max(axis=0), [130, 150])
    assert len(pts) == 57 * 61
    assert np.any(np.all(pts == [80.0, 100.0, 100.0], axis=1))
    with pytest.raises(ValueError):
        site_lattice(omega_a, omega_b, q_o, spacing=0)


def test_find_hover_site():
    """Lattice search plus refinement finds an off-lattice peak"""
    peak = np.array([33.3, -41.7])

    def bowl(c):
        return -np.sum((c[:, :2] - peak) ** 2, axis=1)
    site = find_hover_site(bowl, omega_a, omega_b, q_o)
    assert np.allclose(site.position[:2], peak, atol=0.05)
    assert site.position[2] == 100.0
    assert site.value == pytest.approx(0, abs=0.01)
    # nothing beats the start point
    site = find_hover_site(flat, omega_a, omega_b, q_o)
    assert np.array_equal(site.position, q_o.as_array())
    # a narrow spike between lattice points
    spike = np.array([21.2, 13.9])

    def ridge(c):
        dist = np.linalg.norm(c[:, :2] - spike, axis=1)
        return -np.log(0.01 + dist)
    site = find_hover_site(ridge, omega_a, omega_b, q_o)
    assert np.linalg.norm(site.position[:2] - spike) < 0.05


def test_plan_trajectory():
    start = Vec3(-100.0, 100.0, 0.0)
    still = FlightPlan(10.0, 20, 0.5, 0.0, 100.0, start)
    traj = plan_trajectory(still, omega_a, omega_b, flat)
    assert np.all(traj.points == [-100.0, 100.0, 100.0])
    one = FlightPlan(0.5, 1, 0.5, 3.0, 100.0, start)
    traj = plan_trajectory(one, omega_a, omega_b, flat)
    assert traj.samples == 1
    assert np.linalg.norm(traj.points[0] - [-100, 100, 100]) <= 1.5 + 1e-9
    plan = FlightPlan(25.0, 50, 0.5, 3.0, 100.0, start)
    # prefer positions close to Bob
    traj = plan_trajectory(plan, omega_a, omega_b,
                           lambda c: -np.linalg.norm(c[:, :2] - [80, 100],
                                                     axis=1))
    steps = np.linalg.norm(np.diff(np.vstack(([-100, 100, 100],
                                              traj.points)), axis=0), axis=1)
    assert np.all(steps <= 1.5 + 1e-9)
    assert np.allclose(steps, traj.displacement)
    assert np.all(traj.points[:, 2] == 100.0)
    # straight toward Bob at full speed
    assert np.allclose(traj.points[-1], [-25.0, 100.0, 100.0])
    assert np.allclose(traj.points[:, 1], 100.0)
    frame = traj.as_frame()
    assert list(frame.columns) == ['n', 'x', 'y', 'z', 'displacement',
                                   'epsilon_used', 'ring_radius']
    assert len(frame) == 50

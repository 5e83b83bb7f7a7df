# -*- coding: utf-8 -*-
"""
Runtime invariant suites behind the validate command.

Each check draws its own random instances from a generator seeded by the
scenario seed and returns a CheckResult; run_checks() runs them all.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import msgs
from .beamform import (effective_row, max_eigvec_hermitian, mrt_weights,
                       quadratic_form, rank1_phase_vector, reflection_phases,
                       scheme2_objective, snr_from_row, weights_scheme2)
from .bounds import array_factor, chi_bob, snr_upper_bounds, zeta_and_chi_eve
from .channel import FadingDraw, build_channel_set, response_phases
from .config import Config
from .errors import AirsecError
from .geometry import place_sensors
from .sim import Scenario
from .trajectory import CubicCoeffs, companion_roots, solve_epsilon

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        fmt = msgs.check_passed if self.passed else msgs.check_failed
        return fmt.format(name=self.name, detail=self.detail)


def _rel_excess(value, bound):
    """Largest relative amount by which value exceeds bound"""
    bound = np.asarray(bound, dtype=float)
    scale = np.maximum(bound, np.finfo(float).tiny)
    return float(np.max((np.asarray(value) - bound) / scale))


def check_cophasing(config):
    """Zero-radius field: Bob's per-sensor channel meets its bound"""
    scenario = Scenario(config.replace(radius=0.0))
    geo = scenario.geometry(config.flight_plan.start_position.as_array())
    ch = geo.channels
    expected = config.k * np.sqrt(ch.bob.gain * ch.sensors.gains)
    err = float(np.max(np.abs(np.abs(geo.row_b) - expected) / expected))
    return CheckResult('co-phasing', err <= 1e-9,
                       'max relative deviation %.3g' % err)


def check_proposition1(config, count, rng):
    """Per-sensor channels and SNRs never exceed their bounds"""
    grid = config.grid
    worst = -np.inf
    for _ in range(count):
        field = place_sensors(config.omega_a, rng.uniform(0, 10), config.m,
                              int(rng.integers(2 ** 32)))
        uav = np.array([rng.uniform(-200, 200), rng.uniform(-200, 200),
                        config.altitude])
        fading = FadingDraw(*rng.exponential(1.0, 3), config.rho0)
        ch = build_channel_set(field, uav, grid, fading, config.omega_b,
                               config.omega_e)
        u_g = rank1_phase_vector(ch.phi_g)
        refl = reflection_phases(ch.u_b, u_g)
        row_b = effective_row(ch.h_b, refl, ch.g)
        row_e = effective_row(ch.h_e, refl, ch.g)
        sens = ch.sensors
        c_b = chi_bob(sens.gains, ch.bob.gain, sens.bulk, ch.bob.bulk, grid.k)
        zeta, c_e = zeta_and_chi_eve(grid, ch.eve.direction,
                                     ch.bob.direction, sens.directions, u_g,
                                     sens.gains, ch.eve.gain, sens.bulk,
                                     ch.eve.bulk)
        pbar_b = config.power / config.sigma_b2
        pbar_e = config.power / config.sigma_e2
        ub_b, _ = snr_upper_bounds(pbar_b, pbar_e, config.rho0, fading,
                                   grid.k, zeta, ch.bob.dist, ch.eve.dist,
                                   sens.dist)
        a_mat = quadratic_form(row_b, config.sigma_b2)
        b_mat = quadratic_form(row_e, config.sigma_e2)
        gammas = [snr_from_row(row_b, w, config.sigma_b2) for w in
                  (mrt_weights(row_b, config.power),
                   weights_scheme2(a_mat, b_mat, config.power).w)]
        worst = max(worst, _rel_excess(np.abs(row_b), np.abs(c_b)),
                    _rel_excess(np.abs(row_e), np.abs(c_e)),
                    _rel_excess(max(gammas), ub_b))
    return CheckResult('proposition-1 dominance', worst <= 1e-9,
                       '%d instances, worst relative excess %.3g'
                       % (count, worst))


def check_zeta(config, count, rng):
    """|zeta| <= K, coherent equality and the closed-form array factor"""
    grid = config.grid
    k = grid.k
    pairs = grid.index_pairs() - 1
    worst_bound = -np.inf
    worst_equal = 0.0
    worst_af = 0.0
    for _ in range(count):
        dirs = rng.normal(size=(2 + config.m, 3))
        dirs[:, 2] = -np.abs(dirs[:, 2])
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dir_eve, dir_bob, dir_sens = dirs[0], dirs[1], -dirs[2:]
        ones = np.ones(config.m)
        u_g = rng.uniform(0, 2 * np.pi, k)
        zeta, _ = zeta_and_chi_eve(grid, dir_eve, dir_bob, dir_sens, u_g,
                                   ones, 1.0, 0 * ones, 0.0)
        worst_bound = max(worst_bound, float(np.max(np.abs(zeta))) - k)
        # u_G cancelling every summand phase of sensor 0
        cancel = (response_phases(grid, dir_sens[0])
                  - response_phases(grid, dir_eve - dir_bob))
        zeta0, _ = zeta_and_chi_eve(grid, dir_eve, dir_bob, dir_sens, cancel,
                                    ones, 1.0, 0 * ones, 0.0)
        worst_equal = max(worst_equal, abs(zeta0[0] - k))
        # u_G linear in the element index
        gx, gy = rng.uniform(-np.pi, np.pi, 2)
        linear = pairs[:, 0] * gx + pairs[:, 1] * gy
        zeta_lin, _ = zeta_and_chi_eve(grid, dir_eve, dir_bob, dir_sens,
                                       linear, ones, 1.0, 0 * ones, 0.0)
        diff = dir_eve - dir_bob - dir_sens
        oracle = array_factor(grid.kx, grid.ky,
                              grid.dbar_x * diff[:, 0] + gx,
                              grid.dbar_y * diff[:, 1] + gy)
        worst_af = max(worst_af, float(np.max(np.abs(zeta_lin - oracle))))
    passed = (worst_bound <= 1e-9 * k and worst_equal <= 1e-9 * k
              and worst_af <= 1e-9 * k)
    return CheckResult('zeta bound', passed,
                       '%d geometries, max |zeta|-K %.3g, equality error '
                       '%.3g, array factor error %.3g'
                       % (count, worst_bound, worst_equal, worst_af))


def check_cubic(count, rng):
    """Cubic roots: residual and agreement with the companion matrix"""
    factored = solve_epsilon(CubicCoeffs.from_bcd(6.0, 11.0, -6.0))
    worst_exact = float(np.max(np.abs(np.array(factored) - [1, 2, 3]))) \
        if len(factored) == 3 else np.inf
    worst_res = 0.0
    worst_oracle = 0.0
    for _ in range(count):
        coeffs = CubicCoeffs.from_bcd(*rng.uniform(-10, 10, 3))
        roots = np.array(solve_epsilon(coeffs))
        oracle = companion_roots(coeffs)
        worst_res = max(worst_res,
                        float(np.max(np.abs(coeffs.residual(roots)))))
        dist = np.abs(roots[:, None] - oracle[None, :])
        worst_oracle = max(worst_oracle, float(dist.min(axis=1).max()))
        for root in oracle[np.abs(oracle.imag) <= 1e-9]:
            worst_oracle = max(worst_oracle,
                               float(np.min(np.abs(roots - root.real))))
    passed = worst_exact <= 1e-10 and worst_res < 1e-9 and worst_oracle <= 1e-6
    return CheckResult('cubic solver', passed,
                       '%d cubics, max residual %.3g, max oracle distance '
                       '%.3g' % (count, worst_res, worst_oracle))


def check_speed(config, samples=None):
    """Planned flight respects the step limit and the altitude"""
    if samples is not None and samples < config.samples:
        config = config.replace(total_time=samples * config.dt)
    traj = Scenario(config).plan()
    limit = config.speed * config.dt
    excess = traj.max_step() - limit
    alt_err = float(np.max(np.abs(traj.points[:, 2] - config.altitude)))
    return CheckResult('speed constraint', excess <= 1e-9 and alt_err <= 1e-9,
                       '%d steps, max step %.6g m (limit %.6g m)'
                       % (traj.samples, traj.max_step(), limit))


def _charpoly_top(mat):
    """Largest root of the characteristic polynomial of a 3x3 matrix"""
    tr = np.trace(mat).real
    minors = sum((mat[i, i] * mat[j, j] - mat[i, j] * mat[j, i]).real
                 for i, j in ((0, 1), (0, 2), (1, 2)))
    det = np.linalg.det(mat).real
    return float(np.max(np.roots([1.0, -tr, minors, -det]).real))


def check_eigen(count, rng):
    """Hermitian top eigenpairs against the characteristic polynomial"""
    worst_value = 0.0
    worst_rayleigh = 0.0
    for _ in range(count):
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        mat = (x + x.conj().T) / 2
        val, vec = max_eigvec_hermitian(mat)
        oracle = _charpoly_top(mat)
        rayleigh = float(np.real(vec.conj() @ mat @ vec))
        # no canonical direction may do better
        diag_gap = float(np.max(np.diag(mat).real)) - val
        worst_value = max(worst_value,
                          abs(val - oracle) / max(1.0, abs(oracle)), diag_gap)
        worst_rayleigh = max(worst_rayleigh,
                             abs(rayleigh - val) / max(1.0, abs(val)))
    return CheckResult('eigen solver',
                       worst_value <= 1e-8 and worst_rayleigh <= 1e-10,
                       '%d matrices, worst eigenvalue error %.3g, worst '
                       'Rayleigh mismatch %.3g'
                       % (count, worst_value, worst_rayleigh))


def check_scheme2(count, rng, m=4, samples=2000):
    """Generalized-eigen weights beat MRT and random feasible weights"""
    worst_mrt = -np.inf
    worst_sampled = -np.inf
    worst_power = 0.0
    for _ in range(count):
        xa = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
        xb = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
        a_mat, b_mat = xa @ xa.conj().T, xb @ xb.conj().T
        power = rng.uniform(0.1, 10)
        w2 = weights_scheme2(a_mat, b_mat, power).w
        _, top = max_eigvec_hermitian(a_mat)
        obj2 = scheme2_objective(w2, a_mat, b_mat)
        obj1 = scheme2_objective(np.sqrt(power) * top, a_mat, b_mat)
        trial = rng.normal(size=(samples, m)) + 1j * rng.normal(
            size=(samples, m))
        trial *= np.sqrt(power) / np.linalg.norm(trial, axis=1,
                                                 keepdims=True)
        best = float(np.max(scheme2_objective(trial, a_mat, b_mat)))
        worst_mrt = max(worst_mrt, (obj1 - obj2) / max(1.0, obj1))
        worst_sampled = max(worst_sampled, (best - obj2) / best)
        worst_power = max(worst_power,
                          abs(np.vdot(w2, w2).real - power) / power)
    passed = worst_mrt <= 1e-9 and worst_sampled <= 1e-6 \
        and worst_power <= 1e-9
    return CheckResult('scheme-2 optimality', passed,
                       '%d instances, worst shortfall vs MRT %.3g, vs '
                       'sampling %.3g' % (count, worst_mrt, worst_sampled))


def run_checks(config, quick=False):
    """Run every suite; quick uses a tenth of the instances"""
    counts = {key: max(1, val // 10) if quick else val
              for key, val in Config.validate_counts.items()}
    rng = np.random.default_rng(config.seed)
    suites = (
        ('co-phasing', lambda: check_cophasing(config)),
        ('proposition-1 dominance',
         lambda: check_proposition1(config, counts['proposition1'], rng)),
        ('zeta bound', lambda: check_zeta(config, counts['zeta'], rng)),
        ('cubic solver', lambda: check_cubic(counts['cubic'], rng)),
        ('eigen solver', lambda: check_eigen(counts['eigen'], rng)),
        ('scheme-2 optimality',
         lambda: check_scheme2(counts['scheme2'], rng)),
        ('speed constraint',
         lambda: check_speed(config, 100 if quick else None)),
    )
    results = []
    for name, suite in suites:
        try:
            result = suite()
        except AirsecError as err:
            result = CheckResult(name, False, str(err))
        except Exception as err:
            # a crash fails its own suite only
            result = CheckResult(name, False, msgs.check_crashed.format(
                kind=type(err).__name__, err=err))
        if not result.passed:
            logger.error(str(result))
        results.append(result)
    return results

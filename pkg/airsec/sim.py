# -*- coding: utf-8 -*-
"""
Scenario runs, Monte-Carlo averaging, the fixed-IRS baseline and parameter
sweeps.

A run draws the sensor field once from the master seed, plans the flight
once with the selected scheme and mean fading, and then evaluates every
trial on that flight with freshly drawn fading. Trial i always uses the
seed derived from (master seed, i), so results do not depend on how the
trials are scheduled.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm

from . import msgs
from .beamform import (ReflectionState, effective_row, information_rate,
                       mrt_weights, rank1_phase_vector, reflection_phases,
                       scheme2_rank1_directions, secrecy_rate, snr_from_row)
from .bounds import evaluate_bounds, snr_upper_bounds, zeta_and_chi_eve
from .channel import ChannelSet, FadingDraw, build_channel_set, draw_fading
from .config import Config, ScenarioConfig, db_to_linear, square_side, \
    warn_lemma1
from .errors import ConfigError
from .geometry import Vec3, place_sensors
from .trajectory import Trajectory, plan_trajectory

logger = logging.getLogger(__name__)

# Eve moves away from Bob along this direction in distance sweeps (the
# correlated Eve location lies 5 m from Bob this way)
EVE_OFFSET_DIRECTION = (-1.0, 0.0, 0.0)


def field_seed(seed):
    return np.random.SeedSequence(seed, spawn_key=(0,))


def trial_seed(seed, trial):
    return np.random.SeedSequence(seed, spawn_key=(1, trial))


@dataclass(frozen=True, eq=False)
class PathGeometry:
    """Channels and reflection design at mean fading along positions"""

    positions: np.ndarray
    channels: ChannelSet
    reflection: ReflectionState
    row_b: np.ndarray
    row_e: np.ndarray
    zeta: np.ndarray


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Per-sample outcome of one trial"""

    trial: int
    gamma_b: np.ndarray
    gamma_e: np.ndarray
    rate_raw: np.ndarray
    rate_clamped: np.ndarray
    gamma_b_ub: np.ndarray
    gamma_e_ub: np.ndarray
    trajectory: Trajectory
    fading: FadingDraw

    @property
    def mean_clamped(self):
        return float(self.rate_clamped.mean())

    @property
    def mean_raw(self):
        return float(self.rate_raw.mean())

    @property
    def mean_rate_bob(self):
        return float(information_rate(self.gamma_b).mean())

    @property
    def mean_rate_eve(self):
        return float(information_rate(self.gamma_e).mean())

    def as_frame(self):
        return pd.DataFrame({
            'n': np.arange(1, self.gamma_b.shape[0] + 1),
            'gammaB': self.gamma_b,
            'gammaE': self.gamma_e,
            'rate_raw': self.rate_raw,
            'rate_clamped': self.rate_clamped,
            'gammaB_ub': self.gamma_b_ub,
            'gammaE_ub': self.gamma_e_ub,
        })


@dataclass(frozen=True, eq=False)
class AggregateResult:
    """Trial averages of a Monte-Carlo run, in trial order"""

    results: Tuple[TrialResult, ...]

    @classmethod
    def from_trials(cls, results):
        return cls(tuple(results))

    def pooled(self, other):
        return AggregateResult(self.results + other.results)

    @property
    def trials(self):
        return len(self.results)

    @property
    def trial_means(self):
        """Mean clamped secrecy rate of each trial"""
        return np.array([r.mean_clamped for r in self.results])

    @property
    def trial_means_raw(self):
        return np.array([r.mean_raw for r in self.results])

    @property
    def mean(self):
        return float(self.trial_means.mean())

    @property
    def mean_raw(self):
        return float(self.trial_means_raw.mean())

    @property
    def mean_rate_bob(self):
        return float(np.mean([r.mean_rate_bob for r in self.results]))

    @property
    def mean_rate_eve(self):
        return float(np.mean([r.mean_rate_eve for r in self.results]))

    @property
    def half_width(self):
        """Half width of the normal-approximation confidence interval"""
        if self.trials < 2:
            return 0.0
        z = norm.ppf(0.5 + Config.ci_level / 2)
        std = self.trial_means.std(ddof=1)
        return float(z * std / np.sqrt(self.trials))

    @property
    def ci_low(self):
        return self.mean - self.half_width

    @property
    def ci_high(self):
        return self.mean + self.half_width

    @property
    def trajectory(self):
        return self.results[0].trajectory


class Scenario(object):
    """Sensor field, planner objective and trial evaluation for a config"""

    def __init__(self, config: ScenarioConfig, seed=None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.grid = config.grid
        self.field = place_sensors(config.omega_a, config.radius, config.m,
                                   field_seed(self.seed))
        self.mean_fading = FadingDraw.mean(config.rho0)

    def geometry(self, positions):
        """Channels, reflection phases and effective rows at positions"""
        cfg = self.config
        channels = build_channel_set(self.field, positions, self.grid,
                                     self.mean_fading, cfg.omega_b,
                                     cfg.omega_e)
        u_g = rank1_phase_vector(channels.phi_g)
        refl = reflection_phases(channels.u_b, u_g)
        sens = channels.sensors
        zeta, _ = zeta_and_chi_eve(self.grid, channels.eve.direction,
                                   channels.bob.direction, sens.directions,
                                   u_g, sens.gains, channels.eve.gain,
                                   sens.bulk, channels.eve.bulk)
        return PathGeometry(np.asarray(positions), channels, refl,
                            effective_row(channels.h_b, refl, channels.g),
                            effective_row(channels.h_e, refl, channels.g),
                            zeta)

    def weights(self, row_b, row_e):
        """Sensor weights of the configured scheme for effective rows"""
        cfg = self.config
        if cfg.scheme == '1':
            return mrt_weights(row_b, cfg.power)
        # A = a a^H and B = e e^H with a = conj(row) / sigma
        a_vec = np.conj(row_b) / np.sqrt(cfg.sigma_b2)
        e_vec = np.conj(row_e) / np.sqrt(cfg.sigma_e2)
        return np.sqrt(cfg.power) * scheme2_rank1_directions(a_vec, e_vec,
                                                             cfg.power)

    def objective(self, positions):
        """Raw secrecy rate at candidate positions, mean fading"""
        cfg = self.config
        geo = self.geometry(positions)
        if cfg.planner_objective == 'bound':
            bounds = evaluate_bounds(geo.channels, geo.reflection, self.grid,
                                     self.mean_fading, cfg.power,
                                     cfg.sigma_b2, cfg.sigma_e2)
            return secrecy_rate(bounds.gamma_b_ub, bounds.gamma_e_ub)[0]
        w = self.weights(geo.row_b, geo.row_e)
        gamma_b = snr_from_row(geo.row_b, w, cfg.sigma_b2)
        gamma_e = snr_from_row(geo.row_e, w, cfg.sigma_e2)
        return secrecy_rate(gamma_b, gamma_e)[0]

    def plan(self):
        cfg = self.config
        if cfg.scheme == 'fixed':
            return Trajectory.constant(cfg.fixed_position, cfg.samples)
        return plan_trajectory(cfg.flight_plan, cfg.omega_a, cfg.omega_b,
                               self.objective)

    def run_trial(self, trajectory, geo, trial):
        """Evaluate one fading realisation along a planned trajectory"""
        cfg = self.config
        fading = draw_fading(trial_seed(self.seed, trial), cfg.rho0,
                             trajectory.samples,
                             share_bob_eve=cfg.share_fading)
        # fading only scales the mean-fading effective rows
        row_b = np.sqrt(fading.varsigma_b * fading.varsigma_g)[:, None] \
            * geo.row_b
        row_e = np.sqrt(fading.varsigma_e * fading.varsigma_g)[:, None] \
            * geo.row_e
        w = self.weights(row_b, row_e)
        gamma_b = snr_from_row(row_b, w, cfg.sigma_b2)
        gamma_e = snr_from_row(row_e, w, cfg.sigma_e2)
        raw, clamped = secrecy_rate(gamma_b, gamma_e)
        sens = geo.channels.sensors
        ub_b, ub_e = snr_upper_bounds(
            cfg.power / cfg.sigma_b2, cfg.power / cfg.sigma_e2, cfg.rho0,
            fading, self.grid.k, geo.zeta, geo.channels.bob.dist,
            geo.channels.eve.dist, sens.dist)
        result = TrialResult(trial, gamma_b, gamma_e, raw, clamped, ub_b,
                             ub_e, trajectory, fading)
        logger.debug(msgs.trial_done.format(trial=trial,
                                            rate=result.mean_clamped))
        return result


def run_scenario(config, seed=None):
    """Plan the flight and evaluate trial 0"""
    scenario = Scenario(config, seed)
    traj = scenario.plan()
    return scenario.run_trial(traj, scenario.geometry(traj.points), 0)


def fixed_irs_baseline(config, seed=None):
    """Same pipeline with the IRS held at the fixed location"""
    return run_scenario(config.replace(scheme='fixed'), seed)


def worker_count(trials):
    env = os.getenv(Config.threads_env)
    if not env:
        return max(1, min(os.cpu_count() or 1, trials))
    try:
        cap = int(env)
    except ValueError:
        cap = 0
    if cap < 1:
        raise ConfigError(Config.threads_env,
                          msgs.bad_threads.format(value=env))
    return min(cap, trials)


def monte_carlo(config, trials=None, first_trial=0, seed=None):
    """Average trials first_trial .. first_trial + trials - 1"""
    trials = config.trials if trials is None else trials
    if trials < 1:
        raise ConfigError('trials', msgs.not_positive.format(value=trials))
    scenario = Scenario(config, seed)
    traj = scenario.plan()
    geo = scenario.geometry(traj.points)
    workers = worker_count(trials)
    logger.debug(msgs.trials_started.format(trials=trials, workers=workers))
    indices = range(first_trial, first_trial + trials)
    if workers == 1:
        results = [scenario.run_trial(traj, geo, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda i: scenario.run_trial(traj, geo, i), indices))
    if trials < Config.ci_min_trials:
        logger.debug(msgs.few_trials.format(trials=trials,
                                            min_trials=Config.ci_min_trials))
    return AggregateResult.from_trials(results)


def sweep_config(config, parameter, value):
    """config with one sweep parameter set to value"""
    value = float(value)
    if parameter == 'T':
        return config.replace(total_time=value)
    if parameter == 'P':
        return config.replace(power=db_to_linear(value))
    if parameter == 'distance':
        offset = value * np.array(EVE_OFFSET_DIRECTION)
        return config.replace(omega_e=config.omega_b + offset,
                              eve_mode='custom')
    if parameter == 'K':
        side = square_side('K', '%g' % value)
        swept = config.replace(kx=side, ky=side)
        warn_lemma1(swept)
        return swept
    if parameter == 'r':
        return config.replace(radius=value)
    raise ConfigError('param', msgs.unknown_param.format(
        choices=Config.sweep_parameters))


@dataclass(frozen=True, eq=False)
class SweepResult:
    parameter: str
    values: Tuple[float, ...]
    aggregates: Tuple[AggregateResult, ...]

    def as_frame(self):
        return pd.DataFrame({
            'param_value': np.array(self.values, dtype=float),
            'mean': [a.mean for a in self.aggregates],
            'ci_low': [a.ci_low for a in self.aggregates],
            'ci_high': [a.ci_high for a in self.aggregates],
            'trials': [a.trials for a in self.aggregates],
        })

    def as_detail_frame(self):
        """as_frame() plus raw and per-receiver rates"""
        frame = self.as_frame()
        frame['mean_raw'] = [a.mean_raw for a in self.aggregates]
        frame['rate_bob'] = [a.mean_rate_bob for a in self.aggregates]
        frame['rate_eve'] = [a.mean_rate_eve for a in self.aggregates]
        return frame


def sweep(config, parameter, values, trials=None):
    """One Monte-Carlo aggregate per parameter value.

    Every value reuses the master seed, so sensor draws and fading streams
    are shared across values.
    """
    if parameter not in Config.sweep_parameters:
        raise ConfigError('param', msgs.unknown_param.format(
            choices=Config.sweep_parameters))
    values = tuple(float(v) for v in values)
    if not values:
        raise ConfigError('values', msgs.no_values)
    aggregates = []
    for value in values:
        agg = monte_carlo(sweep_config(config, parameter, value), trials)
        logger.info(msgs.sweep_value.format(param=parameter, value=value,
                                            mean=agg.mean))
        aggregates.append(agg)
    return SweepResult(parameter, values, tuple(aggregates))


def terminal_hover_point(trajectory, count=50):
    """Mean position over the last count samples"""
    return Vec3.from_array(trajectory.points[-count:].mean(axis=0))

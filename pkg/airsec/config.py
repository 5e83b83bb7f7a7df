# -*- coding: utf-8 -*-
"""
Configuration for airsec.

Config holds tool-level settings. A simulated scenario is described by a
ScenarioConfig, normally created by parse_config() from a flat key = value
file whose keys follow the usual symbol names (M, omega_A, T, alpha, ...).
Unspecified keys take the reference scenario values in
Config.scenario_defaults.
"""

import configparser
import dataclasses
import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

from . import msgs
from .errors import ConfigError
from .geometry import FlightPlan, IrsGrid, Vec3, lemma1_limits

logger = logging.getLogger(__name__)


class Config(object):
    # 3e8 makes the 900 MHz wavelength exactly 1/3 m
    speed_of_light = 3e8
    output_dir = Path('airsec_out')
    # output files, written into the output directory
    rates_file = 'rates.csv'
    trajectory_file = 'trajectory.csv'
    sweep_file = 'sweep.csv'
    sweep_xlsx_file = 'sweep.xlsx'
    manifest_file = 'manifest.json'
    summary_file = 'summary.txt'
    plot_script_file = 'plot_results.py'
    traceback_file = 'traceback.txt'
    # round-trip exact and locale independent
    csv_float_format = '%.17g'
    # template paths, relative to the package
    summary_template = 'templates/summary_template.py'
    # exceptions that might be generated when reading configs or writing
    # outputs; these should all be caught by the command line front end
    io_exceptions = (OSError, UnicodeDecodeError, EOFError, TypeError,
                     json.JSONDecodeError, configparser.Error)
    # planner discretisation: points per candidate ring
    ring_angles = 360
    # hover site search: lattice spacing and margin around Alice, Bob and
    # the start point (m), lattice points refined, refinement tolerances (m,
    # bits) and objective evaluations per refinement
    site_spacing = 5.0
    site_margin = 50.0
    site_seeds = 12
    site_xtol = 0.01
    site_ftol = 1e-6
    site_max_evals = 400
    # relative tolerance for treating planner objective values as equal
    objective_tie_tol = 1e-12
    # eigenvalues closer than this (relative) count as repeated
    eig_tol = 1e-12
    # rank-1 detection relative to the largest eigenvalue, and the
    # relative off-line component below which a is treated as parallel to e
    rank_tol = 1e-9
    collinear_tol = 1e-10
    hermitian_tol = 1e-10
    default_trials = 200
    ci_level = 0.95
    ci_min_trials = 30
    # caps the Monte-Carlo worker thread count
    threads_env = 'AIRS_SIM_THREADS'
    # instance counts of the validate suites; --quick divides by 10
    validate_counts = {'proposition1': 1000, 'zeta': 1000, 'cubic': 10000,
                       'eigen': 1000, 'scheme2': 100}
    schemes = ('1', '2', 'fixed')
    planner_objectives = ('integrand', 'bound')
    sweep_parameters = ('T', 'P', 'distance', 'K', 'r')
    eve_locations = {'uncorrelated': (-100.0, 50.0, 0.0),
                     'correlated': (75.0, 100.0, 0.0)}
    channel_rho0_db = {'strong': 120.0, 'weak': 60.0}
    # reference scenario, in the same text form as a config file
    scenario_defaults = {
        'M': '4',
        'omega_A': '0, -100, 0',
        'omega_B': '80, 100, 0',
        'eve': 'uncorrelated',
        'omega_fixIRS': '80, 100, 0',
        'q_o': '-100, 100, 100',
        'H': '100',
        'T': '300',
        'Z': '3',
        'alpha': '0.5',
        'f': '900e6',
        'K': '16',
        'd': '0.25',
        'sigma_B2_dB': '30',
        'sigma_E2_dB': '30',
        'channel': 'strong',
        'P_dBm': '1',
        'r': '1',
        'scheme': '2',
        'seed': '1',
        'trials': str(default_trials),
        'planner_objective': 'integrand',
        'share_fading': 'no',
    }
    # keys that only override something set by another key
    optional_keys = ('omega_E', 'Kx', 'Ky', 'rho0_dB')


def db_to_linear(value):
    return 10.0 ** (value / 10.0)


VECTOR_FIELDS = ('omega_a', 'omega_b', 'omega_e', 'omega_fix', 'q_o')


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved scenario, all quantities linear"""

    m: int
    omega_a: Vec3
    omega_b: Vec3
    omega_e: Vec3
    omega_fix: Vec3
    q_o: Vec3
    altitude: float
    total_time: float
    speed: float
    dt: float
    carrier: float
    kx: int
    ky: int
    spacing: float
    sigma_b2: float
    sigma_e2: float
    rho0: float
    power: float
    radius: float
    scheme: str = '2'
    seed: int = 1
    trials: int = Config.default_trials
    planner_objective: str = 'integrand'
    eve_mode: str = 'uncorrelated'
    channel: str = 'strong'
    share_fading: bool = False

    def __post_init__(self):
        for key, val in (('M', self.m), ('Kx', self.kx), ('Ky', self.ky),
                         ('trials', self.trials)):
            if val < 1:
                raise ConfigError(key, msgs.not_positive.format(value=val))
        for key, val in (('H', self.altitude), ('T', self.total_time),
                         ('alpha', self.dt), ('f', self.carrier),
                         ('sigma_B2_dB', self.sigma_b2),
                         ('sigma_E2_dB', self.sigma_e2),
                         ('rho0_dB', self.rho0), ('P_dBm', self.power)):
            if not val > 0:
                raise ConfigError(key, msgs.not_positive.format(value=val))
        for key, val in (('Z', self.speed), ('r', self.radius),
                         ('seed', self.seed)):
            if not val >= 0:
                raise ConfigError(key, msgs.negative.format(value=val))
        if not 0 < self.spacing < 0.5:
            raise ConfigError('d', msgs.spacing_range.format(
                value=self.spacing))
        n = self.total_time / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ConfigError('T', msgs.n_not_integral.format(
                T=self.total_time, alpha=self.dt, n=n))
        if self.scheme not in Config.schemes:
            raise ConfigError('scheme', msgs.bad_choice.format(
                choices=Config.schemes, value=self.scheme))
        if self.planner_objective not in Config.planner_objectives:
            raise ConfigError('planner_objective', msgs.bad_choice.format(
                choices=Config.planner_objectives,
                value=self.planner_objective))

    @property
    def samples(self):
        """N"""
        return int(round(self.total_time / self.dt))

    @property
    def k(self):
        return self.kx * self.ky

    @property
    def wavelength(self):
        return Config.speed_of_light / self.carrier

    @property
    def grid(self):
        return IrsGrid.from_spacing(self.kx, self.ky, self.spacing,
                                    self.carrier, Config.speed_of_light)

    @property
    def flight_plan(self):
        return FlightPlan(self.total_time, self.samples, self.dt, self.speed,
                          self.altitude, self.q_o.with_z(self.altitude))

    @property
    def fixed_position(self):
        """Fixed IRS location, mounted at flight altitude"""
        return self.omega_fix.with_z(self.altitude)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        out = {}
        for fld in dataclasses.fields(self):
            val = getattr(self, fld.name)
            out[fld.name] = list(val) if isinstance(val, Vec3) else val
        return out

    @classmethod
    def from_dict(cls, data):
        names = {fld.name for fld in dataclasses.fields(cls)}
        kwargs = {}
        for key, val in data.items():
            if key not in names:
                raise ConfigError(key, msgs.unknown_key)
            kwargs[key] = Vec3(*map(float, val)) if key in VECTOR_FIELDS \
                else val
        return cls(**kwargs)

    def summary(self):
        return msgs.scenario_summary.format(
            m=self.m, k=self.k, kx=self.kx, ky=self.ky, n=self.samples,
            scheme=self.scheme, channel=self.channel, eve=self.eve_mode,
            seed=self.seed, trials=self.trials)


def _number(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, msgs.bad_number.format(value=text))


def _integer(key, text):
    val = _number(key, text)
    if not val.is_integer():
        raise ConfigError(key, msgs.bad_integer.format(value=text))
    return int(val)


def _vector(key, text):
    parts = [p for p in re.split(r'[,\s]+', text.strip(' []()')) if p]
    if len(parts) != 3:
        raise ConfigError(key, msgs.bad_vector.format(value=text))
    try:
        return Vec3(*(float(p) for p in parts))
    except ValueError:
        raise ConfigError(key, msgs.bad_vector.format(value=text))


def _choice(key, text, choices):
    val = text.strip().lower()
    if val not in choices:
        raise ConfigError(key, msgs.bad_choice.format(choices=tuple(choices),
                                                      value=text))
    return val


def _scheme(key, text):
    val = text.strip().lower()
    val = {'scheme1': '1', 'scheme2': '2'}.get(val, val)
    return _choice(key, val, Config.schemes)


def _boolean(key, text):
    states = configparser.ConfigParser.BOOLEAN_STATES
    val = _choice(key, text, states)
    return states[val]


def square_side(key, text):
    k = _integer(key, text)
    side = math.isqrt(k) if k > 0 else 0
    if side * side != k or k < 1:
        raise ConfigError(key, msgs.not_square.format(value=k))
    return side


# key -> function(key, text) returning a dict of ScenarioConfig fields.
# Keys are applied in this order, so later keys override earlier ones.
_KEY_HANDLERS = (
    ('M', lambda k, t: {'m': _integer(k, t)}),
    ('omega_A', lambda k, t: {'omega_a': _vector(k, t)}),
    ('omega_B', lambda k, t: {'omega_b': _vector(k, t)}),
    ('eve', lambda k, t: {
        'eve_mode': _choice(k, t, Config.eve_locations),
        'omega_e': Vec3(*Config.eve_locations[_choice(
            k, t, Config.eve_locations)])}),
    ('omega_E', lambda k, t: {'omega_e': _vector(k, t),
                              'eve_mode': 'custom'}),
    ('omega_fixIRS', lambda k, t: {'omega_fix': _vector(k, t)}),
    ('q_o', lambda k, t: {'q_o': _vector(k, t)}),
    ('H', lambda k, t: {'altitude': _number(k, t)}),
    ('T', lambda k, t: {'total_time': _number(k, t)}),
    ('Z', lambda k, t: {'speed': _number(k, t)}),
    ('alpha', lambda k, t: {'dt': _number(k, t)}),
    ('f', lambda k, t: {'carrier': _number(k, t)}),
    ('K', lambda k, t: dict.fromkeys(('kx', 'ky'), square_side(k, t))),
    ('Kx', lambda k, t: {'kx': _integer(k, t)}),
    ('Ky', lambda k, t: {'ky': _integer(k, t)}),
    ('d', lambda k, t: {'spacing': _number(k, t)}),
    ('sigma_B2_dB', lambda k, t: {'sigma_b2': db_to_linear(_number(k, t))}),
    ('sigma_E2_dB', lambda k, t: {'sigma_e2': db_to_linear(_number(k, t))}),
    ('channel', lambda k, t: {
        'channel': _choice(k, t, Config.channel_rho0_db),
        'rho0': db_to_linear(Config.channel_rho0_db[_choice(
            k, t, Config.channel_rho0_db)])}),
    ('rho0_dB', lambda k, t: {'rho0': db_to_linear(_number(k, t)),
                              'channel': 'custom'}),
    ('P_dBm', lambda k, t: {'power': db_to_linear(_number(k, t))}),
    ('r', lambda k, t: {'radius': _number(k, t)}),
    ('scheme', lambda k, t: {'scheme': _scheme(k, t)}),
    ('seed', lambda k, t: {'seed': _integer(k, t)}),
    ('trials', lambda k, t: {'trials': _integer(k, t)}),
    ('planner_objective', lambda k, t: {
        'planner_objective': _choice(k, t, Config.planner_objectives)}),
    ('share_fading', lambda k, t: {'share_fading': _boolean(k, t)}),
)
KNOWN_KEYS = tuple(key for key, _ in _KEY_HANDLERS)


def read_keyvalues(text):
    """Parse flat key = value text; section headers are optional"""
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=('#', ';'))
    parser.optionxform = str
    if not re.search(r'^\s*\[', text, re.MULTILINE):
        text = '[scenario]\n' + text
    parser.read_string(text)
    values = {}
    for section in parser.sections():
        values.update(parser[section])
    return values


def _resolve(raw):
    """ScenarioConfig field values for the raw key/value strings given"""
    unknown = set(raw) - set(KNOWN_KEYS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], msgs.unknown_key)
    fields = {}
    explicit_axes = 'Kx' in raw and 'Ky' in raw
    for key, handler in _KEY_HANDLERS:
        if key == 'K' and explicit_axes:
            continue
        if key in raw:
            fields.update(handler(key, str(raw[key])))
    return fields


def warn_lemma1(cfg):
    """Log a warning if the IRS plate exceeds one wavelength"""
    limits = lemma1_limits(cfg.grid)
    if not limits.feasible:
        logger.warning(msgs.lemma1_exceeded.format(
            k=cfg.k, limit=limits.kx_max * limits.ky_max,
            kx_max=limits.kx_max, ky_max=limits.ky_max))
    return limits


def parse_config(path=None, overrides=None):
    """Resolve a scenario from a config file and/or key = value overrides.

    path may also name a run manifest (JSON with a 'scenario' object), in
    which case the recorded scenario is replayed exactly and overrides are
    applied on top of it.
    """
    raw = {}
    base = None
    if path is not None:
        text = Path(path).read_text(encoding='utf-8')
        if text.lstrip().startswith('{'):
            data = json.loads(text)
            if not isinstance(data, dict) or 'scenario' not in data:
                raise ConfigError('config', msgs.bad_manifest)
            base = ScenarioConfig.from_dict(data['scenario'])
        else:
            raw.update(read_keyvalues(text))
    if overrides:
        raw.update({key: str(val) for key, val in overrides.items()})
    if base is None:
        cfg = ScenarioConfig(**_resolve({**Config.scenario_defaults, **raw}))
    else:
        cfg = base.replace(**_resolve(raw))
    warn_lemma1(cfg)
    return cfg

# -*- coding: utf-8 -*-
"""
Far-field channel synthesis between the sensors, the UAV-mounted IRS and the
ground receivers.

All builders broadcast over leading axes of the UAV position, so a whole
trajectory (N, 3) or a set of planner candidates (C, 3) is handled in one
call. Per-element channels live on the last axis (K), sensors on the axis
after it for G, i.e. G has shape (..., K, M).
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import Singularity
from .geometry import as_array

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class FadingDraw:
    """Unit-mean exponential fading of the three links, plus rho0.

    Fields may be scalars or arrays with one entry per time sample.
    """

    varsigma_g: ArrayOrFloat
    varsigma_b: ArrayOrFloat
    varsigma_e: ArrayOrFloat
    rho0: float

    def __post_init__(self):
        if self.rho0 <= 0:
            raise ValueError('rho0 must be positive')
        for val in (self.varsigma_g, self.varsigma_b, self.varsigma_e):
            if np.any(np.asarray(val) <= 0):
                raise ValueError('fading draws must be positive')

    @classmethod
    def mean(cls, rho0):
        return cls(1.0, 1.0, 1.0, rho0)


def draw_fading(seed, rho0, samples, share_bob_eve=False):
    """Draw per-sample fading for one trial.

    Each link gets its own child stream of seed so that flights of different
    length share a common prefix of draws. With share_bob_eve, Eve sees
    exactly Bob's draws.
    """
    seq = (seed if isinstance(seed, np.random.SeedSequence)
           else np.random.SeedSequence(seed))
    gen_g, gen_b, gen_e = (np.random.default_rng(s) for s in seq.spawn(3))
    vs_g = gen_g.exponential(1.0, samples)
    vs_b = gen_b.exponential(1.0, samples)
    vs_e = vs_b.copy() if share_bob_eve else gen_e.exponential(1.0, samples)
    # exponential() can return exactly 0 with vanishing probability
    tiny = np.finfo(float).tiny
    return FadingDraw(np.maximum(vs_g, tiny), np.maximum(vs_b, tiny),
                      np.maximum(vs_e, tiny), rho0)


def distances(a, b):
    dist = np.linalg.norm(as_array(b) - as_array(a), axis=-1)
    if np.any(dist == 0):
        raise Singularity('zero propagation distance')
    return dist


def path_gain(rho0, varsigma, a, b):
    """rho0 * varsigma / |b - a|**2"""
    return rho0 * np.asarray(varsigma) / distances(a, b) ** 2


def bulk_phase(a, b, wavelength):
    """Propagation phase 2*pi*|b - a|/wavelength, not wrapped"""
    return 2 * np.pi * distances(a, b) / wavelength


def element_response_phase(kx_idx, ky_idx, grid, direction):
    """Array response phase of element (kx_idx, ky_idx) toward direction"""
    if not (1 <= kx_idx <= grid.kx and 1 <= ky_idx <= grid.ky):
        raise IndexError('element (%d, %d) outside a %dx%d grid'
                         % (kx_idx, ky_idx, grid.kx, grid.ky))
    a = as_array(direction)
    return float((kx_idx - 1) * grid.dbar_x * a[0]
                 + (ky_idx - 1) * grid.dbar_y * a[1])


def response_phases(grid, directions):
    """Response phases of all elements, shape (..., K) for (..., 3) input"""
    return np.einsum('kc,...c->...k', grid.phase_offsets(),
                     as_array(directions))


@dataclass(frozen=True, eq=False)
class SensorIrsChannel:
    g: np.ndarray  # (..., K, M)
    phi_g: np.ndarray  # (..., K, M)
    gains: np.ndarray  # (..., M)
    bulk: np.ndarray  # (..., M)
    directions: np.ndarray  # (..., M, 3), sensor toward UAV
    dist: np.ndarray  # (..., M)


@dataclass(frozen=True, eq=False)
class GroundChannel:
    h: np.ndarray  # (..., K)
    u: np.ndarray  # (..., K)
    gain: np.ndarray  # (...)
    bulk: np.ndarray  # (...)
    direction: np.ndarray  # (..., 3), UAV toward ground node
    dist: np.ndarray  # (...)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Sensor-IRS and IRS-ground channels at one or more UAV positions"""

    sensors: SensorIrsChannel
    bob: GroundChannel
    eve: GroundChannel

    @property
    def g(self):
        return self.sensors.g

    @property
    def h_b(self):
        return self.bob.h

    @property
    def h_e(self):
        return self.eve.h

    @property
    def phi_g(self):
        return self.sensors.phi_g

    @property
    def u_b(self):
        return self.bob.u

    @property
    def u_e(self):
        return self.eve.u


def build_sensor_irs(field, uav, grid, fading):
    """Channel matrix G from the M sensors to the K elements"""
    q = as_array(uav)[..., None, :]
    sensors = field.positions
    vs_g = np.asarray(fading.varsigma_g, dtype=float)[..., None]
    dist = distances(sensors, q)
    gains = path_gain(fading.rho0, vs_g, sensors, q)
    bulk = bulk_phase(sensors, q, grid.wavelength)
    dirs = (q - sensors) / dist[..., None]
    phi_g = np.swapaxes(response_phases(grid, dirs), -1, -2)
    scale = np.sqrt(gains) * np.exp(-1j * bulk)
    g = scale[..., None, :] * np.exp(-1j * phi_g)
    return SensorIrsChannel(g, phi_g, gains, bulk, dirs, dist)


def build_irs_ground(uav, target, grid, rho0, varsigma):
    """Channel vector h from the K elements to a ground node"""
    q = as_array(uav)
    dist = distances(q, target)
    gain = path_gain(rho0, varsigma, q, target)
    bulk = bulk_phase(q, target, grid.wavelength)
    direction = (as_array(target) - q) / np.asarray(dist)[..., None]
    u = response_phases(grid, direction)
    scale = np.asarray(np.sqrt(gain) * np.exp(-1j * bulk))
    h = scale[..., None] * np.exp(-1j * u)
    return GroundChannel(h, u, gain, bulk, direction, dist)


def build_channel_set(field, uav, grid, fading, omega_b, omega_e):
    return ChannelSet(
        build_sensor_irs(field, uav, grid, fading),
        build_irs_ground(uav, omega_b, grid, fading.rho0, fading.varsigma_b),
        build_irs_ground(uav, omega_e, grid, fading.rho0, fading.varsigma_e))

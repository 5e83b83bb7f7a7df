# -*- coding: utf-8 -*-
"""
Node placement, sensor fields and the IRS element lattice.

Positions are held as Vec3 at the API boundary; the numerical code works on
plain numpy arrays of shape (..., 3), see as_array().
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDirection, EmptyField

logger = logging.getLogger(__name__)

# slack for floating point comparisons against lattice limits
LIMIT_SLACK = 1e-9


@dataclass(frozen=True)
class Vec3:
    """Position or direction in meters"""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError('non-finite vector component in %r' % (self,))

    @classmethod
    def from_array(cls, arr):
        x, y, z = np.asarray(arr, dtype=float).reshape(3)
        return cls(float(x), float(y), float(z))

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def norm(self):
        return float(np.linalg.norm(self.as_array()))

    def with_z(self, z):
        return Vec3(self.x, self.y, float(z))

    def __add__(self, other):
        return Vec3.from_array(self.as_array() + as_array(other))

    def __sub__(self, other):
        return Vec3.from_array(self.as_array() - as_array(other))

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def as_array(v):
    """Return a float array of shape (..., 3) for a Vec3 or array-like"""
    if isinstance(v, Vec3):
        return v.as_array()
    return np.asarray(v, dtype=float)


def unit_vectors(a, b):
    """Batched unit vectors from a to b, broadcasting over leading axes"""
    diff = as_array(b) - as_array(a)
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist == 0):
        raise DegenerateDirection('direction between coincident points')
    return diff / dist[..., None]


def unit_vector(a, b):
    """Unit vector pointing from a to b"""
    return Vec3.from_array(unit_vectors(a, b))


@dataclass(frozen=True, eq=False)
class SensorField:
    """Ground sensors placed around center. positions has shape (M, 3)"""

    center: Vec3
    radius: float
    positions: np.ndarray

    @property
    def count(self):
        return self.positions.shape[0]

    @property
    def points(self):
        return [Vec3.from_array(p) for p in self.positions]


def disk_offsets(radius, m, seed):
    """Uniform draws over a disk of the given radius, shape (m, 2).

    The two uniform variates per sensor come from the same stream for any
    radius, so fields drawn with equal seed and count differ only by scale.
    """
    rng = np.random.default_rng(seed)
    u = rng.random(m)
    v = rng.random(m)
    rad = radius * np.sqrt(u)
    ang = 2 * np.pi * v
    return np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))


def place_sensors(center, r, m, seed):
    """Place m sensors uniformly over the disk of radius r around center.

    The sensors are on the ground (z=0). r=0 puts every sensor at the
    center.
    """
    if m < 1:
        raise EmptyField('a sensor field needs at least one sensor')
    if r < 0:
        raise ValueError('sensor field radius must be nonnegative')
    c = as_array(center)
    offsets = disk_offsets(r, m, seed)
    positions = np.zeros((m, 3))
    positions[:, 0] = c[0] + offsets[:, 0]
    positions[:, 1] = c[1] + offsets[:, 1]
    return SensorField(center=Vec3.from_array(c), radius=float(r),
                       positions=positions)


@dataclass(frozen=True)
class IrsGrid:
    """Rectangular IRS element lattice in the horizontal plane.

    Elements are indexed 1..kx along x and 1..ky along y. Flat element
    index k runs with ky fastest: k = (kx_idx - 1) * ky + (ky_idx - 1).
    """

    kx: int
    ky: int
    dx: float
    dy: float
    wavelength: float
    carrier: float

    def __post_init__(self):
        if self.kx < 1 or self.ky < 1:
            raise ValueError('IRS needs at least one element per axis')
        if self.wavelength <= 0:
            raise ValueError('wavelength must be positive')
        if not (0 < self.dx < self.wavelength / 2
                and 0 < self.dy < self.wavelength / 2):
            raise ValueError('element spacing must be below half a wavelength')

    @classmethod
    def from_spacing(cls, kx, ky, spacing, carrier, speed_of_light):
        """Grid with dx = dy = spacing * wavelength"""
        wavelength = speed_of_light / carrier
        return cls(kx, ky, spacing * wavelength, spacing * wavelength,
                   wavelength, carrier)

    @property
    def k(self):
        return self.kx * self.ky

    @property
    def dbar_x(self):
        return 2 * np.pi * self.dx / self.wavelength

    @property
    def dbar_y(self):
        return 2 * np.pi * self.dy / self.wavelength

    @property
    def zx(self):
        return self.wavelength / self.dx

    @property
    def zy(self):
        return self.wavelength / self.dy

    def index_pairs(self):
        """1-based (kx_idx, ky_idx) of each flat element index, shape (K, 2)"""
        ix, iy = np.meshgrid(np.arange(1, self.kx + 1),
                             np.arange(1, self.ky + 1), indexing='ij')
        return np.column_stack((ix.ravel(), iy.ravel()))

    def offsets(self):
        """Element offsets from the reference element in meters, (K, 3)"""
        pairs = self.index_pairs() - 1
        out = np.zeros((self.k, 3))
        out[:, 0] = pairs[:, 0] * self.dx
        out[:, 1] = pairs[:, 1] * self.dy
        return out

    def phase_offsets(self):
        """Offsets in radians, so that <phase_offsets[k], a> is phi^b_k"""
        pairs = self.index_pairs() - 1
        out = np.zeros((self.k, 3))
        out[:, 0] = pairs[:, 0] * self.dbar_x
        out[:, 1] = pairs[:, 1] * self.dbar_y
        return out


def irs_element_positions(q_ref, grid):
    """Positions of all K elements; element 1 sits at q_ref"""
    pos = as_array(q_ref) + grid.offsets()
    return [Vec3.from_array(p) for p in pos]


class Lemma1Limits(NamedTuple):
    kx_max: int
    ky_max: int
    feasible: bool


def lemma1_limits(grid):
    """Largest element counts keeping the plate within one wavelength"""
    kx_max = int(math.floor(grid.zx + LIMIT_SLACK))
    ky_max = int(math.floor(grid.zy + LIMIT_SLACK))
    feasible = (grid.kx <= grid.zx + LIMIT_SLACK
                and grid.ky <= grid.zy + LIMIT_SLACK)
    return Lemma1Limits(kx_max, ky_max, feasible)


class PlateExtent(NamedTuple):
    width: float
    height: float
    area: float
    width_wavelengths: float
    area_wavelengths2: float


def plate_extent(grid):
    """Physical plate size, also expressed in wavelengths"""
    width = grid.kx * grid.dx
    height = grid.ky * grid.dy
    area = width * height
    return PlateExtent(width, height, area, width / grid.wavelength,
                       area / grid.wavelength ** 2)


@dataclass(frozen=True)
class FlightPlan:
    """Time sampling and kinematic limits of the UAV flight"""

    total_time: float
    samples: int
    dt: float
    speed: float
    altitude: float
    start: Vec3

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError('flight needs at least one sample')
        if abs(self.dt * self.samples - self.total_time) > 1e-9 * max(
                1.0, self.total_time):
            raise ValueError('sample interval does not divide the flight time')
        if self.speed < 0:
            raise ValueError('speed must be nonnegative')
        if self.altitude <= 0:
            raise ValueError('altitude must be positive')

    @property
    def step_limit(self):
        """Largest distance covered in one sample interval"""
        return self.speed * self.dt

    @property
    def start_position(self):
        """Start point at flight altitude"""
        return self.start.with_z(self.altitude)

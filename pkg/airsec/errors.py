# -*- coding: utf-8 -*-
"""
Exceptions raised by airsec.

Everything the simulator raises on purpose derives from AirsecError, so the
command line front end can report it as a one-line message instead of a
traceback.
"""


class AirsecError(Exception):
    """Base class for simulator errors."""


class DegenerateDirection(AirsecError):
    """Direction requested between coincident points."""


class EmptyField(AirsecError):
    """Sensor field with no sensors."""


class Singularity(AirsecError):
    """Zero propagation distance (path gain or phase undefined)."""


class DimensionError(AirsecError, ValueError):
    """Operands with inconsistent lengths."""


class ShapeError(AirsecError, ValueError):
    """Matrix of the wrong shape or symmetry."""


class ZeroChannel(AirsecError):
    """Effective channel vanishes, so no beamforming direction exists."""


class DegenerateGeometry(AirsecError):
    """Node placement that the trajectory closed forms cannot handle."""


class Infeasible(AirsecError):
    """Candidate ring with a negative radicand."""


class ConfigError(AirsecError, ValueError):
    """Invalid scenario configuration. The offending key is kept in .field"""

    def __init__(self, field, msg):
        self.field = field
        super().__init__('%s: %s' % (field, msg))

# -*- coding: utf-8 -*-
"""
Upper bounds on the per-sensor effective channels and on the SNRs.

chi_bob() and zeta_and_chi_eve() bound |(h_i^H Theta G)[m]| for Bob and
Eve. snr_upper_bound() turns them into bounds on gamma_i. All functions
broadcast over leading axes (time samples).
"""

import logging
from dataclasses import dataclass

import numpy as np

from .channel import response_phases

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoundsReport:
    chi_b: np.ndarray
    chi_e: np.ndarray
    zeta: np.ndarray
    gamma_b_ub: np.ndarray
    gamma_e_ub: np.ndarray
    pbar_b: float
    pbar_e: float


def _trailing(x):
    """Append an axis so per-link values broadcast against per-sensor ones"""
    return np.asarray(x, dtype=float)[..., None]


def chi_bob(c_mr, c_rb, phase_mr, phase_rb, k, theta_com=0.0):
    """Per-sensor bound on Bob's effective channel, shape (..., M)"""
    c_mr = np.asarray(c_mr, dtype=float)
    if np.any(c_mr <= 0) or np.any(np.asarray(c_rb) <= 0):
        raise ValueError('channel gains must be positive')
    mag = k * np.sqrt(_trailing(c_rb) * c_mr)
    return mag * np.exp(-1j * (np.asarray(phase_mr) + _trailing(phase_rb)
                               - theta_com))


def zeta_and_chi_eve(grid, dir_eve, dir_bob, dir_sensors, u_g, c_mr, c_re,
                     phase_mr, phase_re, theta_com=0.0):
    """Directional coherence sums toward Eve and her per-sensor bound.

    dir_eve and dir_bob point from the UAV to the ground nodes (..., 3),
    dir_sensors from each sensor to the UAV (..., M, 3). Returns zeta and
    chi_E, both (..., M).
    """
    u_g = np.asarray(u_g, dtype=float)
    offset = response_phases(grid, np.asarray(dir_eve) - np.asarray(dir_bob))
    bracket = (offset[..., None, :] - response_phases(grid, dir_sensors)
               + u_g[..., None, :])
    zeta = np.exp(1j * bracket).sum(axis=-1)
    mag = np.sqrt(_trailing(c_re) * np.asarray(c_mr, dtype=float))
    chi = mag * np.exp(-1j * (_trailing(phase_re) + np.asarray(phase_mr)
                              - theta_com)) * zeta
    return zeta, chi


def snr_upper_bound(pbar, rho0, varsigma, gain, d_link, d_mr, m=None,
                    varsigma_g=None):
    """Sum over sensors of pbar (rho0 K)^2 vs vs_G / (d_link d_mR)^2.

    gain is K for Bob or the per-sensor zeta for Eve. varsigma_g defaults
    to varsigma. A scalar d_mr is repeated for m sensors.
    """
    d_mr = np.asarray(d_mr, dtype=float)
    if m is not None and d_mr.ndim == 0:
        d_mr = np.full(m, float(d_mr))
    if np.any(d_mr <= 0) or np.any(np.asarray(d_link) <= 0):
        raise ValueError('distances must be positive')
    vs_g = varsigma if varsigma_g is None else varsigma_g
    terms = (pbar * rho0 ** 2 * _trailing(varsigma) * _trailing(vs_g)
             * np.abs(gain) ** 2 / (_trailing(d_link) ** 2 * d_mr ** 2))
    return terms.sum(axis=-1)


def snr_upper_bounds(pbar_b, pbar_e, rho0, fading, k, zeta, d_rb, d_re,
                     d_mr):
    """(gammaB_ub, gammaE_ub) for one fading draw"""
    ub_b = snr_upper_bound(pbar_b, rho0, fading.varsigma_b, k, d_rb, d_mr,
                           varsigma_g=fading.varsigma_g)
    ub_e = snr_upper_bound(pbar_e, rho0, fading.varsigma_e, zeta, d_re, d_mr,
                           varsigma_g=fading.varsigma_g)
    return ub_b, ub_e


def evaluate_bounds(channels, reflection, grid, fading, power, sigma_b2,
                    sigma_e2):
    """All bound quantities for a ChannelSet and its reflection design"""
    sens, bob, eve = channels.sensors, channels.bob, channels.eve
    chi_b = chi_bob(sens.gains, bob.gain, sens.bulk, bob.bulk, grid.k,
                    reflection.theta_com)
    zeta, chi_e = zeta_and_chi_eve(grid, eve.direction, bob.direction,
                                   sens.directions, reflection.u_g,
                                   sens.gains, eve.gain, sens.bulk, eve.bulk,
                                   reflection.theta_com)
    pbar_b = power / sigma_b2
    pbar_e = power / sigma_e2
    ub_b, ub_e = snr_upper_bounds(pbar_b, pbar_e, fading.rho0, fading,
                                  grid.k, zeta, bob.dist, eve.dist, sens.dist)
    return BoundsReport(chi_b, chi_e, zeta, ub_b, ub_e, pbar_b, pbar_e)


def _line_factor(n, a):
    a = np.asarray(a, dtype=float)
    half = np.sin(a / 2)
    small = np.abs(half) < 1e-6
    # near multiples of 2pi the sine ratio is replaced by its limit form
    limit = n * np.cos(n * a / 2) / np.cos(a / 2)
    ratio = np.where(small, limit,
                     np.sin(n * a / 2) / np.where(small, 1.0, half))
    return np.exp(1j * (n - 1) * a / 2) * ratio


def array_factor(kx, ky, ax, ay):
    """Closed form of sum over the lattice of exp(j((kx-1) ax + (ky-1) ay))"""
    return _line_factor(kx, ax) * _line_factor(ky, ay)

# -*- coding: utf-8 -*-
"""
Reflection phase design, sensor beamforming weights and link quality.

The received scalar at ground node i is h_i^H Theta G w. Functions accept
leading batch axes (time samples or planner candidates) where noted.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .config import Config
from .errors import DimensionError, ShapeError, ZeroChannel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReflectionState:
    """IRS phases theta (wrapped to [0, 2pi)), common phase and u_G"""

    theta: np.ndarray
    theta_com: float
    u_g: np.ndarray

    @property
    def coefficients(self):
        """Diagonal of Theta"""
        return np.exp(1j * self.theta)


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Sensor weights w with the quadratic forms they were designed from.
    b_mat is None for MRT, which never looks at Eve."""

    w: np.ndarray
    power: float
    a_mat: np.ndarray
    b_mat: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SnrReport:
    gamma_b: float
    gamma_e: float
    sigma_b2: float
    sigma_e2: float
    rate_raw: float
    rate_clamped: float

    @classmethod
    def from_snrs(cls, gamma_b, gamma_e, sigma_b2, sigma_e2):
        raw, clamped = secrecy_rate(gamma_b, gamma_e)
        return cls(gamma_b, gamma_e, sigma_b2, sigma_e2, raw, clamped)


def _phases(theta):
    if isinstance(theta, ReflectionState):
        return theta.theta
    return np.asarray(theta, dtype=float)


def rank1_phase_vector(phi_g):
    """Column representative of the best rank-1 approximation of phi_g.

    Returns sigma1 * u1 * mean(v1), i.e. the mean column of phi_g projected
    on the leading left singular vector. Identical columns give that column
    back exactly.
    """
    phi = np.asarray(phi_g, dtype=float)
    if phi.ndim < 2 or phi.shape[-1] < 1 or phi.shape[-2] < 1:
        raise DimensionError('phase matrix must be K x M with K, M >= 1')
    u, s, vh = np.linalg.svd(phi, full_matrices=False)
    scale = s[..., 0] * vh[..., 0, :].mean(axis=-1)
    return u[..., :, 0] * scale[..., None]


def reflection_phases(u_b, u_g, theta_com=0.0):
    """Co-phasing reflection design toward Bob"""
    u_b = np.asarray(u_b, dtype=float)
    u_g = np.asarray(u_g, dtype=float)
    if u_b.shape != u_g.shape:
        raise DimensionError('u_B and u_G lengths differ: %s vs %s'
                             % (u_b.shape, u_g.shape))
    # h^H Theta G carries exp(j(u_B + theta - PhiG)) per element
    theta = np.mod(theta_com - u_b + u_g, 2 * np.pi)
    return ReflectionState(theta, theta_com, u_g)


def effective_row(h, theta, g):
    """Row vector h^H Theta G, shape (..., M)"""
    h = np.asarray(h)
    g = np.asarray(g)
    th = _phases(theta)
    if h.shape[-1] != g.shape[-2] or th.shape[-1] != h.shape[-1]:
        raise DimensionError('h has %d elements, Theta %d, G has %d rows'
                             % (h.shape[-1], th.shape[-1], g.shape[-2]))
    return np.einsum('...k,...km->...m', np.conj(h) * np.exp(1j * th), g)


def quadratic_form(row, sigma2):
    """Rank-1 Hermitian matrix row^H row / sigma2"""
    row = np.asarray(row)
    return np.conj(row)[..., :, None] * row[..., None, :] / sigma2


def phase_normalise(vec):
    """Rotate vec so that its largest-magnitude component is real positive"""
    vec = np.asarray(vec, dtype=complex)
    idx = np.argmax(np.abs(vec), axis=-1)
    pivot = np.take_along_axis(vec, idx[..., None], axis=-1)
    mag = np.abs(pivot)
    rot = np.where(mag > 0, np.conj(pivot) / np.where(mag > 0, mag, 1), 1)
    return vec * rot


def max_eigvec_hermitian(mat):
    """Largest eigenvalue of a Hermitian matrix and a unit eigenvector.

    A repeated top eigenvalue resolves to the projection of the first
    canonical basis vector that has the largest component in the top
    eigenspace.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise ShapeError('expected a square matrix, got shape %s'
                         % (mat.shape,))
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.conj().T).max() > Config.hermitian_tol * scale:
        raise ShapeError('matrix is not Hermitian')
    vals, vecs = scipy.linalg.eigh(mat)
    top = vals[-1]
    tied = vals >= top - Config.eig_tol * max(1.0, abs(top))
    if np.count_nonzero(tied) > 1:
        space = vecs[:, tied]
        i = int(np.argmax(np.round(np.linalg.norm(space, axis=1), 12)))
        vec = space @ np.conj(space[i])
        vec = vec / np.linalg.norm(vec)
    else:
        vec = vecs[:, -1]
    return float(top), phase_normalise(vec)


def mrt_weights(row, power):
    """Full-power maximum ratio weights for effective row(s)"""
    row = np.asarray(row)
    norm = np.linalg.norm(row, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ZeroChannel('effective channel to Bob vanishes')
    return np.sqrt(power) * np.conj(row) / norm


def weights_scheme1(h_b, theta, g, power, sigma_b2):
    """MRT toward Bob through the IRS"""
    if power <= 0:
        raise ValueError('transmit power must be positive')
    row = effective_row(h_b, theta, g)
    return Beamformer(mrt_weights(row, power), power,
                      quadratic_form(row, sigma_b2))


def _top_direction(mat):
    return np.linalg.eigh(mat)[1][..., :, -1]


def _rank_one(vals):
    """Rows of ascending eigenvalues that belong to rank <= 1 matrices"""
    if vals.shape[-1] == 1:
        return np.ones(vals.shape[0], dtype=bool)
    scale = np.abs(vals).max(axis=-1)
    return np.abs(vals[:, :-1]).max(axis=-1) <= Config.rank_tol * scale


def _orthogonal_unit(q):
    """Unit vector orthogonal to unit q, built from the canonical vector q
    overlaps least"""
    k = int(np.argmin(np.abs(q)))
    vec = -q * np.conj(q[k])
    vec[k] += 1
    return vec / np.linalg.norm(vec)


def scheme2_rank1_directions(a_vec, e_vec, power):
    """scheme2_directions() for A = a a^H and B = e e^H, batched.

    The maximiser lies in span{a, e}. In an orthonormal basis (e/|e|, q2) of
    that span the problem whitens to a 2x2 Hermitian eigenproblem, so no
    matrix of the size of |e|^2 is ever factored. The result does not depend
    on the phases of a and e. Without Eve (e = 0) the direction is a/|a|;
    a parallel to e gives e/|e| when Bob gains at least as much as Eve along
    it and a unit vector orthogonal to e otherwise.
    """
    a = np.asarray(a_vec, dtype=complex)
    e = np.asarray(e_vec, dtype=complex)
    if a.shape != e.shape or a.ndim == 0 or a.shape[-1] == 0:
        raise ShapeError('a and e must be nonempty vectors of equal shape')
    m = a.shape[-1]
    batch = a.shape[:-1]
    a = a.reshape(-1, m)
    e = e.reshape(-1, m)
    v = np.zeros_like(a)
    norm_a = np.linalg.norm(a, axis=1)
    norm_e = np.linalg.norm(e, axis=1)

    no_eve = norm_e == 0
    v[no_eve] = a[no_eve]
    v[no_eve & (norm_a == 0), 0] = 1

    idx = np.flatnonzero(~no_eve)
    q1 = e[idx] / norm_e[idx, None]
    a_par = np.einsum('bi,bi->b', np.conj(q1), a[idx])
    resid = a[idx] - q1 * a_par[:, None]
    # second Gram-Schmidt pass
    resid -= q1 * np.einsum('bi,bi->b', np.conj(q1), resid)[:, None]
    n_perp = np.linalg.norm(resid, axis=1)
    ne = norm_e[idx]

    spanned = n_perp > Config.collinear_tol * norm_a[idx]
    if spanned.any():
        s1 = 1 / np.sqrt(1 / power + ne[spanned] ** 2)
        s2 = np.sqrt(power)
        c = np.stack((s1 * a_par[spanned], s2 * n_perp[spanned] + 0j),
                     axis=1)
        w_mat = c[:, :, None] * np.conj(c)[:, None, :]
        w_mat[:, 0, 0] += s1 ** 2 / power
        w_mat[:, 1, 1] += 1
        y = np.linalg.eigh(w_mat)[1][:, :, -1]
        q2 = resid[spanned] / n_perp[spanned, None]
        v[idx[spanned]] = q1[spanned] * (s1 * y[:, 0])[:, None] \
            + q2 * (s2 * y[:, 1])[:, None]
    for j in np.flatnonzero(~spanned):
        bob_wins = abs(a_par[j]) ** 2 >= ne[j] ** 2 * (1 - Config.eig_tol)
        v[idx[j]] = q1[j] if bob_wins or m == 1 else _orthogonal_unit(q1[j])

    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return phase_normalise(v).reshape(batch + (m,))


def _whitened_directions(a_flat, b_vals, b_vecs, power):
    """Generalized eigenvectors for full-rank A or B, whitening B + I/P
    through its eigendecomposition"""
    m = a_flat.shape[-1]
    ridge = np.eye(m) / power
    scale = 1 / np.sqrt(np.maximum(b_vals, 0) + 1 / power)
    b_vecs_h = np.conj(np.swapaxes(b_vecs, -1, -2))
    root = (b_vecs * scale[:, None, :]) @ b_vecs_h
    whitened = root @ (a_flat + ridge) @ root
    whitened = 0.5 * (whitened + np.conj(np.swapaxes(whitened, -1, -2)))
    vals, vecs = np.linalg.eigh(whitened)
    v = np.einsum('bij,bj->bi', root, vecs[:, :, -1])
    if m > 1:
        top = vals[:, -1]
        tol = Config.eig_tol * np.maximum(1.0, np.abs(top))
        for i in np.flatnonzero(top - vals[:, -2] <= tol):
            sel = vals[i] >= top[i] - tol[i]
            basis, _ = np.linalg.qr(root[i] @ vecs[i][:, sel])
            mrt = _top_direction(a_flat[i])
            proj = basis @ (np.conj(basis.T) @ mrt)
            if np.linalg.norm(proj) > 0:
                v[i] = proj
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def scheme2_directions(a_mat, b_mat, power):
    """Unit maximisers of (1 + w^H A w)/(1 + w^H B w) on |w|^2 = P.

    Solves the generalized problem (A + I/P) v = lambda (B + I/P) v, batched
    over leading axes. Pairs of rank-1 matrices go through
    scheme2_rank1_directions() on their scaled top eigenvectors; other pairs
    whiten B + I/P. A repeated top eigenvalue takes the MRT direction of A
    projected on the top eigenspace.
    """
    a_mat = np.asarray(a_mat, dtype=complex)
    b_mat = np.asarray(b_mat, dtype=complex)
    if a_mat.shape != b_mat.shape or a_mat.ndim < 2 \
            or a_mat.shape[-1] != a_mat.shape[-2]:
        raise ShapeError('A and B must be square and of equal shape')
    m = a_mat.shape[-1]
    batch = a_mat.shape[:-2]
    a_flat = a_mat.reshape(-1, m, m)
    a_vals, a_vecs = np.linalg.eigh(a_flat)
    b_vals, b_vecs = np.linalg.eigh(b_mat.reshape(-1, m, m))
    rank1 = _rank_one(a_vals) & _rank_one(b_vals)
    v = np.empty(a_flat.shape[:2], dtype=complex)
    if rank1.any():
        a_vec = a_vecs[rank1, :, -1] \
            * np.sqrt(np.maximum(a_vals[rank1, -1], 0))[:, None]
        e_vec = b_vecs[rank1, :, -1] \
            * np.sqrt(np.maximum(b_vals[rank1, -1], 0))[:, None]
        v[rank1] = scheme2_rank1_directions(a_vec, e_vec, power)
    full = ~rank1
    if full.any():
        v[full] = _whitened_directions(a_flat[full], b_vals[full],
                                       b_vecs[full], power)
    return phase_normalise(v).reshape(batch + (m,))


def weights_scheme2(a_mat, b_mat, power):
    """Generalized-eigenvector weights trading Bob's SNR against Eve's"""
    if power <= 0:
        raise ValueError('transmit power must be positive')
    w = np.sqrt(power) * scheme2_directions(a_mat, b_mat, power)
    return Beamformer(w, power, np.asarray(a_mat), np.asarray(b_mat))


def scheme2_objective(w, a_mat, b_mat):
    """(1 + w^H A w)/(1 + w^H B w)"""
    num = np.real(np.einsum('...i,...ij,...j->...', np.conj(w), a_mat, w))
    den = np.real(np.einsum('...i,...ij,...j->...', np.conj(w), b_mat, w))
    return (1 + num) / (1 + den)


def snr_from_row(row, w, sigma2):
    """|row . w|^2 / sigma2 for an effective row h^H Theta G"""
    row = np.asarray(row)
    w = np.asarray(w)
    if row.shape[-1] != w.shape[-1]:
        raise DimensionError('G has %d columns but w has %d entries'
                             % (row.shape[-1], w.shape[-1]))
    return np.abs(np.einsum('...m,...m->...', row, w)) ** 2 / sigma2


def snr(h, theta, g, w, sigma2):
    """Linear SNR of the node with channel h"""
    if sigma2 <= 0:
        raise ValueError('noise power must be positive')
    return snr_from_row(effective_row(h, theta, g), w, sigma2)


def secrecy_rate(gamma_b, gamma_e):
    """Raw and clamped secrecy rate in bits"""
    raw = (np.log1p(gamma_b) - np.log1p(gamma_e)) / np.log(2)
    return raw, np.maximum(0.0, raw)


def information_rate(gamma):
    """log2(1 + gamma)"""
    return np.log1p(gamma) / np.log(2)

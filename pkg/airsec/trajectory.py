# -*- coding: utf-8 -*-
"""
Speed-constrained UAV trajectory planner.

Each step solves a cubic in epsilon whose positive real roots define
candidate rings q_x^2 + q_y^2 = (epsilon |Omega_A|)^2 - H^2 around the
origin. Ring points within one step of the previous position compete on a
secrecy objective. When none is in reach the UAV flies full steps toward a
hover site, found once per flight by a lattice search with Nelder-Mead
refinement, and hovers there. Rings and the search region only see Alice,
Bob and the start point. Eve enters through the objective alone.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from . import msgs
from .config import Config
from .errors import DegenerateGeometry, Infeasible
from .geometry import Vec3, as_array

logger = logging.getLogger(__name__)

# an objective maps candidate positions (C, 3) to values (C,)
Objective = Callable[[np.ndarray], np.ndarray]


def cubic_discriminant(b, c, d):
    return (b * c) ** 2 + 18 * b * c * d - 4 * c ** 3 - 4 * b ** 3 * d \
        - 27 * d ** 2


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficients of eps^3 - b eps^2 + c eps + d = 0"""

    b: float
    c: float
    d: float
    delta: float

    @classmethod
    def from_bcd(cls, b, c, d):
        return cls(b, c, d, cubic_discriminant(b, c, d))

    @property
    def roots(self):
        """Real roots, ascending"""
        return tuple(solve_epsilon(self))

    def residual(self, eps):
        return eps ** 3 - self.b * eps ** 2 + self.c * eps + self.d


def cubic_coefficients(omega_a, omega_b, q_prev, speed, dt):
    na = float(np.linalg.norm(as_array(omega_a)))
    if na == 0:
        raise DegenerateGeometry('Alice at the origin')
    nb = float(np.linalg.norm(as_array(omega_b)))
    nq = float(np.linalg.norm(as_array(q_prev)))
    step = speed * dt
    b = nb / (2 * na) + 2 * nq / na + 0.5
    c = (nb * nq + nq ** 2) / na ** 2 - nq / na
    d = (nb / (2 * na)) * nq ** 2 / na ** 2 + nq ** 2 / (2 * na ** 2) \
        - step ** 2 / (2 * na ** 2)
    return CubicCoeffs.from_bcd(b, c, d)


def _polish(coeffs, eps):
    """Newton refinement, keeping the iterate with the smallest residual"""
    best, best_res = eps, abs(coeffs.residual(eps))
    for _ in range(8):
        slope = 3 * eps ** 2 - 2 * coeffs.b * eps + coeffs.c
        if slope == 0:
            break
        step = coeffs.residual(eps) / slope
        eps -= step
        res = abs(coeffs.residual(eps))
        if res < best_res:
            best, best_res = eps, res
        if abs(step) <= 1e-16 * max(1.0, abs(eps)):
            break
    return best


def solve_epsilon(coeffs):
    """All real roots of eps^3 - b eps^2 + c eps + d = 0, ascending.

    Trigonometric/Cardano solution of the depressed cubic followed by Newton
    polishing; equal roots are reported once.
    """
    b, c, d = coeffs.b, coeffs.c, coeffs.d
    shift = b / 3
    p = c - b ** 2 / 3
    q = -2 * b ** 3 / 27 + b * c / 3 + d
    disc = (q / 2) ** 2 + (p / 3) ** 3
    if p == 0 and q == 0:
        ts = [0.0]
    elif disc > 0:
        root = math.sqrt(disc)
        ts = [float(np.cbrt(-q / 2 + root) + np.cbrt(-q / 2 - root))]
    else:
        amp = 2 * math.sqrt(-p / 3)
        arg = 3 * q / (p * amp) if p != 0 else 0.0
        phi = math.acos(min(1.0, max(-1.0, arg)))
        ts = [amp * math.cos((phi - 2 * math.pi * j) / 3) for j in range(3)]
    roots = sorted(_polish(coeffs, t + shift) for t in ts)
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-12 * max(1.0, abs(r)):
            out.append(r)
    return out


def companion_roots(coeffs):
    """Roots of the cubic from the eigenvalues of its companion matrix"""
    comp = np.array([[coeffs.b, -coeffs.c, -coeffs.d],
                     [1.0, 0.0, 0.0],
                     [0.0, 1.0, 0.0]])
    return np.linalg.eigvals(comp)


def candidate_ring(epsilon, omega_a, altitude):
    """Radius of the ring at altitude H belonging to epsilon"""
    if epsilon <= 0:
        raise Infeasible('epsilon must be positive, got %g' % epsilon)
    na = float(np.linalg.norm(as_array(omega_a)))
    radicand = (epsilon * na) ** 2 - altitude ** 2
    if radicand < 0:
        raise Infeasible('ring below flight altitude (eps=%g)' % epsilon)
    return math.sqrt(radicand)


@dataclass(frozen=True)
class Ring:
    epsilon: float
    radius: float


def feasible_rings(coeffs, omega_a, altitude):
    rings = []
    for eps in coeffs.roots:
        try:
            rings.append(Ring(eps, candidate_ring(eps, omega_a, altitude)))
        except Infeasible:
            continue
    return rings


@dataclass(frozen=True)
class StepChoice:
    position: np.ndarray
    displacement: float
    epsilon: float  # nan unless a ring point was chosen
    ring_radius: float


@dataclass(frozen=True)
class HoverSite:
    """Best hover position found by find_hover_site()"""

    position: np.ndarray
    value: float


def _ring_points(ring, z, n_angles):
    ang = 2 * np.pi * np.arange(n_angles) / n_angles
    pts = np.empty((n_angles, 3))
    pts[:, 0] = ring.radius * np.cos(ang)
    pts[:, 1] = ring.radius * np.sin(ang)
    pts[:, 2] = z
    return pts


def _best(values, displacement):
    """Index of the best value; near ties go to the smallest displacement,
    then to the smallest index"""
    top = np.max(values)
    tol = Config.objective_tie_tol * max(1.0, abs(top))
    tied = np.flatnonzero(values >= top - tol)
    return int(tied[np.argmin(displacement[tied])])


def _hover(q):
    return StepChoice(q.copy(), 0.0, math.nan, math.nan)


def site_lattice(omega_a, omega_b, start, spacing=Config.site_spacing,
                 margin=Config.site_margin):
    """Square lattice of candidate hover positions at the start altitude.

    The lattice covers the horizontal bounding box of Alice, Bob and the
    start point, widened by margin on every side.
    """
    if spacing <= 0:
        raise ValueError('lattice spacing must be positive')
    start = as_array(start).astype(float)
    corners = np.array([as_array(omega_a)[:2], as_array(omega_b)[:2],
                        start[:2]], dtype=float)
    low = corners.min(axis=0) - margin
    high = corners.max(axis=0) + margin
    xs = np.arange(low[0], high[0] + spacing / 2, spacing)
    ys = np.arange(low[1], high[1] + spacing / 2, spacing)
    gx, gy = np.meshgrid(xs, ys, indexing='ij')
    pts = np.empty((gx.size, 3))
    pts[:, 0] = gx.ravel()
    pts[:, 1] = gy.ravel()
    pts[:, 2] = start[2]
    return pts


def find_hover_site(objective, omega_a, omega_b, start,
                    spacing=Config.site_spacing, seeds=Config.site_seeds,
                    xtol=Config.site_xtol, max_evals=Config.site_max_evals):
    """Position in the flight plane where the UAV should settle.

    The objective is scored over site_lattice(); the best seeds lattice
    points are refined with Nelder-Mead and the best refined point wins.
    The start point keeps the site unless something beats it by more than
    the tie tolerance. Alice, Bob and the start point only bound the search;
    Eve enters through the objective alone.
    """
    q0 = as_array(start).astype(float)
    z = q0[2]
    lattice = site_lattice(omega_a, omega_b, q0, spacing)
    values = np.asarray(objective(lattice), dtype=float)
    values = np.where(np.isnan(values), -np.inf, values)
    best = HoverSite(q0, float(objective(q0[None, :])[0]))

    def cost(xy):
        val = float(objective(np.array([[xy[0], xy[1], z]]))[0])
        return np.inf if math.isnan(val) else -val

    order = np.argsort(-values, kind='stable')[:seeds]
    for i in order:
        if not np.isfinite(values[i]):
            break
        x0 = lattice[i, :2]
        simplex = np.array([x0, x0 + [spacing / 2, 0], x0 + [0, spacing / 2]])
        res = minimize(cost, x0, method='Nelder-Mead',
                       options={'xatol': xtol, 'fatol': Config.site_ftol,
                                'maxfev': max_evals,
                                'initial_simplex': simplex})
        val = -float(res.fun)
        tol = Config.objective_tie_tol * max(1.0, abs(best.value))
        if val > best.value + tol:
            best = HoverSite(np.array([res.x[0], res.x[1], z]), val)
    return best


def _toward_nearest_ring(q, rings):
    """Unit vector from q toward the closest point of the closest ring"""
    rho = math.hypot(q[0], q[1])
    ring = min(rings, key=lambda r: abs(r.radius - rho))
    direction = np.zeros(3)
    if rho > 0:
        direction[:2] = q[:2] / rho
    else:
        direction[0] = 1.0
    return direction if ring.radius >= rho else -direction


def choose_step(q_prev, rings, speed_limit, objective, target=None,
                n_angles=Config.ring_angles):
    """Pick the next UAV position, see next_position()"""
    q = as_array(q_prev).astype(float)
    if not rings:
        return _hover(q)
    reach = speed_limit * (1 + 1e-12) + 1e-12
    cands, eps, radii = [], [], []
    for ring in rings:
        pts = _ring_points(ring, q[2], n_angles)
        # the previous position itself counts when it sits on the ring
        if abs(math.hypot(q[0], q[1]) - ring.radius) <= 1e-9:
            pts = np.vstack((q, pts))
        keep = np.linalg.norm(pts - q, axis=1) <= reach
        cands.append(pts[keep])
        eps.extend([ring.epsilon] * int(keep.sum()))
        radii.extend([ring.radius] * int(keep.sum()))
    cands = np.vstack(cands)
    if len(cands):
        disp = np.linalg.norm(cands - q, axis=1)
        i = _best(np.asarray(objective(cands), dtype=float), disp)
        return StepChoice(cands[i], float(disp[i]), eps[i], radii[i])
    if speed_limit <= 0:
        return _hover(q)
    if target is None:
        direction = _toward_nearest_ring(q, rings)
    else:
        target = as_array(target).astype(float)
        offset = target - q
        dist = float(np.linalg.norm(offset))
        if dist == 0:
            return _hover(q)
        if dist <= speed_limit:
            return StepChoice(target, dist, math.nan, math.nan)
        direction = offset / dist
    return StepChoice(q + speed_limit * direction, float(speed_limit),
                      math.nan, math.nan)


def next_position(q_prev, rings, speed_limit, objective, target=None,
                  n_angles=Config.ring_angles):
    """Next UAV position given the feasible rings of this step.

    Every ring point within speed_limit of q_prev is scored by objective and
    the best wins. Without reachable ring points the UAV flies toward target
    (arriving exactly when it is within speed_limit, hovering once there);
    without a target it moves a full step toward the nearest ring. Without
    rings it hovers.
    """
    choice = choose_step(q_prev, rings, speed_limit, objective, target,
                         n_angles)
    return Vec3.from_array(choice.position)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Planned UAV positions q[1..N] and per-step bookkeeping"""

    points: np.ndarray  # (N, 3)
    displacement: np.ndarray  # (N,), from the previous position
    epsilon: np.ndarray  # (N,), nan where no ring point was used
    ring_radius: np.ndarray  # (N,)

    @classmethod
    def constant(cls, position, samples):
        pts = np.tile(as_array(position).astype(float), (samples, 1))
        nan = np.full(samples, np.nan)
        return cls(pts, np.zeros(samples), nan, nan.copy())

    @classmethod
    def from_steps(cls, steps: Sequence[StepChoice]):
        return cls(np.array([s.position for s in steps]),
                   np.array([s.displacement for s in steps]),
                   np.array([s.epsilon for s in steps]),
                   np.array([s.ring_radius for s in steps]))

    @property
    def samples(self):
        return self.points.shape[0]

    def max_step(self):
        return float(self.displacement.max())

    def terminal_displacement(self, count):
        return float(self.displacement[-count:].mean())

    def as_frame(self):
        return pd.DataFrame({
            'n': np.arange(1, self.samples + 1),
            'x': self.points[:, 0],
            'y': self.points[:, 1],
            'z': self.points[:, 2],
            'displacement': self.displacement,
            'epsilon_used': self.epsilon,
            'ring_radius': self.ring_radius,
        })


def plan_trajectory(plan, omega_a, omega_b, objective,
                    n_angles=Config.ring_angles):
    """Plan N positions from plan.start_position.

    The hover site is searched once up front; the objective does not depend
    on time, so every approach step flies toward the same site.
    """
    q = plan.start_position.as_array()
    site = None
    if plan.step_limit > 0 and plan.samples > 0:
        site = find_hover_site(objective, omega_a, omega_b, q)
        logger.debug(msgs.hover_site.format(pos=site.position,
                                            value=site.value))
    steps = []
    for n in range(1, plan.samples + 1):
        if plan.step_limit <= 0:
            choice = _hover(q)
        else:
            coeffs = cubic_coefficients(omega_a, omega_b, q, plan.speed,
                                        plan.dt)
            rings = feasible_rings(coeffs, omega_a, plan.altitude)
            if not rings:
                logger.debug(msgs.hover_no_ring.format(n=n, pos=q))
            choice = choose_step(q, rings, plan.step_limit, objective,
                                 site.position, n_angles)
            if rings and math.isnan(choice.epsilon) and choice.displacement:
                logger.debug(msgs.approach_step.format(
                    n=n, dist=choice.displacement))
        steps.append(choice)
        q = choice.position
    return Trajectory.from_steps(steps)

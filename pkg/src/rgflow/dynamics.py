"""Decoupled velocity fields and a baseline Euler integrator.

The state obeys dx = v_r dr + v_g dg with

    v_g = cot(g) x - csc(g) (alpha(r) x0hat + beta(r) x1)
    v_r = cos(g) (dalpha(r) x0hat + dbeta(r) x1).

v_g is formally singular at g = 0; the Euler reference integrator simply
drops the v_g contribution below a floor g_floor, where its dg-weighted
contribution vanishes on smooth paths.  Euler exists as a cross-validation
oracle for the analytic sampler, not as a user-facing restoration path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DomainError, SingularTime
from .schedule import GvpSchedule
from .trajectory import Trajectory


@dataclass(frozen=True)
class VelocityPair:
    """The two vector fields evaluated at one state."""

    v_r: np.ndarray
    v_g: np.ndarray


def _match(*arrays) -> tuple[np.ndarray, ...]:
    out = tuple(np.asarray(a, dtype=np.float64) for a in arrays)
    first = out[0].shape
    for a in out[1:]:
        if a.shape != first:
            raise DimensionMismatch(f"shape mismatch: {[a.shape for a in out]}")
    return out


def velocity_r(sched: GvpSchedule, x0hat, x1, r: float, g: float) -> np.ndarray:
    """The regression-axis velocity; well-defined for all g including 0."""
    x0hat, x1 = _match(x0hat, x1)
    d = sched.coeff_derivs(r, g)
    return math.cos(g) * (d.dalpha * x0hat + d.dbeta * x1)


def velocities(
    sched: GvpSchedule, x, x0hat, x1, r: float, g: float
) -> VelocityPair:
    """Both velocity fields; raises SingularTime when v_g is requested at g <= 0."""
    x, x0hat, x1 = _match(x, x0hat, x1)
    if g <= 0.0:
        raise SingularTime(f"v_g undefined at g={g} <= 0; use velocity_r there")
    c = sched.coeffs(r, g)
    cot = c.lam / c.gamma
    csc = 1.0 / c.gamma
    v_g = cot * x - csc * (c.alpha * x0hat + c.beta * x1)
    return VelocityPair(v_r=velocity_r(sched, x0hat, x1, r, g), v_g=v_g)


def euler_integrate(
    sched: GvpSchedule,
    traj: Trajectory,
    denoiser,
    x1,
    z,
    n_steps: int,
    g_floor: float = 1e-3,
) -> np.ndarray:
    """First-order reference integration of dx = v_r dr + v_g dg.

    The state starts at cos(g_start)*beta(r_start)*x1 + sin(g_start)*z and is
    advanced with the denoiser's prediction substituted at each grid point.
    Steps whose source has g below g_floor advance by v_r alone.
    """
    x1, z = _match(x1, z)
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    if g_floor <= 0.0:
        raise DomainError(f"g_floor must be > 0, got {g_floor}")
    grid = traj.discretize(n_steps)
    r0, g0 = grid.r[0], grid.g[0]
    c0 = sched.coeffs(r0, g0)
    x = c0.lam * c0.beta * x1 + c0.gamma * z
    for i in range(len(grid) - 1):
        r_cur, g_cur = float(grid.r[i]), float(grid.g[i])
        r_nxt, g_nxt = float(grid.r[i + 1]), float(grid.g[i + 1])
        x0hat = denoiser.predict(x, x1, r_cur, g_cur)
        if g_cur >= g_floor:
            v = velocities(sched, x, x0hat, x1, r_cur, g_cur)
            x = x + v.v_r * (r_nxt - r_cur) + v.v_g * (g_nxt - g_cur)
        else:
            x = x + velocity_r(sched, x0hat, x1, r_cur, g_cur) * (r_nxt - r_cur)
    return x

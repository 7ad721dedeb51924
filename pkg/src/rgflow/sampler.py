"""Analytic hybrid sampler and the full restoration loops.

The per-step update from (r1, g1) to (r2, g2), with k = sin(g2)/sin(g1) and
s = sqrt(1 - eta^2), is

    x2 = k^s x1state + cos(g2) (alpha_r2 x0hat + beta_r2 x1)
         - k^s cos(g1) (alpha_r1 x0hat + beta_r1 x1) + kappa z,

    kappa = 1[eta != 0] * eta (sin g2 - k^s sin g1) / (1 - s).

It solves the linear part of the two-time flow exactly and freezes the
denoiser prediction across the step, so large steps stay accurate.  eta
interpolates from fully deterministic (eta = 0, kappa = 0) to fully
stochastic (eta = 1, k^s = 1, kappa = sin g2 - sin g1).

Paths that start at g = 0 (Elliptical, V-path, Bezier) have a singular k on
their first step; restoration boots with a small fully-stochastic step from
t_start to t_start offset by boot_epsilon, then runs the hybrid update over
a uniform grid, for exactly n_steps denoiser calls.  Pure regression paths
use the noiseless update x2 = x1state + (alpha_r2 - alpha_r1) x0hat +
(beta_r2 - beta_r1) x1 instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError, DimensionMismatch, SingularStart
from .schedule import GvpSchedule
from .trajectory import Regression, Trajectory

_HALF_PI = math.pi / 2.0


def kappa(eta: float, g1: float, g2: float) -> float:
    """Noise coefficient of the hybrid step.

    Exactly 0 at eta = 0 and exactly sin(g2) - sin(g1) at eta = 1; computed
    through expm1 in between so the eta -> 0 limit is smooth.
    """
    if not (0.0 <= eta <= 1.0):
        raise ConfigError(f"eta must lie in [0, 1], got {eta}")
    if g1 <= 0.0:
        raise SingularStart(f"kappa undefined from g1={g1} <= 0")
    if eta == 0.0:
        return 0.0
    s1, s2 = math.sin(g1), math.sin(g2)
    if eta == 1.0:
        return s2 - s1
    if s2 == 0.0:
        # k = 0 and s > 0, so k^s sin(g1) = 0 and the numerator vanishes.
        return 0.0
    s = math.sqrt((1.0 - eta) * (1.0 + eta))
    one_minus_s = eta * eta / (1.0 + s)
    log_k = math.log(s2) - math.log(s1)
    # eta * s2 * (1 - k^(s-1)) / (1-s), with 1 - e^x = -expm1(x).
    return eta * s2 * (-math.expm1(-one_minus_s * log_k)) / one_minus_s


def _k_pow_s(eta: float, g1: float, g2: float) -> float:
    """k^sqrt(1-eta^2) with the eta = 1 convention k^0 = 1 (also at k = 0)."""
    if eta == 1.0:
        return 1.0
    s1, s2 = math.sin(g1), math.sin(g2)
    if s2 == 0.0:
        return 0.0
    s = math.sqrt((1.0 - eta) * (1.0 + eta))
    return (s2 / s1) ** s


def _match(*arrays) -> tuple[np.ndarray, ...]:
    out = tuple(np.asarray(a, dtype=np.float64) for a in arrays)
    first = out[0].shape
    for a in out[1:]:
        if a.shape != first:
            raise DimensionMismatch(f"shape mismatch: {[a.shape for a in out]}")
    return out


def hybrid_step(
    sched: GvpSchedule,
    x_prev,
    x0hat,
    x1,
    frm: tuple[float, float],
    to: tuple[float, float],
    eta: float,
    z,
) -> np.ndarray:
    """One hybrid update from (r1, g1) to (r2, g2); requires g1 > 0."""
    r1, g1 = frm
    r2, g2 = to
    if g1 <= 0.0:
        raise SingularStart(f"hybrid_step undefined from g1={g1} <= 0")
    x_prev, x0hat, x1, z = _match(x_prev, x0hat, x1, z)
    c1 = sched.coeffs(r1, g1)
    c2 = sched.coeffs(r2, g2)
    ks = _k_pow_s(eta, g1, g2)
    kap = kappa(eta, g1, g2)
    return (
        ks * x_prev
        + c2.lam * (c2.alpha * x0hat + c2.beta * x1)
        - ks * c1.lam * (c1.alpha * x0hat + c1.beta * x1)
        + kap * z
    )


def boot_step(
    sched: GvpSchedule,
    x_prev,
    x0hat,
    x1,
    frm: tuple[float, float],
    to: tuple[float, float],
    z,
) -> np.ndarray:
    """Fully stochastic (eta = 1) update, valid from g1 = 0.

    At eta = 1 the k-ratio drops out (k^0 = 1) and the noise coefficient is
    sin(g2) - sin(g1), so the start singularity never appears.
    """
    r1, g1 = frm
    r2, g2 = to
    x_prev, x0hat, x1, z = _match(x_prev, x0hat, x1, z)
    c1 = sched.coeffs(r1, g1)
    c2 = sched.coeffs(r2, g2)
    kap = c2.gamma - c1.gamma
    return (
        x_prev
        + c2.lam * (c2.alpha * x0hat + c2.beta * x1)
        - c1.lam * (c1.alpha * x0hat + c1.beta * x1)
        + kap * z
    )


def regression_step(
    sched: GvpSchedule, x_prev, x0hat, x1, r1: float, r2: float
) -> np.ndarray:
    """Noiseless update along g = 0."""
    x_prev, x0hat, x1 = _match(x_prev, x0hat, x1)
    a1, a2 = sched.alpha(r1), sched.alpha(r2)
    b1, b2 = sched.beta(r1), sched.beta(r2)
    return x_prev + (a2 - a1) * x0hat + (b2 - b1) * x1


@dataclass(frozen=True)
class SamplerConfig:
    """Inference knobs: path, step budget, stochasticity, boot offset, seed."""

    trajectory: Trajectory
    n_steps: int = 10
    eta: float = 0.0
    boot_epsilon: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if not (0.0 <= self.eta <= 1.0):
            raise ConfigError(f"eta must lie in [0, 1], got {self.eta}")
        if not (0.0 < self.boot_epsilon < _HALF_PI):
            raise ConfigError(
                f"boot_epsilon must lie in (0, pi/2), got {self.boot_epsilon}"
            )


NoiseDraw = Callable[[int], np.ndarray]
"""draw(k) -> noise array for the k-th stochastic draw of a run."""


def _rng_draw(rng: np.random.Generator, sigma_d: float, shape) -> NoiseDraw:
    def draw(_k: int) -> np.ndarray:
        return rng.normal(0.0, sigma_d, size=shape)

    return draw


def _list_draw(noise: Iterable[np.ndarray]) -> NoiseDraw:
    items = [np.asarray(a, dtype=np.float64) for a in noise]

    def draw(k: int) -> np.ndarray:
        if k >= len(items):
            raise ConfigError(f"noise override exhausted at draw {k}")
        return items[k]

    return draw


def _is_regressive(traj: Trajectory) -> bool:
    return isinstance(traj, Regression) or getattr(traj, "delta", None) == 0.0


def _run_regression(sched, denoiser, x1, n_steps) -> np.ndarray:
    grid = Regression(phi=sched.phi).discretize(n_steps)
    x = np.array(x1, dtype=np.float64, copy=True)
    for i in range(len(grid) - 1):
        r_cur, r_nxt = float(grid.r[i]), float(grid.r[i + 1])
        x0hat = denoiser.predict(x, x1, r_cur, 0.0)
        x = regression_step(sched, x, x0hat, x1, r_cur, r_nxt)
    return x


def _run_noisy(sched, traj, denoiser, x1, cfg, draw: NoiseDraw) -> np.ndarray:
    n = cfg.n_steps
    eta = cfg.eta
    draws = 0

    if traj.starts_noiseless:
        if n == 1:
            if eta != 1.0:
                raise ConfigError(
                    "a path starting at g=0 with n_steps=1 requires eta=1"
                )
            frm = traj.start_rg
            to = traj.end_rg
            x0hat = denoiser.predict(x1, x1, *frm)
            # kappa = sin(0) - sin(0) = 0: no draw consumed.
            return boot_step(sched, x1, x0hat, x1, frm, to, np.zeros_like(x1))
        grid = traj.discretize(n - 1)
        direction = 1.0 if traj.t_end > traj.t_start else -1.0
        t_boot = traj.t_start + direction * cfg.boot_epsilon
        frm = traj.start_rg
        to = traj.point(t_boot)
        x = np.array(x1, dtype=np.float64, copy=True)
        x0hat = denoiser.predict(x, x1, *frm)
        z = draw(draws)
        draws += 1
        x = boot_step(sched, x, x0hat, x1, frm, to, z)
        points = [to] + [
            (float(grid.r[i]), float(grid.g[i])) for i in range(1, len(grid))
        ]
    else:
        grid = traj.discretize(n)
        r0, g0 = float(grid.r[0]), float(grid.g[0])
        c0 = sched.coeffs(r0, g0)
        z = draw(draws)
        draws += 1
        x = c0.lam * c0.beta * np.asarray(x1, dtype=np.float64) + c0.gamma * z
        points = [(float(grid.r[i]), float(grid.g[i])) for i in range(len(grid))]

    for frm, to in zip(points[:-1], points[1:]):
        x0hat = denoiser.predict(x, x1, *frm)
        kap = kappa(eta, frm[1], to[1])
        if kap != 0.0:
            z = draw(draws)
            draws += 1
        else:
            z = np.zeros_like(x)
        x = hybrid_step(sched, x, x0hat, x1, frm, to, eta, z)
    return x


def restore(
    sched: GvpSchedule,
    denoiser,
    x1,
    cfg: SamplerConfig,
    rng: np.random.Generator | None = None,
    noise: Iterable[np.ndarray] | None = None,
) -> np.ndarray:
    """Run the full restoration loop for one degraded point.

    Stochastic draws come from `rng` (defaulting to a generator seeded with
    cfg.seed) unless an explicit `noise` sequence is supplied; draws are
    consumed in grid order and only where the noise coefficient is nonzero,
    so eta = 0 runs depend on at most one draw regardless of n_steps.
    """
    x1 = np.asarray(x1, dtype=np.float64)
    if noise is not None:
        draw = _list_draw(noise)
    else:
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        draw = _rng_draw(rng, sched.sigma_d, x1.shape)
    traj = cfg.trajectory
    if _is_regressive(traj):
        return _run_regression(sched, denoiser, x1, cfg.n_steps)
    return _run_noisy(sched, traj, denoiser, x1, cfg, draw)


def restore_batch(
    sched: GvpSchedule,
    denoiser,
    x1_batch,
    cfg: SamplerConfig,
    item_offset: int = 0,
) -> np.ndarray:
    """Restore a batch of degraded points with per-item noise streams.

    Item i draws from default_rng([cfg.seed, item_offset + i]), exactly the
    stream a sequential restore(..., rng=default_rng([cfg.seed, i])) would
    consume, so the result is independent of batching, chunking, or
    scheduling order.
    """
    x1_batch = np.atleast_2d(np.asarray(x1_batch, dtype=np.float64))
    n_items, dim = x1_batch.shape
    rngs = [
        np.random.default_rng([cfg.seed, item_offset + i]) for i in range(n_items)
    ]

    def draw(_k: int) -> np.ndarray:
        return np.stack([r.normal(0.0, sched.sigma_d, size=dim) for r in rngs])

    traj = cfg.trajectory
    if _is_regressive(traj):
        return _run_regression(sched, denoiser, x1_batch, cfg.n_steps)
    return _run_noisy(sched, traj, denoiser, x1_batch, cfg, draw)

"""Forward construction of interpolated states from data pairs and noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptyDataset
from .schedule import GvpSchedule

_CHUNK = 8192


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"{name} must be a 1-D vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class PairSample:
    """A clean/degraded point pair in sigma_d-standardized units."""

    x0: np.ndarray
    x1: np.ndarray

    def __post_init__(self) -> None:
        x0 = _as_vector(self.x0, "x0")
        x1 = _as_vector(self.x1, "x1")
        if x0.shape != x1.shape:
            raise DimensionMismatch(f"x0 {x0.shape} and x1 {x1.shape} differ")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "x1", x1)

    @property
    def dim(self) -> int:
        return self.x0.size


@dataclass(frozen=True)
class NoisyState:
    """An interpolated state x(r, g) with its time coordinates."""

    x: np.ndarray
    r: float
    g: float


def interpolate(
    sched: GvpSchedule, pair: PairSample, z, r: float, g: float
) -> NoisyState:
    """Form x(r, g) = lambda*(alpha*x0 + beta*x1) + gamma*z.

    At (-phi, 0) this is x0 and at (phi, 0) it is x1 exactly; at g = pi/2
    the data part vanishes and the state equals z.
    """
    z = _as_vector(z, "z")
    if z.shape != pair.x0.shape:
        raise DimensionMismatch(f"z {z.shape} does not match pair dim {pair.x0.shape}")
    c = sched.coeffs(r, g)
    x = c.lam * (c.alpha * pair.x0 + c.beta * pair.x1) + c.gamma * z
    return NoisyState(x=x, r=float(r), g=float(g))


def sample_noise(rng: np.random.Generator, dim: int, sigma_d: float) -> np.ndarray:
    """Draw z ~ N(0, sigma_d^2 I) of the given dimension."""
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    return rng.normal(0.0, sigma_d, size=dim)


def empirical_variance(
    sched: GvpSchedule,
    dataset: Sequence[PairSample],
    r: float,
    g: float,
    n: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of the per-coordinate Var(x(r, g)).

    Pairs are resampled with replacement and combined with fresh noise; the
    variance is computed per coordinate and averaged.  Work is split into
    fixed-size chunks whose sub-streams are spawned from the caller's
    generator up front, so the estimate is identical no matter how the chunks
    are later scheduled.
    """
    if len(dataset) == 0:
        raise EmptyDataset("empirical_variance needs a nonempty dataset")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    c = sched.coeffs(r, g)
    x0 = np.stack([p.x0 for p in dataset])
    x1 = np.stack([p.x1 for p in dataset])
    dim = x0.shape[1]

    n_chunks = (n + _CHUNK - 1) // _CHUNK
    streams = rng.spawn(n_chunks)

    # Accumulate sum and sum of squares per coordinate across chunks.
    s1 = np.zeros(dim)
    s2 = np.zeros(dim)
    remaining = n
    for stream in streams:
        m = min(_CHUNK, remaining)
        remaining -= m
        idx = stream.integers(0, len(dataset), size=m)
        z = stream.normal(0.0, sched.sigma_d, size=(m, dim))
        x = c.lam * (c.alpha * x0[idx] + c.beta * x1[idx]) + c.gamma * z
        s1 += x.sum(axis=0)
        s2 += (x * x).sum(axis=0)
    var = s2 / n - (s1 / n) ** 2
    return float(var.mean())

"""Toy datasets (S-curve restoration, correlated Gaussian pairs) and metrics.

Clouds are standardized so each coordinate has mean 0 and standard deviation
sigma_d, which is what the variance-preserving schedule assumes.  The
degradation applied to the S-curve is a fixed shear-and-squash linear map
plus additive noise; its parameters and seed are kept in the dataset
provenance so every experiment is reproducible.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, DomainError, InsufficientData
from .process import PairSample


def standardize(cloud: np.ndarray, sigma_d: float = 1.0) -> np.ndarray:
    """Shift/scale each coordinate to mean 0 and std sigma_d."""
    cloud = np.asarray(cloud, dtype=np.float64)
    mean = cloud.mean(axis=0)
    std = cloud.std(axis=0)
    if np.any(std == 0.0):
        raise DomainError("cannot standardize a coordinate with zero spread")
    return (cloud - mean) / std * sigma_d


@dataclass(frozen=True)
class ToyDataset:
    """Paired clouds plus the statistics the schedule needs."""

    pairs: list[PairSample]
    sigma_d: float
    rho_hat: float
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def dim(self) -> int:
        return self.pairs[0].dim

    def x0_matrix(self) -> np.ndarray:
        return np.stack([p.x0 for p in self.pairs])

    def x1_matrix(self) -> np.ndarray:
        return np.stack([p.x1 for p in self.pairs])


def make_scurve(
    n: int,
    jitter: float = 0.0,
    seed: int = 0,
    sigma_d: float = 1.0,
    standardized: bool = True,
) -> np.ndarray:
    """Standardized 2-D cloud along an S made of two joined half circles.

    The curve runs from (0, 1) around the left half of the upper circle
    (center (0, 1/2), radius 1/2) to the origin, then around the right half
    of the mirrored lower circle to (0, -1); points take independent Gaussian
    jitter before standardization.  `standardized=False` returns the raw
    curve coordinates (used by geometry tests).
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if jitter < 0.0:
        raise DomainError(f"jitter must be >= 0, got {jitter}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=n)
    pts = np.empty((n, 2))
    upper = u < 0.5
    # Upper arc swept from (0, 1) to (0, 0).
    theta = math.pi / 2.0 + 2.0 * math.pi * u[upper]
    pts[upper, 0] = 0.5 * np.cos(theta)
    pts[upper, 1] = 0.5 + 0.5 * np.sin(theta)
    # Lower arc swept from (0, 0) to (0, -1).
    theta = math.pi / 2.0 - 2.0 * math.pi * (u[~upper] - 0.5)
    pts[~upper, 0] = 0.5 * np.cos(theta)
    pts[~upper, 1] = -0.5 + 0.5 * np.sin(theta)
    if jitter > 0.0:
        pts += rng.normal(0.0, jitter, size=pts.shape)
    if not standardized:
        return pts
    return standardize(pts, sigma_d)


def degrade(
    clean: np.ndarray,
    kind: str = "shear",
    strength: float = 0.5,
    noise: float = 0.1,
    seed: int = 0,
    sigma_d: float = 1.0,
) -> np.ndarray:
    """Pointwise degradation: fixed shear-and-squash map plus Gaussian noise.

    The map is S = [[1, strength], [0, 1 - strength/2]]; the output keeps the
    row pairing with `clean` and is re-standardized to sigma_d.
    """
    if kind != "shear":
        raise DomainError(f"unknown degradation kind {kind!r}")
    if strength < 0.0 or noise < 0.0:
        raise DomainError("strength and noise must be >= 0")
    clean = np.asarray(clean, dtype=np.float64)
    if clean.ndim != 2 or clean.shape[1] != 2:
        raise DimensionMismatch(f"shear degradation expects (n, 2), got {clean.shape}")
    rng = np.random.default_rng(seed)
    shear = np.array([[1.0, strength], [0.0, 1.0 - strength / 2.0]])
    out = clean @ shear.T
    if noise > 0.0:
        out = out + rng.normal(0.0, noise, size=out.shape)
    if strength == 0.0 and noise == 0.0:
        return out  # identical clouds; downstream rejects rho_hat = 1
    return standardize(out, sigma_d)


def _pairs_from_matrices(x0: np.ndarray, x1: np.ndarray) -> list[PairSample]:
    return [PairSample(x0=a, x1=b) for a, b in zip(x0, x1)]


def make_scurve_dataset(
    n: int,
    jitter: float = 0.05,
    strength: float = 0.5,
    noise: float = 0.1,
    sigma_d: float = 1.0,
    seed: int = 0,
) -> ToyDataset:
    """Clean S-curve cloud plus its sheared/noised counterpart, paired."""
    clean = make_scurve(n, jitter=jitter, seed=seed, sigma_d=sigma_d)
    degraded = degrade(
        clean, strength=strength, noise=noise, seed=seed + 1, sigma_d=sigma_d
    )
    pairs = _pairs_from_matrices(clean, degraded)
    return ToyDataset(
        pairs=pairs,
        sigma_d=sigma_d,
        rho_hat=estimate_rho(pairs),
        provenance={
            "kind": "scurve",
            "n": n,
            "jitter": jitter,
            "strength": strength,
            "noise": noise,
            "seed": seed,
        },
    )


def make_gaussian_pairs(
    rho: float, n: int, sigma_d: float = 1.0, seed: int = 0, dim: int = 1
) -> ToyDataset:
    """Pairs with exact population correlation rho per coordinate.

    x0 ~ N(0, sigma_d^2) and x1 = rho*x0 + sqrt(1-rho^2)*u with independent
    u ~ N(0, sigma_d^2), so Var(x1) = sigma_d^2 and corr(x0, x1) = rho.
    """
    if abs(rho) >= 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")
    if n < 1 or dim < 1:
        raise DomainError("n and dim must be >= 1")
    rng = np.random.default_rng(seed)
    x0 = rng.normal(0.0, sigma_d, size=(n, dim))
    u = rng.normal(0.0, sigma_d, size=(n, dim))
    x1 = rho * x0 + math.sqrt(1.0 - rho * rho) * u
    pairs = _pairs_from_matrices(x0, x1)
    return ToyDataset(
        pairs=pairs,
        sigma_d=sigma_d,
        rho_hat=rho,
        provenance={"kind": "gaussian", "rho": rho, "n": n, "dim": dim, "seed": seed},
    )


def estimate_rho(pairs) -> float:
    """Per-coordinate Pearson correlation of the pairs, averaged."""
    if len(pairs) < 2:
        raise InsufficientData("estimate_rho needs at least 2 pairs")
    x0 = np.stack([p.x0 for p in pairs])
    x1 = np.stack([p.x1 for p in pairs])
    a = x0 - x0.mean(axis=0)
    b = x1 - x1.mean(axis=0)
    denom = np.sqrt((a * a).sum(axis=0) * (b * b).sum(axis=0))
    if np.any(denom == 0.0):
        raise InsufficientData("degenerate coordinate: zero spread")
    return float(((a * b).sum(axis=0) / denom).mean())


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared pointwise gap between two paired clouds."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"paired clouds must match: {a.shape} vs {b.shape}")
    d = a - b
    return float((d * d).sum(axis=-1).mean())


def energy_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample energy distance 2 E||A-B|| - E||A-A'|| - E||B-B'||.

    V-statistic over all cross pairs; sizes may differ, dimensions may not.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    ab = cdist(a, b).mean()
    aa = cdist(a, a).mean()
    bb = cdist(b, b).mean()
    return float(2.0 * ab - aa - bb)


# -- dataset CSV + sidecar ------------------------------------------------------


def save_dataset(ds: ToyDataset, path) -> None:
    """Write pairs as CSV (x0_*, x1_* columns) plus a JSON metadata sidecar."""
    path = Path(path)
    dim = ds.dim
    header = [f"x0_{i + 1}" for i in range(dim)] + [f"x1_{i + 1}" for i in range(dim)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for p in ds.pairs:
            writer.writerow(
                [format(v, ".17g") for v in p.x0] + [format(v, ".17g") for v in p.x1]
            )
    meta = {
        "kind": ds.provenance.get("kind", "unknown"),
        "params": {k: v for k, v in ds.provenance.items() if k not in ("kind", "seed")},
        "seed": ds.provenance.get("seed"),
        "sigma_d": ds.sigma_d,
        "rho_hat": ds.rho_hat,
    }
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True) + "\n")


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".meta.json")


def load_dataset(path) -> ToyDataset:
    """Read a dataset CSV written by save_dataset (sidecar optional)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    n_x0 = sum(1 for name in header if name.startswith("x0_"))
    n_x1 = sum(1 for name in header if name.startswith("x1_"))
    if n_x0 == 0 or n_x0 != n_x1 or n_x0 + n_x1 != len(header):
        raise DomainError(f"unrecognized dataset header {header!r}")
    data = np.asarray(rows, dtype=np.float64)
    x0, x1 = data[:, :n_x0], data[:, n_x0:]
    pairs = _pairs_from_matrices(x0, x1)
    meta_file = sidecar_path(path)
    if meta_file.exists():
        meta = json.loads(meta_file.read_text())
        sigma_d = float(meta["sigma_d"])
        rho_hat = float(meta["rho_hat"])
        provenance = {"kind": meta.get("kind"), "seed": meta.get("seed")}
        provenance.update(meta.get("params", {}))
    else:
        sigma_d = float(np.stack([x0, x1]).std(axis=(0, 1)).mean())
        rho_hat = estimate_rho(pairs)
        provenance = {"kind": "unknown"}
    return ToyDataset(pairs=pairs, sigma_d=sigma_d, rho_hat=rho_hat, provenance=provenance)

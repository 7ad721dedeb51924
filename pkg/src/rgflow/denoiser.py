"""Clean-point predictors behind the contract x0hat = sigma_d * F(x/sigma_d, x1, r, g).

Three interchangeable implementations:

* CheatDenoiser  -- returns the true x0; an exactness oracle for sampler tests.
* GaussianOracle -- the exact conditional mean E[x0 | x(r,g), x1] for jointly
  Gaussian per-coordinate pairs; the minimum-MSE reference every trained
  denoiser chases.
* MlpDenoiser    -- a small trainable MLP over [x/sigma_d ; x1/sigma_d ;
  embed(r) ; embed(g)] with manual forward/backward passes.

All predictors accept a single vector (d,) or a batch (n, d) and broadcast
per coordinate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
from scipy.special import erf

from .errors import DimensionMismatch, DomainError
from .schedule import GvpSchedule

_EMB_BASE = 1.0e4


class Denoiser(Protocol):
    """Behavioral contract: predict the clean point from a noisy state."""

    def predict(self, x, x1, r, g) -> np.ndarray: ...


def time_embed(t, emb_dim: int) -> np.ndarray:
    """Sinusoidal features of a time scalar (or batch of scalars).

    Frequencies omega_j = base^(-2j/emb_dim), base 1e4, j = 0..emb_dim/2-1;
    output is [sin(omega_j t)..., cos(omega_j t)...].
    """
    if emb_dim % 2 != 0 or emb_dim < 2:
        raise DomainError(f"emb_dim must be even and >= 2, got {emb_dim}")
    half = emb_dim // 2
    omega = _EMB_BASE ** (-2.0 * np.arange(half) / emb_dim)
    t = np.asarray(t, dtype=np.float64)
    phase = t[..., None] * omega
    return np.concatenate([np.sin(phase), np.cos(phase)], axis=-1)


class CheatDenoiser:
    """Returns the stored true x0 regardless of the queried state."""

    def __init__(self, x0) -> None:
        self.x0 = np.asarray(x0, dtype=np.float64)

    def predict(self, x, x1, r, g) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.x0.shape != x.shape:
            # Allow a (d,) truth against (n, d) queries only when it broadcasts.
            return np.broadcast_to(self.x0, x.shape).copy()
        return self.x0.copy()


def cheat_predict(pair, x, x1, r, g) -> np.ndarray:
    """Functional form: the clean half of the pair, always."""
    return np.asarray(pair.x0, dtype=np.float64).copy()


class GaussianOracle:
    """Exact per-coordinate posterior mean for standardized Gaussian pairs.

    With m = rho*x1, s^2 = (1-rho^2) sigma_d^2, the state decomposes into the
    known part lambda*beta*x1 plus a*x0 + gamma*z with a = lambda*alpha, so

        x0hat = m + a s^2 / (a^2 s^2 + gamma^2 sigma_d^2) * (y - a m),
        y = x - lambda*beta*x1.

    At the degenerate corner (r = phi, g = 0) the state carries no
    information about x0 and the prior mean m is returned.
    """

    def __init__(self, rho: float, sigma_d: float = 1.0) -> None:
        self.sched = GvpSchedule(rho=rho, sigma_d=sigma_d)

    @property
    def rho(self) -> float:
        return self.sched.rho

    @property
    def sigma_d(self) -> float:
        return self.sched.sigma_d

    def predict(self, x, x1, r, g) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        x1 = np.asarray(x1, dtype=np.float64)
        if x.shape != x1.shape:
            raise DimensionMismatch(f"x {x.shape} vs x1 {x1.shape}")
        c = self.sched.coeffs(float(r), float(g))
        rho, sd = self.rho, self.sigma_d
        m = rho * x1
        s2 = (1.0 - rho * rho) * sd * sd
        a = c.lam * c.alpha
        # The exact-math denominator vanishes only at the corner (phi, 0),
        # where the state is x1 itself and carries nothing about x0.  In
        # floats alpha(phi) leaves an O(1e-16) residue, so test against a
        # tolerance rather than zero to keep the gain from exploding.
        if abs(a) <= 1e-12 and c.gamma <= 1e-12:
            return m
        y = x - c.lam * c.beta * x1
        denom = a * a * s2 + c.gamma * c.gamma * sd * sd
        return m + (a * s2 / denom) * (y - a * m)


def gaussian_predict(params: GaussianOracle, x, x1, r, g) -> np.ndarray:
    """Functional form of GaussianOracle.predict."""
    return params.predict(x, x1, r, g)


def _gelu(z: np.ndarray) -> np.ndarray:
    return 0.5 * z * (1.0 + erf(z / math.sqrt(2.0)))


def _gelu_grad(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + erf(z / math.sqrt(2.0))) + z * np.exp(-0.5 * z * z) / math.sqrt(
        2.0 * math.pi
    )


@dataclass
class MlpDenoiser:
    """Two-hidden-layer MLP predictor with joint sinusoidal time features.

    Input layout: [x/sigma_d ; x1/sigma_d ; embed(r) ; embed(g)], width
    2*dim + 2*emb_dim.  The output projection starts at zero so a fresh net
    predicts exactly 0 everywhere.
    """

    dim: int
    hidden: int = 128
    emb_dim: int = 32
    sigma_d: float = 1.0
    params: dict | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dim must be >= 1, got {self.dim}")
        if self.emb_dim % 2 != 0:
            raise DomainError(f"emb_dim must be even, got {self.emb_dim}")
        if self.params is None:
            self.params = self._init_params(np.random.default_rng(0))

    @property
    def input_dim(self) -> int:
        return 2 * self.dim + 2 * self.emb_dim

    @property
    def widths(self) -> list[int]:
        return [self.input_dim, self.hidden, self.hidden, self.dim]

    def _init_params(self, rng: np.random.Generator) -> dict:
        d_in, h = self.input_dim, self.hidden
        return {
            "W1": rng.normal(0.0, math.sqrt(2.0 / d_in), size=(d_in, h)),
            "b1": np.zeros(h),
            "W2": rng.normal(0.0, math.sqrt(2.0 / h), size=(h, h)),
            "b2": np.zeros(h),
            "W3": np.zeros((h, self.dim)),
            "b3": np.zeros(self.dim),
        }

    def reinit(self, rng: np.random.Generator) -> None:
        """Redraw hidden-layer weights; output projection stays at zero."""
        self.params = self._init_params(rng)

    def copy(self) -> "MlpDenoiser":
        return MlpDenoiser(
            dim=self.dim,
            hidden=self.hidden,
            emb_dim=self.emb_dim,
            sigma_d=self.sigma_d,
            params={k: v.copy() for k, v in self.params.items()},
        )

    # -- forward -------------------------------------------------------------

    def features(self, x, x1, r, g) -> np.ndarray:
        """Assemble the normalized input block for a batch (n, d)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        x1 = np.atleast_2d(np.asarray(x1, dtype=np.float64))
        if x.shape != x1.shape or x.shape[1] != self.dim:
            raise DimensionMismatch(
                f"x {x.shape} / x1 {x1.shape} incompatible with dim={self.dim}"
            )
        n = x.shape[0]
        r = np.broadcast_to(np.asarray(r, dtype=np.float64), (n,))
        g = np.broadcast_to(np.asarray(g, dtype=np.float64), (n,))
        return np.concatenate(
            [
                x / self.sigma_d,
                x1 / self.sigma_d,
                time_embed(r, self.emb_dim),
                time_embed(g, self.emb_dim),
            ],
            axis=1,
        )

    def _forward(self, feats: np.ndarray) -> tuple[np.ndarray, dict]:
        p = self.params
        z1 = feats @ p["W1"] + p["b1"]
        a1 = _gelu(z1)
        z2 = a1 @ p["W2"] + p["b2"]
        a2 = _gelu(z2)
        out = a2 @ p["W3"] + p["b3"]
        cache = {"feats": feats, "z1": z1, "a1": a1, "z2": z2, "a2": a2}
        return out, cache

    def predict(self, x, x1, r, g) -> np.ndarray:
        x_arr = np.asarray(x, dtype=np.float64)
        feats = self.features(x, x1, r, g)
        out, _ = self._forward(feats)
        out = self.sigma_d * out
        return out[0] if x_arr.ndim == 1 else out

    # -- backward ------------------------------------------------------------

    def forward_batch(self, feats: np.ndarray) -> tuple[np.ndarray, dict]:
        """Core map on pre-built features, without the sigma_d rescale."""
        return self._forward(feats)

    def backward_batch(self, cache: dict, d_out: np.ndarray) -> dict:
        """Gradients of sum(d_out * core_output) for every parameter."""
        p = self.params
        a2, z2, a1, z1, feats = (
            cache["a2"],
            cache["z2"],
            cache["a1"],
            cache["z1"],
            cache["feats"],
        )
        grads = {}
        grads["W3"] = a2.T @ d_out
        grads["b3"] = d_out.sum(axis=0)
        da2 = d_out @ p["W3"].T
        dz2 = da2 * _gelu_grad(z2)
        grads["W2"] = a1.T @ dz2
        grads["b2"] = dz2.sum(axis=0)
        da1 = dz2 @ p["W2"].T
        dz1 = da1 * _gelu_grad(z1)
        grads["W1"] = feats.T @ dz1
        grads["b1"] = dz1.sum(axis=0)
        return grads


def mlp_predict(net: MlpDenoiser, x, x1, r, g) -> np.ndarray:
    """Functional form of MlpDenoiser.predict."""
    return net.predict(x, x1, r, g)


def mlp_backward(net: MlpDenoiser, inputs, targets, weights) -> dict:
    """Exact gradients of the weighted squared error.

    Loss: mean_i exp(w_i) * ||sigma_d * F(in_i) - target_i||^2 over a batch
    of pre-built feature rows.  Gradients are returned for every parameter.
    """
    feats = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if feats.shape[0] == 0:
        raise DomainError("mlp_backward needs a nonempty batch")
    weights = np.broadcast_to(
        np.asarray(weights, dtype=np.float64), (feats.shape[0],)
    )
    core, cache = net.forward_batch(feats)
    pred = net.sigma_d * core
    err = pred - targets
    # d loss / d core = exp(w) * 2 * err * sigma_d / n
    d_core = (np.exp(weights)[:, None] * 2.0 * err * net.sigma_d) / feats.shape[0]
    return net.backward_batch(cache, d_core)


def weighted_prediction_loss(net: MlpDenoiser, inputs, targets, weights) -> float:
    """The scalar loss differentiated by mlp_backward; finite-difference hook."""
    feats = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    weights = np.broadcast_to(
        np.asarray(weights, dtype=np.float64), (feats.shape[0],)
    )
    core, _ = net.forward_batch(feats)
    err = net.sigma_d * core - targets
    return float(np.mean(np.exp(weights) * (err * err).sum(axis=1)))


# -- checkpoint I/O -----------------------------------------------------------

_PARAM_KEYS = ("W1", "b1", "W2", "b2", "W3", "b3")


@dataclass(frozen=True)
class Checkpoint:
    """Deserialized checkpoint: weights plus the dataset statistics that
    fix the schedule at inference time."""

    net: MlpDenoiser
    ema_net: MlpDenoiser | None
    rho: float

    def denoiser(self, use_ema: bool = True) -> MlpDenoiser:
        if use_ema and self.ema_net is not None:
            return self.ema_net
        return self.net


def _params_to_json(params: dict) -> dict:
    return {k: params[k].tolist() for k in _PARAM_KEYS}


def _params_from_json(obj: dict) -> dict:
    return {k: np.asarray(obj[k], dtype=np.float64) for k in _PARAM_KEYS}


def save_checkpoint(
    path,
    net: MlpDenoiser,
    rho: float,
    ema_params: dict | None = None,
) -> None:
    """Write a versioned JSON checkpoint with sorted keys.

    Floats are serialized via repr so a write -> read -> write cycle is
    byte-identical.
    """
    doc = {
        "version": 1,
        "dims": net.dim,
        "emb_dim": net.emb_dim,
        "widths": net.widths,
        "sigma_d": net.sigma_d,
        "rho": float(rho),
        "weights": _params_to_json(net.params),
    }
    if ema_params is not None:
        doc["ema_weights"] = {k: ema_params[k].tolist() for k in _PARAM_KEYS}
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_checkpoint(path) -> Checkpoint:
    """Read a checkpoint written by save_checkpoint."""
    doc = json.loads(Path(path).read_text())
    if doc.get("version") != 1:
        raise DomainError(f"unsupported checkpoint version {doc.get('version')!r}")
    hidden = doc["widths"][1]
    net = MlpDenoiser(
        dim=doc["dims"],
        hidden=hidden,
        emb_dim=doc["emb_dim"],
        sigma_d=doc["sigma_d"],
        params=_params_from_json(doc["weights"]),
    )
    ema_net = None
    if "ema_weights" in doc:
        ema_net = MlpDenoiser(
            dim=doc["dims"],
            hidden=hidden,
            emb_dim=doc["emb_dim"],
            sigma_d=doc["sigma_d"],
            params=_params_from_json(doc["ema_weights"]),
        )
    return Checkpoint(net=net, ema_net=ema_net, rho=doc["rho"])

"""Training: time samplers, adaptive-weighted objective, AdamW, EMA.

Each step draws a batch of pairs, per-item time coordinates (r, g), and
fresh noise; forms the interpolated states; and descends

    mean_i [ exp(w(r_i, g_i)) * ||x0hat_i - x0_i||^2 - w(r_i, g_i) ]

jointly in the denoiser and the scalar weight net w.  The self-calibrating
weight settles near -ln(local squared error), so hard time regions are
down-weighted automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .denoiser import MlpDenoiser, time_embed, _gelu, _gelu_grad
from .errors import ConfigError, DomainError, EmptyDataset, NonFiniteLoss
from .schedule import GvpSchedule

_HALF_PI = math.pi / 2.0


# -- time samplers -------------------------------------------------------------


@dataclass(frozen=True)
class EllipticalSpecialist:
    """Draw a random apex delta, then a point on that elliptical path."""

    def sample_batch(self, phi: float, rng: np.random.Generator, n: int) -> dict:
        delta = rng.uniform(0.0, _HALF_PI, size=n)
        t = rng.uniform(-_HALF_PI, _HALF_PI, size=n)
        return {"r": phi * np.sin(t), "g": delta * np.cos(t), "delta": delta, "t": t}


@dataclass(frozen=True)
class LinearSpecialist:
    """Draw a random initial noise delta, then a point on that linear path."""

    def sample_batch(self, phi: float, rng: np.random.Generator, n: int) -> dict:
        delta = rng.uniform(0.0, _HALF_PI, size=n)
        t = rng.uniform(0.0, 1.0, size=n)
        return {"r": 2.0 * phi * t - phi, "g": delta * t, "delta": delta, "t": t}


@dataclass(frozen=True)
class RegressionSpecialist:
    """Uniform r on the noiseless segment g = 0."""

    def sample_batch(self, phi: float, rng: np.random.Generator, n: int) -> dict:
        r = rng.uniform(-phi, phi, size=n)
        return {"r": r, "g": np.zeros(n)}


@dataclass(frozen=True)
class UniformSampler:
    """Independent uniforms over the whole (r, g) rectangle."""

    def sample_batch(self, phi: float, rng: np.random.Generator, n: int) -> dict:
        return {
            "r": rng.uniform(-phi, phi, size=n),
            "g": rng.uniform(0.0, _HALF_PI, size=n),
        }


@dataclass(frozen=True)
class LogitNormalSampler:
    """Logistic-squashed normals, affine-mapped onto the (r, g) rectangle."""

    m_r: float = 0.0
    s_r: float = 1.0
    m_g: float = 0.0
    s_g: float = 1.0

    def sample_batch(self, phi: float, rng: np.random.Generator, n: int) -> dict:
        u_r = expit(rng.normal(self.m_r, self.s_r, size=n))
        u_g = expit(rng.normal(self.m_g, self.s_g, size=n))
        return {"r": phi * (2.0 * u_r - 1.0), "g": _HALF_PI * u_g}


TIME_SAMPLERS = {
    "elliptical": EllipticalSpecialist,
    "linear": LinearSpecialist,
    "regression": RegressionSpecialist,
    "uniform": UniformSampler,
}


def make_time_sampler(name: str):
    """Build a time sampler by CLI name (lognorm1/lognorm2 are presets)."""
    if name in TIME_SAMPLERS:
        return TIME_SAMPLERS[name]()
    if name == "lognorm1":
        return LogitNormalSampler(0.0, 1.0, 0.0, 1.0)
    if name == "lognorm2":
        return LogitNormalSampler(0.0, 1.0, -0.5, 1.0)
    raise ConfigError(
        f"unknown time sampler {name!r}; expected one of "
        f"{sorted(TIME_SAMPLERS) + ['lognorm1', 'lognorm2']}"
    )


def sample_time(kind, phi: float, rng: np.random.Generator) -> tuple[float, float]:
    """Draw a single (r, g) pair from the given sampler."""
    batch = kind.sample_batch(phi, rng, 1)
    return float(batch["r"][0]), float(batch["g"][0])


# -- objective ------------------------------------------------------------------


def weighted_loss(x0hat, x0, w: float) -> float:
    """exp(w) * ||x0hat - x0||^2 - w for a single sample."""
    x0hat = np.asarray(x0hat, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    err = x0hat - x0
    return float(math.exp(w) * float((err * err).sum()) - w)


class AdaptiveWeight:
    """Tiny MLP w(r, g): sinusoidal time features -> hidden 32 -> scalar.

    Output layer starts at zero, so training begins with plain squared error.
    """

    def __init__(self, emb_dim: int = 16, hidden: int = 32, rng=None) -> None:
        if emb_dim % 2 != 0:
            raise DomainError(f"emb_dim must be even, got {emb_dim}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.emb_dim = emb_dim
        self.hidden = hidden
        d_in = 2 * emb_dim
        self.params = {
            "V1": rng.normal(0.0, math.sqrt(2.0 / d_in), size=(d_in, hidden)),
            "c1": np.zeros(hidden),
            "V2": np.zeros((hidden, 1)),
            "c2": np.zeros(1),
        }

    def features(self, r, g) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        g = np.atleast_1d(np.asarray(g, dtype=np.float64))
        return np.concatenate(
            [time_embed(r, self.emb_dim), time_embed(g, self.emb_dim)], axis=1
        )

    def forward(self, r, g) -> tuple[np.ndarray, dict]:
        feats = self.features(r, g)
        z1 = feats @ self.params["V1"] + self.params["c1"]
        a1 = _gelu(z1)
        w = (a1 @ self.params["V2"] + self.params["c2"])[:, 0]
        return w, {"feats": feats, "z1": z1, "a1": a1}

    def __call__(self, r, g) -> np.ndarray:
        return self.forward(r, g)[0]

    def backward(self, cache: dict, d_w: np.ndarray) -> dict:
        d_out = d_w[:, None]
        grads = {}
        grads["V2"] = cache["a1"].T @ d_out
        grads["c2"] = d_out.sum(axis=0)
        da1 = d_out @ self.params["V2"].T
        dz1 = da1 * _gelu_grad(cache["z1"])
        grads["V1"] = cache["feats"].T @ dz1
        grads["c1"] = dz1.sum(axis=0)
        return grads


# -- optimizer -------------------------------------------------------------------


class AdamW:
    """Adam with decoupled weight decay; state keyed by parameter name."""

    def __init__(
        self,
        lr: float = 1e-4,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 1e-2,
    ) -> None:
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1, b2 = self.b1, self.b2
        for key, p in params.items():
            gr = grads[key]
            m = self.m.setdefault(key, np.zeros_like(p))
            v = self.v.setdefault(key, np.zeros_like(p))
            m *= b1
            m += (1.0 - b1) * gr
            v *= b2
            v += (1.0 - b2) * gr * gr
            m_hat = m / (1.0 - b1**self.t)
            v_hat = v / (1.0 - b2**self.t)
            p -= self.lr * (m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * p)


# -- training loop ----------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    """Training knobs; defaults follow the reference recipe."""

    time_sampler: object = field(default_factory=EllipticalSpecialist)
    batch_size: int = 16
    n_steps: int = 20_000
    learning_rate: float = 1e-4
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    weight_decay: float = 1e-2
    ema_decay: float = 0.9999
    adaptive_weighting: bool = True
    hidden: int = 128
    emb_dim: int = 32
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.ema_decay < 1.0):
            raise ConfigError(f"ema_decay must lie in [0, 1), got {self.ema_decay}")
        if self.batch_size < 1 or self.n_steps < 1:
            raise ConfigError("batch_size and n_steps must be >= 1")


@dataclass
class TrainResult:
    """Final weights, their EMA shadow, the weight net, and the loss trace."""

    denoiser: MlpDenoiser
    ema_denoiser: MlpDenoiser
    weight_net: AdaptiveWeight
    loss_trace: np.ndarray


def train(
    dataset,
    cfg: TrainConfig,
    rng: np.random.Generator | None = None,
    schedule: GvpSchedule | None = None,
) -> TrainResult:
    """Fit an MlpDenoiser (and weight net) on a standardized pair dataset.

    `dataset` is either a ToyDataset (schedule inferred from its rho_hat and
    sigma_d) or a plain sequence of PairSample with an explicit `schedule`.
    Identical cfg.seed and dataset give bitwise-identical loss traces.
    """
    pairs = getattr(dataset, "pairs", dataset)
    if len(pairs) == 0:
        raise EmptyDataset("train needs a nonempty dataset")
    if schedule is None:
        rho = getattr(dataset, "rho_hat", None)
        sigma_d = getattr(dataset, "sigma_d", None)
        if rho is None or sigma_d is None:
            raise ConfigError("plain pair lists need an explicit schedule")
        schedule = GvpSchedule(rho=rho, sigma_d=sigma_d)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    x0_all = np.stack([p.x0 for p in pairs])
    x1_all = np.stack([p.x1 for p in pairs])
    n_pairs, dim = x0_all.shape
    sd = schedule.sigma_d

    net = MlpDenoiser(
        dim=dim, hidden=cfg.hidden, emb_dim=cfg.emb_dim, sigma_d=sd, params={}
    )
    net.reinit(rng)
    weight_net = AdaptiveWeight(rng=rng)

    opt_net = AdamW(cfg.learning_rate, cfg.adam_betas, cfg.adam_eps, cfg.weight_decay)
    opt_w = AdamW(cfg.learning_rate, cfg.adam_betas, cfg.adam_eps, cfg.weight_decay)

    ema = {k: v.copy() for k, v in net.params.items()}
    trace = np.empty(cfg.n_steps)
    batch = cfg.batch_size

    for step in range(cfg.n_steps):
        idx = rng.integers(0, n_pairs, size=batch)
        x0 = x0_all[idx]
        x1 = x1_all[idx]
        times = cfg.time_sampler.sample_batch(schedule.phi, rng, batch)
        r, g = times["r"], times["g"]
        z = rng.normal(0.0, sd, size=(batch, dim))

        lam, gam = np.cos(g)[:, None], np.sin(g)[:, None]
        alpha, beta = schedule.alpha(r)[:, None], schedule.beta(r)[:, None]
        x = lam * (alpha * x0 + beta * x1) + gam * z

        if cfg.adaptive_weighting:
            w, w_cache = weight_net.forward(r, g)
        else:
            w = np.zeros(batch)

        feats = net.features(x, x1, r, g)
        core, cache = net.forward_batch(feats)
        pred = sd * core
        err = pred - x0
        sq = (err * err).sum(axis=1)
        ew = np.exp(w)
        loss = float(np.mean(ew * sq - w))
        if not math.isfinite(loss):
            raise NonFiniteLoss(
                f"loss became {loss} at step {step}; "
                f"r in [{r.min():.4g}, {r.max():.4g}], "
                f"g in [{g.min():.4g}, {g.max():.4g}]"
            )
        trace[step] = loss

        d_core = (ew[:, None] * 2.0 * err * sd) / batch
        grads = net.backward_batch(cache, d_core)
        opt_net.step(net.params, grads)

        if cfg.adaptive_weighting:
            d_w = (ew * sq - 1.0) / batch
            w_grads = weight_net.backward(w_cache, d_w)
            opt_w.step(weight_net.params, w_grads)

        d = cfg.ema_decay
        for key, p in net.params.items():
            ema[key] *= d
            ema[key] += (1.0 - d) * p

    ema_net = MlpDenoiser(
        dim=dim, hidden=cfg.hidden, emb_dim=cfg.emb_dim, sigma_d=sd, params=ema
    )
    return TrainResult(
        denoiser=net, ema_denoiser=ema_net, weight_net=weight_net, loss_trace=trace
    )

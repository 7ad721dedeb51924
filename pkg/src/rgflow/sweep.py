"""Grid sweeps over (delta, eta, NFE) on the elliptical path family.

One row per cell with desk-scale metrics (paired MSE and energy distance to
the clean cloud).  Cells that are not runnable carry the literal string "NA":
the delta = 0 row is pure regression (eta not applicable, emitted once per
NFE), and NFE = 1 with eta < 1 on a path starting at g = 0 is invalid.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .sampler import SamplerConfig, restore_batch
from .schedule import GvpSchedule
from .toydata import energy_distance, mse
from .trajectory import Elliptical

SWEEP_FIELDS = ("delta", "eta", "nfe", "mse", "energy_distance")


def run_sweep(
    sched: GvpSchedule,
    denoiser,
    x0: np.ndarray,
    x1: np.ndarray,
    deltas=(0.0,),
    etas=(0.0, 1.0),
    nfes=(1, 2, 5),
    seed: int = 0,
    boot_epsilon: float = 1e-3,
) -> list[dict]:
    """Evaluate every (delta, eta, NFE) cell; all cells share cfg.seed so the
    per-item noise streams (hence the boot noise) coincide across cells."""
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    x1 = np.atleast_2d(np.asarray(x1, dtype=np.float64))
    rows: list[dict] = []
    for delta in deltas:
        eta_values = ["NA"] if delta == 0.0 else list(etas)
        for eta in eta_values:
            for nfe in nfes:
                row = {"delta": delta, "eta": eta, "nfe": nfe}
                traj = Elliptical(phi=sched.phi, delta=float(delta))
                cfg_eta = 0.0 if eta == "NA" else float(eta)
                try:
                    cfg = SamplerConfig(
                        trajectory=traj,
                        n_steps=int(nfe),
                        eta=cfg_eta,
                        boot_epsilon=boot_epsilon,
                        seed=seed,
                    )
                    restored = restore_batch(sched, denoiser, x1, cfg)
                except ConfigError:
                    row["mse"] = "NA"
                    row["energy_distance"] = "NA"
                else:
                    row["mse"] = mse(restored, x0)
                    row["energy_distance"] = energy_distance(restored, x0)
                rows.append(row)
    return rows

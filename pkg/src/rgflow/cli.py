"""Command-line front end.

Subcommands: schedule-dump, traj, simulate, bench, train, restore, sweep,
verify.  All numeric CSV output uses 17-significant-digit decimals so reruns
with the same --seed are byte-identical.  Exit codes: 0 success, 1 check
failure, 2 usage/config error, 3 I/O error.

No environment variables are read except RGFLOW_THREADS (optional worker
count for batch restoration; results are identical for any value because
noise streams are keyed by item index, not by worker).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .denoiser import CheatDenoiser, GaussianOracle, load_checkpoint, save_checkpoint
from .dynamics import euler_integrate
from .errors import ConfigError, RgflowError
from .sampler import SamplerConfig, restore, restore_batch
from .schedule import GvpSchedule, schedule_grid
from .sweep import SWEEP_FIELDS, run_sweep
from .toydata import (
    load_dataset,
    make_gaussian_pairs,
    make_scurve_dataset,
    save_dataset,
)
from .training import TrainConfig, make_time_sampler, train
from .trajectory import make_trajectory
from .verify import run_checks


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write_csv(path, header, rows) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _angle(text: str) -> float:
    """Parse a float, or the symbolic forms 'pi' and 'pi/N'."""
    try:
        return float(text)
    except ValueError:
        pass
    expr = text.replace(" ", "")
    if expr == "pi":
        return math.pi
    if expr.startswith("pi/"):
        return math.pi / float(expr[3:])
    raise ConfigError(f"cannot parse angle {text!r}; use a float, 'pi' or 'pi/N'")


def _angle_list(text: str) -> list[float]:
    return [_angle(tok) for tok in text.split(",") if tok]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _thread_count() -> int:
    raw = os.environ.get("RGFLOW_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"RGFLOW_THREADS must be an integer, got {raw!r}") from None


# -- subcommand handlers ---------------------------------------------------------


def _cmd_schedule_dump(args) -> int:
    sched = GvpSchedule(rho=args.rho, sigma_d=args.sigma_d)
    table = schedule_grid(sched, args.grid)
    _write_csv(
        args.out,
        ["r", "g", "alpha", "beta", "lambda", "gamma", "dalpha", "dbeta"],
        table,
    )
    return 0


def _cmd_traj(args) -> int:
    sched = GvpSchedule(rho=args.rho, sigma_d=1.0)
    traj = make_trajectory(args.kind, phi=sched.phi, delta=args.delta, p=args.p)
    grid = traj.discretize(args.steps)
    _write_csv(args.out, ["t", "r", "g"], zip(grid.t, grid.r, grid.g))
    return 0


def _cmd_simulate(args) -> int:
    ds = load_dataset(args.pairs)
    rho = args.rho if args.rho is not None else ds.rho_hat
    sched = GvpSchedule(rho=rho, sigma_d=ds.sigma_d)
    traj = make_trajectory(args.traj, phi=sched.phi, delta=args.delta, p=args.p)
    grid = traj.discretize(args.steps)
    rng = np.random.default_rng(args.seed)
    dim = ds.dim
    rows = []
    for t, r, g in zip(grid.t, grid.r, grid.g):
        pair = ds.pairs[int(rng.integers(0, len(ds)))]
        z = rng.normal(0.0, ds.sigma_d, size=dim)
        c = sched.coeffs(float(r), float(g))
        x = c.lam * (c.alpha * pair.x0 + c.beta * pair.x1) + c.gamma * z
        rows.append([t, r, g, *x])
    header = ["t", "r", "g"] + [f"x_{i + 1}" for i in range(dim)]
    _write_csv(args.out, header, rows)
    return 0


def _cmd_bench(args) -> int:
    if args.oracle != "gaussian":
        raise ConfigError("bench supports --oracle gaussian only")
    sched = GvpSchedule(rho=args.rho, sigma_d=1.0)
    den = GaussianOracle(rho=args.rho)
    traj = make_trajectory(args.traj, phi=sched.phi, delta=args.delta, p=args.p)
    rng = np.random.default_rng(args.seed)
    x1 = rng.normal(0.0, 1.0, size=args.trials)
    zeros = np.zeros(args.trials)
    euler_end = euler_integrate(
        sched, traj, den, x1, zeros, args.euler_steps, g_floor=args.g_floor
    )
    rows = []
    for n in args.sampler_steps:
        cfg = SamplerConfig(trajectory=traj, n_steps=n, eta=0.0)
        analytic = restore(sched, den, x1, cfg, noise=[zeros] * (n + 1))
        gap = np.abs(analytic - euler_end)
        rows.append([n, args.euler_steps, float(gap.mean()), float(gap.max())])
    _write_csv(
        args.out,
        ["sampler_steps", "euler_steps", "mean_abs_gap", "max_abs_gap"],
        rows,
    )
    return 0


_TRAIN_CONFIG_KEYS = {
    "data", "n", "jitter", "strength", "noise", "gaussian_rho", "dim",
    "sigma_d", "time_sampler", "steps", "batch", "lr", "weight_decay",
    "ema_decay", "adaptive_weighting", "hidden", "emb_dim", "seed",
}


def _cmd_train(args) -> int:
    conf: dict = {}
    if args.config is not None:
        conf = json.loads(Path(args.config).read_text())
        unknown = set(conf) - _TRAIN_CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def pick(name, default):
        flag = getattr(args, name)
        if flag is not None:
            return flag
        return conf.get(name, default)

    data = pick("data", "scurve")
    n = int(pick("n", 2000))
    seed = int(pick("seed", 0))
    sigma_d = float(pick("sigma_d", 1.0))
    if data == "scurve":
        ds = make_scurve_dataset(
            n,
            jitter=float(pick("jitter", 0.05)),
            strength=float(pick("strength", 1.0)),
            noise=float(pick("noise", 0.25)),
            sigma_d=sigma_d,
            seed=seed,
        )
    elif data == "gaussian":
        ds = make_gaussian_pairs(
            float(pick("gaussian_rho", 0.5)),
            n,
            sigma_d=sigma_d,
            seed=seed,
            dim=int(pick("dim", 2)),
        )
    else:
        raise ConfigError(f"unknown --data {data!r}; expected scurve or gaussian")

    cfg = TrainConfig(
        time_sampler=make_time_sampler(pick("time_sampler", "elliptical")),
        batch_size=int(pick("batch", 16)),
        n_steps=int(pick("steps", 20_000)),
        learning_rate=float(pick("lr", 1e-4)),
        weight_decay=float(pick("weight_decay", 1e-2)),
        ema_decay=float(pick("ema_decay", 0.9999)),
        adaptive_weighting=bool(pick("adaptive_weighting", True)),
        hidden=int(pick("hidden", 128)),
        emb_dim=int(pick("emb_dim", 32)),
        seed=seed,
    )
    result = train(ds, cfg)
    save_checkpoint(
        args.out, result.denoiser, rho=ds.rho_hat,
        ema_params=result.ema_denoiser.params,
    )
    if args.trace is not None:
        _write_csv(
            args.trace, ["step", "loss"], enumerate(result.loss_trace)
        )
    if args.save_data is not None:
        save_dataset(ds, args.save_data)
    print(f"trained {cfg.n_steps} steps; rho_hat={ds.rho_hat:.6f}; wrote {args.out}")
    return 0


def _load_degraded(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    try:
        # Headerless file: the first row is already data.
        rows.insert(0, [float(v) for v in header])
        header = []
    except ValueError:
        pass
    data = np.asarray(rows, dtype=np.float64)
    x1_cols = [i for i, name in enumerate(header) if name.startswith("x1_")]
    if x1_cols:
        return data[:, x1_cols]
    return data  # bare matrix of degraded points


def _cmd_restore(args) -> int:
    if args.mode == "disi-r":
        args.traj = "regression"
        args.steps = 1
    elif args.mode == "disi-g":
        args.traj = "elliptical"
        if args.steps is None:
            args.steps = 10
        if args.delta is None:
            args.delta = math.pi / 8.0
    if args.steps is None:
        args.steps = 10
    if args.delta is None:
        args.delta = 0.0

    if args.model is not None:
        ck = load_checkpoint(args.model)
        den = ck.denoiser(use_ema=not args.no_ema)
        rho, sigma_d = ck.rho, den.sigma_d
    elif args.oracle == "gaussian":
        if args.rho is None:
            raise ConfigError("--oracle gaussian needs --rho")
        den = GaussianOracle(rho=args.rho, sigma_d=args.sigma_d)
        rho, sigma_d = args.rho, args.sigma_d
    else:
        raise ConfigError("restore needs --model or --oracle gaussian")

    sched = GvpSchedule(rho=rho, sigma_d=sigma_d)
    traj = make_trajectory(args.traj, phi=sched.phi, delta=args.delta, p=args.p)
    cfg = SamplerConfig(
        trajectory=traj,
        n_steps=args.steps,
        eta=args.eta,
        boot_epsilon=args.boot_epsilon,
        seed=args.seed,
    )
    x1 = _load_degraded(args.input)
    workers = _thread_count()
    # Fixed chunk boundaries keep the output byte-identical for any worker
    # count: threads only schedule chunks, they never reshape the batches.
    chunk = 256
    starts = range(0, x1.shape[0], chunk)
    if workers == 1:
        parts = [
            restore_batch(sched, den, x1[s : s + chunk], cfg, item_offset=s)
            for s in starts
        ]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(
                    restore_batch, sched, den, x1[s : s + chunk], cfg, item_offset=s
                )
                for s in starts
            ]
            parts = [f.result() for f in futs]
    out = np.concatenate(parts)
    header = [f"x_{i + 1}" for i in range(out.shape[1])]
    _write_csv(args.out, header, out)
    return 0


def _cmd_sweep(args) -> int:
    ds = load_dataset(args.data)
    rho = args.rho if args.rho is not None else ds.rho_hat
    sched = GvpSchedule(rho=rho, sigma_d=ds.sigma_d)
    x0, x1 = ds.x0_matrix(), ds.x1_matrix()
    if args.model is not None:
        den = load_checkpoint(args.model).denoiser(use_ema=not args.no_ema)
    elif args.oracle == "gaussian":
        den = GaussianOracle(rho=rho, sigma_d=ds.sigma_d)
    elif args.oracle == "cheat":
        den = CheatDenoiser(x0)
    else:
        raise ConfigError("sweep needs --model or --oracle gaussian|cheat")
    rows = run_sweep(
        sched, den, x0, x1,
        deltas=args.deltas, etas=args.etas, nfes=args.nfes,
        seed=args.seed, boot_epsilon=args.boot_epsilon,
    )
    _write_csv(
        args.out, list(SWEEP_FIELDS), ([row[k] for k in SWEEP_FIELDS] for row in rows)
    )
    return 0


def _cmd_verify(args) -> int:
    results = run_checks(only=args.only)
    if not results:
        raise ConfigError(f"--only {args.only!r} matched no checks")
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name} ({res.runtime_s:.2f}s): {res.measured}")
    report = {
        "checks": [r.as_dict() for r in results],
        "all_pass": all(r.passed for r in results),
    }
    if args.json is not None:
        Path(args.json).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(json.dumps({"all_pass": report["all_pass"]}))
    return 0 if report["all_pass"] else 1


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgflow",
        description=(
            "Two-time interpolant restoration toolkit: coefficient schedules, "
            "inference trajectories, the analytic hybrid sampler, and a toy "
            "training pipeline."
        ),
        epilog=(
            "Angles accept floats or 'pi'/'pi/N'.  The only environment "
            "variable read is RGFLOW_THREADS (worker count for batch "
            "restoration; output is identical for any value)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule-dump", help="tabulate schedule coefficients to CSV")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--sigma-d", type=float, default=1.0, dest="sigma_d")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_schedule_dump)

    p = sub.add_parser("traj", help="emit (t, r, g) rows for a trajectory")
    p.add_argument("--kind", required=True,
                   choices=["elliptical", "linear", "regression", "vpath", "bezier"])
    p.add_argument("--delta", type=_angle, default=0.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.0, help="sets phi = arccos(rho)/2")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_traj)

    p = sub.add_parser("simulate", help="sample forward states along a trajectory")
    p.add_argument("--traj", required=True,
                   choices=["elliptical", "linear", "regression", "vpath", "bezier"])
    p.add_argument("--delta", type=_angle, default=0.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--pairs", required=True, help="dataset CSV (x0_*, x1_* columns)")
    p.add_argument("--rho", type=float, default=None, help="override sidecar rho_hat")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("bench", help="analytic sampler vs Euler convergence table")
    p.add_argument("--oracle", default="gaussian", choices=["gaussian"])
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--traj", default="elliptical",
                   choices=["elliptical", "linear", "vpath", "bezier"])
    p.add_argument("--delta", type=_angle, default=math.pi / 4.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--euler-steps", type=int, default=10_000, dest="euler_steps")
    p.add_argument("--sampler-steps", type=_int_list, default=[10, 20, 50, 100],
                   dest="sampler_steps")
    p.add_argument("--g-floor", type=float, default=1e-3, dest="g_floor")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("train", help="train the toy MLP denoiser")
    p.add_argument("--config", default=None, help="JSON config; flags override")
    p.add_argument("--data", default=None, choices=["scurve", "gaussian"])
    p.add_argument("--n", type=int, default=None, help="dataset size")
    p.add_argument("--jitter", type=float, default=None)
    p.add_argument("--strength", type=float, default=None)
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--gaussian-rho", type=float, default=None, dest="gaussian_rho")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--sigma-d", type=float, default=None, dest="sigma_d")
    p.add_argument("--time-sampler", default=None, dest="time_sampler",
                   help="elliptical|linear|regression|uniform|lognorm1|lognorm2")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None, dest="weight_decay")
    p.add_argument("--ema-decay", type=float, default=None, dest="ema_decay")
    p.add_argument("--adaptive-weighting", type=int, default=None, choices=[0, 1],
                   dest="adaptive_weighting")
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("--emb-dim", type=int, default=None, dest="emb_dim")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="checkpoint JSON path")
    p.add_argument("--trace", default=None, help="loss trace CSV path")
    p.add_argument("--save-data", default=None, dest="save_data",
                   help="also write the generated dataset CSV here")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("restore", help="restore degraded points")
    p.add_argument("--model", default=None, help="checkpoint JSON")
    p.add_argument("--no-ema", action="store_true", dest="no_ema",
                   help="use raw weights instead of the EMA weights")
    p.add_argument("--oracle", default=None, choices=["gaussian"])
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--sigma-d", type=float, default=1.0, dest="sigma_d")
    p.add_argument("--input", required=True, help="CSV of degraded points")
    p.add_argument("--mode", default=None, choices=["disi-r", "disi-g"],
                   help="presets: disi-r = regression/1 step; "
                        "disi-g = elliptical/10 steps with booting")
    p.add_argument("--traj", default="elliptical",
                   choices=["elliptical", "linear", "regression", "vpath", "bezier"])
    p.add_argument("--delta", type=_angle, default=None)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--boot-epsilon", type=float, default=1e-3, dest="boot_epsilon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_restore)

    p = sub.add_parser("sweep", help="(delta, eta, NFE) grid with MSE/energy distance")
    p.add_argument("--data", required=True, help="paired dataset CSV")
    p.add_argument("--model", default=None)
    p.add_argument("--no-ema", action="store_true", dest="no_ema")
    p.add_argument("--oracle", default=None, choices=["gaussian", "cheat"])
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--deltas", type=_angle_list, default=[0.0, math.pi / 8, math.pi / 4, math.pi / 2])
    p.add_argument("--etas", type=_angle_list, default=[0.0, 0.2, 0.5, 1.0])
    p.add_argument("--nfes", type=_int_list, default=[1, 2, 5, 15, 50])
    p.add_argument("--boot-epsilon", type=float, default=1e-3, dest="boot_epsilon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--only", default=None, help="substring filter on check names")
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RgflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

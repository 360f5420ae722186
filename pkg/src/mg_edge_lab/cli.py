"""Command-line front end: ``mg-edge-lab {run,sweep,compare,selftest}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import ConfigurationError
from .game import GameConfig
from .harness import (DEFAULT_SWEEP, REFERENCE_GRID, ExperimentConfig, compare_policies,
                      run_experiment, run_experiments)
from .metrics import TaskModel, erlang_cdf, qoe_from_attendance
from .output import metadata_lines, write_csv, write_plots
from .policies import parse_policy

log = logging.getLogger("mg_edge_lab")

# config key -> (parser, default)
CONFIG_KEYS: dict[str, tuple[Any, Any]] = {
    "agents": (int, 21),
    "cutoff": (int, 10),
    "rounds": (int, 10000),
    "runs": (int, 32),
    "seed": (int, 1),
    "policy": (str, "random"),
    "sweep_s": (str, None),
    "warmup": (int, 0),
    "tasks_per_round": (int, 50),
    "mean_task_time": (float, 1.0),
    "deadline": (float, 10.0),
    "task_distribution": (str, "exponential"),
    "threads": (int, 1),
}


def parse_sweep(text: str | None) -> tuple[int, ...] | None:
    """``"1,2,3"`` or ``"1-7"`` (or a mix) to a tuple of memory sizes."""
    if text is None or text.strip().lower() in ("", "none"):
        return None
    values: list[int] = []
    for part in text.split(","):
        lo, sep, hi = part.strip().partition("-")
        values.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return tuple(values)


def read_config_file(path: Path) -> dict[str, str]:
    """Line-oriented ``key=value`` settings; ``#`` starts a comment."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value", key=key.strip())
        settings[key.strip().replace("-", "_")] = value.strip()
    return settings


def parse_config(path: Path | None = None, overrides: dict[str, Any] | None = None,
                 default_sweep: tuple[int, ...] | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from an optional file plus flag overrides."""
    raw: dict[str, Any] = read_config_file(path) if path is not None else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown configuration key {unknown[0]!r}", key=unknown[0])
    values = {}
    for key, (conv, default) in CONFIG_KEYS.items():
        if key not in raw:
            values[key] = default
            continue
        try:
            values[key] = conv(raw[key]) if not isinstance(raw[key], conv) else raw[key]
        except ValueError:
            raise ConfigurationError(f"cannot parse {key}={raw[key]!r}", key=key) from None
    try:
        sweep = parse_sweep(values["sweep_s"])
    except ValueError:
        raise ConfigurationError(f"cannot parse sweep_s={values['sweep_s']!r}", key="sweep_s") from None
    if sweep is None:
        sweep = default_sweep
    game = GameConfig(values["agents"], values["cutoff"], values["rounds"])
    checks = [("runs", values["runs"] >= 1, "runs must be at least 1"),
              ("seed", 0 <= values["seed"] < 2 ** 64, "seed must be a 64-bit unsigned integer"),
              ("warmup", 0 <= values["warmup"] < game.num_rounds - 1,
               "warmup must leave at least two measured rounds"),
              ("threads", values["threads"] >= 1, "threads must be at least 1"),
              ("sweep_s", sweep is None or (len(sweep) > 0 and min(sweep) >= 1),
               "sweep memory sizes must be at least 1")]
    for key, ok, message in checks:
        if not ok:
            raise ConfigurationError(message, key=key)
    try:
        task = TaskModel(values["tasks_per_round"], values["mean_task_time"],
                         values["deadline"], values["task_distribution"])
    except ValueError as exc:
        raise ConfigurationError(str(exc), key="task") from None
    return ExperimentConfig(game=game, policy=parse_policy(values["policy"]), runs=values["runs"],
                            root_seed=values["seed"], sweep=sweep, warmup=values["warmup"],
                            task=task, threads=values["threads"])


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("experiment")
    g.add_argument("--config", type=Path, help="key=value settings file; flags override it")
    g.add_argument("--agents", type=int, help="number of servers M (odd, default 21)")
    g.add_argument("--cutoff", type=int, help="activation threshold c_th (default 10)")
    g.add_argument("--rounds", type=int, help="offloading rounds per run (default 10000)")
    g.add_argument("--runs", type=int, help="independent runs per point (default 32)")
    g.add_argument("--seed", type=int, help="root seed (default 1)")
    g.add_argument("--sweep-s", dest="sweep_s", help="memory sizes, e.g. 1-7 or 2,3,5")
    g.add_argument("--warmup", type=int, help="rounds excluded from statistics (default 0)")
    g.add_argument("--tasks-per-round", dest="tasks_per_round", type=int, help="K (default 50)")
    g.add_argument("--mean-task-time", dest="mean_task_time", type=float, help="mu in seconds (default 1)")
    g.add_argument("--deadline", type=float, help="T in seconds (default 10)")
    g.add_argument("--task-distribution", dest="task_distribution",
                   choices=("exponential", "deterministic"))
    g.add_argument("--threads", type=int, help="worker processes (default 1)")
    g.add_argument("--out", type=Path, default=Path("."), help="output directory")
    g.add_argument("--plot", action="store_true", help="also write SVG figures")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="mg-edge-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="one experiment")
    run.add_argument("--policy", help="policy spec, e.g. 'wsls(p=0.005)'")
    sweep = sub.add_parser("sweep", parents=[common], help="volatility against alpha = 2^s/M")
    sweep.add_argument("--policy", help="policy spec")
    cmp_ = sub.add_parser("compare", parents=[common], help="all policies of the reference grid")
    cmp_.add_argument("--policy", action="append", help="restrict the grid (repeatable)")
    sub.add_parser("selftest", parents=[common], help="analytic baseline checks")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = set(CONFIG_KEYS) - {"policy"}
    out = {k: getattr(args, k, None) for k in keys}
    policy = getattr(args, "policy", None)
    if isinstance(policy, str):
        out["policy"] = policy
    return out


def _emit(args, config: ExperimentConfig, reports) -> Path:
    out_dir: Path = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    path = write_csv(out_dir / "results.csv", args.command, reports)
    log.info("wrote %s", path)
    if args.plot:
        description = "; ".join(metadata_lines(args.command, config, [str(r.config.policy) for r in reports]))
        for p in write_plots(out_dir, reports, description):
            log.info("wrote %s", p)
    return path


def cmd_run(args, config: ExperimentConfig) -> int:
    report = run_experiment(config)
    for p in report.points:
        where = "" if p.alpha is None else f" alpha={p.alpha:.4f}"
        print(f"{p.policy}{where}: volatility={p.mean('volatility'):.4f}±{p.se('volatility'):.4f} "
              f"utility={p.mean('mean_utility'):.4f} qoe={p.mean('qoe_probability'):.4f}")
    _emit(args, config, [report])
    return 0


def cmd_compare(args, config: ExperimentConfig) -> int:
    policies = args.policy or REFERENCE_GRID
    comparison = compare_policies(config, [parse_policy(p) for p in policies], config.sweep)
    print(comparison.summary())
    _emit(args, config, comparison.reports)
    return 0


def cmd_selftest(args, config: ExperimentConfig) -> int:
    """Random-policy binomial moments and the Erlang deadline oracle."""
    M = config.game.num_agents
    base = replace(config, policy=parse_policy("random"), sweep=None)
    report = run_experiments([base])[0]
    point = report.points[0]
    vol, att = point.mean("volatility"), point.mean("mean_attendance")
    checks = [
        (f"random volatility {vol:.4f} within 0.25 ± 0.02", abs(vol - 0.25) <= 0.02),
        (f"random attendance {att:.3f} within {M / 2} ± 0.1", abs(att - M / 2) <= 0.1),
    ]
    model = replace(config.task, tasks_per_round=50, mean_task_time=1.0, distribution="exponential")
    rng = np.random.default_rng(config.root_seed)
    for T in (3.0, 5.0, 8.0):
        m = replace(model, deadline=T)
        n_rounds = 20000
        est = qoe_from_attendance(np.full(n_rounds, 10), m, rng)
        exact = erlang_cdf(5, 1.0, T)
        half = 3 * np.sqrt(max(exact * (1 - exact), 1e-12) / (n_rounds * 10))
        checks.append((f"qoe T={T:g}: {est:.4f} vs Erlang {exact:.4f} ± {half:.4f}",
                       abs(est - exact) <= half))
    for text, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {text}")
    _emit(args, base, [report])
    return 0 if all(ok for _, ok in checks) else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    default_sweep = DEFAULT_SWEEP if args.command in ("sweep", "compare") else None
    try:
        config = parse_config(args.config, _overrides(args), default_sweep)
    except ConfigurationError as exc:
        parser.print_usage(sys.stderr)
        print(f"mg-edge-lab: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mg-edge-lab: cannot read config: {exc}", file=sys.stderr)
        return 2
    handler = {"run": cmd_run, "sweep": cmd_run, "compare": cmd_compare,
               "selftest": cmd_selftest}[args.command]
    try:
        return handler(args, config)
    except ConfigurationError as exc:
        print(f"mg-edge-lab: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mg-edge-lab: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

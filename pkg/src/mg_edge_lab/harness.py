"""Monte Carlo replication, memory-size sweeps and policy comparison."""
from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .game import GameConfig, audit_trace, run_batch, run_streams
from .metrics import TaskModel, evaluate
from .policies import PolicySpec, parse_policy

DEFAULT_SWEEP = (1, 2, 3, 4, 5, 6, 7)
RUN_BATCH = 32

# Reference parameter set for the cross-policy comparison; both Q-learning variants included.
REFERENCE_GRID = (
    "seminal(S=2)",
    "exponential(S=2,gamma=100)",
    "qlearn-action(gamma=0.1,eps=0.01)",
    "qlearn-strategy(S=2,gamma=0.1,eps=0.01)",
    "adaptive(aplus=0.5,aminus=0.5,x0=0.5)",
    "wsls(p=0.005)",
    "rotherev(lambda=0.2)",
    "automata(gamma=0.2,delta=0.3)",
    "random",
)

METRICS = ("volatility", "mean_attendance", "mean_utility", "qoe_probability")


def derive_seed(root_seed: int, policy_name: str, s: int, run_index: int) -> int:
    """64-bit seed for one run, hashed from its position in the experiment grid."""
    name = policy_name.encode()
    payload = struct.pack("<QI", root_seed % 2 ** 64, len(name)) + name + struct.pack("<qq", s, run_index)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def alpha(s: int, num_agents: int) -> float:
    return 2 ** s / num_agents


@dataclass(frozen=True)
class ExperimentConfig:
    game: GameConfig = field(default_factory=GameConfig)
    policy: PolicySpec = field(default_factory=lambda: parse_policy("random"))
    runs: int = 32
    root_seed: int = 1
    sweep: tuple[int, ...] | None = None
    warmup: int = 0
    task: TaskModel = field(default_factory=TaskModel)
    threads: int = 1
    audit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "policy", parse_policy(self.policy))
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.sweep is not None and any(s < 1 for s in self.sweep):
            raise ValueError("sweep memory sizes must be at least 1")
        if self.warmup < 0 or self.warmup + 1 >= self.game.num_rounds:
            raise ValueError("warmup must leave at least two measured rounds")


@dataclass
class RunResult:
    run_index: int
    seed: int
    volatility: float
    mean_attendance: float
    mean_utility: float
    qoe_probability: float


@dataclass
class PointReport:
    """Runs of one policy at one memory size (``s`` is None when memoryless)."""
    policy: str
    s: int | None
    alpha: float | None
    runs: list[RunResult]
    flat: bool = False
    audited_rounds: int = 0

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(r, metric) for r in self.runs])

    def mean(self, metric: str) -> float:
        return float(self.values(metric).mean())

    def se(self, metric: str) -> float:
        v = self.values(metric)
        return float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0

    @property
    def name(self) -> str:
        return parse_policy(self.policy).name


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    points: list[PointReport]

    def curve(self, metric: str = "volatility") -> dict[float, tuple[float, float]]:
        """``alpha -> (mean, standard error)`` over the sweep points."""
        return {p.alpha: (p.mean(metric), p.se(metric)) for p in self.points if p.alpha is not None}

    def best(self, metric: str = "volatility") -> PointReport:
        """Point with the lowest mean ``metric``."""
        return min(self.points, key=lambda p: p.mean(metric))


def _run_point(game: GameConfig, spec: str, s: int, runs: int, root_seed: int,
               warmup: int, task: TaskModel, audit: bool) -> tuple[list[RunResult], int]:
    spec = parse_policy(spec)
    results, audited = [], 0
    for start in range(0, runs, RUN_BATCH):
        indices = range(start, min(runs, start + RUN_BATCH))
        seeds = [derive_seed(root_seed, spec.name, s, i) for i in indices]
        for i, trace in zip(indices, run_batch(game, spec, seeds)):
            if audit:
                audited += audit_trace(trace)
            m = evaluate(trace, task, warmup, run_streams(trace.seed).tasks)
            results.append(RunResult(i, trace.seed, m.volatility, m.mean_attendance,
                                     m.mean_utility, m.qoe_probability))
    return results, audited


def _work_items(config: ExperimentConfig) -> list[tuple[PolicySpec, int, list[float] | None]]:
    """(spec, seed-s, alpha keys it stands for) per distinct simulation."""
    spec, M = config.policy, config.game.num_agents
    if config.sweep is None:
        return [(spec, spec.memory, None)]
    if not spec.uses_history:
        return [(spec, 0, [alpha(s, M) for s in config.sweep])]
    return [(spec.with_memory(s), s, None) for s in config.sweep]


def _execute(jobs: list[tuple], threads: int) -> list[tuple[list[RunResult], int]]:
    if threads <= 1 or len(jobs) <= 1:
        return [_run_point(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(_run_point, *zip(*jobs)))


def run_experiments(configs: Sequence[ExperimentConfig], threads: int | None = None) -> list[ExperimentReport]:
    """Run several experiments, sharing one worker pool across all their points."""
    threads = max(c.threads for c in configs) if threads is None else threads
    plan, jobs = [], []
    for ci, config in enumerate(configs):
        for spec, s, keys in _work_items(config):
            plan.append((ci, spec, s, keys))
            jobs.append((config.game, str(spec), s, config.runs, config.root_seed,
                         config.warmup, config.task, config.audit))
    outputs = _execute(jobs, threads)
    points: list[list[PointReport]] = [[] for _ in configs]
    for (ci, spec, s, keys), (results, audited) in zip(plan, outputs):
        M = configs[ci].game.num_agents
        if keys is not None:
            # memoryless policy in a sweep: one evaluation reported at every alpha
            points[ci].extend(PointReport(str(spec), None, a, results, True, audited) for a in keys)
        elif spec.uses_history:
            points[ci].append(PointReport(str(spec), s, alpha(s, M), results, False, audited))
        else:
            points[ci].append(PointReport(str(spec), None, None, results, False, audited))
    return [ExperimentReport(c, p) for c, p in zip(configs, points)]


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return run_experiments([config])[0]


def sweep_alpha(config: ExperimentConfig, s_values: Iterable[int] = DEFAULT_SWEEP) -> ExperimentReport:
    return run_experiment(replace(config, sweep=tuple(s_values)))


@dataclass
class ComparisonReport:
    reports: list[ExperimentReport]

    def ranking(self) -> list[tuple[str, PointReport]]:
        """Policies ordered by their lowest sweep-point volatility (best first)."""
        rows = [(r.config.policy.name, r.best("volatility")) for r in self.reports]
        return sorted(rows, key=lambda row: row[1].mean("volatility"))

    def summary(self) -> str:
        lines = [f"{'rank':>4}  {'policy':<16} {'alpha':>8} {'volatility':>18} "
                 f"{'utility':>18} {'qoe':>18}"]
        for k, (name, p) in enumerate(self.ranking(), 1):
            a = "flat" if p.flat or p.alpha is None else f"{p.alpha:.4f}"
            cells = "".join(f" {p.mean(m):>9.4f}±{p.se(m):<8.4f}"
                            for m in ("volatility", "mean_utility", "qoe_probability"))
            lines.append(f"{k:>4}  {name:<16} {a:>8}{cells}")
        return "\n".join(lines)


def compare_policies(base: ExperimentConfig, policies: Sequence[str | PolicySpec] = REFERENCE_GRID,
                     sweep: tuple[int, ...] | None = DEFAULT_SWEEP) -> ComparisonReport:
    """Run every policy in ``policies`` under ``base``, each swept over ``sweep``."""
    configs = [replace(base, policy=parse_policy(p), sweep=sweep) for p in policies]
    return ComparisonReport(run_experiments(configs, base.threads))

"""Volatility, per-server utility and deadline-satisfaction (QoE) metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GameTrace

TASK_DISTRIBUTIONS = ("exponential", "deterministic")


@dataclass(frozen=True)
class TaskModel:
    """Offloaded workload of one round.

    ``tasks_per_round`` tasks are spread round-robin over the active servers.
    Each task takes an exponential (or fixed) time with mean
    ``mean_task_time``. A server meets the deadline when its total busy time
    is at most ``deadline``.
    """
    tasks_per_round: int = 50
    mean_task_time: float = 1.0
    deadline: float = 10.0
    distribution: str = "exponential"

    def __post_init__(self):
        if self.tasks_per_round < 1:
            raise ValueError("tasks_per_round must be at least 1")
        if not self.mean_task_time > 0:
            raise ValueError("mean_task_time must be positive")
        if not self.deadline > 0:
            raise ValueError("deadline must be positive")
        if self.distribution not in TASK_DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {TASK_DISTRIBUTIONS}")


@dataclass
class MetricReport:
    volatility: float
    mean_attendance: float
    avg_utility_per_agent: np.ndarray
    mean_utility: float
    qoe_probability: float
    warmup_rounds: int


def _window(series: np.ndarray, warmup: int) -> np.ndarray:
    if warmup < 0:
        raise ValueError("warmup must be nonnegative")
    if series.shape[-1] <= warmup + 1:
        raise ValueError(f"series of length {series.shape[-1]} too short for warmup {warmup}")
    return series[..., warmup:]


def volatility(attendance, num_agents: int, warmup: int = 0) -> float:
    """Variance of attendance about its window mean, divided by ``num_agents``."""
    window = _window(np.asarray(attendance, dtype=float), warmup)
    return float(np.var(window) / num_agents)


def average_utility(trace: GameTrace, warmup: int = 0) -> tuple[np.ndarray, float]:
    """Mean reward per round for every agent, and the population mean."""
    rewards = _window(trace.rewards, warmup)
    per_agent = rewards.mean(axis=1)
    return per_agent, float(per_agent.mean())


def server_loads(attendance: int, tasks: int) -> np.ndarray:
    """Tasks per active server under round-robin division (differ by at most one)."""
    base, extra = divmod(tasks, attendance)
    loads = np.full(attendance, base, dtype=np.int64)
    loads[:extra] += 1
    return loads


def qoe_from_attendance(attendance, model: TaskModel, rng: np.random.Generator) -> float:
    """Mean over rounds of the fraction of active servers finishing by the deadline.

    Rounds with no active server count as 0.
    """
    att = np.asarray(attendance, dtype=np.int64)
    if att.size == 0:
        raise ValueError("empty attendance series")
    busy = att > 0
    if not busy.any():
        return 0.0
    c = att[busy]
    base, extra = np.divmod(model.tasks_per_round, c)
    # one entry per active server, all rounds concatenated
    round_of = np.repeat(np.arange(c.size), c)
    offset = np.arange(round_of.size) - np.repeat(np.cumsum(c) - c, c)
    loads = base[round_of] + (offset < extra[round_of])
    if model.distribution == "deterministic":
        tau = loads * model.mean_task_time
    else:
        tau = np.zeros(loads.size)
        nz = loads > 0
        tau[nz] = rng.gamma(loads[nz], model.mean_task_time)
    met = np.bincount(round_of, weights=(tau <= model.deadline), minlength=c.size)
    return float((met / c).sum() / att.size)


def erlang_cdf(n: int, mean_task_time: float, t: float) -> float:
    """Pr[sum of ``n`` exponential task times <= t], closed form."""
    if n == 0:
        return 1.0
    x = t / mean_task_time
    term, total = math.exp(-x), 0.0
    for k in range(n):
        total += term
        term *= x / (k + 1)
    return 1.0 - total


def qoe_probability(trace: GameTrace, model: TaskModel, warmup: int = 0,
                    rng: np.random.Generator | None = None) -> float:
    """Estimate Pr[tau <= T] over the measured rounds of ``trace``."""
    rng = np.random.default_rng() if rng is None else rng
    return qoe_from_attendance(_window(trace.attendance, warmup), model, rng)


def evaluate(trace: GameTrace, model: TaskModel, warmup: int = 0,
             rng: np.random.Generator | None = None) -> MetricReport:
    per_agent, mean_u = average_utility(trace, warmup)
    window = _window(trace.attendance, warmup)
    return MetricReport(
        volatility=volatility(trace.attendance, trace.config.num_agents, warmup),
        mean_attendance=float(window.mean()),
        avg_utility_per_agent=per_agent,
        mean_utility=mean_u,
        qoe_probability=qoe_probability(trace, model, warmup, rng),
        warmup_rounds=warmup,
    )

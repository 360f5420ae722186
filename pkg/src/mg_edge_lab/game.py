"""Repeated minority game engine for edge-server activation.

Each of ``num_agents`` servers chooses between inactive (0) and active (1)
every round. When at most ``cutoff`` servers are active the active side wins;
otherwise the inactive side wins. Winners receive ``reward`` and losers 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, TraceAuditError
from .policies import Policy, PolicySpec, build_policy, parse_policy

CHUNK_ROUNDS = 1000


class ActionId(IntEnum):
    INACTIVE = 0
    ACTIVE = 1


@dataclass(frozen=True)
class GameConfig:
    num_agents: int = 21
    cutoff: int = 10
    num_rounds: int = 10000
    reward: float = 1.0

    def __post_init__(self):
        if not isinstance(self.num_agents, (int, np.integer)) or self.num_agents < 1:
            raise ConfigurationError("agents must be a positive integer", key="agents")
        if self.num_agents % 2 == 0:
            raise ConfigurationError("agents must be odd", key="agents")
        if not 0 < self.cutoff < self.num_agents:
            raise ConfigurationError("cutoff must satisfy 0 < cutoff < agents", key="cutoff")
        if self.num_rounds < 1:
            raise ConfigurationError("rounds must be at least 1", key="rounds")
        if not self.reward > 0:
            raise ConfigurationError("reward must be positive", key="reward")


@dataclass
class RoundOutcome:
    """Result of one round. Fields gain a leading run axis when batched."""
    round_index: int
    actions: np.ndarray
    attendance: int | np.ndarray
    winning_action: ActionId | np.ndarray
    rewards: np.ndarray


def determine_winner(attendance, cutoff: int, num_agents: int | None = None):
    """Active wins iff ``attendance <= cutoff`` (ties go to active)."""
    att = np.asarray(attendance)
    if np.any(att < 0) or (num_agents is not None and np.any(att > num_agents)):
        raise ValueError(f"attendance out of range [0, {num_agents}]")
    if num_agents is not None and not 0 < cutoff < num_agents:
        raise ValueError("cutoff must satisfy 0 < cutoff < num_agents")
    winning = (att <= cutoff).astype(np.int8)
    if winning.ndim == 0:
        return ActionId(int(winning))
    return winning


def assign_rewards(actions, winning, reward: float = 1.0, num_agents: int | None = None) -> np.ndarray:
    """Reward vector: ``reward`` for agents that played ``winning``, else 0."""
    actions = np.asarray(actions)
    if num_agents is not None and actions.shape[-1] != num_agents:
        raise ValueError(f"expected {num_agents} actions, got {actions.shape[-1]}")
    hit = actions == np.asarray(winning)[..., None]
    return np.where(hit, float(reward), 0.0)


class WinHistory:
    """Most recent winning actions, packed as integers (one per run).

    Bit 0 of a code is the latest winner, bit 1 the one before, and so on,
    so the low ``s`` bits index a strategy table of memory ``s``.
    """

    def __init__(self, capacity: int, batch: tuple[int, ...] = ()):
        self.capacity = capacity
        self.codes = np.zeros(batch, dtype=np.int64)
        self.length = 0
        self._mask = (1 << capacity) - 1

    @classmethod
    def from_actions(cls, winners: Sequence[int] | np.ndarray, capacity: int | None = None) -> "WinHistory":
        """Build from winners ordered oldest first; a 2-D input is one row per run."""
        winners = np.asarray(winners, dtype=np.int64)
        capacity = winners.shape[-1] if capacity is None else capacity
        hist = cls(capacity, winners.shape[:-1])
        for j in range(winners.shape[-1]):
            hist.push(winners[..., j])
        return hist

    def push(self, winning) -> None:
        w = np.asarray(winning, dtype=np.int64)
        if np.any((w != 0) & (w != 1)):
            raise ValueError("winning actions must be 0 or 1")
        self.codes = ((self.codes << 1) | w) & self._mask
        self.length = min(self.length + 1, self.capacity)

    def code(self, s: int) -> np.ndarray:
        if s > self.length:
            raise ValueError(f"history holds {self.length} rounds, {s} requested")
        return self.codes & ((1 << s) - 1)

    def to_list(self) -> list[int]:
        """Stored winners of an unbatched history, oldest first."""
        c = int(self.codes)
        return [(c >> k) & 1 for k in range(self.length - 1, -1, -1)]

    def __len__(self) -> int:
        return self.length


def play_round(policy: Policy, history: WinHistory, config: GameConfig, u: np.ndarray,
               round_index: int = 0) -> RoundOutcome:
    """Play one simultaneous round and deliver the outcome to every learner.

    All agents select before any of them observes. Agents see only the
    shared winner history.
    """
    code = history.code(policy.memory)
    actions = np.asarray(policy.select(code, u), dtype=np.int8)
    if actions.shape[-1] != config.num_agents:
        raise ValueError(f"policy returned {actions.shape[-1]} actions for {config.num_agents} agents")
    attendance = actions.sum(axis=-1, dtype=np.int64)
    winning = np.asarray(determine_winner(attendance, config.cutoff, config.num_agents), dtype=np.int8)
    rewards = assign_rewards(actions, winning, config.reward)
    policy.observe(actions, winning, rewards)
    history.push(winning)
    return RoundOutcome(round_index, actions, attendance, winning, rewards)


@dataclass
class RunStreams:
    init: np.random.Generator
    play: np.random.Generator
    tasks: np.random.Generator


def run_streams(seed: int) -> RunStreams:
    """Independent generators for setup, play and task-time sampling of one run."""
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    init, play, tasks = np.random.SeedSequence(seed).spawn(3)
    return RunStreams(*(np.random.Generator(np.random.PCG64(s)) for s in (init, play, tasks)))


@dataclass
class GameTrace:
    """Full record of one seeded run.

    ``actions`` and ``wins`` are ``(num_agents, num_rounds)`` matrices;
    ``attendance`` and ``winning`` are per round.
    """
    config: GameConfig
    policy: str
    seed: int
    actions: np.ndarray
    wins: np.ndarray
    attendance: np.ndarray
    winning: np.ndarray
    initial_history: tuple[int, ...] = ()

    @property
    def rewards(self) -> np.ndarray:
        return self.wins * self.config.reward

    @property
    def num_rounds(self) -> int:
        return self.attendance.shape[0]

    def outcome(self, t: int) -> RoundOutcome:
        return RoundOutcome(t, self.actions[:, t], int(self.attendance[t]),
                            ActionId(int(self.winning[t])), self.rewards[:, t])

    @property
    def outcomes(self) -> list[RoundOutcome]:
        return [self.outcome(t) for t in range(self.num_rounds)]


def run_batch(config: GameConfig, spec: PolicySpec | str, seeds: Sequence[int]) -> list[GameTrace]:
    """Run one game per seed, simulated side by side.

    Each run's trace depends only on ``(config, spec, seed)``: setup draws and
    per-round variates come from that run's own generators and are consumed
    in the same order whatever the batch composition.
    """
    spec = parse_policy(spec)
    seeds = [int(s) for s in seeds]
    M, T = config.num_agents, config.num_rounds
    streams = [run_streams(s) for s in seeds]
    memory = spec.memory
    initial = np.array([st.init.integers(0, 2, size=memory) for st in streams], dtype=np.int64)
    initial = initial.reshape(len(seeds), memory)
    policy = build_policy(spec, M, [st.init for st in streams])
    history = WinHistory.from_actions(initial, capacity=memory)

    R, k = len(seeds), policy.n_uniforms
    actions = np.empty((R, M, T), dtype=np.int8)
    wins = np.empty((R, M, T), dtype=bool)
    attendance = np.empty((R, T), dtype=np.int16)
    winning = np.empty((R, T), dtype=np.int8)
    for start in range(0, T, CHUNK_ROUNDS):
        n = min(CHUNK_ROUNDS, T - start)
        u = np.stack([st.play.random((n, M, k)) for st in streams], axis=1)
        for j in range(n):
            t = start + j
            out = play_round(policy, history, config, u[j], t)
            actions[:, :, t] = out.actions
            wins[:, :, t] = out.rewards > 0
            attendance[:, t] = out.attendance
            winning[:, t] = out.winning_action
    return [GameTrace(config, str(spec), seed, actions[r], wins[r], attendance[r], winning[r],
                      tuple(int(b) for b in initial[r]))
            for r, seed in enumerate(seeds)]


def run_game(config: GameConfig, spec: PolicySpec | str, seed: int) -> GameTrace:
    """Simulate one homogeneous population; a pure function of its arguments."""
    return run_batch(config, spec, [seed])[0]


def audit_trace(trace: GameTrace) -> int:
    """Check a trace's bookkeeping exhaustively; return the number of rounds audited.

    Raises ``TraceAuditError`` on the first violated rule.
    """
    cfg = trace.config
    M, c = cfg.num_agents, trace.attendance.astype(np.int64)
    if not np.array_equal(trace.actions.sum(axis=0, dtype=np.int64), c):
        raise TraceAuditError("attendance differs from the column sums of the action matrix")
    expected = (c <= cfg.cutoff).astype(np.int8)
    if not np.array_equal(trace.winning, expected):
        raise TraceAuditError("winning action disagrees with the cutoff rule")
    if not np.array_equal(trace.wins, trace.actions == trace.winning[None, :]):
        raise TraceAuditError("rewards not paid exactly to the players of the winning action")
    winners = trace.wins.sum(axis=0, dtype=np.int64)
    if not np.array_equal(winners, np.where(expected == 1, c, M - c)):
        raise TraceAuditError("rewarded count differs from the winning side size")
    bound = np.where(expected == 1, cfg.cutoff, M - cfg.cutoff - 1)
    if np.any(winners > bound):
        raise TraceAuditError("more winners than the cutoff rule allows")
    return trace.num_rounds

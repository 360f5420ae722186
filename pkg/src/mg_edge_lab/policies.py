"""Learning rules for the repeated minority game.

Every rule is written as plain functions over a small state dataclass. The
arrays in a state carry arbitrary leading dimensions, so the same function
serves a single agent (leading shape ``()``) and a whole batch of runs and
agents (leading shape ``(runs, agents)``). Randomness enters through
pre-drawn uniform variates ``u`` rather than a generator, one or two per
agent and round; this keeps each run's stream independent of how runs are
batched.

Action encoding: ``0`` is inactive, ``1`` is active.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ConfigurationError

MAX_MEMORY = 16
NUM_ACTIONS = 2


# Sampling helpers -----------------------------------------------------------

def argmax_random(values: np.ndarray, u) -> np.ndarray:
    """Index of the maximum along the last axis, ties split uniformly by ``u``."""
    values = np.asarray(values)
    is_max = values == values.max(axis=-1, keepdims=True)
    n_ties = is_max.sum(axis=-1)
    k = np.minimum((np.asarray(u) * n_ties).astype(np.int64), n_ties - 1)
    # first position whose running tie count exceeds k is the k-th tied entry
    return np.argmax(is_max.cumsum(axis=-1) > k[..., None], axis=-1)


def sample_categorical(probs: np.ndarray, u) -> np.ndarray:
    """Inverse-CDF draw from normalized ``probs`` (last axis) using ``u``."""
    probs = np.asarray(probs, dtype=float)
    cdf = np.cumsum(probs, axis=-1)
    idx = (cdf <= np.asarray(u)[..., None]).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def _take(values: np.ndarray, index) -> np.ndarray:
    """``values[..., index]`` with one index per leading position."""
    lead = values.shape[:-1]
    flat = values.reshape(-1, values.shape[-1])
    idx = np.broadcast_to(index, lead).ravel()
    return flat[np.arange(flat.shape[0]), idx].reshape(lead)


# Strategy tables ------------------------------------------------------------

def generate_strategy_table(memory_size: int, rng: np.random.Generator,
                            size: tuple[int, ...] = ()) -> np.ndarray:
    """Draw strategy tables with i.i.d. uniform entries.

    Returns an int8 array of shape ``size + (2**memory_size,)``. Entry ``j``
    is the action prescribed when the last ``memory_size`` winning actions,
    read as a base-2 number with the most recent as the lowest bit, equal
    ``j``.
    """
    if not isinstance(memory_size, (int, np.integer)) or not 1 <= memory_size <= MAX_MEMORY:
        raise ValueError(f"memory size must be an integer in [1, {MAX_MEMORY}], got {memory_size!r}")
    return rng.integers(0, 2, size=(*size, 2 ** int(memory_size)), dtype=np.int8)


def predictions(tables: np.ndarray, code) -> np.ndarray:
    """Action each strategy prescribes at history ``code``; shape ``(..., S)``."""
    code = np.asarray(code, dtype=np.int64)
    if np.any(code >= tables.shape[-1]) or np.any(code < 0):
        raise ValueError("history code out of range for the strategy tables")
    lead = tables.shape[:-2]
    flat = tables.reshape((-1,) + tables.shape[-2:])
    idx = np.broadcast_to(code, lead).ravel()
    return flat[np.arange(flat.shape[0]), :, idx].reshape(tables.shape[:-1])


# Seminal and exponential learning -------------------------------------------

@dataclass
class ScoredStrategySet:
    """Strategy tables ``(..., S, 2**s)`` with one virtual score per strategy."""
    tables: np.ndarray
    scores: np.ndarray
    gamma: float = math.inf
    scoring: str = "plus-one"

    def __post_init__(self):
        if self.tables.shape[-2] < 2:
            raise ValueError("at least two strategies are required")
        if self.scores.shape != self.tables.shape[:-1]:
            raise ValueError("one score per strategy is required")
        if not (self.gamma >= 0):
            raise ValueError("learning rate must be nonnegative")
        if self.scoring not in SCORING_RULES:
            raise ValueError(f"unknown scoring rule {self.scoring!r}")

    @property
    def memory(self) -> int:
        return int(self.tables.shape[-1]).bit_length() - 1

    @classmethod
    def fresh(cls, tables: np.ndarray, gamma: float = math.inf,
              scoring: str = "plus-one") -> "ScoredStrategySet":
        return cls(tables, np.zeros(tables.shape[:-1]), gamma, scoring)


SCORING_RULES = ("plus-one", "plus-minus")


def seminal_select(state: ScoredStrategySet, code, u,
                   preds: np.ndarray | None = None) -> np.ndarray:
    """Play the best-scoring strategy; ties are broken uniformly using ``u``."""
    pick = argmax_random(state.scores, u)
    return _take(predictions(state.tables, code) if preds is None else preds, pick)


def seminal_update(state: ScoredStrategySet, code, winning,
                   preds: np.ndarray | None = None) -> ScoredStrategySet:
    """Score every strategy on whether it predicted ``winning`` at ``code``.

    ``code`` is the history the round was played on. Scores change for all
    strategies, played or not. ``preds`` may pass in ``predictions(tables,
    code)`` when the caller already has it.
    """
    if preds is None:
        preds = predictions(state.tables, code)
    correct = preds == np.asarray(winning)[..., None]
    if state.scoring == "plus-one":
        state.scores += correct
    else:
        state.scores += np.where(correct, 1.0, -1.0)
    return state


def exponential_probabilities(scores: np.ndarray, gamma: float) -> np.ndarray:
    """Softmax of ``gamma * scores`` over the last axis, overflow safe.

    ``gamma = inf`` returns the argmax distribution with ties shared equally.
    """
    scores = np.asarray(scores, dtype=float)
    top = scores.max(axis=-1, keepdims=True)
    if math.isinf(gamma):
        w = (scores == top).astype(float)
    elif gamma == 0:
        w = np.ones_like(scores)
    else:
        w = np.exp(gamma * (scores - top))
    return w / w.sum(axis=-1, keepdims=True)


def exponential_select(state: ScoredStrategySet, code, u,
                       preds: np.ndarray | None = None) -> np.ndarray:
    if math.isinf(state.gamma):
        return seminal_select(state, code, u, preds)
    pick = sample_categorical(exponential_probabilities(state.scores, state.gamma), u)
    return _take(predictions(state.tables, code) if preds is None else preds, pick)


# Q-learning -----------------------------------------------------------------

@dataclass
class QState:
    """Q-values over actions, or over strategies when ``tables`` is given."""
    q: np.ndarray
    step: float
    eps: float
    tables: np.ndarray | None = None

    def __post_init__(self):
        if not 0 < self.step <= 1:
            raise ValueError("Q step size must lie in (0, 1]")
        if not 0 <= self.eps <= 1:
            raise ValueError("exploration rate must lie in [0, 1]")
        if self.tables is not None and self.tables.shape[:-1] != self.q.shape:
            raise ValueError("one Q-value per strategy is required")


def epsilon_greedy(q: np.ndarray, eps: float, u) -> np.ndarray:
    """Index chosen epsilon-greedily; ``u[..., 0]`` explores, ``u[..., 1]`` breaks ties."""
    u = np.asarray(u)
    explore = u[..., 0] < eps
    k = q.shape[-1]
    random_idx = np.minimum((u[..., 0] / eps * k).astype(np.int64), k - 1) if eps > 0 else 0
    return np.where(explore, random_idx, argmax_random(q, u[..., 1]))


def q_choose(state: QState, u) -> np.ndarray:
    return epsilon_greedy(state.q, state.eps, u)


def q_select(state: QState, code, u) -> np.ndarray:
    """Action from the epsilon-greedy choice over Q-values.

    The action-based variant ignores ``code``; the strategy-based variant
    reads the chosen strategy's table at ``code``.
    """
    idx = q_choose(state, u)
    if state.tables is None:
        return idx
    return _take(predictions(state.tables, code), idx)


def q_update(state: QState, chosen, utility) -> QState:
    """Move the chosen entry toward ``utility`` by the step size; others untouched."""
    chosen = np.asarray(chosen)[..., None]
    current = np.take_along_axis(state.q, chosen, axis=-1)
    target = np.asarray(utility, dtype=float)[..., None]
    np.put_along_axis(state.q, chosen, current + state.step * (target - current), axis=-1)
    return state


# Adaptive strategy ----------------------------------------------------------

class WinFraction:
    """Per-action fraction of rounds won, cumulative or over a sliding window."""

    def __init__(self, shape: tuple[int, ...], window: int = 0):
        self.window = window
        self.counts = np.zeros(shape + (NUM_ACTIONS,))
        self.length = 0
        self._recent: deque = deque()

    def push(self, winning) -> None:
        onehot = np.asarray(winning)[..., None] == np.arange(NUM_ACTIONS)
        self.counts = self.counts + onehot
        self.length += 1
        if self.window:
            self._recent.append(onehot)
            if len(self._recent) > self.window:
                self.counts = self.counts - self._recent.popleft()
                self.length -= 1

    def fractions(self) -> np.ndarray:
        if self.length == 0:
            return np.full(self.counts.shape, 1.0 / NUM_ACTIONS)
        return self.counts / self.length


@dataclass
class AdaptiveState:
    attitudes: np.ndarray
    last_utility: np.ndarray
    wins: WinFraction
    aplus: float = 0.5
    aminus: float = 0.5

    @classmethod
    def fresh(cls, shape: tuple[int, ...], x0: float = 0.5, u0: float = 0.5,
              aplus: float = 0.5, aminus: float = 0.5, window: int = 0) -> "AdaptiveState":
        if not 0 <= x0 <= 1:
            raise ValueError("initial attitude must lie in [0, 1]")
        return cls(np.full(shape + (NUM_ACTIONS,), float(x0)),
                   np.full(shape + (NUM_ACTIONS,), float(u0)),
                   WinFraction(shape, window), aplus, aminus)


def attractiveness(state: AdaptiveState) -> np.ndarray:
    x = state.attitudes
    return (1.0 - x) * state.wins.fractions() + x * state.last_utility


def adaptive_select(state: AdaptiveState, u) -> np.ndarray:
    return argmax_random(attractiveness(state), u)


def adaptive_update(state: AdaptiveState, action, won, utility, winning) -> AdaptiveState:
    """Shift the played action's attitude up on a win, down on a loss, clamped to [0, 1]."""
    played = np.asarray(action)[..., None] == np.arange(NUM_ACTIONS)
    delta = np.where(np.asarray(won), state.aplus, -state.aminus)[..., None]
    state.attitudes = np.where(played, np.clip(state.attitudes + delta, 0.0, 1.0),
                               state.attitudes)
    state.last_utility = np.where(played, np.asarray(utility, dtype=float)[..., None],
                                  state.last_utility)
    state.wins.push(winning)
    return state


# Win-stay lose-shift --------------------------------------------------------

@dataclass
class WSLSState:
    last_action: np.ndarray  # -1 before the first round
    last_won: np.ndarray
    p: float

    @classmethod
    def fresh(cls, shape: tuple[int, ...], p: float) -> "WSLSState":
        if not 0 <= p <= 1:
            raise ValueError("shift probability must lie in [0, 1]")
        return cls(np.full(shape, -1, dtype=np.int8), np.zeros(shape, dtype=bool), p)


def wsls_select(state: WSLSState, u) -> np.ndarray:
    u = np.asarray(u)
    first = state.last_action < 0
    flip = ~state.last_won & (u < state.p)
    repeat = np.where(flip, 1 - state.last_action, state.last_action)
    return np.where(first, (u < 0.5).astype(np.int8), repeat).astype(np.int8)


def wsls_update(state: WSLSState, action, reward) -> WSLSState:
    state.last_action = np.asarray(action, dtype=np.int8).copy()
    state.last_won = np.asarray(reward) > 0
    return state


# Roth-Erev ------------------------------------------------------------------

ZERO_MASS = 1e-12


@dataclass
class RothErevState:
    weights: np.ndarray
    discount: float

    @classmethod
    def fresh(cls, shape: tuple[int, ...], discount: float, w0: float = 1.0) -> "RothErevState":
        if not 0 <= discount <= 1:
            raise ValueError("discount must lie in [0, 1]")
        if not w0 > 0:
            raise ValueError("initial weight must be positive")
        return cls(np.full(shape + (NUM_ACTIONS,), float(w0)), discount)


def rotherev_update(state: RothErevState, chosen, utility) -> RothErevState:
    played = np.asarray(chosen)[..., None] == np.arange(NUM_ACTIONS)
    state.weights = state.discount * state.weights + played * np.asarray(utility, dtype=float)[..., None]
    return state


def rotherev_probabilities(state: RothErevState) -> np.ndarray:
    total = state.weights.sum(axis=-1, keepdims=True)
    degenerate = total < ZERO_MASS
    safe = np.where(degenerate, 1.0, total)
    return np.where(degenerate, 1.0 / NUM_ACTIONS, state.weights / safe)


def rotherev_select(state: RothErevState, u) -> np.ndarray:
    return sample_categorical(rotherev_probabilities(state), u)


# Learning automata ----------------------------------------------------------

AUTOMATA_FORMS = ("verbatim", "standard")


@dataclass
class AutomataState:
    probs: np.ndarray
    reward_rate: float
    penalty_rate: float
    form: str = "verbatim"

    @classmethod
    def fresh(cls, shape: tuple[int, ...], reward_rate: float, penalty_rate: float,
              form: str = "verbatim") -> "AutomataState":
        if not (0 <= reward_rate <= 1 and 0 <= penalty_rate <= 1):
            raise ValueError("reward and penalty rates must lie in [0, 1]")
        if form not in AUTOMATA_FORMS:
            raise ValueError(f"unknown automata form {form!r}")
        return cls(np.full(shape + (NUM_ACTIONS,), 1.0 / NUM_ACTIONS),
                   reward_rate, penalty_rate, form)


def automata_update(state: AutomataState, chosen, utility) -> AutomataState:
    """Linear reward-penalty step followed by clamp-and-renormalize.

    ``utility`` is 1 for a win and 0 for a loss. With ``form="verbatim"`` a
    penalized round pulls non-chosen actions toward 1/2, which loses mass for
    two actions; the renormalization restores a distribution. ``"standard"``
    pulls them toward 1 and conserves mass exactly.
    """
    p = state.probs
    played = np.asarray(chosen)[..., None] == np.arange(NUM_ACTIONS)
    U = np.asarray(utility, dtype=float)[..., None]
    g, d = state.reward_rate, state.penalty_rate
    target = 0.5 if state.form == "verbatim" else 1.0
    on_chosen = p + g * U * (1.0 - p) - d * (1.0 - U) * p
    on_other = p - g * U * p + d * (1.0 - U) * (target - p)
    raw = np.clip(np.where(played, on_chosen, on_other), 0.0, 1.0)
    state.probs = raw / raw.sum(axis=-1, keepdims=True)
    return state


def automata_select(state: AutomataState, u) -> np.ndarray:
    return sample_categorical(state.probs, u)


def random_select(u) -> np.ndarray:
    return (np.asarray(u) < 0.5).astype(np.int8)


# Policy specs ---------------------------------------------------------------

_INF = math.inf

# name -> {param: (default, kind)}; kind is "int", "float" or a tuple of choices
POLICY_PARAMS: dict[str, dict[str, tuple[Any, Any]]] = {
    "seminal": {"S": (2, "int"), "s": (3, "int"), "scoring": ("plus-one", SCORING_RULES)},
    "exponential": {"S": (2, "int"), "s": (3, "int"), "gamma": (100.0, "float"),
                    "scoring": ("plus-one", SCORING_RULES)},
    "qlearn-action": {"gamma": (0.1, "float"), "eps": (0.01, "float"), "q0": (0.5, "float")},
    "qlearn-strategy": {"S": (2, "int"), "s": (3, "int"), "gamma": (0.1, "float"),
                        "eps": (0.01, "float"), "q0": (0.5, "float")},
    "adaptive": {"aplus": (0.5, "float"), "aminus": (0.5, "float"), "x0": (0.5, "float"),
                 "u0": (0.5, "float"), "window": (0, "int")},
    "wsls": {"p": (0.005, "float")},
    "rotherev": {"lambda": (0.2, "float"), "w0": (1.0, "float")},
    "automata": {"gamma": (0.2, "float"), "delta": (0.3, "float"),
                 "form": ("verbatim", AUTOMATA_FORMS)},
    "random": {},
}

STRATEGY_POLICIES = ("seminal", "exponential", "qlearn-strategy")

_SPEC_RE = re.compile(r"^\s*([A-Za-z][\w-]*)\s*(?:\((.*)\))?\s*$", re.S)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:g}"
    return str(value)


@dataclass(frozen=True)
class PolicySpec:
    """A named learning rule with fully resolved parameters."""
    name: str
    params: tuple[tuple[str, Any], ...] = field(default=())

    def __getitem__(self, key: str) -> Any:
        return dict(self.params)[key]

    def __str__(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={_format_value(v)}" for k, v in self.params)
        return f"{self.name}({inner})"

    @property
    def uses_history(self) -> bool:
        return self.name in STRATEGY_POLICIES

    @property
    def memory(self) -> int:
        return int(self["s"]) if self.uses_history else 0

    def with_memory(self, s: int) -> "PolicySpec":
        if not self.uses_history:
            return self
        return make_spec(self.name, {**dict(self.params), "s": s})


def _coerce(name: str, key: str, raw: Any, kind: Any) -> Any:
    try:
        if kind == "int":
            value = int(raw) if not isinstance(raw, str) else int(raw.strip())
            if isinstance(raw, float) and raw != value:
                raise ValueError
            return value
        if kind == "float":
            return float(raw)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{name}: cannot parse {key}={raw!r}", key=key) from None
    value = str(raw).strip()
    if value not in kind:
        raise ConfigurationError(f"{name}: {key} must be one of {', '.join(kind)}", key=key)
    return value


def _check_ranges(name: str, p: dict[str, Any]) -> None:
    def bad(key: str, msg: str):
        raise ConfigurationError(f"{name}: {key} {msg}", key=key)

    if "S" in p and p["S"] < 2:
        bad("S", "must be at least 2")
    if "s" in p and not 1 <= p["s"] <= MAX_MEMORY:
        bad("s", f"must lie in [1, {MAX_MEMORY}]")
    if name == "exponential" and not p["gamma"] >= 0:
        bad("gamma", "must be nonnegative")
    if name.startswith("qlearn"):
        if not 0 < p["gamma"] <= 1:
            bad("gamma", "must lie in (0, 1]")
        if not 0 <= p["eps"] <= 1:
            bad("eps", "must lie in [0, 1]")
    for key in ("p", "lambda", "x0", "u0"):
        if key in p and not 0 <= p[key] <= 1:
            bad(key, "must lie in [0, 1]")
    if name == "automata":
        for key in ("gamma", "delta"):
            if not 0 <= p[key] <= 1:
                bad(key, "must lie in [0, 1]")
    if name == "rotherev" and not p["w0"] > 0:
        bad("w0", "must be positive")
    if name == "adaptive":
        for key in ("aplus", "aminus"):
            if p[key] < 0:
                bad(key, "must be nonnegative")
        if p["window"] < 0:
            bad("window", "must be nonnegative (0 = whole run)")


def make_spec(name: str, params: dict[str, Any] | None = None) -> PolicySpec:
    """Validate ``params`` for policy ``name`` and fill in defaults."""
    if name not in POLICY_PARAMS:
        raise ConfigurationError(
            f"unknown policy {name!r}; expected one of {', '.join(POLICY_PARAMS)}", key="policy")
    table = POLICY_PARAMS[name]
    params = dict(params or {})
    unknown = set(params) - set(table)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigurationError(f"{name}: unknown parameter {key!r}", key=key)
    resolved = {k: _coerce(name, k, params.get(k, default), kind)
                for k, (default, kind) in table.items()}
    _check_ranges(name, resolved)
    return PolicySpec(name, tuple(resolved.items()))


def parse_policy(text: str | PolicySpec) -> PolicySpec:
    """Parse ``name(key=value,...)``, e.g. ``wsls(p=0.005)`` or ``random``."""
    if isinstance(text, PolicySpec):
        return text
    m = _SPEC_RE.match(text)
    if not m:
        raise ConfigurationError(f"malformed policy spec {text!r}", key="policy")
    name, body = m.group(1), m.group(2)
    params: dict[str, str] = {}
    if body and body.strip():
        for item in body.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip():
                raise ConfigurationError(f"malformed parameter {item!r} in {text!r}", key="policy")
            params[key.strip()] = value.strip()
    return make_spec(name, params)


# Population adapters --------------------------------------------------------

class Policy:
    """A homogeneous population of learners over a batch of runs.

    ``select`` receives the per-run history code (shape ``(runs,)``) and the
    uniform variates ``u`` (shape ``(runs, agents, n_uniforms)``) and returns
    actions of shape ``(runs, agents)``. ``observe`` receives those actions,
    the per-run winning action and the reward matrix.
    """
    n_uniforms = 1

    def __init__(self, spec: PolicySpec, shape: tuple[int, int]):
        self.spec = spec
        self.shape = shape

    @property
    def memory(self) -> int:
        return self.spec.memory

    def select(self, code: np.ndarray, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def observe(self, actions: np.ndarray, winning: np.ndarray, rewards: np.ndarray) -> None:
        pass


class RandomPolicy(Policy):
    def select(self, code, u):
        return random_select(u[..., 0])


class StrategyPolicy(Policy):
    def __init__(self, spec, shape, tables):
        super().__init__(spec, shape)
        gamma = _INF if spec.name == "seminal" else spec["gamma"]
        self.state = ScoredStrategySet.fresh(tables, gamma, spec["scoring"])
        self._code = self._preds = None

    def select(self, code, u):
        self._code = code[:, None]
        self._preds = predictions(self.state.tables, self._code)
        return exponential_select(self.state, self._code, u[..., 0], self._preds)

    def observe(self, actions, winning, rewards):
        seminal_update(self.state, self._code, winning[:, None], self._preds)


class QPolicy(Policy):
    n_uniforms = 2

    def __init__(self, spec, shape, tables=None):
        super().__init__(spec, shape)
        k = NUM_ACTIONS if tables is None else tables.shape[-2]
        self.state = QState(np.full(shape + (k,), spec["q0"]), spec["gamma"], spec["eps"], tables)
        self._chosen = None

    def select(self, code, u):
        self._chosen = q_choose(self.state, u)
        if self.state.tables is None:
            return self._chosen.astype(np.int8)
        return _take(predictions(self.state.tables, code[:, None]), self._chosen)

    def observe(self, actions, winning, rewards):
        q_update(self.state, self._chosen, rewards)


class AdaptivePolicy(Policy):
    def __init__(self, spec, shape):
        super().__init__(spec, shape)
        self.state = AdaptiveState.fresh(shape, spec["x0"], spec["u0"], spec["aplus"],
                                         spec["aminus"], spec["window"])

    def select(self, code, u):
        return adaptive_select(self.state, u[..., 0]).astype(np.int8)

    def observe(self, actions, winning, rewards):
        adaptive_update(self.state, actions, rewards > 0, rewards, winning[:, None])


class WSLSPolicy(Policy):
    def __init__(self, spec, shape):
        super().__init__(spec, shape)
        self.state = WSLSState.fresh(shape, spec["p"])

    def select(self, code, u):
        return wsls_select(self.state, u[..., 0])

    def observe(self, actions, winning, rewards):
        wsls_update(self.state, actions, rewards)


class RothErevPolicy(Policy):
    def __init__(self, spec, shape):
        super().__init__(spec, shape)
        self.state = RothErevState.fresh(shape, spec["lambda"], spec["w0"])

    def select(self, code, u):
        return rotherev_select(self.state, u[..., 0]).astype(np.int8)

    def observe(self, actions, winning, rewards):
        rotherev_update(self.state, actions, rewards)


class AutomataPolicy(Policy):
    def __init__(self, spec, shape):
        super().__init__(spec, shape)
        self.state = AutomataState.fresh(shape, spec["gamma"], spec["delta"], spec["form"])

    def select(self, code, u):
        return automata_select(self.state, u[..., 0]).astype(np.int8)

    def observe(self, actions, winning, rewards):
        automata_update(self.state, actions, (rewards > 0).astype(float))


def build_policy(spec: PolicySpec | str, num_agents: int,
                 init_rngs: list[np.random.Generator]) -> Policy:
    """Instantiate ``spec`` for ``len(init_rngs)`` runs of ``num_agents`` agents.

    Run ``r`` draws its strategy tables from ``init_rngs[r]`` only.
    """
    spec = parse_policy(spec)
    shape = (len(init_rngs), num_agents)
    if spec.uses_history:
        tables = np.stack([generate_strategy_table(spec["s"], rng, size=(num_agents, spec["S"]))
                           for rng in init_rngs])
        if spec.name == "qlearn-strategy":
            return QPolicy(spec, shape, tables)
        return StrategyPolicy(spec, shape, tables)
    cls = {
        "random": RandomPolicy,
        "qlearn-action": QPolicy,
        "adaptive": AdaptivePolicy,
        "wsls": WSLSPolicy,
        "rotherev": RothErevPolicy,
        "automata": AutomataPolicy,
    }[spec.name]
    return cls(spec, shape)

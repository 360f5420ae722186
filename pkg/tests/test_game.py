import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mg_edge_lab.errors import ConfigurationError, TraceAuditError
from mg_edge_lab.game import (ActionId, GameConfig, WinHistory, assign_rewards, audit_trace,
                              determine_winner, play_round, run_batch, run_game)
from mg_edge_lab.policies import Policy, build_policy, parse_policy


class FixedPolicy(Policy):
    """Plays a prescribed action profile every round."""

    def __init__(self, actions):
        super().__init__(parse_policy("random"), (1, len(actions)))
        self.actions = np.asarray(actions, dtype=np.int8)[None, :]
        self.seen = []

    def select(self, code, u):
        return self.actions

    def observe(self, actions, winning, rewards):
        self.seen.append((actions.copy(), winning.copy(), rewards.copy()))


class TestGameConfig:
    def test_reference_defaults(self):
        cfg = GameConfig()
        assert (cfg.num_agents, cfg.cutoff, cfg.num_rounds, cfg.reward) == (21, 10, 10000, 1.0)

    @pytest.mark.parametrize("kwargs, key", [
        (dict(num_agents=20), "agents"),
        (dict(cutoff=0), "cutoff"),
        (dict(cutoff=21), "cutoff"),
        (dict(num_rounds=0), "rounds"),
    ])
    def test_invalid(self, kwargs, key):
        with pytest.raises(ConfigurationError) as exc:
            GameConfig(**kwargs)
        assert exc.value.key == key


class TestDetermineWinner:
    def test_tie_goes_to_active(self):
        assert determine_winner(10, 10) is ActionId.ACTIVE

    def test_crowded_active_loses(self):
        assert determine_winner(11, 10) is ActionId.INACTIVE

    def test_empty_attendance(self):
        assert determine_winner(0, 10) is ActionId.ACTIVE

    @pytest.mark.parametrize("c", [-1, 22])
    def test_out_of_range(self, c):
        with pytest.raises(ValueError):
            determine_winner(c, 10, 21)

    @given(st.integers(0, 21))
    def test_totality(self, c):
        w = determine_winner(c, 10, 21)
        assert w in (ActionId.ACTIVE, ActionId.INACTIVE)
        assert (w == ActionId.ACTIVE) == (c <= 10)

    def test_vectorized(self):
        np.testing.assert_array_equal(determine_winner(np.arange(22), 10, 21),
                                      (np.arange(22) <= 10).astype(np.int8))


class TestAssignRewards:
    def test_nobody_on_winning_side(self):
        assert not assign_rewards(np.zeros(21), ActionId.ACTIVE).any()

    def test_ten_active_win(self):
        actions = np.array([1] * 10 + [0] * 11)
        r = assign_rewards(actions, ActionId.ACTIVE, 1.0)
        np.testing.assert_array_equal(r, actions)

    def test_six_inactive_win(self):
        actions = np.array([1] * 15 + [0] * 6)
        r = assign_rewards(actions, ActionId.INACTIVE)
        assert r.sum() == 6
        np.testing.assert_array_equal(r[15:], 1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            assign_rewards(np.zeros(20), 1, num_agents=21)

    @given(st.lists(st.integers(0, 1), min_size=21, max_size=21))
    def test_conservation(self, actions):
        actions = np.array(actions)
        c = actions.sum()
        w = determine_winner(c, 10, 21)
        r = assign_rewards(actions, w)
        winners = c if w == ActionId.ACTIVE else 21 - c
        assert r.sum() == winners
        assert winners <= 10


class TestWinHistory:
    def test_code_most_recent_is_low_bit(self):
        h = WinHistory.from_actions([1, 0, 0])
        assert int(h.code(3)) == 0b100
        assert int(h.code(1)) == 0
        h.push(1)
        assert int(h.code(3)) == 0b001
        assert h.to_list() == [0, 0, 1]

    def test_matches_string_encoding(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 40)
        h = WinHistory(5)
        for k, b in enumerate(bits, 1):
            h.push(b)
            tail = bits[max(0, k - 5):k]
            assert int(h.code(len(tail))) == int("".join(map(str, tail)), 2)

    @given(st.integers(0, 8), st.lists(st.integers(0, 1), max_size=30))
    def test_length_capped(self, capacity, pushes):
        h = WinHistory(capacity)
        for b in pushes:
            h.push(b)
        assert len(h) == min(len(pushes), capacity)
        assert all(b in (0, 1) for b in h.to_list())

    def test_insufficient_history(self):
        with pytest.raises(ValueError):
            WinHistory(3).code(2)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            WinHistory(2).push(2)


class TestPlayRound:
    def test_fixed_profile(self):
        cfg = GameConfig(21, 10, 1)
        pol = FixedPolicy([1] * 10 + [0] * 11)
        h = WinHistory(0, (1,))
        out = play_round(pol, h, cfg, np.zeros((1, 21, 1)))
        assert int(out.attendance[0]) == 10
        assert int(out.winning_action[0]) == ActionId.ACTIVE
        assert out.rewards.sum() == 10
        np.testing.assert_array_equal(out.rewards[0, :10], 1)

    def test_update_hook_sees_own_outcome(self):
        cfg = GameConfig(21, 10, 1)
        pol = FixedPolicy([1] * 15 + [0] * 6)
        h = WinHistory(2, (1,))
        h.push(np.array([0]))
        h.push(np.array([0]))
        play_round(pol, h, cfg, np.zeros((1, 21, 1)))
        actions, winning, rewards = pol.seen[0]
        assert int(winning[0]) == ActionId.INACTIVE
        np.testing.assert_array_equal(rewards[0], (actions[0] == 0).astype(float))
        assert int(h.code(1)[0]) == 0

    def test_wsls_all_winners_repeat(self):
        cfg = GameConfig(21, 10, 1)
        pol = build_policy("wsls(p=0.5)", 21, [np.random.default_rng(0)])
        pol.state.last_action = np.array([[1] * 5 + [0] * 16], dtype=np.int8)
        pol.state.last_won = np.ones((1, 21), dtype=bool)
        rng = np.random.default_rng(1)
        h = WinHistory(0, (1,))
        for _ in range(50):
            out = play_round(pol, h, cfg, rng.random((1, 21, 1)))
            assert int(out.attendance[0]) == 5
            # 5 active <= cutoff, so only the actives win; reset to keep everyone winning
            pol.state.last_won[:] = True

    def test_random_attendance_binomial_mean(self):
        cfg = GameConfig(21, 10, 10000)
        tr = run_game(cfg, "random", 3)
        # Binomial(21, 1/2): mean 10.5, sd of the mean sqrt(5.25 / 1e4)
        assert abs(tr.attendance.mean() - 10.5) < 4 * np.sqrt(5.25 / 1e4)


class TestRunGame:
    def test_deterministic(self):
        cfg = GameConfig(21, 10, 10000)
        a = run_game(cfg, "exponential(S=2,s=3,gamma=100)", 7)
        b = run_game(cfg, "exponential(S=2,s=3,gamma=100)", 7)
        np.testing.assert_array_equal(a.actions, b.actions)
        np.testing.assert_array_equal(a.attendance, b.attendance)
        assert a.initial_history == b.initial_history

    def test_one_round(self):
        tr = run_game(GameConfig(21, 10, 1), "wsls", 0)
        assert tr.num_rounds == 1 and len(tr.outcomes) == 1

    def test_random_volatility(self):
        tr = run_game(GameConfig(21, 10, 10000), "random", 11)
        # variance estimate of Binomial(21,1/2) over 1e4 draws: relative sd ~ sqrt(2/1e4)
        vol = np.var(tr.attendance.astype(float)) / 21
        assert abs(vol - 0.25) < 0.25 * 4 * np.sqrt(2 / 1e4)

    def test_unknown_policy(self):
        with pytest.raises(ConfigurationError):
            run_game(GameConfig(), "genetic", 1)

    def test_initial_history_length(self):
        tr = run_game(GameConfig(21, 10, 5), "seminal(s=4)", 2)
        assert len(tr.initial_history) == 4
        assert set(tr.initial_history) <= {0, 1}
        assert run_game(GameConfig(21, 10, 5), "rotherev", 2).initial_history == ()

    @pytest.mark.parametrize("spec", ["seminal(s=2)", "qlearn-strategy(s=3)", "adaptive",
                                      "automata", "wsls", "random", "rotherev", "qlearn-action"])
    def test_batch_equals_solo(self, spec):
        cfg = GameConfig(21, 10, 1500)
        batch = run_batch(cfg, spec, [5, 99, 12345])
        solo = run_game(cfg, spec, 99)
        np.testing.assert_array_equal(batch[1].actions, solo.actions)
        np.testing.assert_array_equal(batch[1].wins, solo.wins)

    def test_trace_columns(self):
        tr = run_game(GameConfig(21, 10, 300), "qlearn-action", 4)
        np.testing.assert_array_equal(tr.actions.sum(axis=0), tr.attendance)
        o = tr.outcome(17)
        assert o.attendance == tr.attendance[17]
        assert o.rewards.sum() == (o.attendance if o.winning_action else 21 - o.attendance)


class TestAudit:
    def test_clean_trace(self):
        tr = run_game(GameConfig(21, 10, 500), "seminal", 1)
        assert audit_trace(tr) == 500

    def test_detects_tampering(self):
        tr = run_game(GameConfig(21, 10, 50), "random", 1)
        tr.wins[:, 3] = ~tr.wins[:, 3]
        with pytest.raises(TraceAuditError):
            audit_trace(tr)

    def test_detects_wrong_winner(self):
        tr = run_game(GameConfig(21, 10, 50), "random", 1)
        tr.winning[0] = 1 - tr.winning[0]
        with pytest.raises(TraceAuditError):
            audit_trace(tr)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 64 - 1), st.sampled_from(["random", "wsls", "seminal(s=2)"]))
def test_trace_is_pure_function_of_seed(seed, spec):
    cfg = GameConfig(21, 10, 40)
    a, b = run_game(cfg, spec, seed), run_game(cfg, spec, seed)
    np.testing.assert_array_equal(a.actions, b.actions)

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_timeout, random_policy, two_action
from lexiplan.errors import DimensionMismatch, RankOutOfRange, TauOutOfRange
from lexiplan.evaluation import cdf, evaluate_values, lower_quantile, propagate, value_tensor
from lexiplan.generators import generate_random, random_rewards
from lexiplan.quantile import build_quantile_reward
from lexiplan.rewards import RewardSpec


def path_oracle(instance, policy, rewards=None):
    """Sum over every state trajectory; independent of the kernels."""
    S, T = instance.num_states, instance.horizon
    P = instance.transitions
    mass = np.zeros(instance.num_ends + 1)
    L = 0 if rewards is None else rewards.num_levels
    value = np.zeros(L)
    rank = {e: k for k, e in enumerate(instance.end_states, start=1)}
    for path in itertools.product(range(S), repeat=T + 1):
        prob = instance.initial_distribution[path[0]]
        gained = np.zeros(L)
        for t in range(T):
            s, s2 = path[t], path[t + 1]
            a = policy[t][s]
            prob *= P[s, a, s2]
            if prob == 0.0:
                break
            if L:
                gained += rewards.levels[:, s, a, s2]
        if prob == 0.0:
            continue
        mass[rank.get(path[-1], 0)] += prob
        value += prob * gained
    return mass, value


def test_propagate_two_action_examples():
    inst = two_action()
    assert propagate(inst, [[1, 0, 0]]).tolist() == [0.0, 0.0, 1.0]
    assert propagate(inst, [[0, 0, 0]]).tolist() == [0.0, 1.0, 0.0]


def test_propagate_self_loop_times_out():
    inst = all_timeout(horizon=3)
    assert propagate(inst, np.zeros((3, 3), dtype=int)).tolist() == [1.0, 0.0, 0.0]


def test_propagate_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        propagate(two_action(), [[0, 0]])
    with pytest.raises(DimensionMismatch):
        propagate(two_action(), [[0, 5, 0]])


@pytest.mark.parametrize(
    "mass, rank, expected",
    [([0.1, 0.2, 0.7], 1, 0.3), ([0.1, 0.2, 0.7], 2, 1.0), ([1, 0, 0], 0, 1.0)],
)
def test_cdf_examples(mass, rank, expected):
    assert cdf(mass, rank) == pytest.approx(expected, abs=1e-15)


def test_cdf_rank_out_of_range():
    with pytest.raises(RankOutOfRange):
        cdf([0.5, 0.5], 2)


@pytest.mark.parametrize(
    "mass, tau, expected",
    [([0.1, 0.2, 0.7], 0.25, 1), ([0.1, 0.2, 0.7], 0.3, 1), ([0, 0, 1], 0.5, 2), ([0.5, 0.5], 1.0, 1)],
)
def test_lower_quantile_examples(mass, tau, expected):
    assert lower_quantile(mass, tau) == expected


def test_lower_quantile_exact_dyadic_boundary():
    assert lower_quantile([0.25, 0.25, 0.5], 0.5) == 1


@pytest.mark.parametrize("tau", [0.0, -0.1, 1.5])
def test_lower_quantile_rejects_tau(tau):
    with pytest.raises(TauOutOfRange):
        lower_quantile([0.5, 0.5], tau)


def test_evaluate_values_quantile_reward_examples():
    inst = two_action()
    R = RewardSpec.stack([build_quantile_reward(inst, 2)])
    assert evaluate_values(inst, R, [[1, 0, 0]]).tolist() == [1.0]
    assert evaluate_values(inst, R, [[0, 0, 0]]).tolist() == [0.0]


@pytest.mark.parametrize("seed", range(25))
def test_evaluation_matches_path_oracle(seed):
    rng = np.random.default_rng(seed)
    inst = generate_random(4, 2, 3, 2, density=0.75, seed=seed)
    rewards = random_rewards(inst, 2, seed=seed)
    policy = random_policy(inst, rng)
    mass, value = path_oracle(inst, policy, rewards)
    np.testing.assert_allclose(propagate(inst, policy), mass, atol=1e-12)
    np.testing.assert_allclose(evaluate_values(inst, rewards, policy), value, atol=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_quantile_reward_equals_tail_probability(seed):
    rng = np.random.default_rng(seed)
    inst = generate_random(4, 3, 3, 2, density=0.75, seed=seed)
    policy = random_policy(inst, rng)
    dist = propagate(inst, policy)
    for rank in range(1, inst.num_ends + 1):
        R = RewardSpec.stack([build_quantile_reward(inst, rank)])
        v = evaluate_values(inst, R, policy)[0]
        assert abs(v - (1.0 - cdf(dist, rank - 1))) <= 1e-10


@pytest.mark.parametrize("seed", range(30))
def test_distribution_is_normalized(seed):
    rng = np.random.default_rng(seed)
    inst = generate_random(5, 3, 3, 3, density=0.6, seed=seed)
    dist = propagate(inst, random_policy(inst, rng))
    assert abs(dist.sum() - 1.0) <= 1e-10
    assert np.all(dist >= 0)
    F = np.cumsum(dist)
    assert np.all(np.diff(F) >= 0)
    assert abs(cdf(dist, inst.num_ends) - 1.0) <= 1e-10


@pytest.mark.parametrize("seed", range(10))
def test_initial_mass_on_end_state_stays_there(seed):
    inst = generate_random(5, 2, 3, 3, seed=seed)
    for k, e in enumerate(inst.end_states, start=1):
        mu = np.zeros(inst.num_states)
        mu[e] = 1.0
        dist = propagate(inst.with_initial(mu), np.zeros((3, 5), dtype=int))
        expected = np.zeros(inst.num_ends + 1)
        expected[k] = 1.0
        assert dist.tolist() == expected.tolist()


masses = st.lists(st.integers(0, 64), min_size=2, max_size=6).filter(lambda m: sum(m) > 0)


@given(masses, st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_quantile_monotone_in_tau(units, t1, t2):
    dist = np.array(units, dtype=float) / sum(units)
    lo, hi = sorted((t1, t2))
    assert lower_quantile(dist, lo) <= lower_quantile(dist, hi)


def test_value_tensor_terminal_slice_is_zero():
    inst = generate_random(4, 2, 3, 1, seed=9)
    V = value_tensor(inst, random_rewards(inst, 2, seed=9), np.ones((3, 4), dtype=int))
    assert V.shape == (2, 4, 4)
    assert not V[:, -1].any()

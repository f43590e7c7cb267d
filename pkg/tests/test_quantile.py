import math

import numpy as np
import pytest

import lexiplan.quantile as quantile
from conftest import all_timeout, two_action
from lexiplan.errors import InvariantViolation, RankOutOfRange, TauOutOfRange
from lexiplan.evaluation import lower_quantile, propagate
from lexiplan.generators import generate_random, random_taus
from lexiplan.model import MdpInstance, validate
from lexiplan.oracle import (
    PolicyEnumeration,
    brute_force_min_cdf,
    brute_force_scheme,
    min_cdf_table,
)
from lexiplan.quantile import (
    QuantileObjective,
    build_quantile_reward,
    locked_reward,
    mqo_solve,
    probe,
)


def test_objective_validation():
    assert QuantileObjective((0.25, 0.5)).taus == (0.25, 0.5)
    for bad in [(), (0.5, 0.5), (0.6, 0.2), (0.0,), (1.2,)]:
        with pytest.raises(TauOutOfRange):
            QuantileObjective(bad)


def test_quantile_reward_rank_one_rewards_every_entry_into_an_end_state():
    inst = generate_random(5, 2, 2, 3, seed=1)
    R = build_quantile_reward(inst, 1)
    for s in range(5):
        for s2 in range(5):
            expected = float(not inst.is_end[s] and inst.is_end[s2])
            assert (R[s, :, s2] == expected).all()


def test_quantile_reward_top_rank_targets_single_state():
    inst = generate_random(5, 2, 2, 3, seed=1)
    R = build_quantile_reward(inst, 3)
    top = inst.end_states[-1]
    assert set(np.nonzero(R)[2]) == {top}


def test_quantile_reward_rank_bounds():
    inst = two_action()
    for rank in (0, 3):
        with pytest.raises(RankOutOfRange):
            build_quantile_reward(inst, rank)
    assert not locked_reward(inst, 0).any()


def test_probe_examples():
    inst = two_action()
    assert probe(inst, [], 2) == 1.0
    assert probe(inst, [], 1) == 1.0
    assert probe(inst, [2], 2) == 1.0
    with pytest.raises(RankOutOfRange):
        probe(inst, [], 0)


@pytest.mark.parametrize("seed", range(20))
def test_probe_matches_brute_force_minimum(seed):
    inst = generate_random(4, 2, 2, 3, density=0.75, seed=seed)
    enum = PolicyEnumeration(inst)
    for locked in ([], [1], [2]):
        if locked:
            taus = (0.5,)
            res = brute_force_scheme(inst, taus, 2, enumeration=enum)
            locked = res.ranks
            surviving = res.policy_sets[1]
        else:
            surviving = np.arange(enum.count)
        for cand in range(1, 4):
            v = probe(inst, locked, cand)
            assert abs((1.0 - v) - brute_force_min_cdf(inst, surviving, cand - 1, enumeration=enum)) <= 1e-9


def test_mqo_two_action():
    rep = mqo_solve(two_action(), QuantileObjective((0.5,)))
    assert rep.optimal_ranks == [2]
    assert rep.final_policy[0, 0] == 1
    assert rep.final_values.tolist() == [1.0]


def test_mqo_all_timeout():
    rep = mqo_solve(all_timeout(), (0.5,))
    assert rep.optimal_ranks == [0]
    assert rep.final_values.tolist() == [0.0]


def test_mqo_without_end_states():
    P = np.ones((1, 2, 1))
    inst = validate(MdpInstance(1, 2, 2, P, [], [1.0]))
    rep = mqo_solve(inst, (0.3, 0.9))
    assert rep.optimal_ranks == [0, 0]
    assert rep.probe_count == [0, 0]


@pytest.mark.parametrize("seed", range(30))
def test_mqo_matches_schemes(seed):
    rng = np.random.default_rng(seed)
    S = int(rng.integers(3, 6))
    n = int(rng.integers(1, S))
    inst = generate_random(S, 2, 2, n, density=float(rng.choice([0.5, 0.8, 1.0])), seed=seed)
    objective = QuantileObjective(random_taus(int(rng.integers(1, 4)), seed=seed))
    rep = mqo_solve(inst, objective)
    enum = PolicyEnumeration(inst)
    s1 = brute_force_scheme(inst, objective, 1, enumeration=enum)
    s2 = brute_force_scheme(inst, objective, 2, enumeration=enum)
    assert rep.optimal_ranks == s1.ranks == s2.ranks
    budget = math.ceil(math.log2(n + 1)) + 1
    assert all(c <= budget for c in rep.probe_count)
    assert rep.optimal_ranks == sorted(rep.optimal_ranks)
    dist = propagate(inst, rep.final_policy)
    assert [lower_quantile(dist, t) for t in objective.taus] == rep.optimal_ranks
    for k, steps in enumerate(rep.probe_trace):
        Fstar = min_cdf_table(enum, s2.policy_sets[k])
        for step in steps:
            assert abs(step.cdf - Fstar[step.rank]) <= 1e-9


def test_probe_trace_branches_follow_invariant():
    rep = mqo_solve(generate_random(7, 2, 3, 6, seed=4), (0.3, 0.6, 0.9))
    for tau, steps in zip(rep.taus, rep.probe_trace):
        for step in steps:
            assert (step.branch == "upper") == (step.cdf >= tau - 1e-12)


def test_initial_mass_on_end_state_is_accounted_for():
    inst = generate_random(5, 2, 2, 2, seed=21)
    mu = np.zeros(5)
    free = np.nonzero(~inst.is_end)[0]
    mu[free[0]] = 0.5
    mu[inst.end_states[-1]] = 0.25
    mu[inst.end_states[0]] = 0.25
    inst = inst.with_initial(mu)
    objective = (0.25, 0.5, 0.875)
    rep = mqo_solve(inst, objective)
    assert rep.optimal_ranks == brute_force_scheme(inst, objective, 2).ranks


def test_final_policy_mismatch_raises(monkeypatch):
    inst = two_action()
    monkeypatch.setattr(quantile, "propagate", lambda i, p: np.array([1.0, 0.0, 0.0]))
    with pytest.raises(InvariantViolation):
        mqo_solve(inst, (0.5,))

"""Exact evaluation of a fixed deterministic Markov policy.

A policy is an integer array of shape ``(horizon, num_states)``; entry
``[t, s]`` is the action taken in state ``s`` at decision epoch ``t``.
An end distribution is an array of length ``n + 1``: index 0 is the timeout
outcome, index ``k`` is end state ``e_k``.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DimensionMismatch, RankOutOfRange, TauOutOfRange
from .model import validate
from .rewards import RewardSpec, marginalize_rewards

QUANTILE_SLACK = 1e-12


def check_policy(instance, policy) -> np.ndarray:
    pol = np.asarray(policy)
    shape = (instance.horizon, instance.num_states)
    if pol.shape != shape:
        raise DimensionMismatch(f"policy has shape {pol.shape}, expected {shape}")
    if pol.size and not np.issubdtype(pol.dtype, np.integer):
        if not np.all(pol == np.round(pol)):
            raise DimensionMismatch("policy entries must be integer action indices")
    pol = np.ascontiguousarray(pol, dtype=np.int64)
    if pol.size and (pol.min() < 0 or pol.max() >= instance.num_actions):
        raise DimensionMismatch(f"policy actions must lie in 0..{instance.num_actions - 1}")
    return pol


def final_state_distribution(instance, policy) -> np.ndarray:
    instance = validate(instance)
    pol = check_policy(instance, policy)
    return kernels.propagate(instance.transitions, pol, instance.initial_distribution)


def propagate(instance, policy) -> np.ndarray:
    """End-outcome distribution ``[m_0, m_1, ..., m_n]`` induced by ``policy``.

    Mass still on a non-end state after the last epoch goes to the timeout
    outcome ``m_0``.
    """
    instance = validate(instance)
    d = final_state_distribution(instance, policy)
    mass = np.zeros(instance.num_ends + 1)
    np.add.at(mass, instance.end_rank, d)
    return mass


def cdf(dist, rank: int) -> float:
    dist = np.asarray(dist, dtype=np.float64)
    if not 0 <= rank < dist.size:
        raise RankOutOfRange(f"rank {rank} outside 0..{dist.size - 1}")
    return float(dist[: rank + 1].sum())


def cdf_table(dist) -> np.ndarray:
    return np.cumsum(np.asarray(dist, dtype=np.float64))


def lower_quantile(dist, tau: float) -> int:
    """Smallest rank whose cumulative mass reaches ``tau`` (minus a 1e-12 slack)."""
    if not 0.0 < tau <= 1.0:
        raise TauOutOfRange(f"tau={tau!r} outside (0, 1]")
    F = cdf_table(dist)
    hits = np.nonzero(F >= tau - QUANTILE_SLACK)[0]
    # F[-1] is 1 up to rounding, so the last rank always qualifies
    return int(hits[0]) if hits.size else int(F.size - 1)


def value_tensor(instance, rewards: RewardSpec, policy) -> np.ndarray:
    """Per-state, per-epoch values ``V[i, t, s]`` of ``policy``; shape ``(L, T+1, S)``."""
    instance = validate(instance)
    pol = check_policy(instance, policy)
    Rsa = marginalize_rewards(instance, rewards)
    return kernels.evaluate_policy(instance.transitions, Rsa, pol)


def evaluate_values(instance, rewards: RewardSpec, policy) -> np.ndarray:
    """Expected total reward per level, averaged over the initial distribution."""
    instance = validate(instance)
    V = value_tensor(instance, rewards, policy)
    return V[:, 0, :] @ instance.initial_distribution

"""Finite-horizon lexicographic MDP solver.

Backward induction where level ``i`` maximizes only over the actions that
survived levels ``1..i-1`` at the same epoch and state. Survivors at each
level are the actions within ``eps`` of that level's maximum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyActionSet
from .model import LEX_EPS, validate
from .rewards import RewardSpec, marginalize_rewards, validate_rewards

__all__ = [
    "LexSolution",
    "RewardSpec",
    "action_values",
    "flmdp_solve",
    "marginalize_rewards",
    "restricted_backup",
]


@dataclass(frozen=True, eq=False)
class LexSolution:
    policy: np.ndarray  # (T, S) int
    values: np.ndarray  # (L, T+1, S)
    filtration: np.ndarray  # (T, L+1, S, A) bool; [t, 0] is every action
    initial_distribution: np.ndarray
    elapsed: float = 0.0

    @property
    def value_vector(self) -> np.ndarray:
        """Values of the returned policy averaged over the initial distribution."""
        return self.values[:, 0, :] @ self.initial_distribution

    def actions(self, t: int, level: int, s: int) -> list[int]:
        """Surviving actions at ``(t, s)`` after ``level`` priority levels."""
        return [int(a) for a in np.nonzero(self.filtration[t, level, s])[0]]


def action_values(instance, Rsa_level: np.ndarray, V_next: np.ndarray) -> np.ndarray:
    """One-step lookahead ``Q(s, a) = R(s, a) + sum_s2 P(s, a, s2) V_next(s2)``."""
    return Rsa_level + instance.transitions @ V_next


def restricted_backup(Q, allowed, eps: float = LEX_EPS):
    """Maximize ``Q`` over allowed actions and keep the near-argmax set.

    ``Q`` and ``allowed`` are ``(S, A)``. Returns ``(V, allowed_out)`` where
    ``allowed_out[s]`` holds the allowed actions with ``Q >= V[s] - eps``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    allowed = np.asarray(allowed, dtype=bool)
    if Q.ndim == 1:
        V, out = restricted_backup(Q[None], allowed[None], eps)
        return V[0], out[0]
    if not allowed.any(axis=1).all():
        raise EmptyActionSet("restricted backup received an empty action set")
    V = np.where(allowed, Q, -np.inf).max(axis=1)
    out = allowed & (Q >= V[:, None] - eps)
    return V, out


def flmdp_solve(instance, rewards: RewardSpec, eps: float = LEX_EPS) -> LexSolution:
    """Optimal nonstationary deterministic policy under lexicographic preference.

    Ties left after the last level go to the smallest action index, so
    solving the same instance twice gives identical policies.
    """
    instance = validate(instance)
    validate_rewards(instance, rewards)
    start = time.perf_counter()
    Rsa = marginalize_rewards(instance, rewards)
    V, policy, allowed = kernels.lex_backward(
        instance.transitions, Rsa, instance.horizon, float(eps)
    )
    if policy.size and policy.min() < 0:
        raise EmptyActionSet("no action survived every level")
    return LexSolution(
        policy=policy,
        values=V,
        filtration=allowed,
        initial_distribution=instance.initial_distribution,
        elapsed=time.perf_counter() - start,
    )

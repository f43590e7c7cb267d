"""Brute-force references over every deterministic Markov policy.

Nothing here is clever on purpose. Policies are enumerated in lexicographic
order of their flattened ``(T, S)`` action table, evaluated exactly, and the
sets of surviving policies are kept as explicit index arrays.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetExceeded, EmptySet, RankOutOfRange
from .evaluation import QUANTILE_SLACK, propagate
from .model import LEX_EPS, validate
from .quantile import QuantileObjective
from .rewards import RewardSpec, marginalize_rewards

DEFAULT_BUDGET = 10**7
CHUNK = 1 << 16


def default_budget() -> int:
    raw = os.environ.get("LEXIPLAN_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def policy_count(instance) -> int:
    return instance.num_actions ** (instance.num_states * instance.horizon)


class PolicyEnumeration:
    """All ``A ** (S * T)`` deterministic Markov policies of an instance.

    Iterating yields action tables; :meth:`end_masses` and :meth:`values`
    evaluate the whole enumeration in index order.
    """

    def __init__(self, instance, budget: int | None = None):
        self.instance = validate(instance)
        self.budget = default_budget() if budget is None else int(budget)
        self.count = policy_count(self.instance)
        if self.count > self.budget:
            raise BudgetExceeded(self.count, self.budget)
        self._mass = None

    def __len__(self):
        return self.count

    def __iter__(self):
        inst = self.instance
        shape = (inst.horizon, inst.num_states)
        for combo in itertools.product(range(inst.num_actions), repeat=shape[0] * shape[1]):
            yield np.array(combo, dtype=np.int64).reshape(shape)

    def policy(self, index: int) -> np.ndarray:
        inst = self.instance
        width = inst.horizon * inst.num_states
        digits = []
        for _ in range(width):
            index, d = divmod(int(index), inst.num_actions)
            digits.append(d)
        return np.array(digits[::-1], dtype=np.int64).reshape(inst.horizon, inst.num_states)

    def _run(self, Rsa):
        inst = self.instance
        n_ranks = inst.num_ends + 1
        L = Rsa.shape[0]
        V = np.empty((self.count, L, inst.num_states))
        mass = np.empty((self.count, n_ranks))
        for start in range(0, self.count, CHUNK):
            count = min(CHUNK, self.count - start)
            v, m = kernels.enumerate_evaluate(
                inst.transitions,
                Rsa,
                inst.initial_distribution,
                inst.end_rank,
                n_ranks,
                inst.horizon,
                start,
                count,
            )
            V[start : start + count] = v
            mass[start : start + count] = m
        return V, mass

    def end_masses(self) -> np.ndarray:
        """``(N, n+1)`` end-outcome distribution of every policy."""
        if self._mass is None:
            inst = self.instance
            Rsa = np.zeros((0, inst.num_states, inst.num_actions))
            _, self._mass = self._run(Rsa)
        return self._mass

    def cdfs(self) -> np.ndarray:
        return np.cumsum(self.end_masses(), axis=1)

    def values(self, rewards: RewardSpec, per_state: bool = False) -> np.ndarray:
        """Value vectors of every policy.

        Shape ``(N, L)`` under the initial distribution, or ``(N, L, S)``
        per start state when ``per_state`` is set.
        """
        Rsa = marginalize_rewards(self.instance, rewards)
        V, mass = self._run(Rsa)
        if self._mass is None:
            self._mass = mass
        if per_state:
            return V
        return V @ self.instance.initial_distribution


def enumerate_policies(instance, budget: int | None = None):
    """Stream every deterministic Markov policy exactly once."""
    return iter(PolicyEnumeration(instance, budget))


@dataclass(frozen=True, eq=False)
class LexOptimum:
    best: np.ndarray  # (L,)
    witnesses: np.ndarray  # policy indices attaining best within eps
    enumeration: PolicyEnumeration

    def witness_policies(self) -> list[np.ndarray]:
        return [self.enumeration.policy(i) for i in self.witnesses]


def lex_optimum(values: np.ndarray, eps: float = LEX_EPS, candidates=None):
    """Level-by-level argmax filtering of a ``(N, L)`` value matrix.

    Returns ``(best, indices)``: the running maxima and the rows that stayed
    within ``eps`` of every one of them.
    """
    values = np.asarray(values, dtype=np.float64)
    idx = np.arange(values.shape[0]) if candidates is None else np.asarray(candidates)
    if idx.size == 0:
        raise EmptySet("no candidate policies")
    best = np.empty(values.shape[1])
    for i in range(values.shape[1]):
        col = values[idx, i]
        best[i] = col.max()
        idx = idx[col >= best[i] - eps]
    return best, idx


def brute_force_lex_optimal(
    instance,
    rewards: RewardSpec,
    eps: float = LEX_EPS,
    *,
    start_state: int | None = None,
    budget: int | None = None,
    enumeration: PolicyEnumeration | None = None,
) -> LexOptimum:
    """Lexicographically best value vector over all enumerated policies."""
    enum = enumeration or PolicyEnumeration(instance, budget)
    if start_state is None:
        vals = enum.values(rewards)
    else:
        vals = enum.values(rewards, per_state=True)[:, :, start_state]
    best, idx = lex_optimum(vals, eps)
    return LexOptimum(best, idx, enum)


def brute_force_min_cdf(instance, surviving, rank: int, *, enumeration=None) -> float:
    """Minimum CDF at ``rank`` over a set of policies.

    ``surviving`` is either a 1-d array of enumeration indices or a sequence
    of ``(T, S)`` action tables (each evaluated directly by forward propagation).
    """
    instance = validate(instance)
    n = instance.num_ends
    if not 0 <= rank <= n:
        raise RankOutOfRange(f"rank {rank} outside 0..{n}")
    arr = np.asarray(surviving)
    if arr.size == 0:
        raise EmptySet("surviving policy set is empty")
    if arr.ndim == 1 and np.issubdtype(arr.dtype, np.integer):
        enum = enumeration or PolicyEnumeration(instance)
        return float(enum.cdfs()[arr, rank].min())
    return min(float(propagate(instance, pol)[: rank + 1].sum()) for pol in surviving)


def min_cdf_table(enumeration: PolicyEnumeration, surviving) -> np.ndarray:
    """Pointwise minimum CDF over ``surviving``, one entry per rank."""
    surviving = np.asarray(surviving)
    if surviving.size == 0:
        raise EmptySet("surviving policy set is empty")
    return enumeration.cdfs()[surviving].min(axis=0)


def quantiles_of(F: np.ndarray, tau: float) -> np.ndarray:
    """Lower tau-quantile rank of each CDF row (rows of a ``(N, n+1)`` array)."""
    F = np.atleast_2d(F)
    hit = F >= tau - QUANTILE_SLACK
    q = np.argmax(hit, axis=1)
    q[~hit.any(axis=1)] = F.shape[1] - 1
    return q


@dataclass(frozen=True, eq=False)
class SchemeResult:
    variant: int
    ranks: list
    policy_sets: list  # [Pi_0, Pi_1, ..., Pi_L] as index arrays
    enumeration: PolicyEnumeration

    @property
    def final_set(self) -> np.ndarray:
        return self.policy_sets[-1]


def brute_force_scheme(
    instance,
    objective: QuantileObjective,
    variant: int = 2,
    eps: float = LEX_EPS,
    *,
    budget: int | None = None,
    enumeration: PolicyEnumeration | None = None,
) -> SchemeResult:
    """Run an iterated quantile scheme literally over explicit policy sets.

    Each level takes the best tau-quantile ``q*`` reachable inside the current
    set, then keeps the policies minimizing the CDF just below ``q*``.
    Variant 1 first restricts to policies whose own quantile is ``q*``;
    variant 2 minimizes over the whole current set.
    """
    if variant not in (1, 2):
        raise ValueError(f"unknown scheme variant {variant!r}")
    if not isinstance(objective, QuantileObjective):
        objective = QuantileObjective(tuple(objective))
    enum = enumeration or PolicyEnumeration(instance, budget)
    F = enum.cdfs()
    current = np.arange(enum.count)
    sets = [current]
    ranks = []
    for tau in objective.taus:
        q = quantiles_of(F[current], tau)
        qstar = int(q.max())
        pool = current[q == qstar] if variant == 1 else current
        if qstar >= 1:
            below = F[pool, qstar - 1]
            pool = pool[below <= below.min() + eps]
        if pool.size == 0:
            raise EmptySet(f"scheme {variant} emptied the policy set")
        ranks.append(qstar)
        sets.append(pool)
        current = pool
    return SchemeResult(variant, ranks, sets, enum)

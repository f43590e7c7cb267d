"""Multi-quantile objectives reduced to lexicographic MDPs.

For a threshold rank ``r`` the indicator reward pays 1 on the transition that
first enters an end state of rank ``>= r``. Its expected total equals the
probability of finishing at rank ``>= r``, i.e. ``1 - F(r - 1)``, so
maximizing it minimizes the CDF just below the threshold.

:func:`mqo_solve` finds the optimal quantile of each level by bisection over
ranks, each probe being one lexicographic solve with the earlier levels
locked at their optimal thresholds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, RankOutOfRange, TauOutOfRange
from .evaluation import QUANTILE_SLACK, lower_quantile, propagate
from .lex import LexSolution, flmdp_solve
from .model import LEX_EPS, validate
from .rewards import RewardSpec


@dataclass(frozen=True)
class QuantileObjective:
    """Strictly increasing quantile levels, each in ``(0, 1]``."""

    taus: tuple

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus:
            raise TauOutOfRange("objective needs at least one tau")
        for t in taus:
            if not 0.0 < t <= 1.0:
                raise TauOutOfRange(f"tau={t!r} outside (0, 1]")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise TauOutOfRange(f"taus must be strictly increasing, got {list(taus)}")
        object.__setattr__(self, "taus", taus)

    def __len__(self):
        return len(self.taus)


@dataclass(frozen=True)
class ProbeStep:
    rank: int  # candidate quantile rank m; the probe threshold is m + 1
    value: float  # best level-k value over the surviving class
    cdf: float  # implied minimum CDF at rank m
    branch: str  # "upper" moved hi to m, "lower" moved lo to m


@dataclass(eq=False)
class QuantileSolveReport:
    taus: tuple
    optimal_ranks: list
    final_policy: np.ndarray
    final_values: np.ndarray
    final_solution: LexSolution
    probe_trace: list = field(default_factory=list)
    probe_count: list = field(default_factory=list)
    elapsed: float = 0.0


def build_quantile_reward(instance, rank: int) -> np.ndarray:
    """``(S, A, S)`` indicator of leaving a non-end state into an end state of rank >= ``rank``."""
    instance = validate(instance)
    n = instance.num_ends
    if not 1 <= rank <= n:
        raise RankOutOfRange(f"threshold rank {rank} outside 1..{n}")
    R = np.zeros((instance.num_states, instance.num_actions, instance.num_states))
    target = instance.is_end & (instance.end_rank >= rank)
    R[np.ix_(~instance.is_end, np.ones(instance.num_actions, bool), target)] = 1.0
    return R


def locked_reward(instance, rank: int) -> np.ndarray:
    """Reward locking an optimal quantile. Rank 0 (timeout) constrains nothing."""
    instance = validate(instance)
    if rank == 0:
        return np.zeros((instance.num_states, instance.num_actions, instance.num_states))
    return build_quantile_reward(instance, rank)


def quantile_rewards(instance, ranks) -> RewardSpec:
    instance = validate(instance)
    return RewardSpec.stack([locked_reward(instance, r) for r in ranks])


def _initial_tail(instance, rank: int) -> float:
    # start mass already on end states of rank >= `rank` is never rewarded
    mu = instance.initial_distribution
    return float(mu[instance.is_end & (instance.end_rank >= rank)].sum())


def _probe_solution(instance, locked_ranks, candidate, eps) -> LexSolution:
    n = instance.num_ends
    if not 1 <= candidate <= n:
        raise RankOutOfRange(f"candidate threshold {candidate} outside 1..{n}")
    for r in locked_ranks:
        if not 0 <= r <= n:
            raise RankOutOfRange(f"locked rank {r} outside 0..{n}")
    return flmdp_solve(instance, quantile_rewards(instance, [*locked_ranks, candidate]), eps)


def probe(instance, locked_ranks, candidate: int, eps: float = LEX_EPS) -> float:
    """Best achievable probability of finishing at rank >= ``candidate``.

    The maximum runs over policies that are optimal for every locked level.
    """
    instance = validate(instance)
    sol = _probe_solution(instance, list(locked_ranks), candidate, eps)
    return float(sol.value_vector[-1])


def _check_locked(instance, taus, ranks, values):
    for j, (tau, q) in enumerate(zip(taus, ranks)):
        if q == 0:
            continue
        F = 1.0 - values[j] - _initial_tail(instance, q)
        if not F < tau:
            raise InvariantViolation(
                f"locked level {j + 1}: CDF below rank {q} is {F!r}, expected < tau={tau!r}"
            )


def mqo_solve(instance, objective: QuantileObjective, eps: float = LEX_EPS) -> QuantileSolveReport:
    """Optimal lower quantiles for each tau, in priority order, and a final policy.

    Bisection keeps ``cdf*(lo) < tau <= cdf*(hi)`` where ``cdf*(r)`` is the
    minimum CDF at rank ``r`` over the surviving policy class, with the
    virtual anchor ``cdf*(-1) = 0``. The answer is ``hi`` once ``hi - lo == 1``.
    """
    instance = validate(instance)
    if not isinstance(objective, QuantileObjective):
        objective = QuantileObjective(tuple(objective))
    start = time.perf_counter()
    n = instance.num_ends
    taus = objective.taus
    ranks: list[int] = []
    trace: list[list[ProbeStep]] = []
    counts: list[int] = []

    for k, tau in enumerate(taus):
        lo = max(ranks[-1] - 1, -1) if ranks else -1
        hi = n
        steps: list[ProbeStep] = []
        seen: dict[int, float] = {}
        while hi - lo > 1:
            m = (lo + hi + 1) // 2
            sol = _probe_solution(instance, ranks, m + 1, eps)
            v = sol.value_vector
            _check_locked(instance, taus, ranks, v)
            F = 1.0 - float(v[-1]) - _initial_tail(instance, m + 1)
            if F >= tau - QUANTILE_SLACK:
                hi, branch = m, "upper"
            else:
                lo, branch = m, "lower"
            steps.append(ProbeStep(m, float(v[-1]), F, branch))
            seen[m] = F
            ordered = [seen[r] for r in sorted(seen)]
            if any(b < a - eps for a, b in zip(ordered, ordered[1:])):
                raise InvariantViolation(f"level {k + 1}: probed CDF minima not monotone in rank")
        ranks.append(hi)
        trace.append(steps)
        counts.append(len(steps))

    final = flmdp_solve(instance, quantile_rewards(instance, ranks), eps)
    values = final.value_vector
    _check_locked(instance, taus, ranks, values)
    dist = propagate(instance, final.policy)
    for k, (tau, q) in enumerate(zip(taus, ranks)):
        got = lower_quantile(dist, tau)
        if got != q:
            raise InvariantViolation(
                f"level {k + 1}: final policy has tau-quantile rank {got}, bisection found {q}"
            )
    if any(b < a for a, b in zip(ranks, ranks[1:])):
        raise InvariantViolation(f"optimal ranks not monotone: {ranks}")
    return QuantileSolveReport(
        taus=taus,
        optimal_ranks=ranks,
        final_policy=final.policy,
        final_values=values,
        final_solution=final,
        probe_trace=trace,
        probe_count=counts,
        elapsed=time.perf_counter() - start,
    )

"""Plain-dict reports for solve, eval and oracle runs (serialized by ``documents.dumps``)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluation import cdf_table, evaluate_values, lower_quantile, propagate
from .lex import LexSolution, flmdp_solve
from .model import LEX_EPS, Ordering, lex_compare, validate
from .oracle import (
    PolicyEnumeration,
    brute_force_scheme,
    lex_optimum,
    min_cdf_table,
    quantiles_of,
)
from .quantile import QuantileObjective, QuantileSolveReport, mqo_solve, quantile_rewards
from .rewards import RewardSpec

REPORT_VERSION = 1


def end_distribution(instance, policy) -> dict:
    mass = propagate(instance, policy)
    return {
        "outcomes": [instance.rank_name(r) for r in range(mass.size)],
        "mass": mass.tolist(),
        "cdf": cdf_table(mass).tolist(),
    }


def _values_block(sol: LexSolution) -> dict:
    return {
        "value_vector": sol.value_vector.tolist(),
        "values_by_state": sol.values[:, 0, :].tolist(),
    }


def lex_report(instance, sol: LexSolution, eps: float, timings: bool = False) -> dict:
    out = {
        "kind": "solve-lex",
        "version": REPORT_VERSION,
        "instance": instance.name,
        "eps": eps,
        "policy": sol.policy.tolist(),
        "end_distribution": end_distribution(instance, sol.policy),
        **_values_block(sol),
    }
    if timings:
        out["timings"] = {"solve_seconds": sol.elapsed}
    return out


def mqo_report(instance, rep: QuantileSolveReport, eps: float, timings: bool = False) -> dict:
    out = {
        "kind": "solve-mqo",
        "version": REPORT_VERSION,
        "instance": instance.name,
        "eps": eps,
        "taus": list(rep.taus),
        "optimal_ranks": list(rep.optimal_ranks),
        "optimal_outcomes": [instance.rank_name(r) for r in rep.optimal_ranks],
        "policy": rep.final_policy.tolist(),
        "end_distribution": end_distribution(instance, rep.final_policy),
        "probe_count": list(rep.probe_count),
        "probe_trace": [
            [
                {"rank": p.rank, "value": p.value, "cdf": p.cdf, "branch": p.branch}
                for p in steps
            ]
            for steps in rep.probe_trace
        ],
        **_values_block(rep.final_solution),
    }
    if timings:
        out["timings"] = {
            "total_seconds": rep.elapsed,
            "final_solve_seconds": rep.final_solution.elapsed,
        }
    return out


def eval_report(instance, policy, taus=(), rewards: RewardSpec | None = None) -> dict:
    mass = propagate(instance, policy)
    out = {
        "kind": "eval",
        "version": REPORT_VERSION,
        "instance": instance.name,
        "policy": np.asarray(policy).tolist(),
        "end_distribution": end_distribution(instance, policy),
        "quantiles": [
            {"tau": float(t), "rank": q, "outcome": instance.rank_name(q)}
            for t in taus
            for q in [lower_quantile(mass, t)]
        ],
    }
    if rewards is not None:
        out["value_vector"] = evaluate_values(instance, rewards, policy).tolist()
    return out


# -- oracle cross-check ------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    agree: bool
    detail: str

    def to_dict(self) -> dict:
        return {"check": self.name, "status": "AGREE" if self.agree else "DISAGREE", "detail": self.detail}


def _vec(v) -> str:
    return "[" + ", ".join(format(float(x), ".12g") for x in v) + "]"


def crosscheck_lex(enum: PolicyEnumeration, rewards: RewardSpec, eps: float) -> list[Check]:
    inst = enum.instance
    sol = flmdp_solve(inst, rewards, eps)
    per_state = enum.values(rewards, per_state=True)
    at_mu = per_state @ inst.initial_distribution
    best, witnesses = lex_optimum(at_mu, eps)
    mine = sol.value_vector
    checks = [
        Check(
            "lex_value_at_mu0",
            lex_compare(mine, best, eps) == Ordering.EQUAL,
            f"solver {_vec(mine)} vs brute force {_vec(best)}",
        )
    ]
    bad_states = []
    for s in range(inst.num_states):
        b, _ = lex_optimum(per_state[:, :, s], eps)
        if lex_compare(sol.values[:, 0, s], b, eps) != Ordering.EQUAL:
            bad_states.append(s)
    checks.append(
        Check(
            "lex_value_per_state",
            not bad_states,
            "all start states" if not bad_states else f"mismatch at states {bad_states}",
        )
    )
    pol_vals = at_mu[_policy_index(enum, sol.policy)]
    checks.append(
        Check(
            "lex_policy_is_witness",
            lex_compare(pol_vals, best, eps) == Ordering.EQUAL,
            f"{witnesses.size} witness policies",
        )
    )
    return checks


def _policy_index(enum: PolicyEnumeration, policy) -> int:
    idx = 0
    for a in np.asarray(policy).ravel():
        idx = idx * enum.instance.num_actions + int(a)
    return idx


def crosscheck_mqo(
    enum: PolicyEnumeration, objective: QuantileObjective, eps: float, schemes=(1, 2)
) -> list[Check]:
    inst = enum.instance
    rep = mqo_solve(inst, objective, eps)
    checks = []
    results = {v: brute_force_scheme(inst, objective, v, eps, enumeration=enum) for v in schemes}
    for v, res in results.items():
        checks.append(
            Check(
                f"scheme{v}_ranks",
                list(res.ranks) == list(rep.optimal_ranks),
                f"solver {rep.optimal_ranks} vs scheme {v} {res.ranks}",
            )
        )
    ref = results.get(2) or brute_force_scheme(inst, objective, 2, eps, enumeration=enum)
    worst = 0.0
    cdf_ranks = []
    for k, (tau, steps) in enumerate(zip(objective.taus, rep.probe_trace)):
        Fstar = min_cdf_table(enum, ref.policy_sets[k])
        for step in steps:
            worst = max(worst, abs(step.cdf - Fstar[step.rank]))
        cdf_ranks.append(int(quantiles_of(Fstar, tau)[0]))
    checks.append(
        Check("probe_min_cdf", worst <= 1e-9, f"max |1 - probe - min CDF| = {worst:.3g}")
    )
    checks.append(
        Check(
            "min_cdf_quantiles",
            cdf_ranks == list(rep.optimal_ranks),
            f"min CDF quantiles {cdf_ranks}",
        )
    )
    locked = quantile_rewards(inst, ref.ranks)
    best, _ = lex_optimum(enum.values(locked), eps)
    checks.append(
        Check(
            "final_value_vector",
            lex_compare(rep.final_values, best, eps) == Ordering.EQUAL,
            f"solver {_vec(rep.final_values)} vs brute force {_vec(best)}",
        )
    )
    return checks


def scheme_set_comparison(enum: PolicyEnumeration, objective: QuantileObjective, eps: float) -> list[dict]:
    """Per-level sizes of both schemes' policy sets and how far they differ.

    Informational only: the verdict depends on ranks and values, not on the
    sets themselves.
    """
    one = brute_force_scheme(enum.instance, objective, 1, eps, enumeration=enum)
    two = brute_force_scheme(enum.instance, objective, 2, eps, enumeration=enum)
    rows = []
    for k in range(1, len(objective.taus) + 1):
        a, b = one.policy_sets[k], two.policy_sets[k]
        rows.append(
            {
                "level": k,
                "scheme1_size": int(a.size),
                "scheme2_size": int(b.size),
                "only_scheme1": int(np.setdiff1d(a, b).size),
                "only_scheme2": int(np.setdiff1d(b, a).size),
            }
        )
    return rows


def oracle_report(instance, rewards, objective, scheme=None, budget=None, eps: float = LEX_EPS) -> dict:
    instance = validate(instance)
    if objective is not None and not isinstance(objective, QuantileObjective):
        objective = QuantileObjective(tuple(objective))
    enum = PolicyEnumeration(instance, budget)
    checks: list[Check] = []
    if rewards is not None:
        checks += crosscheck_lex(enum, rewards, eps)
    if objective is not None:
        checks += crosscheck_mqo(enum, objective, eps, (scheme,) if scheme else (1, 2))
    report = {
        "kind": "oracle",
        "version": REPORT_VERSION,
        "instance": instance.name,
        "eps": eps,
        "policies_enumerated": enum.count,
        "checks": [c.to_dict() for c in checks],
        "verdict": "AGREE" if all(c.agree for c in checks) else "DISAGREE",
    }
    if objective is not None and scheme is None:
        report["scheme_sets"] = scheme_set_comparison(enum, objective, eps)
    return report

"""JSON documents for instances, policies and reports.

Emission is canonical: keys sorted, sparse entries sorted by ``(s, a, s')``
with zeros dropped, floats written with 17 significant digits. Parsing then
emitting a canonical document reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .errors import DocumentError, DuplicateEntry, ValidationFailed
from .model import MdpInstance, ValidatedInstance, check
from .quantile import QuantileObjective
from .rewards import RewardSpec, check_rewards

FLOAT_FORMAT = ".17g"


# -- canonical writer ----------------------------------------------------------


def _scalar(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x!r}")
        if x == 0.0:
            return "0"
        return format(x, FLOAT_FORMAT)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _is_scalar(x) -> bool:
    return not isinstance(x, (dict, list, tuple, np.ndarray))


def _write(obj, indent: int, out: list):
    pad = "  " * indent
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for n, key in enumerate(keys):
            out.append(f"{pad}  {json.dumps(str(key))}: ")
            _write(obj[key], indent + 1, out)
            out.append(",\n" if n < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if all(_is_scalar(x) for x in obj):
            out.append("[" + ", ".join(_scalar(x) for x in obj) + "]")
            return
        out.append("[\n")
        for n, item in enumerate(obj):
            out.append(pad + "  ")
            _write(item, indent + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def dumps(obj) -> str:
    """Canonical JSON text, newline-terminated."""
    out: list[str] = []
    _write(obj, 0, out)
    return "".join(out) + "\n"


# -- schemas -------------------------------------------------------------------


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("lexiplan.schemas").joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def _check_schema(data, name: str):
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise DocumentError(err.message, where)


# -- instances -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InstanceDocument:
    instance: ValidatedInstance
    rewards: RewardSpec | None = None
    objective: QuantileObjective | None = None


def _dense(entries, shape, key: str) -> np.ndarray:
    S, A, _ = shape
    out = np.zeros(shape)
    seen = set()
    for n, (s, a, s2, value) in enumerate(entries):
        where = f"{key}[{n}]"
        if s >= S or s2 >= S or a >= A:
            raise DocumentError(f"index out of range for {S} states and {A} actions", where)
        if (s, a, s2) in seen:
            raise DuplicateEntry(s, a, s2, where)
        seen.add((s, a, s2))
        out[s, a, s2] = float(value)
    return out


def _sparse(tensor: np.ndarray) -> list:
    return [
        [int(s), int(a), int(s2), float(tensor[s, a, s2])]
        for s, a, s2 in zip(*np.nonzero(tensor))
    ]


_VIOLATION_KEYS = {
    "RowNotStochastic": "transitions",
    "EndStateNotAbsorbing": "transitions",
    "ProbabilityOutOfRange": "transitions",
    "BadInitialDistribution": "initial_distribution",
    "IndexOutOfRange": "end_states",
    "DuplicateEndState": "end_states",
    "BadCount": "<root>",
    "RewardOnEndState": "rewards",
    "NonFiniteReward": "rewards",
}


def _raise_validation(violations, name: str):
    keys = sorted({_VIOLATION_KEYS.get(type(v).__name__, getattr(v, "where", "<root>")) for v in violations})
    raise ValidationFailed(violations, context=f"{name} [{', '.join(keys)}]")


def parse_document(text: str) -> InstanceDocument:
    """Parse and validate an instance document."""
    data = _loads(text)
    _check_schema(data, "instance")
    S, A = data["num_states"], data["num_actions"]
    shape = (S, A, S)
    name = data.get("name", "unnamed")
    P = _dense(data["transitions"], shape, "transitions")
    mu0 = np.asarray(data["initial_distribution"], dtype=np.float64)
    if mu0.shape != (S,):
        raise DocumentError(f"expected {S} entries, got {mu0.size}", "initial_distribution")
    names = data.get("state_names")
    if names is not None and len(names) != S:
        raise DocumentError(f"expected {S} names, got {len(names)}", "state_names")
    raw = MdpInstance(
        num_states=S,
        num_actions=A,
        horizon=data["horizon"],
        transitions=P,
        end_states=data["end_states"],
        initial_distribution=mu0,
        name=name,
        state_names=names,
    )
    violations = check(raw)
    if violations:
        _raise_validation(violations, name)
    instance = ValidatedInstance(
        num_states=S,
        num_actions=A,
        horizon=raw.horizon,
        transitions=raw.transitions,
        end_states=raw.end_states,
        initial_distribution=raw.initial_distribution,
        name=name,
        state_names=raw.state_names,
    )
    rewards = None
    if data.get("rewards"):
        rewards = RewardSpec.stack(
            [_dense(level, shape, f"rewards[{i}]") for i, level in enumerate(data["rewards"])]
        )
        violations = check_rewards(instance, rewards)
        if violations:
            _raise_validation(violations, name)
    objective = None
    if "objective" in data:
        try:
            objective = QuantileObjective(tuple(data["objective"]))
        except ValueError as exc:
            raise DocumentError(str(exc), "objective") from None
    return InstanceDocument(instance, rewards, objective)


def parse_instance(text: str) -> ValidatedInstance:
    return parse_document(text).instance


def instance_to_dict(instance, rewards: RewardSpec | None = None, objective=None) -> dict:
    doc = {
        "name": instance.name,
        "num_states": instance.num_states,
        "num_actions": instance.num_actions,
        "horizon": instance.horizon,
        "end_states": list(instance.end_states),
        "initial_distribution": [float(x) for x in instance.initial_distribution],
        "transitions": _sparse(instance.transitions),
    }
    if instance.state_names is not None:
        doc["state_names"] = list(instance.state_names)
    if rewards is not None:
        doc["rewards"] = [_sparse(level) for level in rewards.levels]
    if objective is not None:
        taus = objective.taus if isinstance(objective, QuantileObjective) else objective
        doc["objective"] = [float(t) for t in taus]
    return doc


def emit_instance(instance, rewards: RewardSpec | None = None, objective=None) -> str:
    return dumps(instance_to_dict(instance, rewards, objective))


def emit_document(doc: InstanceDocument) -> str:
    return emit_instance(doc.instance, doc.rewards, doc.objective)


# -- policies ------------------------------------------------------------------


def parse_policy(text: str) -> np.ndarray:
    """Read the ``policy`` table from a policy document or a solve report."""
    data = _loads(text)
    _check_schema(data, "policy")
    rows = data["policy"]
    if len({len(r) for r in rows}) != 1:
        raise DocumentError("policy rows have different lengths", "policy")
    return np.asarray(rows, dtype=np.int64)


def emit_policy(policy) -> str:
    return dumps({"policy": np.asarray(policy).tolist()})

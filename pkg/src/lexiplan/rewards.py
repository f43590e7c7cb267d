"""Per-transition reward vectors and their expectation over successor states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ValidationFailed
from .model import ValidatedInstance, validate


@dataclass(frozen=True)
class RewardOnEndState:
    level: int
    e: int
    a: int
    s_next: int
    value: float

    def __str__(self):
        return (
            f"RewardOnEndState(level={self.level}, e={self.e}, a={self.a}, "
            f"s'={self.s_next}, r={self.value!r})"
        )


@dataclass(frozen=True)
class NonFiniteReward:
    level: int
    coords: tuple

    def __str__(self):
        return f"NonFiniteReward(level={self.level}, {list(self.coords)})"


@dataclass(frozen=True, eq=False)
class RewardSpec:
    """``levels[i, s, a, s2]`` is the level-``i`` reward; level 0 has top priority."""

    levels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.levels, dtype=np.float64, copy=True)
        if arr.ndim == 3:
            arr = arr[None]
        if arr.ndim != 4:
            raise DimensionMismatch(f"reward levels must be 4-d (L, S, A, S), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "levels", arr)

    @property
    def num_levels(self) -> int:
        return self.levels.shape[0]

    @classmethod
    def stack(cls, tensors) -> "RewardSpec":
        return cls(np.stack([np.asarray(t, dtype=np.float64) for t in tensors]))

    def __eq__(self, other):
        if not isinstance(other, RewardSpec):
            return NotImplemented
        return np.array_equal(self.levels, other.levels)

    __hash__ = None


def check_rewards(instance: ValidatedInstance, rewards: RewardSpec) -> list:
    S, A = instance.num_states, instance.num_actions
    R = rewards.levels
    if R.shape[1:] != (S, A, S):
        raise DimensionMismatch(f"reward levels have shape {R.shape[1:]}, expected {(S, A, S)}")
    out = []
    for idx in zip(*np.nonzero(~np.isfinite(R))):
        out.append(NonFiniteReward(int(idx[0]), tuple(int(i) for i in idx[1:])))
    for e in instance.end_states:
        for i, a, s2 in zip(*np.nonzero(R[:, e] != 0.0)):
            out.append(RewardOnEndState(int(i), e, int(a), int(s2), float(R[i, e, a, s2])))
    return out


def validate_rewards(instance, rewards: RewardSpec) -> RewardSpec:
    """Reject non-finite entries and any reward earned from an end state."""
    instance = validate(instance)
    violations = check_rewards(instance, rewards)
    if violations:
        raise ValidationFailed(violations, context="rewards")
    return rewards


def marginalize_rewards(instance, rewards: RewardSpec) -> np.ndarray:
    """Expected one-step rewards ``R_i(s, a) = sum_s2 P(s, a, s2) R_i(s, a, s2)``.

    Returns a C-contiguous ``(L, S, A)`` array.
    """
    instance = validate(instance)
    validate_rewards(instance, rewards)
    out = np.einsum("sat,lsat->lsa", instance.transitions, rewards.levels)
    return np.ascontiguousarray(out)

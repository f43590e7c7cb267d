"""Instance model, validation, and lexicographic comparison of value vectors.

States are integers ``0..S-1``. The ordered ``end_states`` list ranks modeled
outcomes by increasing preference; rank ``k >= 1`` is ``end_states[k-1]``.
Rank 0 is the virtual timeout outcome: probability mass sitting on a non-end
state when the horizon runs out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, ValidationFailed

STOCHASTIC_TOL = 1e-12
LEX_EPS = 1e-9
TIMEOUT_NAME = "g0"


# -- violation records -------------------------------------------------------


@dataclass(frozen=True)
class RowNotStochastic:
    s: int
    a: int
    total: float

    def __str__(self):
        return f"RowNotStochastic(s={self.s}, a={self.a}, sum={self.total!r})"


@dataclass(frozen=True)
class EndStateNotAbsorbing:
    e: int
    a: int

    def __str__(self):
        return f"EndStateNotAbsorbing(e={self.e}, a={self.a})"


@dataclass(frozen=True)
class BadInitialDistribution:
    total: float
    reason: str = "does not sum to 1"

    def __str__(self):
        return f"BadInitialDistribution(sum={self.total!r}: {self.reason})"


@dataclass(frozen=True)
class IndexOutOfRange:
    what: str
    index: int
    limit: int

    def __str__(self):
        return f"IndexOutOfRange({self.what}={self.index}, limit={self.limit})"


@dataclass(frozen=True)
class NonFiniteProbability:
    where: str
    coords: tuple

    def __str__(self):
        return f"NonFiniteProbability({self.where}{list(self.coords)})"


@dataclass(frozen=True)
class ProbabilityOutOfRange:
    where: str
    coords: tuple
    value: float

    def __str__(self):
        return f"ProbabilityOutOfRange({self.where}{list(self.coords)}={self.value!r})"


@dataclass(frozen=True)
class DuplicateEndState:
    e: int

    def __str__(self):
        return f"DuplicateEndState(e={self.e})"


@dataclass(frozen=True)
class BadCount:
    what: str
    value: int

    def __str__(self):
        return f"BadCount({self.what}={self.value})"


# -- instance ----------------------------------------------------------------


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MdpInstance:
    """A finite-horizon tabular MDP with an ordered set of absorbing end states.

    ``transitions[s, a, s2]`` is P(s2 | s, a). Decisions happen at
    ``t = 0..horizon-1``.
    """

    num_states: int
    num_actions: int
    horizon: int
    transitions: np.ndarray
    end_states: tuple
    initial_distribution: np.ndarray
    name: str = "unnamed"
    state_names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "transitions", _frozen(self.transitions, np.float64))
        object.__setattr__(
            self, "initial_distribution", _frozen(self.initial_distribution, np.float64)
        )
        object.__setattr__(self, "end_states", tuple(int(e) for e in self.end_states))
        if self.state_names is not None:
            object.__setattr__(self, "state_names", tuple(str(n) for n in self.state_names))

    @property
    def num_ends(self) -> int:
        return len(self.end_states)

    def with_initial(self, mu0) -> "MdpInstance":
        return MdpInstance(
            num_states=self.num_states,
            num_actions=self.num_actions,
            horizon=self.horizon,
            transitions=self.transitions,
            end_states=self.end_states,
            initial_distribution=np.asarray(mu0, dtype=np.float64),
            name=self.name,
            state_names=self.state_names,
        )

    def state_name(self, s: int) -> str:
        if self.state_names is not None:
            return self.state_names[s]
        return f"s{s}"

    def rank_name(self, rank: int) -> str:
        if rank == 0:
            return TIMEOUT_NAME
        return self.state_name(self.end_states[rank - 1])

    def __eq__(self, other):
        if not isinstance(other, MdpInstance):
            return NotImplemented
        return (
            self.num_states == other.num_states
            and self.num_actions == other.num_actions
            and self.horizon == other.horizon
            and self.end_states == other.end_states
            and self.name == other.name
            and self.state_names == other.state_names
            and np.array_equal(self.transitions, other.transitions)
            and np.array_equal(self.initial_distribution, other.initial_distribution)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ValidatedInstance(MdpInstance):
    """An instance that passed :func:`validate`, plus cached rank lookups."""

    is_end: np.ndarray = field(init=False, repr=False)
    end_rank: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        super().__post_init__()
        is_end = np.zeros(self.num_states, dtype=bool)
        rank = np.zeros(self.num_states, dtype=np.int64)
        for k, e in enumerate(self.end_states, start=1):
            is_end[e] = True
            rank[e] = k
        object.__setattr__(self, "is_end", _frozen(is_end, bool))
        object.__setattr__(self, "end_rank", _frozen(rank, np.int64))

    def with_initial(self, mu0) -> "ValidatedInstance":
        return validate(super().with_initial(mu0))


def check(instance: MdpInstance) -> list:
    """Return every invariant violation of ``instance`` (empty when valid)."""
    out = []
    S, A = instance.num_states, instance.num_actions
    if S < 1:
        out.append(BadCount("num_states", S))
    if A < 1:
        out.append(BadCount("num_actions", A))
    if instance.horizon < 1:
        out.append(BadCount("horizon", instance.horizon))
    P = instance.transitions
    mu = instance.initial_distribution
    if P.shape != (S, A, S):
        raise DimensionMismatch(f"transitions has shape {P.shape}, expected {(S, A, S)}")
    if mu.shape != (S,):
        raise DimensionMismatch(f"initial_distribution has shape {mu.shape}, expected {(S,)}")

    finite = np.isfinite(P)
    for idx in zip(*np.nonzero(~finite)):
        out.append(NonFiniteProbability("transitions", tuple(int(i) for i in idx)))
    bad = finite & ((P < 0.0) | (P > 1.0))
    for idx in zip(*np.nonzero(bad)):
        out.append(ProbabilityOutOfRange("transitions", tuple(int(i) for i in idx), float(P[idx])))
    sums = P.sum(axis=2)
    for s in range(S):
        for a in range(A):
            if np.all(finite[s, a]) and abs(sums[s, a] - 1.0) > STOCHASTIC_TOL:
                out.append(RowNotStochastic(s, a, float(sums[s, a])))

    seen = set()
    for e in instance.end_states:
        if not 0 <= e < S:
            out.append(IndexOutOfRange("end_state", e, S))
            continue
        if e in seen:
            out.append(DuplicateEndState(e))
            continue
        seen.add(e)
        for a in range(A):
            if not abs(P[e, a, e] - 1.0) <= STOCHASTIC_TOL:
                out.append(EndStateNotAbsorbing(e, a))

    if not np.all(np.isfinite(mu)):
        for idx in np.nonzero(~np.isfinite(mu))[0]:
            out.append(NonFiniteProbability("initial_distribution", (int(idx),)))
    elif np.any((mu < 0.0) | (mu > 1.0)):
        out.append(BadInitialDistribution(float(mu.sum()), "entry outside [0, 1]"))
    elif abs(mu.sum() - 1.0) > STOCHASTIC_TOL:
        out.append(BadInitialDistribution(float(mu.sum())))
    return out


def validate(instance: MdpInstance) -> ValidatedInstance:
    """Check every invariant and return a :class:`ValidatedInstance`.

    Raises :class:`ValidationFailed` listing all violations.
    """
    if isinstance(instance, ValidatedInstance):
        return instance
    violations = check(instance)
    if violations:
        raise ValidationFailed(violations, context=instance.name)
    return ValidatedInstance(
        num_states=instance.num_states,
        num_actions=instance.num_actions,
        horizon=instance.horizon,
        transitions=instance.transitions,
        end_states=instance.end_states,
        initial_distribution=instance.initial_distribution,
        name=instance.name,
        state_names=instance.state_names,
    )


# -- lexicographic order -----------------------------------------------------


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def lex_compare(u, v, eps: float = LEX_EPS) -> Ordering:
    """Compare two value vectors, highest priority first.

    The first component differing by more than ``eps`` decides.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise LengthMismatch(f"value vectors of length {u.size} and {v.size}")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    for x, y in zip(u, v):
        if abs(x - y) > eps:
            return Ordering.GREATER if x > y else Ordering.LESS
    return Ordering.EQUAL

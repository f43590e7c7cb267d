"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The numba backend is used when numba imports cleanly, unless the environment
sets ``LEXIPLAN_NUMBA=0``. Both backends expose the same functions:

``lex_backward(P, Rsa, horizon, eps) -> (V, policy, allowed)``
    Backward induction with lexicographically restricted maxima.
    ``V`` is ``(L, T+1, S)``, ``policy`` is ``(T, S)``, ``allowed[t, i]`` is
    the surviving action mask after ``i`` levels (``allowed[t, 0]`` is all).
``evaluate_policy(P, Rsa, policy) -> V``
``propagate(P, policy, mu0) -> d``
    State distribution after the last decision epoch.
``decode_policies(start, count, A, T, S) -> acts``
``enumerate_evaluate(P, Rsa, mu0, end_rank, n_ranks, T, start, count) -> (V0, mass)``
    Batch evaluation of enumerated policies ``start..start+count-1``:
    per-start-state values ``(count, L, S)`` and end masses under ``mu0``.

Inputs must be C-contiguous float64 (``P``, ``Rsa``, ``mu0``) and int64
(``policy``, ``end_rank``).
"""

import os
from types import ModuleType

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    _numba = None

_DISABLED = os.environ.get("LEXIPLAN_NUMBA", "1").strip().lower() in ("0", "false", "no", "off")

BACKENDS = {"numpy": _numpy}
if _numba is not None:
    BACKENDS["numba"] = _numba


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = "numpy" if _DISABLED or _numba is None else "numba"
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None


active = get_backend()
BACKEND = active.NAME

lex_backward = active.lex_backward
evaluate_policy = active.evaluate_policy
propagate = active.propagate
decode_policies = active.decode_policies
enumerate_evaluate = active.enumerate_evaluate

"""Seeded instance generators for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleParams
from .model import MdpInstance, validate
from .rewards import RewardSpec

GRID = 64
DEFAULT_STATE_BUDGET = 4096

# grid actions
NORTH, SOUTH, WEST, EAST, STOP = range(5)
_MOVES = {NORTH: (0, 1), SOUTH: (0, -1), WEST: (-1, 0), EAST: (1, 0)}
_PERPENDICULAR = {NORTH: (WEST, EAST), SOUTH: (WEST, EAST), WEST: (NORTH, SOUTH), EAST: (NORTH, SOUTH)}


def quantize(weights, units: int = GRID) -> np.ndarray:
    """Split ``units`` integer units proportionally to ``weights``, at least one each.

    Largest-remainder rounding; ties go to the lower index.
    """
    w = np.asarray(weights, dtype=np.float64)
    k = w.size
    if k == 0 or k > units:
        raise InfeasibleParams(f"cannot spread {units} units over {k} entries")
    spare = units - k
    share = w / w.sum() * spare
    out = np.floor(share).astype(np.int64)
    left = spare - int(out.sum())
    order = np.argsort(-(share - out), kind="stable")
    out[order[:left]] += 1
    return out + 1


def _dyadic_row(rng, support) -> np.ndarray:
    return quantize(rng.random(len(support)) + 1e-3) / GRID


def generate_random(
    num_states: int,
    num_actions: int,
    horizon: int,
    num_end: int,
    density: float = 1.0,
    seed: int = 0,
    name: str | None = None,
):
    """Random instance with probabilities on the 1/64 grid.

    End states are a random subset in random preference order; each non-end
    ``(s, a)`` row spreads over ``round(density * S)`` successors. The initial
    distribution sits on non-end states only.
    """
    if num_states < 1 or num_actions < 1 or horizon < 1:
        raise InfeasibleParams("num_states, num_actions and horizon must be positive")
    if not 0 <= num_end < num_states:
        raise InfeasibleParams(f"need 0 <= num_end < num_states, got {num_end}, {num_states}")
    if not 0.0 < density <= 1.0:
        raise InfeasibleParams(f"density {density!r} outside (0, 1]")
    k = max(1, int(round(density * num_states)))
    if k > GRID:
        raise InfeasibleParams(f"row support {k} exceeds the {GRID}-unit probability grid")
    rng = np.random.default_rng(seed)
    ends = [int(e) for e in rng.permutation(num_states)[:num_end]]
    is_end = np.zeros(num_states, dtype=bool)
    is_end[ends] = True
    P = np.zeros((num_states, num_actions, num_states))
    for s in range(num_states):
        for a in range(num_actions):
            if is_end[s]:
                P[s, a, s] = 1.0
                continue
            support = np.sort(rng.choice(num_states, size=k, replace=False))
            P[s, a, support] = _dyadic_row(rng, support)
    free = np.nonzero(~is_end)[0]
    size = int(rng.integers(1, min(len(free), GRID) + 1))
    support = np.sort(rng.choice(free, size=size, replace=False))
    mu0 = np.zeros(num_states)
    mu0[support] = _dyadic_row(rng, support)
    inst = MdpInstance(
        num_states=num_states,
        num_actions=num_actions,
        horizon=horizon,
        transitions=P,
        end_states=ends,
        initial_distribution=mu0,
        name=name or f"random-s{seed}",
    )
    return validate(inst)


def random_rewards(instance, levels: int, seed: int = 0) -> RewardSpec:
    """Independent {0, 1} rewards on transitions out of non-end states."""
    instance = validate(instance)
    rng = np.random.default_rng(seed)
    S, A = instance.num_states, instance.num_actions
    R = rng.integers(0, 2, size=(levels, S, A, S)).astype(np.float64)
    R[:, instance.is_end] = 0.0
    return RewardSpec(R)


def random_taus(levels: int, seed: int = 0) -> tuple:
    """Strictly increasing taus on the 1/64 grid."""
    if not 1 <= levels <= GRID:
        raise InfeasibleParams(f"levels must lie in 1..{GRID}")
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(np.arange(1, GRID + 1), size=levels, replace=False))
    return tuple(float(p) / GRID for p in picks)


def generate_hazard_grid(
    width: int,
    height: int,
    horizon: int,
    hazards=0,
    slip: float = 0.0,
    seed: int = 0,
    state_budget: int = DEFAULT_STATE_BUDGET,
    name: str | None = None,
):
    """Grid walk from the lower-left cell toward the upper-right goal cell.

    Actions are north, south, west, east and stop. A move goes sideways with
    probability ``slip`` (split evenly between the two perpendicular
    directions); leaving the grid means staying put and entering a hazard
    cell crashes. ``stop`` ends the episode graded by Manhattan distance to
    the goal. End states, least preferred first: crash, goal_far, goal_near,
    goal_exact.

    ``hazards`` is a count of randomly placed cells or an explicit list of
    ``(x, y)`` cells.
    """
    if width < 1 or height < 1 or width * height < 2:
        raise InfeasibleParams("grid needs at least two cells")
    if horizon < 1:
        raise InfeasibleParams("horizon must be positive")
    if not 0.0 <= slip <= 1.0:
        raise InfeasibleParams(f"slip {slip!r} outside [0, 1]")
    cells = width * height
    if cells + 4 > state_budget:
        raise InfeasibleParams(f"{cells + 4} states exceed the state budget {state_budget}")
    start, goal = (0, 0), (width - 1, height - 1)
    rng = np.random.default_rng(seed)
    if isinstance(hazards, int):
        pool = [(x, y) for y in range(height) for x in range(width) if (x, y) not in (start, goal)]
        if not 0 <= hazards <= len(pool):
            raise InfeasibleParams(f"cannot place {hazards} hazards on {len(pool)} free cells")
        picks = rng.choice(len(pool), size=hazards, replace=False) if hazards else []
        hazard_cells = {pool[i] for i in picks}
    else:
        hazard_cells = {(int(x), int(y)) for x, y in hazards}
        for c in hazard_cells:
            if not (0 <= c[0] < width and 0 <= c[1] < height) or c in (start, goal):
                raise InfeasibleParams(f"bad hazard cell {c}")

    def cell(x, y):
        return y * width + x

    crash, far, near, exact = cells, cells + 1, cells + 2, cells + 3
    S = cells + 4
    P = np.zeros((S, 5, S))
    for e in (crash, far, near, exact):
        P[e, :, e] = 1.0
    for y in range(height):
        for x in range(width):
            s = cell(x, y)
            if (x, y) in hazard_cells:
                P[s, :, crash] = 1.0
                continue
            for a in _MOVES:
                side = _PERPENDICULAR[a]
                for b, p in ((a, 1.0 - slip), (side[0], slip / 2), (side[1], slip / 2)):
                    if p == 0.0:
                        continue
                    mx, my = _MOVES[b]
                    nx, ny = x + mx, y + my
                    if not (0 <= nx < width and 0 <= ny < height):
                        nx, ny = x, y
                    target = crash if (nx, ny) in hazard_cells else cell(nx, ny)
                    P[s, a, target] += p
            dist = abs(goal[0] - x) + abs(goal[1] - y)
            P[s, STOP, exact if dist == 0 else near if dist == 1 else far] = 1.0
    mu0 = np.zeros(S)
    mu0[cell(*start)] = 1.0
    names = []
    for y in range(height):
        for x in range(width):
            names.append(f"{'h' if (x, y) in hazard_cells else 'c'}{x}_{y}")
    names += ["crash", "goal_far", "goal_near", "goal_exact"]
    inst = MdpInstance(
        num_states=S,
        num_actions=5,
        horizon=horizon,
        transitions=P,
        end_states=[crash, far, near, exact],
        initial_distribution=mu0,
        name=name or f"grid-{width}x{height}-s{seed}",
        state_names=names,
    )
    return validate(inst)


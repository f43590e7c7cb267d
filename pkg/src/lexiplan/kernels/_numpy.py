"""Pure-numpy kernels. Same signatures and outputs as the numba backend."""

import numpy as np

NAME = "numpy"


def lex_backward(P, Rsa, horizon, eps):
    L, S, A = Rsa.shape
    V = np.zeros((L, horizon + 1, S))
    policy = np.empty((horizon, S), dtype=np.int64)
    allowed = np.zeros((horizon, L + 1, S, A), dtype=np.bool_)
    for t in range(horizon - 1, -1, -1):
        mask = np.ones((S, A), dtype=np.bool_)
        allowed[t, 0] = mask
        for i in range(L):
            Q = Rsa[i] + P @ V[i, t + 1]
            best = np.where(mask, Q, -np.inf).max(axis=1)
            V[i, t] = best
            mask = mask & (Q >= best[:, None] - eps)
            allowed[t, i + 1] = mask
        policy[t] = np.argmax(mask, axis=1)
    return V, policy, allowed


def evaluate_policy(P, Rsa, policy):
    L, S, _ = Rsa.shape
    horizon = policy.shape[0]
    V = np.zeros((L, horizon + 1, S))
    rows = np.arange(S)
    for t in range(horizon - 1, -1, -1):
        a = policy[t]
        Pt = P[rows, a]
        V[:, t] = Rsa[:, rows, a] + V[:, t + 1] @ Pt.T
    return V


def propagate(P, policy, mu0):
    S = mu0.shape[0]
    rows = np.arange(S)
    d = mu0.copy()
    for t in range(policy.shape[0]):
        d = d @ P[rows, policy[t]]
    return d


def decode_policies(start, count, num_actions, horizon, num_states):
    """Action tables for policy indices ``start..start+count-1``.

    Index digits (base ``num_actions``, most significant first) fill the
    ``horizon x num_states`` table in row-major order.
    """
    width = horizon * num_states
    idx = np.arange(start, start + count, dtype=np.int64)
    acts = np.empty((count, width), dtype=np.int64)
    for j in range(width - 1, -1, -1):
        acts[:, j] = idx % num_actions
        idx //= num_actions
    return acts.reshape(count, horizon, num_states)


def enumerate_evaluate(P, Rsa, mu0, end_rank, n_ranks, horizon, start, count):
    L, S, A = Rsa.shape
    acts = decode_policies(start, count, A, horizon, S)
    rows = np.arange(S)
    V = np.zeros((count, L, S))
    for t in range(horizon - 1, -1, -1):
        a = acts[:, t, :]
        R = Rsa[:, rows, a]  # (L, count, S)
        Pt = P[rows, a]  # (count, S, S)
        V = np.transpose(R, (1, 0, 2)) + np.einsum("cij,clj->cli", Pt, V)
    d = np.broadcast_to(mu0, (count, S)).copy()
    for t in range(horizon):
        Pt = P[rows, acts[:, t, :]]
        d = np.einsum("ci,cij->cj", d, Pt)
    mass = np.zeros((count, n_ranks))
    for s in range(S):
        mass[:, end_rank[s]] += d[:, s]
    return V, mass

"""numba-compiled kernels. Loops sum successor states in index order."""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def lex_backward(P, Rsa, horizon, eps):
    L, S, A = Rsa.shape
    V = np.zeros((L, horizon + 1, S))
    policy = np.empty((horizon, S), dtype=np.int64)
    allowed = np.zeros((horizon, L + 1, S, A), dtype=np.bool_)
    q = np.empty(A)
    for t in range(horizon - 1, -1, -1):
        for s in range(S):
            for a in range(A):
                allowed[t, 0, s, a] = True
            for i in range(L):
                best = -np.inf
                for a in range(A):
                    if allowed[t, i, s, a]:
                        acc = Rsa[i, s, a]
                        for s2 in range(S):
                            acc += P[s, a, s2] * V[i, t + 1, s2]
                        q[a] = acc
                        if acc > best:
                            best = acc
                V[i, t, s] = best
                for a in range(A):
                    allowed[t, i + 1, s, a] = allowed[t, i, s, a] and q[a] >= best - eps
            choice = -1
            for a in range(A):
                if allowed[t, L, s, a]:
                    choice = a
                    break
            policy[t, s] = choice
    return V, policy, allowed


@njit(cache=True)
def evaluate_policy(P, Rsa, policy):
    L, S, _ = Rsa.shape
    horizon = policy.shape[0]
    V = np.zeros((L, horizon + 1, S))
    for t in range(horizon - 1, -1, -1):
        for s in range(S):
            a = policy[t, s]
            for i in range(L):
                acc = Rsa[i, s, a]
                for s2 in range(S):
                    acc += P[s, a, s2] * V[i, t + 1, s2]
                V[i, t, s] = acc
    return V


@njit(cache=True)
def propagate(P, policy, mu0):
    S = mu0.shape[0]
    d = mu0.copy()
    nxt = np.empty(S)
    for t in range(policy.shape[0]):
        nxt[:] = 0.0
        for s in range(S):
            w = d[s]
            if w != 0.0:
                a = policy[t, s]
                for s2 in range(S):
                    nxt[s2] += w * P[s, a, s2]
        d[:] = nxt
    return d


@njit(cache=True)
def decode_policies(start, count, num_actions, horizon, num_states):
    width = horizon * num_states
    acts = np.empty((count, horizon, num_states), dtype=np.int64)
    for c in range(count):
        idx = start + c
        for j in range(width - 1, -1, -1):
            acts[c, j // num_states, j % num_states] = idx % num_actions
            idx //= num_actions
    return acts


@njit(cache=True)
def enumerate_evaluate(P, Rsa, mu0, end_rank, n_ranks, horizon, start, count):
    L, S, A = Rsa.shape
    V = np.zeros((count, L, S))
    mass = np.zeros((count, n_ranks))
    width = horizon * S
    acts = np.empty((horizon, S), dtype=np.int64)
    cur = np.empty((L, S))
    nxt = np.empty((L, S))
    d = np.empty(S)
    dn = np.empty(S)
    for c in range(count):
        idx = start + c
        for j in range(width - 1, -1, -1):
            acts[j // S, j % S] = idx % A
            idx //= A
        cur[:, :] = 0.0
        for t in range(horizon - 1, -1, -1):
            for s in range(S):
                a = acts[t, s]
                for i in range(L):
                    acc = Rsa[i, s, a]
                    for s2 in range(S):
                        acc += P[s, a, s2] * cur[i, s2]
                    nxt[i, s] = acc
            cur[:, :] = nxt
        V[c] = cur
        d[:] = mu0
        for t in range(horizon):
            dn[:] = 0.0
            for s in range(S):
                w = d[s]
                if w != 0.0:
                    a = acts[t, s]
                    for s2 in range(S):
                        dn[s2] += w * P[s, a, s2]
            d[:] = dn
        for s in range(S):
            mass[c, end_rank[s]] += d[s]
    return V, mass

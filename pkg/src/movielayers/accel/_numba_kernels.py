"""JIT-compiled CSR graph kernels (betweenness, BFS stats, power iteration)."""

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True)
def betweenness(indptr, indices, n):
    """Brandes betweenness, unnormalized, each unordered pair counted once."""
    bc = np.zeros(n)
    dist = np.empty(n, np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    order = np.empty(n, np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        tail = 1
        qi = 0
        while qi < tail:
            v = order[qi]
            qi += 1
            dv = dist[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for ei in range(indptr[w], indptr[w + 1]):
                v = indices[ei]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc * 0.5


@njit(cache=True)
def distance_stats(indptr, indices, component):
    """(diameter, ordered-pair distance sum, ordered-pair count) within one component."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    diameter = 0
    total = 0.0
    pairs = 0
    for si in range(component.shape[0]):
        s = component[si]
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        queue[0] = s
        tail = 1
        qi = 0
        while qi < tail:
            v = queue[qi]
            qi += 1
            dv = dist[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
                    if dist[w] > diameter:
                        diameter = dist[w]
                    total += dist[w]
                    pairs += 1
    return diameter, total, pairs


@njit(cache=True)
def power_iteration(indptr, indices, n, tol, max_iter):
    """Leading eigenvector of A + I from a uniform start.

    The identity shift keeps bipartite graphs from oscillating without
    changing eigenvectors. Returns (vector, iterations, residual); iterations
    is -1 when max_iter passed without the successive change dropping below
    tol.
    """
    x = np.full(n, 1.0 / np.sqrt(n))
    resid = 0.0
    for it in range(max_iter):
        y = x.copy()
        for v in range(n):
            xv = x[v]
            for ei in range(indptr[v], indptr[v + 1]):
                y[indices[ei]] += xv
        norm = np.sqrt((y * y).sum())
        if norm == 0.0:
            return y, it + 1, 0.0
        y = y / norm
        resid = np.abs(y - x).max()
        x = y
        if resid < tol:
            return x, it + 1, resid
    return x, -1, resid

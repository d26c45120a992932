"""Vectorized pure-numpy fallbacks for the JIT kernels.

Same signatures and results as _numba_kernels; BFS runs level-synchronously
with frontier arrays instead of per-node loops.
"""

import numpy as np

BACKEND = "numpy"


def _expand(indptr, indices, frontier):
    """All (source, target) pairs for edges leaving the frontier."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    sources = np.repeat(frontier, counts)
    cum = np.concatenate((np.zeros(1, np.int64), np.cumsum(counts)))
    flat = np.arange(total, dtype=np.int64) - np.repeat(cum[:-1], counts) + np.repeat(starts, counts)
    return sources, indices[flat]


def _bfs_levels(indptr, indices, n, source):
    """Level-synchronous BFS: (dist, sigma, levels) with sigma path counts."""
    dist = np.full(n, -1, np.int64)
    sigma = np.zeros(n)
    dist[source] = 0
    sigma[source] = 1.0
    levels = [np.array([source], dtype=np.int64)]
    level = 0
    frontier = levels[0]
    while frontier.size:
        u, w = _expand(indptr, indices, frontier)
        if u.size == 0:
            break
        fresh = w[dist[w] < 0]
        if fresh.size:
            fresh = np.unique(fresh)
            dist[fresh] = level + 1
        step = dist[w] == level + 1
        if step.any():
            np.add.at(sigma, w[step], sigma[u[step]])
        frontier = fresh if fresh.size else np.empty(0, np.int64)
        if frontier.size:
            levels.append(frontier)
        level += 1
    return dist, sigma, levels


def betweenness(indptr, indices, n):
    """Brandes betweenness, unnormalized, each unordered pair counted once."""
    bc = np.zeros(n)
    for s in range(n):
        dist, sigma, levels = _bfs_levels(indptr, indices, n, s)
        delta = np.zeros(n)
        for level in range(len(levels) - 1, 0, -1):
            frontier = levels[level]
            w, v = _expand(indptr, indices, frontier)
            if w.size:
                down = dist[v] == level - 1
                wv, vv = w[down], v[down]
                np.add.at(delta, vv, sigma[vv] / sigma[wv] * (1.0 + delta[wv]))
            bc[frontier] += delta[frontier]
    return bc * 0.5


def distance_stats(indptr, indices, component):
    """(diameter, ordered-pair distance sum, ordered-pair count) within one component."""
    n = indptr.shape[0] - 1
    diameter = 0
    total = 0.0
    pairs = 0
    for s in component:
        dist, _, _ = _bfs_levels(indptr, indices, n, int(s))
        reached = dist > 0
        if reached.any():
            dmax = int(dist[reached].max())
            diameter = max(diameter, dmax)
            total += float(dist[reached].sum())
            pairs += int(reached.sum())
    return diameter, total, pairs


def power_iteration(indptr, indices, n, tol, max_iter):
    """Leading eigenvector of A + I from a uniform start (see JIT twin)."""
    x = np.full(n, 1.0 / np.sqrt(n))
    all_nodes = np.arange(n, dtype=np.int64)
    u, v = _expand(indptr, indices, all_nodes)
    resid = 0.0
    for it in range(max_iter):
        y = x + np.bincount(u, weights=x[v], minlength=n) if u.size else x.copy()
        norm = np.sqrt((y * y).sum())
        if norm == 0.0:
            return y, it + 1, 0.0
        y = y / norm
        resid = float(np.abs(y - x).max())
        x = y
        if resid < tol:
            return x, it + 1, resid
    return x, -1, resid

"""Topology statistics, centralities, and the influence ranking.

Betweenness is unnormalized with each unordered pair counted once;
eigenvector centrality is rescaled so the maximum value is 1. The influence
score of a node is the mean of its fractional ranks (descending, ties
averaged) under degree, betweenness, and eigenvector centrality — lower means
more influential.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping

import numpy as np

from . import accel
from .errors import ConvergenceError
from .graph import MultilayerGraph, NodeRef, node_key

DEFAULT_EIGEN_TOL = 1e-8
DEFAULT_EIGEN_MAX_ITER = 1000
_ZERO_SNAP = 1e-12


@dataclass(frozen=True)
class TopologyStats:
    node_count: int
    edge_count: int
    density: float
    diameter: int
    avg_shortest_path: float
    avg_clustering: float
    degree_assortativity: float
    assortativity_defined: bool
    connected_components: int


@dataclass(frozen=True)
class InfluenceEntry:
    node: Hashable
    degree: int
    betweenness: float
    eigenvector: float
    rank_degree: float
    rank_betweenness: float
    rank_eigenvector: float
    influence: float


def _csr(g: MultilayerGraph) -> tuple[list[NodeRef], np.ndarray, np.ndarray]:
    nodes = g.nodes
    index = {n: i for i, n in enumerate(nodes)}
    adj: list[list[int]] = [[] for _ in nodes]
    for a, b, _, _ in g.edges():
        ia, ib = index[a], index[b]
        adj[ia].append(ib)
        adj[ib].append(ia)
    indptr = np.zeros(len(nodes) + 1, np.int64)
    for i, lst in enumerate(adj):
        indptr[i + 1] = indptr[i] + len(lst)
    indices = np.fromiter(
        (x for lst in adj for x in sorted(lst)), np.int64, count=int(indptr[-1])
    )
    return nodes, indptr, indices


def _components(indptr: np.ndarray, indices: np.ndarray, n: int) -> list[np.ndarray]:
    seen = np.zeros(n, bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for w in indices[indptr[v] : indptr[v + 1]]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        comps.append(np.array(sorted(members), np.int64))
    return comps


def topology(g: MultilayerGraph) -> TopologyStats:
    """Panel of basic topological properties.

    Diameter and average shortest path are computed on the largest connected
    component; clustering of degree<2 nodes counts as 0; assortativity is the
    Pearson correlation of endpoint degrees over edges, reported as 0 with
    assortativity_defined=False when degree variance vanishes.
    """
    nodes, indptr, indices = _csr(g)
    n = len(nodes)
    m = g.edge_count
    if n == 0:
        return TopologyStats(0, 0, 0.0, 0, 0.0, 0.0, 0.0, False, 0)

    density = (2.0 * m) / (n * (n - 1)) if n >= 2 else 0.0
    comps = _components(indptr, indices, n)
    lcc = max(comps, key=len)
    if len(lcc) >= 2:
        diameter, dist_sum, pair_count = accel.distance_stats(indptr, indices, lcc)
        avg_path = dist_sum / pair_count if pair_count else 0.0
    else:
        diameter, avg_path = 0, 0.0

    neighbor_sets = [set(indices[indptr[v] : indptr[v + 1]].tolist()) for v in range(n)]
    clustering_total = 0.0
    for v in range(n):
        nbrs = neighbor_sets[v]
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(len(neighbor_sets[w] & nbrs) for w in nbrs) // 2
        clustering_total += 2.0 * links / (k * (k - 1))
    avg_clustering = clustering_total / n

    deg = np.diff(indptr).astype(np.float64)
    if m > 0:
        du = deg[indices]  # degree of the far endpoint of each directed edge
        dv = np.repeat(deg, np.diff(indptr).astype(np.int64))
        if du.std() > 0 and dv.std() > 0:
            r = float(np.corrcoef(du, dv)[0, 1])
            assortativity, defined = r, True
        else:
            assortativity, defined = 0.0, False
    else:
        assortativity, defined = 0.0, False

    return TopologyStats(
        node_count=n,
        edge_count=m,
        density=density,
        diameter=int(diameter),
        avg_shortest_path=float(avg_path),
        avg_clustering=float(avg_clustering),
        degree_assortativity=assortativity,
        assortativity_defined=defined,
        connected_components=len(comps),
    )


def betweenness(g: MultilayerGraph) -> dict[NodeRef, float]:
    """Shortest-path betweenness per node (unweighted, pair counted once)."""
    nodes, indptr, indices = _csr(g)
    if not nodes:
        return {}
    values = accel.betweenness(indptr, indices, len(nodes))
    return {node: float(v) for node, v in zip(nodes, values)}


def eigenvector_centrality(
    g: MultilayerGraph,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_EIGEN_MAX_ITER,
) -> dict[NodeRef, float]:
    """Power-iteration eigenvector centrality, rescaled so the maximum is 1.

    On disconnected graphs the spectrally dominant component wins; nodes of
    other components report ~0 (values below 1e-12 are snapped to 0). A graph
    with no edges reports all zeros.
    """
    nodes, indptr, indices = _csr(g)
    n = len(nodes)
    if n == 0:
        return {}
    if g.edge_count == 0:
        return {node: 0.0 for node in nodes}
    x, iterations, residual = accel.power_iteration(indptr, indices, n, tol, max_iter)
    if iterations < 0:
        raise ConvergenceError(
            f"eigenvector power iteration did not converge within {max_iter} iterations",
            residual=float(residual),
        )
    # A zero adjacency row has an exactly-zero entry in the leading
    # eigenvector (for lambda > 0); the identity shift hides that, so restore
    # it for isolated nodes.
    degrees = np.diff(indptr)
    x = np.where(degrees == 0, 0.0, x)
    peak = float(x.max())
    scaled = x / peak if peak > 0 else x
    return {
        node: (0.0 if v < _ZERO_SNAP else float(v)) for node, v in zip(nodes, scaled)
    }


def fractional_ranks(values: Mapping[Hashable, float]) -> dict[Hashable, float]:
    """Descending ranks with ties averaged (1 = best)."""
    ordered = sorted(values.items(), key=lambda kv: -kv[1])
    ranks: dict[Hashable, float] = {}
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and ordered[j + 1][1] == ordered[i][1]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[ordered[k][0]] = avg
        i = j + 1
    return ranks


def influence_from_metrics(
    degree: Mapping[Hashable, float],
    betweenness_values: Mapping[Hashable, float],
    eigenvector: Mapping[Hashable, float],
) -> list[InfluenceEntry]:
    """Rank each metric descending and average the three ranks per node.

    Accepts any consistent node keys, so precomputed metric columns can be
    ranked directly. Output is sorted by influence ascending, ties by node.
    """
    keys = set(degree) | set(betweenness_values) | set(eigenvector)
    missing = [k for k in keys if k not in degree or k not in betweenness_values or k not in eigenvector]
    if missing:
        raise ValueError(f"nodes missing a metric: {sorted(map(str, missing))[:5]}")
    r_deg = fractional_ranks(degree)
    r_btw = fractional_ranks(betweenness_values)
    r_eig = fractional_ranks(eigenvector)
    entries = [
        InfluenceEntry(
            node=node,
            degree=int(degree[node]),
            betweenness=float(betweenness_values[node]),
            eigenvector=float(eigenvector[node]),
            rank_degree=r_deg[node],
            rank_betweenness=r_btw[node],
            rank_eigenvector=r_eig[node],
            influence=(r_deg[node] + r_btw[node] + r_eig[node]) / 3.0,
        )
        for node in keys
    ]

    def sort_node_key(e: InfluenceEntry):
        return node_key(e.node) if isinstance(e.node, NodeRef) else (str(e.node),)

    entries.sort(key=lambda e: (e.influence, sort_node_key(e)))
    return entries


def influence_scores(
    g: MultilayerGraph,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_EIGEN_MAX_ITER,
) -> list[InfluenceEntry]:
    """Degree/betweenness/eigenvector ranks and their mean for every node."""
    if g.node_count == 0:
        raise ValueError("influence_scores requires a non-empty graph")
    deg = g.degree()
    btw = betweenness(g)
    eig = eigenvector_centrality(g, tol=tol, max_iter=max_iter)
    return influence_from_metrics(deg, btw, eig)

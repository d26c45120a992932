"""Louvain community detection and modularity reporting.

The multilayer graph is treated as a flat unweighted graph: inter-layer
edges count like any other. Runs are deterministic per seed; tie moves
resolve to the lowest community id.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .graph import MultilayerGraph, NodeRef, node_key


@dataclass(frozen=True)
class Partition:
    assignment: dict[NodeRef, int]
    modularity: float

    @property
    def community_count(self) -> int:
        return len(set(self.assignment.values())) if self.assignment else 0


def modularity(
    g: MultilayerGraph, assignment: Mapping[NodeRef, int], resolution: float = 1.0
) -> float:
    """Girvan-Newman modularity: sum_c [e_c/m - resolution*(d_c/2m)^2]."""
    m = g.edge_count
    if m == 0:
        return 0.0
    degree = g.degree()
    intra: dict[int, int] = {}
    comm_degree: dict[int, int] = {}
    for node, deg in degree.items():
        c = assignment[node]
        comm_degree[c] = comm_degree.get(c, 0) + deg
    for a, b, _, _ in g.edges():
        if assignment[a] == assignment[b]:
            c = assignment[a]
            intra[c] = intra.get(c, 0) + 1
    q = 0.0
    for c, d_c in comm_degree.items():
        q += intra.get(c, 0) / m - resolution * (d_c / (2.0 * m)) ** 2
    return q


def _one_level(
    adj: list[dict[int, float]],
    self_loops: list[float],
    two_m: float,
    resolution: float,
    rng: random.Random,
) -> list[int]:
    """Local-move phase: greedy modularity ascent until no move improves."""
    n = len(adj)
    community = list(range(n))
    strength = [sum(adj[v].values()) + 2.0 * self_loops[v] for v in range(n)]
    comm_total = strength.copy()

    order = list(range(n))
    rng.shuffle(order)
    improved = True
    while improved:
        improved = False
        for v in order:
            old = community[v]
            k_v = strength[v]
            # weights from v toward each neighboring community (v excluded)
            links: dict[int, float] = {}
            for w, wt in adj[v].items():
                if w != v:
                    links[community[w]] = links.get(community[w], 0.0) + wt
            comm_total[old] -= k_v
            community[v] = -1
            best_c = old
            best_gain = links.get(old, 0.0) - resolution * comm_total[old] * k_v / two_m
            for c in sorted(links):
                gain = links[c] - resolution * comm_total[c] * k_v / two_m
                if gain > best_gain or (gain == best_gain and c < best_c):
                    best_c, best_gain = c, gain
            community[v] = best_c
            comm_total[best_c] += k_v
            if best_c != old:
                improved = True
    return community


def _aggregate(
    adj: list[dict[int, float]],
    self_loops: list[float],
    community: list[int],
) -> tuple[list[dict[int, float]], list[float], dict[int, int]]:
    remap: dict[int, int] = {}
    for v in range(len(adj)):
        remap.setdefault(community[v], len(remap))
    k = len(remap)
    new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
    new_loops = [0.0] * k
    for v in range(len(adj)):
        cv = remap[community[v]]
        new_loops[cv] += self_loops[v]
        for w, wt in adj[v].items():
            cw = remap[community[w]]
            if cv == cw:
                if v < w:
                    new_loops[cv] += wt
            else:
                new_adj[cv][cw] = new_adj[cv].get(cw, 0.0) + wt
    return new_adj, new_loops, remap


def louvain(g: MultilayerGraph, resolution: float = 1.0, seed: int = 0) -> Partition:
    """Two-phase Louvain on the flat graph. Same seed, same partition.

    An edgeless graph yields singleton communities with modularity 0 by
    convention.
    """
    nodes = sorted(g.nodes, key=node_key)
    index = {n: i for i, n in enumerate(nodes)}
    if not nodes:
        return Partition(assignment={}, modularity=0.0)
    if g.edge_count == 0:
        return Partition(assignment={n: i for i, n in enumerate(nodes)}, modularity=0.0)

    adj: list[dict[int, float]] = [dict() for _ in nodes]
    for a, b, _, _ in g.edges():
        ia, ib = index[a], index[b]
        adj[ia][ib] = adj[ia].get(ib, 0.0) + 1.0
        adj[ib][ia] = adj[ib].get(ia, 0.0) + 1.0
    self_loops = [0.0] * len(nodes)
    two_m = 2.0 * g.edge_count

    rng = random.Random(seed)
    node_to_comm = list(range(len(nodes)))  # membership in the original graph
    while True:
        community = _one_level(adj, self_loops, two_m, resolution, rng)
        new_adj, new_loops, remap = _aggregate(adj, self_loops, community)
        node_to_comm = [remap[community[c]] for c in node_to_comm]
        if len(new_adj) == len(adj):
            break
        adj, self_loops = new_adj, new_loops

    # dense ids in first-appearance order over canonical node order
    dense: dict[int, int] = {}
    assignment: dict[NodeRef, int] = {}
    for node in nodes:
        c = node_to_comm[index[node]]
        dense.setdefault(c, len(dense))
        assignment[node] = dense[c]
    return Partition(assignment=assignment, modularity=modularity(g, assignment, resolution))


def community_report(g: MultilayerGraph, partition: Partition) -> dict:
    """Community count, sizes, and per-layer composition."""
    comms: dict[int, list[NodeRef]] = {}
    for node, c in partition.assignment.items():
        comms.setdefault(c, []).append(node)
    communities = []
    for c in sorted(comms):
        members = sorted(comms[c], key=node_key)
        layers: dict[str, int] = {}
        for n in members:
            layers[n.layer.value] = layers.get(n.layer.value, 0) + 1
        communities.append({"id": c, "size": len(members), "layers": layers})
    return {
        "modularity": partition.modularity,
        "community_count": len(comms),
        "communities": communities,
    }

import itertools

import pytest

from movielayers.communities import community_report, louvain, modularity
from movielayers.graph import LayerKind, MultilayerGraph, NodeRef

from conftest import graph_from_edges, load_karate

TRIANGLES = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]


def exhaustive_best_modularity(edges, n):
    """Oracle: best modularity over every partition of up to n=7 nodes."""

    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for smaller in partitions(rest):
            for i, block in enumerate(smaller):
                yield smaller[:i] + [block + [first]] + smaller[i + 1 :]
            yield [[first]] + smaller

    g = graph_from_edges(edges, n=n)
    best = float("-inf")
    for part in partitions(list(range(n))):
        assignment = {}
        for cid, block in enumerate(part):
            for v in block:
                assignment[NodeRef(LayerKind.CHARACTER, str(v))] = cid
        best = max(best, modularity(g, assignment))
    return best


class TestModularity:
    def test_two_triangles_split_is_half(self):
        g = graph_from_edges(TRIANGLES)
        assignment = {n: (0 if int(n.id) < 3 else 1) for n in g.nodes}
        assert modularity(g, assignment) == pytest.approx(0.5)

    def test_all_in_one_is_zero(self):
        g = graph_from_edges(TRIANGLES)
        assignment = {n: 0 for n in g.nodes}
        assert modularity(g, assignment) == pytest.approx(0.0, abs=1e-15)

    def test_singletons_nonpositive(self):
        g = graph_from_edges(TRIANGLES)
        assignment = {n: i for i, n in enumerate(g.nodes)}
        assert modularity(g, assignment) <= 0.0

    def test_empty_graph_convention(self):
        assert modularity(MultilayerGraph(), {}) == 0.0


class TestLouvain:
    def test_two_triangles_exact(self):
        g = graph_from_edges(TRIANGLES)
        part = louvain(g, seed=0)
        assert part.community_count == 2
        assert part.modularity == pytest.approx(0.5)
        left = {part.assignment[NodeRef(LayerKind.CHARACTER, str(v))] for v in (0, 1, 2)}
        right = {part.assignment[NodeRef(LayerKind.CHARACTER, str(v))] for v in (3, 4, 5)}
        assert len(left) == 1 and len(right) == 1 and left != right

    def test_matches_exhaustive_oracle_on_small_graphs(self):
        import random

        rng = random.Random(31)
        for _ in range(6):
            n = rng.randint(3, 7)
            edges = [
                (a, b)
                for a, b in itertools.combinations(range(n), 2)
                if rng.random() < 0.5
            ]
            if not edges:
                continue
            g = graph_from_edges(edges, n=n)
            best = exhaustive_best_modularity(edges, n)
            part = louvain(g, seed=0)
            assert part.modularity <= best + 1e-12
            # greedy local optimum should land close to the true optimum here
            assert part.modularity >= best - 0.11

    def test_complete_graph_single_community(self):
        g = graph_from_edges(list(itertools.combinations(range(5), 2)))
        part = louvain(g, seed=0)
        assert part.community_count == 1

    def test_edgeless_graph_singletons(self):
        g = graph_from_edges([], n=4)
        part = louvain(g, seed=0)
        assert part.modularity == 0.0
        assert part.community_count == 4

    def test_returned_modularity_matches_recompute(self):
        g = load_karate()
        part = louvain(g, seed=0)
        assert part.modularity == pytest.approx(modularity(g, part.assignment), abs=1e-12)

    def test_karate_quality(self):
        part = louvain(load_karate(), seed=0)
        assert part.modularity >= 0.40

    def test_determinism(self):
        g = load_karate()
        a = louvain(g, seed=42)
        b = louvain(g, seed=42)
        assert a.assignment == b.assignment
        assert a.modularity == b.modularity

    def test_improves_on_singletons(self):
        g = load_karate()
        part = louvain(g, seed=1)
        singles = {n: i for i, n in enumerate(g.nodes)}
        assert part.modularity >= modularity(g, singles)
        assert part.modularity >= 0.0

    def test_resolution_changes_granularity(self):
        g = load_karate()
        coarse = louvain(g, resolution=0.5, seed=0)
        fine = louvain(g, resolution=2.0, seed=0)
        assert coarse.community_count <= fine.community_count

    def test_community_ids_dense(self):
        part = louvain(load_karate(), seed=3)
        ids = sorted(set(part.assignment.values()))
        assert ids == list(range(len(ids)))


class TestReport:
    def test_single_layer_composition(self):
        g = graph_from_edges(TRIANGLES)
        part = louvain(g, seed=0)
        report = community_report(g, part)
        assert report["community_count"] == 2
        for comm in report["communities"]:
            assert comm["layers"] == {"C": comm["size"]}

    def test_multilayer_composition(self):
        g = MultilayerGraph()
        a = g.add_node(LayerKind.CHARACTER, "A")
        f = g.add_node(LayerKind.FACE, "A")
        g.add_edge(a, f)
        part = louvain(g, seed=0)
        report = community_report(g, part)
        total = {}
        for comm in report["communities"]:
            for layer, count in comm["layers"].items():
                total[layer] = total.get(layer, 0) + count
        assert total == {"C": 1, "F": 1}

    def test_empty_graph_report(self):
        g = MultilayerGraph()
        part = louvain(g, seed=0)
        report = community_report(g, part)
        assert report["communities"] == []
        assert report["modularity"] == 0.0

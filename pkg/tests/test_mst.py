from __future__ import annotations

import itertools
import math
import random

import numpy as np
import pytest

from anitree import (
    CatalogError,
    DisjointSet,
    NotConnectedError,
    SpanningTree,
    WeightedEdge,
    kruskal,
    kruskal_pairs,
    pair_count,
    pair_index,
)

from oracles import LabelPropagation, min_spanning_total


class TestDisjointSet:
    def test_fresh_sets_are_distinct(self):
        ds = DisjointSet()
        ds.make_set(0)
        ds.make_set(1)
        assert ds.find_set(0) != ds.find_set(1)
        assert ds.n_components == 2

    def test_union_merges(self):
        ds = DisjointSet([0, 1])
        assert ds.union(0, 1)
        assert ds.find_set(0) == ds.find_set(1)
        assert not ds.union(0, 1)
        assert ds.n_components == 1

    def test_unregistered_vertex_is_contract_violation(self):
        ds = DisjointSet([0])
        with pytest.raises(KeyError, match="never registered"):
            ds.find_set(7)

    def test_find_idempotent(self):
        ds = DisjointSet(range(10))
        for u, v in [(0, 1), (1, 2), (5, 6)]:
            ds.union(u, v)
        for v in range(10):
            assert ds.find_set(v) == ds.find_set(ds.find_set(v))

    def test_thousand_random_unions_match_naive_oracle(self):
        n = 200
        rng = random.Random(42)
        ds = DisjointSet(range(n))
        naive = LabelPropagation(n)
        for _ in range(1000):
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v:
                continue
            assert ds.union(u, v) == naive.union(u, v)
            probe_a, probe_b = rng.randrange(n), rng.randrange(n)
            assert (ds.find_set(probe_a) == ds.find_set(probe_b)) == naive.same(
                probe_a, probe_b
            )


class TestWeightedEdge:
    def test_orients_endpoints(self):
        edge = WeightedEdge(5, 2, 1.5)
        assert (edge.u, edge.v, edge.w) == (2, 5, 1.5)

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            WeightedEdge(3, 3, 0.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            WeightedEdge(0, 1, math.inf)


class TestKruskal:
    def test_k3_forced_minimum(self):
        tree = kruskal(3, [(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0)])
        assert {(e.u, e.v) for e in tree.edges()} == {(0, 1), (0, 2)}
        assert tree.total_weight == 3.0

    def test_k2_identity(self):
        tree = kruskal(2, [(0, 1, 0.25)])
        assert list(tree.edges()) == [WeightedEdge(0, 1, 0.25)]
        assert tree.total_weight == 0.25

    @pytest.mark.parametrize("trial", range(30))
    def test_random_complete_graphs_match_enumeration(self, trial):
        rng = random.Random(1000 + trial)
        k = rng.randint(4, 7)
        weight = {
            (i, j): rng.random() for i, j in itertools.combinations(range(k), 2)
        }
        tree = kruskal(k, [(u, v, w) for (u, v), w in weight.items()])
        assert tree.total_weight == min_spanning_total(k, weight)

    def test_deterministic_under_stream_order(self):
        # coarse weights force plenty of ties; output must not care
        rng = random.Random(7)
        k = 12
        edges = [
            (i, j, rng.choice([0.25, 0.5, 0.75]))
            for i, j in itertools.combinations(range(k), 2)
        ]
        reference = kruskal(k, edges)
        for _ in range(10):
            rng.shuffle(edges)
            assert kruskal(k, edges) == reference

    def test_disconnected_names_component_count(self):
        # 6 vertices, edges only inside {0,1,2} and {3,4}; vertex 5 isolated
        edges = [(0, 1, 0.1), (1, 2, 0.2), (3, 4, 0.3)]
        with pytest.raises(NotConnectedError, match="3 components"):
            kruskal(6, edges)

    def test_cut_property_spot_check(self):
        rng = random.Random(21)
        for _ in range(20):
            k = rng.randint(4, 8)
            weight = {
                (i, j): rng.random() for i, j in itertools.combinations(range(k), 2)
            }
            tree = kruskal(k, [(u, v, w) for (u, v), w in weight.items()])
            for e in tree.edges():
                # remove the edge; find the two sides
                ds = DisjointSet(range(k))
                for other in tree.edges():
                    if other != e:
                        ds.union(other.u, other.v)
                side = {v for v in range(k) if ds.find_set(v) == ds.find_set(e.u)}
                crossing = [
                    w
                    for (i, j), w in weight.items()
                    if (i in side) != (j in side)
                ]
                assert e.w == min(crossing)

    def test_vertex_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            kruskal(3, [(0, 5, 1.0)])


class TestKruskalPairs:
    @pytest.mark.parametrize("k,seed", [(2, 0), (5, 1), (17, 2), (40, 3)])
    def test_matches_generic_route(self, k, seed):
        rng = random.Random(seed)
        delta = np.array([rng.random() for _ in range(pair_count(k))])
        fast = kruskal_pairs(k, delta)
        slow = kruskal(
            k,
            [
                (i, j, float(delta[pair_index(i, j, k)]))
                for i, j in itertools.combinations(range(k), 2)
            ],
        )
        assert fast == slow

    def test_tie_break_matches_generic(self):
        rng = random.Random(9)
        k = 15
        delta = np.array([rng.choice([0.2, 0.4]) for _ in range(pair_count(k))])
        fast = kruskal_pairs(k, delta)
        slow = kruskal(
            k,
            [
                (i, j, float(delta[pair_index(i, j, k)]))
                for i, j in itertools.combinations(range(k), 2)
            ],
        )
        assert fast == slow

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError, match="expected"):
            kruskal_pairs(4, np.zeros(5))


class TestSpanningTree:
    def test_requires_exact_edge_count(self):
        with pytest.raises(ValueError, match="expected 2 edges"):
            SpanningTree(3, [0], [1], [0.5])

    def test_rejects_cycle(self):
        with pytest.raises(ValueError, match="cycle"):
            SpanningTree.from_edges(4, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])

    def test_adjacency_is_sorted_and_weighted(self):
        tree = SpanningTree.from_edges(4, [(2, 0, 0.3), (0, 1, 0.1), (0, 3, 0.2)])
        nbrs, weights = tree.neighbors(0)
        assert nbrs.tolist() == [1, 2, 3]
        assert weights.tolist() == [0.1, 0.3, 0.2]
        assert tree.degrees().tolist() == [3, 1, 1, 1]
        assert tree.degree(0) == 3

    def test_total_weight_is_exact_sum(self):
        rng = random.Random(3)
        weights = [rng.random() for _ in range(9)]
        edges = [(i, i + 1, w) for i, w in enumerate(weights)]
        tree = SpanningTree.from_edges(10, edges)
        assert tree.total_weight == math.fsum(weights)

    def test_save_load_round_trip(self, tmp_path):
        rng = random.Random(5)
        edges = [(i, i + 1, rng.random()) for i in range(9)]
        tree = SpanningTree.from_edges(10, edges)
        path = tmp_path / "tree.bin"
        tree.save(path)
        assert SpanningTree.load(path) == tree

    def test_save_is_deterministic(self, tmp_path):
        edges = [(0, 1, 0.5), (1, 2, 0.25)]
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        SpanningTree.from_edges(3, edges).save(a)
        SpanningTree.from_edges(3, list(reversed(edges))).save(b)
        assert a.read_bytes() == b.read_bytes()

    def test_load_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "x.bin"
        path.write_bytes(b"JUNK" + bytes(16))
        with pytest.raises(CatalogError, match="not a spanning tree"):
            SpanningTree.load(path)

    def test_load_rejects_bad_version(self, tmp_path):
        path = tmp_path / "x.bin"
        tree = SpanningTree.from_edges(2, [(0, 1, 1.0)])
        tree.save(path)
        data = bytearray(path.read_bytes())
        data[4] = 9
        path.write_bytes(bytes(data))
        with pytest.raises(CatalogError, match="version"):
            SpanningTree.load(path)

    def test_load_rejects_truncation(self, tmp_path):
        path = tmp_path / "x.bin"
        SpanningTree.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).save(path)
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CatalogError):
            SpanningTree.load(path)

"""Oracle, sampling, noise, and triplet file format tests."""

import numpy as np
import pytest

from ordemb.datasets import RelationGraph, gen_blobs, gen_hierarchy
from ordemb.exceptions import DataError
from ordemb.triplets import (
    SamplingConfig,
    apply_noise,
    budget_from_rule,
    load_triplets,
    make_graph_oracle,
    make_point_oracle,
    oracle_from_graph,
    oracle_from_points,
    sample_graph_hop,
    sample_uniform,
    save_triplets,
    split_train_test,
)


def path_graph(n):
    kinds = ["item"] * n
    return RelationGraph(n_nodes=n, edges=[(v, v + 1) for v in range(n - 1)], kinds=kinds)


class TestPointOracle:
    def test_closer_first(self):
        pts = np.array([[0.0], [1.0], [3.0]])
        assert oracle_from_points(pts, (0, 1, 2)) == 1

    def test_farther_first(self):
        pts = np.array([[0.0], [3.0], [1.0]])
        assert oracle_from_points(pts, (0, 1, 2)) == -1

    def test_tie_j_wins(self):
        pts = np.array([[0.0], [2.0], [-2.0]])
        assert oracle_from_points(pts, (0, 1, 2)) == 1

    def test_duplicate_indices_rejected(self):
        pts = np.zeros((4, 2))
        with pytest.raises(ValueError):
            oracle_from_points(pts, (0, 0, 1))

    def test_antisymmetry_without_ties(self):
        rng = np.random.default_rng(20)
        pts = rng.normal(size=(12, 3))
        for _ in range(200):
            i, j, k = rng.choice(12, size=3, replace=False)
            assert oracle_from_points(pts, (i, j, k)) == -oracle_from_points(
                pts, (i, k, j)
            )

    def test_fast_oracle_agrees(self):
        rng = np.random.default_rng(21)
        pts = rng.normal(size=(15, 2))
        fast = make_point_oracle(pts)
        for _ in range(300):
            i, j, k = rng.choice(15, size=3, replace=False)
            assert fast((i, j, k)) == oracle_from_points(pts, (i, j, k))


class TestGraphOracle:
    def test_path_graph(self):
        # a-b-c-d: 1 hop beats 3 hops.
        graph = path_graph(4)
        assert oracle_from_graph(graph, (0, 1, 3)) == 1

    def test_star_tie_j_wins(self):
        # center 0, leaves 1..3: leaves sit 2 hops from each other.
        graph = RelationGraph(4, edges=[(0, 1), (0, 2), (0, 3)], kinds=["item"] * 4)
        assert oracle_from_graph(graph, (1, 2, 3)) == 1

    def test_hierarchy_fine_beats_other_super(self):
        graph = gen_hierarchy(items_per_fine=1, fines_per_super=2, supers=2)
        own_fine = 4 + 0
        other_super = 4 + 4 + 1
        assert oracle_from_graph(graph, (0, own_fine, other_super)) == 1

    def test_unreachable_rejected(self):
        graph = RelationGraph(4, edges=[(0, 1), (2, 3)], kinds=["item"] * 4)
        with pytest.raises(ValueError):
            oracle_from_graph(graph, (0, 1, 3))

    def test_fast_oracle_agrees(self):
        graph = gen_hierarchy(items_per_fine=2, fines_per_super=3, supers=2)
        fast = make_graph_oracle(graph)
        rng = np.random.default_rng(22)
        for _ in range(200):
            i, j, k = rng.choice(graph.n_nodes, size=3, replace=False)
            assert fast((i, j, k)) == oracle_from_graph(graph, (i, j, k))


class TestBudgetRule:
    def test_reference_values(self):
        assert budget_from_rule(1000, 2, 1) == 27632
        assert budget_from_rule(3, 1, 1) == 4
        assert budget_from_rule(100, 2, 0.5) == 922

    def test_acceptance_scale(self):
        assert budget_from_rule(500, 2, 4) == 49717

    def test_preconditions(self):
        with pytest.raises(ValueError):
            budget_from_rule(2, 2, 1)
        with pytest.raises(ValueError):
            budget_from_rule(10, 0, 1)
        with pytest.raises(ValueError):
            budget_from_rule(10, 2, 0)


class TestSampleUniform:
    def test_three_items(self):
        pts = np.array([[0.0], [1.0], [5.0]])
        arr = sample_uniform(3, 5, make_point_oracle(pts), seed=1)
        assert arr.shape == (5, 4)
        for row in arr:
            assert sorted(row[:3]) == [0, 1, 2]

    def test_budget_from_rule_scale(self):
        pts = gen_blobs(50, seed=0)
        budget = budget_from_rule(50, 2, 1)
        arr = sample_uniform(50, budget, make_point_oracle(pts), seed=2)
        assert arr.shape[0] == budget

    def test_deterministic(self):
        pts = gen_blobs(30, seed=0)
        oracle = make_point_oracle(pts)
        a = sample_uniform(30, 100, oracle, seed=3)
        b = sample_uniform(30, 100, oracle, seed=3)
        np.testing.assert_array_equal(a, b)

    def test_labels_consistent_with_distances(self):
        ds = gen_blobs(40, seed=1)
        arr = sample_uniform(40, 500, make_point_oracle(ds), seed=4)
        diff = np.sum((ds.points[arr[:, 0]] - ds.points[arr[:, 1]]) ** 2, axis=1) - np.sum(
            (ds.points[arr[:, 0]] - ds.points[arr[:, 2]]) ** 2, axis=1
        )
        assert np.all(arr[:, 3] * np.sign(diff) == -1)

    def test_too_few_items(self):
        with pytest.raises(ValueError):
            sample_uniform(2, 5, lambda t: 1, seed=0)


class TestSampleGraphHop:
    def test_three_node_path(self):
        graph = path_graph(3)
        arr = sample_graph_hop(graph, 10, seed=5)
        hops = {0: {1: 1, 2: 2}, 2: {1: 1, 0: 2}}
        for i, j, k, y in arr:
            assert y == 1
            assert i in hops
            assert hops[i][j] < hops[i][k]

    def test_construction_invariant_on_hierarchy(self):
        from ordemb.triplets import graph_hop_distances

        graph = gen_hierarchy(items_per_fine=2, fines_per_super=2, supers=3)
        hops = graph_hop_distances(graph)
        arr = sample_graph_hop(graph, 400, seed=6)
        assert np.all(arr[:, 3] == 1)
        assert np.all(hops[arr[:, 0], arr[:, 1]] < hops[arr[:, 0], arr[:, 2]])

    def test_deterministic(self):
        graph = gen_hierarchy()
        a = sample_graph_hop(graph, 50, seed=7)
        b = sample_graph_hop(graph, 50, seed=7)
        np.testing.assert_array_equal(a, b)

    def test_single_ring_graph_rejected(self):
        # Complete graph: every anchor sees exactly one hop ring.
        edges = [(a, b) for a in range(4) for b in range(a + 1, 4)]
        graph = RelationGraph(4, edges=edges, kinds=["item"] * 4)
        with pytest.raises(ValueError):
            sample_graph_hop(graph, 5, seed=8)


class TestApplyNoise:
    def test_zero_rate_identity(self):
        arr = np.array([[0, 1, 2, 1], [1, 2, 3, -1]])
        np.testing.assert_array_equal(apply_noise(arr, 0.0, seed=1), arr)

    def test_full_rate_negates(self):
        arr = np.array([[0, 1, 2, 1], [1, 2, 3, -1]])
        out = apply_noise(arr, 1.0, seed=1)
        np.testing.assert_array_equal(out[:, 3], -arr[:, 3])
        np.testing.assert_array_equal(out[:, :3], arr[:, :3])

    def test_half_rate_concentration(self):
        rng = np.random.default_rng(23)
        idx = np.array([rng.choice(50, size=3, replace=False) for _ in range(10000)])
        arr = np.column_stack([idx, np.ones(10000, dtype=np.int64)])
        out = apply_noise(arr, 0.5, seed=9)
        flipped = np.mean(out[:, 3] != arr[:, 3])
        assert 0.47 <= flipped <= 0.53

    def test_order_preserved(self):
        arr = np.array([[0, 1, 2, 1], [3, 4, 5, 1], [6, 7, 8, -1]])
        out = apply_noise(arr, 0.3, seed=10)
        np.testing.assert_array_equal(out[:, :3], arr[:, :3])


class TestSplit:
    def test_ninety_ten(self):
        arr = np.array([[0, 1, 2, 1]] * 100)
        train, test = split_train_test(arr)
        assert train.shape[0] == 90
        assert test.shape[0] == 10

    def test_partitions_everything(self):
        rng = np.random.default_rng(24)
        idx = np.array([rng.choice(9, size=3, replace=False) for _ in range(37)])
        arr = np.column_stack([idx, np.ones(37, dtype=np.int64)])
        train, test = split_train_test(arr)
        np.testing.assert_array_equal(np.vstack([train, test]), arr)


class TestTripletIO:
    def test_round_trip(self, tmp_path):
        ds = gen_blobs(20, seed=2)
        arr = sample_uniform(20, 64, make_point_oracle(ds), seed=11)
        path = tmp_path / "t.csv"
        save_triplets(path, arr)
        np.testing.assert_array_equal(load_triplets(path), arr)

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# header comment\n0,1,2,1\n# mid comment\n2,0,1,-1\n")
        arr = load_triplets(path)
        np.testing.assert_array_equal(arr, [[0, 1, 2, 1], [2, 0, 1, -1]])

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("0,1,2,1\n0,1,2\n")
        with pytest.raises(DataError, match=":2"):
            load_triplets(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("0,1,2,5\n")
        with pytest.raises(DataError):
            load_triplets(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# nothing\n")
        with pytest.raises(DataError):
            load_triplets(path)


class TestSamplingConfig:
    def test_valid(self):
        cfg = SamplingConfig(budget_multiplier=2.0, noise_rate=0.1)
        assert cfg.strategy == "uniform"

    def test_invalid_noise(self):
        with pytest.raises(ValueError):
            SamplingConfig(noise_rate=1.5)

    def test_invalid_multiplier(self):
        with pytest.raises(ValueError):
            SamplingConfig(budget_multiplier=0.0)

    def test_invalid_strategy(self):
        with pytest.raises(ValueError):
            SamplingConfig(strategy="adaptive")

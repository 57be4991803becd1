"""Graph construction and metrics against brute-force oracles."""

import numpy as np
import pytest

import graph_oracles as oracle
from dyadbci import brain_network as bn
from dyadbci import stats
from dyadbci.errors import DisconnectedGraphError, NoThresholdError, PairingError


def graph_from_edges(n, edges, labels=()):
    adj = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        adj[a, b] = adj[b, a] = True
    return bn.BinaryGraph(adjacency=adj, labels=labels)


def random_connected_graph(rng, n):
    while True:
        p = rng.uniform(0.3, 0.9)
        adj = rng.random((n, n)) < p
        adj = np.triu(adj, k=1)
        adj = adj | adj.T
        g = bn.BinaryGraph(adjacency=adj)
        if bn.is_connected(g) and len(g.edges()) >= 1:
            return g


def random_weights(rng, n):
    w = np.round(rng.uniform(0, 1, size=(n, n)), 3)
    w = np.triu(w, k=1)
    w = w + w.T
    return bn.ConnectivityMatrix(weights=w, labels=tuple(str(i) for i in range(n)))


class TestValidation:
    def test_connectivity_matrix_guards(self):
        with pytest.raises(ValueError):
            bn.ConnectivityMatrix(np.zeros((2, 3)), labels=("a", "b"))
        asym = np.array([[0.0, 0.5], [0.4, 0.0]])
        with pytest.raises(ValueError):
            bn.ConnectivityMatrix(asym, labels=("a", "b"))
        diag = np.array([[0.1, 0.5], [0.5, 0.0]])
        with pytest.raises(ValueError):
            bn.ConnectivityMatrix(diag, labels=("a", "b"))
        toobig = np.array([[0.0, 1.5], [1.5, 0.0]])
        with pytest.raises(ValueError):
            bn.ConnectivityMatrix(toobig, labels=("a", "b"))

    def test_binary_graph_guards(self):
        with pytest.raises(ValueError):
            bn.BinaryGraph(np.array([[True, True], [False, False]]))
        with pytest.raises(ValueError):
            bn.BinaryGraph(np.array([[True]]))

    def test_default_labels(self):
        g = graph_from_edges(3, [(0, 1)])
        assert g.labels == ("0", "1", "2")


class TestThresholding:
    def test_strictly_greater(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 0.31
        w[1, 2] = w[2, 1] = 0.3
        w[0, 2] = w[2, 0] = 0.29
        m = bn.ConnectivityMatrix(w, labels=("a", "b", "c"))
        g = bn.threshold_graph(m, tau=0.3)
        assert g.edges() == [(0, 1)]

    def test_max_connected_threshold_hand_case(self):
        # max spanning tree uses 0.9 and 0.5; the bottleneck is 0.5
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 0.9
        w[1, 2] = w[2, 1] = 0.5
        w[0, 2] = w[2, 0] = 0.2
        m = bn.ConnectivityMatrix(w, labels=("a", "b", "c"))
        tau = bn.max_connected_threshold(m)
        assert tau == np.nextafter(0.5, -np.inf)
        assert bn.is_connected(bn.threshold_graph(m, tau))
        assert not bn.is_connected(bn.threshold_graph(m, 0.5))

    def test_max_connected_threshold_against_scan(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            m = random_weights(rng, 8)
            expected = oracle.scan_max_connected_threshold(m.weights)
            if expected is None:
                with pytest.raises(NoThresholdError):
                    bn.max_connected_threshold(m)
                continue
            tau = bn.max_connected_threshold(m)
            assert tau == expected
            assert bn.is_connected(bn.threshold_graph(m, tau))

    def test_disconnected_positive_graph(self):
        w = np.zeros((4, 4))
        w[0, 1] = w[1, 0] = 0.8
        w[2, 3] = w[3, 2] = 0.7
        m = bn.ConnectivityMatrix(w, labels=tuple("abcd"))
        with pytest.raises(NoThresholdError):
            bn.max_connected_threshold(m)


class TestAnalyticCases:
    def test_complete_graph(self):
        g = graph_from_edges(8, [(i, j) for i in range(8) for j in range(i + 1, 8)])
        assert bn.characteristic_path_length(g) == 1.0
        assert bn.clustering_coefficient(g) == 1.0
        assert np.all(bn.betweenness_centrality(g) == 0.0)
        assert np.all(bn.degree_centrality(g) == 7)

    def test_star_graph(self):
        g = graph_from_edges(8, [(0, i) for i in range(1, 8)])
        # 7 center-leaf pairs at distance 1, 21 leaf pairs at distance 2
        assert bn.characteristic_path_length(g) == pytest.approx(49 / 28)
        assert bn.clustering_coefficient(g) == 0.0
        bc = bn.betweenness_centrality(g)
        assert bc[0] == pytest.approx(21.0)
        assert np.all(bc[1:] == 0.0)

    def test_path_graph(self):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        assert bn.characteristic_path_length(g) == pytest.approx(4 / 3)
        bc = bn.betweenness_centrality(g)
        assert bc.tolist() == [0.0, 1.0, 0.0]

    def test_cycle_four(self):
        g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        assert bn.characteristic_path_length(g) == pytest.approx(4 / 3)
        # the two opposite pairs each split their two shortest paths
        assert bn.betweenness_centrality(g) == pytest.approx(np.full(4, 0.5))

    def test_triangle_plus_tail_clustering(self):
        g = graph_from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
        # nodes 0 and 1 are fully clustered, node 2 has 1 of 3 pairs, node 3 none
        expected = (1.0 + 1.0 + 1 / 3 + 0.0) / 4
        assert bn.clustering_coefficient(g) == pytest.approx(expected)

    def test_disconnected_path_length_raises(self):
        g = graph_from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedGraphError):
            bn.characteristic_path_length(g)


class TestAgainstBruteForce:
    def test_random_graphs_match_oracles(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            n = int(rng.integers(4, 8))
            g = random_connected_graph(rng, n)
            adj = g.adjacency
            assert bn.characteristic_path_length(g) == pytest.approx(
                oracle.fw_path_length(adj), abs=1e-9
            )
            assert bn.clustering_coefficient(g) == pytest.approx(
                oracle.triangle_clustering(adj), abs=1e-9
            )
            assert bn.betweenness_centrality(g) == pytest.approx(
                oracle.enumeration_betweenness(adj), abs=1e-9
            )


class TestSmallWorldness:
    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(22)
        g = random_connected_graph(rng, 8)
        a = bn.small_worldness(g, n_refs=10, seed=5)
        b = bn.small_worldness(g, n_refs=10, seed=5)
        assert a.sigma == b.sigma
        assert a.clustering_ref == b.clustering_ref

    def test_zero_rewires_give_unit_sigma(self):
        rng = np.random.default_rng(23)
        g = random_connected_graph(rng, 8)
        res = bn.small_worldness(g, n_refs=5, seed=0, rewires_per_edge=0)
        assert res.sigma == pytest.approx(1.0, abs=1e-12)
        assert not res.degenerate

    def test_lattice_with_shortcuts_is_small_world(self):
        # ring lattice (each node tied to 2 neighbors per side) plus a few
        # shortcuts: high clustering, short paths
        n = 20
        edges = []
        for i in range(n):
            edges.append((i, (i + 1) % n))
            edges.append((i, (i + 2) % n))
        edges += [(0, 10), (3, 14), (5, 17)]
        g = graph_from_edges(n, [(min(a, b), max(a, b)) for a, b in set(edges)])
        res = bn.small_worldness(g, n_refs=20, seed=1)
        assert not res.degenerate
        assert res.sigma > 1.2

    def test_star_is_degenerate(self):
        g = graph_from_edges(6, [(0, i) for i in range(1, 6)])
        res = bn.small_worldness(g, n_refs=5, seed=0)
        assert res.degenerate
        assert np.isnan(res.sigma)

    def test_disconnected_input_raises(self):
        g = graph_from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedGraphError):
            bn.small_worldness(g)

    def test_bad_n_refs(self):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        with pytest.raises(ValueError):
            bn.small_worldness(g, n_refs=0)

    def test_rewiring_preserves_degrees(self):
        rng = np.random.default_rng(24)
        g = random_connected_graph(rng, 8)
        swapped = bn._double_edge_swaps(g.adjacency, 40, np.random.default_rng(3))
        assert np.array_equal(swapped.sum(axis=0), g.adjacency.sum(axis=0))
        assert np.array_equal(swapped, swapped.T)
        assert not np.any(np.diag(swapped))


class TestNetworkMetrics:
    def test_bundle_matches_parts(self):
        rng = np.random.default_rng(25)
        g = random_connected_graph(rng, 8)
        m = bn.network_metrics(g, n_refs=5, seed=9)
        assert m.char_path_length == bn.characteristic_path_length(g)
        assert m.clustering_coeff == bn.clustering_coefficient(g)
        assert np.array_equal(m.degree, bn.degree_centrality(g))
        assert np.array_equal(m.betweenness, bn.betweenness_centrality(g))
        assert m.small_worldness == bn.small_worldness(g, n_refs=5, seed=9).sigma
        assert m.labels == g.labels


def metrics_fixture(l, c, s, degree, betweenness, labels):
    return bn.NetworkMetrics(
        char_path_length=l,
        clustering_coeff=c,
        small_worldness=s,
        degree=np.asarray(degree, dtype=float),
        betweenness=np.asarray(betweenness, dtype=float),
        labels=tuple(labels),
    )


class TestComparePhases:
    labels = ("n0", "n1", "n2")

    def subject_metrics(self, offset, jitter):
        return {
            f"s{i}": metrics_fixture(
                1.5 + offset + jitter * i,
                0.4 + offset,
                1.1,
                [2 + i, 3, 1],
                [0.5 + offset, 0.1, 0.0],
                self.labels,
            )
            for i in range(4)
        }

    def test_row_layout(self):
        p1 = self.subject_metrics(0.2, 0.01)
        p3 = self.subject_metrics(0.0, 0.02)
        rows = bn.compare_phases(p1, p3)
        names = [(r.metric, r.node) for r in rows]
        assert names[:3] == [
            ("char_path_length", None),
            ("clustering_coeff", None),
            ("small_worldness", None),
        ]
        assert ("degree", "n0") in names and ("betweenness", "n2") in names
        assert len(rows) == 3 + 2 * len(self.labels)

    def test_direction_and_difference(self):
        p1 = self.subject_metrics(0.2, 0.01)
        p3 = self.subject_metrics(0.0, 0.02)
        row = bn.compare_phases(p1, p3)[0]
        assert row.metric == "char_path_length"
        assert row.mean_difference == pytest.approx(0.2 - 0.015, abs=1e-9)
        assert row.direction == "decrease"
        assert row.test is not None
        assert row.test.kind == "paired_t"

    def test_constant_difference_reports_no_test(self):
        p1 = self.subject_metrics(0.2, 0.0)
        p3 = self.subject_metrics(0.0, 0.0)
        row = bn.compare_phases(p1, p3)[0]
        assert row.mean_difference == pytest.approx(0.2)
        assert row.test is None

    def test_identical_phases_give_unit_p(self):
        p1 = self.subject_metrics(0.1, 0.05)
        rows = bn.compare_phases(p1, self.subject_metrics(0.1, 0.05))
        assert rows[0].test.p_value == 1.0
        assert rows[0].direction == "none"

    def test_nan_pairs_dropped(self):
        p1 = self.subject_metrics(0.2, 0.01)
        p3 = self.subject_metrics(0.0, 0.02)
        p1["s0"] = metrics_fixture(
            np.nan, 0.6, 1.1, [2, 3, 1], [0.7, 0.1, 0.0], self.labels
        )
        rows = bn.compare_phases(p1, p3)
        assert rows[0].test.n == 3

    def test_subject_mismatch(self):
        p1 = self.subject_metrics(0.2, 0.01)
        p3 = self.subject_metrics(0.0, 0.02)
        del p3["s1"]
        with pytest.raises(PairingError):
            bn.compare_phases(p1, p3)

    def test_empty_comparison(self):
        with pytest.raises(PairingError):
            bn.compare_phases({}, {})

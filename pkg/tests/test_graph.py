import numpy as np
import pytest

from qwalk.errors import ParseError, ValidationError
from qwalk.graph import (
    Graph,
    k_hop_neighborhood,
    parse_edge_list,
    parse_labels,
    split_labelled,
)

from oracles import bfs_within_k, random_graph


class TestParseEdgeList:
    def test_minimal_path_graph(self):
        g = parse_edge_list("0 1\n1 2", directed=False)
        assert g.node_count == 3
        assert g.neighbors(0) == [1]
        assert sorted(g.neighbors(1)) == [0, 2]
        assert g.neighbors(2) == [1]

    def test_self_loop_and_duplicates_dropped(self):
        g = parse_edge_list("0 0\n0 1\n0 1", directed=False)
        assert g.node_count == 2
        assert g.adjacency[0] == [(1, 1.0)]
        assert g.adjacency[1] == [(0, 1.0)]

    def test_weight_symmetrized(self):
        g = parse_edge_list("0 1 2.5", directed=False)
        assert g.adjacency[0] == [(1, 2.5)]
        assert g.adjacency[1] == [(0, 2.5)]

    def test_reverse_duplicate_collapses_undirected(self):
        g = parse_edge_list("0 1 2.0\n1 0 3.0", directed=False)
        assert g.adjacency[0] == [(1, 2.0)]
        assert g.adjacency[1] == [(0, 2.0)]

    def test_directed_keeps_both_orientations(self):
        g = parse_edge_list("0 1\n1 0", directed=True)
        assert g.adjacency[0] == [(1, 1.0)]
        assert g.adjacency[1] == [(0, 1.0)]

    def test_comments_and_blank_lines_ignored(self):
        g = parse_edge_list("# header\n\n0 1\n  \n# trailing", directed=False)
        assert g.node_count == 2

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("0 1\n0 1 2 3", directed=False)
        with pytest.raises(ParseError, match="line 1"):
            parse_edge_list("0 1 notaweight", directed=False)

    @pytest.mark.parametrize("bad", ["0 1 0", "0 1 -2.5"])
    def test_nonpositive_weight_rejected(self, bad):
        with pytest.raises(ValidationError):
            parse_edge_list(bad, directed=False)

    def test_arbitrary_tokens_remapped_densely(self):
        g = parse_edge_list("alice bob\nbob 42", directed=False)
        assert g.node_count == 3
        assert g.node_ids == ["alice", "bob", "42"]
        assert g.node_index == {"alice": 0, "bob": 1, "42": 2}
        assert sorted(g.neighbors(1)) == [0, 2]

    def test_sparse_integer_ids_remapped(self):
        g = parse_edge_list("5 7", directed=False)
        assert g.node_count == 2
        assert g.node_ids == ["5", "7"]


class TestRoundTrip:
    def test_empty(self):
        g = parse_edge_list("", directed=False)
        assert g.node_count == 0
        assert parse_edge_list(g.to_edge_list(), False) == g

    @pytest.mark.parametrize("directed", [False, True])
    def test_random_graphs_round_trip(self, directed):
        rng = np.random.default_rng(20)
        for _ in range(20):
            g = random_graph(rng, max_nodes=40, directed=directed)
            assert parse_edge_list(g.to_edge_list(), directed) == g

    def test_weights_survive(self):
        g = parse_edge_list("0 1 0.125\n1 2 3.7500001", directed=False)
        assert parse_edge_list(g.to_edge_list(), False) == g


class TestParseLabels:
    def test_single_labels(self):
        lab = parse_labels("0 A\n1 B")
        assert lab.label_universe == ["A", "B"]
        assert lab.actual_labels == {0: frozenset({0}), 1: frozenset({1})}

    def test_multi_label(self):
        lab = parse_labels("0 A B")
        assert lab.actual_labels[0] == frozenset({0, 1})

    def test_empty_text(self):
        lab = parse_labels("")
        assert lab.label_universe == []
        assert lab.actual_labels == {}

    def test_node_without_labels_rejected(self):
        with pytest.raises(ValidationError, match=">=1 label"):
            parse_labels("0 A\n1")

    def test_repeated_node_lines_merge(self):
        lab = parse_labels("0 A\n0 B")
        assert lab.actual_labels[0] == frozenset({0, 1})

    def test_node_index_mapping(self):
        lab = parse_labels("alice A\nbob B", node_index={"alice": 0, "bob": 1})
        assert lab.actual_labels == {0: frozenset({0}), 1: frozenset({1})}

    def test_unknown_node_rejected(self):
        with pytest.raises(ValidationError, match="not present"):
            parse_labels("carol A", node_index={"alice": 0})

    def test_universe_order_is_first_appearance(self):
        lab = parse_labels("0 Z\n1 A Z\n2 M")
        assert lab.label_universe == ["Z", "A", "M"]


class TestKHopNeighborhood:
    def test_path_one_hop(self):
        g = parse_edge_list("0 1\n1 2", directed=False)
        assert k_hop_neighborhood(g, 0, 1) == {1}

    def test_path_two_hops(self):
        g = parse_edge_list("0 1\n1 2", directed=False)
        assert k_hop_neighborhood(g, 0, 2) == bfs_within_k(g, 0, 2) == {1, 2}

    def test_directed_sink_is_empty(self):
        g = parse_edge_list("0 1", directed=True)
        assert k_hop_neighborhood(g, 1, 1) == set()

    def test_out_of_range_node(self):
        g = parse_edge_list("0 1", directed=False)
        with pytest.raises(IndexError):
            k_hop_neighborhood(g, 5, 1)

    def test_k_below_one_rejected(self):
        g = parse_edge_list("0 1", directed=False)
        with pytest.raises(ValidationError):
            k_hop_neighborhood(g, 0, 0)

    def test_one_hop_equals_out_neighbors_on_random_graphs(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            g = random_graph(rng, max_nodes=200)
            for u in range(g.node_count):
                assert k_hop_neighborhood(g, u, 1) == set(g.neighbors(u))

    def test_monotone_in_k(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            g = random_graph(rng, max_nodes=60)
            u = int(rng.integers(g.node_count))
            prev = set()
            for k in range(1, 5):
                cur = k_hop_neighborhood(g, u, k)
                assert prev <= cur
                assert cur == bfs_within_k(g, u, k)
                prev = cur


class TestSplitLabelled:
    def _labels(self, n):
        return parse_labels("\n".join(f"{u} L{u % 3}" for u in range(n)))

    def test_full_visibility(self):
        split = split_labelled(self._labels(10), 1.0, seed=0)
        assert len(split.visible) == 10
        assert split.hidden == frozenset()

    def test_eighty_percent(self):
        split = split_labelled(self._labels(10), 0.8, seed=0)
        assert len(split.visible) == 8
        assert len(split.hidden) == 2
        assert split.visible.isdisjoint(split.hidden)

    def test_deterministic(self):
        a = split_labelled(self._labels(30), 0.5, seed=9)
        b = split_labelled(self._labels(30), 0.5, seed=9)
        assert a == b

    def test_seed_changes_split(self):
        a = split_labelled(self._labels(30), 0.5, seed=1)
        b = split_labelled(self._labels(30), 0.5, seed=2)
        assert a.visible != b.visible

    @pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
    def test_fraction_range(self, bad):
        with pytest.raises(ValidationError):
            split_labelled(self._labels(5), bad, seed=0)

    def test_empty_labels_rejected(self):
        with pytest.raises(ValidationError):
            split_labelled(parse_labels(""), 0.5, seed=0)

    def test_unlabelled_nodes_fall_in_hidden(self):
        labels = parse_labels("0 A\n1 B\n2 A")
        split = split_labelled(labels, 1.0, seed=0, node_count=5)
        assert split.visible == frozenset({0, 1, 2})
        assert split.hidden == frozenset({3, 4})

    def test_ratio_within_one_node(self):
        for n in (7, 10, 23):
            labels = self._labels(n)
            for frac in (0.3, 0.55, 0.8):
                split = split_labelled(labels, frac, seed=0)
                assert abs(len(split.visible) - frac * n) <= 1

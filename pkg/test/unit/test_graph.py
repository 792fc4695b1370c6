"""
Mixed graph construction, weight views and label assignments.
"""
from mixedgraph import graph
from mixedgraph.graph import DISSIMILAR, SIMILAR, GraphError, LabelAssignment
import numpy as np
import pytest


def test_build_graph_splits_edges_by_kind():
    g = graph.build_graph(3, [(0, 1, 1.0, SIMILAR), (1, 2, 2.0, DISSIMILAR)])
    assert g.node_count == 3
    assert g.similar.edge_count == 1
    assert g.dissimilar.edge_count == 1
    assert list(g.edges()) == [(0, 1, 1.0, SIMILAR), (1, 2, 2.0, DISSIMILAR)]


def test_edges_are_stored_canonically():
    g = graph.build_graph(4, [(3, 1, 1.5, SIMILAR), (2, 0, 0.5, SIMILAR)])
    assert list(g.similar.edges()) == [(0, 2, 0.5), (1, 3, 1.5)]


def test_adjacency_is_symmetric():
    g = graph.build_graph(3, [(0, 1, 1.0, SIMILAR), (1, 2, 2.0, SIMILAR)])
    adjacency = g.similar.adjacency.toarray()
    np.testing.assert_array_equal(adjacency, adjacency.T)
    assert adjacency[2, 1] == 2.0
    np.testing.assert_array_equal(g.similar.degree(), [1.0, 3.0, 2.0])


@pytest.mark.parametrize("edges,message", [
    ([(0, 0, 1.0, SIMILAR)], "self-loop"),
    ([(0, 1, 1.0, SIMILAR), (1, 0, 2.0, DISSIMILAR)], "both S and D"),
    ([(0, 1, 1.0, SIMILAR), (1, 0, 2.0, SIMILAR)], "Duplicate"),
    ([(0, 1, -1.0, SIMILAR)], "invalid weight"),
    ([(0, 1, float("nan"), SIMILAR)], "invalid weight"),
    ([(0, 2, 1.0, SIMILAR)], "out of range"),
    ([(0, 1, 1.0, "X")], "unknown kind"),
])
def test_build_graph_rejects_invalid_edges(edges, message):
    with pytest.raises(GraphError, match=message):
        graph.build_graph(2, edges)


def test_mixed_graph_rejects_shared_edges():
    s = graph.SparseUndirectedGraph.from_arrays(3, [0], [1], [1.0])
    with pytest.raises(GraphError, match="both S and D"):
        graph.MixedGraph(similar=s, dissimilar=s)


def test_flattened_is_the_union_of_both_graphs():
    g = graph.build_graph(3, [(0, 1, 1.0, SIMILAR), (1, 2, 2.0, DISSIMILAR)])
    flat = g.flattened()
    assert list(flat.edges()) == [(0, 1, 1.0), (1, 2, 2.0)]
    assert graph.MixedGraph.similar_only(flat).dissimilar.edge_count == 0


def test_row_normalize_example():
    g = graph.build_graph(3, [(0, 1, 2.0, SIMILAR), (0, 2, 3.0, SIMILAR)])
    view = graph.row_normalize(g.similar)
    assert view.out_weights(0) == pytest.approx({1: 0.4, 2: 0.6})


def test_row_normalize_isolated_node_has_no_weights():
    g = graph.build_graph(3, [(0, 1, 2.0, SIMILAR)])
    assert graph.row_normalize(g.similar).out_weights(2) == {}


def test_row_normalize_single_edge():
    g = graph.build_graph(2, [(0, 1, 5.0, SIMILAR)])
    view = graph.row_normalize(g.similar)
    assert view.out_weights(0) == {1: 1.0}
    assert view.out_weights(1) == {0: 1.0}


def test_raw_view_keeps_weights():
    g = graph.build_graph(3, [(0, 1, 2.0, SIMILAR), (0, 2, 3.0, SIMILAR)])
    view = graph.raw_view(g.similar)
    assert view.out_weights(0) == {1: 2.0, 2: 3.0}
    np.testing.assert_array_equal(view.row_sums(), [5.0, 2.0, 3.0])


def test_symmetrized_adds_both_directions():
    g = graph.build_graph(3, [(0, 1, 2.0, SIMILAR), (0, 2, 3.0, SIMILAR)])
    view = graph.row_normalize(g.similar).symmetrized()
    # w'_01 + w'_10 = 0.4 + 1.0
    assert view.out_weights(0) == pytest.approx({1: 1.4, 2: 1.6})
    assert view.out_weights(1) == pytest.approx({0: 1.4})


def test_aggregate_sums_entry_values_per_row():
    g = graph.build_graph(3, [(0, 1, 2.0, SIMILAR), (0, 2, 3.0, SIMILAR)])
    view = graph.raw_view(g.similar)
    values = np.array([view.cols, np.ones_like(view.cols)], dtype=float).T
    out = view.aggregate(values)
    np.testing.assert_array_equal(out[:, 1], view.row_sums())
    np.testing.assert_array_equal(out[:, 0], [2.0 * 1 + 3.0 * 2, 0.0, 0.0])


def test_label_assignment_partitions_nodes():
    labels = LabelAssignment.from_mapping(5, {0: 1, 3: 2})
    np.testing.assert_array_equal(labels.labeled, [0, 3])
    np.testing.assert_array_equal(labels.unlabeled, [1, 2, 4])
    assert labels.counts() == (1, 1)
    assert labels.as_mapping() == {0: 1, 3: 2}


def test_label_assignment_is_read_only():
    labels = LabelAssignment.from_mapping(3, {0: 1})
    with pytest.raises(ValueError):
        labels.classes[1] = 2


@pytest.mark.parametrize("mapping", [{5: 1}, {0: 3}])
def test_label_assignment_rejects_bad_entries(mapping):
    with pytest.raises(GraphError):
        LabelAssignment.from_mapping(3, mapping)


def test_hidden_and_flipped():
    labels = LabelAssignment.from_truth(np.array([1, 2, 1, 2]), [0, 1, 2])
    np.testing.assert_array_equal(labels.hidden([2]).classes, [1, 2, 0, 0])
    np.testing.assert_array_equal(labels.flipped().classes, [2, 1, 2, 0])

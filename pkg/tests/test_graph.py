import random

import networkx as nx
import pytest

from coarse_decomp.errors import ParseError, PathOverflow, ValidationError
from coarse_decomp.graph import (
    Graph,
    MinorModel,
    connected_components,
    detect_ktt_induced_minor,
    enumerate_induced_paths,
    extract_induced_path_from_walk,
    from_edge_list,
    hop_distances,
    induced_subgraph,
    is_anticomplete,
    is_induced_path,
    quotient_by_components,
    separates,
    to_edge_list,
    vertex_weighted_distance,
    verify_minor_model,
)

from conftest import nx_separates, random_graph, to_nx

P4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
K4 = Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


def test_edge_list_round_trip():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (4, 5)])
    text = to_edge_list(g, ["A=0"])
    assert text.startswith("# n=6\n# A=0\n")
    h = from_edge_list(text)
    assert h.n == 6 and h.edges() == g.edges()


def test_header_keeps_isolated_vertices():
    assert from_edge_list("# n=5\n0 1\n").n == 5
    assert from_edge_list("0 1\n").n == 2


@pytest.mark.parametrize("text,exc", [
    ("0 1 2\n", ParseError),
    ("0 x\n", ParseError),
    ("-1 2\n", ParseError),
    ("1 1\n", ValidationError),
    ("0 1\n1 0\n", ValidationError),
    ("# n=2\n0 5\n", ValidationError),
])
def test_parser_rejects(text, exc):
    with pytest.raises(exc):
        from_edge_list(text)


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as info:
        from_edge_list("0 1\n\n2 z\n")
    assert info.value.line == 3


def test_components_match_networkx(rng):
    for _ in range(50):
        g = random_graph(rng, rng.randint(1, 25), 0.1)
        ours = sorted(sorted(c) for c in connected_components(g))
        theirs = sorted(sorted(c) for c in nx.connected_components(to_nx(g)))
        assert ours == theirs


def test_hop_distances_match_networkx(rng):
    for _ in range(30):
        g = random_graph(rng, rng.randint(2, 30), 0.15)
        dist = hop_distances(g, [0])
        ref = nx.single_source_shortest_path_length(to_nx(g), 0)
        for v in range(g.n):
            assert dist[v] == ref.get(v, float("inf"))


def test_induced_subgraph_relabels():
    h = induced_subgraph(C4, [1, 2, 3])
    assert h.n == 3 and h.edges() == [(0, 1), (1, 2)]


def test_quotient_merges_cross_edges():
    q, qmap = quotient_by_components(P4, [[0, 1], [2, 3]])
    assert q.n == 2 and q.edges() == [(0, 1)]
    q, _ = quotient_by_components(C4, [[0, 1], [2, 3]])
    assert q.n == 2 and q.edges() == [(0, 1)]
    assert qmap.lift([0]) == {0, 1}
    assert qmap.project([3]) == {1}


def test_induced_paths_examples():
    assert enumerate_induced_paths(P4, [0], [3]).paths == ((0, 1, 2, 3),)
    assert len(enumerate_induced_paths(C4, [0], [2]).paths) == 2
    assert enumerate_induced_paths(K4, [0], [1]).paths == ((0, 1),)


def test_induced_paths_against_networkx(rng):
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 9), 0.4)
        h = to_nx(g)
        A, B = [0], [g.n - 1]
        ref = set()
        for P in nx.all_simple_paths(h, 0, g.n - 1) if g.n > 1 else []:
            if h.subgraph(P).number_of_edges() == len(P) - 1:
                ref.add(tuple(P))
        ours = set(enumerate_induced_paths(g, A, B).paths)
        assert ours == ref


def test_path_cap_overflow():
    g = Graph.from_edges(10, [(u, v) for u in range(10) for v in range(u + 1, 10) if (u + v) % 3])
    with pytest.raises(PathOverflow):
        enumerate_induced_paths(g, range(10), range(10), cap=3)


def test_walk_shortcut_is_least_side():
    walk = [0, 1, 2, 3, 0, 1, 2]
    P = extract_induced_path_from_walk(C4, walk)
    assert is_induced_path(C4, P) and P[0] == 0 and P[-1] == 2 and len(P) == 3


def test_walk_with_non_edge_rejected():
    with pytest.raises(ValidationError):
        extract_induced_path_from_walk(P4, [0, 2])


def test_separates_against_networkx(rng):
    for _ in range(100):
        g = random_graph(rng, 8, 0.3)
        S = rng.sample(range(8), rng.randint(0, 3))
        A, B = rng.sample(range(8), 2), rng.sample(range(8), 2)
        assert separates(g, S, A, B) == nx_separates(to_nx(g), S, A, B)


def test_anticomplete():
    assert is_anticomplete(P4, [0], [2, 3])
    assert not is_anticomplete(P4, [0], [1])


def test_vertex_weighted_distance_example():
    P3 = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert vertex_weighted_distance(P3, [0, 1, 0], [0]) == [0, 1, 1]


def test_minor_model_verifier():
    model = MinorModel(2, (frozenset({0}), frozenset({2})), (frozenset({1}), frozenset({3})))
    assert verify_minor_model(C4, model, 2)
    assert not verify_minor_model(K4, model, 2)
    assert MinorModel.from_json(model.to_json()) == model


def test_ktt_detector():
    P5 = Graph.from_edges(5, [(i, i + 1) for i in range(4)])
    assert detect_ktt_induced_minor(P5, 2) is None
    found = detect_ktt_induced_minor(C4, 2)
    assert found is not None and verify_minor_model(C4, found, 2)


def test_ktt_detector_on_grid():
    g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(3, 3))
    G = Graph.from_edges(9, list(g.edges()))
    model = detect_ktt_induced_minor(G, 2)
    assert model is not None and verify_minor_model(G, model, 2)

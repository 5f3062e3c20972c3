import networkx as nx
import pytest

from coarse_decomp.errors import ValidationError
from coarse_decomp.generators import KINDS, corridor, gen_graph, gnp, grid, theta, two_balls
from coarse_decomp.graph import is_anticomplete

from conftest import to_nx


def test_grid_matches_networkx():
    ours = to_nx(grid(3, 4))
    ref = nx.convert_node_labels_to_integers(nx.grid_2d_graph(3, 4))
    assert nx.is_isomorphic(ours, ref)


@pytest.mark.parametrize("kind,params,n,m", [
    ("path", [5], 5, 4),
    ("star", [4], 5, 4),
    ("cycle", [6], 6, 6),
    ("grid", [2, 3], 6, 7),
    ("theta", [3, 2], 6, 6),
    ("corridor", [2, 4], 8, 6),
    ("two-balls", [], 35, 52),
])
def test_sizes(kind, params, n, m):
    g = gen_graph(kind, params).graph
    assert (g.n, g.m) == (n, m)


def test_gnp_is_seeded():
    assert gnp(20, 0.3, 5).edges() == gnp(20, 0.3, 5).edges()
    assert gnp(20, 0.3, 5).edges() != gnp(20, 0.3, 6).edges()
    assert gnp(6, 1.0, 0).m == 15 and gnp(6, 0.0, 0).m == 0


def test_theta_terminals():
    fx = theta(3, 3)
    assert fx.terminals == {"A": [0], "B": [1]}
    assert nx.node_connectivity(to_nx(fx.graph), 0, 1) == 3


def test_corridor_paths_are_anticomplete():
    fx = corridor(3, 5)
    rows = [range(w * 5, w * 5 + 5) for w in range(3)]
    assert all(is_anticomplete(fx.graph, rows[i], rows[j]) for i in range(3) for j in range(i + 1, 3))
    assert fx.comments() == ["A=0,5,10", "B=4,9,14"]


def test_two_balls_bottleneck():
    fx = two_balls()
    h = to_nx(fx.graph)
    assert nx.is_connected(h)
    bridge = fx.graph.n - 2
    h.remove_node(bridge)
    assert not nx.is_connected(h)


@pytest.mark.parametrize("kind,params", [
    ("grid", [3]),
    ("cycle", [2]),
    ("gnp", [5, 2.0]),
    ("path", [0]),
    ("theta", [1, 2]),
    ("two-balls", [3]),
    ("grid", ["x", 2]),
    ("moebius", [3]),
])
def test_bad_parameters(kind, params):
    with pytest.raises(ValidationError):
        gen_graph(kind, params)


def test_every_kind_listed():
    assert set(KINDS) == {"grid", "path", "star", "cycle", "gnp", "theta", "corridor", "two-balls"}

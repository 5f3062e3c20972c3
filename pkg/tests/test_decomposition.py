import pytest

from coarse_decomp.decomposition import (
    TDNode,
    TreeDecomposition,
    balanced_center_separator,
    build_tree_decomposition,
    coarse_treewidth_pipeline,
    coverability,
    distance_r_independence,
    lifted_radius,
    validate_tree_decomposition,
)
from coarse_decomp.errors import Inconclusive, ValidationError
from coarse_decomp.family import family_for
from coarse_decomp.generators import grid, path
from coarse_decomp.graph import Graph
from coarse_decomp.rounding import is_balanced

from conftest import random_connected, random_graph, singleton_family

STAR = Graph.from_edges(6, [(0, i) for i in range(1, 6)])


def two_stars():
    edges = [(0, i) for i in range(1, 6)] + [(6, i) for i in range(7, 12)] + [(0, 6)]
    return Graph.from_edges(12, edges)


def test_separator_single_center():
    g = path(5)
    fam = singleton_family(g)
    res = balanced_center_separator(g, fam, [2])
    union = set().union(*(fam.sets[w] for w in res.S)) if res.S else set()
    assert res.branch == "rounding"
    assert is_balanced(g, union, [2], 0.95)
    assert set(res.S) <= {2}


def test_separator_star_center():
    fam = family_for(STAR)
    res = balanced_center_separator(STAR, fam, [0])
    assert res.S == [0]


def test_separator_sampling_branch_diagnostic():
    g = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])
    fam = singleton_family(g)
    res = balanced_center_separator(g, fam, [0, 2, 4], branch_override="sampling", mode="exact")
    assert res.S is None and res.branch == "sampling"
    assert {0, 2, 4} <= set(res.diagnostic["H_vertices"])
    assert res.diagnostic["treewidth_lower_bound"] >= 0


def test_separator_bad_branch():
    with pytest.raises(ValidationError):
        balanced_center_separator(path(3), singleton_family(path(3)), [0], branch_override="nope")


def test_p4_decomposition():
    g = path(4)
    fam = singleton_family(g)
    td = build_tree_decomposition(g, fam)
    assert validate_tree_decomposition(g, td, fam).ok


def test_two_stars_decomposition():
    g = two_stars()
    fam = singleton_family(g)
    td = build_tree_decomposition(g, fam)
    assert len(td.nodes) >= 2
    assert validate_tree_decomposition(g, td, fam).ok


def test_empty_graph_decomposition():
    g = Graph.from_edges(0, [])
    td = build_tree_decomposition(g, singleton_family(g))
    assert validate_tree_decomposition(g, td).ok


def test_decomposition_rejects_non_center_x0():
    fam = family_for(STAR)
    with pytest.raises(ValidationError):
        build_tree_decomposition(STAR, fam, [3])


def test_validator_examples():
    g = path(3)
    single = TreeDecomposition([TDNode(0, None, (), frozenset({0, 1, 2}))], 0)
    assert validate_tree_decomposition(g, single).ok
    split = TreeDecomposition([TDNode(0, None, (), frozenset({0, 1})),
                               TDNode(1, 0, (), frozenset({2}))], 0)
    rep = validate_tree_decomposition(g, split)
    assert not rep.ok and rep.axiom == 2
    gap = TreeDecomposition([TDNode(0, None, (), frozenset({0, 1})),
                             TDNode(1, 0, (), frozenset({1, 2})),
                             TDNode(2, 1, (), frozenset({0, 2}))], 0)
    rep = validate_tree_decomposition(g, gap)
    assert not rep.ok and rep.axiom == 3


def test_validator_structure_and_witnesses():
    g = path(2)
    loop = TreeDecomposition([TDNode(0, 1, (), frozenset({0, 1})),
                              TDNode(1, 0, (), frozenset({0, 1}))], 0)
    assert validate_tree_decomposition(g, loop).axiom == 0
    fam = singleton_family(g)
    wrong = TreeDecomposition([TDNode(0, None, (0,), frozenset({0, 1}))], 0)
    assert validate_tree_decomposition(g, wrong, fam).axiom == 4


def test_json_round_trip():
    g = two_stars()
    fam = singleton_family(g)
    td = build_tree_decomposition(g, fam)
    again = TreeDecomposition.from_json(td.to_json())
    assert [t.bag for t in again.nodes] == [t.bag for t in td.nodes]
    with pytest.raises(ValidationError):
        TreeDecomposition.from_json({"nodes": [{"id": 0}]})


def test_random_decompositions(rng):
    for _ in range(10):
        g = random_graph(rng, rng.randint(3, 16), 0.25)
        fam = family_for(g)
        td = build_tree_decomposition(g, fam)
        rep = validate_tree_decomposition(g, td, fam)
        assert rep.ok, rep.violation


def test_coverability_examples():
    g = path(7)
    assert coverability(g, [], 1, 4) == []
    assert coverability(g, range(7), 1, 4) == [3]
    far = Graph.from_edges(14, [(i, i + 1) for i in range(6)] + [(i, i + 1) for i in range(7, 13)])
    assert coverability(far, range(14), 1, 4, exact=True) is None
    assert sorted(coverability(far, range(14), 2, 4, exact=True)) == [3, 10]


def test_independence_examples():
    assert distance_r_independence(path(3), [1], 3) == (1, [1])
    assert distance_r_independence(path(5), [0, 4], 3) == (2, [0, 4])
    k5 = Graph.from_edges(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    assert distance_r_independence(k5, range(5), 1)[0] == 1


def test_independence_limit():
    with pytest.raises(Inconclusive) as info:
        distance_r_independence(path(10), range(10), 1, limit=5)
    assert info.value.partial["lower_bound"] == 5


def test_independence_brute_force(rng):
    import itertools

    from coarse_decomp.graph import hop_distances

    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 10), 0.25)
        r = rng.randint(1, 3)
        dist = [hop_distances(g, [v]) for v in range(g.n)]
        best = 0
        for size in range(1, g.n + 1):
            for combo in itertools.combinations(range(g.n), size):
                if all(dist[a][b] > r for a, b in itertools.combinations(combo, 2)):
                    best = size
                    break
        assert distance_r_independence(g, range(g.n), r)[0] == best


def test_pipeline_grid():
    g = grid(5, 5)
    res = coarse_treewidth_pipeline(g)
    assert validate_tree_decomposition(g, res.td).ok
    assert res.quality.radius_vertices == lifted_radius(res.quotient_graph.n)
    for row in res.quality.rows:
        assert row["cover_ok"]
        if "alpha" in row:
            assert row["alpha_ok"]


def test_pipeline_tree(rng):
    g = random_connected(rng, 20, 0.0)
    res = coarse_treewidth_pipeline(g)
    assert validate_tree_decomposition(g, res.td).ok
    assert all(row["cover_ok"] for row in res.quality.rows)

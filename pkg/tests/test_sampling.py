import math

import numpy as np
import pytest

from coarse_decomp.errors import SamplingFailure, ValidationError
from coarse_decomp.family import family_for
from coarse_decomp.graph import Graph
from coarse_decomp.lp import (
    AbLpSolution,
    BalancedDual,
    restrict_balanced_dual,
    restrict_dual_to_upward_minimal,
    solve_ab_lp,
    solve_balanced_lp,
)
from coarse_decomp.sampling import (
    audit_balanced_cover,
    build_triple_distribution,
    dense_subgraph_ell,
    sample_dense_subgraph,
    sample_path_multiset,
    split_balanced_to_two_sided,
)

from conftest import singleton_family

TWO_P3 = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
C6 = Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])


def corridor_solution():
    fam = singleton_family(TWO_P3)
    sol = solve_ab_lp(TWO_P3, fam, [0, 3], [2, 5], mode="exact")
    return fam, restrict_dual_to_upward_minimal(TWO_P3, fam, sol)


def test_two_corridors_four_samples():
    fam, sol = corridor_solution()
    assert sol.objective == pytest.approx(2.0)
    pk = sample_path_multiset(TWO_P3, fam, [0, 3], [2, 5], sol, 2, seed=7)
    assert len(pk.paths) == 4
    assert max(pk.congestion.values()) <= 12
    assert pk.max_intersection <= 2 * fam.thickness - 1
    assert pk.to_json()["kind"] == "path-multiset"


def test_sampling_is_seeded():
    fam, sol = corridor_solution()
    a = sample_path_multiset(TWO_P3, fam, [0, 3], [2, 5], sol, 2, seed=3)
    b = sample_path_multiset(TWO_P3, fam, [0, 3], [2, 5], sol, 2, seed=3)
    assert a.paths == b.paths


def test_sampling_preconditions():
    fam, sol = corridor_solution()
    with pytest.raises(ValidationError):
        sample_path_multiset(TWO_P3, fam, [0, 3], [2, 5], sol, 0.1, seed=0)
    raw = solve_ab_lp(TWO_P3, fam, [0, 3], [2, 5], mode="exact")
    with pytest.raises(ValidationError):
        sample_path_multiset(TWO_P3, fam, [0, 3], [2, 5], raw, 2, seed=0)


def test_sampling_failure_reports_history():
    # one path carrying all the weight: congestion equals the sample count
    g = Graph.from_edges(2, [(0, 1)])
    fam = singleton_family(g)
    sol = AbLpSolution(1.0, {0: 1.0, 1: 0.0}, {(0, 1): 7.0}, "exact", upward_minimal=True)
    with pytest.raises(SamplingFailure) as info:
        sample_path_multiset(g, fam, [0], [1], sol, 1, seed=0, max_attempts=3)
    assert info.value.report["peak_congestion"] == [7, 7, 7]


def test_triple_distribution_splits_evenly():
    P, Q = (0, 1, 2), (0, 5, 4, 3, 2)
    dual = BalancedDual((0, 2), {0: 1.0, 2: 0.0}, {}, {(0, 2): {P: 0.5, Q: 0.5}})
    sampler = build_triple_distribution(dual)
    rng = np.random.Generator(np.random.PCG64(11))
    hits = [sampler.draw(rng)[2] for _ in range(10_000)]
    got = [h for h in hits if h is not None]
    share = sum(1 for h in got if h == P) / len(got)
    sigma = math.sqrt(0.25 / len(got))
    assert abs(share - 0.5) <= 3 * sigma


def test_triple_distribution_needs_rho():
    with pytest.raises(ValidationError):
        build_triple_distribution(BalancedDual((0,), {0: 0.0}, {}, {}))


def test_single_path_dense_subgraph():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    fam = singleton_family(g)
    P = (0, 1, 2, 3, 4)
    dual = BalancedDual((0, 4), {0: 5.0, 4: 0.0}, {(0, 0): 0.0, (0, 4): 0.0},
                        {(0, 4): {P: 1.0}}, upward_minimal=True)
    f = dual.objective
    ell = dense_subgraph_ell(f, g.n, 2)
    sub = sample_dense_subgraph(g, fam, [0, 4], dual, ell, seed=1)
    assert sub.vertices in (frozenset({0, 4}), frozenset(P))
    assert max(sub.membership.values()) <= sub.bound


def test_dense_subgraph_from_lp():
    fam = singleton_family(C6)
    X = [0, 2, 4]
    sol = restrict_balanced_dual(C6, fam, solve_balanced_lp(C6, fam, X, mode="exact"))
    f = sol.dual.objective
    ell = dense_subgraph_ell(f, C6.n, len(X))
    sub = sample_dense_subgraph(C6, fam, X, sol.dual, ell, seed=0)
    assert set(X) <= sub.vertices
    assert all(m <= sub.bound + 1e-9 for m in sub.membership.values())
    ok, combo = audit_balanced_cover(sub.H, sorted(sub.vertices), fam, X, f)
    assert ok, combo


def test_dense_subgraph_rejects_short_ell():
    fam = singleton_family(C6)
    sol = restrict_balanced_dual(C6, fam, solve_balanced_lp(C6, fam, [0, 3], mode="exact"))
    with pytest.raises(ValidationError):
        sample_dense_subgraph(C6, fam, [0, 3], sol.dual, 1, seed=0)


def test_split_a_inside_separator():
    A1, A2 = split_balanced_to_two_sided(C6, [0, 1, 2, 3], [0, 1, 2, 3])
    assert A1 == {0, 1} and A2 == {2, 3}


def test_split_two_components():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    A1, A2 = split_balanced_to_two_sided(g, [0, 2, 3, 5], [])
    assert {frozenset(A1), frozenset(A2)} == {frozenset({0, 2}), frozenset({3, 5})}


def test_split_rejects_unbalanced():
    with pytest.raises(ValidationError):
        split_balanced_to_two_sided(C6, [0, 1, 2], [])


def test_audit_finds_cheap_separator():
    # star: the center alone balances the leaves, so a threshold of 2 fails
    g = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    fam = singleton_family(g)
    ok, combo = audit_balanced_cover(g, list(range(5)), fam, [1, 2, 3, 4], 2)
    assert ok is False and combo == (0,)
    assert audit_balanced_cover(g, list(range(5)), fam, [1, 2], 2, max_vertices=3) == (None, None)

"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own graph routines: they
use networkx or plain brute force, so a bug in the library cannot hide in
both sides of a comparison.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest

from coarse_decomp.graph import Graph, enumerate_induced_paths
from coarse_decomp.family import OrderedPartition, build_layered_family


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_connected(rng: random.Random, n: int, extra: float) -> Graph:
    """Random spanning tree plus each remaining pair with probability ``extra``."""
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < extra:
                edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))


def nx_separates(h: nx.Graph, S, A, B) -> bool:
    rest = h.subgraph(set(h) - set(S))
    A = [a for a in A if a not in S]
    B = set(b for b in B if b not in S)
    for comp in nx.connected_components(rest):
        if comp & set(A) and comp & B:
            return False
    return True


def brute_min_separator(g: Graph, A, B) -> int:
    """Smallest vertex set (may use A or B) meeting every A-B path.

    Plain bitmask search over subsets by size, independent of the package's
    graph routines.
    """
    n = g.n
    adj = [0] * n
    for u, v in g.edges():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    amask = sum(1 << a for a in set(A))
    bmask = sum(1 << b for b in set(B))
    full = (1 << n) - 1

    def blocked(S: int) -> bool:
        alive = full & ~S
        seen = amask & alive
        frontier = seen
        while frontier:
            nxt = 0
            rest = frontier
            while rest:
                low = rest & -rest
                nxt |= adj[low.bit_length() - 1]
                rest ^= low
            frontier = nxt & alive & ~seen
            seen |= frontier
        return not seen & bmask

    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            if blocked(sum(1 << v for v in S)):
                return size
    raise AssertionError("unreachable")


def singleton_family(g: Graph):
    """Every vertex in its own set: one part, no arcs."""
    return build_layered_family(g, OrderedPartition((tuple(range(g.n)),)))


def ab_lp_reference(g: Graph, fam, A, B):
    """Optimum of the A-B covering LP via the in-house dense simplex, in exact arithmetic."""
    from coarse_decomp.simplex import solve_dense

    paths = enumerate_induced_paths(g, A, B).paths
    cols = fam.centers
    if not paths:
        return Fraction(0)
    # minimize sum x subject to -sum_{F meets P} x_F <= -1
    rows = [[-1 if c in fam.sets_meeting(P) else 0 for c in cols] for P in paths]
    res = solve_dense([1] * len(cols), rows, [-1] * len(paths), exact=True)
    assert res.status == "optimal"
    return res.objective


@pytest.fixture
def rng():
    return random.Random(20261016)


def spread_solution(n: int, X=None):
    """Path on n vertices, singleton family, every set carrying the same small mass.

    The mass per vertex is eps/4 where eps depends on the total, so it is found
    by fixed-point iteration.  These weights are not an LP optimum; they spread
    the mass thinly enough that region growing has to run.
    """
    from coarse_decomp.lp import BalancedSolution
    from coarse_decomp.rounding import RegionParams

    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    fam = singleton_family(g)
    X = (0, n - 1) if X is None else tuple(X)
    w = 1e-3
    for _ in range(60):
        eps = RegionParams.for_objective(n * w, 1).eps
        w = eps / 4
    x = {v: w for v in range(n)}
    return g, fam, X, BalancedSolution(n * w, x, {}, "exact", X)


def layered_king_fixture(sizes=(4, 6, 8)):
    """Apex vertex over stacked king-move grids of growing side.

    Cell (r, c) of layer L+1 touches cells (r-1+dr, c-1+dc) of layer L for
    dr, dc in {-1, 0, 1}; the apex touches all of layer 0.  BFS layers from
    the apex are then the grid layers, and deep layers stay connected.
    """
    ids = {}
    edges = []
    nxt = 1
    for L, side in enumerate(sizes):
        for r in range(side):
            for c in range(side):
                ids[(L, r, c)] = nxt
                nxt += 1
    for (L, r, c), v in ids.items():
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                w = ids.get((L, r + dr, c + dc))
                if w is not None and w > v:
                    edges.append((v, w))
        if L == 0:
            edges.append((0, v))
        else:
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    w = ids.get((L - 1, r - 1 + dr, c - 1 + dc))
                    if w is not None:
                        edges.append((w, v))
    return Graph.from_edges(nxt, sorted(set(edges)))


def hub_fixture(leaves: int, routes: int, length: int, split_routes: bool = False):
    """A star part on a hub plus disjoint routes leaving from some of its leaves.

    Returns (graph, parts, A, B).  The star part is cluttered once it has three
    or more leaves; the route parts are paths, hence clean.
    """
    assert routes <= leaves
    edges_star = [(0, i) for i in range(1, leaves + 1)]
    nxt = leaves + 1
    route_parts: list[list[tuple[int, int]]] = [[], []]
    A, B = [], []
    for r in range(routes):
        prev = r + 1
        A.append(prev)
        for step in range(length):
            route_parts[(step % 2) if split_routes else 0].append((prev, nxt))
            prev = nxt
            nxt += 1
        B.append(prev)
    parts = [edges_star] + [p for p in route_parts if p]
    g = Graph.from_edges(nxt, edges_star + route_parts[0] + route_parts[1])
    return g, parts, A, B


def star_routes(routes: int, leaves: int = 1, tail: int = 0):
    """Disjoint routes, each bending through the center of its own small star.

    Route i runs a_i ... a'_i - c_i - b'_i ... b_i; the star part holds the
    edges at every c_i (two route edges plus ``leaves`` pendant edges), the
    clean part holds the tails.  Returns (graph, parts, A, B).
    """
    edges_star, edges_tail = [], []
    A, B = [], []
    nxt = 0

    def fresh():
        nonlocal nxt
        nxt += 1
        return nxt - 1

    for _ in range(routes):
        c, a1, b1 = fresh(), fresh(), fresh()
        edges_star += [(c, a1), (c, b1)] + [(c, fresh()) for _ in range(leaves)]
        ends = []
        for start in (a1, b1):
            prev = start
            for _ in range(tail):
                w = fresh()
                edges_tail.append((prev, w))
                prev = w
            ends.append(prev)
        A.append(ends[0])
        B.append(ends[1])
    parts = [edges_star] + ([edges_tail] if edges_tail else [])
    return Graph.from_edges(nxt, edges_star + edges_tail), parts, A, B


def flow_reference(g: Graph, A, B) -> int:
    """Vertex-disjoint A-B paths via networkx, terminals included in the disjointness.

    A vertex in both A and B is a one-vertex path, and some maximum packing
    always uses it that way, so those are counted and removed first.
    """
    shared = set(A) & set(B)
    h = to_nx(g)
    h.remove_nodes_from(shared)
    h.add_edges_from(("s", a) for a in A if a not in shared)
    h.add_edges_from((b, "t") for b in B if b not in shared)
    if "s" not in h or "t" not in h or not nx.has_path(h, "s", "t"):
        return len(shared)
    return len(shared) + nx.node_connectivity(h, "s", "t")

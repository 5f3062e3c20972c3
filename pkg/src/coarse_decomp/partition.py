"""Vertex partitions into radius-4 pieces, layer splits, K_{t,t} models and edge partitions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError
from .graph import (
    INF,
    Graph,
    MinorModel,
    connected_components,
    hop_distances,
    induced_subgraph,
    is_connected,
    verify_minor_model,
)

# Ball radius in edges; a path on at most 4 vertices has at most 3 edges.
COVER_EDGES = 3
# Centers at least this many edges apart have non-touching radius-3 balls.
CENTER_GAP = 2 * COVER_EDGES + 2


@dataclass
class RadiusPartition:
    parts: list[frozenset[int]]
    witnesses: list[tuple[frozenset[int], int, int]]  # (component, center, radius in vertices)

    def to_json(self) -> dict:
        return {
            "kind": "radius-partition",
            "parts": [sorted(p) for p in self.parts],
            "witnesses": [{"component": sorted(c), "center": z, "radius_vertices": r}
                          for c, z, r in self.witnesses],
            "convention": "radius counts vertices on the path, distances measured in g",
        }

    def blocks(self) -> list[frozenset[int]]:
        return [c for c, _, _ in self.witnesses]


def check_radius_partition(g: Graph, rp: RadiusPartition, radius_vertices: int = 4,
                           within: Iterable[int] | None = None) -> list[str]:
    problems = []
    universe = set(range(g.n)) if within is None else set(within)
    seen: set[int] = set()
    for i, p in enumerate(rp.parts):
        if seen & p:
            problems.append(f"part {i} overlaps an earlier part")
        seen |= p
    if seen != universe:
        problems.append("parts do not cover the vertex set")
    comps = set()
    for p in rp.parts:
        comps.update(connected_components(g, p))
    recorded = {c for c, _, _ in rp.witnesses}
    if comps != recorded:
        problems.append("witness components differ from the part components")
    for comp, center, _ in rp.witnesses:
        dist = hop_distances(g, [center], limit=radius_vertices - 1)
        far = [v for v in comp if dist[v] > radius_vertices - 1]
        if far:
            problems.append(f"vertex {far[0]} is more than {radius_vertices} vertices from {center}")
    return problems


def greedy_four_radius_partition(g: Graph, within: Iterable[int] | None = None) -> RadiusPartition:
    residue = set(range(g.n)) if within is None else set(within)
    parts: list[frozenset[int]] = []
    witnesses = []
    while residue:
        balls = {}
        reach = {}
        for v in residue:
            dist = hop_distances(g, [v], limit=COVER_EDGES)
            balls[v] = frozenset(w for w in residue if dist[w] <= COVER_EDGES)
            reach[v] = max(dist[w] for w in balls[v])
        order = sorted(residue, key=lambda v: (-len(balls[v]), reach[v], v))
        centers: list[int] = []
        blocked: set[int] = set()
        for v in order:
            if v in blocked:
                continue
            centers.append(v)
            dist = hop_distances(g, [v], limit=CENTER_GAP - 1)
            blocked.update(w for w in range(g.n) if dist[w] < CENTER_GAP)
        part: set[int] = set()
        for c in centers:
            part |= balls[c]
        part = frozenset(part)
        parts.append(part)
        for comp in connected_components(g, part):
            owner = next(c for c in centers if c in comp or balls[c] >= comp)
            dist = hop_distances(g, [owner])
            witnesses.append((comp, owner, int(max(dist[v] for v in comp)) + 1))
        residue -= part
    rp = RadiusPartition(parts, witnesses)
    problems = check_radius_partition(g, rp, 4, within)
    assert not problems, problems[0]
    return rp


def pi4_estimate(g: Graph, S: Iterable[int]) -> int:
    sub = induced_subgraph(g, S)
    return len(greedy_four_radius_partition(sub).parts)


# ---------------------------------------------------------------- layer splits


@dataclass(frozen=True)
class LayerSplit:
    T: frozenset[int]
    M: frozenset[int]
    B: frozenset[int]
    layer: int


def check_layer_split(g: Graph, Y: set[int], sp: LayerSplit) -> list[str]:
    problems = []
    if sp.T & sp.M or sp.T & sp.B or sp.M & sp.B:
        problems.append("T, M, B overlap")
    if not (sp.T | sp.M | sp.B) <= Y:
        problems.append("split leaves Y")
    boundary = {w for v in sp.T for w in g.adjacency[v] if w in Y} - sp.T
    if not boundary <= sp.M:
        problems.append("N(T) within Y is not contained in M")
    if not is_connected(g, sp.T):
        problems.append("T is not connected")
    if not is_connected(g, sp.B):
        problems.append("B is not connected")
    if any(not (g.nbrs[u] & sp.M) for u in sp.B):
        problems.append("some vertex of B has no neighbor in M")
    if any(not (g.nbrs[u] & sp.T) for u in sp.M):
        problems.append("some vertex of M has no neighbor in T")
    return problems


def bfs_layer_split(g: Graph, Y: Iterable[int], v0: int) -> list[LayerSplit]:
    Y = set(Y)
    if v0 not in Y:
        raise ValidationError("v0 must lie in Y")
    if not is_connected(g, Y):
        raise ValidationError("g[Y] must be connected")
    if len(Y) < 3:
        return []
    dist = hop_distances(g, [v0], within=Y)
    depth = int(max(dist[v] for v in Y))
    layers = [frozenset(v for v in Y if dist[v] == i) for i in range(depth + 1)]
    out = []
    below: set[int] = set()
    for i in range(2, depth + 1):
        below |= layers[i - 2]
        for comp in connected_components(g, layers[i]):
            sp = LayerSplit(frozenset(below), layers[i - 1], comp, i)
            problems = check_layer_split(g, Y, sp)
            assert not problems, problems[0]
            out.append(sp)
    return out


# -------------------------------------------------------------- K_{t,t} models


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("COARSE_DECOMP_THREADS", "1")))
    except ValueError:
        return 1


def _pick_split(g: Graph, cands: list[LayerSplit]) -> LayerSplit:
    if _workers() > 1 and len(cands) > 1:
        with ThreadPoolExecutor(_workers()) as pool:
            scores = list(pool.map(lambda sp: pi4_estimate(g, sp.B), cands))
    else:
        scores = [pi4_estimate(g, sp.B) for sp in cands]
    best = min(range(len(cands)), key=lambda i: (-scores[i], -len(cands[i].B), min(cands[i].B)))
    return cands[best]


def _scattered(g: Graph, S: Iterable[int], count: int, gap_edges: int) -> list[int] | None:
    chosen: list[int] = []
    blocked: set[int] = set()
    for v in sorted(S):
        if v in blocked:
            continue
        chosen.append(v)
        if len(chosen) == count:
            return chosen
        dist = hop_distances(g, [v], limit=gap_edges - 1)
        blocked.update(w for w in range(g.n) if dist[w] < gap_edges)
    return None


def extract_ktt_model(g: Graph, t: int) -> MinorModel | None:
    """Try to build a K_{t,t} induced-minor model by repeated layer splitting.

    Returns None when the construction gets stuck; that proves nothing.
    """
    if t < 1:
        raise ValidationError("t must be positive")
    if t == 1:
        edges = g.edges()
        if not edges:
            return None
        u, v = edges[0]
        model = MinorModel(1, (frozenset([u]),), (frozenset([v]),))
        assert verify_minor_model(g, model, 1)
        return model
    comps = [c for c in connected_components(g) if len(c) >= 3]
    for V in sorted(comps, key=lambda c: (-len(c), min(c))):
        splits = []
        for _ in range(t):
            cands = bfs_layer_split(g, V, min(V))
            if not cands:
                break
            sp = _pick_split(g, cands)
            splits.append(sp)
            V = sp.B
        if len(splits) < t:
            continue
        U = _scattered(g, V, t, 5)
        if U is None:
            continue
        side_a = tuple(sp.T for sp in splits)
        side_b = []
        for u in U:
            branch = {u}
            for sp in splits:
                branch.add(min(g.nbrs[u] & sp.M))
            side_b.append(frozenset(branch))
        model = MinorModel(t, side_a, tuple(side_b))
        if not verify_minor_model(g, model, t):
            raise AssertionError("assembled K_{t,t} model failed verification")
        return model
    return None


# ------------------------------------------------------------- edge partitions

Edge = tuple[int, int]


@dataclass
class EdgePartition:
    parts: list[list[Edge]]
    s: int
    clean: list[bool]

    @property
    def cluttered(self) -> int:
        return sum(1 for c in self.clean if not c)

    @property
    def clean_count(self) -> int:
        return sum(1 for c in self.clean if c)

    def to_json(self) -> dict:
        return {"kind": "edge-partition", "parts": [[list(e) for e in p] for p in self.parts],
                "clean": list(self.clean), "s": self.s}

    @classmethod
    def from_json(cls, g: Graph, obj: dict) -> "EdgePartition":
        try:
            parts = [[(int(e[0]), int(e[1])) for e in p] for p in obj["parts"]]
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"bad edge partition JSON: {exc}") from exc
        return classify_parts(g, parts)


def _norm(e: Sequence[int]) -> Edge:
    u, v = int(e[0]), int(e[1])
    return (u, v) if u < v else (v, u)


def part_graph(n: int, part: Iterable[Edge]) -> Graph:
    return Graph.from_edges(n, [_norm(e) for e in part])


def classify_parts(g: Graph, parts: Sequence[Iterable[Sequence[int]]]) -> EdgePartition:
    norm = [sorted(_norm(e) for e in p) for p in parts]
    seen: set[Edge] = set()
    for i, p in enumerate(norm):
        for e in p:
            if not g.has_edge(*e):
                raise ValidationError(f"part {i} holds non-edge {e}")
            if e in seen:
                raise ValidationError(f"edge {e} appears in two parts")
            seen.add(e)
    if len(seen) != g.m:
        raise ValidationError(f"partition covers {len(seen)} of {g.m} edges")
    s = 1
    clean = []
    for p in norm:
        h = part_graph(g.n, p)
        clean.append(h.max_degree() <= 2)
        s = max(s, max((len(c) for c in connected_components(h)), default=1))
    return EdgePartition(norm, s, clean)


def star_edge_partition(g: Graph) -> EdgePartition:
    left = [set(a) for a in g.adjacency]
    parts: list[list[Edge]] = []
    used: list[set[int]] = []
    while True:
        v = max(range(g.n), key=lambda u: (len(left[u]), -u), default=None)
        if v is None or not left[v]:
            break
        leaves = sorted(left[v])
        star = [_norm((v, w)) for w in leaves]
        for w in leaves:
            left[w].discard(v)
        left[v].clear()
        touched = {v, *leaves}
        for i, u in enumerate(used):
            if not (u & touched):
                parts[i].extend(star)
                u |= touched
                break
        else:
            parts.append(star)
            used.append(set(touched))
    return classify_parts(g, parts)

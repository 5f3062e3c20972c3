"""Immutable simple graphs plus the traversal helpers everything else leans on."""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import Inconclusive, ParseError, PathOverflow, ValidationError

INF = math.inf


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None) -> "Graph":
        if n < 0:
            raise ValidationError("negative vertex count")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValidationError(f"self-loop at {u}")
            if v in nbrs[u]:
                raise ValidationError(f"duplicate edge ({u},{v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        if labels is not None:
            labels = tuple(int(x) for x in labels)
            if len(labels) != n:
                raise ValidationError("label map length differs from n")
        return cls(n, adj, labels)

    @cached_property
    def nbrs(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbrs[u]

    def label(self, v: int) -> int:
        return v if self.labels is None else self.labels[v]

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        try:
            return cls.from_edges(int(obj["n"]), obj["edges"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad graph JSON: {exc}") from exc


@dataclass(frozen=True)
class QuotientMap:
    blocks: tuple[frozenset[int], ...]
    block_of: dict[int, int]

    def lift(self, qvertices: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for q in qvertices:
            out |= self.blocks[q]
        return out

    def project(self, vertices: Iterable[int]) -> set[int]:
        return {self.block_of[v] for v in vertices if v in self.block_of}


@dataclass(frozen=True)
class PathSet:
    paths: tuple[tuple[int, ...], ...]
    endpoints_kind: str = "A-B"
    induced: bool = True

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


_HEADER = re.compile(r"#\s*n\s*=\s*(\d+)\s*$")


def from_edge_list(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    declared = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            mt = _HEADER.match(line)
            if mt:
                declared = int(mt.group(1))
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected 'u v', got {raw!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"non-integer vertex in {raw!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError("negative vertex id", lineno)
        if u == v:
            raise ValidationError(f"line {lineno}: self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append(key)
    n = 1 + max((max(e) for e in edges), default=-1)
    if declared is not None:
        if declared < n:
            raise ValidationError(f"header n={declared} but vertex {n - 1} used")
        n = declared
    return Graph.from_edges(n, edges)


def to_edge_list(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"# n={g.n}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def _check_ids(g: Graph, S: Iterable[int]) -> list[int]:
    out = sorted(set(S))
    if out and (out[0] < 0 or out[-1] >= g.n):
        raise ValidationError("vertex id out of range")
    return out


def induced_subgraph(g: Graph, S: Iterable[int]) -> Graph:
    """Subgraph on S; vertex i of the result is the i-th smallest member of S."""
    verts = _check_ids(g, S)
    index = {v: i for i, v in enumerate(verts)}
    edges = [
        (index[u], index[w])
        for u in verts
        for w in g.adjacency[u]
        if u < w and w in index
    ]
    return Graph.from_edges(len(verts), edges, labels=verts)


def _bfs_component(g: Graph, start: int, allowed) -> list[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in seen and (allowed is None or w in allowed):
                seen.add(w)
                queue.append(w)
    return sorted(seen)


def connected_components(g: Graph, within: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Components of g (or of g[within]), ordered by minimum vertex."""
    allowed = None if within is None else set(within)
    order = range(g.n) if allowed is None else sorted(allowed)
    done: set[int] = set()
    comps = []
    for v in order:
        if v in done:
            continue
        comp = _bfs_component(g, v, allowed)
        done.update(comp)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph, S: Iterable[int]) -> bool:
    S = set(S)
    if not S:
        return False
    return len(_bfs_component(g, min(S), S)) == len(S)


def quotient_by_components(g: Graph, parts: Sequence[Iterable[int]]) -> tuple[Graph, QuotientMap]:
    blocks = [frozenset(p) for p in parts]
    block_of: dict[int, int] = {}
    for i, b in enumerate(blocks):
        if not b:
            raise ValidationError(f"part {i} is empty")
        for v in b:
            if v in block_of:
                raise ValidationError(f"vertex {v} lies in parts {block_of[v]} and {i}")
            block_of[v] = i
        if not is_connected(g, b):
            raise ValidationError(f"part {i} does not induce a connected subgraph")
    if len(block_of) != g.n:
        missing = sorted(set(range(g.n)) - block_of.keys())[:5]
        raise ValidationError(f"parts do not cover V; missing e.g. {missing}")
    qedges = set()
    for u, v in g.edges():
        a, b = block_of[u], block_of[v]
        if a != b:
            qedges.add((min(a, b), max(a, b)))
    q = Graph.from_edges(len(blocks), sorted(qedges))
    return q, QuotientMap(tuple(blocks), block_of)


def hop_distances(g: Graph, sources: Iterable[int], within: Iterable[int] | None = None,
                  limit: float = INF) -> list[float]:
    """BFS distances (edge counts) from the nearest source; INF when unreachable."""
    allowed = None if within is None else set(within)
    dist: list[float] = [INF] * g.n
    queue = deque()
    for s in sources:
        if dist[s] != 0 and (allowed is None or s in allowed):
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        if dist[u] >= limit:
            continue
        for w in g.adjacency[u]:
            if dist[w] == INF and (allowed is None or w in allowed):
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def ball(g: Graph, center: int, radius_edges: int) -> set[int]:
    dist = hop_distances(g, [center], limit=radius_edges)
    return {v for v in range(g.n) if dist[v] <= radius_edges}


def shortest_path(g: Graph, sources: Iterable[int], targets: Iterable[int],
                  within: Iterable[int] | None = None) -> tuple[int, ...] | None:
    """Fewest-vertex path from sources to targets inside g[within].

    Among shortest candidates the lexicographically least vertex sequence wins.
    Shortest paths in an induced subgraph are automatically induced.
    """
    allowed = None if within is None else set(within)
    tset = [t for t in targets if allowed is None or t in allowed]
    dist = hop_distances(g, tset, within=allowed)
    starts = [s for s in sources if (allowed is None or s in allowed) and dist[s] < INF]
    if not starts:
        return None
    best = min(dist[s] for s in starts)
    cur = min(s for s in starts if dist[s] == best)
    path = [cur]
    while dist[cur] > 0:
        cur = min(w for w in g.adjacency[cur] if dist[w] == dist[cur] - 1)
        path.append(cur)
    return tuple(path)


def is_path(g: Graph, seq: Sequence[int]) -> bool:
    if not seq or len(set(seq)) != len(seq):
        return False
    return all(g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def is_induced_path(g: Graph, seq: Sequence[int]) -> bool:
    if not is_path(g, seq):
        return False
    inside = set(seq)
    inner_edges = sum(1 for v in seq for w in g.adjacency[v] if w in inside) // 2
    return inner_edges == len(seq) - 1


def extract_induced_path_from_walk(g: Graph, walk: Sequence[int]) -> tuple[int, ...]:
    for a, b in zip(walk, walk[1:]):
        if a != b and not g.has_edge(a, b):
            raise ValidationError(f"walk uses non-edge ({a},{b})")
    path = shortest_path(g, [walk[0]], [walk[-1]], within=walk)
    assert path is not None, "walk endpoints disconnected inside the walk"
    return path


def enumerate_induced_paths(g: Graph, A: Iterable[int], B: Iterable[int], cap: int = 200_000,
                            minimal: bool = False,
                            within: Iterable[int] | None = None) -> PathSet:
    """All induced paths that start in A and end in B.

    Each vertex set is reported once; when both orientations run from A to B
    the lexicographically smaller sequence is kept.  With ``minimal`` only paths
    whose first vertex is their sole A-vertex and whose last vertex is their
    sole B-vertex are returned.  More than ``cap`` paths raises PathOverflow.
    """
    A = set(A)
    B = set(B)
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    allowed = None if within is None else set(within)
    found: dict[frozenset[int], tuple[int, ...]] = {}
    budget = max(50 * cap, 10_000)
    steps = 0
    cnt = [0] * g.n
    onpath = [False] * g.n
    path: list[int] = []

    def record():
        key = frozenset(path)
        seq = tuple(path)
        rev = seq[::-1]
        if rev[0] in A and rev[-1] in B:
            seq = min(seq, rev)
        if key not in found:
            found[key] = seq
            if len(found) > cap:
                raise PathOverflow(cap)

    def push(v):
        path.append(v)
        onpath[v] = True
        for w in g.adjacency[v]:
            cnt[w] += 1

    def pop():
        v = path.pop()
        onpath[v] = False
        for w in g.adjacency[v]:
            cnt[w] -= 1

    def extend():
        nonlocal steps
        steps += 1
        if steps > budget:
            raise PathOverflow(cap)
        last = path[-1]
        if last in B:
            record()
            if minimal:
                return
        for w in g.adjacency[last]:
            if onpath[w] or cnt[w] != 1:
                continue
            if allowed is not None and w not in allowed:
                continue
            if minimal and w in A:
                continue
            push(w)
            extend()
            pop()

    for s in sorted(A):
        if allowed is not None and s not in allowed:
            continue
        push(s)
        extend()
        pop()
    paths = tuple(sorted(found.values(), key=lambda p: (len(p), p)))
    return PathSet(paths, "A-B", True)


def is_anticomplete(g: Graph, S1: Iterable[int], S2: Iterable[int]) -> bool:
    S1 = set(S1)
    S2 = set(S2)
    if S1 & S2:
        return False
    return not any(w in S2 for v in S1 for w in g.adjacency[v])


def separates(g: Graph, S: Iterable[int], A: Iterable[int], B: Iterable[int]) -> bool:
    """True iff every A-B path in g meets S."""
    S = set(S)
    keep = set(range(g.n)) - S
    dist = hop_distances(g, [a for a in A if a in keep], within=keep)
    return all(dist[b] == INF for b in B if b in keep)


@dataclass(frozen=True)
class MinorModel:
    t: int
    side_a: tuple[frozenset[int], ...]
    side_b: tuple[frozenset[int], ...]

    def to_json(self) -> dict:
        return {"kind": "minor", "t": self.t,
                "A": [sorted(s) for s in self.side_a],
                "B": [sorted(s) for s in self.side_b]}

    @classmethod
    def from_json(cls, obj: dict) -> "MinorModel":
        return cls(int(obj["t"]), tuple(frozenset(s) for s in obj["A"]),
                   tuple(frozenset(s) for s in obj["B"]))


def _touch(g: Graph, X: frozenset[int], Y: frozenset[int]) -> bool:
    small, big = (X, Y) if len(X) <= len(Y) else (Y, X)
    return any(w in big for v in small for w in g.adjacency[v])


def verify_minor_model(g: Graph, model: MinorModel, t: int) -> bool:
    if model.t != t or len(model.side_a) != t or len(model.side_b) != t:
        return False
    sets = list(model.side_a) + list(model.side_b)
    used: set[int] = set()
    for s in sets:
        if not s or any(v < 0 or v >= g.n for v in s):
            return False
        if used & s:
            return False
        used |= s
        if not is_connected(g, s):
            return False
    for side in (model.side_a, model.side_b):
        for i in range(t):
            for j in range(i + 1, t):
                if _touch(g, side[i], side[j]):
                    return False
    return all(_touch(g, a, b) for a in model.side_a for b in model.side_b)


def detect_ktt_induced_minor(g: Graph, t: int, budget: int = 2_000_000) -> MinorModel | None:
    """Exhaustive K_{t,t} induced-minor search by vertex labelling.

    Labels: 0 = deleted, 1..t = side A branch sets, t+1..2t = side B.  Branch
    sets of a side are opened in increasing order, and side A opens first, to
    cut symmetric duplicates.  Raises Inconclusive when ``budget`` nodes are spent.
    """
    if t < 1:
        raise ValidationError("t must be positive")
    n = g.n
    label = [0] * n
    nodes = 0

    def side(lab):
        return 0 if lab <= t else 1

    def compatible(v, lab):
        for w in g.adjacency[v]:
            lw = label[w]
            if w < v and lw and lw != lab and side(lw) == side(lab):
                return False
        return True

    def finish():
        groups: dict[int, set[int]] = {}
        for v, lab in enumerate(label):
            if lab:
                groups.setdefault(lab, set()).add(v)
        if len(groups) != 2 * t:
            return None
        model = MinorModel(t, tuple(frozenset(groups[i]) for i in range(1, t + 1)),
                           tuple(frozenset(groups[i]) for i in range(t + 1, 2 * t + 1)))
        return model if verify_minor_model(g, model, t) else None

    def go(v, opened_a, opened_b):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise Inconclusive(f"K_{t},{t} search exceeded {budget} nodes")
        remaining = n - v
        if (t - opened_a) + (t - opened_b) > remaining:
            return None
        if v == n:
            return finish()
        choices = [0] + list(range(1, opened_a + 1))
        if opened_a < t:
            choices.append(opened_a + 1)
        if opened_a > 0:
            choices += list(range(t + 1, t + 1 + opened_b))
            if opened_b < t:
                choices.append(t + 1 + opened_b)
        for lab in choices:
            if lab and not compatible(v, lab):
                continue
            label[v] = lab
            na = max(opened_a, lab) if 0 < lab <= t else opened_a
            nb = max(opened_b, lab - t) if lab > t else opened_b
            res = go(v + 1, na, nb)
            if res is not None:
                return res
            label[v] = 0
        return None

    return go(0, 0, 0)


def _dijkstra(g: Graph, weights: Sequence[float], sources: Iterable[int], allowed=None):
    import heapq

    best: list = [None] * g.n
    pred = [-1] * g.n
    heap = []
    for s in sorted(set(sources)):
        if allowed is not None and s not in allowed:
            continue
        key = (float(weights[s]), 1)
        if best[s] is None or key < best[s]:
            best[s] = key
            heapq.heappush(heap, (key[0], key[1], s))
    done = [False] * g.n
    while heap:
        w, h, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in g.adjacency[u]:
            if done[v] or (allowed is not None and v not in allowed):
                continue
            key = (w + float(weights[v]), h + 1)
            if best[v] is None or key < best[v]:
                best[v] = key
                pred[v] = u
                heapq.heappush(heap, (key[0], key[1], v))
    return best, pred


def vertex_weighted_distance(g: Graph, weights: Sequence[float], sources: Iterable[int],
                             within: Iterable[int] | None = None) -> list[float]:
    """Minimum over paths from a source of the summed vertex weights, both ends included."""
    allowed = None if within is None else set(within)
    best, _ = _dijkstra(g, weights, sources, allowed)
    return [INF if b is None else b[0] for b in best]


def lightest_path(g: Graph, weights: Sequence[float], sources: Iterable[int],
                  targets: Iterable[int], within: Iterable[int] | None = None):
    """(weight, path) of a minimum-weight, then fewest-vertex, source-target path."""
    allowed = None if within is None else set(within)
    best, pred = _dijkstra(g, weights, sources, allowed)
    cands = [t for t in set(targets) if best[t] is not None]
    if not cands:
        return None
    t = min(cands, key=lambda v: (best[v], v))
    path = [t]
    while pred[path[-1]] != -1:
        path.append(pred[path[-1]])
    path.reverse()
    return best[t][0], tuple(path)

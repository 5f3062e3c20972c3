"""Layered families built from ordered vertex partitions."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ValidationError
from .graph import Graph, shortest_path


@dataclass(frozen=True)
class OrderedPartition:
    parts: tuple[tuple[int, ...], ...]

    @cached_property
    def part_of(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def validate(self, g: Graph) -> None:
        seen: set[int] = set()
        for p in self.parts:
            for v in p:
                if v in seen:
                    raise ValidationError(f"vertex {v} appears in two parts")
                if not 0 <= v < g.n:
                    raise ValidationError(f"vertex {v} out of range")
                seen.add(v)
        if len(seen) != g.n:
            raise ValidationError("partition does not cover every vertex")

    def restrict(self, verts: Sequence[int]) -> "OrderedPartition":
        """Partition of the induced subgraph whose i-th vertex is verts[i]."""
        index = {v: i for i, v in enumerate(verts)}
        return OrderedPartition(tuple(
            tuple(sorted(index[v] for v in p if v in index)) for p in self.parts))


def degeneracy(g: Graph) -> int:
    deg = [g.degree(v) for v in range(g.n)]
    buckets: list[set[int]] = [set() for _ in range(max(deg, default=0) + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * g.n
    best = 0
    low = 0
    for _ in range(g.n):
        low = max(0, low - 1)
        while not buckets[low]:
            low += 1
        v = min(buckets[low])
        buckets[low].discard(v)
        removed[v] = True
        best = max(best, low)
        for w in g.adjacency[v]:
            if not removed[w]:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets[deg[w]].add(w)
    return best


def degeneracy_layering(g: Graph, d: int | None = None) -> OrderedPartition:
    """Peel off all vertices of residual degree <= 4d, repeatedly."""
    true_d = degeneracy(g)
    if d is None:
        d = true_d
    if d < true_d:
        raise ValidationError(
            f"d={d} is below the degeneracy: some subgraph has minimum degree {true_d}")
    alive = set(range(g.n))
    deg = {v: g.degree(v) for v in alive}
    parts = []
    while alive:
        layer = sorted(v for v in alive if deg[v] <= 4 * d)
        assert layer, "no low-degree vertex although d >= degeneracy"
        parts.append(tuple(layer))
        for v in layer:
            alive.discard(v)
        for v in layer:
            for w in g.adjacency[v]:
                if w in alive:
                    deg[w] -= 1
    return OrderedPartition(tuple(parts))


@dataclass(frozen=True, eq=False)
class LayeredFamily:
    partition: OrderedPartition
    parents: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...]
    sets: dict[int, frozenset[int]]
    thickness: int

    @property
    def centers(self) -> list[int]:
        return sorted(self.sets)

    @cached_property
    def member_of(self) -> tuple[tuple[int, ...], ...]:
        """For each vertex, the centers whose sets contain it."""
        n = len(self.parents)
        acc: list[list[int]] = [[] for _ in range(n)]
        for c in sorted(self.sets):
            for v in self.sets[c]:
                acc[v].append(c)
        return tuple(tuple(a) for a in acc)

    def __len__(self) -> int:
        return len(self.sets)

    def sets_meeting(self, S: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for v in S:
            out.update(self.member_of[v])
        return out

    def to_json(self) -> dict:
        return {
            "parts": [list(p) for p in self.partition.parts],
            "sets": {str(c): sorted(self.sets[c]) for c in sorted(self.sets)},
            "thickness": self.thickness,
        }


def build_layered_family(g: Graph, partition: OrderedPartition) -> LayeredFamily:
    partition.validate(g)
    part_of = partition.part_of
    parents = []
    children = []
    for v in range(g.n):
        pv = part_of[v]
        parents.append(tuple(w for w in g.adjacency[v] if part_of[w] > pv))
        children.append(tuple(w for w in g.adjacency[v] if part_of[w] < pv))
    sets: dict[int, frozenset[int]] = {}
    thickness = 1
    for c in range(g.n):
        if parents[c]:
            continue
        seen = {c}
        stack = [c]
        while stack:
            u = stack.pop()
            for w in children[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        sets[c] = frozenset(seen)
        thickness = max(thickness, len({part_of[v] for v in seen}))
    return LayeredFamily(partition, tuple(parents), tuple(children), sets, thickness)


def family_for(g: Graph, d: int | None = None) -> LayeredFamily:
    return build_layered_family(g, degeneracy_layering(g, d))


@dataclass(frozen=True)
class WitnessingReport:
    d: int
    worst_excess: int
    ok: bool


def verify_witnessing(g: Graph, fam: LayeredFamily, d: int) -> WitnessingReport:
    worst = 0
    for c, F in fam.sets.items():
        for v in F:
            closed = set(g.adjacency[v]) | {v}
            worst = max(worst, len(closed - F))
    return WitnessingReport(d, worst, worst <= d)


def _closure(step: Sequence[Sequence[int]], S: Iterable[int]) -> set[int]:
    seen = set(S)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for w in step[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def upward_closure(fam: LayeredFamily, S: Iterable[int]) -> set[int]:
    return _closure(fam.parents, S)


def downward_closure(fam: LayeredFamily, S: Iterable[int]) -> set[int]:
    return _closure(fam.children, S)


def _chain_to_center(fam: LayeredFamily, F: frozenset[int], v: int) -> list[int]:
    chain = [v]
    while True:
        ps = [p for p in fam.parents[chain[-1]] if p in F]
        if not ps:
            return chain
        chain.append(min(ps))


def ancestral_path(g: Graph, fam: LayeredFamily, center: int, u: int, v: int) -> tuple[int, ...]:
    """Short u-v path inside the set of ``center`` made of ancestors of u or v."""
    if center not in fam.sets:
        raise ValidationError(f"{center} is not a center")
    F = fam.sets[center]
    if u not in F or v not in F:
        raise ValidationError(f"{u} and {v} must both lie in the set of {center}")
    if u == v:
        return (u,)
    union = set(_chain_to_center(fam, F, u)) | set(_chain_to_center(fam, F, v))
    path = shortest_path(g, [u], [v], within=union)
    assert path is not None
    return path


@dataclass(frozen=True)
class MinimalityVerdict:
    status: str  # "minimal" | "witness" | "budget-exhausted"
    witness: tuple[int, ...] | None = None

    @property
    def minimal(self) -> bool:
        return self.status == "minimal"


def is_upward_minimal(g: Graph, fam: LayeredFamily, P: Sequence[int],
                      budget: int = 100_000) -> MinimalityVerdict:
    """Search all simple paths with P's endpoints for a smaller upward closure.

    A competitor can only use vertices of P's own upward closure (its closure
    must be contained in it), which keeps the search small.
    """
    P = tuple(P)
    if len(P) <= 1:
        return MinimalityVerdict("minimal")
    hp = frozenset(upward_closure(fam, P))
    u, v = P[0], P[-1]
    expanded = 0
    path = [u]
    onpath = {u}

    def dfs():
        nonlocal expanded
        expanded += 1
        if expanded > budget:
            raise _Budget
        last = path[-1]
        if last == v:
            if tuple(path) == P:
                return None
            hq = upward_closure(fam, path)
            if hq < hp or (hq == hp and len(path) < len(P)):
                return tuple(path)
            return None
        for w in g.adjacency[last]:
            if w in onpath or w not in hp:
                continue
            path.append(w)
            onpath.add(w)
            res = dfs()
            path.pop()
            onpath.discard(w)
            if res is not None:
                return res
        return None

    try:
        found = dfs()
    except _Budget:
        return MinimalityVerdict("budget-exhausted")
    if found is None:
        return MinimalityVerdict("minimal")
    return MinimalityVerdict("witness", found)


class _Budget(Exception):
    pass


def log2_ceil(n: int) -> int:
    return 0 if n <= 1 else math.ceil(math.log2(n))

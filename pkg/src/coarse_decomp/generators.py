"""Deterministic fixture graphs, some with A/B terminal sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graph import Graph

KINDS = ("grid", "path", "star", "cycle", "gnp", "theta", "corridor", "two-balls")


@dataclass
class Fixture:
    graph: Graph
    terminals: dict[str, list[int]] = field(default_factory=dict)

    def comments(self) -> list[str]:
        return [f"{name}={','.join(map(str, vs))}" for name, vs in sorted(self.terminals.items())]


def _need(params, count, kind):
    if len(params) != count:
        raise ValidationError(f"{kind} takes {count} parameter(s), got {len(params)}")


def _positive(*vals):
    if any(v < 1 for v in vals):
        raise ValidationError("size parameters must be positive")


def grid(rows: int, cols: int) -> Graph:
    _positive(rows, cols)
    edges = [(r * cols + c, r * cols + c + 1) for r in range(rows) for c in range(cols - 1)]
    edges += [(r * cols + c, (r + 1) * cols + c) for r in range(rows - 1) for c in range(cols)]
    return Graph.from_edges(rows * cols, edges)


def path(n: int) -> Graph:
    _positive(n)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    if leaves < 0:
        raise ValidationError("leaf count must be non-negative")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValidationError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gnp(n: int, p: float, seed: int) -> Graph:
    if n < 0 or not 0 <= p <= 1:
        raise ValidationError("gnp needs n >= 0 and 0 <= p <= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(n * (n - 1) // 2)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph.from_edges(n, [e for e, x in zip(pairs, draws) if x < p])


def theta(length: int, branches: int) -> Fixture:
    """Two terminals joined by ``branches`` internally disjoint paths of ``length`` edges."""
    _positive(length, branches)
    if length == 1 and branches > 1:
        raise ValidationError("parallel single edges are not simple")
    edges = []
    n = 2
    for _ in range(branches):
        prev = 0
        for _ in range(length - 1):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, 1))
    return Fixture(Graph.from_edges(n, edges), {"A": [0], "B": [1]})


def corridor(width: int, length: int) -> Fixture:
    """``width`` pairwise anticomplete paths on ``length`` vertices each."""
    _positive(width, length)
    edges = [(w * length + i, w * length + i + 1) for w in range(width) for i in range(length - 1)]
    A = [w * length for w in range(width)]
    B = [w * length + length - 1 for w in range(width)]
    return Fixture(Graph.from_edges(width * length, edges), {"A": A, "B": B})


def two_balls(side: int = 4, bridge: int = 3) -> Fixture:
    """Two side x side grids joined by a path of ``bridge`` vertices; every route uses it."""
    _positive(side, bridge)
    g1 = grid(side, side)
    cells = side * side
    edges = list(g1.edges()) + [(u + cells, v + cells) for u, v in g1.edges()]
    chain = list(range(2 * cells, 2 * cells + bridge))
    edges += list(zip(chain, chain[1:]))
    edges.append((cells - 1, chain[0]))
    edges.append((chain[-1], cells))
    A = list(range(side))
    B = list(range(2 * cells - side, 2 * cells))
    return Fixture(Graph.from_edges(2 * cells + bridge, edges), {"A": A, "B": B})


def gen_graph(kind: str, params=(), seed: int = 0) -> Fixture:
    params = list(params)
    try:
        if kind == "grid":
            _need(params, 2, kind)
            return Fixture(grid(int(params[0]), int(params[1])))
        if kind == "path":
            _need(params, 1, kind)
            return Fixture(path(int(params[0])))
        if kind == "star":
            _need(params, 1, kind)
            return Fixture(star(int(params[0])))
        if kind == "cycle":
            _need(params, 1, kind)
            return Fixture(cycle(int(params[0])))
        if kind == "gnp":
            _need(params, 2, kind)
            return Fixture(gnp(int(params[0]), float(params[1]), seed))
        if kind == "theta":
            _need(params, 2, kind)
            return theta(int(params[0]), int(params[1]))
        if kind == "corridor":
            _need(params, 2, kind)
            return corridor(int(params[0]), int(params[1]))
        if kind == "two-balls":
            if len(params) not in (0, 2):
                raise ValidationError("two-balls takes 0 or 2 parameters")
            return two_balls(*(int(p) for p in params))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad parameter for {kind}: {exc}") from exc
    raise ValidationError(f"unknown generator {kind!r}; choose from {', '.join(KINDS)}")

"""Randomized constructions driven by LP duals: path packings and dense subgraphs."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import SamplingFailure, ValidationError
from .family import LayeredFamily
from .graph import Graph, connected_components, hop_distances, induced_subgraph, INF
from .lp import AbLpSolution, BalancedDual

MAX_ATTEMPTS = 64


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class PathPacking:
    paths: list[tuple[int, ...]]
    congestion: dict[int, int]
    max_intersection: int
    ell: float
    f: float
    transcript: dict

    def to_json(self) -> dict:
        return {
            "kind": "path-multiset",
            "paths": [list(p) for p in self.paths],
            "congestion": {str(c): v for c, v in sorted(self.congestion.items()) if v},
            "max_intersection": self.max_intersection,
            "ell": self.ell,
            "f": self.f,
            "transcript": self.transcript,
        }


def _intersections(fam: LayeredFamily, P) -> Counter:
    cnt: Counter = Counter()
    for v in P:
        for c in fam.member_of[v]:
            cnt[c] += 1
    return cnt


def sample_path_multiset(g: Graph, fam: LayeredFamily, A: Iterable[int], B: Iterable[int],
                         sol: AbLpSolution, ell: float, seed: int,
                         max_attempts: int = MAX_ATTEMPTS) -> PathPacking:
    if sol.mode != "exact" or not sol.upward_minimal:
        raise ValidationError("sampling needs an exact dual restricted to upward-minimal paths")
    support = sorted((P, y) for P, y in sol.dual.items() if y > 1e-12)
    f = float(sum(y for _, y in support))
    if f <= 1e-12:
        raise ValidationError("dual objective is zero; nothing to sample")
    need = math.log2(4 * len(fam)) / 6
    if ell < need - 1e-12:
        raise ValidationError(f"ell={ell} below the required {need:.4g}")
    count = math.ceil(f * ell - 1e-9)
    probs = np.array([y for _, y in support]) / f
    k = fam.thickness
    cap = 6 * ell
    history = []
    for attempt in range(max_attempts):
        rng = _rng(seed + attempt)
        idx = rng.choice(len(support), size=count, p=probs)
        paths = [support[i][0] for i in idx]
        congestion: Counter = Counter()
        worst = 0
        for P in paths:
            inter = _intersections(fam, P)
            worst = max(worst, max(inter.values(), default=0))
            for c in inter:
                congestion[c] += 1
        peak = max(congestion.values(), default=0)
        history.append(peak)
        if peak <= cap:
            if worst > 2 * k - 1:
                raise AssertionError(f"sampled path meets a set in {worst} > 2k-1 vertices")
            transcript = {"seed": seed, "attempts": attempt + 1,
                          "draws": [int(i) for i in idx], "accepted": True}
            return PathPacking(paths, dict(congestion), worst, ell, f, transcript)
    raise SamplingFailure("congestion bound failed on every attempt",
                          {"seed": seed, "attempts": max_attempts, "peak_congestion": history})


class TripleSampler:
    """Draw (u, v, P or None): u by rho, v uniform on X, then eta vs gamma."""

    def __init__(self, dual: BalancedDual):
        self.dual = dual
        self.X = list(dual.X)
        rho = np.array([max(0.0, dual.rho[u]) for u in self.X])
        total = rho.sum()
        if total <= 1e-15:
            raise ValidationError("rho is zero; triple distribution undefined")
        self.rho_p = rho / total
        self._paths = {}
        for pair, paths in dual.gamma.items():
            items = sorted((P, w) for P, w in paths.items() if w > 0)
            self._paths[pair] = items

    def draw(self, rng: np.random.Generator):
        u = self.X[rng.choice(len(self.X), p=self.rho_p)]
        v = self.X[rng.integers(len(self.X))]
        eta = max(0.0, self.dual.eta.get((u, v), 0.0))
        items = self._paths.get((u, v), [])
        gam = sum(w for _, w in items)
        if eta + gam <= 1e-15:
            return u, v, None
        if rng.random() < eta / (eta + gam):
            return u, v, None
        ws = np.array([w for _, w in items]) / gam
        return u, v, items[rng.choice(len(items), p=ws)][0]


def build_triple_distribution(dual: BalancedDual) -> TripleSampler:
    return TripleSampler(dual)


@dataclass
class SampledSubgraph:
    vertices: frozenset[int]
    H: Graph
    membership: dict[int, int]
    bound: float
    ell: int
    f: float
    transcript: dict

    def to_json(self) -> dict:
        return {
            "kind": "sampled-subgraph",
            "vertices": sorted(self.vertices),
            "membership_max": max(self.membership.values(), default=0),
            "bound": self.bound,
            "ell": self.ell,
            "f": self.f,
            "transcript": self.transcript,
        }


def dense_subgraph_ell(f: float, n: int, x_size: int) -> int:
    return math.ceil(7 * (f * math.log2(max(n, 2)) + x_size + 2))


def sample_dense_subgraph(g: Graph, fam: LayeredFamily, X: Iterable[int], dual: BalancedDual,
                          ell: int, seed: int, max_attempts: int = MAX_ATTEMPTS) -> SampledSubgraph:
    X = sorted(set(X))
    if not dual.upward_minimal:
        raise ValidationError("dual must be restricted to upward-minimal paths first")
    f = dual.objective
    if f <= 1e-12:
        raise ValidationError("dual objective is zero")
    need = 7 * (f * math.log2(max(g.n, 2)) + len(X) + 2)
    if ell < need - 1e-9:
        raise ValidationError(f"ell={ell} below the required {need:.4g}")
    ell = int(ell)
    sampler = TripleSampler(dual)
    k = fam.thickness
    bound = 1 + (3 * ell / (5 * f)) * (2 * k - 1)
    for attempt in range(max_attempts):
        rng = _rng(seed + attempt)
        triples = [sampler.draw(rng) for _ in range(ell)]
        verts = set(X)
        for _, _, P in triples:
            if P is not None:
                verts.update(P)
        membership = {c: len(fam.sets[c] & verts) for c in fam.sets_meeting(verts)}
        if all(m <= bound + 1e-9 for m in membership.values()):
            transcript = {"seed": seed, "attempts": attempt + 1, "accepted": True,
                          "triples": [[u, v, None if P is None else list(P)] for u, v, P in triples]}
            return SampledSubgraph(frozenset(verts), induced_subgraph(g, verts), membership,
                                   bound, ell, f, transcript)
    raise SamplingFailure("membership bound failed on every attempt",
                          {"seed": seed, "attempts": max_attempts})


def split_balanced_to_two_sided(g: Graph, A: Iterable[int], S: Iterable[int]):
    """Split A into two sides of size <= 2|A|/3 that S separates."""
    A = sorted(set(A))
    S = set(S)
    size = len(A)
    keep = set(range(g.n)) - S
    comps = connected_components(g, keep)
    Aset = set(A)
    if any(len(C & Aset) > size / 2 + 1e-12 for C in comps):
        raise ValidationError("S is not an (A,1/2)-balanced separator")
    if size <= 1:
        return set(A), set()
    in_s = [a for a in A if a in S]
    if len(in_s) >= size / 2:
        A1 = set(in_s[: math.ceil(size / 2)])
    else:
        groups = sorted((sorted(C & Aset) for C in comps if C & Aset), key=lambda grp: (-len(grp), grp))
        groups.append(in_s)
        A1 = set()
        for grp in groups:
            if len(A1) >= size / 3:
                break
            A1.update(grp)
    A2 = Aset - A1
    assert len(A1) <= 2 * size / 3 + 1e-12 and len(A2) <= 2 * size / 3 + 1e-12
    dist = hop_distances(g, [a for a in A1 if a in keep], within=keep)
    assert all(dist[a] == INF for a in A2 if a in keep), "split sides not separated"
    return A1, A2


def _small_unions(fam: LayeredFamily, verts: set[int], max_sets: int):
    cols = sorted(fam.sets_meeting(verts))
    for r in range(0, max_sets + 1):
        for combo in combinations(cols, r):
            U = set()
            for c in combo:
                U |= fam.sets[c] & verts
            yield combo, U


def audit_balanced_cover(H: Graph, vertices: list[int], fam: LayeredFamily, X: Iterable[int],
                         f: float, max_vertices: int = 14):
    """Check that no (X,1/2)-balanced separator of H is covered by fewer than f sets.

    Balance is monotone under adding vertices, so it is enough to test the
    union of every subfamily of size < f.  Returns (ok, offending subfamily).
    ``vertices[i]`` is the original id of H's vertex i.
    """
    if H.n > max_vertices:
        return None, None
    local = {v: i for i, v in enumerate(vertices)}
    Xl = {local[x] for x in X}
    max_sets = math.ceil(f) - 1
    for combo, U in _small_unions(fam, set(vertices), max_sets):
        Ul = {local[v] for v in U}
        keep = set(range(H.n)) - Ul
        if all(len(C & Xl) <= len(Xl) / 2 for C in connected_components(H, keep)):
            return False, combo
    return True, None

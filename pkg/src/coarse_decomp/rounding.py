"""Turning fractional LP solutions into separators with cover certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .family import LayeredFamily, build_layered_family, downward_closure
from .graph import (
    INF,
    Graph,
    connected_components,
    induced_subgraph,
    separates,
    vertex_weighted_distance,
)
from .lp import (
    CHECK_TOL,
    AbLpSolution,
    BalancedSolution,
    _solve,
    normalize_ab_solution,
    solve_ab_lp,
    vertex_mass,
)

__all__ = [
    "SeparatorCertificate",
    "fractional_cover",
    "greedy_cover",
    "round_ab_separator",
    "region_grow_once",
    "round_balanced_separator",
    "vertex_weighted_distance",
    "is_balanced",
]


@dataclass
class SeparatorCertificate:
    kind: str  # "ab" | "balanced"
    separator: frozenset[int]
    fcov: float
    cover_weights: dict[int, float]
    cover_centers: list[int]
    radius_vertices: int
    ledger: dict = field(default_factory=dict)
    rounds: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "separator": sorted(self.separator),
            "cover": {"centers": list(self.cover_centers), "radius_vertices": self.radius_vertices},
            "fcov": self.fcov,
            "ledger": self.ledger,
        }


def fractional_cover(fam: LayeredFamily, S: Iterable[int]) -> tuple[float, dict[int, float]]:
    """min sum x_F subject to every vertex of S lying in sets of total weight >= 1."""
    S = sorted(set(S))
    if not S:
        return 0.0, {}
    cols = sorted(fam.sets_meeting(S))
    idx = {c: i for i, c in enumerate(cols)}
    rows = [{idx[c]: -1.0 for c in fam.member_of[v]} for v in S]
    res = _solve(np.ones(len(cols)), rows, [-1.0] * len(S), len(cols), [(0, None)] * len(cols))
    w = {c: float(res.x[i]) for i, c in enumerate(cols) if res.x[i] > 1e-12}
    return float(res.fun), w


@dataclass
class CoverResult:
    centers: list[int]
    size: int
    fcov: float
    within_bound: bool


def greedy_cover(fam: LayeredFamily, S: Iterable[int], n: int | None = None) -> CoverResult:
    """Greedy set cover of S by family sets; ties go to the smaller center."""
    left = set(S)
    target = len(left)
    chosen = []
    while left:
        best = max(fam.sets_meeting(left), key=lambda c: (len(fam.sets[c] & left), -c))
        chosen.append(best)
        left -= fam.sets[best]
    fcov, _ = fractional_cover(fam, S) if target else (0.0, {})
    size_v = n if n is not None else len(fam.parents)
    bound = fcov * math.log(max(size_v, 2)) + 1
    return CoverResult(sorted(chosen), len(chosen), fcov, len(chosen) <= bound + CHECK_TOL or not target)


def is_balanced(g: Graph, S: Iterable[int], X: Iterable[int], ratio: float) -> bool:
    S = set(S)
    X = set(X)
    limit = ratio * len(X)
    keep = set(range(g.n)) - S
    return all(len(C & X) <= limit + 1e-12 for C in connected_components(g, keep))


def _thresholds(lo_hi: list[tuple[float, float]]) -> list[float]:
    pts = {0.0, 1.0}
    for lo, hi in lo_hi:
        for p in (lo, hi):
            if 0.0 <= p <= 1.0:
                pts.add(p)
    pts = sorted(pts)
    cands = [p for p in pts if p > 0]
    cands += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return sorted(set(cands))


def round_ab_separator(g: Graph, fam: LayeredFamily, A: Iterable[int], B: Iterable[int],
                       sol: AbLpSolution, tol: float = CHECK_TOL) -> SeparatorCertificate:
    """Threshold sweep over the intervals (d_v - y_v, d_v]."""
    A = sorted(set(A))
    B = sorted(set(B))
    n = g.n
    k = fam.thickness
    lp_opt = sol.objective if not sol.normalized else sol.source_objective
    bound = 8 * k * math.log2(2 * max(n, 1)) * lp_opt
    work = sol if sol.normalized else normalize_ab_solution(fam, sol)
    yv = vertex_mass(fam, work.x, n)
    d = vertex_weighted_distance(g, yv, A)
    ledger = {"lp_objective": lp_opt, "k": k, "n": n, "claimed_bound": bound}
    if all(d[b] == INF for b in B):
        ledger.update(satisfied=True, threshold=None)
        return SeparatorCertificate("ab", frozenset(), 0.0, {}, [], k, ledger)
    short = [b for b in B if d[b] < 1 - tol]
    if short:
        raise ValidationError(f"solution infeasible: d={d[short[0]]:.4g} < 1 at B-vertex {short[0]}")
    verts = [v for v in range(n) if d[v] < INF]
    intervals = [(d[v] - yv[v], d[v]) for v in verts]
    best = None
    cache: dict[frozenset[int], tuple[float, dict]] = {}
    for r in _thresholds(intervals):
        S = frozenset(v for v, (lo, hi) in zip(verts, intervals) if lo < r <= hi)
        if S not in cache:
            cache[S] = fractional_cover(fam, S)
        val = cache[S][0]
        if best is None or val < best[0] - 1e-12:
            best = (val, r, S)
    fcov, r, S = best
    if not separates(g, S, A, B):
        raise AssertionError("threshold set does not separate A from B")
    cover = greedy_cover(fam, S, n)
    ledger.update(satisfied=fcov <= bound + tol, threshold=r, thresholds_tried=len(cache),
                  greedy_cover=cover.size)
    return SeparatorCertificate("ab", S, fcov, cache[S][1], cover.centers, k, ledger)


# ------------------------------------------------------------ region growing


@dataclass
class RegionParams:
    f: float
    k: int
    eps: float
    ell_max: int

    @classmethod
    def for_objective(cls, f: float, k: int) -> "RegionParams":
        eps = 1.0 / (500 * math.log2(f + 4))
        ell_max = math.ceil(math.log2((f + 4) / eps))
        return cls(f, k, eps, ell_max)

    def radius(self, i: int) -> float:
        return 3 * i * self.eps


@dataclass
class RoundRecord:
    ubar: int
    ell: int
    component: frozenset[int]
    A: frozenset[int]
    S: frozenset[int]
    B: frozenset[int]
    mu_ball: float
    mu_boundary: float
    mu_next_ball: float
    local_ok: bool
    inner: dict

    @property
    def additive_ok(self) -> bool:
        return self.mu_next_ball >= self.mu_ball + self.mu_boundary - CHECK_TOL

    def to_json(self) -> dict:
        return {
            "ubar": self.ubar, "ell": self.ell, "component_size": len(self.component),
            "added": sorted(self.S), "mu_ball": self.mu_ball, "mu_boundary": self.mu_boundary,
            "mu_next_ball": self.mu_next_ball, "local_ok": self.local_ok,
            "inner_fcov": self.inner.get("fcov"),
        }


def _measure(fam: LayeredFamily, x: dict[int, float], U) -> float:
    return float(sum(x[c] for c in fam.sets_meeting(U)))


def region_grow_once(g: Graph, fam: LayeredFamily, x: dict[int, float], X: Iterable[int],
                     Z: set[int], params: RegionParams, mode: str = "auto") -> RoundRecord | None:
    X = set(X)
    keep = set(range(g.n)) - Z
    heavy = [C for C in connected_components(g, keep) if len(C & X) > 0.95 * len(X)]
    if not heavy:
        return None
    C = heavy[0]
    ubar = min(C & X)
    dist = vertex_weighted_distance(g, vertex_mass(fam, x, g.n), [ubar])

    def ball(r):
        return frozenset(v for v in C if dist[v] <= r + 1e-12)

    eps = params.eps
    chosen = None
    for ell in range(1, params.ell_max + 1):
        r = params.radius(ell)
        inner = ball(r)
        boundary = ball(r + 3 * eps) - ball(r + eps)
        mb, md = _measure(fam, x, inner), _measure(fam, x, boundary)
        if md <= mb + 1e-12:
            chosen = (ell, inner, boundary, mb, md)
            break
    if chosen is None:
        raise AssertionError("no radius satisfies the boundary/ball measure inequality")
    ell, inner, boundary, mb, md = chosen
    r = params.radius(ell)
    mnext = _measure(fam, x, ball(params.radius(ell + 1)))
    local_ok = not (fam.sets_meeting(inner) & fam.sets_meeting(boundary))
    A_src = ball(r + eps)
    B_dst = C - ball(params.radius(ell + 1))
    assert B_dst, "no vertex of the heavy component lies outside the grown ball"

    verts = sorted(C)
    sub = induced_subgraph(g, verts)
    subfam = build_layered_family(sub, fam.partition.restrict(verts))
    index = {v: i for i, v in enumerate(verts)}
    sol = solve_ab_lp(sub, subfam, [index[v] for v in A_src], [index[v] for v in B_dst], mode=mode)
    cert = round_ab_separator(sub, subfam, [index[v] for v in A_src],
                              [index[v] for v in B_dst], sol)
    S_local = {verts[i] for i in cert.separator}
    S = frozenset(downward_closure(fam, S_local))
    rest = C - S
    B_part: set[int] = set()
    for comp in connected_components(g, rest):
        if comp & B_dst:
            B_part |= comp
    A_part = rest - B_part
    if len(A_part & X) > 0.95 * len(X) + 1e-12:
        raise AssertionError("A side of the cut still holds too much of X")
    if not B_part < C:
        raise AssertionError("B side did not shrink")
    return RoundRecord(ubar, ell, C, frozenset(A_part), S, frozenset(B_part), mb, md, mnext,
                       local_ok, {"fcov": cert.fcov, "lp": sol.objective, "mode": sol.mode})


def round_balanced_separator(g: Graph, fam: LayeredFamily, X: Iterable[int],
                             sol: BalancedSolution, mode: str = "auto") -> SeparatorCertificate:
    X = sorted(set(X))
    if not X:
        raise ValidationError("X must be nonempty")
    f = sol.objective
    if f <= 1e-12:
        raise ValidationError("balanced LP optimum is 0; rounding needs f > 0")
    k = fam.thickness
    n = g.n
    params = RegionParams.for_objective(f, k)
    xv = vertex_mass(fam, sol.x, n)
    Z0 = {v for v in range(n) if xv[v] >= params.eps / (2 * k)}
    Z = downward_closure(fam, Z0)
    rounds = []
    for _ in range(n + 1):
        rec = region_grow_once(g, fam, sol.x, X, Z, params, mode)
        if rec is None:
            break
        rounds.append(rec)
        Z |= rec.S
    else:
        raise AssertionError("region growing did not terminate within |V| rounds")
    S = frozenset(Z)
    assert is_balanced(g, S, X, 0.95), "final separator is not balanced"
    assert downward_closure(fam, S) == set(S)
    fcov, weights = fractional_cover(fam, S)
    cover = greedy_cover(fam, S, n)
    bound = 5000 * k * math.log2(2 * n) * math.log2(f + 4) * f
    ledger = {
        "lp_objective": f, "k": k, "n": n, "eps": params.eps, "ell_max": params.ell_max,
        "initial_size": len(downward_closure(fam, Z0)),
        "rounds": [r.to_json() for r in rounds],
        "claimed_bound": bound, "satisfied": fcov <= bound + CHECK_TOL,
        "X": X,
    }
    return SeparatorCertificate("balanced", S, fcov, weights, cover.centers, k, ledger, rounds)

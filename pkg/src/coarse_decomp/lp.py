"""Path-indexed covering LPs: the A-B separator LP and the balanced separator LP.

Both LPs have one constraint per induced path.  In exact mode every induced
path is enumerated; in fast mode paths are generated lazily by a vertex-weighted
shortest-path oracle and the constraints use vertex sums, which only loosens
them.  The solver is HiGHS via scipy; duals are read from its marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .errors import PathOverflow, ValidationError
from .family import LayeredFamily, is_upward_minimal
from .graph import (
    INF,
    Graph,
    enumerate_induced_paths,
    extract_induced_path_from_walk,
    hop_distances,
    lightest_path,
    vertex_weighted_distance,
)

TOL = 1e-9
CHECK_TOL = 1e-6
DEFAULT_PATH_CAP = 200_000

_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def _solve(c, rows, b, n_vars, bounds):
    """minimize c.x s.t. rows . x <= b; rows is a list of {col: coef}."""
    if rows:
        data, ri, ci = [], [], []
        for i, row in enumerate(rows):
            for j, v in row.items():
                ri.append(i)
                ci.append(j)
                data.append(v)
        A = csr_matrix((data, (ri, ci)), shape=(len(rows), n_vars))
        res = linprog(c, A_ub=A, b_ub=np.asarray(b, dtype=float), bounds=bounds,
                      method="highs", options=_HIGHS)
    else:
        res = linprog(c, bounds=bounds, method="highs", options=_HIGHS)
    if res.status != 0:
        raise RuntimeError(f"LP solve failed: {res.message}")
    return res


def vertex_mass(fam: LayeredFamily, x: dict[int, float], n: int) -> list[float]:
    """x_v = sum of x_F over sets F containing v."""
    out = [0.0] * n
    for c, w in x.items():
        if w:
            for v in fam.sets[c]:
                out[v] += w
    return out


def check_strong_duality(primal: float, dual: float, tol: float = CHECK_TOL) -> bool:
    return abs(primal - dual) <= tol * max(1.0, abs(primal))


@dataclass
class AbLpSolution:
    objective: float
    x: dict[int, float]
    dual: dict[tuple[int, ...], float]
    mode: str
    columns: tuple[tuple[int, ...], ...] = ()
    reachable: bool = True
    normalized: bool = False
    source_objective: float | None = None
    upward_minimal: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def dual_objective(self) -> float:
        return float(sum(self.dual.values()))

    def to_json(self) -> dict:
        out = {
            "kind": "lp-ab",
            "objective": self.objective,
            "x": {str(c): w for c, w in sorted(self.x.items()) if w > 0},
            "dual_paths": [{"path": list(p), "y": y} for p, y in sorted(self.dual.items()) if y > 0],
            "mode": self.mode,
        }
        if self.normalized:
            out["source_objective"] = self.source_objective
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def _ab_exact(g, fam, A, B, path_cap):
    paths = enumerate_induced_paths(g, A, B, cap=path_cap).paths
    centers = fam.centers
    col = {c: i for i, c in enumerate(centers)}
    rows, b = [], []
    for P in paths:
        rows.append({col[c]: -1.0 for c in fam.sets_meeting(P)})
        b.append(-1.0)
    res = _solve(np.ones(len(centers)), rows, b, len(centers), [(0, None)] * len(centers))
    x = {c: max(0.0, float(res.x[i])) for i, c in enumerate(centers)}
    marg = res.ineqlin.marginals if rows else []
    dual = {P: max(0.0, -float(m)) for P, m in zip(paths, marg)}
    return AbLpSolution(float(res.fun), x, dual, "exact", tuple(paths))


def _ab_fast(g, fam, A, B, tol, max_rounds=5000):
    centers = fam.centers
    col = {c: i for i, c in enumerate(centers)}
    rows, b, gen = [], [], []
    seen = set()
    x = {c: 0.0 for c in centers}
    res = None
    for _ in range(max_rounds):
        xv = vertex_mass(fam, x, g.n)
        found = lightest_path(g, xv, A, B)
        if found is None or found[0] >= 1 - tol:
            break
        P = extract_induced_path_from_walk(g, found[1])
        if P in seen:
            break
        seen.add(P)
        row: dict[int, float] = {}
        for v in P:
            for c in fam.member_of[v]:
                row[col[c]] = row.get(col[c], 0.0) - 1.0
        rows.append(row)
        b.append(-1.0)
        gen.append(P)
        res = _solve(np.ones(len(centers)), rows, b, len(centers), [(0, None)] * len(centers))
        x = {c: max(0.0, float(res.x[i])) for i, c in enumerate(centers)}
    else:
        raise RuntimeError("fast-mode separation did not converge")
    dual = {}
    if res is not None:
        dual = {P: max(0.0, -float(m)) for P, m in zip(gen, res.ineqlin.marginals)}
    obj = float(sum(x.values()))
    return AbLpSolution(obj, x, dual, "fast", tuple(gen))


def solve_ab_lp(g: Graph, fam: LayeredFamily, A: Iterable[int], B: Iterable[int],
                mode: str = "auto", tol: float = TOL,
                path_cap: int = DEFAULT_PATH_CAP) -> AbLpSolution:
    A = sorted(set(A))
    B = sorted(set(B))
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    if mode not in ("auto", "exact", "fast"):
        raise ValidationError(f"unknown mode {mode!r}")
    dist = hop_distances(g, A)
    if all(dist[v] == INF for v in B):
        zero = {c: 0.0 for c in fam.centers}
        return AbLpSolution(0.0, zero, {}, "exact" if mode != "fast" else "fast", reachable=False)
    if mode == "fast":
        return _ab_fast(g, fam, A, B, tol)
    try:
        return _ab_exact(g, fam, A, B, path_cap)
    except PathOverflow:
        if mode == "exact":
            raise
    sol = _ab_fast(g, fam, A, B, tol)
    sol.warnings.append("path cap exceeded; fell back to fast mode")
    return sol


def normalize_ab_solution(fam: LayeredFamily, sol: AbLpSolution) -> AbLpSolution:
    """Drop weights below 1/(2|family|), double and cap the rest at 1."""
    size = max(1, len(fam))
    y = {}
    for c, w in sol.x.items():
        y[c] = 0.0 if w < 1.0 / (2 * size) else min(1.0, 2 * w)
    return AbLpSolution(
        float(sum(y.values())), y, dict(sol.dual), sol.mode, sol.columns, sol.reachable,
        normalized=True, source_objective=sol.objective,
        upward_minimal=sol.upward_minimal, warnings=list(sol.warnings))


def reroute_to_minimal(g: Graph, fam: LayeredFamily, weights: dict[tuple[int, ...], float],
                       budget: int = 100_000, eps: float = 1e-15):
    """Move each path's weight onto an upward-minimal path with the same ends.

    Returns (new weights, exhausted flag).  Moving weight from P to a witness
    P_o never raises any set's load, since every set meeting P_o meets P.
    """
    w = {P: y for P, y in weights.items() if y > eps}
    verdicts: dict[tuple[int, ...], object] = {}
    for _ in range(10_000):
        changed = False
        for P in sorted(w):
            if P not in w:
                continue
            if P not in verdicts:
                verdicts[P] = is_upward_minimal(g, fam, P, budget)
            v = verdicts[P]
            if v.status == "budget-exhausted":
                return weights, True
            if v.status == "witness":
                Po = extract_induced_path_from_walk(g, v.witness)
                w[Po] = w.get(Po, 0.0) + w.pop(P)
                changed = True
        if not changed:
            return w, False
    raise RuntimeError("rerouting did not reach a fixpoint")


def restrict_dual_to_upward_minimal(g: Graph, fam: LayeredFamily, sol: AbLpSolution,
                                    budget: int = 100_000) -> AbLpSolution:
    if sol.mode != "exact":
        raise ValidationError("restriction needs an exact-mode dual")
    new, exhausted = reroute_to_minimal(g, fam, sol.dual, budget)
    out = AbLpSolution(sol.objective, dict(sol.x), dict(new), sol.mode, sol.columns,
                       sol.reachable, sol.normalized, sol.source_objective,
                       upward_minimal=not exhausted, warnings=list(sol.warnings))
    if exhausted:
        out.warnings.append("minimality oracle budget exhausted; dual left unrestricted")
        out.dual = dict(sol.dual)
    return out


def ab_dual_loads(fam: LayeredFamily, dual: dict[tuple[int, ...], float]) -> dict[int, float]:
    load = {c: 0.0 for c in fam.centers}
    for P, y in dual.items():
        for c in fam.sets_meeting(P):
            load[c] += y
    return load


# ---------------------------------------------------------------- balanced LP

Pair = tuple[int, int]


@dataclass
class BalancedDual:
    X: tuple[int, ...]
    rho: dict[int, float]
    eta: dict[Pair, float]
    gamma: dict[Pair, dict[tuple[int, ...], float]]
    upward_minimal: bool = False

    @property
    def objective(self) -> float:
        return len(self.X) / 10 * sum(self.rho.values()) - sum(self.eta.values())

    @property
    def rho_total(self) -> float:
        return float(sum(self.rho.values()))

    def gamma_total(self, pair: Pair) -> float:
        return float(sum(self.gamma.get(pair, {}).values()))

    def set_loads(self, fam: LayeredFamily) -> dict[int, float]:
        load = {c: 0.0 for c in fam.centers}
        for paths in self.gamma.values():
            for P, y in paths.items():
                for c in fam.sets_meeting(P):
                    load[c] += y
        return load

    def violations(self, fam: LayeredFamily, f: float, tol: float = CHECK_TOL) -> list[str]:
        out = []
        k = len(self.X)
        for u in self.X:
            for v in self.X:
                lhs = self.rho[u] - self.eta[(u, v)] - self.gamma_total((u, v))
                if lhs > tol:
                    out.append(f"pair ({u},{v}) row exceeds by {lhs:.3g}")
            if sum(self.eta[(u, v)] for v in self.X) > k / 10 * self.rho[u] + tol:
                out.append(f"eta mass at {u} exceeds |X|/10 * rho")
        for c, load in self.set_loads(fam).items():
            if load > 1 + tol:
                out.append(f"set {c} carries dual load {load:.6g}")
        if 10 * f > self.rho_total * k + tol:
            out.append("10 f exceeds rho |X|")
        return out


@dataclass
class BalancedSolution:
    objective: float
    x: dict[int, float]
    d: dict[Pair, float]
    mode: str
    X: tuple[int, ...]
    dual: BalancedDual | None = None
    generated: int = 0

    def to_json(self) -> dict:
        out = {
            "kind": "lp-balanced",
            "objective": self.objective,
            "x": {str(c): w for c, w in sorted(self.x.items()) if w > 0},
            "X": list(self.X),
            "mode": self.mode,
        }
        if self.dual is not None:
            out["dual"] = {
                "rho": {str(u): r for u, r in self.dual.rho.items()},
                "eta": [[u, v, e] for (u, v), e in sorted(self.dual.eta.items()) if e > 0],
                "gamma": [
                    {"u": u, "v": v, "path": list(P), "w": w}
                    for (u, v), paths in sorted(self.dual.gamma.items())
                    for P, w in sorted(paths.items()) if w > 0
                ],
                "objective": self.dual.objective,
            }
        return out


def _check_X(fam: LayeredFamily, X) -> tuple[int, ...]:
    X = tuple(sorted(set(X)))
    if not X:
        raise ValidationError("X must be nonempty")
    bad = [u for u in X if u not in fam.sets]
    if bad:
        raise ValidationError(f"X contains non-centers {bad[:5]}")
    return X


def _balanced_exact(g, fam, X, path_cap):
    pairs = [(u, v) for u in X for v in X]
    pidx = {p: i for i, p in enumerate(pairs)}
    centers = fam.centers
    m = len(centers)
    col = {c: i for i, c in enumerate(centers)}
    nv = m + len(pairs)
    rows, b, tags = [], [], []
    k = len(X)
    for u in X:
        rows.append({m + pidx[(u, v)]: -1.0 for v in X})
        b.append(-k / 10)
        tags.append(("cov", u))
    total = 0
    paths_of: dict[Pair, list[tuple[int, ...]]] = {}
    for i, u in enumerate(X):
        paths_of[(u, u)] = [(u,)]
        for v in X[i + 1:]:
            ps = enumerate_induced_paths(g, [u], [v], cap=path_cap).paths
            total += len(ps)
            if total > path_cap:
                raise PathOverflow(path_cap)
            paths_of[(u, v)] = [P if P[0] == u else P[::-1] for P in ps]
            paths_of[(v, u)] = [P[::-1] for P in paths_of[(u, v)]]
    for pair in pairs:
        for P in paths_of[pair]:
            row = {col[c]: -1.0 for c in fam.sets_meeting(P)}
            row[m + pidx[pair]] = 1.0
            rows.append(row)
            b.append(0.0)
            tags.append(("path", pair, P))
    c = np.concatenate([np.ones(m), np.zeros(len(pairs))])
    bounds = [(0, None)] * m + [(0, 1)] * len(pairs)
    res = _solve(c, rows, b, nv, bounds)
    x = {cc: max(0.0, float(res.x[i])) for i, cc in enumerate(centers)}
    d = {p: float(res.x[m + i]) for i, p in enumerate(pairs)}
    for p in pairs:
        if not paths_of[p]:
            d[p] = 1.0
    marg = res.ineqlin.marginals
    rho = {u: 0.0 for u in X}
    gamma: dict[Pair, dict[tuple[int, ...], float]] = {p: {} for p in pairs}
    for tag, mval in zip(tags, marg):
        val = max(0.0, -float(mval))
        if tag[0] == "cov":
            rho[tag[1]] = val
        else:
            gamma[tag[1]][tag[2]] = val
    upper = res.upper.marginals
    eta = {p: max(0.0, -float(upper[m + i])) for i, p in enumerate(pairs)}
    dual = BalancedDual(X, rho, eta, gamma)
    return BalancedSolution(float(res.fun), x, d, "exact", X, dual,
                            generated=sum(len(v) for v in paths_of.values()))


def _balanced_fast(g, fam, X, tol, max_rounds=2000):
    pairs = [(u, v) for u in X for v in X]
    pidx = {p: i for i, p in enumerate(pairs)}
    centers = fam.centers
    m = len(centers)
    col = {c: i for i, c in enumerate(centers)}
    nv = m + len(pairs)
    k = len(X)
    rows, b = [], []
    for u in X:
        rows.append({m + pidx[(u, v)]: -1.0 for v in X})
        b.append(-k / 10)
    seen = set()

    def add(pair, P):
        row: dict[int, float] = {}
        for w in P:
            for cc in fam.member_of[w]:
                row[col[cc]] = row.get(col[cc], 0.0) - 1.0
        row[m + pidx[pair]] = 1.0
        rows.append(row)
        b.append(0.0)
        seen.add((pair, P))

    for u in X:
        add((u, u), (u,))
    c = np.concatenate([np.ones(m), np.zeros(len(pairs))])
    bounds = [(0, None)] * m + [(0, 1)] * len(pairs)
    for _ in range(max_rounds):
        res = _solve(c, rows, b, nv, bounds)
        x = {cc: max(0.0, float(res.x[i])) for i, cc in enumerate(centers)}
        d = {p: float(res.x[m + i]) for i, p in enumerate(pairs)}
        xv = vertex_mass(fam, x, g.n)
        added = 0
        for u in X:
            for v in X:
                if u == v:
                    continue
                found = lightest_path(g, xv, [u], [v])
                if found is None or found[0] >= d[(u, v)] - tol:
                    continue
                P = extract_induced_path_from_walk(g, found[1])
                if ((u, v), P) in seen:
                    continue
                add((u, v), P)
                added += 1
        if not added:
            break
    else:
        raise RuntimeError("fast-mode balanced separation did not converge")
    reach = {u: hop_distances(g, [u]) for u in X}
    for (u, v) in pairs:
        if reach[u][v] == INF:
            d[(u, v)] = 1.0
    return BalancedSolution(float(sum(x.values())), x, d, "fast", X, None, generated=len(rows) - k)


def solve_balanced_lp(g: Graph, fam: LayeredFamily, X: Iterable[int], mode: str = "auto",
                      tol: float = TOL, path_cap: int = DEFAULT_PATH_CAP) -> BalancedSolution:
    X = _check_X(fam, X)
    if mode not in ("auto", "exact", "fast"):
        raise ValidationError(f"unknown mode {mode!r}")
    if mode == "fast":
        return _balanced_fast(g, fam, X, tol)
    try:
        return _balanced_exact(g, fam, X, path_cap)
    except PathOverflow:
        if mode == "exact":
            raise
    return _balanced_fast(g, fam, X, tol)


def restrict_balanced_dual(g: Graph, fam: LayeredFamily, sol: BalancedSolution,
                           budget: int = 100_000) -> BalancedSolution:
    if sol.dual is None:
        raise ValidationError("restriction needs an exact-mode balanced dual")
    gamma = {}
    for pair, paths in sol.dual.gamma.items():
        new, exhausted = reroute_to_minimal(g, fam, paths, budget)
        if exhausted:
            return sol
        gamma[pair] = new
    dual = BalancedDual(sol.dual.X, dict(sol.dual.rho), dict(sol.dual.eta), gamma, True)
    return BalancedSolution(sol.objective, sol.x, sol.d, sol.mode, sol.X, dual, sol.generated)


def set_distance(g: Graph, fam: LayeredFamily, x: dict[int, float], u: int, v: int,
                 cap: int = 100_000) -> float:
    """Exact set-weight distance (each set counted once per path); small graphs only."""
    if u == v:
        return float(sum(x[c] for c in fam.member_of[u]))
    ps = enumerate_induced_paths(g, [u], [v], cap=cap).paths
    if not ps:
        return INF
    return min(float(sum(x[c] for c in fam.sets_meeting(P))) for P in ps)


def log2(v: float) -> float:
    return math.log2(v)

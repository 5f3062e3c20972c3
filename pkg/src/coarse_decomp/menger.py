"""Menger-type results: exact max-flow, anticomplete packings, cleaning and the coarse pipeline."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import Inconclusive, PathOverflow, SamplingFailure, ValidationError
from .family import LayeredFamily, degeneracy, family_for
from .graph import (
    INF,
    Graph,
    connected_components,
    enumerate_induced_paths,
    hop_distances,
    induced_subgraph,
    is_anticomplete,
    is_induced_path,
    quotient_by_components,
    separates,
    shortest_path,
)
from .lp import restrict_dual_to_upward_minimal, solve_ab_lp
from .partition import (
    EdgePartition,
    classify_parts,
    greedy_four_radius_partition,
    part_graph,
    star_edge_partition,
)
from .rounding import greedy_cover, round_ab_separator
from .sampling import sample_path_multiset
from .decomposition import distance_r_independence

DEFAULT_BUDGET = 200_000


# ------------------------------------------------------------------ max-flow


@dataclass
class MengerResult:
    k: int
    paths: list[tuple[int, ...]] | None = None
    separator: frozenset[int] | None = None

    def to_json(self) -> dict:
        out = {"kind": "menger", "k": self.k}
        if self.paths is not None:
            out["paths"] = [list(p) for p in self.paths]
        else:
            out["separator"] = sorted(self.separator)
        return out


def menger_max_flow(g: Graph, A: Iterable[int], B: Iterable[int], k: int) -> MengerResult:
    """k vertex-disjoint A-B paths, or a minimum A-B vertex separator of size < k."""
    A = sorted(set(A))
    B = sorted(set(B))
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    if k < 0:
        raise ValidationError("k must be non-negative")
    Aset, Bset = set(A), set(B)
    # Node 2v is v-in, 2v+1 is v-out; source and sink follow.
    src, snk = 2 * g.n, 2 * g.n + 1
    cap: dict[int, dict[int, int]] = {u: {} for u in range(2 * g.n + 2)}

    orig: dict[int, dict[int, int]] = {}
    big = g.n + 1  # only vertex arcs may be cut

    def arc(u, v, c):
        cap[u][v] = c
        cap[v].setdefault(u, 0)
        orig.setdefault(u, {})[v] = c

    for v in range(g.n):
        arc(2 * v, 2 * v + 1, 1)
        for w in g.adjacency[v]:
            arc(2 * v + 1, 2 * w, big)
    for a in A:
        arc(src, 2 * a, big)
    for b in B:
        arc(2 * b + 1, snk, big)

    def augment() -> bool:
        pred = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in sorted(cap[u]):
                if cap[u][v] > 0 and v not in pred:
                    pred[v] = u
                    if v == snk:
                        while pred[v] is not None:
                            p = pred[v]
                            cap[p][v] -= 1
                            cap[v][p] += 1
                            v = p
                        return True
                    queue.append(v)
        return False

    flow = 0
    while flow < k and augment():
        flow += 1
    if flow >= k:
        paths = []
        def carried(u):
            return [v for v, c in orig.get(u, {}).items() if cap[u][v] < c]

        for start in sorted(carried(src)):
            seq = [start // 2]
            node = start + 1
            while True:
                nxt = min(carried(node))
                cap[node][nxt] += 1  # consume one unit so later traces skip it
                if nxt == snk:
                    break
                seq.append(nxt // 2)
                node = nxt + 1
            first = max(i for i, v in enumerate(seq) if v in Aset)
            last = next(i for i in range(first, len(seq)) if seq[i] in Bset)
            paths.append(tuple(seq[first:last + 1]))
        paths.sort()
        res = MengerResult(k, paths=paths[:k])
    else:
        reach = {src}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in reach:
                    reach.add(v)
                    queue.append(v)
        sep = frozenset(v for v in range(g.n) if 2 * v in reach and 2 * v + 1 not in reach)
        res = MengerResult(k, separator=sep)
    problems = verify_menger(g, res, A, B)
    assert not problems, problems[0]
    return res


def verify_menger(g: Graph, res: MengerResult, A, B) -> list[str]:
    A, B = set(A), set(B)
    if (res.paths is None) == (res.separator is None):
        return ["exactly one of paths and separator must be set"]
    if res.paths is not None:
        if len(res.paths) != res.k:
            return [f"{len(res.paths)} paths for k={res.k}"]
        used: set[int] = set()
        for P in res.paths:
            if not P or P[0] not in A or P[-1] not in B:
                return [f"path {P} does not run from A to B"]
            if any(not g.has_edge(a, b) for a, b in zip(P, P[1:])) or len(set(P)) != len(P):
                return [f"{P} is not a path"]
            if used & set(P):
                return ["paths are not vertex-disjoint"]
            used |= set(P)
        return []
    if len(res.separator) >= res.k:
        return ["separator is not smaller than k"]
    if not separates(g, res.separator, A, B):
        return ["separator misses an A-B path"]
    return []


def max_flow_value(g: Graph, A, B) -> int:
    res = menger_max_flow(g, A, B, g.n + 1)
    return len(res.separator)


# ------------------------------------------------------ anticomplete packings


@dataclass
class AnticompletePacking:
    paths: list[tuple[int, ...]]

    def to_json(self) -> dict:
        return {"kind": "packing", "paths": [list(p) for p in self.paths]}


def verify_packing(g: Graph, paths: Sequence[Sequence[int]], A, B) -> list[str]:
    A, B = set(A), set(B)
    problems = []
    for P in paths:
        if not P or P[0] not in A or P[-1] not in B:
            problems.append(f"path {list(P)} does not run from A to B")
        if not is_induced_path(g, P):
            problems.append(f"path {list(P)} is not an induced path")
    for P, Q in combinations(paths, 2):
        if not is_anticomplete(g, P, Q):
            problems.append(f"paths {list(P)} and {list(Q)} touch")
    return problems


def brute_force_anticomplete_packing(g: Graph, A, B, k: int, budget: int = DEFAULT_BUDGET,
                                     path_cap: int = 50_000) -> AnticompletePacking | None:
    """Exhaustive search for k pairwise anticomplete induced A-B paths."""
    if k <= 0:
        return AnticompletePacking([])
    try:
        cands = list(enumerate_induced_paths(g, A, B, cap=path_cap, minimal=True).paths)
    except PathOverflow as exc:
        raise Inconclusive(f"more than {exc.cap} candidate paths") from exc
    closed = [frozenset(P).union(*(g.nbrs[v] for v in P)) for P in cands]
    steps = 0
    chosen: list[int] = []

    def go(start: int, blocked: frozenset[int]) -> bool:
        nonlocal steps
        if len(chosen) == k:
            return True
        for i in range(start, len(cands)):
            steps += 1
            if steps > budget:
                raise Inconclusive(f"packing search exceeded {budget} steps",
                                   partial={"best": [list(cands[j]) for j in chosen]})
            if len(cands) - i < k - len(chosen):
                return False
            if blocked.isdisjoint(cands[i]):
                chosen.append(i)
                if go(i + 1, blocked | closed[i]):
                    return True
                chosen.pop()
        return False

    if not go(0, frozenset()):
        return None
    paths = [cands[i] for i in chosen]
    assert not verify_packing(g, paths, A, B)
    return AnticompletePacking(paths)


# ------------------------------------------------------------------ cleaning


def g_bound(s: int, z: int, ell: int) -> int:
    return s ** z * (2 * ell + 1) ** (4 * ell * ell + 1)


def _big(v: int) -> int | str:
    """Exact int when JSON-safe, else its order of magnitude."""
    return v if v < 2 ** 53 else f"~10^{len(str(v)) - 1}"


@dataclass
class CleaningStep:
    H: Graph
    vertices: list[int]
    partition: EdgePartition
    A: list[int]
    B: list[int]
    ledger: dict

    def to_json(self) -> dict:
        return {"kind": "cleaning-step", "vertices": self.vertices,
                "partition": self.partition.to_json(), "A": self.A, "B": self.B,
                "ledger": self.ledger}


def _restrict_partition(g: Graph, lam: EdgePartition, verts: Sequence[int]) -> EdgePartition:
    index = {v: i for i, v in enumerate(verts)}
    parts = [[(index[u], index[v]) for u, v in p if u in index and v in index] for p in lam.parts]
    return classify_parts(induced_subgraph(g, verts), parts)


def cleaning_step(g: Graph, lam: EdgePartition, A, B, f) -> CleaningStep:
    A = sorted(set(A))
    B = sorted(set(B))
    f = Fraction(f)
    if not lam.cluttered:
        raise ValidationError("every part is already clean")
    need = math.floor(f) + 1
    pre = menger_max_flow(g, A, B, need)
    if pre.separator is not None:
        raise ValidationError(f"precondition fails: separator {sorted(pre.separator)} of size <= f")
    s = lam.s
    i_o = lam.clean.index(False)
    comps = connected_components(part_graph(g.n, lam.parts[i_o]))
    q, qmap = quotient_by_components(g, comps)
    A_q = sorted(qmap.project(A))
    B_q = sorted(qmap.project(B))
    floor_fs = math.floor(f / s)
    qres = menger_max_flow(q, A_q, B_q, floor_fs + 1)
    if qres.paths is None:
        raise AssertionError("contracted graph has a small separator")
    chosen: set[int] = set()
    lifted = []
    for Pq in qres.paths:
        V = qmap.lift(Pq)
        P = shortest_path(g, [a for a in A if a in V], [b for b in B if b in V], within=V)
        assert P is not None, "lifted route lost its A-B path"
        lifted.append(P)
        chosen.update(P)
    verts = sorted(chosen)
    lam_h = _restrict_partition(g, lam, verts)
    index = {v: i for i, v in enumerate(verts)}
    H = induced_subgraph(g, verts)
    A_h = sorted(index[a] for a in A if a in index)
    B_h = sorted(index[b] for b in B if b in index)
    flow_h = max_flow_value(H, A_h, B_h)
    ledger = {"cleaned_part": i_o, "clean_before": lam.clean_count, "clean_after": lam_h.clean_count,
              "s": s, "s_after": lam_h.s, "parts": len(lam.parts), "parts_after": len(lam_h.parts),
              "f": str(f), "floor_f_over_s": floor_fs, "flow_in_H": flow_h,
              "quotient_paths": [list(p) for p in qres.paths]}
    if not lam_h.clean[i_o]:
        raise AssertionError("contracted part is still cluttered inside H")
    if any(c and not ch for c, ch in zip(lam.clean, lam_h.clean)):
        raise AssertionError("a clean part became cluttered")
    if not (lam_h.clean_count > lam.clean_count and lam_h.s <= s
            and len(lam_h.parts) == len(lam.parts) and flow_h > floor_fs):
        raise AssertionError(f"cleaning invariants failed: {ledger}")
    return CleaningStep(H, verts, lam_h, A_h, B_h, ledger)


# ---------------------------------------------------------- recursive Menger


@dataclass
class MengerOutcome:
    kind: str  # "packing" | "separator"
    paths: list[tuple[int, ...]] | None = None
    separator: frozenset[int] | None = None
    ledger: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "ledger": self.ledger}
        if self.paths is not None:
            out["paths"] = [list(p) for p in self.paths]
        if self.separator is not None:
            out["separator"] = sorted(self.separator)
        return out


def _min_separator(g: Graph, A, B) -> frozenset[int]:
    return menger_max_flow(g, A, B, g.n + 1).separator


def recursive_induced_menger(g: Graph, lam: EdgePartition, A, B, k: int,
                             budget: int = DEFAULT_BUDGET, force_clean: bool = False) -> MengerOutcome:
    A = sorted(set(A))
    B = sorted(set(B))
    s, ell, z = lam.s, len(lam.parts), lam.cluttered
    bound = g_bound(s, z, ell)
    entry = {"s": s, "parts": ell, "cluttered": z, "n": g.n, "g": _big(bound),
             "max_degree": g.max_degree()}
    if z == 0:
        entry.update(branch="base", degree_cap=2 * ell)
        packing = brute_force_anticomplete_packing(g, A, B, k, budget)
        if packing is not None:
            return MengerOutcome("packing", packing.paths, ledger=[entry])
        sep = _min_separator(g, A, B)
        entry.update(separator_size=len(sep), within_bound=len(sep) <= k * bound)
        return MengerOutcome("separator", separator=sep, ledger=[entry])
    flow = max_flow_value(g, A, B)
    entry["flow"] = flow
    if flow <= k * bound and not force_clean:
        entry.update(branch="separator")
        return MengerOutcome("separator", separator=_min_separator(g, A, B), ledger=[entry])
    if flow == 0:
        entry.update(branch="separator", note="no A-B path")
        return MengerOutcome("separator", separator=frozenset(), ledger=[entry])
    f = k * bound if flow > k * bound else flow - 1
    entry.update(branch="clean", f=_big(f))
    step = cleaning_step(g, lam, A, B, f)
    entry["cleaning"] = {k_: v for k_, v in step.ledger.items() if k_ != "quotient_paths"}
    inner = recursive_induced_menger(step.H, step.partition, step.A, step.B, k, budget, force_clean)
    if inner.kind == "packing":
        paths = [tuple(step.vertices[v] for v in P) for P in inner.paths]
        assert not verify_packing(g, paths, A, B)
        return MengerOutcome("packing", paths, ledger=[entry] + inner.ledger)
    sep = _min_separator(g, A, B)
    entry["note"] = "separator found inside H does not separate g; replaced by a minimum separator of g"
    return MengerOutcome("separator", separator=sep, ledger=[entry] + inner.ledger)


def degree_dependent_menger(g: Graph, t: int | None, A, B, k: int,
                            partition: EdgePartition | None = None, budget: int = DEFAULT_BUDGET,
                            force_clean: bool = False) -> MengerOutcome:
    A = sorted(set(A))
    B = sorted(set(B))
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    lam = partition if partition is not None else star_edge_partition(g)
    mu = len(lam.parts)
    delta = g.max_degree()
    out = recursive_induced_menger(g, lam, A, B, k, budget, force_clean)
    head = {"t": t, "max_degree": delta, "mu_achieved": mu,
            "g_delta_t": _big((delta + 1) ** mu * (2 * mu + 1) ** (4 * mu * mu + 1)),
            "mu_source": "achieved part count of the edge partition"}
    out.ledger.insert(0, head)
    if out.kind == "packing":
        assert not verify_packing(g, out.paths, A, B)
    else:
        assert separates(g, out.separator, A, B)
    return out


# ------------------------------------------------------- LP-driven variants


@dataclass
class AuxMengerResult:
    kind: str  # "separator" | "subgraph"
    separator: frozenset[int] | None
    H: Graph | None
    H_vertices: list[int] | None
    packing_paths: list[tuple[int, ...]] | None
    ledger: dict

    def to_json(self) -> dict:
        out = {"kind": "aux-menger", "branch": self.kind, "ledger": self.ledger}
        if self.separator is not None:
            out["separator"] = sorted(self.separator)
        if self.H_vertices is not None:
            out["H_vertices"] = self.H_vertices
        return out


def audit_two_sided_cover(H: Graph, vertices: Sequence[int], fam: LayeredFamily, A, B,
                          threshold: float, max_vertices: int = 14):
    """Check that no A-B separator of H is covered by fewer than ``threshold`` sets.

    Separation is monotone under adding vertices, so testing unions of every
    small subfamily is exhaustive.  Returns (verdict or None when too large, witness).
    """
    if H.n > max_vertices:
        return None, None
    local = {v: i for i, v in enumerate(vertices)}
    Al = [local[a] for a in A if a in local]
    Bl = [local[b] for b in B if b in local]
    cols = sorted(fam.sets_meeting(vertices))
    for r in range(0, math.ceil(threshold)):
        for combo in combinations(cols, r):
            U = {local[v] for c in combo for v in fam.sets[c] if v in local}
            if separates(H, U, Al, Bl):
                return False, combo
    return True, None


def aux_class_menger(g: Graph, fam: LayeredFamily, A, B, f: float, seed: int = 0,
                     d: int | None = None, audit_limit: int = 14) -> AuxMengerResult:
    A = sorted(set(A))
    B = sorted(set(B))
    n = g.n
    sol = solve_ab_lp(g, fam, A, B)
    opt = sol.objective
    ledger = {"lp_objective": opt, "f": f, "n": n, "k": fam.thickness}
    if not sol.reachable or opt <= f:
        cert = round_ab_separator(g, fam, A, B, sol)
        ledger.update(branch="separator", fcov=cert.fcov,
                      fcov_bound=8 * math.log2(2 * n) ** 2 * f,
                      within_bound=cert.fcov <= 8 * math.log2(2 * n) ** 2 * f + 1e-6)
        return AuxMengerResult("separator", cert.separator, None, None, None, ledger)
    if sol.mode != "exact":
        sol = solve_ab_lp(g, fam, A, B, mode="exact")
    sol = restrict_dual_to_upward_minimal(g, fam, sol)
    ell = math.log2(2 * n)
    packing = sample_path_multiset(g, fam, A, B, sol, ell, seed)
    verts = sorted(set().union(*packing.paths))
    H = induced_subgraph(g, verts)
    d = degeneracy(g) if d is None else d
    cap = 12 * math.log2(2 * n) ** 2 + 4 * d
    verdict, witness = audit_two_sided_cover(H, verts, fam, A, B, f / 6, audit_limit)
    ledger.update(branch="subgraph", ell=ell, samples=len(packing.paths),
                  H_max_degree=H.max_degree(), degree_cap=cap,
                  degree_ok=H.max_degree() <= cap, audit=verdict,
                  audit_witness=None if witness is None else list(witness),
                  transcript={"seed": packing.transcript["seed"],
                              "attempts": packing.transcript["attempts"]})
    if not ledger["degree_ok"]:
        raise AssertionError(f"sampled subgraph degree {H.max_degree()} exceeds {cap:.2f}")
    return AuxMengerResult("subgraph", None, H, verts, packing.paths, ledger)


# ------------------------------------------------------------------ pipeline


@dataclass
class PipelineResult:
    kind: str  # "packing" | "separator"
    paths: list[tuple[int, ...]] | None
    separator: frozenset[int] | None
    centers: list[int] | None
    radius_vertices: int
    ledger: dict

    def to_json(self) -> dict:
        out = {"kind": self.kind, "ledger": self.ledger}
        if self.kind == "packing":
            out["paths"] = [list(p) for p in self.paths]
        else:
            out["separator"] = sorted(self.separator)
            out["cover"] = {"centers": self.centers, "radius_vertices": self.radius_vertices}
        return out


def _lift_route(g: Graph, blocks, Pq, A, B):
    V = set().union(*(blocks[b] for b in Pq))
    P = shortest_path(g, [a for a in A if a in V], [b for b in B if b in V], within=V)
    assert P is not None, "lifted quotient path lost its A-B route"
    return P


def coarse_menger_pipeline(g: Graph, t: int | None, A, B, k: int, branch: str = "auto",
                           seed: int = 0, budget: int = DEFAULT_BUDGET,
                           alpha_limit: int = 40) -> PipelineResult:
    A = sorted(set(A))
    B = sorted(set(B))
    if not A or not B:
        raise ValidationError("A and B must be nonempty")
    if branch not in ("auto", "rounding", "sampling"):
        raise ValidationError(f"unknown branch {branch!r}")
    rp = greedy_four_radius_partition(g)
    wit = sorted(rp.witnesses, key=lambda w: min(w[0]))
    blocks = [b for b, _, _ in wit]
    reps = [c for _, c, _ in wit]
    q, qmap = quotient_by_components(g, blocks)
    Aq = sorted(qmap.project(A))
    Bq = sorted(qmap.project(B))
    qfam = family_for(q)
    nq = q.n
    d = degeneracy(q)
    delta_cap = math.ceil(12 * math.log2(2 * nq) ** 2 + 4 * d)
    mu = len(star_edge_partition(q).parts)
    g_tilde = (delta_cap + 1) ** mu * (2 * mu + 1) ** (4 * mu * mu + 1)
    f = 6 * k * g_tilde + 1
    r = 8 * math.ceil(math.log2(2 * nq))
    ledger = {"n": g.n, "n_quotient": nq, "blocks": len(blocks), "d": d, "d_source": "achieved",
              "mu": mu, "mu_source": "achieved", "degree_cap": delta_cap, "f": _big(f),
              "k": k, "t": t, "branch_requested": branch}
    sol = solve_ab_lp(q, qfam, Aq, Bq)
    ledger["lp_objective"] = sol.objective
    ledger["literal_branch"] = "separator" if (not sol.reachable or sol.objective <= f) else "subgraph"
    if branch in ("auto", "sampling") and sol.reachable and sol.objective > 1e-9:
        try:
            res = _packing_route(g, q, qfam, blocks, Aq, Bq, A, B, k, sol, seed, budget, ledger)
        except (Inconclusive, SamplingFailure) as exc:
            ledger["packing_route"] = f"gave up: {exc}"
            res = None
        if res is not None:
            return res
        if branch == "sampling":
            raise Inconclusive("packing route found no packing", partial=ledger)
    return _separator_route(g, q, qfam, qmap, blocks, reps, Aq, Bq, A, B, sol, r, ledger,
                            alpha_limit)


def _packing_route(g, q, qfam, blocks, Aq, Bq, A, B, k, sol, seed, budget, ledger):
    if sol.mode != "exact":
        sol = solve_ab_lp(q, qfam, Aq, Bq, mode="exact")
    sol = restrict_dual_to_upward_minimal(q, qfam, sol)
    ell = math.log2(2 * q.n)
    packing = sample_path_multiset(q, qfam, Aq, Bq, sol, ell, seed)
    verts = sorted(set().union(*packing.paths))
    H = induced_subgraph(q, verts)
    index = {v: i for i, v in enumerate(verts)}
    Ah = [index[a] for a in Aq if a in index]
    Bh = [index[b] for b in Bq if b in index]
    inner = degree_dependent_menger(H, ledger.get("t"), Ah, Bh, k, budget=budget)
    ledger["packing_route"] = {"samples": len(packing.paths), "H_vertices": len(verts),
                               "H_max_degree": H.max_degree(), "inner": inner.kind,
                               "attempts": packing.transcript["attempts"]}
    if inner.kind != "packing":
        return None
    qpaths = [tuple(verts[v] for v in P) for P in inner.paths]
    paths = [_lift_route(g, blocks, Pq, A, B) for Pq in qpaths]
    problems = verify_packing(g, paths, A, B)
    if problems:
        raise AssertionError(problems[0])
    ledger["quotient_paths"] = [list(p) for p in qpaths]
    return PipelineResult("packing", paths, None, None, 0, ledger)


def _separator_route(g, q, qfam, qmap, blocks, reps, Aq, Bq, A, B, sol, r, ledger, alpha_limit):
    if not sol.reachable:
        ledger.update(route="separator", note="A and B are disconnected")
        return PipelineResult("separator", None, frozenset(), [], r, ledger)
    cert = round_ab_separator(q, qfam, Aq, Bq, sol)
    cover = greedy_cover(qfam, cert.separator, q.n)
    expanded = set().union(*(qfam.sets[c] for c in cover.centers)) if cover.centers else set()
    S = frozenset(qmap.lift(expanded))
    centers = sorted(reps[c] for c in cover.centers)
    if not separates(g, S, A, B):
        raise AssertionError("lifted separator does not separate A from B")
    dist = hop_distances(g, centers, limit=r - 1)
    far = [v for v in S if dist[v] > r - 1]
    if far:
        raise AssertionError(f"vertex {far[0]} is farther than {r} vertices from every center")
    big_r = 16 * math.ceil(math.log2(2 * g.n))
    ledger.update(route="separator", fcov=cert.fcov, cover_size=len(centers),
                  alpha_radius_edges=big_r)
    try:
        alpha, wit = distance_r_independence(g, S, big_r, alpha_limit)
        ledger.update(alpha=alpha, alpha_witness=wit, alpha_ok=alpha <= len(centers))
        if alpha > len(centers):
            raise AssertionError("distance independence exceeds the number of centers")
    except Inconclusive as exc:
        ledger.update(alpha=None, alpha_lower_bound=exc.partial["lower_bound"])
    return PipelineResult("separator", None, S, centers, r, ledger)

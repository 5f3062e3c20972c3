"""Coarse tree decompositions over layered families, plus the bag-quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import Inconclusive, ValidationError
from .family import LayeredFamily, build_layered_family, degeneracy, family_for
from .graph import (
    INF,
    Graph,
    QuotientMap,
    connected_components,
    hop_distances,
    induced_subgraph,
    quotient_by_components,
)
from .lp import solve_balanced_lp, restrict_balanced_dual
from .partition import greedy_four_radius_partition
from .rounding import greedy_cover, is_balanced, round_balanced_separator
from .sampling import dense_subgraph_ell, sample_dense_subgraph

ALPHA_LIMIT = 40
EXACT_COVER_N = 20


# ---------------------------------------------------------- balanced separator


@dataclass
class CenterSeparator:
    S: list[int] | None
    branch: str
    lp_objective: float
    ledger: dict = field(default_factory=dict)
    diagnostic: dict | None = None


def _sep_bound(k: int, n: int, f: float) -> float:
    if f <= 0:
        return 0.0
    return 5000 * k * math.log2(2 * n) ** 2 * f * math.log2(4 * f) if 4 * f > 1 else 0.0


def balanced_center_separator(g: Graph, fam: LayeredFamily, X: Iterable[int],
                              f_threshold: float | None = None, branch_override: str | None = None,
                              mode: str = "auto", seed: int = 0) -> CenterSeparator:
    """Pick S among the centers so that the union of their sets is an (X,95/100)-balanced separator."""
    X = sorted(set(X))
    sol = solve_balanced_lp(g, fam, X, mode=mode)
    f = sol.objective
    k = fam.thickness
    threshold = f + 1 if f_threshold is None else f_threshold
    branch = branch_override or ("rounding" if f <= threshold else "sampling")
    if branch not in ("rounding", "sampling"):
        raise ValidationError(f"unknown branch {branch!r}")
    ledger = {"lp_objective": f, "threshold": threshold, "k": k, "n": g.n,
              "size_bound": _sep_bound(k, g.n, f), "X_size": len(X)}
    if branch == "sampling":
        if sol.dual is None:
            sol = solve_balanced_lp(g, fam, X, mode="exact")
        restricted = restrict_balanced_dual(g, fam, sol)
        ell = dense_subgraph_ell(f, g.n, len(X))
        sample = sample_dense_subgraph(g, fam, X, restricted.dual, ell, seed)
        H = sample.H
        diag = {"H_vertices": sorted(sample.vertices), "H_max_degree": H.max_degree(),
                "treewidth_lower_bound": degeneracy(H), "membership_bound": sample.bound,
                "transcript": {"seed": sample.transcript["seed"],
                               "attempts": sample.transcript["attempts"]}}
        return CenterSeparator(None, "sampling", f, ledger, diag)
    if f <= 1e-12:
        S = [] if is_balanced(g, set(), X, 0.95) else list(X)
        ledger.update(rounding="skipped: zero optimum", S_size=len(S))
        return CenterSeparator(S, "rounding", f, ledger)
    cert = round_balanced_separator(g, fam, X, sol, mode=mode)
    cover = greedy_cover(fam, cert.separator, g.n)
    S = cover.centers
    union = set().union(*(fam.sets[w] for w in S)) if S else set()
    assert is_balanced(g, union, X, 0.95), "covering sets lost balance"
    ledger.update(fcov=cert.fcov, S_size=len(S), rounds=len(cert.rounds),
                  within_size_bound=len(S) <= ledger["size_bound"])
    return CenterSeparator(S, "rounding", f, ledger)


# ---------------------------------------------------------- tree decomposition


@dataclass(frozen=True)
class TDNode:
    id: int
    parent: int | None
    witnesses: tuple[int, ...]
    bag: frozenset[int]


@dataclass
class TreeDecomposition:
    nodes: list[TDNode]
    root: int
    ledger: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": "tree-decomposition",
            "root": self.root,
            "nodes": [{"id": t.id, "parent": t.parent, "witnesses": list(t.witnesses),
                       "bag": sorted(t.bag)} for t in self.nodes],
            "ledger": self.ledger,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TreeDecomposition":
        try:
            nodes = [TDNode(int(d["id"]), None if d["parent"] is None else int(d["parent"]),
                            tuple(int(w) for w in d.get("witnesses", [])),
                            frozenset(int(v) for v in d["bag"])) for d in obj["nodes"]]
            return cls(nodes, int(obj["root"]), list(obj.get("ledger", [])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad tree decomposition JSON: {exc}") from exc


def _check_restricted_family(fam: LayeredFamily, sub: LayeredFamily, verts: Sequence[int]):
    for c, F in sub.sets.items():
        orig = verts[c]
        if orig not in fam.sets:
            raise AssertionError(f"vertex {orig} became a center after restriction")
        if {verts[v] for v in F} != fam.sets[orig]:
            raise AssertionError(f"set of center {orig} changed after restriction")


def build_tree_decomposition(g: Graph, fam: LayeredFamily, X0: Iterable[int] = (),
                             pad_cap: int | None = None, mode: str = "auto",
                             f_threshold: float | None = None) -> TreeDecomposition:
    X0 = set(X0)
    if not X0 <= set(fam.sets):
        raise ValidationError("X0 must consist of centers")
    if pad_cap is None:
        pad_cap = max(1, math.ceil(len(fam.sets) / 4))
    if pad_cap < 1:
        raise ValidationError("pad cap must be positive")
    nodes: list[TDNode] = []
    ledger: list[dict] = []

    def leaf(W, centers, parent, entry):
        nid = len(nodes)
        nodes.append(TDNode(nid, parent, tuple(sorted(centers)), frozenset(W)))
        entry.update(node=nid, witnesses=len(centers))
        ledger.append(entry)
        return nid

    def rec(W: frozenset[int], X: set[int], parent: int | None):
        verts = sorted(W)
        sub = induced_subgraph(g, verts)
        subfam = build_layered_family(sub, fam.partition.restrict(verts))
        _check_restricted_family(fam, subfam, verts)
        centers = sorted(verts[c] for c in subfam.sets)
        if not X <= set(centers):
            raise AssertionError("carried witnesses are not centers of the restricted family")
        entry = {"vertices": len(W), "X": len(X), "pad_cap": pad_cap, "centers": len(centers)}
        if len(centers) <= max(len(X), pad_cap):
            entry.update(kind="leaf", cap=max(len(X), pad_cap))
            return leaf(W, centers, parent, entry)
        index = {v: i for i, v in enumerate(verts)}
        target = pad_cap
        while True:
            # Escalate the padding when the separator leaves one component that would not shrink.
            if len(X) < target:
                extra = [c for c in centers if c not in X][: target - len(X)]
                XY = X | set(extra)
                Y = sorted(XY)
            else:
                XY = set(X)
                Y = sorted(X)[:target]
            res = balanced_center_separator(sub, subfam, [index[y] for y in Y],
                                            f_threshold=f_threshold, mode=mode)
            S = {verts[w] for w in res.S}
            sep = set().union(*(fam.sets[w] for w in S)) if S else set()
            comps = connected_components(g, W - sep)
            if not any((C | sep) == W for C in comps):
                break
            if target >= len(centers):
                entry.update(kind="fallback-leaf", S=len(S), reason="a child would not shrink")
                return leaf(W, centers, parent, entry)
            target = min(2 * target, len(centers))
        X = XY
        entry["pad_used"] = target
        wit = X | S
        bag = frozenset().union(*(fam.sets[w] for w in wit))
        nid = len(nodes)
        nodes.append(TDNode(nid, parent, tuple(sorted(wit)), bag))
        entry.update(kind="split", node=nid, witnesses=len(wit), S=len(S),
                     cap=max(len(X), target) + len(S), lp_objective=res.lp_objective,
                     children=len(comps))
        ledger.append(entry)
        for C in comps:
            rec(frozenset(C | sep), S | (X & C), nid)
        return nid

    if g.n == 0:
        return TreeDecomposition([TDNode(0, None, (), frozenset())], 0, [{"kind": "leaf"}])
    root = rec(frozenset(range(g.n)), X0, None)
    return TreeDecomposition(nodes, root, ledger)


@dataclass
class TDReport:
    ok: bool
    violation: str | None = None
    axiom: int | None = None


def validate_tree_decomposition(g: Graph, td: TreeDecomposition, fam: LayeredFamily | None = None,
                                quotient: QuotientMap | None = None) -> TDReport:
    """Check the three axioms and, given a family, that each bag is the union of its witnesses' sets.

    With ``quotient`` the family lives on the quotient graph and sets are lifted
    through the blocks before comparing.
    """
    by_id = {t.id: t for t in td.nodes}
    if len(by_id) != len(td.nodes) or td.root not in by_id:
        return TDReport(False, "node ids are not unique or the root is missing", 0)
    for t in td.nodes:
        if (t.parent is None) != (t.id == td.root):
            return TDReport(False, f"node {t.id} has a bad parent link", 0)
        if t.parent is not None and t.parent not in by_id:
            return TDReport(False, f"node {t.id} points at a missing parent", 0)
    for t in td.nodes:
        seen = set()
        cur = t.id
        while cur is not None:
            if cur in seen:
                return TDReport(False, f"parent links cycle through node {cur}", 0)
            seen.add(cur)
            cur = by_id[cur].parent
    holders: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for t in td.nodes:
        for v in t.bag:
            if not 0 <= v < g.n:
                return TDReport(False, f"bag {t.id} holds unknown vertex {v}", 1)
            holders[v].append(t.id)
    for v, hs in holders.items():
        if not hs:
            return TDReport(False, f"vertex {v} lies in no bag", 1)
    for u, v in g.edges():
        if not any(v in by_id[i].bag for i in holders[u]):
            return TDReport(False, f"edge ({u},{v}) lies in no bag", 2)
    for v, hs in holders.items():
        hold = set(hs)
        tops = [i for i in hs if by_id[i].parent not in hold]
        if len(tops) != 1:
            return TDReport(False, f"bags holding vertex {v} are not connected in the tree", 3)
    if fam is not None:
        for t in td.nodes:
            if any(w not in fam.sets for w in t.witnesses):
                return TDReport(False, f"bag {t.id} names a witness that is not a center", 4)
            union = set().union(*(fam.sets[w] for w in t.witnesses)) if t.witnesses else set()
            if quotient is not None:
                union = quotient.lift(union)
            if union != set(t.bag):
                return TDReport(False, f"bag {t.id} differs from the union of its witness sets", 4)
    return TDReport(True)


# ------------------------------------------------------------------- metrics


def _covers(g: Graph, centers: Iterable[int], S: set[int], r: int) -> bool:
    dist = hop_distances(g, centers, limit=r - 1)
    return all(dist[v] <= r - 1 for v in S)


def coverability(g: Graph, S: Iterable[int], k: int, r: int, exact: bool | None = None):
    """Up to k centers reaching every vertex of S by a path on at most r vertices, or None."""
    S = set(S)
    if not S:
        return []
    if r < 1:
        return None
    if exact is None:
        exact = g.n <= EXACT_COVER_N
    reach = []
    for z in range(g.n):
        dist = hop_distances(g, [z], limit=r - 1)
        reach.append(frozenset(v for v in S if dist[v] <= r - 1))
    if exact:
        useful = [z for z in range(g.n) if reach[z]]
        for size in range(1, k + 1):
            for combo in combinations(useful, size):
                if frozenset().union(*(reach[z] for z in combo)) >= S:
                    return list(combo)
        return None
    left = set(S)
    chosen = []
    while left and len(chosen) < k:
        z = max(range(g.n), key=lambda z: (len(reach[z] & left), -z))
        if not reach[z] & left:
            return None
        chosen.append(z)
        left -= reach[z]
    return chosen if not left else None


def distance_r_independence(g: Graph, S: Iterable[int], r: int, limit: int = ALPHA_LIMIT):
    """Largest subset of S whose members are pairwise more than r edges apart."""
    S = sorted(set(S))
    if not S:
        return 0, []
    conflict = {}
    for v in S:
        dist = hop_distances(g, [v], limit=r)
        conflict[v] = frozenset(w for w in S if w != v and dist[w] <= r)
    if len(S) > limit:
        greedy = []
        blocked: set[int] = set()
        for v in sorted(S, key=lambda v: (len(conflict[v]), v)):
            if v not in blocked:
                greedy.append(v)
                blocked |= conflict[v] | {v}
        raise Inconclusive(f"|S|={len(S)} exceeds the exact limit {limit}",
                           partial={"lower_bound": len(greedy), "witness": greedy})
    best: list[int] = []

    def grow(chosen: list[int], cand: list[int]):
        nonlocal best
        if len(chosen) + len(cand) <= len(best):
            return
        if not cand:
            best = list(chosen)
            return
        v = cand[0]
        grow(chosen + [v], [w for w in cand[1:] if w not in conflict[v]])
        if conflict[v] & set(cand[1:]):
            grow(chosen, cand[1:])

    order = sorted(S, key=lambda v: (-len(conflict[v]), v))
    grow([], order)
    return len(best), sorted(best)


# ------------------------------------------------------------------ pipeline


@dataclass
class BagQuality:
    rows: list[dict]
    radius_vertices: int

    def to_json(self) -> dict:
        return {"kind": "bag-quality", "radius_vertices": self.radius_vertices, "bags": self.rows}


@dataclass
class TreewidthPipelineResult:
    td: TreeDecomposition
    quality: BagQuality
    quotient_td: TreeDecomposition
    quotient: QuotientMap
    quotient_graph: Graph
    family: LayeredFamily
    representatives: list[int]

    def to_json(self) -> dict:
        out = self.td.to_json()
        out["quality"] = self.quality.to_json()
        out["blocks"] = [sorted(b) for b in self.quotient.blocks]
        out["representatives"] = self.representatives
        return out


def lifted_radius(n_quotient: int) -> int:
    return 8 * math.ceil(math.log2(2 * max(n_quotient, 1)))


def coarse_treewidth_pipeline(g: Graph, t: int | None = None, pad_cap: int | None = None,
                              mode: str = "auto", alpha_limit: int = ALPHA_LIMIT
                              ) -> TreewidthPipelineResult:
    rp = greedy_four_radius_partition(g)
    blocks = sorted(rp.witnesses, key=lambda w: min(w[0]))
    q, qmap = quotient_by_components(g, [b for b, _, _ in blocks])
    reps = [c for _, c, _ in blocks]
    qfam = family_for(q)
    qtd = build_tree_decomposition(q, qfam, (), pad_cap=pad_cap, mode=mode)
    report = validate_tree_decomposition(q, qtd, qfam)
    assert report.ok, report.violation
    nodes = [TDNode(t_.id, t_.parent, tuple(reps[w] for w in t_.witnesses),
                    frozenset(qmap.lift(t_.bag))) for t_ in qtd.nodes]
    td = TreeDecomposition(nodes, qtd.root, qtd.ledger)
    report = validate_tree_decomposition(g, td)
    assert report.ok, report.violation
    r = lifted_radius(q.n)
    rows = []
    for qt, t_ in zip(qtd.nodes, nodes):
        centers = list(t_.witnesses)
        ok = _covers(g, centers, set(t_.bag), r) if t_.bag else True
        row = {"node": t_.id, "witnesses": len(centers), "centers": centers, "cover_ok": ok,
               "bag_size": len(t_.bag)}
        if len(t_.bag) <= alpha_limit:
            alpha, wit = distance_r_independence(g, t_.bag, 2 * r, alpha_limit)
            row.update(alpha=alpha, alpha_radius_edges=2 * r, alpha_witness=wit,
                       alpha_ok=alpha <= len(centers))
        rows.append(row)
    return TreewidthPipelineResult(td, BagQuality(rows, r), qtd, qmap, q, qfam, reps)

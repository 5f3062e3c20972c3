"""Re-verify JSON artifacts against a graph using only the independent checkers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .decomposition import TreeDecomposition, validate_tree_decomposition
from .errors import ValidationError
from .family import OrderedPartition, build_layered_family, family_for
from .graph import (
    Graph,
    MinorModel,
    enumerate_induced_paths,
    hop_distances,
    is_induced_path,
    separates,
    verify_minor_model,
)
from .lp import CHECK_TOL, BalancedDual, set_distance
from .menger import verify_packing
from .partition import RadiusPartition, check_radius_partition, classify_parts
from .rounding import is_balanced

SMALL_N = 24


@dataclass
class VerifyReport:
    kind: str
    ok: bool
    problems: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": self.kind, "ok": self.ok, "problems": self.problems, "notes": self.notes}


def _ints(obj, key) -> list[int]:
    try:
        return [int(v) for v in obj[key]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"artifact field {key!r} missing or malformed") from exc


def _check_cover(g: Graph, S, cover: dict, problems: list[str]):
    centers = [int(c) for c in cover.get("centers", [])]
    r = int(cover.get("radius_vertices", 0))
    if not S:
        return
    if not centers or r < 1:
        problems.append("cover has no centers or no radius")
        return
    dist = hop_distances(g, centers, limit=r - 1)
    far = [v for v in S if dist[v] > r - 1]
    if far:
        problems.append(f"vertex {far[0]} is not within {r} vertices of any center")


def _verify_separator(g, art, problems, notes):
    S = set(_ints(art, "separator"))
    if "X" in art:
        X = _ints(art, "X")
        if not is_balanced(g, S, X, 0.95):
            problems.append("separator is not (X, 95/100)-balanced")
    else:
        A, B = _ints(art, "A"), _ints(art, "B")
        if not separates(g, S, A, B):
            problems.append("separator misses an A-B path")
    if "cover" in art:
        _check_cover(g, S, art["cover"], problems)
    ledger = art.get("ledger", {})
    if "alpha" in ledger and ledger["alpha"] is not None and "cover" in art:
        if ledger["alpha"] > len(art["cover"].get("centers", [])):
            problems.append("recorded independence number exceeds the cover size")


def _verify_tree(g, art, problems, notes):
    td = TreeDecomposition.from_json(art)
    fam = None
    if "family" in art:
        fam = _family_from_json(g, art["family"])
    rep = validate_tree_decomposition(g, td, fam)
    if not rep.ok:
        problems.append(f"axiom {rep.axiom}: {rep.violation}")
    quality = art.get("quality")
    if quality:
        r = int(quality["radius_vertices"])
        bags = {t.id: t.bag for t in td.nodes}
        for row in quality["bags"]:
            _check_cover(g, bags[row["node"]], {"centers": row["centers"], "radius_vertices": r},
                         problems)


def _family_from_json(g: Graph, obj: dict):
    parts = OrderedPartition(tuple(tuple(int(v) for v in p) for p in obj["parts"]))
    fam = build_layered_family(g, parts)
    claimed = {int(c): frozenset(vs) for c, vs in obj.get("sets", {}).items()}
    if claimed and claimed != dict(fam.sets):
        raise ValidationError("family sets disagree with the ordered partition")
    return fam


def _verify_lp_ab(g, art, problems, notes):
    A, B = _ints(art, "A"), _ints(art, "B")
    fam = family_for(g)
    x = {int(c): float(w) for c, w in art["x"].items()}
    if any(w < -CHECK_TOL for w in x.values()):
        problems.append("negative primal weight")
    if abs(sum(x.values()) - float(art["objective"])) > CHECK_TOL:
        problems.append("objective differs from the sum of weights")
    duals = art.get("dual_paths", [])
    if duals:
        dual_obj = sum(float(d["y"]) for d in duals)
        if abs(dual_obj - float(art["objective"])) > CHECK_TOL:
            problems.append(f"duality gap {abs(dual_obj - float(art['objective'])):.3g}")
        load: dict[int, float] = {}
        for d in duals:
            P = [int(v) for v in d["path"]]
            if not is_induced_path(g, P) or P[0] not in A or P[-1] not in B:
                problems.append(f"dual path {P} is not an induced A-B path")
            for c in fam.sets_meeting(P):
                load[c] = load.get(c, 0.0) + float(d["y"])
        if any(v > 1 + CHECK_TOL for v in load.values()):
            problems.append("some set carries dual load above 1")
    if g.n <= SMALL_N:
        for P in enumerate_induced_paths(g, A, B).paths:
            w = sum(x.get(c, 0.0) for c in fam.sets_meeting(P))
            if w < 1 - CHECK_TOL:
                problems.append(f"path {list(P)} has weight {w:.4g} < 1")
                break
    else:
        notes.append("primal feasibility not re-enumerated on a large graph")


def _verify_lp_balanced(g, art, problems, notes):
    X = _ints(art, "X")
    fam = family_for(g)
    x = {c: 0.0 for c in fam.sets}
    x.update({int(c): float(w) for c, w in art["x"].items()})
    f = float(art["objective"])
    if abs(sum(x.values()) - f) > CHECK_TOL:
        problems.append("objective differs from the sum of weights")
    if g.n <= SMALL_N:
        for u in X:
            cover = sum(min(1.0, set_distance(g, fam, x, u, v)) for v in X)
            if cover < len(X) / 10 - CHECK_TOL:
                problems.append(f"center {u} reaches total distance {cover:.4g} < |X|/10")
    else:
        notes.append("primal feasibility not re-enumerated on a large graph")
    dual = art.get("dual")
    if dual:
        rho = {int(u): float(r) for u, r in dual["rho"].items()}
        eta = {(u, v): 0.0 for u in X for v in X}
        eta.update({(int(u), int(v)): float(e) for u, v, e in dual["eta"]})
        gamma: dict = {}
        for item in dual["gamma"]:
            gamma.setdefault((int(item["u"]), int(item["v"])), {})[tuple(item["path"])] = float(item["w"])
        bd = BalancedDual(tuple(X), rho, eta, gamma)
        problems.extend(bd.violations(fam, f))
        if abs(bd.objective - f) > CHECK_TOL:
            problems.append(f"duality gap {abs(bd.objective - f):.3g}")


def _verify_path_multiset(g, art, problems, notes):
    A, B = _ints(art, "A"), _ints(art, "B")
    fam = family_for(g)
    ell = float(art["ell"])
    congestion: dict[int, int] = {}
    k = fam.thickness
    for P in art["paths"]:
        P = [int(v) for v in P]
        if not is_induced_path(g, P) or P[0] not in A or P[-1] not in B:
            problems.append(f"{P} is not an induced A-B path")
        hits: dict[int, int] = {}
        for v in P:
            for c in fam.member_of[v]:
                hits[c] = hits.get(c, 0) + 1
        if hits and max(hits.values()) > 2 * k - 1:
            problems.append(f"path {P} meets a set in more than 2k-1 vertices")
        for c in hits:
            congestion[c] = congestion.get(c, 0) + 1
    if congestion and max(congestion.values()) > 6 * ell:
        problems.append("congestion exceeds 6 ell")
    if len(art["paths"]) < math.ceil(float(art["f"]) * ell - 1e-9):
        problems.append("fewer paths than ceil(f ell)")


def _verify_sampled(g, art, problems, notes):
    X = set(_ints(art, "X"))
    V = set(_ints(art, "vertices"))
    if not X <= V:
        problems.append("X is not contained in V(H)")
    fam = family_for(g)
    bound = float(art["bound"])
    worst = max((len(fam.sets[c] & V) for c in fam.sets_meeting(V)), default=0)
    if worst > bound + 1e-9:
        problems.append(f"a set meets V(H) in {worst} > {bound:.4g} vertices")


def _verify_menger(g, art, problems, notes):
    A, B = _ints(art, "A"), _ints(art, "B")
    k = int(art["k"])
    if "paths" in art:
        paths = [[int(v) for v in P] for P in art["paths"]]
        if len(paths) != k:
            problems.append(f"{len(paths)} paths for k={k}")
        used: set[int] = set()
        for P in paths:
            if P[0] not in A or P[-1] not in B or len(set(P)) != len(P) or \
                    any(not g.has_edge(a, b) for a, b in zip(P, P[1:])):
                problems.append(f"{P} is not an A-B path")
            if used & set(P):
                problems.append("paths share a vertex")
            used |= set(P)
    else:
        S = set(_ints(art, "separator"))
        if len(S) >= k:
            problems.append("separator is not smaller than k")
        if not separates(g, S, A, B):
            problems.append("separator misses an A-B path")


def verify_certificate(g: Graph, art: dict) -> VerifyReport:
    if not isinstance(art, dict) or "kind" not in art:
        raise ValidationError("artifact has no 'kind'")
    kind = art["kind"]
    problems: list[str] = []
    notes: list[str] = []
    try:
        if kind in ("ab", "balanced", "separator"):
            _verify_separator(g, art, problems, notes)
        elif kind == "packing":
            A, B = _ints(art, "A"), _ints(art, "B")
            paths = [[int(v) for v in P] for P in art["paths"]]
            problems += verify_packing(g, paths, A, B)
            if "k" in art and len(paths) != int(art["k"]):
                problems.append(f"{len(paths)} paths for k={art['k']}")
        elif kind == "menger":
            _verify_menger(g, art, problems, notes)
        elif kind == "tree-decomposition":
            _verify_tree(g, art, problems, notes)
        elif kind == "radius-partition":
            rp = RadiusPartition([frozenset(p) for p in art["parts"]],
                                 [(frozenset(w["component"]), int(w["center"]),
                                   int(w["radius_vertices"])) for w in art["witnesses"]])
            problems += check_radius_partition(g, rp)
            if art.get("model"):
                model = MinorModel.from_json(art["model"])
                if not verify_minor_model(g, model, model.t):
                    problems.append("minor model fails verification")
        elif kind == "minor":
            model = MinorModel.from_json(art)
            if not verify_minor_model(g, model, model.t):
                problems.append("minor model fails verification")
        elif kind == "edge-partition":
            ep = classify_parts(g, art["parts"])
            if "clean" in art and list(art["clean"]) != ep.clean:
                problems.append("recorded clean flags are wrong")
            if "s" in art and int(art["s"]) != ep.s:
                problems.append("recorded size bound is wrong")
        elif kind == "family":
            fam = _family_from_json(g, art)
            if "thickness" in art and int(art["thickness"]) != fam.thickness:
                problems.append("recorded thickness is wrong")
        elif kind == "lp-ab":
            _verify_lp_ab(g, art, problems, notes)
        elif kind == "lp-balanced":
            _verify_lp_balanced(g, art, problems, notes)
        elif kind == "path-multiset":
            _verify_path_multiset(g, art, problems, notes)
        elif kind == "sampled-subgraph":
            _verify_sampled(g, art, problems, notes)
        else:
            raise ValidationError(f"unknown artifact kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"artifact of kind {kind!r} is malformed: {exc!r}") from exc
    return VerifyReport(kind, not problems, problems, notes)

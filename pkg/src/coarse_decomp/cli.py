"""Command-line front end; one command per process, JSON artifacts out."""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path

from .certificates import verify_certificate
from .decomposition import (
    balanced_center_separator,
    build_tree_decomposition,
    coarse_treewidth_pipeline,
)
from .errors import Inconclusive, SamplingFailure, ValidationError
from .family import degeneracy_layering, build_layered_family, verify_witnessing, degeneracy
from .generators import gen_graph
from .graph import Graph, from_edge_list, to_edge_list
from .lp import (
    DEFAULT_PATH_CAP,
    TOL,
    restrict_balanced_dual,
    restrict_dual_to_upward_minimal,
    solve_ab_lp,
    solve_balanced_lp,
)
from .menger import coarse_menger_pipeline, menger_max_flow
from .partition import extract_ktt_model, greedy_four_radius_partition, star_edge_partition
from .rounding import round_ab_separator, round_balanced_separator
from .sampling import dense_subgraph_ell, sample_dense_subgraph, sample_path_multiset

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64

COMMANDS = ("partition", "family", "lp-ab", "round-ab", "lp-balanced", "round-balanced",
            "sample-paths", "sample-subgraph", "treedecomp", "pipeline-tw", "menger",
            "pipeline-menger", "verify", "gen")

log = logging.getLogger("coarse_decomp")

_TERMINAL = re.compile(r"^#\s*([ABX])\s*=\s*([\d,\s]*)$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _id_list(text: str) -> list[int]:
    try:
        return [int(t) for t in re.split(r"[,\s]+", text.strip()) if t]
    except ValueError as exc:
        raise ValidationError(f"bad vertex list {text!r}") from exc


def _read_graph(path: str) -> tuple[Graph, dict[str, list[int]]]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    terminals = {}
    for line in text.splitlines():
        m = _TERMINAL.match(line.strip())
        if m:
            terminals[m.group(1)] = _id_list(m.group(2))
    return from_edge_list(text), terminals


def _terminal(args, terminals, name) -> list[int]:
    given = getattr(args, name)
    if given is not None:
        return _id_list(given)
    if name in terminals:
        return terminals[name]
    raise ValidationError(f"--{name} is required (or a '# {name}=...' line in the graph file)")


def _family(g: Graph, args):
    return build_layered_family(g, degeneracy_layering(g, args.d))


def _emit(args, artifact: dict, summary: str):
    text = json.dumps(artifact, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def _jsonable(obj):
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


# ------------------------------------------------------------------ commands


def cmd_partition(args, g, terms):
    rp = greedy_four_radius_partition(g)
    art = rp.to_json()
    summary = f"{len(rp.parts)} parts, {len(rp.witnesses)} components"
    if args.ktt:
        model = extract_ktt_model(g, args.ktt)
        art["model"] = None if model is None else model.to_json()
        summary += f"; K_{args.ktt},{args.ktt} model {'found' if model else 'not found (inconclusive)'}"
    if args.edges:
        ep = star_edge_partition(g)
        art["edge_partition"] = ep.to_json()
        summary += f"; star edge partition with {len(ep.parts)} parts, s={ep.s}"
    return art, summary


def cmd_family(args, g, terms):
    fam = _family(g, args)
    d = args.d if args.d is not None else degeneracy(g)
    rep = verify_witnessing(g, fam, 4 * d)
    art = {"kind": "family", **fam.to_json(), "d": d, "witnessing_excess": rep.worst_excess,
           "witnessing_ok": rep.ok}
    return art, f"{len(fam)} sets over {len(fam.partition.parts)} layers, thickness {fam.thickness}"


def cmd_lp_ab(args, g, terms):
    A, B = _terminal(args, terms, "A"), _terminal(args, terms, "B")
    fam = _family(g, args)
    sol = solve_ab_lp(g, fam, A, B, mode=args.mode, tol=args.tol, path_cap=args.path_cap)
    art = {**sol.to_json(), "A": A, "B": B}
    return art, f"A-B LP optimum {sol.objective:.6g} ({sol.mode} mode)"


def cmd_round_ab(args, g, terms):
    A, B = _terminal(args, terms, "A"), _terminal(args, terms, "B")
    fam = _family(g, args)
    sol = solve_ab_lp(g, fam, A, B, mode=args.mode, tol=args.tol, path_cap=args.path_cap)
    cert = round_ab_separator(g, fam, A, B, sol)
    art = {**cert.to_json(), "A": A, "B": B}
    return art, f"separator of {len(cert.separator)} vertices, fcov {cert.fcov:.6g}"


def cmd_lp_balanced(args, g, terms):
    fam = _family(g, args)
    X = _terminal(args, terms, "X")
    sol = solve_balanced_lp(g, fam, X, mode=args.mode, tol=args.tol, path_cap=args.path_cap)
    return sol.to_json(), f"balanced LP optimum {sol.objective:.6g} ({sol.mode} mode)"


def cmd_round_balanced(args, g, terms):
    fam = _family(g, args)
    X = _terminal(args, terms, "X")
    sol = solve_balanced_lp(g, fam, X, mode=args.mode, tol=args.tol, path_cap=args.path_cap)
    cert = round_balanced_separator(g, fam, X, sol, mode=args.mode)
    art = {**cert.to_json(), "X": sorted(set(X))}
    return art, f"balanced separator of {len(cert.separator)} vertices after {len(cert.rounds)} rounds"


def cmd_sample_paths(args, g, terms):
    A, B = _terminal(args, terms, "A"), _terminal(args, terms, "B")
    fam = _family(g, args)
    sol = solve_ab_lp(g, fam, A, B, mode="exact", path_cap=args.path_cap)
    sol = restrict_dual_to_upward_minimal(g, fam, sol)
    ell = args.ell if args.ell is not None else math.log2(2 * g.n)
    packing = sample_path_multiset(g, fam, A, B, sol, ell, args.seed)
    art = {**packing.to_json(), "A": A, "B": B}
    return art, f"{len(packing.paths)} paths sampled, peak congestion {max(packing.congestion.values())}"


def cmd_sample_subgraph(args, g, terms):
    fam = _family(g, args)
    X = _terminal(args, terms, "X")
    sol = solve_balanced_lp(g, fam, X, mode="exact", path_cap=args.path_cap)
    sol = restrict_balanced_dual(g, fam, sol)
    ell = args.ell if args.ell is not None else dense_subgraph_ell(sol.objective, g.n, len(set(X)))
    sample = sample_dense_subgraph(g, fam, X, sol.dual, int(math.ceil(ell)), args.seed)
    art = {**sample.to_json(), "X": sorted(set(X))}
    return art, f"H has {len(sample.vertices)} vertices, max degree {sample.H.max_degree()}"


def cmd_treedecomp(args, g, terms):
    fam = _family(g, args)
    X0 = _id_list(args.X) if args.X else terms.get("X", [])
    if args.branch == "sampling":
        res = balanced_center_separator(g, fam, X0 or fam.centers[:1], branch_override="sampling",
                                        mode=args.mode, seed=args.seed)
        art = {"kind": "diagnostic", "branch": "sampling", "ledger": res.ledger,
               "diagnostic": res.diagnostic}
        return art, "sampling branch: diagnostic subgraph emitted"
    td = build_tree_decomposition(g, fam, X0, pad_cap=args.pad_cap, mode=args.mode)
    art = {**td.to_json(), "family": fam.to_json()}
    width = max(len(t.bag) for t in td.nodes) - 1
    return art, f"{len(td.nodes)} nodes, largest bag {width + 1}"


def cmd_pipeline_tw(args, g, terms):
    res = coarse_treewidth_pipeline(g, args.t, pad_cap=args.pad_cap, mode=args.mode)
    bad = [r["node"] for r in res.quality.rows if not r["cover_ok"]]
    return res.to_json(), (f"{len(res.td.nodes)} nodes over {res.quotient_graph.n} blocks; "
                           f"cover radius {res.quality.radius_vertices} vertices; "
                           f"{'all covers verified' if not bad else f'cover failures at {bad}'}")


def cmd_menger(args, g, terms):
    A, B = _terminal(args, terms, "A"), _terminal(args, terms, "B")
    res = menger_max_flow(g, A, B, args.k)
    art = {**res.to_json(), "A": A, "B": B}
    if res.paths is not None:
        return art, f"{len(res.paths)} vertex-disjoint paths"
    return art, f"separator of size {len(res.separator)} < {args.k}"


def cmd_pipeline_menger(args, g, terms):
    A, B = _terminal(args, terms, "A"), _terminal(args, terms, "B")
    res = coarse_menger_pipeline(g, args.t, A, B, args.k, branch=args.branch, seed=args.seed,
                                 budget=args.budget)
    art = {**res.to_json(), "A": A, "B": B, "k": args.k}
    if res.kind == "packing":
        return art, f"{len(res.paths)} pairwise anticomplete induced paths"
    return art, f"separator of {len(res.separator)} vertices covered by {len(res.centers)} centers"


def cmd_verify(args, g, terms):
    try:
        art = json.loads(Path(args.cert).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"certificate is not JSON: {exc}") from exc
    rep = verify_certificate(g, art)
    if not rep.ok:
        raise ValidationError(f"{rep.kind} certificate rejected: " + "; ".join(rep.problems))
    return rep.to_json(), f"{rep.kind} certificate verified"


HANDLERS = {
    "partition": cmd_partition, "family": cmd_family, "lp-ab": cmd_lp_ab,
    "round-ab": cmd_round_ab, "lp-balanced": cmd_lp_balanced,
    "round-balanced": cmd_round_balanced, "sample-paths": cmd_sample_paths,
    "sample-subgraph": cmd_sample_subgraph, "treedecomp": cmd_treedecomp,
    "pipeline-tw": cmd_pipeline_tw, "menger": cmd_menger,
    "pipeline-menger": cmd_pipeline_menger, "verify": cmd_verify,
}

GEN_FLAGS = {"grid": 2, "path": 1, "star": 1, "cycle": 1, "gnp": 2, "theta": 2,
             "corridor": 2, "two-balls": "*"}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coarse-decomp",
                     description="Coarse tree decompositions and induced Menger certificates.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--out", help="write the JSON artifact here")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "gen":
            grp = p.add_mutually_exclusive_group(required=True)
            for kind, nargs in GEN_FLAGS.items():
                grp.add_argument(f"--{kind}", nargs=nargs, metavar="P")
            continue
        p.add_argument("--graph", required=True, help="edge-list file, or - for stdin")
        p.add_argument("--mode", choices=("auto", "exact", "fast"), default="auto")
        p.add_argument("--tol", type=float, default=TOL)
        p.add_argument("--path-cap", type=int, default=DEFAULT_PATH_CAP)
        p.add_argument("--pad-cap", type=int)
        p.add_argument("--branch", choices=("auto", "rounding", "sampling"), default="auto")
        p.add_argument("--budget", type=int, default=200_000)
        p.add_argument("--d", type=int, help="degeneracy bound used for layering")
        p.add_argument("--A")
        p.add_argument("--B")
        p.add_argument("--X")
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--t", type=int)
        p.add_argument("--ell", type=float)
        if name == "partition":
            p.add_argument("--ktt", type=int, metavar="T", help="also try to extract a K_{T,T} model")
            p.add_argument("--edges", action="store_true", help="also emit a star edge partition")
        if name == "verify":
            p.add_argument("--cert", required=True)
    return parser


def _check_caps(args):
    for flag in ("path_cap", "pad_cap", "budget", "k"):
        val = getattr(args, flag, None)
        if val is not None and val < (0 if flag == "k" else 1):
            raise ValidationError(f"--{flag.replace('_', '-')} must be positive")


def run(argv: list[str]) -> int:
    parser = build_parser()
    if not argv or argv[0] not in COMMANDS:
        if argv and argv[0] in ("-h", "--help"):
            parser.print_help()
            return EXIT_OK
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"commands: {', '.join(COMMANDS)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen":
            kind = next(k for k in GEN_FLAGS if getattr(args, k.replace("-", "_")) is not None)
            fx = gen_graph(kind, getattr(args, kind.replace("-", "_")), args.seed)
            text = to_edge_list(fx.graph, fx.comments())
            if args.out:
                Path(args.out).write_text(text)
                print(f"{kind}: {fx.graph.n} vertices, {fx.graph.m} edges")
            else:
                sys.stdout.write(text)
            return EXIT_OK
        _check_caps(args)
        g, terms = _read_graph(args.graph)
        art, summary = HANDLERS[args.command](args, g, terms)
        _emit(args, art, summary)
        return EXIT_OK
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (Inconclusive, SamplingFailure) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

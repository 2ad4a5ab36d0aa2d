"""Command-line entry point: ``haarrep <group|graph|aut|census|bounds|verify> ...``.

Machine output goes to stdout (JSON, or edge lists for ``graph``); diagnostics
go to stderr. Exit status is 0 on success, 1 when a requested check fails and
2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .autgroup import automorphism_group
from .bounds import DEFAULT_SCAN_CEILING, BoundsError, eval_bounds, find_n_eps
from .census import (EXHAUSTIVE_MAX_BITS, FAMILY_KINDS, PREDICATES, CensusError, FamilySpec,
                     exhaustive_census, monte_carlo_census, write_trace_csv)
from .graphs import (GraphError, SetMatrix, cayley_digraph, haar_graph, iota_permutation, part_coloring,
                     m_cayley_digraph, right_regular_action)
from .groups import GroupError, c_value, classify_group, make_group, parse_mask
from .oracles import ORACLE_IDS, OracleError, run_oracle
from .perm import cycle_notation


@dataclass
class RunManifest:
    argv: list[str]
    version: str = __version__
    seeds: list[str] = field(default_factory=list)
    caps: dict = field(default_factory=dict)
    wall_time: float = 0.0


def _emit(obj: dict, manifest: RunManifest, started: float) -> None:
    manifest.wall_time = time.perf_counter() - started
    obj = dict(obj, manifest=asdict(manifest))
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _parse_int(text: str) -> int:
    """Decimal, hex (0x..) or a power written ``2^k``."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base, 0) ** int(exp, 0)
    return int(text, 0)


# ---------------------------------------------------------------------------
# graph arguments shared by ``graph`` and ``aut``


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("kind", choices=("cayley", "haar", "mcayley"))
    p.add_argument("group", help="group spec, e.g. C4, Q8, D6, Dic(C6,3), C2^3, S3xC2")
    p.add_argument("--set", dest="set_mask", help="connection set as a hex bitmask (LSB = element 0)")
    p.add_argument("--m", type=int, default=2, help="number of blocks for mcayley")
    p.add_argument("--matrix", help='set-matrix as JSON rows of hex masks, e.g. \'[["0x0","0x3"],["0x3","0x0"]]\'')


def _build_graph(args):
    G = make_group(args.group)
    if args.kind == "mcayley":
        if args.matrix is None:
            raise GraphError("mcayley needs --matrix")
        SM = SetMatrix.from_json(json.loads(args.matrix), G.n)
        if SM.m != args.m:
            raise GraphError(f"--matrix has {SM.m} rows but --m is {args.m}")
        return G, m_cayley_digraph(G, SM), right_regular_action(G, SM.m)
    if args.set_mask is None:
        raise GraphError(f"{args.kind} needs --set")
    S = parse_mask(args.set_mask, G.n)
    if args.kind == "cayley":
        return G, cayley_digraph(G, S), right_regular_action(G, 1)
    seeds = right_regular_action(G, 2)
    if G.is_abelian and not getattr(args, "plus", False):
        seeds.append(iota_permutation(G))
    return G, haar_graph(G, S), seeds


def cmd_group_info(args, manifest, started) -> int:
    G = make_group(args.spec)
    cls = classify_group(G)
    out = {"group": G.name, "order": G.n, "exponent": G.exponent, "abelian": G.is_abelian,
           "c": c_value(G, G.full_mask), "involutions": cls.involution_count,
           "class": cls.to_dict()}
    _emit(out, manifest, started)
    return 0


def cmd_graph(args, manifest, started) -> int:
    _, graph, _ = _build_graph(args)
    sys.stdout.write(graph.to_dot() if args.format == "dot" else graph.to_edge_list())
    return 0


def cmd_aut(args, manifest, started) -> int:
    if args.plus and args.kind != "haar":
        raise GraphError("--plus applies to Haar graphs only")
    G, graph, seeds = _build_graph(args)
    if args.plus:
        graph = graph.recolored(part_coloring(G.n, 2))
    A = automorphism_group(graph, seeds)
    out = {"group": G.name, "kind": args.kind, "plus": args.plus, "vertices": graph.v,
           "order": str(A.order), "base": A.base,
           "generators": [cycle_notation(g) for g in A.strong_generators],
           "equals_group_order": A.order == G.n}
    _emit(out, manifest, started)
    return 0


def cmd_census(args, manifest, started) -> int:
    G = make_group(args.group)
    m = args.m if args.m is not None else (2 if args.family not in ("subsets", "inverse-closed") else 1)
    F = FamilySpec(args.family, G, m)
    manifest.caps = {"exhaustive_max_bits": args.max_bits}
    if args.mode == "exhaustive":
        rep = exhaustive_census(F, args.predicate, workers=args.workers, trace=bool(args.trace),
                                max_bits=args.max_bits)
    else:
        seed = _parse_int(args.seed)
        manifest.seeds = [args.seed]
        rep = monte_carlo_census(F, args.predicate, args.samples, seed, workers=args.workers,
                                 trace=bool(args.trace))
    if args.trace:
        write_trace_csv(rep, args.trace)
    _emit(rep.to_dict(), manifest, started)
    return 0


def cmd_bounds(args, manifest, started) -> int:
    if args.action == "find-neps":
        ceiling = 2 ** args.ceiling_log2
        manifest.caps = {"scan_ceiling_log2": args.ceiling_log2}
        res = find_n_eps(args.eps, ceiling=ceiling)
        out = res.to_dict()
        out["exceeds_2_pow_67"] = res.n_eps > 2 ** 67
    else:
        if args.n is None:
            raise BoundsError("bounds needs --n")
        out = eval_bounds(_parse_int(args.n), args.eps, args.m).to_dict()
    _emit(out, manifest, started)
    return 0


def cmd_verify(args, manifest, started) -> int:
    ids = list(ORACLE_IDS) if args.all else args.ids
    if not ids:
        raise OracleError("name lemma ids or pass --all")
    G = make_group(args.group) if args.group else None
    core = parse_mask(args.core, G.n if G else None) if args.core else None
    subset = parse_mask(args.set_mask, G.n if G else None) if args.set_mask else None
    failed = 0
    for lemma in ids:
        for r in run_oracle(lemma, group=G, core=core, subset=subset):
            failed += not r.passed
            _emit(r.to_dict(), manifest, started)
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haarrep", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="group structure")
    g.add_argument("action", choices=("info",))
    g.add_argument("spec")
    g.set_defaults(func=cmd_group_info)

    gr = sub.add_parser("graph", help="print a Cayley, Haar or m-Cayley (di)graph")
    _add_graph_args(gr)
    gr.add_argument("--format", choices=("edges", "dot"), default="edges")
    gr.set_defaults(func=cmd_graph)

    au = sub.add_parser("aut", help="automorphism group order and generators")
    _add_graph_args(au)
    au.add_argument("--plus", action="store_true", help="Haar graph automorphisms fixing both parts")
    au.set_defaults(func=cmd_aut)

    ce = sub.add_parser("census", help="exhaustive or Monte Carlo representation census")
    ce.add_argument("mode", choices=("exhaustive", "mc"))
    ce.add_argument("--group", required=True)
    ce.add_argument("--family", choices=FAMILY_KINDS, default="subsets")
    ce.add_argument("--m", type=int, default=None)
    ce.add_argument("--predicate", choices=tuple(PREDICATES), required=True)
    ce.add_argument("--samples", type=int, default=10000)
    ce.add_argument("--seed", default="0x5EED")
    ce.add_argument("--workers", type=int, default=1)
    ce.add_argument("--trace", metavar="CSV", help="write one row per predicate evaluation")
    ce.add_argument("--max-bits", type=int, default=EXHAUSTIVE_MAX_BITS,
                    help="exhaustive cap on the family bit length")
    ce.set_defaults(func=cmd_census)

    bo = sub.add_parser("bounds", help="evaluate bound formulas or locate n_eps")
    bo.add_argument("action", nargs="?", choices=("eval", "find-neps"), default="eval")
    bo.add_argument("--n", help="group order; accepts 2^k")
    bo.add_argument("--eps", type=float, default=0.1)
    bo.add_argument("--m", type=int, default=1)
    bo.add_argument("--ceiling-log2", type=int, default=DEFAULT_SCAN_CEILING.bit_length() - 1)
    bo.set_defaults(func=cmd_bounds)

    ve = sub.add_parser("verify", help="run lemma checks")
    ve.add_argument("ids", nargs="*", metavar="ID", help=", ".join(ORACLE_IDS))
    ve.add_argument("--all", action="store_true")
    ve.add_argument("--group")
    ve.add_argument("--core", help="normal subgroup as a hex mask (L5.1)")
    ve.add_argument("--set", dest="set_mask", help="inverse-closed subset as a hex mask (L2.2)")
    ve.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    manifest = RunManifest(argv=["haarrep", *argv])
    try:
        return args.func(args, manifest, started)
    except (GroupError, GraphError, CensusError, BoundsError, OracleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

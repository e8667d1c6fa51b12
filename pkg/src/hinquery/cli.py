"""Command line interface.

Subcommands: validate, generate, query, oracle, bench. Exit codes: 0 on
success, 1 for parse or validation problems, 2 when a query's specific
nodes cannot be pinned to data nodes. --format machine emits JSON documents
with floats fixed at 12 significant digits so output is diffable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import backend
from .bench import run_bench
from .bundle import (BundleValidationError, GraphFormatError, load_bundle,
                     load_query, round_floats, save_bundle)
from .general import GeneralResult, general_topk
from .generate import GenConfig, generate
from .model import (AnchorError, Arity, HinQueryError, classify_query,
                    resolve_anchors)
from .oracle import exact_general_topk, exact_star_topk
from .scoring import ScoringParams
from .star import star_topk


def _bundle_args(p):
    p.add_argument("--nodes", required=True, help="nodes.tsv path")
    p.add_argument("--edges", required=True, help="edges.tsv path")
    p.add_argument("--schema", required=True, help="schema.json path")


def _format_arg(p):
    p.add_argument("--format", choices=("human", "machine"), default="human")


def _emit(doc, fmt, human_lines):
    if fmt == "machine":
        print(json.dumps(round_floats(doc), indent=2))
    else:
        for line in human_lines:
            print(line)


def cmd_validate(args):
    try:
        bundle = load_bundle(args.nodes, args.edges, args.schema)
    except GraphFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BundleValidationError as exc:
        doc = {"ok": False,
               "violations": [{"code": v.code, "message": v.message,
                               "subjects": list(v.subjects)}
                              for v in exc.violations]}
        _emit(doc, args.format,
              [f"violation [{v.code}]: {v.message}" for v in exc.violations])
        return 1
    g = bundle.graph
    doc = {"ok": True, "nodes": len(g),
           "normalEdges": len(g.normal_edges),
           "hierarchyEdges": len(g.hierarchy_edges)}
    _emit(doc, args.format,
          [f"ok: {len(g)} nodes, {len(g.normal_edges)} normal edges, "
           f"{len(g.hierarchy_edges)} hierarchy edges"])
    return 0


def cmd_generate(args):
    cfg = GenConfig(n=args.nodes, type_mix=args.type_mix,
                    avg_degree=args.avg_degree, hier_depth=args.hier_depth,
                    hier_fanout=args.hier_fanout, seed=args.seed)
    graph, schema = generate(cfg)
    paths = save_bundle(graph, schema, args.out)
    doc = {"out": [str(p) for p in paths], "nodes": len(graph),
           "normalEdges": len(graph.normal_edges),
           "hierarchyEdges": len(graph.hierarchy_edges), "seed": args.seed}
    _emit(doc, args.format,
          [f"wrote {p}" for p in paths] +
          [f"{len(graph)} nodes, {len(graph.normal_edges)} normal edges, "
           f"{len(graph.hierarchy_edges)} hierarchy edges"])
    return 0


def _run_query(args, use_oracle):
    try:
        bundle = load_bundle(args.nodes, args.edges, args.schema)
        query = load_query(args.query)
        qclass = classify_query(query, bundle.schema)
        resolve_anchors(query, bundle.graph)
    except AnchorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HinQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    params = ScoringParams(alpha=args.alpha, beta=args.beta)
    graph, schema = bundle.graph, bundle.schema
    pruning = not args.no_prune
    t0 = time.perf_counter()
    try:
        if qclass.arity is Arity.STAR:
            if use_oracle:
                res = exact_star_topk(graph, schema, query, args.k, params=params)
                ranking, stats = res.ranking, {}
            else:
                res = star_topk(graph, schema, query, args.k, params=params,
                                pruning=pruning)
                ranking, stats = res.ranking, res.stats.as_dict()
            center = query.query_nodes[0][0]
            rows = [{"rank": i + 1, "assignment": {center: _node_doc(graph, n)},
                     "score": s} for i, (n, s) in enumerate(ranking)]
        else:
            if use_oracle:
                matches = exact_general_topk(graph, schema, query, args.k,
                                             params=params)
                stats = {}
            else:
                res = general_topk(graph, schema, query, args.k, k_s=args.ks,
                                   params=params, pruning=pruning)
                matches, stats = res.matches, res.stats.as_dict()
            rows = [{"rank": i + 1,
                     "assignment": {q: _node_doc(graph, n) for q, n in m.assignment},
                     "score": m.score} for i, m in enumerate(matches)]
    except HinQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0

    stats["wallSeconds"] = wall
    doc = {
        "config": {
            "query": args.query, "k": args.k, "ks": args.ks,
            "alpha": params.alpha, "beta": params.beta,
            "pruning": pruning, "oracle": use_oracle,
            "arity": qclass.arity.value, "inheritance": qclass.inheritance.value,
            "backend": backend.active_backend(),
        },
        "results": rows,
        "stats": stats,
    }
    human = [f"{qclass.arity.value} query, {qclass.inheritance.value}; "
             f"k={args.k} alpha={params.alpha} beta={params.beta}"]
    for row in rows:
        parts = " ".join(f"{q}={a['node']}({a['label']})"
                         for q, a in row["assignment"].items())
        human.append(f"{row['rank']:>3}  {row['score']:.6f}  {parts}")
    if not rows:
        human.append("(no matches)")
    _emit(doc, args.format, human)
    return 0


def _node_doc(graph, node_id):
    return {"node": node_id, "label": graph.label_of(node_id)}


def cmd_query(args):
    return _run_query(args, use_oracle=getattr(args, "oracle", False))


def cmd_oracle(args):
    return _run_query(args, use_oracle=True)


def cmd_bench(args):
    def progress(msg):
        print(f"bench: {msg}", file=sys.stderr)

    report = run_bench(quick=args.quick, seed=args.seed,
                       kernel_compare=not args.no_kernel_compare,
                       progress=progress)
    doc = round_floats(report.as_dict())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(json.dumps(doc, indent=2))
    for sweep in ("k", "qsize", "fraction", "backend"):
        for curve, pts in sorted(report.curves(sweep).items()):
            txt = " ".join(f"{x:g}:{w * 1000:.1f}ms" for x, w in pts)
            print(f"{sweep:>8} {curve:<16} {txt}", file=sys.stderr)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="hinquery",
                                 description="top-k queries over graphs with "
                                             "hierarchical inheritance")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a bundle against its schema")
    _bundle_args(p)
    _format_arg(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("generate", help="write a synthetic bundle")
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--type-mix", default="2+2+3")
    p.add_argument("--avg-degree", type=float, default=8.0)
    p.add_argument("--hier-depth", type=int, default=4)
    p.add_argument("--hier-fanout", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    _format_arg(p)
    p.set_defaults(fn=cmd_generate)

    helps = {"query": "run a query", "oracle": "answer via the reference route"}
    for name, fn, extra in (("query", cmd_query, True), ("oracle", cmd_oracle, False)):
        p = sub.add_parser(name, help=helps[name])
        _bundle_args(p)
        p.add_argument("--query", required=True, help="query JSON path")
        p.add_argument("--k", type=int, default=10)
        p.add_argument("--ks", default=None,
                       help="star list depth for general queries: int or 'all'")
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--beta", type=float, default=0.2)
        p.add_argument("--no-prune", action="store_true")
        if extra:
            p.add_argument("--oracle", action="store_true",
                           help="answer with the reference implementation")
        _format_arg(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("bench", help="run the scaling benchmark")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--no-kernel-compare", action="store_true")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "ks", None) is not None and args.ks != "all":
        args.ks = int(args.ks)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

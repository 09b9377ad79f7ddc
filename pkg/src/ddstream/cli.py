"""``ddstream`` command line.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or malformed
input, invalid values derived from the data).

Output files (all CSVs have the header shown; floats use ``repr``):

==============  ==========================================================
command         files in ``--out-dir``
==============  ==========================================================
sketch          ``sketch.json`` snapshot, ``estimates.csv``
                ``node,degree,estimate`` (plus ``weighted_estimate`` with
                ``--weighted``)
exact           ``exact.csv`` ``node,degree,dd``
topk            ``topk_dd_k{k}.csv`` and ``topk_dds_r{round}_k{k}.csv``,
                each ``rank,node,score``
simulate        ``spread.json``
experiment      ``spread.csv`` ``k,method,mean_spread,std_spread``,
                ``mean_error.csv`` ``k,mean_error``,
                ``seeds.csv`` ``k,method,round,rank,node,score``,
                ``timings.json`` (wall-clock seconds per phase)
validate-bound  ``bound.json``
space-report    ``space.json``
generate        the edge list at ``--output``
==============  ==========================================================
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import pipeline, synth
from ._rng import derive_seed
from .analysis import hoeffding_validate, space_report
from .cascade import ORIENTATIONS, Cascade, CascadeConfig
from .oracle import build, exact_topk
from .sketch import AdjSketch
from .stream import EdgeParseError, NodeInterner, open_edge_stream, write_edge_list

log = logging.getLogger("ddstream")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_list(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k list {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("k values must be positive integers")
    if ks != sorted(ks):
        raise argparse.ArgumentTypeError("k list must be ascending")
    return ks


def _add_input(p, weighted=False):
    p.add_argument("--input", "-i", help="edge-list file (tail head [weight])")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--directed", dest="directed", action="store_true", default=True)
    g.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--delimiter", choices=["auto", "whitespace", "comma"], default="auto")
    if weighted:
        p.add_argument("--weighted", action="store_true", help="third column is the edge's propagation probability")


def _add_q(p):
    p.add_argument("--q", help="slots per node: an integer or 'd_in-2' (resolved by a counting pass)")
    p.add_argument("--epsilon", type=float, help="error factor; with --delta picks q")
    p.add_argument("--delta", type=float, help="failure probability; with --epsilon picks q")


def _add_common(p, *, lam=0.1, seed=True, out=True):
    p.add_argument("--lambda", dest="lam", type=float, default=lam, help="diffusion probability")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="base random seed")
    if out:
        p.add_argument("--out-dir", default="out")
    p.add_argument("--config", help="JSON file of option defaults; command-line flags win")


def _add_cascade(p):
    p.add_argument("--icm-runs", type=int, default=1000)
    p.add_argument("--orientation", choices=ORIENTATIONS, default="head-to-tail")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ddstream", description="Streaming diffusion-degree sketch tools.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sketch", help="stream a file into the sketch and dump estimates")
    _add_input(p, weighted=True)
    _add_q(p)
    _add_common(p)

    p = sub.add_parser("exact", help="exact diffusion degree of every node")
    _add_input(p)
    _add_common(p, seed=False)

    p = sub.add_parser("topk", help="top-k seeds by streamed estimate and by exact value")
    _add_input(p)
    _add_q(p)
    _add_common(p)
    p.add_argument("--k-list", type=_k_list, default=[10])
    p.add_argument("--rounds", type=int, default=5)

    p = sub.add_parser("simulate", help="Monte Carlo spread of a seed set")
    _add_input(p)
    _add_common(p)
    _add_cascade(p)
    p.add_argument("--seeds", help="comma-separated node labels")

    p = sub.add_parser("experiment", help="spread and mean error vs k for exact and streamed seeds")
    _add_input(p)
    _add_q(p)
    _add_common(p)
    _add_cascade(p)
    p.add_argument("--k-list", type=_k_list, default=[5, 10, 15, 20, 25, 30, 35, 40, 45, 50])
    p.add_argument("--rounds", type=int, default=5)

    p = sub.add_parser("validate-bound", help="empirical check of the per-node error bound")
    _add_input(p)
    _add_common(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--trials", type=int, default=20_000)
    p.add_argument("--node", help="node label (default: node with the largest in-degree)")

    p = sub.add_parser("space-report", help="sketch cells vs adjacency-list cells")
    _add_input(p)
    _add_q(p)
    _add_common(p)

    p = sub.add_parser("generate", help="write a synthetic edge stream")
    p.add_argument("--kind", choices=synth.KINDS)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--h", type=int, default=8)
    p.add_argument("--b", type=int, default=6)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.add_argument("--config", help="JSON file of option defaults; command-line flags win")
    return parser


# checked after config-file defaults are merged, so a config may supply them
REQUIRED = {
    "sketch": ["input"],
    "exact": ["input"],
    "topk": ["input"],
    "simulate": ["input", "seeds"],
    "experiment": ["input"],
    "validate-bound": ["input", "epsilon", "delta"],
    "space-report": ["input"],
    "generate": ["kind", "output"],
}


def _config_defaults(argv: Sequence[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    out = {}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if key == "lambda":
            key = "lam"
        if key == "k_list":
            text = ",".join(str(v) for v in value) if isinstance(value, list) else str(value)
            try:
                value = _k_list(text)
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"config k_list: {exc}") from None
        out[key] = value
    return out


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    defaults = _config_defaults(argv)
    if defaults:
        for action in parser._subparsers._group_actions:
            for sp in action.choices.values():
                sp.set_defaults(**defaults)
    args = parser.parse_args(argv)
    missing = [f"--{name.replace('_', '-')}" for name in REQUIRED[args.command] if getattr(args, name, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s) {', '.join(missing)}")
    return args


def _q_args(args):
    has_q = args.q is not None
    has_ed = args.epsilon is not None or args.delta is not None
    if has_q == has_ed:
        raise UsageError("give exactly one of --q or --epsilon/--delta")
    if has_ed and (args.epsilon is None or args.delta is None):
        raise UsageError("--epsilon and --delta must be given together")
    return args.q, args.epsilon, args.delta


def _load(args, weighted=False):
    return pipeline.load(args.input, directed=args.directed, delimiter=args.delimiter, weighted=weighted)


def _resolve_q(args, ds):
    q, eps, delta = _q_args(args)
    n = len(ds.interner)
    return pipeline.resolve_q(q, eps, delta, n=n, m=len(ds.events))


def cmd_sketch(args, out: pipeline.OutputSet) -> None:
    q, eps, delta = _q_args(args)
    opts = dict(directed=args.directed, delimiter=args.delimiter, weighted=args.weighted)
    q = pipeline.resolve_q_for_file(args.input, q, eps, delta, **opts)
    print(f"q = {q}")
    interner = NodeInterner()
    sk = AdjSketch(q, args.lam, args.seed, weighted=args.weighted)
    sk.extend(open_edge_stream(args.input, interner=interner, **opts))
    sk.save(out.track("sketch.json"))
    header = ["node", "degree", "estimate"]
    if args.weighted:
        header.append("weighted_estimate")

    def rows():
        for node, label in enumerate(interner.labels):
            row = [label, sk.degree(node), sk.query(node)]
            if args.weighted:
                row.append(sk.query_weighted(node))
            yield row

    out.csv("estimates.csv", header, rows())


def cmd_exact(args, out: pipeline.OutputSet) -> None:
    ds = _load(args)
    g = build(ds.events)
    out.csv("exact.csv", ["node", "degree", "dd"], pipeline.exact_rows(ds, g, args.lam))


def cmd_topk(args, out: pipeline.OutputSet) -> None:
    _q_args(args)
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    ds = _load(args)
    q = _resolve_q(args, ds)
    print(f"q = {q}")
    g = build(ds.events)
    for k in args.k_list:
        if k > g.n:
            log.warning("k = %d exceeds the %d nodes in the graph; emitting all nodes", k, g.n)
        top = exact_topk(g, k, args.lam) if g.n else []
        out.csv(f"topk_dd_k{k}.csv", ["rank", "node", "score"],
                ((i, ds.label(u), s) for i, (u, s) in enumerate(top, start=1)))
    for r in range(args.rounds):
        seed = derive_seed(args.seed, pipeline.SKETCH_STREAM, r)
        _, trackers = pipeline.dds_topk(ds.events, args.k_list, q, args.lam, seed)
        for k, tracker in trackers.items():
            out.csv(f"topk_dds_r{r}_k{k}.csv", ["rank", "node", "score"],
                    ((i, ds.label(u), s) for i, (u, s) in enumerate(tracker.query(), start=1)))


def cmd_simulate(args, out: pipeline.OutputSet) -> None:
    ds = _load(args)
    g = build(ds.events)
    labels = [s.strip() for s in args.seeds.split(",") if s.strip()]
    seeds = []
    for label in labels:
        node = ds.interner.lookup(label)
        if node is None:
            raise ValueError(f"seed {label!r} does not occur in {args.input}")
        seeds.append(node)
    rep = Cascade(g, args.orientation).simulate(seeds, CascadeConfig(args.lam, args.icm_runs, args.seed))
    doc = rep.to_dict()
    doc["seeds"] = labels
    out.json("spread.json", doc)
    print(f"mean spread {rep.mean_spread!r} (std {rep.std_spread!r}) over {args.icm_runs} runs")


def cmd_experiment(args, out: pipeline.OutputSet) -> None:
    q, eps, delta = _q_args(args)
    try:
        spec = pipeline.ExperimentSpec(
            input=args.input, k_list=args.k_list, lam=args.lam, q=q, epsilon=eps, delta=delta,
            directed=args.directed, delimiter=args.delimiter, icm_runs=args.icm_runs,
            rounds=args.rounds, out_dir=args.out_dir, seed=args.seed, orientation=args.orientation,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = pipeline.run_experiment(spec)
    pipeline.write_experiment(res, out, spec)
    print(f"q = {res.q}")
    for k, method, mean, std in res.spread:
        print(f"k={k:<4} {method:<4} spread {mean:.3f} (std {std:.3f})")


def cmd_validate_bound(args, out: pipeline.OutputSet) -> None:
    ds = _load(args)
    g = build(ds.events)
    if args.node is None:
        if not g.n:
            raise ValueError("empty graph")
        node = max(g.nodes, key=lambda u: (g.degree(u), -u))
    else:
        node = ds.interner.lookup(args.node)
        if node is None:
            raise ValueError(f"node {args.node!r} does not occur in {args.input}")
    res = hoeffding_validate(g, node, args.epsilon, args.delta, args.trials, args.lam, args.seed)
    doc = res.to_dict()
    doc["node"] = ds.label(node)
    doc["bound_per_node"] = {ds.label(node): res.bound_per_node[node]}
    out.json("bound.json", doc)
    status = "degenerate" if res.degenerate else ("PASS" if res.passed else "FAIL")
    print(f"{status}: node {ds.label(node)} q={res.q_used} violations {res.violations}/{res.trials} "
          f"rate {res.empirical_rate:.5f} <= {res.threshold:.5f}")


def cmd_space_report(args, out: pipeline.OutputSet) -> None:
    _q_args(args)
    ds = _load(args)
    q = _resolve_q(args, ds)
    sk = AdjSketch(q, args.lam, args.seed).extend(ds.events)
    rep = space_report(sk, build(ds.events))
    out.json("space.json", rep)
    print(json.dumps(rep, indent=2))


def cmd_generate(args) -> None:
    spec = synth.GeneratorSpec(args.kind, {"n": args.n, "h": args.h, "b": args.b, "r": args.r}, args.seed)
    write_edge_list(synth.generate(spec), args.output)


COMMANDS = {
    "sketch": cmd_sketch,
    "exact": cmd_exact,
    "topk": cmd_topk,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "validate-bound": cmd_validate_bound,
    "space-report": cmd_space_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"ddstream: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse: --help or a usage error
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    out = None
    try:
        if args.command == "generate":
            cmd_generate(args)
            return 0
        out = pipeline.OutputSet(args.out_dir)
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        if out is not None:
            out.discard()
        print(f"ddstream: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeParseError, OSError, ValueError) as exc:
        if out is not None:
            out.discard()
        print(f"ddstream: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())

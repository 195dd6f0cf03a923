"""Command-line front end: bvx solve | voronoi | validate | gen | gen-hs | bench | serve."""

import argparse
import json
import logging
import random
import sys
from typing import List, Optional

from .bench import SUITES, bench_command
from .config import configure_logging, get_settings
from .csvio import bench_csv, site_load_csv
from .dispatch import ProblemInstance, parse_instance, solve_command, validate_command, voronoi_command
from .fileio import hs_to_json, read_hs, write_graph, write_tree_decomposition
from .generators import GENERATORS, generate, random_costs, random_partial_ktree, random_sites
from .graph import InstanceError, PreconditionError, format_fixed
from .hardness import brute_force_hitting_set, build_hardness_graph, random_hs_instance
from .schemas import ALGORITHMS
from .voronoi import brute_force_balanced_vertex

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2


def _add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", required=True, help="Graph file (p/e/c/s format)")
    parser.add_argument("--costs", help="File with one decimal cost per vertex, in vertex order")
    parser.add_argument("--sites", help="Comma-separated site list overriding the file's 's' line")
    parser.add_argument("--td", help="Tree decomposition file (PACE 'td' format)")
    parser.add_argument("--json", action="store_true", help="Print JSON")


def _instance(args: argparse.Namespace) -> ProblemInstance:
    return parse_instance(
        args.graph, args.costs, args.sites, args.td, getattr(args, "algorithm", None)
    )


def _emit(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        logger.info(f"Wrote {path}")


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _instance(args)
    result = solve_command(inst, args.algorithm, args.assume_diam2, args.centroid)
    if args.json:
        print(result.model_dump_json(indent=2))
    else:
        print(f"best vertex: {result.best_vertex}")
        print(f"best load:   {result.best_load}")
        print(f"algorithm:   {result.algorithm} ({result.wall_ms:.1f} ms)")
        print(f"certified:   {'yes' if result.certified else 'NO'}")
    if args.csv:
        _emit(site_load_csv(result), args.csv)
    return EXIT_OK if result.certified else EXIT_FAILED


def cmd_voronoi(args: argparse.Namespace) -> int:
    diagram = voronoi_command(_instance(args))
    if args.json:
        print(diagram.model_dump_json(indent=2))
        return EXIT_OK
    for entry in diagram.loads:
        print(f"site {entry.site}: load {entry.load}")
    print(f"max load {diagram.max_load} of total {diagram.total_cost}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_command(_instance(args))
    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        for check in report.checks:
            status = "ok  " if check.passed else "FAIL"
            detail = f"  {check.detail}" if check.detail else ""
            print(f"{status} {check.name}{detail}")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_gen(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    td = None
    if args.graph_class == "partial-ktree":
        g, td = random_partial_ktree(args.n, args.k, rng)
    else:
        g = generate(args.graph_class, args.n, rng, k=args.k)
    costs = random_costs(g.n, rng, high=args.cost_high)
    sites = random_sites(g.n, max(1, min(args.p, g.n - 1)), rng)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        out.write(f"# {args.graph_class} n={g.n} seed={args.seed}\n")
        write_graph(out, g, costs, sites)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.td_out:
        if td is None:
            raise InstanceError("--td-out is only available for partial-ktree")
        with open(args.td_out, "w", encoding="utf-8") as fh:
            write_tree_decomposition(fh, td, g.n)
    return EXIT_OK


def cmd_gen_hs(args: argparse.Namespace) -> int:
    if args.hs:
        inst = read_hs(args.hs)
    else:
        inst = random_hs_instance(random.Random(args.seed), args.sets, args.universe, args.density)
    hg = build_hardness_graph(inst)
    if args.hs_out:
        _emit(hs_to_json(hg.instance) + "\n", args.hs_out)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8")
    try:
        out.write(
            f"# hardness graph: n={hg.n} t={hg.t} threshold={hg.threshold} "
            f"thresholds_valid={hg.thresholds_valid}\n"
        )
        labels = {v: label for v, label in enumerate(hg.labels)}
        write_graph(out, hg.graph, None, hg.sites, labels)
    finally:
        if out is not sys.stdout:
            out.close()

    if not args.verify:
        return EXIT_OK
    found, witness = brute_force_hitting_set(inst)
    result = brute_force_balanced_vertex(hg.graph, hg.costs, hg.sites)
    below = result.best_load <= hg.threshold_fixed
    summary = {
        "hitting_set": found,
        "witness": sorted(witness) if witness is not None else None,
        "best_vertex": result.best_vertex,
        "best_label": hg.labels[result.best_vertex],
        "best_load": format_fixed(result.best_load),
        "threshold": hg.threshold,
        "thresholds_valid": hg.thresholds_valid,
        "agrees": found == below,
    }
    sys.stderr.write(json.dumps(summary, indent=2) + "\n")
    if hg.thresholds_valid and found != below:
        logger.error("Hardness graph disagrees with the hitting-set answer")
        return EXIT_FAILED
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(x) for x in args.sizes.split(",")] if args.sizes else None
    rows = bench_command(args.suite or [], sizes, args.seed, args.workers, args.brute_max_n)
    if args.json:
        print(json.dumps([row.model_dump() for row in rows], indent=2))
    if args.csv or not args.json:
        _emit(bench_csv(rows), args.csv)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("bvx.api:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bvx", description=__doc__)
    parser.add_argument("--log-level", default=None, help="Logging level (default BVX_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Optimal new site for an instance")
    _add_instance_args(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p.add_argument("--assume-diam2", action="store_true", help="Trust that the graph has diameter two")
    p.add_argument("--centroid", choices=("count", "sites"), default="count", help="Tree solver centroid rule")
    p.add_argument("--csv", help="Write the per-site load table to this path ('-' for stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("voronoi", help="Prioritized Voronoi diagram of an instance")
    _add_instance_args(p)
    p.set_defaults(func=cmd_voronoi)

    p = sub.add_parser("validate", help="Run the invariant checks on an instance")
    _add_instance_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="Random instance of a graph class")
    p.add_argument("graph_class", choices=GENERATORS)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=3, help="Number of sites")
    p.add_argument("--k", type=int, default=3, help="Width for partial-ktree")
    p.add_argument("--cost-high", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Graph output path (default stdout)")
    p.add_argument("--td-out", help="Tree decomposition output path (partial-ktree)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("gen-hs", help="Hardness graph from a Hitting Set instance")
    p.add_argument("--hs", help="HS instance JSON; a random one is drawn when omitted")
    p.add_argument("--sets", type=int, default=4)
    p.add_argument("--universe", type=int, default=3)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Graph output path (default stdout)")
    p.add_argument("--hs-out", help="Write the reduced HS instance as JSON")
    p.add_argument("--verify", action="store_true", help="Compare both brute-force answers")
    p.set_defaults(func=cmd_gen_hs)

    p = sub.add_parser("bench", help="Time solvers over generated size ladders")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), help="Repeatable")
    p.add_argument("--sizes", help="Comma-separated ladder overriding every suite's sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--brute-max-n", type=int, default=1 << 13)
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="Start the HTTP service")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        0 on success, 1 on input errors, 2 on precondition or
        verification failures
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    args.log_level = args.log_level or get_settings().log_level
    try:
        return args.func(args)
    except PreconditionError as e:
        logger.error(f"Precondition failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED
    except (InstanceError, OSError, UnicodeDecodeError) as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

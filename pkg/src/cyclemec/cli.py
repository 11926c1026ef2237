"""Command line entry points.

Exit codes: 0 on success, 1 when an algorithm declares failure (no graph
found, blocks unsolved, graphs not equivalent), 2 for unusable input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .builder import (
    InstanceError,
    build_graph,
    parse_instance,
)
from .construct import construct_correct, validate_output
from .dsep import CiError, enumerate_ci, format_ci, parse_ci
from .flow import FlowSizeError, solve_flow
from .graphs import GraphError, format_graph, parse_graph
from .mec import equivalence_conditions, markov_equivalent
from .partitions import PartitionError, format_partition, parse_partition
from .scoring import score_vector
from .search import SearchConfig, greedy_discover
from .experiments import (
    ExperimentSpec,
    run_experiment,
    write_summary_json,
    write_trials_csv,
)

PARSE_ERRORS = (GraphError, CiError, PartitionError, InstanceError, OSError, ValueError)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _resolve_seed(args) -> int:
    if args.seed is None:
        seed = random.randrange(2**32)
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    return args.seed


def _cmd_dsep_enumerate(args) -> int:
    g = parse_graph(_read(args.graph))
    sys.stdout.write(format_ci(enumerate_ci(g)))
    return 0


def _cmd_mec_compare(args) -> int:
    g1 = parse_graph(_read(args.first))
    g2 = parse_graph(_read(args.second))
    if g1.n != g2.n:
        print(f"not equivalent: vertex counts differ ({g1.n} vs {g2.n})")
        return 1
    if markov_equivalent(g1, g2):
        print("equivalent")
        return 0
    conditions = equivalence_conditions(g1, g2)
    for name, same in conditions.items():
        if not same:
            print(f"not equivalent: {name} differ")
    return 1


def _cmd_score(args) -> int:
    ci = parse_ci(_read(args.ci))
    p = parse_partition(_read(args.partition))
    if p.universe != frozenset(range(1, ci.n + 1)):
        raise PartitionError("partition does not cover the oracle's vertex set")
    print(" ".join(str(x) for x in score_vector(ci, p)))
    return 0


def _cmd_discover_mec(args) -> int:
    ci = parse_ci(_read(args.ci))
    seed = _resolve_seed(args)
    config = SearchConfig(plateau_limit=args.plateau, restarts=args.restarts, seed=seed)
    result = greedy_discover(ci, config)
    print(
        f"score: {' '.join(str(x) for x in result.best_score)} "
        f"(scored {result.scored} partitions, plateau {len(result.plateau)})",
        file=sys.stderr,
    )
    sys.stdout.write(format_partition(result.best))
    return 0


def _cmd_discover_graph(args) -> int:
    ci = parse_ci(_read(args.ci))
    seed = _resolve_seed(args)
    config = SearchConfig(plateau_limit=args.plateau, restarts=args.restarts, seed=seed)
    result = greedy_discover(ci, config)
    outcome = build_graph(
        ci,
        result,
        solver=args.solver,
        max_partitions=args.max_partitions,
        attempts=args.attempts,
        solver_rounds=args.rounds,
        seed=seed,
    )
    print(f"partitions tried: {outcome.partitions_tried}", file=sys.stderr)
    if args.verbose:
        for line in outcome.log:
            print(line, file=sys.stderr)
    if outcome.graph is None:
        print("no graph found", file=sys.stderr)
        return 1
    sys.stdout.write(format_graph(outcome.graph))
    return 0


def _cmd_sccr(args) -> int:
    inst = parse_instance(_read(args.instance))
    if args.solver == "flow":
        edges = solve_flow(inst)
    else:
        seed = _resolve_seed(args)
        edges = construct_correct(inst, max_rounds=args.rounds, seed=seed)
    if edges is None:
        print("no recovery found", file=sys.stderr)
        return 1
    problems = validate_output(inst, edges)
    if problems:
        for problem in problems:
            print(f"invalid output: {problem}", file=sys.stderr)
        return 1
    for u, v in sorted(edges):
        print(f"{u} {v}")
    return 0


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    spec = ExperimentSpec(
        kind=args.kind,
        n=args.n,
        p=args.p,
        graphs=args.graphs,
        seed=seed,
        solver_rounds=args.rounds,
        attempts=args.attempts,
        max_partitions=args.max_partitions,
    )
    rows, summary = run_experiment(spec)
    if args.csv:
        write_trials_csv(args.csv, rows)
    if args.json:
        write_summary_json(args.json, [summary])
    print(json.dumps(summary))
    return 0


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="random seed (sampled when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclemec",
        description="Markov equivalence discovery for directed graphs with cycles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dsep = sub.add_parser("dsep", help="d-separation utilities")
    dsep_sub = p_dsep.add_subparsers(dest="action", required=True)
    p_enum = dsep_sub.add_parser("enumerate", help="print every conditional independence of a graph")
    p_enum.add_argument("graph", help="graph file (n=<count> header, 'u v' edge lines)")
    p_enum.set_defaults(func=_cmd_dsep_enumerate)

    p_mec = sub.add_parser("mec", help="Markov equivalence utilities")
    mec_sub = p_mec.add_subparsers(dest="action", required=True)
    p_cmp = mec_sub.add_parser("compare", help="decide whether two graphs are Markov equivalent")
    p_cmp.add_argument("first")
    p_cmp.add_argument("second")
    p_cmp.set_defaults(func=_cmd_mec_compare)

    p_score = sub.add_parser("score", help="score a partially ordered partition against CI statements")
    p_score.add_argument("ci", help="CI file (n=<count> header, 'a _||_ b | {...}' lines)")
    p_score.add_argument("partition", help="partition file ('block ...' and 'order i j' lines)")
    p_score.set_defaults(func=_cmd_score)

    p_dm = sub.add_parser("discover-mec", help="search for a score-minimal partially ordered partition")
    p_dm.add_argument("ci")
    p_dm.add_argument("--restarts", type=int, default=3)
    p_dm.add_argument("--plateau", type=int, default=None, help="plateau size before truncating a walk")
    _add_seed(p_dm)
    p_dm.set_defaults(func=_cmd_discover_mec)

    p_dg = sub.add_parser("discover-graph", help="construct a graph matching the CI statements")
    p_dg.add_argument("ci")
    p_dg.add_argument("--solver", choices=("cc", "flow"), default="cc")
    p_dg.add_argument("--restarts", type=int, default=3)
    p_dg.add_argument("--plateau", type=int, default=None)
    p_dg.add_argument("--max-partitions", type=int, default=300)
    p_dg.add_argument("--attempts", type=int, default=1, help="solver attempts per partition")
    p_dg.add_argument("--rounds", type=int, default=100, help="restart budget inside the randomized solver")
    p_dg.add_argument("--verbose", action="store_true", help="log every rejected partition to stderr")
    _add_seed(p_dg)
    p_dg.set_defaults(func=_cmd_discover_graph)

    p_sccr = sub.add_parser("sccr", help="recover the edges of one strongly connected block")
    p_sccr.add_argument("solver", choices=("cc", "flow"))
    p_sccr.add_argument("instance", help="instance file (n=, c, a/b/comch/nocomch lines)")
    p_sccr.add_argument("--rounds", type=int, default=100)
    _add_seed(p_sccr)
    p_sccr.set_defaults(func=_cmd_sccr)

    p_sim = sub.add_parser("simulate", help="run a random-graph benchmark cell")
    p_sim.add_argument("--kind", choices=("mec", "sccr-cc", "sccr-flow", "end2end"), required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=float, required=True)
    p_sim.add_argument("--graphs", type=int, required=True)
    p_sim.add_argument("--rounds", type=int, default=100)
    p_sim.add_argument("--attempts", type=int, default=20)
    p_sim.add_argument("--max-partitions", type=int, default=300)
    p_sim.add_argument("--csv", help="write one row per trial to this path")
    p_sim.add_argument("--json", help="write the aggregate summary to this path")
    _add_seed(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FlowSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PARSE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Random-graph benchmarks for the discovery and recovery algorithms.

Each experiment draws Erdos-Renyi digraphs, runs one pipeline stage on them,
and reports a per-trial table plus an aggregate.  Randomness is split into
named substreams so a single root seed reproduces every trial independently
of how many ran before it.  Reported times never include enumerating the
independence statements, which stands in for an oracle the algorithms would
query in applications.
"""

from __future__ import annotations

import csv
import json
import random
import time
from dataclasses import dataclass

from .builder import build_graph, derive_instances_from_graph
from .construct import construct_correct, validate_output
from .dsep import graph_ci
from .flow import FlowSizeError, solve_flow
from .graphs import DirectedGraph
from .mec import ci_equivalent, graph_summary
from .scoring import compute_summary
from .search import SearchConfig, greedy_discover

GRID_CELLS = tuple(
    sorted({(7, p) for p in (0.2, 0.4, 0.6, 0.8)} | {(n, p) for n in (7, 8, 9, 10) for p in (0.2, 0.3)})
)

KINDS = ("mec", "sccr-cc", "sccr-flow", "end2end")


def substream(seed: int, *parts) -> random.Random:
    """Independent generator named by the root seed and a label path."""
    label = ":".join(str(part) for part in parts)
    return random.Random(f"{seed}:{label}")


def gen_er_graph(n: int, p: float, rng: random.Random) -> DirectedGraph:
    """Each ordered pair becomes an edge independently with probability p."""
    edges = set()
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b and rng.random() < p:
                edges.add((a, b))
    return DirectedGraph(n, frozenset(edges))


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    n: int
    p: float
    graphs: int
    seed: int = 0
    restarts: int = 3
    plateau_limit: int | None = None
    solver_rounds: int = 100
    attempts: int = 20
    max_partitions: int = 300

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n < 1 or not 0 <= self.p <= 1 or self.graphs < 1:
            raise ValueError("experiment needs n >= 1, 0 <= p <= 1, graphs >= 1")


def _mec_trial(spec: ExperimentSpec, trial: int, g: DirectedGraph) -> dict:
    ci = graph_ci(g)
    config = SearchConfig(
        plateau_limit=spec.plateau_limit,
        restarts=spec.restarts,
        seed=substream(spec.seed, "search", trial).randrange(2**32),
    )
    start = time.perf_counter()
    result = greedy_discover(ci, config)
    elapsed = time.perf_counter() - start
    ok = compute_summary(ci, result.best) == graph_summary(g)
    return {"success": ok, "seconds": elapsed, "scored": result.scored}


def _sccr_trial(spec: ExperimentSpec, trial: int, g: DirectedGraph) -> dict:
    instances = derive_instances_from_graph(g)
    attempts = 1 if spec.kind == "sccr-flow" else spec.attempts
    start = time.perf_counter()
    ok = False
    used = 0
    for attempt in range(attempts):
        used = attempt + 1
        solved = True
        for b_idx, inst in enumerate(instances):
            if spec.kind == "sccr-flow":
                try:
                    out = solve_flow(inst)
                except FlowSizeError:
                    out = None
            else:
                rng = substream(spec.seed, "solve", trial, attempt, b_idx)
                out = construct_correct(inst, max_rounds=spec.solver_rounds, rng=rng)
            if out is None or validate_output(inst, out):
                solved = False
                break
        if solved:
            ok = True
            break
    elapsed = time.perf_counter() - start
    return {"success": ok, "seconds": elapsed, "attempts_used": used}


def _end2end_trial(spec: ExperimentSpec, trial: int, g: DirectedGraph) -> dict:
    ci = graph_ci(g)
    config = SearchConfig(
        plateau_limit=spec.plateau_limit,
        restarts=spec.restarts,
        seed=substream(spec.seed, "search", trial).randrange(2**32),
    )
    start = time.perf_counter()
    result = greedy_discover(ci, config)
    outcome = build_graph(
        ci,
        result,
        solver="cc",
        max_partitions=spec.max_partitions,
        attempts=1,
        solver_rounds=spec.solver_rounds,
        seed=substream(spec.seed, "build", trial).randrange(2**32),
    )
    elapsed = time.perf_counter() - start
    ok = outcome.graph is not None and ci_equivalent(outcome.graph, g)
    return {
        "success": ok,
        "seconds": elapsed,
        "partitions_tried": outcome.partitions_tried,
    }


def run_experiment(spec: ExperimentSpec) -> tuple[list[dict], dict]:
    """All trials for one (kind, n, p) cell: a row per trial plus totals."""
    rows = []
    for trial in range(spec.graphs):
        g = gen_er_graph(spec.n, spec.p, substream(spec.seed, "graph", spec.n, spec.p, trial))
        if spec.kind == "mec":
            record = _mec_trial(spec, trial, g)
        elif spec.kind in ("sccr-cc", "sccr-flow"):
            record = _sccr_trial(spec, trial, g)
        else:
            record = _end2end_trial(spec, trial, g)
        row = {
            "kind": spec.kind,
            "n": spec.n,
            "p": spec.p,
            "trial": trial,
            "success": int(record.pop("success")),
            "seconds": round(record.pop("seconds"), 6),
        }
        row.update(record)
        rows.append(row)
    successes = sum(r["success"] for r in rows)
    summary = {
        "kind": spec.kind,
        "n": spec.n,
        "p": spec.p,
        "graphs": spec.graphs,
        "seed": spec.seed,
        "successes": successes,
        "rate": successes / spec.graphs,
        "mean_seconds": round(sum(r["seconds"] for r in rows) / spec.graphs, 6),
    }
    return rows, summary


def write_trials_csv(path: str, rows: list[dict]) -> None:
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def read_trials_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_summary_json(path: str, summaries: list[dict]) -> None:
    with open(path, "w") as fh:
        json.dump(summaries, fh, indent=2)
        fh.write("\n")


def read_summary_json(path: str) -> list[dict]:
    with open(path) as fh:
        return json.load(fh)

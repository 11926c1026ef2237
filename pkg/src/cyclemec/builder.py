"""Decomposing a discovered partition into per-block recovery instances and
assembling solver outputs into one graph.

A feasible partially ordered partition is processed block by block along a
linear extension.  Each block yields an instance: its internal linked pairs,
the links arriving from earlier blocks, and the common-child obligations and
prohibitions that the oracle imposes on pairs outside the block.  A solver
turns an instance into an edge set making the block a strongly connected
component; the union over blocks is the candidate graph, accepted only after
its own graph-side summary reproduces the score-side one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dsep import CiOracle
from .graphs import DirectedGraph
from .mec import classify_triples, graph_summary, p_adjacency_masks, PERFECT
from .partitions import OrderedPartition, consecutive_pairs, neighbors
from .scoring import compute_links, compute_summary, score_vector
from .search import SearchResult


class InstanceError(ValueError):
    """Raised for structurally invalid recovery instances."""


def _canon(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class SccrInstance:
    """One block's recovery problem.

    `a_pairs` holds both orientations of every internal link, `b_pairs` the
    (outside, inside) links, and `com_ch`/`no_com_ch` canonical outside pairs
    that must respectively have and lack a common child in the block.
    """

    n: int
    c: frozenset[int]
    a_pairs: frozenset[tuple[int, int]]
    b_pairs: frozenset[tuple[int, int]]
    com_ch: frozenset[tuple[int, int]] = frozenset()
    no_com_ch: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("need at least one vertex")
        if not self.c:
            raise InstanceError("block is empty")
        if not self.c <= frozenset(range(1, self.n + 1)):
            raise InstanceError("block contains out-of-range vertices")
        for a, b in self.a_pairs:
            if a == b or a not in self.c or b not in self.c:
                raise InstanceError(f"internal pair ({a},{b}) is not a proper pair inside the block")
            if (b, a) not in self.a_pairs:
                raise InstanceError(f"internal pair ({a},{b}) lacks its mirror")
        for a, b in self.b_pairs:
            if a in self.c or b not in self.c or not 1 <= a <= self.n:
                raise InstanceError(f"incoming pair ({a},{b}) must run from outside into the block")
        for name, pairs in (("com_ch", self.com_ch), ("no_com_ch", self.no_com_ch)):
            for a, b in pairs:
                if not (1 <= a < b <= self.n) or a in self.c or b in self.c:
                    raise InstanceError(f"{name} pair ({a},{b}) must be canonical and outside the block")
        if self.com_ch & self.no_com_ch:
            raise InstanceError("a pair cannot both require and forbid a common child")

    def unordered_a(self) -> frozenset[tuple[int, int]]:
        return frozenset(_canon(a, b) for a, b in self.a_pairs)


def parse_instance(text: str) -> SccrInstance:
    n = None
    c: set[int] = set()
    a_pairs: set[tuple[int, int]] = set()
    b_pairs: set[tuple[int, int]] = set()
    com_ch: set[tuple[int, int]] = set()
    no_com_ch: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            try:
                n = int(line[2:])
            except ValueError:
                raise InstanceError(f"line {lineno}: bad vertex count {line[2:]!r}")
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        try:
            vals = [int(x) for x in args]
        except ValueError:
            raise InstanceError(f"line {lineno}: non-integer vertex in {raw!r}")
        if kind == "c":
            c.update(vals)
        elif kind in ("a", "b", "comch", "nocomch"):
            if len(vals) != 2:
                raise InstanceError(f"line {lineno}: {kind!r} takes exactly two vertices")
            u, v = vals
            if kind == "a":
                a_pairs.add((u, v))
                a_pairs.add((v, u))
            elif kind == "b":
                b_pairs.add((u, v))
            elif kind == "comch":
                com_ch.add(_canon(u, v))
            else:
                no_com_ch.add(_canon(u, v))
        else:
            raise InstanceError(f"line {lineno}: unknown directive {kind!r}")
    if n is None:
        raise InstanceError("missing n= header")
    return SccrInstance(
        n=n, c=frozenset(c), a_pairs=frozenset(a_pairs), b_pairs=frozenset(b_pairs),
        com_ch=frozenset(com_ch), no_com_ch=frozenset(no_com_ch),
    )


def format_instance(inst: SccrInstance) -> str:
    lines = [f"n={inst.n}", "c " + " ".join(str(v) for v in sorted(inst.c))]
    lines += [f"a {a} {b}" for a, b in sorted(inst.unordered_a())]
    lines += [f"b {a} {b}" for a, b in sorted(inst.b_pairs)]
    lines += [f"comch {a} {b}" for a, b in sorted(inst.com_ch)]
    lines += [f"nocomch {a} {b}" for a, b in sorted(inst.no_com_ch)]
    return "\n".join(lines) + "\n"


def check_partition_feasible(ci: CiOracle, p: OrderedPartition) -> tuple[bool, str | None]:
    """Reject partitions that no graph with this block structure can realize.

    Two checks: every linked pair must span comparable blocks, and every
    consecutive block pair must carry at least one cross link.
    """
    links, _ = compute_links(ci, p)
    ids = {v: i for i, block in enumerate(p.blocks) for v in block}
    for a, b in links:
        if a < b:
            ia, ib = ids[a], ids[b]
            if ia != ib and not p.leq(ia, ib) and not p.leq(ib, ia):
                return False, f"linked pair ({a},{b}) spans incomparable blocks"
    for i, j in consecutive_pairs(p):
        lower, upper = p.blocks[i], p.blocks[j]
        if not any((a, b) in links for a in lower for b in upper):
            return False, f"no link crosses consecutive blocks {i} and {j}"
    return True, None


def linear_extension(p: OrderedPartition) -> list[int]:
    """Topological block order, lexicographically smallest by block index."""
    k = len(p.blocks)
    preds = [set() for _ in range(k)]
    for i, j in p.order:
        preds[j].add(i)
    placed: list[int] = []
    done: set[int] = set()
    while len(placed) < k:
        i = next(i for i in range(k) if i not in done and preds[i] <= done)
        placed.append(i)
        done.add(i)
    return placed


def derive_instances(ci: CiOracle, p: OrderedPartition) -> list[SccrInstance]:
    """Per-block instances from the oracle, in linear-extension order."""
    summary = compute_summary(ci, p)
    links = summary.links
    perfect = summary.perfect_nonconductors
    ids = {v: i for i, block in enumerate(p.blocks) for v in block}

    def perfect_witness(block_idx: int, a: int, c: int) -> bool:
        return any((a, b, c) in perfect for b in p.blocks[block_idx])

    def link_witness(block_idx: int, a: int, c: int) -> bool:
        return any((a, b) in links and (c, b) in links for b in p.blocks[block_idx])

    order = linear_extension(p)
    out = []
    earlier: set[int] = set()
    for i in order:
        block = p.blocks[i]
        a_pairs = frozenset((a, b) for (a, b) in links if a in block and b in block)
        b_pairs = frozenset((a, b) for (a, b) in links if a in earlier and b in block)
        com, nocom = set(), set()
        outside = [v for v in range(1, ci.n + 1) if v not in block]
        for ai, a in enumerate(outside):
            for c in outside[ai + 1:]:
                if perfect_witness(i, a, c):
                    strictly_below = [j for j in range(len(p.blocks)) if j != i and p.leq(j, i)]
                    if not any(perfect_witness(j, a, c) for j in strictly_below):
                        com.add((a, c))
                elif (
                    (a, c) not in links
                    and not p.leq(i, ids[a]) and not p.leq(i, ids[c])
                    and link_witness(i, a, c)
                ):
                    nocom.add((a, c))
        out.append(SccrInstance(
            n=ci.n, c=block, a_pairs=a_pairs, b_pairs=b_pairs,
            com_ch=frozenset(com), no_com_ch=frozenset(nocom),
        ))
        earlier |= set(block)
    return out


def derive_instances_from_graph(g: DirectedGraph) -> list[SccrInstance]:
    """The true decomposition of an explicit graph, for solver benchmarks.

    Uses graph-side features directly: p-adjacencies for links, perfect
    non-conductor triples in place of oracle probes, and the induced
    partition's order for the block comparisons.
    """
    p = g.induced_partition()
    rows = p_adjacency_masks(g)
    triples = classify_triples(g)
    ids = {v: i for i, block in enumerate(p.blocks) for v in block}

    def linked(a: int, b: int) -> bool:
        return bool(rows[a] & (1 << (b - 1)))

    def perfect_witness(block_idx: int, a: int, c: int) -> bool:
        return any(triples.get((a, b, c)) == PERFECT for b in p.blocks[block_idx])

    def link_witness(block_idx: int, a: int, c: int) -> bool:
        return any(linked(a, b) and linked(c, b) for b in p.blocks[block_idx])

    out = []
    for i, block in enumerate(p.blocks):
        a_pairs = set()
        b_pairs = set()
        for b in block:
            for a in range(1, g.n + 1):
                if a == b or not linked(a, b):
                    continue
                if a in block:
                    a_pairs.add((a, b))
                elif p.leq(ids[a], i):
                    b_pairs.add((a, b))
        com, nocom = set(), set()
        outside = [v for v in range(1, g.n + 1) if v not in block]
        for ai, a in enumerate(outside):
            for c in outside[ai + 1:]:
                if perfect_witness(i, a, c):
                    strictly_below = [j for j in range(len(p.blocks)) if j != i and p.leq(j, i)]
                    if not any(perfect_witness(j, a, c) for j in strictly_below):
                        com.add((a, c))
                elif (
                    not linked(a, c)
                    and not p.leq(i, ids[a]) and not p.leq(i, ids[c])
                    and link_witness(i, a, c)
                ):
                    nocom.add((a, c))
        out.append(SccrInstance(
            n=g.n, c=block, a_pairs=frozenset(a_pairs), b_pairs=frozenset(b_pairs),
            com_ch=frozenset(com), no_com_ch=frozenset(nocom),
        ))
    return out


@dataclass
class BuildOutcome:
    graph: DirectedGraph | None
    partition: OrderedPartition | None
    partitions_tried: int
    log: list[str] = field(default_factory=list)


def _plateau_stream(ci, result: SearchResult, rng: random.Random):
    """The winning partition, its logged plateau, then fresh walk discoveries."""
    memo: dict = {}

    def score_of(p):
        k = p.key()
        if k not in memo:
            memo[k] = score_vector(ci, p)
        return memo[k]

    target = score_of(result.best)
    seen = {result.best.key()}
    yield result.best
    pool = [result.best]
    for q in result.plateau:
        if q.key() not in seen:
            seen.add(q.key())
            pool.append(q)
            yield q
    # Keep expanding the equal-score component reachable from what we have.
    stack = list(reversed(pool))
    while stack:
        node = stack.pop()
        nbrs = neighbors(node)
        rng.shuffle(nbrs)
        for q in nbrs:
            k = q.key()
            if k in seen:
                continue
            seen.add(k)
            if score_of(q) == target:
                yield q
                stack.append(q)


def build_graph(
    ci: CiOracle,
    result: SearchResult,
    solver: str = "cc",
    max_partitions: int = 300,
    attempts: int = 20,
    solver_rounds: int = 100,
    seed: int = 0,
) -> BuildOutcome:
    """Turn a search result into a concrete Markov-equivalent graph.

    Walks same-score partitions in plateau order; each feasible one is
    decomposed and handed to the chosen per-block solver.  A candidate graph
    is accepted only if it reproduces the partition exactly and its
    graph-side summary matches the score-side summary, so a returned graph
    is correct by construction.
    """
    from .construct import construct_correct, validate_output
    from .flow import FlowSizeError, solve_flow

    rng = random.Random(f"{seed}:stream")
    log: list[str] = []
    tried = 0
    for p in _plateau_stream(ci, result, rng):
        if tried >= max_partitions:
            break
        tried += 1
        ok, reason = check_partition_feasible(ci, p)
        if not ok:
            log.append(f"partition {tried}: infeasible ({reason})")
            continue
        instances = derive_instances(ci, p)
        n_attempts = 1 if solver == "flow" else attempts
        for attempt in range(n_attempts):
            edges: set[tuple[int, int]] = set()
            failed_block = None
            for b_idx, inst in enumerate(instances):
                if solver == "flow":
                    try:
                        out = solve_flow(inst)
                    except FlowSizeError:
                        out = None
                else:
                    sub = random.Random(f"{seed}:solve:{tried}:{attempt}:{b_idx}")
                    out = construct_correct(inst, max_rounds=solver_rounds, rng=sub)
                if out is None or validate_output(inst, out):
                    failed_block = b_idx
                    break
                edges |= out
            if failed_block is not None:
                log.append(f"partition {tried} attempt {attempt + 1}: block {failed_block} unsolved")
                continue
            g = DirectedGraph(ci.n, frozenset(edges))
            if g.induced_partition() != p:
                log.append(f"partition {tried} attempt {attempt + 1}: assembled graph has a different partition")
                continue
            if graph_summary(g) != compute_summary(ci, p):
                log.append(f"partition {tried} attempt {attempt + 1}: summary mismatch")
                continue
            return BuildOutcome(graph=g, partition=p, partitions_tried=tried, log=log)
    return BuildOutcome(graph=None, partition=None, partitions_tried=tried, log=log)

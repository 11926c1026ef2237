"""Greedy plateau descent over partially ordered partitions.

The search walks the move graph whose arcs go from a partition to any
neighbor of equal or smaller score.  A depth-first walk from the current
best either finds a strictly better partition (descend and restart the walk)
or exhausts its plateau, optionally truncated once the walk's path grows to
a configured number of equal-score nodes.  Restarting from a few structured
initial partitions and keeping the best result is cheap insurance against
bad basins.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dsep import CiOracle
from .partitions import OrderedPartition, neighbors
from .scoring import score_vector

# Plateau truncation lengths that worked well per vertex count; anything
# larger falls back to a linear ramp.
PLATEAU_BY_SIZE = {7: 30, 8: 30, 9: 40, 10: 50}


def default_plateau(n: int) -> int:
    return PLATEAU_BY_SIZE.get(n, max(30, 5 * n))


def initial_partitions(n: int) -> list[OrderedPartition]:
    """Standard restart points: one block, ordered halves, all singletons."""
    if n < 1:
        raise ValueError("need at least one vertex")
    whole = OrderedPartition.from_blocks([range(1, n + 1)])
    out = [whole]
    half = n // 2
    if half >= 1 and n - half >= 1 and n >= 2:
        out.append(OrderedPartition.from_blocks(
            [range(1, half + 1), range(half + 1, n + 1)], [(0, 1)]))
        out.append(OrderedPartition.from_blocks([[v] for v in range(1, n + 1)]))
    return out


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`greedy_discover`.

    ``restarts`` may be explicit starting partitions, a count (the first so
    many of :func:`initial_partitions`), or None for all of them.  A None
    ``plateau_limit`` means the per-size default, not "no truncation".
    """

    plateau_limit: int | None = None
    restarts: int | tuple[OrderedPartition, ...] | None = None
    seed: int = 0


@dataclass
class SearchResult:
    best: OrderedPartition
    best_score: tuple[int, ...]
    plateau: list[OrderedPartition] = field(default_factory=list)
    scored: int = 0


def dfs_improve(
    score_of,
    start: OrderedPartition,
    plateau_limit: int | None,
    rng: random.Random,
) -> tuple[OrderedPartition | None, list[OrderedPartition]]:
    """One walk: return a strictly better partition if found, plus every
    equal-score partition seen along the way (the plateau log).

    The walk only descends through equal-score nodes; a strictly smaller
    score ends it immediately.  With a plateau limit, the walk also ends
    once its current path holds that many equal-score nodes.
    """
    s0 = score_of(start)
    visited = {start.key()}
    plateau = [start]

    def shuffled_neighbors(p: OrderedPartition):
        nbrs = neighbors(p)
        rng.shuffle(nbrs)
        return iter(nbrs)

    stack: list[tuple[OrderedPartition, object]] = [(start, shuffled_neighbors(start))]
    while stack:
        _, it = stack[-1]
        pushed = False
        for q in it:
            k = q.key()
            if k in visited:
                continue
            visited.add(k)
            sq = score_of(q)
            if sq > s0:
                continue
            if sq < s0:
                return q, plateau
            plateau.append(q)
            if plateau_limit is not None and len(stack) + 1 >= plateau_limit:
                return None, plateau
            stack.append((q, shuffled_neighbors(q)))
            pushed = True
            break
        if not pushed:
            stack.pop()
    return None, plateau


def greedy_discover(ci: CiOracle, config: SearchConfig | None = None) -> SearchResult:
    """Repeated descent from each restart; best final partition wins.

    Ties across restarts resolve to the earliest restart.  The returned
    plateau holds the equal-score partitions logged by the winning restart's
    final (non-improving) walk, deduplicated, best excluded.
    """
    config = config or SearchConfig()
    rng = random.Random(config.seed)
    limit = config.plateau_limit
    if limit is None:
        limit = default_plateau(ci.n)
    restarts = config.restarts
    if restarts is None:
        restarts = tuple(initial_partitions(ci.n))
    elif isinstance(restarts, int):
        restarts = tuple(initial_partitions(ci.n)[:restarts])

    memo: dict = {}

    def score_of(p: OrderedPartition) -> tuple[int, ...]:
        k = p.key()
        s = memo.get(k)
        if s is None:
            s = score_vector(ci, p)
            memo[k] = s
        return s

    outcomes = []
    for start in restarts:
        current = start
        while True:
            better, plateau = dfs_improve(score_of, current, limit, rng)
            if better is None:
                break
            current = better
        outcomes.append((score_of(current), current, plateau))

    best_score, best, plateau = min(outcomes, key=lambda o: o[0])
    seen = {best.key()}
    log = []
    for q in plateau:
        k = q.key()
        if k not in seen:
            seen.add(k)
            log.append(q)
    return SearchResult(best=best, best_score=best_score, plateau=log, scored=len(memo))

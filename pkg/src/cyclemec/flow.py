"""Exhaustive block recovery through a submodular flow polytope.

One orientation of each within-block adjacency is fixed up front.  For every
"removable" subset Y of edges (one whose removal can be compensated and
whose absence settles the common-child requirements), the points of the flow
polytope with coordinates in {-1, 0} parametrize exactly the edge flips that
keep the block strongly connected.  A point is accepted when its weight
against every forbidden wedge stays below the maximum (no new p-adjacency
appears) and some witness wedge attains the maximum for every removed edge
(removed adjacencies are re-created through a common child).  The polytope
is integral over this box, so sweeping the integer points loses nothing
against enumerating its vertices.

Unlike the randomized solver, this search is complete: it fails only when no
two-cycle-free recovery of the block exists.  The price is exponential
running time in the number of instance edges, hence the hard size limit.
"""

from __future__ import annotations

from itertools import combinations

from .builder import SccrInstance

FLOW_SIZE_LIMIT = 14


class FlowSizeError(ValueError):
    """Instance too large for the exhaustive flow search."""


def canonical_orientation(inst: SccrInstance) -> tuple[tuple[int, int], ...]:
    """One orientation per within-block adjacency, smaller endpoint first."""
    return tuple(sorted((a, b) for a, b in inst.a_pairs if a < b))


def _in_links(inst: SccrInstance, a: int, b: int) -> bool:
    return (
        (a, b) in inst.a_pairs or (b, a) in inst.a_pairs
        or (a, b) in inst.b_pairs or (b, a) in inst.b_pairs
    )


def is_removable(inst: SccrInstance, removed: frozenset[tuple[int, int]]) -> bool:
    """A set of instance edges may be dropped when every mandated common
    child survives, no forbidden common child survives, and each dropped
    adjacency has an untouched wedge to stand in for it."""
    b_left = set(inst.b_pairs) - removed
    cvert = sorted(inst.c)
    for a, c in inst.com_ch:
        if not any((a, v) in b_left and (c, v) in b_left for v in cvert):
            return False
    for a, c in inst.no_com_ch:
        if any((a, v) in b_left and (c, v) in b_left for v in cvert):
            return False
    for a, c in removed:
        if not any(
            _in_links(inst, a, b) and _in_links(inst, c, b)
            and not removed & {(a, b), (b, a), (c, b), (b, c)}
            for b in cvert
        ):
            return False
    return True


def flow_member(
    block: frozenset[int],
    coords: tuple[tuple[int, int], ...],
    values: tuple[int, ...],
) -> bool:
    """Check every directed-cut inequality of the polytope at one point.

    `coords` are the surviving oriented within-block edges and `values` the
    candidate point; for each nonempty proper subset U of the block the
    incoming sum minus the outgoing sum must stay below the outgoing count.
    """
    cvert = sorted(block)
    for umask in range(1, (1 << len(cvert)) - 1):
        inside = {v for i, v in enumerate(cvert) if umask >> i & 1}
        lhs = 0
        out_count = 0
        for (a, b), x in zip(coords, values):
            if a not in inside and b in inside:
                lhs += x
            elif a in inside and b not in inside:
                lhs -= x
                out_count += 1
        if lhs > out_count - 1:
            return False
    return True


def weight_vector(
    coords: tuple[tuple[int, int], ...], a: int, b: int, c: int
) -> tuple[int, ...]:
    """Weights of a wedge through common child b against the coordinates."""
    weights = []
    for e in coords:
        if e == (b, a) or e == (b, c):
            weights.append(-1)
        elif e == (a, b) or e == (c, b):
            weights.append(1)
        else:
            weights.append(0)
    return tuple(weights)


def _strongly_connected(cvert: list[int], edges: set[tuple[int, int]]) -> bool:
    if len(cvert) <= 1:
        return True
    succ = {v: [] for v in cvert}
    pred = {v: [] for v in cvert}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)
    root = cvert[0]
    for adj in (succ, pred):
        seen = {root}
        stack = [root]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(cvert):
            return False
    return True


def _wedges(inst: SccrInstance) -> tuple[list, list]:
    """Wedge triples relevant to the two acceptance properties.

    Forbidden wedges would make a non-adjacent pair with a block member
    p-adjacent; witness wedges are indexed by the pair they can keep
    adjacent.  Both lists carry unordered outer pairs.
    """
    cvert = sorted(inst.c)
    universe = sorted(
        {v for e in inst.a_pairs for v in e} | {v for e in inst.b_pairs for v in e}
    )
    forbidden = []
    witnesses: dict[tuple[int, int], list[int]] = {}
    for a in universe:
        for c in universe:
            if c <= a or (a not in inst.c and c not in inst.c):
                continue
            adjacent = _in_links(inst, a, c)
            for b in cvert:
                if not (_in_links(inst, a, b) and _in_links(inst, c, b)):
                    continue
                if adjacent:
                    witnesses.setdefault((a, c), []).append(b)
                else:
                    forbidden.append((a, b, c))
    return forbidden, witnesses


def solve_flow(inst: SccrInstance) -> frozenset[tuple[int, int]] | None:
    """Search all removable subsets and polytope points; None when no
    two-cycle-free recovery exists."""
    atil = canonical_orientation(inst)
    b_edges = tuple(sorted(inst.b_pairs))
    pool = sorted(atil + b_edges)
    if len(pool) > FLOW_SIZE_LIMIT:
        raise FlowSizeError(
            f"{len(pool)} instance edges exceed the search limit of {FLOW_SIZE_LIMIT}"
        )
    cvert = sorted(inst.c)
    forbidden, witnesses = _wedges(inst)
    for size in range(len(pool) + 1):
        for combo in combinations(pool, size):
            removed = frozenset(combo)
            if not is_removable(inst, removed):
                continue
            coords = tuple(e for e in atil if e not in removed)
            b_kept = [e for e in b_edges if e not in removed]
            live_forbidden = [
                (a, b, c) for (a, b, c) in forbidden
                if not removed & {(a, b), (b, a), (c, b), (b, c)}
            ]
            repairs = []
            for a, c in removed:
                key = (a, c) if a < c else (c, a)
                pool_b = [
                    b for b in witnesses.get(key, [])
                    if not removed & {(a, b), (b, a), (c, b), (b, c)}
                ]
                repairs.append((a, c, pool_b))
            for mask in range(1 << len(coords)):
                values = tuple(-(mask >> i & 1) for i in range(len(coords)))
                oriented = {
                    (v, u) if x == -1 else (u, v)
                    for (u, v), x in zip(coords, values)
                }
                if not _strongly_connected(cvert, oriented):
                    continue
                if any(
                    _attains(coords, values, a, b, c)
                    for (a, b, c) in live_forbidden
                ):
                    continue
                if all(
                    any(_attains(coords, values, a, b, c) for b in pool_b)
                    for (a, c, pool_b) in repairs
                ):
                    return frozenset(oriented) | frozenset(b_kept)
    return None


def _attains(
    coords: tuple[tuple[int, int], ...],
    values: tuple[int, ...],
    a: int,
    b: int,
    c: int,
) -> bool:
    """Whether the wedge weight at this point reaches its box maximum."""
    weights = weight_vector(coords, a, b, c)
    best = sum(1 for w in weights if w == -1)
    return sum(w * x for w, x in zip(weights, values)) == best

"""Graph-side Markov equivalence features for directed graphs with cycles.

Adjacency alone does not determine Markov equivalence once cycles are allowed,
so the comparison works over six feature families: pseudo-adjacencies, the
classification of unshielded triples, ancestry among imperfect non-conductor
middles, mutually exclusive itineraries, and itinerary/wedge ancestry pairs.
Two graphs are Markov equivalent exactly when all six families coincide, and
`ci_equivalent` checks the ground truth (equal d-separation sets) directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsep import graph_ci
from .graphs import DirectedGraph, vertices_of

CONDUCTOR = "conductor"
PERFECT = "perfect-non-conductor"
IMPERFECT = "imperfect-non-conductor"


@dataclass(frozen=True)
class MecSummary:
    """The six feature families that pin down a Markov equivalence class.

    The same structure is produced in two independent ways: from an explicit
    graph (this module) and from a CI oracle plus a partially ordered
    partition (the scoring module).  Equality of summaries is the working
    notion of "same class" throughout.

    Pairs and triples are stored with both orientations; itineraries are
    vertex tuples of length >= 3 and appear in both directions too.
    """

    links: frozenset[tuple[int, int]]
    conductors: frozenset[tuple[int, int, int]]
    perfect_nonconductors: frozenset[tuple[int, int, int]]
    imperfect_pairs: frozenset[tuple[tuple[int, int, int], tuple[int, int, int]]]
    exclusive_itineraries: frozenset[tuple[int, ...]]
    itinerary_wedges: frozenset[tuple[tuple[int, ...], tuple[int, int, int]]]

    def counts(self) -> tuple[int, ...]:
        by_len: dict[int, int] = {}
        for itin in self.exclusive_itineraries:
            by_len[len(itin)] = by_len.get(len(itin), 0) + 1
        return (
            len(self.links),
            len(self.conductors),
            len(self.perfect_nonconductors),
            len(self.imperfect_pairs),
            sum(by_len.values()),
            len(self.itinerary_wedges),
        )


def p_adjacent(g: DirectedGraph, a: int, b: int) -> bool:
    """True iff a and b share an edge, or a common child that is an ancestor
    of a or b."""
    if (a, b) in g.edges or (b, a) in g.edges:
        return True
    both = (1 << (a - 1)) | (1 << (b - 1))
    for d in vertices_of(g.children_mask[a] & g.children_mask[b]):
        if g.descendant_mask[d] & both:
            return True
    return False


def p_adjacency_masks(g: DirectedGraph) -> list[int]:
    """Row masks: bit w-1 of row v set iff v and w are p-adjacent."""
    rows = [0] * (g.n + 1)
    for a in range(1, g.n + 1):
        for b in range(a + 1, g.n + 1):
            if p_adjacent(g, a, b):
                rows[a] |= 1 << (b - 1)
                rows[b] |= 1 << (a - 1)
    return rows


def p_adjacencies(g: DirectedGraph) -> frozenset[tuple[int, int]]:
    """All unordered p-adjacent pairs, stored as (min, max)."""
    rows = p_adjacency_masks(g)
    return frozenset(
        (a, b) for a in range(1, g.n + 1) for b in vertices_of(rows[a]) if a < b
    )


def classify_triples(g: DirectedGraph) -> dict[tuple[int, int, int], str]:
    """Label every unshielded triple (a,b,c): a-b and c-b p-adjacent, a,c not.

    b is a conductor when it is an ancestor of a or c; a non-conductor is
    perfect when b descends from a common child of a and c (b itself being
    that child counts), imperfect otherwise.  Both orientations of each
    triple are present.
    """
    rows = p_adjacency_masks(g)
    out: dict[tuple[int, int, int], str] = {}
    for b in range(1, g.n + 1):
        partners = list(vertices_of(rows[b]))
        for i, a in enumerate(partners):
            for c in partners[i + 1:]:
                if rows[a] & (1 << (c - 1)):
                    continue
                if g.descendant_mask[b] & ((1 << (a - 1)) | (1 << (c - 1))):
                    label = CONDUCTOR
                else:
                    label = IMPERFECT
                    bbit = 1 << (b - 1)
                    for d in vertices_of(g.children_mask[a] & g.children_mask[c]):
                        if g.descendant_mask[d] & bbit:
                            label = PERFECT
                            break
                out[(a, b, c)] = label
                out[(c, b, a)] = label
    return out


def mutually_exclusive(g: DirectedGraph) -> frozenset[tuple[int, ...]]:
    """All uncovered itineraries (a0,...,a_{t+1}), t >= 1, whose end triples
    are mutually exclusive with respect to the itinerary.

    Required shape: consecutive vertices p-adjacent, non-consecutive ones
    not, each vertex an ancestor of the next except for the last step, each
    an ancestor of the previous except for the first step, and a1 an ancestor
    of neither endpoint.  The two ancestry chains force the inner vertices
    into a single strongly connected component, which keeps the search small.
    """
    rows = p_adjacency_masks(g)
    desc = g.descendant_mask
    found: set[tuple[int, ...]] = set()
    max_len = g.n  # t <= n-2 means at most n vertices per itinerary

    def covered(chain: list[int], x: int) -> bool:
        xbit = 1 << (x - 1)
        return any(rows[v] & xbit for v in chain[:-1])

    def extend(chain: list[int]) -> None:
        last = chain[-1]
        a1 = chain[1]
        for x in vertices_of(rows[last]):
            if x in chain or covered(chain, x):
                continue
            # Complete with a_{t+1} = x: x must reach back to the last inner
            # vertex while a1 stays off x's ancestor list.
            if desc[x] & (1 << (last - 1)) and not desc[a1] & (1 << (x - 1)):
                found.add(tuple(chain) + (x,))
            # Keep x as an inner vertex: mutual ancestry with the current tail.
            if len(chain) + 1 < max_len:
                if desc[x] & (1 << (last - 1)) and desc[last] & (1 << (x - 1)):
                    chain.append(x)
                    extend(chain)
                    chain.pop()

    for a0 in range(1, g.n + 1):
        for a1 in vertices_of(rows[a0]):
            # a0 must be an ancestor of a1 but not vice versa.
            if desc[a0] & (1 << (a1 - 1)) and not desc[a1] & (1 << (a0 - 1)):
                extend([a0, a1])
    return frozenset(found)


def graph_summary(g: DirectedGraph) -> MecSummary:
    """The six-family feature summary of an explicit graph."""
    links = frozenset(
        pair for a, b in p_adjacencies(g) for pair in ((a, b), (b, a))
    )
    triples = classify_triples(g)
    conductors = frozenset(t for t, lab in triples.items() if lab == CONDUCTOR)
    perfect = frozenset(t for t, lab in triples.items() if lab == PERFECT)
    imperfect = [t for t, lab in triples.items() if lab == IMPERFECT]

    by_ends: dict[tuple[int, int], list[int]] = {}
    for a, b, c in imperfect:
        by_ends.setdefault((a, c), []).append(b)
    pairs = set()
    for (a, c), mids in by_ends.items():
        for b1 in mids:
            for b2 in mids:
                if g.descendant_mask[b1] & (1 << (b2 - 1)) or b1 == b2:
                    pairs.add(((a, b1, c), (a, b2, c)))

    itineraries = mutually_exclusive(g)
    wedges = set()
    imperfect_set = frozenset(imperfect)
    for itin in itineraries:
        a0, a1, a_end = itin[0], itin[1], itin[-1]
        for b in range(1, g.n + 1):
            if (a0, b, a_end) in imperfect_set and g.descendant_mask[a1] & (1 << (b - 1)):
                wedges.add((itin, (a0, b, a_end)))

    return MecSummary(
        links=links,
        conductors=conductors,
        perfect_nonconductors=perfect,
        imperfect_pairs=frozenset(pairs),
        exclusive_itineraries=itineraries,
        itinerary_wedges=frozenset(wedges),
    )


def markov_equivalent(g1: DirectedGraph, g2: DirectedGraph) -> bool:
    """Determine Markov equivalence by comparing all six feature families."""
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    return graph_summary(g1) == graph_summary(g2)


def equivalence_conditions(g1: DirectedGraph, g2: DirectedGraph) -> dict[str, bool]:
    """Per-family agreement, for diagnostic output."""
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    s1, s2 = graph_summary(g1), graph_summary(g2)
    return {
        "p-adjacencies": s1.links == s2.links,
        "unshielded conductors": s1.conductors == s2.conductors,
        "perfect non-conductors": s1.perfect_nonconductors == s2.perfect_nonconductors,
        "imperfect middle ancestry": s1.imperfect_pairs == s2.imperfect_pairs,
        "mutually exclusive itineraries": s1.exclusive_itineraries == s2.exclusive_itineraries,
        "itinerary wedge ancestry": s1.itinerary_wedges == s2.itinerary_wedges,
    }


def ci_equivalent(g1: DirectedGraph, g2: DirectedGraph, guard: int = 12) -> bool:
    """Ground truth: both graphs entail exactly the same d-separations."""
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    return graph_ci(g1, guard) == graph_ci(g2, guard)

"""Candidate scoring for partially ordered partitions against a CI oracle.

Each partially ordered partition proposes an ancestral structure: vertices in
a block form one strongly connected component, and the block order plays the
role of reachability.  Under that proposal the CI oracle is probed with
block-union conditioning sets, yielding counterparts of the six graph-side
feature families.  The score vector collects their sizes; minimizing it
lexicographically over all partially ordered partitions recovers the families
of the data-generating graph.
"""

from __future__ import annotations

from .dsep import CiOracle
from .graphs import mask_of
from .mec import MecSummary
from .partitions import OrderedPartition


class _F:
    """Scratch for one scoring pass; sizes feed the vector, sets the summary."""

    __slots__ = ("links", "rows", "conductors", "perfect", "imperfect_pairs",
                 "itineraries", "wedges", "by_len")


def _setup(ci: CiOracle, p: OrderedPartition):
    if p.universe != frozenset(range(1, ci.n + 1)):
        raise ValueError("partition universe does not match the oracle's vertex set")
    ids = [0] * (ci.n + 1)
    for i, block in enumerate(p.blocks):
        for v in block:
            ids[v] = i
    k = len(p.blocks)
    bmask = [mask_of(b) for b in p.blocks]
    # leq[i] = set of block indices j with block_j <= block_i (reflexive).
    below = [{i} for i in range(k)]
    for i, j in p.order:
        below[j].add(i)
    # union_leq[i] = all vertices in blocks <= block_i.
    union_leq = [0] * k
    for i in range(k):
        m = 0
        for j in below[i]:
            m |= bmask[j]
        union_leq[i] = m
    leq = [[(i in below[j]) for j in range(k)] for i in range(k)]
    return ids, union_leq, leq


def compute_links(ci: CiOracle, p: OrderedPartition) -> tuple[set[tuple[int, int]], list[int]]:
    """Linked pairs: dependent given the union of blocks below either side.

    Returns the set of ordered pairs (both orientations) and per-vertex
    partner masks.
    """
    ids, union_leq, _ = _setup(ci, p)
    return _links(ci, ids, union_leq)


def _links(ci: CiOracle, ids, union_leq) -> tuple[set[tuple[int, int]], list[int]]:
    n = ci.n
    indep = ci.independencies
    pairs: set[tuple[int, int]] = set()
    rows = [0] * (n + 1)
    for a in range(1, n + 1):
        abit = 1 << (a - 1)
        ua = union_leq[ids[a]]
        for b in range(a + 1, n + 1):
            zm = (ua | union_leq[ids[b]]) & ~(abit | (1 << (b - 1)))
            if (a, b, zm) not in indep:
                pairs.add((a, b))
                pairs.add((b, a))
                rows[a] |= 1 << (b - 1)
                rows[b] |= abit
    return pairs, rows


def _features(ci: CiOracle, p: OrderedPartition) -> _F:
    ids, union_leq, leq = _setup(ci, p)
    n = ci.n
    indep = ci.independencies
    f = _F()
    f.links, rows = _links(ci, ids, union_leq)
    f.rows = rows

    conductors: set[tuple[int, int, int]] = set()
    perfect: set[tuple[int, int, int]] = set()
    imperfect_by_ends: dict[tuple[int, int], list[int]] = {}
    for b in range(1, n + 1):
        mb = rows[b]
        partners = []
        m = mb
        while m:
            low = m & -m
            partners.append(low.bit_length())
            m ^= low
        ub = union_leq[ids[b]]
        lb = leq[ids[b]]
        for i, a in enumerate(partners):
            ua = union_leq[ids[a]]
            la = lb[ids[a]]
            for c in partners[i + 1:]:
                if rows[a] & (1 << (c - 1)):
                    continue
                is_cond = la or lb[ids[c]]
                if is_cond:
                    conductors.add((a, b, c))
                    conductors.add((c, b, a))
                lo, hi = (a, c) if a < c else (c, a)
                zm = (ua | ub | union_leq[ids[c]]) & ~((1 << (lo - 1)) | (1 << (hi - 1)))
                is_perf = (lo, hi, zm) not in indep
                if is_perf:
                    perfect.add((a, b, c))
                    perfect.add((c, b, a))
                if not is_cond and not is_perf:
                    imperfect_by_ends.setdefault((a, c), []).append(b)
                    imperfect_by_ends.setdefault((c, a), []).append(b)
    f.conductors = conductors
    f.perfect = perfect

    pairs: set[tuple[tuple[int, int, int], tuple[int, int, int]]] = set()
    for (a, c), mids in imperfect_by_ends.items():
        for b1 in mids:
            l1 = leq[ids[b1]]
            for b2 in mids:
                if l1[ids[b2]]:
                    pairs.add(((a, b1, c), (a, b2, c)))
    f.imperfect_pairs = pairs

    # Linked itineraries whose inner vertices share a block that sits below
    # neither endpoint's block: uncovered chains, consecutive links only.
    itineraries: set[tuple[int, ...]] = set()
    by_len: dict[int, int] = {}

    def extend(chain: list[int], inner_block: int) -> None:
        last = chain[-1]
        linner = leq[inner_block]
        m = rows[last]
        while m:
            low = m & -m
            x = low.bit_length()
            m ^= low
            if x in chain:
                continue
            xbit = 1 << (x - 1)
            if any(rows[v] & xbit for v in chain[:-1]):
                continue
            if not linner[ids[chain[0]]] and not linner[ids[x]]:
                itin = tuple(chain) + (x,)
                if itin not in itineraries:
                    itineraries.add(itin)
                    by_len[len(itin)] = by_len.get(len(itin), 0) + 1
            if len(chain) + 1 < n and ids[x] == inner_block:
                chain.append(x)
                extend(chain, inner_block)
                chain.pop()

    if n >= 3:
        for a0 in range(1, n + 1):
            m0 = rows[a0]
            while m0:
                low = m0 & -m0
                a1 = low.bit_length()
                m0 ^= low
                extend([a0, a1], ids[a1])
    f.itineraries = itineraries
    f.by_len = by_len

    wedges: set[tuple[tuple[int, ...], tuple[int, int, int]]] = set()
    for itin in itineraries:
        a0, a1, a_end = itin[0], itin[1], itin[-1]
        l1 = leq[ids[a1]]
        m = rows[a0] & rows[a_end]
        while m:
            low = m & -m
            b = low.bit_length()
            m ^= low
            if b == a0 or b == a_end:
                continue
            t = (a0, b, a_end)
            if t in conductors or t in perfect:
                continue
            if l1[ids[b]]:
                wedges.add((itin, t))
    f.wedges = wedges
    return f


def compute_summary(ci: CiOracle, p: OrderedPartition) -> MecSummary:
    """The six families the partition induces on the oracle, as a summary."""
    f = _features(ci, p)
    return MecSummary(
        links=frozenset(f.links),
        conductors=frozenset(f.conductors),
        perfect_nonconductors=frozenset(f.perfect),
        imperfect_pairs=frozenset(f.imperfect_pairs),
        exclusive_itineraries=frozenset(f.itineraries),
        itinerary_wedges=frozenset(f.wedges),
    )


def score_vector(ci: CiOracle, p: OrderedPartition) -> tuple[int, ...]:
    """Lexicographic score: link, conductor, perfect and ancestry-pair counts,
    then negated itinerary counts by inner length, then wedge count.

    Itinerary counts enter negated (longer-chain structure is rewarded); the
    single-inner-vertex family is excluded from the vector though it still
    feeds the wedge set.
    """
    f = _features(ci, p)
    n = ci.n
    middle = tuple(-f.by_len.get(t + 2, 0) for t in range(2, n - 1))
    return (
        len(f.links),
        len(f.conductors),
        len(f.perfect),
        len(f.imperfect_pairs),
        *middle,
        len(f.wedges),
    )

"""Partially ordered partitions: set partitions whose blocks carry a strict order.

The order is stored transitively closed, as pairs of block indices into the
canonical block tuple (blocks sorted by smallest member).  All search moves
edit that closed relation directly; a candidate edit that breaks closure or
antisymmetry simply is not a neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence


class PartitionError(ValueError):
    """Raised for objects that are not valid partially ordered partitions."""


# A move in the second family may never empty a block: a partition cannot
# contain the empty set, so moving the last element of a block is illegal.
ALLOW_EMPTYING_MOVES = False

ENUMERATION_GUARD = 5


@dataclass(frozen=True)
class OrderedPartition:
    """Blocks (sorted by min element) plus a strict order on block indices.

    The order relation must be irreflexive, antisymmetric and transitively
    closed; the constructor rejects anything else.
    """

    blocks: tuple[frozenset[int], ...]
    order: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(frozenset(b) for b in self.blocks))
        object.__setattr__(self, "order", frozenset((int(i), int(j)) for i, j in self.order))
        validate(self)

    @classmethod
    def from_blocks(
        cls,
        blocks: Iterable[Iterable[int]],
        order: Iterable[tuple[int, int]] = (),
    ) -> "OrderedPartition":
        """Build a partition from blocks in any order and order pairs on block
        indices *as given*; blocks are sorted canonically and the order pairs
        are remapped and transitively closed."""
        raw = [frozenset(b) for b in blocks]
        perm = sorted(range(len(raw)), key=lambda i: min(raw[i]) if raw[i] else -1)
        where = {old: new for new, old in enumerate(perm)}
        pairs = {(where[i], where[j]) for i, j in order}
        return cls(tuple(raw[i] for i in perm), frozenset(_close(pairs)))

    @cached_property
    def universe(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.blocks:
            out |= b
        return frozenset(out)

    @cached_property
    def block_of(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def leq(self, i: int, j: int) -> bool:
        """Reflexive comparison of block indices."""
        return i == j or (i, j) in self.order

    def key(self) -> tuple:
        """A canonical hashable key (blocks as sorted tuples, order sorted)."""
        return (
            tuple(tuple(sorted(b)) for b in self.blocks),
            tuple(sorted(self.order)),
        )


def validate(p: OrderedPartition) -> None:
    """Raise PartitionError unless p is a valid partially ordered partition."""
    seen: set[int] = set()
    for b in p.blocks:
        if not b:
            raise PartitionError("empty block")
        if b & seen:
            raise PartitionError(f"blocks are not disjoint: {sorted(b & seen)} repeats")
        seen |= b
    mins = [min(b) for b in p.blocks]
    if mins != sorted(mins):
        raise PartitionError("blocks are not sorted by smallest member")
    k = len(p.blocks)
    for i, j in p.order:
        if not (0 <= i < k and 0 <= j < k):
            raise PartitionError(f"order pair ({i}, {j}) is out of range")
        if i == j:
            raise PartitionError(f"order is not irreflexive: ({i}, {j})")
        if (j, i) in p.order:
            raise PartitionError(f"order is not antisymmetric: ({i}, {j}) and ({j}, {i})")
    if not _is_closed(p.order):
        raise PartitionError("order is not transitively closed")


def _close(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for i, j in list(closed):
            for j2, l in list(closed):
                if j2 == j and (i, l) not in closed:
                    if i == l:
                        raise PartitionError("order pairs contain a cycle")
                    closed.add((i, l))
                    changed = True
    return closed


def _is_closed(pairs: frozenset[tuple[int, int]] | set[tuple[int, int]]) -> bool:
    for i, j in pairs:
        for j2, l in pairs:
            if j2 == j and i != l and (i, l) not in pairs:
                return False
            if j2 == j and i == l:
                return False
    return True


def consecutive_pairs(p: OrderedPartition) -> list[tuple[int, int]]:
    """Index pairs (i, j) with block_i < block_j and nothing strictly between."""
    out = []
    for i, j in p.order:
        if any((i, k) in p.order and (k, j) in p.order for k in range(len(p.blocks))):
            continue
        out.append((i, j))
    return sorted(out)


def neighbors(p: OrderedPartition) -> list[OrderedPartition]:
    """All partitions one move away from p.

    Three move families: edit the closed order relation by exactly one pair;
    move one element across a consecutive pair of blocks; extract one element
    of a block into a new singleton placed directly before or after the rest.
    Results are deduplicated and exclude p itself.
    """
    found: dict[tuple, OrderedPartition] = {}

    def add(q: OrderedPartition) -> None:
        key = q.key()
        if key != p.key() and key not in found:
            found[key] = q

    k = len(p.blocks)

    # Family 1: add or remove a single pair of the closed order relation.
    for pair in p.order:
        rest = p.order - {pair}
        if _is_closed(rest):
            add(OrderedPartition(p.blocks, rest))
    for i in range(k):
        for j in range(k):
            if i == j or (i, j) in p.order or (j, i) in p.order:
                continue
            grown = p.order | {(i, j)}
            if _is_closed(grown):
                add(OrderedPartition(p.blocks, grown))

    # Family 2: move one element across a consecutive pair.  The surgery
    # renames the two blocks inside the order relation, so the result is
    # order-isomorphic and always a valid partition (unless a block empties).
    for i, j in consecutive_pairs(p):
        for src, dst in ((i, j), (j, i)):
            for a in p.blocks[src]:
                if len(p.blocks[src]) == 1 and not ALLOW_EMPTYING_MOVES:
                    continue
                new_blocks = list(p.blocks)
                new_blocks[src] = p.blocks[src] - {a}
                new_blocks[dst] = p.blocks[dst] | {a}
                if not new_blocks[src]:
                    new_blocks.pop(src)
                    remap = {t: (t if t < src else t - 1) for t in range(k) if t != src}
                    pairs = {(remap[x], remap[y]) for x, y in p.order if x != src and y != src}
                else:
                    pairs = set(p.order)
                try:
                    add(OrderedPartition.from_blocks(new_blocks, pairs))
                except PartitionError:
                    continue

    # Family 3: extract one element into a new singleton right before or
    # right after the remainder of its block.
    for h in range(k):
        if len(p.blocks[h]) < 2:
            continue
        for a in p.blocks[h]:
            for singleton_first in (True, False):
                new_blocks = list(p.blocks)
                new_blocks[h] = p.blocks[h] - {a}
                s = k  # index of the new singleton before canonicalization
                new_blocks.append(frozenset({a}))
                pairs = set(p.order)
                pairs |= {(x, s) for x, y in p.order if y == h}
                pairs |= {(s, y) for x, y in p.order if x == h}
                if singleton_first:
                    pairs.add((s, h))
                else:
                    pairs.add((h, s))
                add(OrderedPartition.from_blocks(new_blocks, pairs))

    return list(found.values())


def strict_posets(k: int) -> list[frozenset[tuple[int, int]]]:
    """All strict partial orders (transitively closed) on indices 0..k-1."""
    if k == 0:
        return [frozenset()]
    pair_slots = list(combinations(range(k), 2))
    out = []

    # Each unordered slot is absent, forward or backward; antisymmetry holds
    # by construction, so only transitivity needs checking.
    def rec(t: int, pairs: set[tuple[int, int]]) -> None:
        if t == len(pair_slots):
            if _is_closed(pairs):
                out.append(frozenset(pairs))
            return
        i, j = pair_slots[t]
        rec(t + 1, pairs)
        pairs.add((i, j))
        rec(t + 1, pairs)
        pairs.remove((i, j))
        pairs.add((j, i))
        rec(t + 1, pairs)
        pairs.remove((j, i))

    rec(0, set())
    return out


def set_partitions(items: Sequence[int]) -> list[list[set[int]]]:
    """All set partitions of items, as lists of blocks."""
    items = list(items)
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for smaller in set_partitions(rest):
        for idx in range(len(smaller)):
            out.append([b | {first} if t == idx else set(b) for t, b in enumerate(smaller)])
        out.append([{first}] + [set(b) for b in smaller])
    return out


def enumerate_all(n: int, guard: int = ENUMERATION_GUARD) -> list[OrderedPartition]:
    """Every partially ordered partition of 1..n.  Guarded: the count explodes."""
    if n > guard:
        raise PartitionError(f"refusing to enumerate partitions of {n} > {guard} vertices")
    out = []
    for blocks in set_partitions(list(range(1, n + 1))):
        canon = sorted((frozenset(b) for b in blocks), key=min)
        for poset in strict_posets(len(canon)):
            out.append(OrderedPartition(tuple(canon), poset))
    return out


def parse_partition(text: str) -> OrderedPartition:
    """Parse the partition file format.

    One ``block <members...>`` line per block, then ``order <i> <j>`` lines
    giving strict comparisons between 1-based block positions (in file order).
    Blank lines and ``#`` comments are ignored.
    """
    blocks: list[frozenset[int]] = []
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "block":
            try:
                members = frozenset(int(x) for x in parts[1:])
            except ValueError:
                raise PartitionError(f"line {lineno}: block members must be integers") from None
            if not members:
                raise PartitionError(f"line {lineno}: block has no members")
            blocks.append(members)
        elif parts[0] == "order":
            if len(parts) != 3:
                raise PartitionError(f"line {lineno}: expected 'order <i> <j>'")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise PartitionError(f"line {lineno}: order entries must be integers") from None
            if not (1 <= i <= len(blocks) and 1 <= j <= len(blocks)):
                raise PartitionError(f"line {lineno}: order ({i}, {j}) names an unknown block")
            pairs.append((i - 1, j - 1))
        else:
            raise PartitionError(f"line {lineno}: expected 'block' or 'order', got {parts[0]!r}")
    if not blocks:
        raise PartitionError("partition file declares no blocks")
    try:
        return OrderedPartition.from_blocks(blocks, pairs)
    except PartitionError as exc:
        raise PartitionError(f"invalid partition: {exc}") from None


def format_partition(p: OrderedPartition) -> str:
    lines = []
    for b in p.blocks:
        lines.append("block " + " ".join(str(v) for v in sorted(b)))
    for i, j in sorted(p.order):
        lines.append(f"order {i + 1} {j + 1}")
    return "\n".join(lines) + "\n"

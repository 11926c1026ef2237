"""Directed graphs with cycles, as plain edge sets over vertices 1..n.

Vertices are 1-based integers.  Two-cycles (a->b and b->a) are legal,
self-loops are not.  Adjacency is kept internally as integer bitmasks
(bit v-1 stands for vertex v), which keeps the exhaustive small-n sweeps
in the test suite fast without any third-party dependency.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised for malformed graphs or graph files."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << (v - 1)
    return m


def vertices_of(mask: int) -> Iterator[int]:
    v = 1
    while mask:
        if mask & 1:
            yield v
        mask >>= 1
        v += 1


@dataclass(frozen=True)
class DirectedGraph:
    """A directed graph on vertices 1..n, possibly cyclic."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {self.n}")
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphError(f"edge ({u}, {v}) is outside 1..{self.n}")
            if u == v:
                raise GraphError(f"self-loop ({u}, {v}) is not allowed")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DirectedGraph":
        return cls(n, frozenset((int(u), int(v)) for u, v in edges))

    @cached_property
    def children_mask(self) -> tuple[int, ...]:
        """children_mask[v] has bit w-1 set iff v -> w is an edge (index 0 unused)."""
        out = [0] * (self.n + 1)
        for u, v in self.edges:
            out[u] |= 1 << (v - 1)
        return tuple(out)

    @cached_property
    def parents_mask(self) -> tuple[int, ...]:
        out = [0] * (self.n + 1)
        for u, v in self.edges:
            out[v] |= 1 << (u - 1)
        return tuple(out)

    @cached_property
    def descendant_mask(self) -> tuple[int, ...]:
        """Reflexive descendant closure per vertex, as bitmasks (index 0 unused)."""
        return _closure(self.n, self.children_mask)

    @cached_property
    def ancestor_mask(self) -> tuple[int, ...]:
        """Reflexive ancestor closure per vertex, as bitmasks (index 0 unused)."""
        return _closure(self.n, self.parents_mask)

    def children(self, v: int) -> frozenset[int]:
        return frozenset(vertices_of(self.children_mask[v]))

    def parents(self, v: int) -> frozenset[int]:
        return frozenset(vertices_of(self.parents_mask[v]))

    def ancestors(self, v: int) -> frozenset[int]:
        """All u with a directed path u -> ... -> v, including v itself."""
        return frozenset(vertices_of(self.ancestor_mask[v]))

    def descendants(self, v: int) -> frozenset[int]:
        return frozenset(vertices_of(self.descendant_mask[v]))

    def is_ancestor(self, a: int, b: int) -> bool:
        """True iff a is an ancestor of b (reflexively: always true for a == b)."""
        return bool(self.ancestor_mask[b] & (1 << (a - 1)))

    def scc(self) -> tuple[frozenset[int], ...]:
        """Strongly connected components, sorted by smallest member."""
        comps = _tarjan(self.n, self.children_mask)
        return tuple(sorted((frozenset(c) for c in comps), key=min))

    def induced_partition(self):
        """The ordered partition whose blocks are the SCCs, ordered by reachability."""
        from .partitions import OrderedPartition

        blocks = self.scc()
        reps = [min(b) for b in blocks]
        masks = [mask_of(b) for b in blocks]
        pairs = set()
        for i, r in enumerate(reps):
            reach = self.descendant_mask[r]
            for j, m in enumerate(masks):
                if i != j and reach & m:
                    pairs.add((i, j))
        return OrderedPartition(blocks, frozenset(pairs))


def _closure(n: int, step_mask: tuple[int, ...]) -> tuple[int, ...]:
    # Reflexive transitive closure by fixpoint iteration; fine at the sizes
    # this library targets (the CI enumeration guard caps n well below 20).
    closed = [0] + [step_mask[v] | (1 << (v - 1)) for v in range(1, n + 1)]
    changed = True
    while changed:
        changed = False
        for v in range(1, n + 1):
            acc = closed[v]
            rest = acc
            while rest:
                low = rest & -rest
                acc |= closed[low.bit_length()]
                rest ^= low
            if acc != closed[v]:
                closed[v] = acc
                changed = True
    return tuple(closed)


def _tarjan(n: int, children_mask: tuple[int, ...]) -> list[list[int]]:
    index = [0] * (n + 1)
    low = [0] * (n + 1)
    on_stack = [False] * (n + 1)
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = [1]

    def strongconnect(root: int) -> None:
        # Iterative Tarjan; the recursion depth would be fine at our sizes,
        # but an explicit stack keeps it uniform.
        work = [(root, iter(list(vertices_of(children_mask[root]))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == 0:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(list(vertices_of(children_mask[w])))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)

    for v in range(1, n + 1):
        if index[v] == 0:
            strongconnect(v)
    return comps


def parse_graph(text: str) -> DirectedGraph:
    """Parse the graph file format: a header ``n=<count>`` then ``u v`` edge lines.

    Blank lines and lines starting with ``#`` are ignored.  Errors name the
    offending line.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise GraphError(f"line {lineno}: expected header 'n=<count>', got {line!r}")
            try:
                n = int(line[2:])
            except ValueError:
                raise GraphError(f"line {lineno}: bad vertex count in {line!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: edge endpoints must be integers in {line!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"line {lineno}: edge ({u}, {v}) is outside 1..{n}")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop ({u}, {v}) is not allowed")
        edges.append((u, v))
    if n is None:
        raise GraphError("empty graph file: missing 'n=<count>' header")
    return DirectedGraph.from_edges(n, edges)


def format_graph(g: DirectedGraph) -> str:
    lines = [f"n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"

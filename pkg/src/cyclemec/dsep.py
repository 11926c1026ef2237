"""d-connection in directed graphs with cycles, and conditional independence oracles.

Two engines are provided.  The primary one walks (vertex, arrival-direction)
states, which finds a connecting walk exactly when a connecting path exists.
The second builds the moral graph of the relevant ancestral subgraph and
looks for a plain path there; it shares no code with the first and serves as
a cross-check.  A third, brute-force path enumerator lives in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .graphs import DirectedGraph, GraphError, mask_of, vertices_of

ENUMERATION_GUARD = 12


class CiError(ValueError):
    """Raised for malformed conditional independence files or statements."""


def _zmask(g: DirectedGraph, a: int, b: int, z: Iterable[int] | int) -> int:
    zm = z if isinstance(z, int) else mask_of(z)
    if zm & (1 << (a - 1)) or zm & (1 << (b - 1)):
        raise ValueError(f"conditioning set may not contain the endpoints {a}, {b}")
    if zm >> g.n:
        raise ValueError("conditioning set mentions vertices outside the graph")
    return zm


def d_connected(g: DirectedGraph, a: int, b: int, z: Iterable[int] | int = 0) -> bool:
    """True iff a and b are d-connected given z.

    A connecting path must have every collider in z or with a descendant in z,
    and every non-collider inner vertex outside z.  The search runs over
    states (vertex, how the last edge met it): an edge into the vertex means a
    further head-to-head step needs the collider rule, anything else needs the
    vertex to be unconditioned.
    """
    if a == b:
        return True
    zm = _zmask(g, a, b, z)
    target = 1 << (b - 1)
    # collider_ok[v]: v or one of its descendants is conditioned on.
    collider_ok = [False] + [bool(g.descendant_mask[v] & zm) for v in range(1, g.n + 1)]
    in_z = [False] + [bool(zm & (1 << (v - 1))) for v in range(1, g.n + 1)]

    seen_head = [False] * (g.n + 1)  # reached via an edge pointing at the vertex
    seen_tail = [False] * (g.n + 1)  # reached via an edge pointing away from it
    stack: list[tuple[int, bool]] = []

    if (g.children_mask[a] | g.parents_mask[a]) & target:
        return True
    for w in vertices_of(g.children_mask[a]):
        seen_head[w] = True
        stack.append((w, True))
    for w in vertices_of(g.parents_mask[a]):
        seen_tail[w] = True
        stack.append((w, False))

    while stack:
        v, arrived_head = stack.pop()
        # Leave through an outgoing edge: v acts as a chain or fork.
        if not in_z[v]:
            for w in vertices_of(g.children_mask[v]):
                if w == b:
                    return True
                if not seen_head[w]:
                    seen_head[w] = True
                    stack.append((w, True))
        # Leave through an incoming edge (walked backwards): if we also came
        # in through a head, v is a collider on the walk.
        if (collider_ok[v] if arrived_head else not in_z[v]):
            for w in vertices_of(g.parents_mask[v]):
                if w == b:
                    return True
                if not seen_tail[w]:
                    seen_tail[w] = True
                    stack.append((w, False))
    return False


def d_connected_moral(g: DirectedGraph, a: int, b: int, z: Iterable[int] | int = 0) -> bool:
    """Independent oracle: path search in the moral graph of the ancestral closure.

    a and b are d-connected given z iff some path in the moralization of the
    subgraph induced on the ancestors of {a, b} union z avoids z entirely.
    """
    if a == b:
        return True
    zm = _zmask(g, a, b, z)
    keep = g.ancestor_mask[a] | g.ancestor_mask[b]
    for v in vertices_of(zm):
        keep |= g.ancestor_mask[v]

    # Undirected adjacency of the moral graph, restricted to `keep`: existing
    # edges both ways, plus a link between any two parents of a common child.
    adj = [0] * (g.n + 1)
    kbit = keep
    for v in vertices_of(kbit):
        within = (g.children_mask[v] | g.parents_mask[v]) & keep
        adj[v] |= within
    for v in vertices_of(kbit):
        par = g.parents_mask[v] & keep
        for u in vertices_of(par):
            adj[u] |= par & ~(1 << (u - 1))

    frontier = 1 << (a - 1)
    reached = frontier
    blocked = zm
    while frontier:
        nxt = 0
        for v in vertices_of(frontier):
            nxt |= adj[v]
        nxt &= ~reached & ~blocked & keep
        if nxt & (1 << (b - 1)):
            return True
        reached |= nxt
        frontier = nxt
    return False


@dataclass(frozen=True)
class CiOracle:
    """The full list of conditional independences over vertices 1..n.

    Statements are canonical triples (a, b, zmask) with a < b; zmask encodes
    the conditioning set with bit v-1 for vertex v.  Pairs are unordered and
    the conditioning set never contains an endpoint.
    """

    n: int
    independencies: frozenset[tuple[int, int, int]]

    def __post_init__(self) -> None:
        for a, b, zm in self.independencies:
            if not (1 <= a < b <= self.n):
                raise CiError(f"statement ({a}, {b}) is not canonical for n={self.n}")
            if zm & ((1 << (a - 1)) | (1 << (b - 1))) or zm >> self.n:
                raise CiError(f"conditioning set of ({a}, {b}) is out of range")

    def independent(self, a: int, b: int, z: Iterable[int] | int = 0) -> bool:
        zm = z if isinstance(z, int) else mask_of(z)
        if a > b:
            a, b = b, a
        return (a, b, zm) in self.independencies

    def dependent(self, a: int, b: int, z: Iterable[int] | int = 0) -> bool:
        return not self.independent(a, b, z)


def enumerate_ci(g: DirectedGraph, guard: int = ENUMERATION_GUARD) -> CiOracle:
    """All conditional independence statements of g, by exhaustive d-separation.

    Exponential in n by nature; refuses n above the guard.
    """
    if g.n > guard:
        raise GraphError(f"refusing CI enumeration for n={g.n} > {guard}")
    found = set()
    full = (1 << g.n) - 1
    for a, b in combinations(range(1, g.n + 1), 2):
        rest = full & ~((1 << (a - 1)) | (1 << (b - 1)))
        zm = rest
        # iterate all submasks of `rest`, including 0
        while True:
            if not d_connected(g, a, b, zm):
                found.add((a, b, zm))
            if zm == 0:
                break
            zm = (zm - 1) & rest
    return CiOracle(g.n, frozenset(found))


@lru_cache(maxsize=64)
def _cached_ci(g: DirectedGraph, guard: int) -> CiOracle:
    return enumerate_ci(g, guard)


def graph_ci(g: DirectedGraph, guard: int = ENUMERATION_GUARD) -> CiOracle:
    """enumerate_ci with a small cache, for repeated oracle lookups."""
    return _cached_ci(g, guard)


def parse_ci(text: str) -> CiOracle:
    """Parse the CI file format: header ``n=<count>``, then one statement per
    line, ``a _||_ b | {z1,z2,...}`` (the ``| {...}`` part may be ``| {}``).
    """
    n = None
    statements = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise CiError(f"line {lineno}: expected header 'n=<count>', got {line!r}")
            try:
                n = int(line[2:])
            except ValueError:
                raise CiError(f"line {lineno}: bad vertex count in {line!r}") from None
            continue
        if "_||_" not in line or "|" not in line.split("_||_", 1)[1]:
            raise CiError(f"line {lineno}: expected 'a _||_ b | {{...}}', got {line!r}")
        left, rest = line.split("_||_", 1)
        mid, zpart = rest.split("|", 1)
        zpart = zpart.strip()
        if not (zpart.startswith("{") and zpart.endswith("}")):
            raise CiError(f"line {lineno}: conditioning set must be braced, got {zpart!r}")
        inner = zpart[1:-1].strip()
        try:
            a = int(left.strip())
            b = int(mid.strip())
            zs = [int(x) for x in inner.replace(",", " ").split()] if inner else []
        except ValueError:
            raise CiError(f"line {lineno}: vertices must be integers in {line!r}") from None
        if a == b:
            raise CiError(f"line {lineno}: statement endpoints coincide")
        if a > b:
            a, b = b, a
        statements.add((a, b, mask_of(zs)))
    if n is None:
        raise CiError("empty CI file: missing 'n=<count>' header")
    try:
        return CiOracle(n, frozenset(statements))
    except CiError as exc:
        raise CiError(f"invalid CI file: {exc}") from None


def format_ci(ci: CiOracle) -> str:
    lines = [f"n={ci.n}"]
    for a, b, zm in sorted(ci.independencies, key=lambda t: (t[0], t[1], t[2])):
        zs = ",".join(str(v) for v in vertices_of(zm))
        lines.append(f"{a} _||_ {b} | {{{zs}}}")
    return "\n".join(lines) + "\n"

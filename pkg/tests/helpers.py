"""Graph generators shared by the test modules.

Unlike oracles.py this file is allowed to import the library under test; it
only builds inputs, never expected values.
"""

from __future__ import annotations

import random
from typing import Iterator

from cyclemec.graphs import DirectedGraph


def ordered_pairs(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]


def all_graphs(n: int) -> Iterator[DirectedGraph]:
    """Every directed graph on 1..n (no self-loops), 2^(n(n-1)) of them."""
    pairs = ordered_pairs(n)
    for mask in range(1 << len(pairs)):
        yield DirectedGraph.from_edges(
            n, (p for i, p in enumerate(pairs) if mask >> i & 1)
        )


def random_edges(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [pair for pair in ordered_pairs(n) if rng.random() < p]


def random_graph(n: int, p: float, rng: random.Random) -> DirectedGraph:
    return DirectedGraph.from_edges(n, random_edges(n, p, rng))


def random_graphs(
    n: int, p: float, count: int, seed: int | str
) -> list[DirectedGraph]:
    rng = random.Random(f"tests:{seed}")
    return [random_graph(n, p, rng) for _ in range(count)]

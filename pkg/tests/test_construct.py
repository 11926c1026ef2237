from collections import Counter

from cyclemec.builder import SccrInstance, derive_instances_from_graph, parse_instance
from cyclemec.construct import (
    are_incompatible,
    construct_correct,
    is_safe,
    validate_output,
)

from helpers import random_graphs


def sym(pairs):
    return frozenset(p for a, b in pairs for p in ((a, b), (b, a)))


NINE_VERTEX_INSTANCE = """\
n=9
c 1 2 3 4 5 6
a 1 3
a 3 5
a 1 5
a 2 4
a 2 6
a 4 6
a 1 4
a 2 5
b 7 1
b 8 1
b 7 4
b 8 4
b 9 6
b 9 2
comch 7 8
nocomch 7 9
"""


def test_nine_vertex_golden_output():
    # A six-vertex block with two interleaved triangles, three outside
    # sources, one required and one forbidden common child.  Seed 0 settles
    # on this exact edge set; it must satisfy every requirement.
    inst = parse_instance(NINE_VERTEX_INSTANCE)
    got = construct_correct(inst, seed=0)
    assert got == frozenset({
        (1, 3), (3, 5), (5, 3), (1, 5), (4, 1), (5, 2), (2, 4),
        (2, 6), (6, 4), (7, 1), (8, 1), (9, 6),
    })
    assert validate_output(inst, got) == []


def test_nine_vertex_other_seeds_stay_sound():
    inst = parse_instance(NINE_VERTEX_INSTANCE)
    succeeded = 0
    for seed in range(6):
        got = construct_correct(inst, seed=seed)
        if got is not None:
            assert validate_output(inst, got) == []
            succeeded += 1
    assert succeeded >= 3


def test_construct_is_deterministic():
    inst = parse_instance(NINE_VERTEX_INSTANCE)
    assert construct_correct(inst, seed=5) == construct_correct(inst, seed=5)


def test_two_vertex_block_is_a_two_cycle():
    inst = SccrInstance(n=2, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]), b_pairs=frozenset())
    got = construct_correct(inst, seed=0)
    assert got == frozenset({(1, 2), (2, 1)})


def test_empty_singleton_block():
    inst = SccrInstance(n=3, c=frozenset({2}), a_pairs=frozenset(), b_pairs=frozenset())
    got = construct_correct(inst, seed=0)
    assert got == frozenset()
    assert validate_output(inst, got) == []


def test_unsolvable_forbidden_pair_returns_none():
    # Both outside vertices must reach the singleton block, but they are
    # forbidden from sharing a child in it; no edge set can do both.
    inst = SccrInstance(
        n=3, c=frozenset({1}), a_pairs=frozenset(),
        b_pairs=frozenset({(2, 1), (3, 1)}), no_com_ch=frozenset({(2, 3)}),
    )
    for seed in range(20):
        assert construct_correct(inst, seed=seed) is None


def test_required_common_child_is_produced():
    inst = SccrInstance(
        n=3, c=frozenset({1}), a_pairs=frozenset(),
        b_pairs=frozenset({(2, 1), (3, 1)}), com_ch=frozenset({(2, 3)}),
    )
    got = construct_correct(inst, seed=0)
    assert got == frozenset({(2, 1), (3, 1)})
    assert validate_output(inst, got) == []


def test_random_true_decompositions_all_solve():
    total = 0
    for g in random_graphs(6, 0.35, 40, "construct-blocks"):
        for inst in derive_instances_from_graph(g):
            total += 1
            got = None
            for attempt in range(20):
                got = construct_correct(inst, seed=attempt)
                if got is not None:
                    break
            assert got is not None, inst
            assert validate_output(inst, got) == [], inst
    assert total > 50


def test_validate_output_flags_each_requirement():
    inst = SccrInstance(n=2, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]), b_pairs=frozenset())
    assert validate_output(inst, frozenset({(1, 2), (2, 1)})) == []
    # one direction only: adjacency holds but the block is no longer strongly
    # connected
    problems = validate_output(inst, frozenset({(1, 2)}))
    assert any("strongly connected" in p for p in problems)
    # no edges: the adjacency is missing too
    problems = validate_output(inst, frozenset())
    assert any("missing" in p for p in problems)

    outward = SccrInstance(n=3, c=frozenset({1}), a_pairs=frozenset(),
                           b_pairs=frozenset({(2, 1)}))
    problems = validate_output(outward, frozenset({(1, 3)}))
    assert any("does not point into" in p for p in problems)

    nocom = SccrInstance(
        n=3, c=frozenset({1}), a_pairs=frozenset(),
        b_pairs=frozenset({(2, 1), (3, 1)}), no_com_ch=frozenset({(2, 3)}),
    )
    problems = validate_output(nocom, frozenset({(2, 1), (3, 1)}))
    assert any("forbidden common child" in p for p in problems)

    com = SccrInstance(
        n=4, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (4, 2)}), com_ch=frozenset({(3, 4)}),
    )
    problems = validate_output(com, frozenset({(1, 2), (2, 1), (3, 1), (4, 2)}))
    assert any("required common child" in p for p in problems)


def test_extra_adjacency_is_flagged():
    inst = SccrInstance(
        n=4, c=frozenset({1, 2, 3}),
        a_pairs=sym([(1, 2), (2, 3)]), b_pairs=frozenset(),
    )
    # A 3-cycle p-adjoins 1 and 3 through their common child, which the
    # instance does not ask for.
    problems = validate_output(inst, frozenset({(1, 2), (2, 3), (3, 1)}))
    assert any("extra" in p for p in problems)


def test_is_safe_cases():
    inst = SccrInstance(
        n=4, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (4, 1)}), no_com_ch=frozenset({(3, 4)}),
    )
    # adding (4,1) while 3 already parents 1 hits the forbidden pair
    assert not is_safe(inst, (4, 1), {1: Counter({3: 1})})
    # a zero multiplicity means the parent was removed
    assert is_safe(inst, (4, 1), {1: Counter({3: 0})})
    # the edge's own source never blocks itself
    assert is_safe(inst, (3, 1), {1: Counter({3: 2})})
    # an in-block source must be linked to every live co-parent
    assert not is_safe(inst, (2, 1), {1: Counter({3: 1})})
    linked = SccrInstance(
        n=4, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (3, 2)}),
    )
    assert is_safe(linked, (2, 1), {1: Counter({3: 1})})
    assert is_safe(inst, (3, 1), {})


def test_are_incompatible_cases():
    inst = SccrInstance(
        n=4, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (4, 1)}), no_com_ch=frozenset({(3, 4)}),
    )
    assert are_incompatible(inst, (3, 1), (4, 1))
    assert not are_incompatible(inst, (3, 1), (3, 2))
    # in-block sources conflict exactly when unlinked
    assert are_incompatible(inst, (2, 1), (3, 1))
    assert not are_incompatible(inst, (2, 1), (1, 2))
    relaxed = SccrInstance(
        n=4, c=frozenset({1, 2}), a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (4, 1)}),
    )
    assert not are_incompatible(relaxed, (3, 1), (4, 1))

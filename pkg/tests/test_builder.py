import pytest

from cyclemec.builder import (
    InstanceError,
    SccrInstance,
    build_graph,
    check_partition_feasible,
    derive_instances,
    derive_instances_from_graph,
    format_instance,
    linear_extension,
    parse_instance,
)
from cyclemec.dsep import graph_ci
from cyclemec.graphs import DirectedGraph
from cyclemec.mec import ci_equivalent
from cyclemec.partitions import OrderedPartition
from cyclemec.search import SearchConfig, greedy_discover

from helpers import random_graphs


def sym(pairs):
    return frozenset(p for a, b in pairs for p in ((a, b), (b, a)))


def test_instance_validation():
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset(), a_pairs=frozenset(), b_pairs=frozenset())
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset({4}), a_pairs=frozenset(), b_pairs=frozenset())
    # internal pairs must be mirrored and stay inside the block
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset({1, 2}), a_pairs=frozenset({(1, 2)}), b_pairs=frozenset())
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset({1, 2}), a_pairs=sym([(1, 3)]), b_pairs=frozenset())
    # incoming pairs run from outside into the block
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset({1, 2}), a_pairs=frozenset(), b_pairs=frozenset({(1, 2)}))
    with pytest.raises(InstanceError):
        SccrInstance(n=3, c=frozenset({1, 2}), a_pairs=frozenset(), b_pairs=frozenset({(3, 3)}))
    # common-child constraints are canonical outside pairs
    with pytest.raises(InstanceError):
        SccrInstance(n=4, c=frozenset({1}), a_pairs=frozenset(), b_pairs=frozenset(),
                     com_ch=frozenset({(3, 2)}))
    with pytest.raises(InstanceError):
        SccrInstance(n=4, c=frozenset({1, 2}), a_pairs=frozenset(), b_pairs=frozenset(),
                     no_com_ch=frozenset({(2, 3)}))
    with pytest.raises(InstanceError):
        SccrInstance(n=4, c=frozenset({1}), a_pairs=frozenset(), b_pairs=frozenset(),
                     com_ch=frozenset({(2, 3)}), no_com_ch=frozenset({(2, 3)}))


def test_instance_round_trip():
    inst = SccrInstance(
        n=6,
        c=frozenset({1, 2}),
        a_pairs=sym([(1, 2)]),
        b_pairs=frozenset({(3, 1), (4, 1), (3, 2)}),
        com_ch=frozenset({(3, 4)}),
        no_com_ch=frozenset({(3, 5)}),
    )
    assert parse_instance(format_instance(inst)) == inst


def test_parse_instance_hand_file():
    inst = parse_instance(
        "# block recovery\nn=4\nc 1 2\na 1 2\nb 3 1\ncomch 4 3\n"
    )
    assert inst.c == frozenset({1, 2})
    assert inst.a_pairs == sym([(1, 2)])
    assert inst.b_pairs == frozenset({(3, 1)})
    assert inst.com_ch == frozenset({(3, 4)})


def test_parse_instance_errors():
    with pytest.raises(InstanceError):
        parse_instance("c 1 2\n")
    with pytest.raises(InstanceError):
        parse_instance("n=4\nc 1 2\na 1\n")
    with pytest.raises(InstanceError):
        parse_instance("n=4\nc 1 2\nq 1 2\n")
    with pytest.raises(InstanceError):
        parse_instance("n=4\nc 1 2\na 1 x\n")


def test_eight_vertex_decomposition_golden():
    # Four components: a 2-cycle pair, two isolated sources, and a terminal
    # 4-cycle with a chord; every inflow lands on vertex 4 or vertex 1.
    g = DirectedGraph.from_edges(8, [
        (5, 6), (6, 5), (5, 4), (6, 4), (7, 1), (8, 1),
        (1, 4), (2, 1), (2, 4), (3, 2), (4, 3),
    ])
    instances = derive_instances(graph_ci(g), g.induced_partition())

    by_block = {inst.c: inst for inst in instances}
    assert set(by_block) == {
        frozenset({5, 6}), frozenset({7}), frozenset({8}), frozenset({1, 2, 3, 4}),
    }

    pair = by_block[frozenset({5, 6})]
    assert pair.a_pairs == sym([(5, 6)])
    assert pair.b_pairs == frozenset()
    assert pair.com_ch == frozenset() and pair.no_com_ch == frozenset()

    for v in (7, 8):
        single = by_block[frozenset({v})]
        assert single.a_pairs == frozenset() and single.b_pairs == frozenset()

    big = by_block[frozenset({1, 2, 3, 4})]
    assert big.a_pairs == sym([(1, 2), (2, 3), (3, 4), (1, 4), (2, 4)])
    assert big.b_pairs == frozenset({
        (5, 1), (5, 2), (5, 4), (6, 1), (6, 2), (6, 4),
        (7, 1), (7, 2), (8, 1), (8, 2),
    })
    assert big.com_ch == frozenset({(7, 8)})
    assert big.no_com_ch == frozenset({(5, 7), (5, 8), (6, 7), (6, 8)})

    # The graph-side derivation must agree with the oracle-side one.
    assert set(derive_instances_from_graph(g)) == set(instances)


def test_derivations_agree(rng):
    for g in random_graphs(6, 0.3, 25, "derive-agree"):
        oracle_side = derive_instances(graph_ci(g), g.induced_partition())
        assert set(oracle_side) == set(derive_instances_from_graph(g))


def test_first_instance_has_no_inflow(rng):
    for g in random_graphs(5, 0.4, 10, "first-block"):
        instances = derive_instances(graph_ci(g), g.induced_partition())
        assert instances[0].b_pairs == frozenset()


def test_true_partition_is_feasible(rng):
    for g in random_graphs(5, 0.4, 30, "feasible"):
        ok, reason = check_partition_feasible(graph_ci(g), g.induced_partition())
        assert ok, reason


def test_incomparable_linked_blocks_are_infeasible():
    g = DirectedGraph.from_edges(2, [(1, 2)])
    p = OrderedPartition.from_blocks([{1}, {2}])
    ok, reason = check_partition_feasible(graph_ci(g), p)
    assert not ok
    assert "incomparable" in reason


def test_consecutive_blocks_need_a_cross_link():
    g = DirectedGraph.from_edges(2, [])
    p = OrderedPartition.from_blocks([{1}, {2}], [(0, 1)])
    ok, reason = check_partition_feasible(graph_ci(g), p)
    assert not ok
    assert "consecutive" in reason


def test_linear_extension_orders():
    chain = OrderedPartition.from_blocks([{1}, {2}, {3}], [(0, 1), (1, 2)])
    assert linear_extension(chain) == [0, 1, 2]
    antichain = OrderedPartition.from_blocks([{1}, {2}, {3}])
    assert linear_extension(antichain) == [0, 1, 2]
    vee = OrderedPartition.from_blocks([{1}, {2}, {3}], [(2, 0), (2, 1)])
    assert linear_extension(vee) == [2, 0, 1]


def test_build_recovers_equivalent_graph_cc():
    hits = 0
    for g in random_graphs(5, 0.35, 20, "builder-e2e"):
        ci = graph_ci(g)
        result = greedy_discover(ci, SearchConfig(seed=0))
        out = build_graph(ci, result, solver="cc", seed=0)
        if out.graph is not None:
            assert ci_equivalent(out.graph, g)
            assert out.partition is not None
            assert out.graph.induced_partition().key() == out.partition.key()
            hits += 1
    assert hits >= 17


def test_build_recovers_equivalent_graph_flow():
    hits = 0
    for g in random_graphs(5, 0.35, 20, "builder-e2e"):
        ci = graph_ci(g)
        result = greedy_discover(ci, SearchConfig(seed=0))
        out = build_graph(ci, result, solver="flow", seed=0)
        if out.graph is not None:
            assert ci_equivalent(out.graph, g)
            hits += 1
    assert hits >= 15


def test_build_respects_partition_budget(rng):
    g = random_graphs(4, 0.4, 1, "budget")[0]
    ci = graph_ci(g)
    result = greedy_discover(ci, SearchConfig(seed=0))
    out = build_graph(ci, result, max_partitions=0, seed=0)
    assert out.graph is None
    assert out.partitions_tried == 0

import json

import pytest

from cyclemec.builder import parse_instance
from cyclemec.cli import main
from cyclemec.construct import validate_output
from cyclemec.dsep import enumerate_ci, format_ci, graph_ci, parse_ci
from cyclemec.experiments import read_summary_json, read_trials_csv
from cyclemec.graphs import DirectedGraph, format_graph, parse_graph
from cyclemec.mec import ci_equivalent
from cyclemec.partitions import parse_partition
from cyclemec.scoring import score_vector
from cyclemec.search import SearchConfig, greedy_discover

from test_construct import NINE_VERTEX_INSTANCE

CHAIN = DirectedGraph.from_edges(3, [(1, 2), (2, 3)])


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_dsep_enumerate(tmp_path, capsys):
    path = _write(tmp_path / "g.txt", "n=3\n1 2\n2 3\n")
    assert main(["dsep", "enumerate", path]) == 0
    out = capsys.readouterr().out
    assert out == format_ci(enumerate_ci(CHAIN))
    assert parse_ci(out).n == 3


def test_mec_compare_equivalent(tmp_path, capsys):
    two_cycles = DirectedGraph.from_edges(3, [(1, 2), (2, 1), (2, 3), (3, 2)])
    dag = DirectedGraph.from_edges(3, [(1, 2), (1, 3), (2, 3)])
    first = _write(tmp_path / "a.txt", format_graph(two_cycles))
    second = _write(tmp_path / "b.txt", format_graph(dag))
    assert main(["mec", "compare", first, second]) == 0
    assert capsys.readouterr().out == "equivalent\n"


def test_mec_compare_not_equivalent(tmp_path, capsys):
    g1 = DirectedGraph.from_edges(4, [(1, 2), (3, 2), (2, 4), (4, 3)])
    g2 = DirectedGraph.from_edges(4, [(1, 2), (3, 2), (2, 4), (3, 4)])
    first = _write(tmp_path / "a.txt", format_graph(g1))
    second = _write(tmp_path / "b.txt", format_graph(g2))
    assert main(["mec", "compare", first, second]) == 1
    out = capsys.readouterr().out
    assert "not equivalent:" in out
    assert "differ" in out


def test_mec_compare_size_mismatch(tmp_path, capsys):
    first = _write(tmp_path / "a.txt", "n=2\n1 2\n")
    second = _write(tmp_path / "b.txt", "n=3\n1 2\n")
    assert main(["mec", "compare", first, second]) == 1
    assert "vertex counts differ" in capsys.readouterr().out


def test_score_matches_library(tmp_path, capsys):
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(CHAIN)))
    partition_text = "block 1\nblock 2\nblock 3\norder 1 2\norder 2 3\norder 1 3\n"
    p_path = _write(tmp_path / "p.txt", partition_text)
    assert main(["score", ci_path, p_path]) == 0
    out = capsys.readouterr().out.strip()
    want = score_vector(graph_ci(CHAIN), parse_partition(partition_text))
    assert out == " ".join(str(x) for x in want)


def test_score_universe_mismatch(tmp_path, capsys):
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(CHAIN)))
    p_path = _write(tmp_path / "p.txt", "block 1\nblock 2\n")
    assert main(["score", ci_path, p_path]) == 2
    assert "error:" in capsys.readouterr().err


def test_discover_mec_deterministic(tmp_path, capsys):
    ci = graph_ci(CHAIN)
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(CHAIN)))
    assert main(["discover-mec", ci_path, "--seed", "5"]) == 0
    first = capsys.readouterr()
    assert "score:" in first.err
    assert main(["discover-mec", ci_path, "--seed", "5"]) == 0
    assert capsys.readouterr().out == first.out

    got = parse_partition(first.out)
    want = greedy_discover(ci, SearchConfig(restarts=3, seed=5))
    assert score_vector(ci, got) == want.best_score


def test_discover_mec_samples_seed(tmp_path, capsys):
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(CHAIN)))
    assert main(["discover-mec", ci_path]) == 0
    assert "seed: " in capsys.readouterr().err


def test_discover_graph_round_trip(tmp_path, capsys):
    g = DirectedGraph.from_edges(4, [(1, 2), (2, 3), (3, 2), (2, 4)])
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(g)))
    assert main(["discover-graph", ci_path, "--seed", "0"]) == 0
    captured = capsys.readouterr()
    assert "partitions tried:" in captured.err
    found = parse_graph(captured.out)
    assert ci_equivalent(found, g)


def test_discover_graph_zero_budget(tmp_path, capsys):
    ci_path = _write(tmp_path / "ci.txt", format_ci(enumerate_ci(CHAIN)))
    assert main(["discover-graph", ci_path, "--seed", "0", "--max-partitions", "0"]) == 1
    assert "no graph found" in capsys.readouterr().err


def test_sccr_solvers(tmp_path, capsys):
    inst = parse_instance(NINE_VERTEX_INSTANCE)
    path = _write(tmp_path / "inst.txt", NINE_VERTEX_INSTANCE)

    assert main(["sccr", "cc", path, "--seed", "0"]) == 0
    first = capsys.readouterr().out
    edges = {tuple(int(x) for x in line.split()) for line in first.splitlines()}
    assert validate_output(inst, frozenset(edges)) == []

    assert main(["sccr", "cc", path, "--seed", "0"]) == 0
    assert capsys.readouterr().out == first

    assert main(["sccr", "flow", path]) == 0
    flow_out = capsys.readouterr().out
    flow_edges = {tuple(int(x) for x in line.split()) for line in flow_out.splitlines()}
    assert validate_output(inst, frozenset(flow_edges)) == []
    assert not any((b, a) in flow_edges for (a, b) in flow_edges)


def test_sccr_unsolvable(tmp_path, capsys):
    text = "n=3\nc 1\nb 2 1\nb 3 1\nnocomch 2 3\n"
    path = _write(tmp_path / "inst.txt", text)
    assert main(["sccr", "cc", path, "--seed", "0"]) == 1
    assert "no recovery found" in capsys.readouterr().err
    assert main(["sccr", "flow", path]) == 1
    assert "no recovery found" in capsys.readouterr().err


def test_sccr_flow_size_limit(tmp_path, capsys):
    lines = ["n=16", "c 1"] + [f"b {o} 1" for o in range(2, 17)]
    path = _write(tmp_path / "inst.txt", "\n".join(lines) + "\n")
    assert main(["sccr", "flow", path]) == 2
    assert "error:" in capsys.readouterr().err


def test_parse_failures_exit_two(tmp_path, capsys):
    bad_graph = _write(tmp_path / "bad.txt", "n=2\n1 5\n")
    assert main(["dsep", "enumerate", bad_graph]) == 2
    assert "error:" in capsys.readouterr().err

    missing = str(tmp_path / "nope.txt")
    assert main(["dsep", "enumerate", missing]) == 2
    assert "error:" in capsys.readouterr().err

    ci_path = _write(tmp_path / "ci.txt", "n=3\n1 _||_ 1 | {}\n")
    assert main(["discover-mec", ci_path, "--seed", "0"]) == 2
    assert "error:" in capsys.readouterr().err


def test_simulate_writes_reports(tmp_path, capsys):
    csv_path = str(tmp_path / "trials.csv")
    json_path = str(tmp_path / "summary.json")
    code = main([
        "simulate", "--kind", "mec", "--n", "3", "--p", "0.5",
        "--graphs", "2", "--seed", "7", "--csv", csv_path, "--json", json_path,
    ])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["kind"] == "mec"
    assert 0 <= summary["rate"] <= 1
    assert read_summary_json(json_path) == [summary]
    rows = read_trials_csv(csv_path)
    assert len(rows) == 2
    assert all(row["kind"] == "mec" for row in rows)


def test_simulate_rejects_bad_spec(capsys):
    assert main(["simulate", "--kind", "mec", "--n", "0", "--p", "0.5",
                 "--graphs", "2", "--seed", "7"]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit):
        main([])

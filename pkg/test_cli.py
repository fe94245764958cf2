#!/usr/bin/env python3
"""
Tests for the antisort command line
"""

import pytest

from cli import RunConfig, build_parser, main
from instance_file import EXAMPLE_TWO

CHORDAL = "graph chordal\nalphabet a b c d\na b\nb c\na c\nc d\n"
WEIGHTED = "weighted-digraph\nalphabet s t u\nroot s\ns t 1/2\nt u 1/4\ns u 2\n"
CYCLIC = "ercs\nalphabet a b c\nb | c\nc | b\n"


@pytest.fixture
def example_path(write_file):
    return str(write_file("example.txt", EXAMPLE_TWO))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines()


def test_enumerate(capsys, example_path):
    code, lines = run(capsys, "enumerate", example_path)
    assert code == 0
    assert lines == ["abc", "acb", "bac", "bca"]


def test_sort_with_explicit_order(capsys, example_path):
    code, lines = run(capsys, "sort", example_path, "--order", "bca")
    assert code == 0
    assert "mode=plain" in lines
    assert "output=bca" in lines
    assert "itb_bits=2.000000" in lines
    assert "correct=true" in lines


def test_sort_optimal_mode(capsys, example_path):
    code, lines = run(capsys, "sort", example_path, "--mode", "optimal", "--order", "acb")
    assert code == 0
    assert "mode=optimal" in lines
    assert "output=acb" in lines


def test_sort_transcript(capsys, example_path):
    code, lines = run(capsys, "sort", example_path, "--order", "bca", "--transcript")
    assert code == 0
    assert [line for line in lines if line.startswith("Q")] == ["Q0={a, b}", "Q1={a, c}", "Q2={a}", "Q3={}"]
    assert "transcript=ok" in lines


def test_sort_validated(capsys, example_path):
    code, lines = run(capsys, "sort", example_path, "--order", "abc", "--validate")
    assert code == 0
    assert "validate_cds=ok" in lines
    assert "answers_consistent=true" in lines


def test_sort_order_file(capsys, example_path, write_file):
    order = str(write_file("order.txt", "bac\n"))
    code, lines = run(capsys, "sort", example_path, "--order-file", order)
    assert code == 0
    assert "output=bac" in lines


def test_order_outside_the_language_fails(capsys, example_path):
    code, lines = run(capsys, "sort", example_path, "--order", "cab")
    assert code == 1
    assert "correct=false" in lines


def test_sampled_orders_are_deterministic(capsys, example_path):
    first = run(capsys, "sort", example_path, "--seed", "7")
    second = run(capsys, "sort", example_path, "--seed", "7")
    assert first == second
    assert first[0] == 0


def test_out_file(capsys, example_path, tmp_path):
    target = tmp_path / "result.txt"
    code, lines = run(capsys, "enumerate", example_path, "--out", str(target))
    assert code == 0
    assert lines == []
    assert target.read_text(encoding="utf-8") == "abc\nacb\nbac\nbca\n"


def test_check_example(capsys, example_path):
    code, lines = run(capsys, "check", example_path)
    assert code == 0
    for name in ("antimatroid_axioms", "validate_cds", "full", "layer_bound", "bottleneck_bound", "bottleneck_order"):
        assert f"{name}=ok" in lines


def test_check_chordal(capsys, write_file):
    code, lines = run(capsys, "check", str(write_file("chordal.txt", CHORDAL)))
    assert code == 0
    assert "peo_count=ok" in lines


def test_check_reports_a_stuck_instance(capsys, write_file):
    code, lines = run(capsys, "check", str(write_file("cyclic.txt", CYCLIC)))
    assert code == 1
    assert "full=fail" in lines


def test_layers(capsys, example_path):
    code, lines = run(capsys, "layers", example_path)
    assert code == 0
    assert lines == ["L1={a, b}", "L2={c}", "k=2", "bottlenecks=c", "t=1"]


def test_stall_exits_with_failure(capsys, write_file):
    code = main(["sort", str(write_file("cyclic.txt", CYCLIC)), "--order", "abc"])
    assert code == 1
    # only a is ever available; the prefix is reported by name
    assert "stuck after: a" in capsys.readouterr().err


def test_dijkstra_on_a_file(capsys, write_file):
    code, lines = run(capsys, "dijkstra", str(write_file("weighted.txt", WEIGHTED)))
    assert code == 0
    assert "order=stu" in lines
    assert "dist.u=3/4" in lines
    assert "transcripts=ok" in lines
    assert "search_orders=ok" in lines


def test_dijkstra_suite(capsys):
    code, lines = run(capsys, "dijkstra", "--trials", "3", "--seed", "5")
    assert code == 0
    assert lines == ["search_orders=ok", "transcripts=ok"]


def test_dijkstra_rejects_other_kinds(capsys, example_path):
    code, _ = run(capsys, "dijkstra", example_path)
    assert code == 2


def test_bench_quick_heap_suite(capsys):
    code, lines = run(capsys, "bench", "--suite", "heap", "--quick")
    assert code == 0
    assert lines[0] == "suite,instance,n,itb_bits,comparisons,bound,constant"
    assert all(line.startswith("heap,") for line in lines[1:])


@pytest.mark.parametrize("argv", [
    ["enumerate", "missing-instance.txt"],
    ["--bf-limit", "2", "enumerate", "EXAMPLE"],
    ["sort", "EXAMPLE", "--order", "bcx"],
])
def test_input_errors_exit_2(capsys, example_path, argv):
    argv = [example_path if arg == "EXAMPLE" else arg for arg in argv]
    code, _ = run(capsys, *argv)
    assert code == 2


def test_parse_errors_exit_2(capsys, write_file):
    code = main(["enumerate", str(write_file("bad.txt", "ercs\nalphabet a b\na | z\n"))])
    assert code == 2
    assert "line 3" in capsys.readouterr().err


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["sort"])
    assert info.value.code == 2


def test_run_config_from_args():
    args = build_parser().parse_args(["--bf-limit", "6", "sort", "x.txt", "--mode", "optimal", "--validate"])
    config = RunConfig.from_args(args)
    assert config.mode == "optimal"
    assert config.validate_cds
    assert config.bf_limit == 6
    assert RunConfig.from_args(build_parser().parse_args(["layers", "x.txt"])).bf_limit == 10


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

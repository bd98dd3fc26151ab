from __future__ import annotations

import json

import pytest

from urmatch import generators as gen
from urmatch.cli import main
from urmatch.graph import parse_graph, write_graph


@pytest.fixture
def files(tmp_path):
    def write(name: str, text: str) -> str:
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


@pytest.fixture
def c4(files):
    return files("c4.txt", "p 4 4\n0 1\n1 2\n2 3\n3 0\n")


def graph_file(files, name, g) -> str:
    return files(name, write_graph(g))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_c4_perfect_matching(capsys, c4, files):
    m = files("m2.txt", "0 1\n2 3\n")
    code, out, _ = run(capsys, "verify", "-g", c4, "-m", m)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "not uniquely restricted"
    assert lines[1].startswith("witness:")
    assert sorted(map(int, lines[1].split()[1:])) == [0, 1, 2, 3]


def test_verify_single_edge_json(capsys, c4, files):
    m = files("m1.txt", "0 1\n")
    code, out, _ = run(capsys, "verify", "--json", "-g", c4, "-m", m)
    assert code == 0
    assert json.loads(out) == {"uniquely_restricted": True, "witness": None}


def test_verify_non_matching_exits_1(capsys, c4, files):
    m = files("bad.txt", "0 1\n1 2\n")
    assert run(capsys, "verify", "-g", c4, "-m", m)[0] == 1


def test_exact_chi_ur_k33(capsys, files):
    k33 = graph_file(files, "k33.txt", gen.complete_bipartite(3, 3))
    code, out, _ = run(capsys, "exact", "chi-ur", "-g", k33)
    assert code == 0
    assert out.splitlines()[0] == "value: 9"


@pytest.mark.parametrize("quantity,value", [("nu", 2), ("nu-ur", 1), ("nu-s", 1)])
def test_exact_values_on_c4(capsys, c4, quantity, value):
    code, out, _ = run(capsys, "exact", quantity, "-g", c4, "--json")
    assert code == 0
    assert json.loads(out)["value"] == value


def test_exact_min_partition_fig1_diagonal(capsys, files):
    g = graph_file(files, "fig1.txt", gen.fig1())
    m = files("diag.txt", "".join(f"{i} {i + 5}\n" for i in range(5)))
    code, out, _ = run(capsys, "exact", "min-partition", "-g", g, "-m", m)
    assert code == 0
    assert out.splitlines()[0] == "value: 3"


def test_exact_min_partition_needs_matching(capsys, c4):
    assert run(capsys, "exact", "min-partition", "-g", c4)[0] == 2


def test_approx_subcubic_fig1(capsys, files):
    g = graph_file(files, "fig1.txt", gen.fig1())
    code, out, _ = run(capsys, "approx", "subcubic", "-g", g, "--json")
    assert code == 0
    data = json.loads(out)
    assert data["guarantee"] == "5/9"
    assert data["size"] == len(data["matching"])
    assert data["ratio"] == data["size"] / data["oracle"]


def test_approx_subcubic_trace(capsys, files):
    g = graph_file(files, "c6.txt", gen.cycle(6))
    code, out, _ = run(capsys, "approx", "subcubic", "-g", g, "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "size: 2"
    assert "oracle: 2" in lines and "ratio: 1.0000" in lines
    assert any(line.startswith("trace:") for line in lines)


def test_approx_c4free_rejects_c4(capsys, c4):
    code, _, err = run(capsys, "approx", "c4free", "-g", c4)
    assert code == 1
    assert "ContainsC4Error" in err


def test_approx_subcubic_rejects_degree_four(capsys, files):
    g = graph_file(files, "k44.txt", gen.complete_bipartite(4, 4))
    assert run(capsys, "approx", "subcubic", "-g", g, "--no-oracle")[0] == 1


def test_color_greedy_p4(capsys, files):
    g = graph_file(files, "p4.txt", gen.path(4))
    code, out, _ = run(capsys, "color", "greedy", "-g", g)
    assert code == 0
    assert out.splitlines() == ["0 1 1", "1 2 2", "2 3 3", "colors: 3"]


def test_color_improve_k22_exits_1(capsys, c4):
    code, _, err = run(capsys, "color", "improve", "-g", c4)
    assert code == 1
    assert "ImprovementError" in err


def test_color_improve_opportunistic(capsys, files):
    g = graph_file(files, "p4.txt", gen.path(4))
    code, out, _ = run(capsys, "color", "improve", "-g", g, "--opportunistic", "--json")
    assert code == 0
    assert json.loads(out)["colors"] == 2


def test_color_partition_fig1_precondition(capsys, files):
    g = graph_file(files, "fig1.txt", gen.fig1())
    m = files("diag.txt", "".join(f"{i} {i + 5}\n" for i in range(5)))
    assert run(capsys, "color", "partition", "-g", g, "-m", m)[0] == 1


def test_color_delta2md(capsys, files):
    g = graph_file(files, "r.txt", gen.random_bipartite(8, 8, 4, 3, connected=True))
    code, out, _ = run(capsys, "color", "delta2md", "-g", g, "--json")
    assert code == 0
    assert json.loads(out)["colors"] <= 12


def test_gen_roundtrip(capsys, tmp_path):
    path = tmp_path / "g.txt"
    code, _, _ = run(capsys, "gen", "random_subcubic_bipartite", "--n", "20", "--seed", "5", "-o", str(path))
    assert code == 0
    g = parse_graph(path.read_text())
    assert g == gen.random_subcubic_bipartite(20, 5)


def test_gen_missing_parameter_is_usage_error(capsys):
    assert run(capsys, "gen", "random_bipartite")[0] == 2


def test_bench_json_lines(capsys):
    code, out, _ = run(
        capsys, "bench", "--model", "random_subcubic_bipartite", "--algorithms", "subcubic,greedy",
        "--count", "3", "--n-min", "6", "--n-max", "10", "--connected", "--seed", "1",
    )
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 7
    assert "summary" in lines[-1]
    assert lines[-1]["summary"]["instances"] == 3


def test_bench_unknown_algorithm(capsys):
    assert run(capsys, "bench", "--model", "fig1", "--algorithms", "magic")[0] == 2


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_no_command(capsys):
    assert run(capsys)[0] == 2


def test_missing_file(capsys):
    assert run(capsys, "exact", "nu", "-g", "/nonexistent/graph.txt")[0] == 2


def test_malformed_graph(capsys, files):
    g = files("dup.txt", "0 1\n0 1\n")
    assert run(capsys, "exact", "nu", "-g", g)[0] == 2

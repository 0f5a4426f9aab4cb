from pathlib import Path

import numpy as np
import pytest

import graphsampling.cli as cli
from graphsampling.cli import (
    EXIT_INVALID,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    main,
    output_paths,
)
from graphsampling.errors import ConvergenceError
from graphsampling.plotting import table_series


def _rows(path: Path) -> list[list[str]]:
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    return [line.split(",") for line in lines[1:]]


def _comments(path: Path) -> list[str]:
    return [line[2:] for line in path.read_text().splitlines() if line.startswith("# ")]


def test_decompose(tmp_path):
    out = tmp_path / "eigenvalues.csv"
    assert main(["decompose", "--set", "graph=path(3)", "-o", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.startswith("# graphsampling decompose ")
    assert "seed=0" in text.splitlines()[0]
    assert text.splitlines()[2] == "index,eigenvalue"
    rows = _rows(out)
    assert [int(r[0]) for r in rows] == [1, 2, 3]
    assert np.allclose([float(r[1]) for r in rows], [0.0, 1.0, 3.0], atol=1e-10)

    bundled = tmp_path / "bundled.csv"
    argv = ["decompose", "--set", "graph=file:graphs/path3.txt", "-o", str(bundled)]
    assert main(argv) == EXIT_OK
    assert _rows(bundled) == rows


def test_generated_graphs_can_be_read_back(tmp_path):
    edges = tmp_path / "graph.txt"
    graph = ["--set", "graph=er(15, 0.3)", "--seed", "4"]
    assert main(["gen-graph", *graph, "-o", str(edges)]) == EXIT_OK

    generated = tmp_path / "generated.csv"
    loaded = tmp_path / "loaded.csv"
    assert main(["decompose", *graph, "-o", str(generated)]) == EXIT_OK
    assert main(["decompose", "--set", f"graph=file:{edges}", "-o", str(loaded)]) == EXIT_OK
    assert _rows(generated) == _rows(loaded)


def test_select(tmp_path):
    out = tmp_path / "selection.csv"
    overrides = [
        "--set",
        "graph=er(20, 0.3)",
        "--set",
        "frequencies=lowest(4)",
        "--set",
        "samples=6",
    ]
    assert main(["select", *overrides, "-o", str(out)]) == EXIT_OK
    rows = _rows(out)
    assert [int(r[0]) for r in rows] == list(range(1, 7))
    assert len({int(r[1]) for r in rows}) == 6
    assert any(c.startswith("recovery condition: ok=True") for c in _comments(out))

    assert main(["select", *overrides, "--set", "method=relaxed", "-o", str(out)]) == EXIT_OK
    assert len(_rows(tmp_path / "selection_selection.csv")) == 6
    weights = [float(r[1]) for r in _rows(tmp_path / "selection_weights.csv")]
    assert len(weights) == 20
    assert sum(weights) == pytest.approx(6.0, abs=1e-6)


def test_recover_noiseless(tmp_path):
    out = tmp_path / "signal.csv"
    argv = [
        "recover",
        "--set",
        "graph=er(20, 0.3)",
        "--set",
        "frequencies=lowest(4)",
        "--set",
        "samples=8",
        "--set",
        "noise=0",
        "--set",
        "reconstruction=consistent",
        "-o",
        str(out),
    ]
    assert main(argv) == EXIT_OK
    assert len(_rows(out)) == 20
    error = [c for c in _comments(out) if c.startswith("nmse: ")]
    assert float(error[0][6:]) <= 1e-16
    assert "converged: True" in _comments(out)


def test_recover_from_signal_file(tmp_path):
    signal = tmp_path / "x.csv"
    signal.write_text("vertex,value\n" + "".join(f"{i},1.0\n" for i in range(1, 11)))
    out = tmp_path / "signal.csv"
    argv = [
        "recover",
        "--set",
        "graph=cycle(10)",
        "--set",
        "frequencies=lowest(1)",
        "--set",
        f"signal={signal}",
        "--set",
        "reconstruction=l1",
        "--set",
        "corruption=2",
        "-o",
        str(out),
    ]
    assert main(argv) == EXIT_OK
    assert np.allclose([float(r[1]) for r in _rows(out)], 1.0, atol=1e-8)


def test_outputs_are_reproducible(tmp_path):
    argv = [
        "mse-curve",
        "--set",
        "graph=er(20, 0.3)",
        "--set",
        "frequencies=lowest(4)",
        "--set",
        "samples=4..6",
        "--set",
        "trials=5",
        "--seed",
        "3",
    ]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*argv, "-o", str(first), "--svg", str(tmp_path / "a.svg")]) == EXIT_OK
    assert main([*argv, "-o", str(second), "--svg", str(tmp_path / "b.svg")]) == EXIT_OK
    serial = tmp_path / "c.csv"
    assert main([*argv, "--set", "workers=1", "-o", str(serial)]) == EXIT_OK
    for name in ("mse_A", "mse_E", "mse_D", "mse_random"):
        a = tmp_path / f"a_{name}.csv"
        b = tmp_path / f"b_{name}.csv"
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() == (tmp_path / f"c_{name}.csv").read_bytes()
        assert [int(r[0]) for r in _rows(a)] == [4, 5, 6]
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert b"<svg" in (tmp_path / "a.svg").read_bytes()


def test_bandwidth_sweep(tmp_path):
    out = tmp_path / "bandwidth.csv"
    argv = [
        "mse-curve",
        "--set",
        "sweep=bandwidth",
        "--set",
        "graph=er(16, 0.3)",
        "--set",
        "bandwidths=2,3",
        "--set",
        "trials=3",
        "--set",
        "mismatch=0",
        "-o",
        str(out),
    ]
    assert main(argv) == EXIT_OK
    for kind in ("A", "E", "D"):
        rows = _rows(tmp_path / f"bandwidth_nmse_{kind}.csv")
        assert [int(r[0]) for r in rows] == [2, 3]


def test_l1_sweep(tmp_path):
    out = tmp_path / "l1.csv"
    argv = [
        "l1-sweep",
        "--set",
        "graph=cycle(20)",
        "--set",
        "bandwidths=1,3",
        "--set",
        "corruption=0,1",
        "--set",
        "trials=3",
        "-o",
        str(out),
    ]
    assert main(argv) == EXIT_OK
    for k in (1, 3):
        rows = _rows(tmp_path / f"l1_l1_F{k}.csv")
        assert [int(r[0]) for r in rows] == [0, 1]
        assert all(float(r[1]) <= 1e-10 for r in rows)


def test_adaptive_commands(tmp_path):
    lms = tmp_path / "lms.csv"
    common = ["--set", "graph=er(15, 0.3)", "--set", "frequencies=lowest(3)"]
    argv = ["lms-run", *common, "--set", "iterations=50", "--set", "replicas=2"]
    assert main([*argv, "-o", str(lms)]) == EXIT_OK
    rows = _rows(lms)
    assert [int(r[0]) for r in rows] == list(range(51))
    assert any(c.startswith("theoretical mse: ") for c in _comments(lms))

    design = tmp_path / "design.csv"
    assert main(["design-p", *common, "-o", str(design)]) == EXIT_OK
    probabilities = [float(r[1]) for r in _rows(design)]
    assert len(probabilities) == 15
    assert all(0.0 <= p <= 1.0 for p in probabilities)

    diffusion = tmp_path / "diffusion.csv"
    argv = [
        "diffuse-run",
        *common,
        "--set",
        "iterations=20",
        "--set",
        "comm_graph=cycle(15)",
    ]
    assert main([*argv, "-o", str(diffusion)]) == EXIT_OK
    rows = _rows(diffusion)
    assert len(rows) == 21 * 15 + 1
    assert rows[-1][:2] == ["steady", "network"]


def test_standard_output(capsys):
    assert main(["gen-graph", "--set", "graph=path(3)"]) == EXIT_OK
    captured = capsys.readouterr().out
    assert captured.splitlines()[1:] == ["# vertices: 3", "# i,j,weight", "1,2,1.0", "2,3,1.0"]


def test_exit_codes(tmp_path, monkeypatch, capsys):
    assert main(["sample"]) == EXIT_INVALID
    assert main(["decompose", "--set", "colour=red"]) == EXIT_INVALID
    assert main(["decompose", "--config", str(tmp_path / "missing.cfg")]) == EXIT_INVALID
    small = ["--set", "graph=path(4)", "--set", "frequencies=lowest(2)"]
    assert main(["select", *small, "--set", "samples=5"]) == EXIT_INVALID
    assert main(["design-p", *small, "--set", "alpha_bar=0.01"]) == EXIT_INVALID
    assert "graphsampling: " in capsys.readouterr().err

    def diverge(config):
        raise ConvergenceError("Jacobi sweeps exhausted", 1e-3)

    monkeypatch.setattr(cli, "run_experiment", diverge)
    assert main(["decompose"]) == EXIT_NOT_CONVERGED

    def inconsistent(config):
        raise RuntimeError("Reconstruction error 1.0 exceeds the bound 0.5.")

    monkeypatch.setattr(cli, "run_experiment", inconsistent)
    assert main(["decompose"]) == EXIT_NOT_CONVERGED
    assert "exceeds the bound" in capsys.readouterr().err


def test_output_paths():
    assert output_paths("out.csv", ["signal"]) == [Path("out.csv")]
    assert output_paths("dir/out", ["a", "b"]) == [Path("dir/out_a.csv"), Path("dir/out_b.csv")]


def test_table_series():
    table = {
        "name": "diffusion",
        "header": ["iter", "node", "nmse"],
        "rows": [[0, 1, 1.0], [0, 2, 0.5], [1, 1, 0.1], ["steady", "network", 0.2]],
        "comments": [],
    }
    series = table_series(table)
    assert series == {"diffusion 1": ([0.0, 1.0], [1.0, 0.1]), "diffusion 2": ([0.0], [0.5])}

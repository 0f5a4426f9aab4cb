"""
Reading and writing graphs, signals, noise profiles and result tables.

Vertices are numbered from 1 in every file; in memory they are 0-based.

Edge lists hold one edge `i j [weight]` per line. A `# vertices: n` comment
fixes the vertex count, so isolated vertices survive a round trip; other
lines starting with `#` are ignored. Signals and noise profiles are CSV files
with the columns `vertex,value` and `vertex,variance`. Result tables are CSV
files starting with a `#` provenance line; floats are written with `repr`, so
they are read back exactly.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import TYPE_CHECKING, TextIO

import numpy as np

from graphsampling.graph_utils import make_graph, weighted_edges
from graphsampling.noise import NoiseModel

if TYPE_CHECKING:
    import networkx as nx  # type: ignore

    from graphsampling.types import ResultTable, Vector

_VERTEX_COUNT = re.compile(r"^#\s*vertices\s*:\s*(\d+)\s*$")


def parse_edge_list(text: str) -> nx.Graph:
    """
    Parse the text of an edge list.

    Example
    -------
    >>> g = parse_edge_list("# vertices: 4\\n1 2\\n2 3 0.5\\n")
    >>> g.number_of_nodes(), sorted(g.edges(data="weight"))
    (4, [(0, 1, 1.0), (1, 2, 0.5)])
    """
    declared: int | None = None
    edges: list[tuple[int, int, float]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line == "":
            continue
        if line.startswith("#"):
            match = _VERTEX_COUNT.match(line)
            if match is not None:
                declared = int(match.group(1))
            continue
        fields = line.replace(",", " ").split()
        if len(fields) not in (2, 3):
            raise ValueError(f"Line {number}: expected `i j [weight]`, got `{line}`.")
        try:
            i, j = int(fields[0]), int(fields[1])
            weight = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise ValueError(f"Line {number}: cannot parse `{line}`.") from None
        if i < 1 or j < 1:
            raise ValueError(f"Line {number}: vertices are numbered from 1.")
        edges.append((i - 1, j - 1, weight))

    largest = max((max(i, j) + 1 for i, j, _ in edges), default=0)
    n = largest if declared is None else declared
    if declared is not None and largest > declared:
        raise ValueError(f"Edge endpoint {largest} exceeds the declared {declared} vertices.")
    return make_graph(n, edges)


def read_edge_list(path: str | Path) -> nx.Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(graph: nx.Graph) -> str:
    lines = [f"# vertices: {graph.number_of_nodes()}"]
    for i, j, weight in weighted_edges(graph):
        lines.append(f"{i + 1} {j + 1}" if weight == 1.0 else f"{i + 1} {j + 1} {weight!r}")
    return "\n".join(lines) + "\n"


def write_edge_list(graph: nx.Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(graph))


def _read_columns(path: str | Path, name: str) -> np.ndarray:
    lines = [
        line
        for line in Path(path).read_text().splitlines()
        if line.strip() != "" and not line.lstrip().startswith("#")
    ]
    if len(lines) > 0 and lines[0].replace(" ", "").startswith("vertex,"):
        lines = lines[1:]
    if len(lines) == 0:
        raise ValueError(f"The {name} file `{path}` has no rows.")
    try:
        data = np.loadtxt(lines, delimiter=",", ndmin=2)
    except ValueError as e:
        raise ValueError(f"Cannot parse the {name} file `{path}`: {e}") from None
    if data.shape[1] != 2:
        raise ValueError(f"The {name} file `{path}` must have two columns.")
    return data


def _per_vertex(data: np.ndarray, n: int, name: str) -> Vector:
    vertices = data[:, 0]
    if np.any(vertices != np.round(vertices)):
        raise ValueError(f"Non-integer vertex in the {name} file.")
    index = vertices.astype(np.int64) - 1
    if np.any(index < 0) or np.any(index >= n):
        raise ValueError(f"A {name} entry is outside the vertices 1 .. {n}.")
    if len(index) != n or len(np.unique(index)) != n:
        raise ValueError(f"The {name} file must list every vertex exactly once.")
    values = np.empty(n)
    values[index] = data[:, 1]
    return values


def read_signal(path: str | Path, n: int) -> Vector:
    """
    Read a `vertex,value` signal over the vertices `1 .. n`.
    """
    return _per_vertex(_read_columns(path, "signal"), n, "signal")


def format_signal(x: Vector) -> str:
    lines = ["vertex,value"] + [f"{i + 1},{float(v)!r}" for i, v in enumerate(x)]
    return "\n".join(lines) + "\n"


def write_signal(x: Vector, path: str | Path) -> None:
    Path(path).write_text(format_signal(x))


def read_noise(path: str | Path, n: int) -> NoiseModel:
    """
    Read `vertex,variance` noise variances over the vertices `1 .. n`.
    """
    return NoiseModel(_per_vertex(_read_columns(path, "noise"), n, "noise"))


def _cell(value: int | float | str) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def format_table(table: ResultTable, provenance: str, commented_header: bool = False) -> str:
    """
    A result table as CSV text: the provenance line, the comment lines, the
    header and the rows. With `commented_header` the header is written as a
    comment, which keeps edge tables readable by :func:`parse_edge_list`.

    Example
    -------
    >>> table = {"name": "t", "header": ["k", "v"], "rows": [[1, 0.1]], "comments": []}
    >>> print(format_table(table, "graphsampling test"), end="")
    # graphsampling test
    k,v
    1,0.1
    """
    lines = [f"# {provenance}"]
    lines += [f"# {comment}" for comment in table["comments"]]
    header = ",".join(table["header"])
    lines.append(f"# {header}" if commented_header else header)
    for row in table["rows"]:
        if len(row) != len(table["header"]):
            raise ValueError(f"Row {row} does not match the header of `{table['name']}`.")
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_table(
    table: ResultTable, provenance: str, stream: TextIO, commented_header: bool = False
) -> None:
    stream.write(format_table(table, provenance, commented_header))

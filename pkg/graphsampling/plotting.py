"""
Line plots of result tables.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

import matplotlib

matplotlib.use("Agg")

from matplotlib import rc_context  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

if TYPE_CHECKING:
    from graphsampling.types import ResultTable

SVG_SALT = "graphsampling"


def _number(value: int | float | str) -> float | None:
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return float(value)


def table_series(table: ResultTable) -> dict[str, tuple[list[float], list[float]]]:
    """
    The curves of a table: the first column against the last one. A
    three-column table gives one curve per value of its middle column.
    Rows with non-numeric coordinates are skipped.
    """
    series: dict[str, tuple[list[float], list[float]]] = defaultdict(lambda: ([], []))
    for row in table["rows"]:
        x, y = _number(row[0]), _number(row[-1])
        if x is None or y is None:
            continue
        label = table["name"] if len(row) < 3 else f"{table['name']} {row[1]}"
        xs, ys = series[label]
        xs.append(x)
        ys.append(y)
    return dict(series)


def write_svg(
    tables: Iterable[ResultTable], path: str | Path, log_y: bool = False, title: str = ""
) -> None:
    """
    Plot result tables into an SVG file.

    The output only depends on the tables: element ids are salted with a
    fixed string and no date is embedded.
    """
    tables = list(tables)
    with rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        figure = Figure(figsize=(6.4, 4.8))
        axes = figure.add_subplot()
        curves = 0
        for table in tables:
            for label, (xs, ys) in table_series(table).items():
                axes.plot(xs, ys, marker="." if len(xs) < 50 else None, label=label)
                curves += 1
        if len(tables) > 0:
            axes.set_xlabel(tables[0]["header"][0])
            axes.set_ylabel(tables[0]["header"][-1])
        if log_y:
            axes.set_yscale("log")
        if title != "":
            axes.set_title(title)
        if 0 < curves <= 10:
            axes.legend()
        axes.grid(True, alpha=0.3)
        figure.savefig(path, format="svg", metadata={"Date": None})

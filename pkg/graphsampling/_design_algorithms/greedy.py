from __future__ import annotations

import sys
from typing import TYPE_CHECKING

from graphsampling._design_algorithms.ordering import SelectionKey, improves
from graphsampling.config import default_solver_config

if TYPE_CHECKING:
    from graphsampling.design import DesignCriterion
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import SolverConfiguration, VertexSet


def greedy_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> VertexSet:
    """
    See `graphsampling.design.greedy_select` for documentation.
    """
    if config is None:
        config = default_solver_config()

    n = basis.n
    if samples < 0 or samples > n:
        raise ValueError(f"Cannot select {samples} of {n} vertices.")

    threshold = config["rank_threshold"]
    selected: list[int] = []
    for step in range(samples):
        best_vertex = -1
        best_key: SelectionKey | None = None
        for vertex in range(n):
            if vertex in selected:
                continue
            candidate = tuple(sorted(selected + [vertex]))
            key = (
                criterion.rank(basis, candidate, threshold),
                criterion.objective(basis, candidate, threshold),
            )
            if improves(key, best_key):
                best_vertex, best_key = vertex, key

        assert best_vertex >= 0, "Greedy selection ran out of candidates."
        selected.append(best_vertex)
        if config["debug"]:
            print(
                f"[greedy] Step {step + 1}: added vertex {best_vertex} with {best_key}.",
                file=sys.stderr,
            )

    return tuple(sorted(selected))

from __future__ import annotations

import itertools
import math
import sys
from typing import TYPE_CHECKING

from graphsampling._design_algorithms.ordering import SelectionKey, improves
from graphsampling.config import default_solver_config

if TYPE_CHECKING:
    from graphsampling.design import DesignCriterion
    from graphsampling.spectral import SpectralBasis
    from graphsampling.types import SolverConfiguration, VertexSet


def exhaustive_select(
    criterion: DesignCriterion,
    basis: SpectralBasis,
    samples: int,
    config: SolverConfiguration | None = None,
) -> VertexSet:
    """
    See `graphsampling.design.exhaustive_select` for documentation.
    """
    if config is None:
        config = default_solver_config()

    n = basis.n
    if samples < 0 or samples > n:
        raise ValueError(f"Cannot select {samples} of {n} vertices.")
    candidates = math.comb(n, samples)
    if candidates > config["exhaustive_limit"]:
        raise ValueError(
            f"Exhaustive search over {candidates} sets exceeds the limit of "
            f"{config['exhaustive_limit']}."
        )

    threshold = config["rank_threshold"]
    best: VertexSet = ()
    best_key: SelectionKey | None = None
    for candidate in itertools.combinations(range(n), samples):
        key = (
            criterion.rank(basis, candidate, threshold),
            criterion.objective(basis, candidate, threshold),
        )
        if improves(key, best_key):
            best, best_key = candidate, key

    if config["debug"]:
        print(
            f"[exhaustive] Examined {candidates} sets; best {best} with {best_key}.",
            file=sys.stderr,
        )
    return best

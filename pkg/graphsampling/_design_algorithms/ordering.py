from __future__ import annotations

TIE_TOLERANCE = 1e-10

SelectionKey = tuple[int, float]
"""The rank of the information matrix and the objective value of a candidate."""


def improves(candidate: SelectionKey, incumbent: SelectionKey | None) -> bool:
    """
    `True` if `candidate` is strictly better than `incumbent`.

    A higher rank always wins. Objectives of equal-rank candidates must differ
    by more than `1e-10` relative to the incumbent to count as an improvement,
    so the first of several (numerically) tied candidates is kept.
    """
    if incumbent is None:
        return True
    rank, value = candidate
    best_rank, best_value = incumbent
    if rank != best_rank:
        return rank > best_rank
    return value > best_value + TIE_TOLERANCE * max(1.0, abs(best_value))

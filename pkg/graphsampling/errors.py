"""
Exceptions raised by `graphsampling`.

Invalid arguments raise `ValueError` and algorithmic failures raise
`RuntimeError`. The subclasses below carry the extra diagnostic that callers
(most notably the command line interface) need to react to them.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """
    An experiment configuration is invalid. The offending option is stored in `key`.
    """

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"Invalid configuration `{key}`: {message}")
        self.key = key


class ConvergenceError(RuntimeError):
    """
    An iterative solver reached its iteration cap. `residual` is the final
    value of the quantity that failed to drop below its tolerance.
    """

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class RecoveryConditionError(ValueError):
    """
    A sampling set does not determine the bandlimited signals uniquely.
    `norm` is the spectral norm of `D_Sc U_F`, which is not below one.
    """

    def __init__(self, message: str, norm: float) -> None:
        super().__init__(f"{message} (||D_Sc U_F|| = {norm:.12f})")
        self.norm = norm


class InfeasibleDesignError(ValueError):
    """
    A probabilistic sampling design cannot satisfy its requirements even when
    every vertex is sampled at its maximal probability. `constraint` names the
    violated requirement (`alpha_bar` or `gamma`).
    """

    def __init__(self, constraint: str, message: str) -> None:
        super().__init__(message)
        self.constraint = constraint

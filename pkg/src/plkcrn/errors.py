"""Exception types raised across the package."""

from __future__ import annotations


class CRNError(Exception):
    """Base class for all package errors."""


class NotRDK(CRNError):
    """Two branching reactions of one reactant complex carry different kinetic-order rows."""

    def __init__(self, reactions: tuple[int, int], complex_index: int):
        self.reactions = reactions
        self.complex_index = complex_index
        super().__init__(
            f"kinetics is not reactant-determined: reactions {reactions[0]} and {reactions[1]} "
            f"share reactant complex {complex_index} but have different kinetic-order rows"
        )


class NotFSK(CRNError):
    """Two distinct reactant complexes carry the same kinetic-order row."""

    def __init__(self, complexes: tuple[int, int]):
        self.complexes = complexes
        super().__init__(
            f"kinetics is not factor span surjective: complexes {complexes[0]} and {complexes[1]} "
            "have identical kinetic-order rows"
        )


class NotCycleTerminal(CRNError):
    def __init__(self, terminal_points: tuple[int, ...]):
        self.terminal_points = terminal_points
        super().__init__(f"network is not cycle terminal; non-reactant complexes: {list(terminal_points)}")


class NoConvergence(CRNError):
    """Newton iteration hit its cap; carries the best iterate seen."""

    def __init__(self, message: str, best=None, residual: float = float("nan")):
        self.best = best
        self.residual = residual
        super().__init__(f"{message} (best residual {residual:.3e})")


class LinearSystemInconsistent(CRNError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"stacked log-linear system is inconsistent (residual {residual:.3e})")

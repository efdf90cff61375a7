"""
Excepciones del dominio.
"""
from typing import Sequence


class BallBodyError(Exception):
    """Error base del toolkit."""


class InvalidArgumentError(BallBodyError, ValueError):
    """Argumento fuera del dominio de la operación."""


class EmptyBodyError(BallBodyError):
    """La intersección de bolas es vacía o sin interior."""


class UnsupportedBodyError(BallBodyError):
    """Cuerpo excluido por las hipótesis (punto, trasladado de B, dimensión)."""


class NumericalDomainError(BallBodyError):
    """Un integrando devolvió un valor no finito."""

    def __init__(self, message: str, node: Sequence[float] | None = None):
        super().__init__(message)
        self.node = None if node is None else list(node)


class ConvergenceError(BallBodyError):
    """El optimizador no convergió dentro del tope de iteraciones."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residuo={residual:.3e})")
        self.residual = residual


class GeometryError(BallBodyError):
    """Fallo geométrico (p. ej. bisección sin intervalo válido)."""

    def __init__(self, message: str, direction: Sequence[float] | None = None):
        super().__init__(message)
        self.direction = None if direction is None else list(direction)


class SelfCheckError(BallBodyError):
    """Discrepancia entre el cálculo estructural y la cuadratura."""

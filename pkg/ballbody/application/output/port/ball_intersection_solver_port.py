"""
Puerto de salida: solver del programa convexo max{⟨y,u⟩ : |y − c_j| ≤ 1}.
Abstrae el cálculo exacto 2D (estructura de arcos) y el iterativo nD.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class ContactSolution:
    """Maximizador con su conjunto activo."""
    point: NDArray[np.float64]
    value: float
    active: Tuple[int, ...]
    margin: float
    smooth_stratum: str | None = None


class BallIntersectionSolverPort(ABC):
    """
    Puerto de salida para resolver soporte y contacto de ∩_j (c_j + B_2^n).
    """

    @abstractmethod
    def solve(self, centers: NDArray[np.float64], u: NDArray[np.float64]) -> ContactSolution:
        """
        Resuelve el programa convexo para una dirección unitaria.

        Args:
            centers: Matriz (m, n) de centros
            u: Dirección unitaria

        Returns:
            Punto de contacto, valor y restricciones activas. `smooth_stratum`
            vale "sphere" (una esfera activa con holgura), "vertex" (interior
            de un cono normal de vértice) o None cuando no se garantiza suavidad.
        """
        pass


class PlanarBallIntersectionPort(BallIntersectionSolverPort):
    """
    Solver exacto en el plano: además del contacto expone área y perímetro.
    """

    @abstractmethod
    def area(self, centers: NDArray[np.float64]) -> float:
        """Área exacta de ∩_j (c_j + B_2^2)."""
        pass

    @abstractmethod
    def perimeter(self, centers: NDArray[np.float64]) -> float:
        """Longitud exacta de la frontera."""
        pass

    @abstractmethod
    def vertices(self, centers: NDArray[np.float64]) -> NDArray[np.float64]:
        """Vértices de la frontera en sentido antihorario (vacío para un solo disco)."""
        pass

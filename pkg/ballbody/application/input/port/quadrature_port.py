"""
Puerto de entrada: cuadratura sobre la esfera S^{n-1}.
Define mallas, reglas de integración y marcos tangentes para la medida
de Haar normalizada σ.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from numpy.typing import NDArray

# Vector unitario de R^n
Direction = NDArray[np.float64]


class GridScheme(str, Enum):
    """Esquema de la malla."""
    UNIFORM_ANGLE_2D = "uniform_angle_2d"
    PRODUCT_GAUSS_TRAPEZOID_3D = "product_gauss_trapezoid_3d"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class SphereGrid:
    """Nodos y pesos de cuadratura para σ (los pesos suman 1)."""
    dim: int
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    scheme: GridScheme
    resolution: int
    seed: int | None = None

    @property
    def size(self) -> int:
        return int(self.nodes.shape[0])

    def descriptor(self) -> dict:
        """Metadatos de resolución para los reportes."""
        return {
            "scheme": self.scheme.value,
            "dim": self.dim,
            "resolution": self.resolution,
            "nodes": self.size,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class TangentFrame:
    """Base ortonormal de u^⊥ (filas de `basis`)."""
    base: Direction
    basis: NDArray[np.float64]


class QuadraturePort(ABC):
    """
    Puerto de entrada para la cuadratura esférica.
    """

    @abstractmethod
    def make_grid(
        self,
        dim: int,
        resolution: int,
        scheme: GridScheme,
        seed: int | None = None,
        offset: float | None = None
    ) -> SphereGrid:
        """
        Construye una malla determinista sobre S^{n-1}.

        Args:
            dim: Dimensión n del espacio
            resolution: Resolución del esquema
            scheme: Esquema de cuadratura
            seed: Semilla (obligatoria para Monte Carlo)
            offset: Rotación fija en radianes (por defecto GRID_OFFSET)

        Returns:
            Malla con pesos normalizados
        """
        pass

    @abstractmethod
    def integrate(self, grid: SphereGrid, f: Callable[[Direction], float]) -> float:
        """
        Aproxima ∫ f dσ como Σ pesos_i · f(nodo_i).

        Args:
            grid: Malla de cuadratura
            f: Integrando evaluado en direcciones unitarias

        Returns:
            Valor de la cuadratura
        """
        pass

    @abstractmethod
    def integrate_values(self, grid: SphereGrid, values: NDArray[np.float64]) -> float:
        """
        Suma ponderada de valores ya evaluados en los nodos.
        """
        pass

    @abstractmethod
    def tangent_frame(self, u: Direction) -> TangentFrame:
        """
        Base ortonormal determinista de u^⊥ (reflexión de Householder e_n → u).
        """
        pass

"""
Puerto de entrada: curvatura de funciones soporte.
Hessiano de Alexandrov, radios principales y dualidad r_i + s_{n−i} = 1.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ballbody.application.input.port.body_port import Body
from ballbody.application.input.port.quadrature_port import Direction


@dataclass(frozen=True)
class CurvatureSpectrum:
    """Radios principales ordenados en una dirección."""
    direction: Direction
    radii: NDArray[np.float64]
    hessian_residual: float
    contact: NDArray[np.float64]
    smooth: bool = True


@dataclass(frozen=True)
class DualityResidual:
    """max_i |r_i(u) + s_{n−i}(−u) − 1| con su indicador de calidad."""
    direction: Direction
    residual: float
    smooth: bool


class CurvaturePort(ABC):
    """
    Puerto de entrada para la curvatura.
    """

    @abstractmethod
    def hessian_homogeneous(self, body: Body, u: Direction, step: float | None = None) -> NDArray[np.float64]:
        """
        Hessiano de h_K en u, simétrico y con u en su núcleo.

        Args:
            body: Cuerpo
            u: Dirección unitaria
            step: Paso de diferencias finitas en [1e−6, 1e−2]

        Returns:
            Matriz n×n
        """
        pass

    @abstractmethod
    def principal_radii(self, body: Body, u: Direction) -> CurvatureSpectrum:
        """
        Autovalores del Hessiano restringido a u^⊥, en orden creciente y
        sin recortar a [0, 1].
        """
        pass

    @abstractmethod
    def curvature_duality_residual(self, body: Body, u: Direction) -> float:
        """
        max_i |r_i(K, u) + s_{n−i}(K^c, −u) − 1| con numérica independiente
        en el lado dual.
        """
        pass

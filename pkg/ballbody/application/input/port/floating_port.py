"""
Puerto de entrada: c-cuerpo flotante en el plano y ley límite del déficit.
"""
from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from ballbody.application.input.port.body_port import Body


class CutterKind(str, Enum):
    """Familia de cortes."""
    UNIT_BALL = "unit_ball"
    HALF_PLANE = "half_plane"


class FloatingResult(BaseModel):
    """Aproximación del cuerpo flotante por m cortes."""
    delta: float = Field(..., description="Área cortada por cada corte")
    body: Optional[Body] = Field(
        default=None,
        description="Intersección de las m bolas (None para semiplanos)"
    )
    body_volume: float = Field(..., description="Vol(K)")
    floating_volume: float = Field(..., description="Vol(F)")
    volume_deficit: float = Field(..., description="Vol(K) − Vol(F)")
    ratio: float = Field(..., description="déficit / δ^{2/3}")
    directions_used: int
    cutter: CutterKind = CutterKind.UNIT_BALL
    offsets: List[float] = Field(default_factory=list, description="Parámetro bisecado por dirección")


class LimitEstimate(BaseModel):
    """Ajuste ratio(δ) = L + a·δ^{1/3}."""
    estimate: float
    slope: float
    fit_residual: float
    results: List[FloatingResult] = Field(default_factory=list)


class SweepRow(BaseModel):
    """Fila del barrido CSV."""
    delta: float
    deficit: float
    ratio: float
    directions: int
    fit_estimate: float
    target: float
    rel_error: float


class FloatingPort(ABC):
    """
    Puerto de entrada para el cuerpo flotante.
    """

    @abstractmethod
    def cut_volume(self, body: Body, center: Sequence[float]) -> float:
        """
        Vol(K) − Vol(K ∩ (center + B_2^2)).

        Args:
            body: Cuerpo plano
            center: Centro de la bola de corte

        Returns:
            Área cortada
        """
        pass

    @abstractmethod
    def floating_body(
        self,
        body: Body,
        delta: float,
        m: int,
        cutter: CutterKind = CutterKind.UNIT_BALL,
        relative: bool = False
    ) -> FloatingResult:
        """
        Aproxima F_{c,δ}(K) con m direcciones equiespaciadas.

        Raises:
            InvalidArgumentError: si algún radio de curvatura supera 1 − 1e−3
            GeometryError: si F no queda contenido en K en 512 direcciones de control
        """
        pass

    @abstractmethod
    def limit_estimate(
        self,
        body: Body,
        deltas: Sequence[float],
        m: int,
        cutter: CutterKind = CutterKind.UNIT_BALL
    ) -> LimitEstimate:
        """
        Estima lím δ→0 del cociente por mínimos cuadrados.
        """
        pass

    @abstractmethod
    def floating_constant(self, n: int) -> float:
        """
        c_n = ½((n+1)/Vol_{n−1}(B_2^{n−1}))^{2/(n+1)}.
        """
        pass

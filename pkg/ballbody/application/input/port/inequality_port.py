"""
Puerto de entrada: batería de desigualdades, búsqueda extremal y barrido
del punto medio.
"""
from abc import ABC, abstractmethod
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ballbody.application.input.port.body_port import Body
from ballbody.application.input.port.quadrature_port import SphereGrid


class InequalityKind(str, Enum):
    """Desigualdades verificables."""
    EXTREMAL_MAX = "EXTREMAL_MAX"
    SANTALO_PRODUCT = "SANTALO_PRODUCT"
    HOLDER_LINK = "HOLDER_LINK"
    PRODUCT_VS_SURFACE = "PRODUCT_VS_SURFACE"
    ITERATED_SURFACE = "ITERATED_SURFACE"
    SURFACE_BALL_BOUND = "SURFACE_BALL_BOUND"
    ALEXANDROV = "ALEXANDROV"
    ISOPERIMETRIC = "ISOPERIMETRIC"
    BM_SURFACE = "BM_SURFACE"
    CURVATURE_DUALITY = "CURVATURE_DUALITY"


# Desigualdades que involucran K^c: excluyen trasladados de B_2^n
DUAL_KINDS = frozenset({
    InequalityKind.SANTALO_PRODUCT,
    InequalityKind.HOLDER_LINK,
    InequalityKind.PRODUCT_VS_SURFACE,
    InequalityKind.ITERATED_SURFACE,
    InequalityKind.SURFACE_BALL_BOUND,
    InequalityKind.BM_SURFACE,
    InequalityKind.CURVATURE_DUALITY,
})


class EvaluationPath(str, Enum):
    """Camino numérico, que fija la tolerancia por defecto."""
    CLOSED_FORM = "closed_form"
    FINITE_DIFFERENCE = "finite_difference"


class InequalityRecord(BaseModel):
    """Resultado de una desigualdad lhs ≤ rhs."""
    model_config = ConfigDict(populate_by_name=True)

    kind: InequalityKind
    lhs: float
    rhs: float
    slack: float = Field(..., description="rhs − lhs")
    tol: float
    passed: bool = Field(..., alias="pass")
    near_equality: bool
    path: EvaluationPath = EvaluationPath.CLOSED_FORM
    details: Dict[str, float] = Field(default_factory=dict)
    body: Optional[dict] = Field(default=None, description="Descripción JSON del cuerpo")


class ExtremalResult(BaseModel):
    """Maximizador de Ω^c en una familia."""
    n: int
    family: str
    params: Dict[str, float]
    value: float
    rejected_steps: int = 0


class ScanResult(BaseModel):
    """Resultado del barrido de g(r) = ½(Ω^c(rB)+Ω^c((1−r)B)) − Ω^c(½B)."""
    n: int
    best_r: float
    gain: float
    second_derivative: float


class InequalityPort(ABC):
    """
    Puerto de entrada para la batería de desigualdades.
    """

    @abstractmethod
    def verify(
        self,
        kind: InequalityKind,
        body: Body,
        grid: SphereGrid,
        tol: float | None = None
    ) -> InequalityRecord:
        """
        Evalúa una desigualdad sobre un cuerpo.

        Args:
            kind: Desigualdad
            body: Cuerpo de S_n (no un punto)
            grid: Malla de cuadratura
            tol: Tolerancia (por defecto según el camino numérico)

        Returns:
            Registro con lhs, rhs, holgura y veredicto
        """
        pass

    @abstractmethod
    def extremal_search(self, n: int, family: str, grid: SphereGrid | None = None) -> ExtremalResult:
        """
        Maximiza Ω^c sobre la familia ("balls" o "trig2d").
        """
        pass

    @abstractmethod
    def santalo_midpoint_scan(self, n: int, r_window: Tuple[float, float], steps: int) -> ScanResult:
        """
        Barre r en la ventana y devuelve el máximo de g(r).
        """
        pass

"""
Puerto de entrada: funcionales de cuerpos (Ω^c, Ω, S, M*, Vol).
"""
from abc import ABC, abstractmethod
from typing import List

from pydantic import BaseModel, Field

from ballbody.application.input.port.body_port import Body
from ballbody.application.input.port.quadrature_port import SphereGrid


class FunctionalReport(BaseModel):
    """Reporte de funcionales con metadatos de resolución."""
    dim: int
    omega_c: float = Field(..., description="Área de superficie c-afín Ω^c")
    omega_classical: float = Field(..., description="Área de superficie afín clásica Ω")
    surface_area: float = Field(..., description="Área de superficie S")
    mean_width_half: float = Field(..., description="Semiancho medio M*")
    volume: float = Field(..., description="Volumen")
    grid_scheme: dict = Field(..., description="Descriptor de la malla")
    clamp_count: int = Field(default=0, description="Nodos con radios recortados a [0, 1]")
    exact_paths: List[str] = Field(
        default_factory=list,
        description="Funcionales tomados de la estructura exacta de arcos"
    )


class FunctionalsPort(ABC):
    """
    Puerto de entrada para los funcionales.
    """

    @abstractmethod
    def omega_c(self, body: Body, grid: SphereGrid) -> float:
        """
        Ω^c(K) = ω_n ∫ ∏ (1 − r_i)^{1/(n+1)} r_i^{n/(n+1)} dσ.

        Args:
            body: Cuerpo (no un punto)
            grid: Malla de la misma dimensión

        Returns:
            Valor no negativo
        """
        pass

    @abstractmethod
    def omega_classical(self, body: Body, grid: SphereGrid) -> float:
        """
        Ω(K) = ω_n ∫ ∏ r_i^{n/(n+1)} dσ.
        """
        pass

    @abstractmethod
    def surface_area(self, body: Body, grid: SphereGrid) -> float:
        """
        S(K) = ω_n ∫ ∏ r_i dσ.
        """
        pass

    @abstractmethod
    def mean_width_half(self, body: Body, grid: SphereGrid) -> float:
        """
        M*(K) = ∫ h_K dσ.
        """
        pass

    @abstractmethod
    def volume(self, body: Body, grid: SphereGrid) -> float:
        """
        Vol(K) = (ω_n/n) ∫ h_K ∏ r_i dσ.
        """
        pass

    @abstractmethod
    def omega_c_ball(self, n: int, r: float) -> float:
        """
        Forma cerrada Ω^c(rB_2^n) = ω_n (1−r)^{(n−1)/(n+1)} r^{n(n−1)/(n+1)}.
        """
        pass

    @abstractmethod
    def report(self, body: Body, grid: SphereGrid) -> FunctionalReport:
        """
        Los cinco funcionales con una sola tabla de radios.
        """
        pass

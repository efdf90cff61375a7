"""
Puerto de entrada: modelo de cuerpos de la clase S_n.
Define las descripciones de cuerpos (función soporte) y las operaciones
de evaluación, dualidad, combinaciones de Minkowski y pertenencia.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Annotated, List, Literal, Sequence, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from ballbody.application.input.port.quadrature_port import Direction, SphereGrid

WEIGHT_SUM_TOL = 1e-12


class _Shape(BaseModel):
    """Base inmutable de las descripciones."""
    model_config = ConfigDict(frozen=True)


class BallBody(_Shape):
    """Bola c + r·B_2^n."""
    type: Literal["ball"] = "ball"
    dim: int = Field(..., ge=2)
    center: List[float]
    radius: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _check_center(self) -> "BallBody":
        if len(self.center) != self.dim:
            raise ValueError(f"center tiene {len(self.center)} coordenadas, dim={self.dim}")
        return self


class TrigTerm(_Shape):
    """Término eps·cos(kθ) de la función soporte."""
    k: int = Field(..., ge=2)
    eps: float


class Trig2DBody(_Shape):
    """Cuerpo plano con h(θ) = a + Σ eps_k·cos(kθ)."""
    type: Literal["trig2d"] = "trig2d"
    a: float
    terms: List[TrigTerm] = Field(default_factory=list)

    @property
    def dim(self) -> int:
        return 2


class BallIntersectionBody(_Shape):
    """Intersección ∩_j (c_j + B_2^n)."""
    type: Literal["ball_intersection"] = "ball_intersection"
    dim: int = Field(..., ge=2)
    centers: List[List[float]] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_centers(self) -> "BallIntersectionBody":
        for c in self.centers:
            if len(c) != self.dim:
                raise ValueError(f"El centro {c} no tiene dimensión {self.dim}")
        return self

    @property
    def center_array(self) -> NDArray[np.float64]:
        return np.asarray(self.centers, dtype=float)


class MinkowskiPart(_Shape):
    """Sumando ponderado."""
    weight: float = Field(..., ge=0.0)
    body: "Body"


class MinkowskiBody(_Shape):
    """Combinación convexa Σ w_j K_j."""
    type: Literal["minkowski"] = "minkowski"
    parts: List[MinkowskiPart] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_parts(self) -> "MinkowskiBody":
        total = sum(p.weight for p in self.parts)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"Los pesos suman {total!r}, se esperaba 1")
        dims = {p.body.dim for p in self.parts}
        if len(dims) != 1:
            raise ValueError(f"Sumandos con dimensiones distintas: {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.parts[0].body.dim


class CDualBody(_Shape):
    """Envoltorio perezoso del c-dual K^c = ∩_{x∈K}(x + B_2^n)."""
    type: Literal["c_dual"] = "c_dual"
    of: "Body"

    @property
    def dim(self) -> int:
        return self.of.dim


Body = Annotated[
    Union[BallBody, Trig2DBody, BallIntersectionBody, MinkowskiBody, CDualBody],
    Field(discriminator="type")
]

MinkowskiPart.model_rebuild()
MinkowskiBody.model_rebuild()
CDualBody.model_rebuild()

body_adapter: TypeAdapter = TypeAdapter(Body)


def parse_body(payload: str | bytes | dict) -> Body:
    """
    Valida una descripción JSON (texto o dict) y devuelve el cuerpo.

    Raises:
        pydantic.ValidationError: si el esquema no se cumple
    """
    if isinstance(payload, dict):
        return body_adapter.validate_python(payload)
    return body_adapter.validate_json(payload)


def dump_body(body: Body) -> dict:
    """Descripción JSON-compatible del cuerpo."""
    return body_adapter.dump_python(body, mode="json")


@dataclass(frozen=True)
class ContactPoint:
    """Punto x(u) de ∂K con normal u."""
    direction: Direction
    point: NDArray[np.float64]


@dataclass(frozen=True)
class MembershipViolation:
    """Primer nodo cuyos radios principales salen de [−tol, 1+tol]."""
    direction: Direction
    radii: NDArray[np.float64]

    def describe(self) -> str:
        return (
            f"dirección {np.round(self.direction, 6).tolist()} "
            f"con radios {np.round(self.radii, 6).tolist()}"
        )


class BodyModelPort(ABC):
    """
    Puerto de entrada para el modelo de cuerpos.
    """

    @abstractmethod
    def support(self, body: Body, x: Sequence[float]) -> float:
        """
        Función soporte h_K(x) = max_{y∈K} ⟨y, x⟩.

        Args:
            body: Cuerpo
            x: Vector no nulo

        Returns:
            Valor de la función soporte
        """
        pass

    @abstractmethod
    def contact_point(self, body: Body, u: Direction) -> ContactPoint:
        """
        Punto de contacto x(u) = ∇h_K(u).
        """
        pass

    @abstractmethod
    def c_dual(self, body: Body) -> Body:
        """
        c-dual con simplificaciones (bolas y doble dual).
        """
        pass

    @abstractmethod
    def minkowski(self, parts: Sequence[tuple[float, Body]]) -> Body:
        """
        Combinación convexa de cuerpos.
        """
        pass

    @abstractmethod
    def contains(self, body: Body, p: Sequence[float], tol: float = 0.0) -> bool:
        """
        Test de pertenencia de un punto.
        """
        pass

    @abstractmethod
    def is_ball_body(self, body: Body, grid: SphereGrid, tol: float) -> bool:
        """
        Chequeo muestreado de radios principales en [−tol, 1+tol].
        """
        pass

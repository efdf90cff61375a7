"""
Adaptador exacto para intersecciones de discos unitarios en el plano.
Implementa el puerto del solver a partir de la estructura de arcos.
"""
from dataclasses import dataclass
from typing import List

import numpy as np
from numpy.typing import NDArray

from ballbody.application.output.port.ball_intersection_solver_port import (
    ContactSolution,
    PlanarBallIntersectionPort
)
from ballbody.utils.exceptions import EmptyBodyError, InvalidArgumentError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

TWO_PI = 2.0 * np.pi
DUPLICATE_TOL = 1e-14
STRATUM_TOL = 1e-12


@dataclass(frozen=True)
class Arc:
    """Arco de la circunferencia `index` entre los ángulos start < end."""
    index: int
    center: NDArray[np.float64]
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains_angle(self, theta: float) -> bool:
        return (theta - self.start) % TWO_PI <= self.length

    def point(self, angle: float) -> NDArray[np.float64]:
        return self.center + np.array([np.cos(angle), np.sin(angle)])


def _angular_distance(a: float, b: float) -> float:
    return abs((a - b + np.pi) % TWO_PI - np.pi)


def unique_centers(centers: NDArray[np.float64]) -> NDArray[np.float64]:
    """Elimina centros repetidos (misma bola)."""
    kept: List[NDArray[np.float64]] = []
    for c in np.asarray(centers, dtype=float):
        if all(np.linalg.norm(c - k) > DUPLICATE_TOL for k in kept):
            kept.append(c)
    return np.array(kept)


class ArcStructureAdapter(PlanarBallIntersectionPort):
    """
    Evaluación exacta de ∩_j (c_j + B_2^2) mediante sus arcos de frontera.

    Cada circunferencia aporta a lo sumo un arco: la intersección de las
    ventanas angulares de semiancho arccos(d/2) alrededor de los demás centros.
    """

    def __init__(self, cache_size: int = 256):
        """
        Inicializa el adaptador.

        Args:
            cache_size: Número de estructuras de arcos memorizadas
        """
        self.cache_size = cache_size
        self._cache: dict[bytes, List[Arc]] = {}

    def arcs(self, centers: NDArray[np.float64]) -> List[Arc]:
        """
        Arcos de frontera ordenados por circunferencia.

        Raises:
            EmptyBodyError: si la intersección es vacía o un punto
        """
        centers = np.asarray(centers, dtype=float)
        if centers.ndim != 2 or centers.shape[1] != 2:
            raise InvalidArgumentError("La estructura de arcos requiere centros en el plano")
        key = centers.tobytes()
        if key not in self._cache:
            if len(self._cache) >= self.cache_size:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = self._build_arcs(unique_centers(centers))
            logger.debug(f"Estructura de arcos: {len(self._cache[key])} arcos para {len(centers)} centros")
        return self._cache[key]

    def _build_arcs(self, centers: NDArray[np.float64]) -> List[Arc]:
        offsets = centers[None, :, :] - centers[:, None, :]
        distances = np.linalg.norm(offsets, axis=2)
        if distances.max() >= 2.0:
            logger.error(f"Intersección vacía: distancia máxima entre centros {distances.max():.6f}")
            raise EmptyBodyError(
                f"Centros a distancia {distances.max():.6f} ≥ 2: intersección sin interior"
            )

        arcs: List[Arc] = []
        for j, cj in enumerate(centers):
            others = np.arange(len(centers)) != j
            if not others.any():
                arcs.append(Arc(index=j, center=cj, start=0.0, end=TWO_PI))
                continue
            mids = np.arctan2(offsets[j, others, 1], offsets[j, others, 0])
            halves = np.arccos(distances[j, others] / 2.0)
            # Ventanas de longitud < π: si la intersección no es vacía, todos
            # los representantes quedan a menos de π del primero
            mids = mids + TWO_PI * np.round((mids[0] - mids) / TWO_PI)
            lo = float(np.max(mids - halves))
            hi = float(np.min(mids + halves))
            if hi - lo > STRATUM_TOL:
                arcs.append(Arc(index=j, center=cj, start=lo, end=hi))

        if not arcs:
            raise EmptyBodyError("La intersección de discos no tiene arcos de frontera")
        return arcs

    def area(self, centers: NDArray[np.float64]) -> float:
        """Área exacta por la fórmula de Green sobre los arcos."""
        total = 0.0
        for arc in self.arcs(centers):
            cx, cy = arc.center
            total += (
                arc.length
                + cx * (np.sin(arc.end) - np.sin(arc.start))
                - cy * (np.cos(arc.end) - np.cos(arc.start))
            )
        return 0.5 * total

    def perimeter(self, centers: NDArray[np.float64]) -> float:
        """Longitud exacta de la frontera (suma de arcos)."""
        return float(sum(arc.length for arc in self.arcs(centers)))

    def solve(self, centers: NDArray[np.float64], u: NDArray[np.float64]) -> ContactSolution:
        arcs = self.arcs(centers)
        theta = float(np.arctan2(u[1], u[0]))
        margin = min(
            min(_angular_distance(theta, arc.start), _angular_distance(theta, arc.end))
            for arc in arcs
        ) if not (len(arcs) == 1 and arcs[0].length >= TWO_PI) else np.pi

        for arc in arcs:
            if arc.contains_angle(theta):
                point = arc.center + u
                return ContactSolution(
                    point=point,
                    value=float(point @ u),
                    active=(arc.index,),
                    margin=margin,
                    smooth_stratum="sphere" if margin > STRATUM_TOL else None
                )

        # Fuera de todo arco: el maximizador es un vértice
        best_point, best_value = None, -np.inf
        for arc in arcs:
            for angle in (arc.start, arc.end):
                point = arc.point(angle)
                value = float(point @ u)
                if value > best_value:
                    best_point, best_value = point, value
        best_active = tuple(
            arc.index for arc in arcs
            if abs(np.linalg.norm(best_point - arc.center) - 1.0) < 1e-9
        )
        return ContactSolution(
            point=best_point,
            value=best_value,
            active=best_active,
            margin=margin,
            smooth_stratum="vertex" if margin > STRATUM_TOL else None
        )

    def vertices(self, centers: NDArray[np.float64]) -> NDArray[np.float64]:
        arcs = self.arcs(centers)
        if len(arcs) == 1 and arcs[0].length >= TWO_PI:
            return np.empty((0, 2))
        # Cada vértice es el inicio de exactamente un arco
        return np.array([arc.point(arc.start) for arc in arcs])

"""
Adaptador iterativo para intersecciones de bolas unitarias en R^n.
Ascenso por gradiente proyectado con proyección de Dykstra.
"""
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from ballbody.application.output.port.ball_intersection_solver_port import (
    BallIntersectionSolverPort,
    ContactSolution
)
from ballbody.utils.config import settings
from ballbody.utils.exceptions import ConvergenceError, EmptyBodyError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

FEASIBILITY_TOL = 1e-12
ACTIVE_TOL = 1e-7
VALUE_TOL = 1e-9


def _project_ball(z: NDArray[np.float64], center: NDArray[np.float64]) -> NDArray[np.float64]:
    diff = z - center
    norm = np.linalg.norm(diff)
    return z if norm <= 1.0 else center + diff / norm


def _violation(y: NDArray[np.float64], centers: NDArray[np.float64]) -> float:
    return float(np.max(np.linalg.norm(centers - y, axis=1)) - 1.0)


class DykstraProjectionAdapter(BallIntersectionSolverPort):
    """
    Resuelve max{⟨y,u⟩ : |y − c_j| ≤ 1} en cualquier dimensión.

    1. Atajo exacto: si c_j + u es factible, es el maximizador.
    2. Si no, y ← Dykstra(y + η·u) hasta punto fijo.
    3. Pulido: con dos esferas activas se usa el maximizador cerrado
       sobre la intersección de ambas esferas.
    """

    def __init__(
        self,
        max_iter: int | None = None,
        tol: float | None = None,
        step: float | None = None
    ):
        """
        Inicializa el adaptador.

        Args:
            max_iter: Tope total de iteraciones de proyección
            tol: Tolerancia de punto fijo
            step: Paso η del ascenso
        """
        self.max_iter = max_iter or settings.SOLVER_MAX_ITER
        self.tol = tol or settings.SOLVER_TOL
        self.step = step or settings.SOLVER_STEP

    def solve(self, centers: NDArray[np.float64], u: NDArray[np.float64]) -> ContactSolution:
        centers = np.asarray(centers, dtype=float)
        u = np.asarray(u, dtype=float)

        single = self._single_sphere(centers, u)
        if single is not None:
            return single

        point, residual = self._projected_gradient(centers, u)
        polished = self._polish_pair(centers, u, point)
        if polished is not None:
            return polished

        active = tuple(
            int(j) for j in np.flatnonzero(np.linalg.norm(centers - point, axis=1) > 1.0 - ACTIVE_TOL)
        )
        logger.debug(f"Contacto iterativo con {len(active)} esferas activas (residuo={residual:.2e})")
        return ContactSolution(
            point=point,
            value=float(point @ u),
            active=active,
            margin=0.0,
            smooth_stratum=None
        )

    def _single_sphere(self, centers, u) -> ContactSolution | None:
        candidates = centers + u
        distances = np.linalg.norm(candidates[:, None, :] - centers[None, :, :], axis=2)
        np.fill_diagonal(distances, 0.0)
        slack = 1.0 - distances.max(axis=1)
        feasible = np.flatnonzero(slack >= -FEASIBILITY_TOL)
        if feasible.size == 0:
            return None
        j = int(feasible[np.argmax(slack[feasible])])
        point = candidates[j]
        return ContactSolution(
            point=point,
            value=float(point @ u),
            active=(j,),
            margin=float(slack[j]),
            smooth_stratum="sphere" if slack[j] > FEASIBILITY_TOL else None
        )

    def _dykstra(self, z: NDArray[np.float64], centers: NDArray[np.float64]) -> tuple[NDArray[np.float64], int]:
        """Proyección de z sobre la intersección; devuelve (punto, iteraciones)."""
        x = z.copy()
        increments = np.zeros_like(centers)
        for iteration in range(1, self.max_iter + 1):
            previous = x
            for j, center in enumerate(centers):
                shifted = x + increments[j]
                projected = _project_ball(shifted, center)
                increments[j] = shifted - projected
                x = projected
            if np.linalg.norm(x - previous) < self.tol:
                return x, iteration
        return x, self.max_iter

    def _projected_gradient(self, centers, u) -> tuple[NDArray[np.float64], float]:
        y = centers.mean(axis=0)
        used = 0
        residual = np.inf
        while used < self.max_iter:
            candidate, iterations = self._dykstra(y + self.step * u, centers)
            used += iterations
            residual = float(np.linalg.norm(candidate - y))
            y = candidate
            if residual < self.tol:
                break

        violation = _violation(y, centers)
        if residual > VALUE_TOL or violation > VALUE_TOL:
            logger.error(f"Solver sin convergencia: residuo {residual:.3e}, violación {violation:.3e}")
            raise ConvergenceError(
                f"Ascenso proyectado sin convergencia en {used} iteraciones",
                residual=max(residual, violation)
            )
        return y, residual

    def _polish_pair(self, centers, u, point) -> ContactSolution | None:
        """Maximizador cerrado sobre la intersección de dos esferas activas."""
        distances = np.linalg.norm(centers - point, axis=1)
        active = np.flatnonzero(distances > 1.0 - ACTIVE_TOL)
        best = None
        for i, j in combinations(active.tolist(), 2):
            a, b = centers[i], centers[j]
            gap = b - a
            d = float(np.linalg.norm(gap))
            if d >= 2.0:
                raise EmptyBodyError(f"Centros a distancia {d:.6f} ≥ 2")
            if d < 1e-14:
                continue
            e = gap / d
            tangential = u - (u @ e) * e
            tnorm = float(np.linalg.norm(tangential))
            if tnorm < 1e-14:
                continue
            y = (a + b) / 2.0 + np.sqrt(1.0 - d * d / 4.0) * tangential / tnorm
            # KKT: u = λ_a (y − a) + λ_b (y − b) con λ ≥ 0
            normals = np.column_stack([y - a, y - b])
            multipliers, *_ = np.linalg.lstsq(normals, u, rcond=None)
            if np.linalg.norm(normals @ multipliers - u) > 1e-9 or multipliers.min() < -1e-12:
                continue
            if _violation(y, centers) > FEASIBILITY_TOL:
                continue
            if best is None or y @ u > best.value:
                best = ContactSolution(
                    point=y,
                    value=float(y @ u),
                    active=(i, j),
                    margin=0.0,
                    smooth_stratum=None
                )
        if best is not None and abs(best.value - float(point @ u)) > 1e-6:
            logger.warning("El pulido por pares se aleja del iterado de Dykstra; se descarta")
            return None
        return best

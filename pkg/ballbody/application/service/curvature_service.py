"""
Servicio de curvatura: Hessianos de Alexandrov, radios principales por
Jacobi cíclico y residuo de la dualidad de curvaturas.
"""
from typing import List, Tuple

import numpy as np
from numpy.typing import NDArray

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    Body,
    CDualBody,
    MinkowskiBody,
    Trig2DBody
)
from ballbody.application.input.port.curvature_port import (
    CurvaturePort,
    CurvatureSpectrum,
    DualityResidual
)
from ballbody.application.input.port.quadrature_port import Direction, QuadraturePort, SphereGrid
from ballbody.application.service.body_model_service import (
    BodyModelService,
    contains_ball_intersection,
    trig_radius
)
from ballbody.application.service.sphere_quadrature_service import as_direction
from ballbody.utils.config import settings
from ballbody.utils.exceptions import InvalidArgumentError, UnsupportedBodyError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_STEP = 1e-6
MAX_STEP = 1e-2
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 64

# (Hessiano sin proyectar, residuo de simetría, suave)
HessianEstimate = Tuple[NDArray[np.float64], float, bool]


def jacobi_eigenvalues(matrix: NDArray[np.float64], tol: float = JACOBI_TOL) -> NDArray[np.float64]:
    """
    Autovalores de una matriz simétrica pequeña por Jacobi cíclico.

    Args:
        matrix: Matriz simétrica k×k
        tol: Norma fuera de la diagonal para detenerse

    Returns:
        Autovalores en orden creciente
    """
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    if a.shape != (size, size):
        raise InvalidArgumentError(f"Se esperaba una matriz cuadrada, forma {a.shape}")
    if size == 1:
        return a.diagonal().copy()

    scale = max(1.0, float(np.abs(a).max()))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(max(0.0, float(np.sum(a**2) - np.sum(a.diagonal() ** 2))))
        if off < tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rotation = np.eye(size)
                rotation[p, p] = rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s
                a = rotation.T @ a @ rotation
    return np.sort(a.diagonal())


def _projector(u: Direction) -> NDArray[np.float64]:
    return np.eye(u.shape[0]) - np.outer(u, u)


def _unit(x: NDArray[np.float64]) -> NDArray[np.float64]:
    return x / np.linalg.norm(x)


class CurvatureService(CurvaturePort):
    """
    Implementación del puerto de curvatura.

    Las formas cerradas se combinan recursivamente (Minkowski suma Hessianos,
    CDualOf usa (I − u⊗u) − ∇²h_K(−u)); las hojas BallIntersection usan el
    estrato suave exacto o diferencias finitas.
    """

    def __init__(
        self,
        body_model: BodyModelService,
        quadrature: QuadraturePort,
        step: float | None = None
    ):
        """
        Inicializa el servicio.

        Args:
            body_model: Servicio del modelo de cuerpos
            quadrature: Puerto de cuadratura (marcos tangentes)
            step: Paso de diferencias finitas (por defecto FD_STEP)
        """
        self.body_model = body_model
        self.quadrature = quadrature
        self.step = self._check_step(step or settings.FD_STEP)

    @staticmethod
    def _check_step(step: float) -> float:
        if not MIN_STEP <= step <= MAX_STEP:
            raise InvalidArgumentError(f"El paso {step} está fuera de [{MIN_STEP}, {MAX_STEP}]")
        return step

    # ------------------------------------------------------------------
    # Hessianos
    # ------------------------------------------------------------------

    def hessian_homogeneous(self, body: Body, u: Direction, step: float | None = None) -> NDArray[np.float64]:
        u = as_direction(u)
        hessian, _, _ = self.hessian_with_quality(body, u, step)
        return hessian

    def hessian_with_quality(self, body: Body, u: Direction, step: float | None = None) -> HessianEstimate:
        """Hessiano proyectado sobre u^⊥ junto a su residuo y su indicador de suavidad."""
        step = self._check_step(step or self.step)
        hessian, residual, smooth = self._hessian(body, u, step)
        projector = _projector(u)
        return projector @ hessian @ projector, residual, smooth

    def _hessian(self, body: Body, u: Direction, step: float) -> HessianEstimate:
        if isinstance(body, BallBody):
            return body.radius * _projector(u), 0.0, True

        if isinstance(body, Trig2DBody):
            theta = float(np.arctan2(u[1], u[0]))
            tangent = np.array([-np.sin(theta), np.cos(theta)])
            return float(trig_radius(body, theta)) * np.outer(tangent, tangent), 0.0, True

        if isinstance(body, MinkowskiBody):
            total = np.zeros((u.shape[0], u.shape[0]))
            residual, smooth = 0.0, True
            for part in body.parts:
                h, r, s = self._hessian(part.body, u, step)
                total += part.weight * h
                residual = max(residual, r)
                smooth = smooth and s
            return total, residual, smooth

        if isinstance(body, CDualBody):
            inner, residual, smooth = self._hessian(body.of, -u, step)
            return _projector(u) - inner, residual, smooth

        if isinstance(body, BallIntersectionBody):
            solution = self.body_model.contact_solution(body, u)
            if solution.smooth_stratum == "sphere":
                return _projector(u), 0.0, True
            if solution.smooth_stratum == "vertex":
                return np.zeros((u.shape[0], u.shape[0])), 0.0, True
            return self._finite_difference(body, u, step)

        raise InvalidArgumentError(f"Tipo de cuerpo desconocido: {type(body).__name__}")

    def finite_difference_hessian(self, body: Body, u: Direction, step: float | None = None) -> HessianEstimate:
        """
        Hessiano por diferencias centrales de los puntos de contacto, sin
        atajos de forma cerrada.
        """
        u = as_direction(u)
        step = self._check_step(step or self.step)
        hessian, residual, smooth = self._finite_difference(body, u, step)
        projector = _projector(u)
        return projector @ hessian @ projector, residual, smooth

    def _contact_at(self, body: Body, x: NDArray[np.float64]) -> NDArray[np.float64]:
        # ∇h es 0-homogéneo: ∇h(x) = ∇h(x/|x|)
        return self.body_model.contact(body, _unit(x))

    def _central(self, body: Body, u: Direction, step: float) -> NDArray[np.float64]:
        n = u.shape[0]
        columns = [
            (self._contact_at(body, u + step * e) - self._contact_at(body, u - step * e)) / (2.0 * step)
            for e in np.eye(n)
        ]
        return np.column_stack(columns)

    def _one_sided(self, body: Body, u: Direction, step: float) -> NDArray[np.float64]:
        """Diferencias laterales con Richardson, tomando por columna el lado autoconsistente."""
        n = u.shape[0]
        base = self.body_model.contact(body, u)
        columns = []
        for e in np.eye(n):
            estimates = []
            for sign in (1.0, -1.0):
                coarse = sign * (self._contact_at(body, u + sign * step * e) - base) / step
                fine = sign * (self._contact_at(body, u + sign * 0.5 * step * e) - base) / (0.5 * step)
                estimates.append((np.abs(coarse - fine).max(), 2.0 * fine - coarse))
            columns.append(min(estimates, key=lambda item: item[0])[1])
        return np.column_stack(columns)

    def _finite_difference(self, body: Body, u: Direction, step: float) -> HessianEstimate:
        coarse = self._central(body, u, step)
        fine = self._central(body, u, 0.5 * step)
        gap = float(np.abs(coarse - fine).max())
        smooth = True
        if gap > settings.KINK_THRESHOLD:
            logger.warning(f"Nodo no suave en u={np.round(u, 6).tolist()} (discrepancia {gap:.2e})")
            raw = self._one_sided(body, u, step)
            smooth = False
        elif gap > settings.RICHARDSON_THRESHOLD:
            raw = (4.0 * fine - coarse) / 3.0
        else:
            raw = coarse
        residual = 0.5 * float(np.abs(raw - raw.T).max())
        return 0.5 * (raw + raw.T), residual, smooth

    # ------------------------------------------------------------------
    # Radios principales
    # ------------------------------------------------------------------

    def principal_radii(self, body: Body, u: Direction) -> CurvatureSpectrum:
        u = np.asarray(u, dtype=float)
        if u.shape != (body.dim,):
            raise InvalidArgumentError(f"Dirección de forma {u.shape} para dimensión {body.dim}")
        as_direction(u)
        hessian, residual, smooth = self.hessian_with_quality(body, u)
        return self._spectrum(body, u, hessian, residual, smooth)

    def _spectrum(self, body, u, hessian, residual, smooth) -> CurvatureSpectrum:
        basis = self.quadrature.tangent_frame(u).basis
        radii = jacobi_eigenvalues(basis @ hessian @ basis.T)
        return CurvatureSpectrum(
            direction=u,
            radii=radii,
            hessian_residual=residual,
            contact=self.body_model.contact(body, u),
            smooth=smooth
        )

    def radii_table(self, body: Body, grid: SphereGrid) -> List[CurvatureSpectrum]:
        """Espectros en todos los nodos de la malla."""
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        return [self.principal_radii(body, u) for u in grid.nodes]

    # ------------------------------------------------------------------
    # Dualidad
    # ------------------------------------------------------------------

    def _dual_spectrum(self, dual: Body, v: Direction) -> CurvatureSpectrum:
        """Espectro del dual recalculado por su propia numérica."""
        if isinstance(dual, CDualBody) and contains_ball_intersection(dual):
            hessian, residual, smooth = self.finite_difference_hessian(dual, v)
            return self._spectrum(dual, v, hessian, residual, smooth)
        return self.principal_radii(dual, v)

    def duality_residual(self, body: Body, u: Direction) -> DualityResidual:
        """Residuo de r_i + s_{n−i} = 1 con indicador de suavidad."""
        if self.body_model.is_unit_ball_translate(body) or self.body_model.is_point(body):
            raise UnsupportedBodyError(
                "La dualidad de curvaturas excluye puntos y trasladados de B_2^n (su dual es un punto)"
            )
        u = as_direction(u)
        primal = self.principal_radii(body, u)
        dual = self._dual_spectrum(self.body_model.explicit_dual(body), -u)
        residual = float(np.max(np.abs(primal.radii + dual.radii[::-1] - 1.0)))
        return DualityResidual(direction=u, residual=residual, smooth=primal.smooth and dual.smooth)

    def curvature_duality_residual(self, body: Body, u: Direction) -> float:
        return self.duality_residual(body, u).residual

    def duality_sweep(self, body: Body, grid: SphereGrid) -> List[DualityResidual]:
        """Residuos de dualidad sobre todos los nodos de la malla."""
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        residuals = [self.duality_residual(body, u) for u in grid.nodes]
        flagged = sum(1 for r in residuals if not r.smooth)
        logger.info(
            f"Barrido de dualidad: {len(residuals)} nodos, máximo suave "
            f"{max_smooth_residual(residuals):.3e}, {flagged} nodos marcados"
        )
        return residuals


def max_smooth_residual(residuals: List[DualityResidual]) -> float:
    """Máximo sobre los nodos suaves (0 si no hay ninguno)."""
    values = [r.residual for r in residuals if r.smooth]
    return max(values) if values else 0.0

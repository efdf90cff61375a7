"""
Servicio del modelo de cuerpos: evaluación de funciones soporte, puntos de
contacto, c-dualidad, combinaciones de Minkowski y pertenencia a S_n.
"""
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import optimize

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    Body,
    BodyModelPort,
    CDualBody,
    ContactPoint,
    MembershipViolation,
    MinkowskiBody,
    MinkowskiPart,
    Trig2DBody,
    TrigTerm,
    WEIGHT_SUM_TOL
)
from ballbody.application.input.port.quadrature_port import Direction, QuadraturePort, SphereGrid
from ballbody.application.output.port.ball_intersection_solver_port import (
    BallIntersectionSolverPort,
    ContactSolution,
    PlanarBallIntersectionPort
)
from ballbody.application.service.sphere_quadrature_service import as_direction
from ballbody.utils.config import settings
from ballbody.utils.exceptions import (
    InvalidArgumentError,
    UnsupportedBodyError
)
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

STRUCTURE_TOL = 1e-12
MIN_INRADIUS = 1e-6


def trig_profile(body: Trig2DBody, theta: NDArray[np.float64] | float):
    """
    Valores (h, h', h'') de h(θ) = a + Σ eps_k cos(kθ).

    Args:
        body: Cuerpo trigonométrico
        theta: Ángulo o vector de ángulos

    Returns:
        Tupla (h, dh, d2h) con la forma de theta
    """
    theta = np.asarray(theta, dtype=float)
    h = np.full_like(theta, body.a)
    dh = np.zeros_like(theta)
    d2h = np.zeros_like(theta)
    for term in body.terms:
        h = h + term.eps * np.cos(term.k * theta)
        dh = dh - term.eps * term.k * np.sin(term.k * theta)
        d2h = d2h - term.eps * term.k**2 * np.cos(term.k * theta)
    return h, dh, d2h


def trig_radius(body: Trig2DBody, theta: NDArray[np.float64] | float):
    """Radio de curvatura ρ(θ) = h + h''."""
    h, _, d2h = trig_profile(body, theta)
    return h + d2h


def contains_ball_intersection(body: Body) -> bool:
    """Indica si el árbol del cuerpo contiene una intersección de bolas."""
    if isinstance(body, BallIntersectionBody):
        return True
    if isinstance(body, MinkowskiBody):
        return any(contains_ball_intersection(p.body) for p in body.parts)
    if isinstance(body, CDualBody):
        return contains_ball_intersection(body.of)
    return False


class BodyModelService(BodyModelPort):
    """
    Implementación del modelo de cuerpos sobre funciones soporte.

    Las intersecciones de bolas se delegan en dos solvers: el exacto por
    arcos en el plano y el iterativo para n ≥ 3.
    """

    def __init__(
        self,
        quadrature: QuadraturePort,
        planar_solver: PlanarBallIntersectionPort,
        spatial_solver: BallIntersectionSolverPort
    ):
        """
        Inicializa el servicio.

        Args:
            quadrature: Puerto de cuadratura (mallas de sondeo)
            planar_solver: Solver exacto 2D
            spatial_solver: Solver iterativo nD
        """
        self.quadrature = quadrature
        self.planar_solver = planar_solver
        self.spatial_solver = spatial_solver

    # ------------------------------------------------------------------
    # Función soporte
    # ------------------------------------------------------------------

    def support(self, body: Body, x: Sequence[float]) -> float:
        x = np.asarray(x, dtype=float)
        self._check_dim(body, x)
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            raise InvalidArgumentError("La función soporte requiere x ≠ 0")
        return norm * self._support_unit(body, x / norm)

    def _support_unit(self, body: Body, u: Direction) -> float:
        if isinstance(body, BallBody):
            return float(np.dot(body.center, u)) + body.radius
        if isinstance(body, Trig2DBody):
            h, _, _ = trig_profile(body, np.arctan2(u[1], u[0]))
            return float(h)
        if isinstance(body, BallIntersectionBody):
            return self.contact_solution(body, u).value
        if isinstance(body, MinkowskiBody):
            return float(sum(p.weight * self._support_unit(p.body, u) for p in body.parts))
        if isinstance(body, CDualBody):
            return 1.0 - self._support_unit(body.of, -u)
        raise InvalidArgumentError(f"Tipo de cuerpo desconocido: {type(body).__name__}")

    def support_many(self, body: Body, nodes: NDArray[np.float64]) -> NDArray[np.float64]:
        """
        Función soporte en una matriz (N, n) de direcciones unitarias.
        Vectorizada para las formas cerradas.
        """
        nodes = np.asarray(nodes, dtype=float)
        if isinstance(body, BallBody):
            return nodes @ np.asarray(body.center, dtype=float) + body.radius
        if isinstance(body, Trig2DBody):
            h, _, _ = trig_profile(body, np.arctan2(nodes[:, 1], nodes[:, 0]))
            return h
        if isinstance(body, MinkowskiBody):
            return sum(p.weight * self.support_many(p.body, nodes) for p in body.parts)
        if isinstance(body, CDualBody):
            return 1.0 - self.support_many(body.of, -nodes)
        return np.array([self._support_unit(body, u) for u in nodes])

    # ------------------------------------------------------------------
    # Puntos de contacto
    # ------------------------------------------------------------------

    def contact_point(self, body: Body, u: Direction) -> ContactPoint:
        u = as_direction(u)
        self._check_dim(body, u)
        return ContactPoint(direction=u, point=self.contact(body, u))

    def contact(self, body: Body, u: Direction) -> NDArray[np.float64]:
        """∇h_K(u) sin validar la norma (uso interno y diferencias finitas)."""
        if isinstance(body, BallBody):
            return np.asarray(body.center, dtype=float) + body.radius * u
        if isinstance(body, Trig2DBody):
            theta = float(np.arctan2(u[1], u[0]))
            h, dh, _ = trig_profile(body, theta)
            e = np.array([np.cos(theta), np.sin(theta)])
            e_perp = np.array([-np.sin(theta), np.cos(theta)])
            return float(h) * e + float(dh) * e_perp
        if isinstance(body, BallIntersectionBody):
            return self.contact_solution(body, u).point
        if isinstance(body, MinkowskiBody):
            return sum(p.weight * self.contact(p.body, u) for p in body.parts)
        if isinstance(body, CDualBody):
            # ∇h_K(x) − ∇h_{K^c}(−x) = x/|x|
            return self.contact(body.of, -u) + u
        raise InvalidArgumentError(f"Tipo de cuerpo desconocido: {type(body).__name__}")

    def contact_solution(self, body: BallIntersectionBody, u: Direction) -> ContactSolution:
        """Maximizador del programa convexo con conjunto activo y margen."""
        solver = self.planar_solver if body.dim == 2 else self.spatial_solver
        return solver.solve(body.center_array, np.asarray(u, dtype=float))

    # ------------------------------------------------------------------
    # Construcciones
    # ------------------------------------------------------------------

    def c_dual(self, body: Body) -> Body:
        if self.is_point(body):
            logger.warning("c-dual de un punto: el resultado es un trasladado de B_2^n")
        if isinstance(body, BallBody):
            return BallBody(dim=body.dim, center=body.center, radius=1.0 - body.radius)
        if isinstance(body, CDualBody):
            return body.of
        return CDualBody(of=body)

    def explicit_dual(self, body: Body) -> Body:
        """
        El c-dual expresado en su propia forma cerrada cuando existe.

        - Ball{c, r} → Ball{c, 1 − r}
        - Trig2D(a, eps_k) → Trig2D(1 − a, −(−1)^k eps_k)
        - Minkowski → Minkowski de los duales explícitos
        - CDualOf(K) → K; BallIntersection → CDualOf(BI)
        """
        if isinstance(body, BallBody):
            return BallBody(dim=body.dim, center=body.center, radius=1.0 - body.radius)
        if isinstance(body, Trig2DBody):
            return Trig2DBody(
                a=1.0 - body.a,
                terms=[TrigTerm(k=t.k, eps=-((-1) ** t.k) * t.eps) for t in body.terms]
            )
        if isinstance(body, MinkowskiBody):
            return MinkowskiBody(parts=[
                MinkowskiPart(weight=p.weight, body=self.explicit_dual(p.body)) for p in body.parts
            ])
        if isinstance(body, CDualBody):
            return body.of
        return CDualBody(of=body)

    def reflect(self, body: Body) -> Body:
        """Reflexión −K."""
        if isinstance(body, BallBody):
            return BallBody(dim=body.dim, center=[-c for c in body.center], radius=body.radius)
        if isinstance(body, Trig2DBody):
            return Trig2DBody(
                a=body.a,
                terms=[TrigTerm(k=t.k, eps=((-1) ** t.k) * t.eps) for t in body.terms]
            )
        if isinstance(body, BallIntersectionBody):
            return BallIntersectionBody(
                dim=body.dim,
                centers=[[-x for x in c] for c in body.centers]
            )
        if isinstance(body, MinkowskiBody):
            return MinkowskiBody(parts=[
                MinkowskiPart(weight=p.weight, body=self.reflect(p.body)) for p in body.parts
            ])
        # −K^c = (−K)^c
        return CDualBody(of=self.reflect(body.of))

    def minkowski(self, parts: Sequence[tuple[float, Body]]) -> Body:
        if not parts:
            raise InvalidArgumentError("La combinación de Minkowski requiere al menos un sumando")
        weights = [float(w) for w, _ in parts]
        if any(w < 0 for w in weights):
            raise InvalidArgumentError(f"Pesos negativos: {weights}")
        total = sum(weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            logger.error(f"Pesos de Minkowski suman {total!r}")
            raise InvalidArgumentError(f"Los pesos suman {total!r}, se esperaba 1")
        dims = {b.dim for _, b in parts}
        if len(dims) != 1:
            raise InvalidArgumentError(f"Sumandos con dimensiones distintas: {sorted(dims)}")
        return MinkowskiBody(parts=[MinkowskiPart(weight=w, body=b) for w, b in parts])

    def translate(self, body: Body, shift: Sequence[float]) -> Body:
        """Trasladado K + shift. Trig2D no admite traslaciones (requeriría k = 1)."""
        shift = np.asarray(shift, dtype=float)
        self._check_dim(body, shift)
        if isinstance(body, BallBody):
            return BallBody(dim=body.dim, center=(np.asarray(body.center) + shift).tolist(), radius=body.radius)
        if isinstance(body, BallIntersectionBody):
            return BallIntersectionBody(dim=body.dim, centers=(body.center_array + shift).tolist())
        if isinstance(body, MinkowskiBody):
            return MinkowskiBody(parts=[
                MinkowskiPart(weight=p.weight, body=self.translate(p.body, shift)) for p in body.parts
            ])
        if isinstance(body, CDualBody):
            # (K + s)^c = K^c + s
            return CDualBody(of=self.translate(body.of, shift))
        raise UnsupportedBodyError("Trig2D no admite traslaciones")

    # ------------------------------------------------------------------
    # Pertenencia
    # ------------------------------------------------------------------

    def contains(self, body: Body, p: Sequence[float], tol: float = 0.0) -> bool:
        """
        Ball y BallIntersection: distancias exactas. Resto: ⟨p,u⟩ ≤ h(u) + tol
        sobre la malla fija (aproximación exterior).
        """
        if tol < 0:
            raise InvalidArgumentError(f"tol debe ser ≥ 0 (recibido {tol})")
        p = np.asarray(p, dtype=float)
        self._check_dim(body, p)
        if isinstance(body, BallBody):
            return bool(np.linalg.norm(p - np.asarray(body.center)) <= body.radius + tol)
        if isinstance(body, BallIntersectionBody):
            return bool(np.all(np.linalg.norm(body.center_array - p, axis=1) <= 1.0 + tol))
        grid = self.quadrature.fixed_grid(body.dim)
        gaps = grid.nodes @ p - self.support_many(body, grid.nodes)
        return bool(gaps.max() <= tol)

    def membership_violation(self, body: Body, grid: SphereGrid, tol: float) -> MembershipViolation | None:
        """
        Primer nodo de la malla con radios principales fuera de [−tol, 1+tol].
        """
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        from ballbody.application.service.curvature_service import CurvatureService

        curvature = CurvatureService(self, self.quadrature)
        for u in grid.nodes:
            radii = curvature.principal_radii(body, u).radii
            if radii.min() < -tol or radii.max() > 1.0 + tol:
                violation = MembershipViolation(direction=u, radii=radii)
                logger.warning(f"Cuerpo fuera de S_n: {violation.describe()}")
                return violation
        return None

    def is_ball_body(self, body: Body, grid: SphereGrid, tol: float) -> bool:
        return self.membership_violation(body, grid, tol) is None

    def check_invariants(self, body: Body) -> None:
        """
        Verifica los invariantes de tipo.

        Raises:
            InvalidArgumentError: invariante violado
            UnsupportedBodyError: intersección sin interior (menor dimensión)
        """
        if isinstance(body, BallBody):
            if not 0.0 <= body.radius <= 1.0:
                raise InvalidArgumentError(f"Radio {body.radius} fuera de [0, 1]")
        elif isinstance(body, Trig2DBody):
            theta = 2.0 * np.pi * np.arange(settings.TRIG_CHECK_POINTS) / settings.TRIG_CHECK_POINTS
            rho = trig_radius(body, theta)
            if rho.min() < -STRUCTURE_TOL or rho.max() > 1.0 + STRUCTURE_TOL:
                worst = int(np.argmin(rho)) if rho.min() < -STRUCTURE_TOL else int(np.argmax(rho))
                raise InvalidArgumentError(
                    f"Radio de curvatura ρ(θ={theta[worst]:.6f}) = {rho[worst]:.6f} fuera de [0, 1]"
                )
        elif isinstance(body, BallIntersectionBody):
            centers = body.center_array
            gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
            if gaps.max() >= 2.0:
                raise InvalidArgumentError(f"Centros a distancia {gaps.max():.6f} ≥ 2")
            inradius = self.chebyshev_inradius(centers)
            if inradius < MIN_INRADIUS:
                raise UnsupportedBodyError(
                    f"La intersección no tiene interior (inradio {inradius:.3e} < {MIN_INRADIUS})"
                )
        elif isinstance(body, MinkowskiBody):
            for part in body.parts:
                self.check_invariants(part.body)
        elif isinstance(body, CDualBody):
            if self.is_point(body.of):
                raise InvalidArgumentError("CDualOf requiere un cuerpo interior que no sea un punto")
            self.check_invariants(body.of)

    @staticmethod
    def chebyshev_inradius(centers: NDArray[np.float64]) -> float:
        """
        Inradio de ∩(c_j + B): 1 − R con R el radio de la bola mínima que
        encierra a los centros (SLSQP sobre (z, R²)).
        """
        centers = np.asarray(centers, dtype=float)
        if len(centers) == 1:
            return 1.0
        start_center = centers.mean(axis=0)
        start = np.append(start_center, np.max(np.sum((centers - start_center) ** 2, axis=1)))

        constraints = [{
            "type": "ineq",
            "fun": lambda v: v[-1] - np.sum((centers - v[:-1]) ** 2, axis=1)
        }]
        result = optimize.minimize(
            lambda v: v[-1],
            start,
            method="SLSQP",
            constraints=constraints,
            options={"ftol": 1e-14, "maxiter": 500}
        )
        z = result.x[:-1]
        radius = float(np.max(np.linalg.norm(centers - z, axis=1)))
        return 1.0 - radius

    # ------------------------------------------------------------------
    # Detectores estructurales
    # ------------------------------------------------------------------

    def is_point(self, body: Body) -> bool:
        """Cuerpo reducido a un punto (excluido por los teoremas)."""
        if isinstance(body, BallBody):
            return body.radius <= STRUCTURE_TOL
        if isinstance(body, Trig2DBody):
            return abs(body.a) <= STRUCTURE_TOL and all(abs(t.eps) <= STRUCTURE_TOL for t in body.terms)
        if isinstance(body, BallIntersectionBody):
            return False
        if isinstance(body, MinkowskiBody):
            return all(self.is_point(p.body) for p in body.parts if p.weight > 0)
        return self.is_unit_ball_translate(body.of)

    def is_unit_ball_translate(self, body: Body) -> bool:
        """Cuerpo igual a x + B_2^n (su c-dual es un punto)."""
        if isinstance(body, BallBody):
            return abs(body.radius - 1.0) <= STRUCTURE_TOL
        if isinstance(body, Trig2DBody):
            return abs(body.a - 1.0) <= STRUCTURE_TOL and all(abs(t.eps) <= STRUCTURE_TOL for t in body.terms)
        if isinstance(body, BallIntersectionBody):
            centers = body.center_array
            return bool(np.all(np.linalg.norm(centers - centers[0], axis=1) <= STRUCTURE_TOL))
        if isinstance(body, MinkowskiBody):
            return all(self.is_unit_ball_translate(p.body) for p in body.parts if p.weight > 0)
        return self.is_point(body.of)

    @staticmethod
    def _check_dim(body: Body, x: NDArray[np.float64]) -> None:
        if x.shape != (body.dim,):
            raise InvalidArgumentError(f"Vector de forma {x.shape} para un cuerpo de dimensión {body.dim}")

"""
Servicio de funcionales: cuadraturas de Ω^c, Ω, S, M* y volumen, con
oráculos cerrados para bolas y caminos exactos 2D para intersecciones.
"""
import numpy as np
from numpy.typing import NDArray
from scipy import special

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    Body,
    CDualBody,
    MinkowskiBody,
    Trig2DBody
)
from ballbody.application.input.port.functionals_port import FunctionalReport, FunctionalsPort
from ballbody.application.input.port.quadrature_port import QuadraturePort, SphereGrid
from ballbody.application.output.port.ball_intersection_solver_port import PlanarBallIntersectionPort
from ballbody.application.service.body_model_service import (
    BodyModelService,
    contains_ball_intersection,
    trig_radius
)
from ballbody.application.service.curvature_service import CurvatureService
from ballbody.utils.config import settings
from ballbody.utils.exceptions import InvalidArgumentError, SelfCheckError, UnsupportedBodyError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

SELF_CHECK_TOL = 1e-4


def sphere_surface(n: int) -> float:
    """ω_n = Vol_{n−1}(S^{n−1}) = 2π^{n/2}/Γ(n/2)."""
    if n < 1:
        raise InvalidArgumentError(f"n debe ser ≥ 1 (recibido {n})")
    return float(2.0 * np.pi ** (n / 2.0) / special.gamma(n / 2.0))


def ball_volume(n: int) -> float:
    """Vol_n(B_2^n) = ω_n/n."""
    return sphere_surface(n) / n


def lower_ball_volume(n: int) -> float:
    """Vol_{n−1}(B_2^{n−1}) = π^{(n−1)/2}/Γ((n+1)/2)."""
    return float(np.pi ** ((n - 1) / 2.0) / special.gamma((n + 1) / 2.0))


def _check_ball_args(n: int, r: float) -> None:
    if n < 2:
        raise InvalidArgumentError(f"n debe ser ≥ 2 (recibido {n})")
    if not 0.0 <= r <= 1.0:
        raise InvalidArgumentError(f"r debe estar en [0, 1] (recibido {r})")


def omega_c_exponents(n: int) -> tuple[float, float]:
    """Exponentes (n/(n+1), 1/(n+1)) del integrando de Ω^c."""
    return n / (n + 1.0), 1.0 / (n + 1.0)


class FunctionalsService(FunctionalsPort):
    """
    Implementación de los funcionales sobre la tabla de radios principales.
    """

    def __init__(
        self,
        body_model: BodyModelService,
        curvature: CurvatureService,
        quadrature: QuadraturePort,
        planar_solver: PlanarBallIntersectionPort
    ):
        """
        Inicializa el servicio.

        Args:
            body_model: Servicio del modelo de cuerpos
            curvature: Servicio de curvatura
            quadrature: Puerto de cuadratura
            planar_solver: Solver exacto 2D (áreas y perímetros de arcos)
        """
        self.body_model = body_model
        self.curvature = curvature
        self.quadrature = quadrature
        self.planar_solver = planar_solver

    # ------------------------------------------------------------------
    # Tabla de radios
    # ------------------------------------------------------------------

    def radii(self, body: Body, grid: SphereGrid) -> NDArray[np.float64]:
        """
        Matriz (N, n−1) de radios principales sin recortar.
        Vectorizada cuando hay forma cerrada isotrópica o en el plano.
        """
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        fast = self.closed_form_radii(body, grid.nodes)
        if fast is not None:
            return fast
        return np.array([spectrum.radii for spectrum in self.curvature.radii_table(body, grid)])

    def closed_form_radii(self, body: Body, nodes: NDArray[np.float64]) -> NDArray[np.float64] | None:
        """Radios en forma cerrada para formas suaves; None si hace falta el Hessiano nodo a nodo."""
        count, n = nodes.shape
        if isinstance(body, BallBody):
            return np.full((count, n - 1), body.radius)
        if isinstance(body, Trig2DBody):
            return trig_radius(body, np.arctan2(nodes[:, 1], nodes[:, 0]))[:, None]
        if isinstance(body, CDualBody):
            inner = self.closed_form_radii(body.of, -nodes)
            return None if inner is None else 1.0 - inner[:, ::-1]
        if isinstance(body, MinkowskiBody):
            # Suma de Hessianos: válida con partes isotrópicas o en el plano
            if n != 2 and not all(isinstance(p.body, BallBody) for p in body.parts):
                return None
            parts = [self.closed_form_radii(p.body, nodes) for p in body.parts]
            if any(part is None for part in parts):
                return None
            return sum(p.weight * part for p, part in zip(body.parts, parts))
        return None

    @staticmethod
    def clamp(radii: NDArray[np.float64]) -> tuple[NDArray[np.float64], int]:
        """Recorta a [0, 1] y cuenta nodos con recortes mayores que CLAMP_REPORT_THRESHOLD."""
        clamped = np.clip(radii, 0.0, 1.0)
        excess = np.abs(clamped - radii).max(axis=1)
        count = int(np.sum(excess > settings.CLAMP_REPORT_THRESHOLD))
        if count:
            logger.warning(f"Radios recortados a [0, 1] en {count} nodos (máximo {excess.max():.3e})")
        return clamped, count

    def _require_not_point(self, body: Body) -> None:
        if self.body_model.is_point(body):
            logger.error("Funcional c-afín pedido para un punto")
            raise UnsupportedBodyError("Ω^c y Ω no están definidos para un cuerpo que es un punto")

    # ------------------------------------------------------------------
    # Funcionales
    # ------------------------------------------------------------------

    def radii_power_integral(self, body: Body, grid: SphereGrid, alpha: float, beta: float) -> float:
        """
        F(K) = ω_n ∫ ∏ r_i^α (1 − r_i)^β dσ con radios recortados.
        """
        self._require_not_point(body)
        clamped, _ = self.clamp(self.radii(body, grid))
        return self._power_quadrature(grid, clamped, alpha, beta)

    def _power_quadrature(self, grid, clamped, alpha, beta) -> float:
        integrand = np.prod(clamped**alpha * (1.0 - clamped) ** beta, axis=1)
        return sphere_surface(grid.dim) * self.quadrature.integrate_values(grid, integrand)

    def omega_c(self, body: Body, grid: SphereGrid) -> float:
        self._require_not_point(body)
        alpha, beta = omega_c_exponents(body.dim)
        value = self.radii_power_integral(body, grid, alpha, beta)
        return self._structural_check(body, value)

    def _structural_check(self, body: Body, value: float) -> float:
        """
        En el plano, los politopos de bolas y sus duales tienen radios 0 o 1:
        Ω^c es exactamente 0 y la cuadratura debe coincidir.
        """
        if body.dim != 2 or not self.is_ball_polytope_like(body):
            return value
        if abs(value) > SELF_CHECK_TOL:
            logger.error(f"Autochequeo fallido: Ω^c por cuadratura {value:.3e} frente a 0 estructural")
            raise SelfCheckError(
                f"La cuadratura de Ω^c ({value:.3e}) no coincide con el cero estructural"
            )
        logger.debug(f"Ω^c estructural = 0 (cuadratura {value:.3e})")
        return 0.0

    def is_ball_polytope_like(self, body: Body) -> bool:
        """Intersección de bolas o c-dual de una (radios en {0, 1})."""
        if isinstance(body, BallIntersectionBody):
            return True
        if isinstance(body, CDualBody):
            return self.is_ball_polytope_like(body.of)
        return False

    def omega_classical(self, body: Body, grid: SphereGrid) -> float:
        self._require_not_point(body)
        alpha, _ = omega_c_exponents(body.dim)
        return self.radii_power_integral(body, grid, alpha, 0.0)

    def surface_area(self, body: Body, grid: SphereGrid) -> float:
        if body.dim == 2 and contains_ball_intersection(body):
            return self.exact_perimeter(body)
        return self._surface_quadrature(grid, self.radii(body, grid))

    def _surface_quadrature(self, grid, radii) -> float:
        products = np.prod(radii, axis=1)
        negative = int(np.sum(products < 0))
        if negative:
            logger.warning(f"Producto de radios negativo en {negative} nodos")
        return sphere_surface(grid.dim) * self.quadrature.integrate_values(grid, products)

    def exact_perimeter(self, body: Body) -> float:
        """Perímetro exacto en el plano por recursión sobre el árbol del cuerpo."""
        if body.dim != 2:
            raise InvalidArgumentError("El perímetro exacto solo está disponible en el plano")
        if isinstance(body, BallBody):
            return 2.0 * np.pi * body.radius
        if isinstance(body, Trig2DBody):
            return 2.0 * np.pi * body.a
        if isinstance(body, BallIntersectionBody):
            return self.planar_solver.perimeter(body.center_array)
        if isinstance(body, MinkowskiBody):
            return float(sum(p.weight * self.exact_perimeter(p.body) for p in body.parts))
        return 2.0 * np.pi - self.exact_perimeter(body.of)

    def mean_width_half(self, body: Body, grid: SphereGrid) -> float:
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        return self.quadrature.integrate_values(grid, self.body_model.support_many(body, grid.nodes))

    def volume(self, body: Body, grid: SphereGrid) -> float:
        exact = self._exact_planar_volume(body)
        if exact is not None:
            return exact
        support = self.body_model.support_many(body, grid.nodes)
        return self._volume_quadrature(grid, support, self.radii(body, grid))

    def _volume_quadrature(self, grid, support, radii) -> float:
        integrand = support * np.prod(radii, axis=1)
        return ball_volume(grid.dim) * self.quadrature.integrate_values(grid, integrand)

    def _exact_planar_volume(self, body: Body) -> float | None:
        """Área exacta de un polígono de discos o de su c-dual; None fuera de esos casos."""
        if body.dim != 2:
            return None
        if isinstance(body, BallIntersectionBody):
            return self.planar_solver.area(body.center_array)
        if isinstance(body, CDualBody) and isinstance(body.of, BallIntersectionBody):
            # K^c es la intersección de los discos centrados en los vértices de K
            vertices = self.planar_solver.vertices(body.of.center_array)
            return self.planar_solver.area(vertices) if len(vertices) else 0.0
        return None

    # ------------------------------------------------------------------
    # Oráculos cerrados para bolas
    # ------------------------------------------------------------------

    def omega_c_ball(self, n: int, r: float) -> float:
        _check_ball_args(n, r)
        return sphere_surface(n) * (1.0 - r) ** ((n - 1) / (n + 1)) * r ** (n * (n - 1) / (n + 1))

    def omega_classical_ball(self, n: int, r: float) -> float:
        _check_ball_args(n, r)
        return sphere_surface(n) * r ** (n * (n - 1) / (n + 1))

    def surface_ball(self, n: int, r: float) -> float:
        _check_ball_args(n, r)
        return sphere_surface(n) * r ** (n - 1)

    def volume_ball(self, n: int, r: float) -> float:
        _check_ball_args(n, r)
        return ball_volume(n) * r**n

    def santalo_ball_product(self, n: int, r: float) -> float:
        """Ω^c(rB)·Ω^c((1−r)B) = ω_n² (r(1−r))^{n−1}."""
        _check_ball_args(n, r)
        return sphere_surface(n) ** 2 * (r * (1.0 - r)) ** (n - 1)

    # ------------------------------------------------------------------
    # Reporte
    # ------------------------------------------------------------------

    def report(self, body: Body, grid: SphereGrid) -> FunctionalReport:
        self._require_not_point(body)
        logger.info(f"Calculando funcionales sobre {grid.size} nodos ({grid.scheme.value})")
        radii = self.radii(body, grid)
        clamped, clamp_count = self.clamp(radii)
        support = self.body_model.support_many(body, grid.nodes)
        alpha, beta = omega_c_exponents(body.dim)
        exact_paths = []

        omega_c = self._structural_check(body, self._power_quadrature(grid, clamped, alpha, beta))
        if body.dim == 2 and self.is_ball_polytope_like(body):
            exact_paths.append("omega_c")

        if body.dim == 2 and contains_ball_intersection(body):
            surface = self.exact_perimeter(body)
            exact_paths.append("surface_area")
        else:
            surface = self._surface_quadrature(grid, radii)

        volume = self._exact_planar_volume(body)
        if volume is not None:
            exact_paths.append("volume")
        else:
            volume = self._volume_quadrature(grid, support, radii)

        report = FunctionalReport(
            dim=body.dim,
            omega_c=omega_c,
            omega_classical=self._power_quadrature(grid, clamped, alpha, 0.0),
            surface_area=surface,
            mean_width_half=self.quadrature.integrate_values(grid, support),
            volume=volume,
            grid_scheme=grid.descriptor(),
            clamp_count=clamp_count,
            exact_paths=exact_paths
        )
        logger.info(f"Ω^c = {report.omega_c:.12g}, S = {report.surface_area:.12g}")
        return report

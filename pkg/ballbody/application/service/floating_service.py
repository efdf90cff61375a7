"""
Servicio del cuerpo flotante: áreas de corte en el plano, bisección por
dirección y ajuste de la ley límite del déficit de volumen.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import integrate, optimize, spatial

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    Body,
    Trig2DBody
)
from ballbody.application.input.port.floating_port import (
    CutterKind,
    FloatingPort,
    FloatingResult,
    LimitEstimate,
    SweepRow
)
from ballbody.application.input.port.quadrature_port import GridScheme, QuadraturePort
from ballbody.application.output.port.ball_intersection_solver_port import PlanarBallIntersectionPort
from ballbody.application.service.body_model_service import BodyModelService, trig_profile
from ballbody.application.service.functionals_service import FunctionalsService, lower_ball_volume
from ballbody.utils.config import settings
from ballbody.utils.exceptions import (
    EmptyBodyError,
    GeometryError,
    InvalidArgumentError,
    UnsupportedBodyError
)
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

TWO_PI = 2.0 * np.pi
BISECTION_REL_TOL = 1e-4
BISECTION_MAX_ITER = 200
MIN_DIRECTIONS = 64
RADIUS_MARGIN = 1e-3
SIGN_TOL = 1e-12
GAUSS_NODES = 64
CONTAINMENT_DIRECTIONS = 512
CONTAINMENT_TOL = 1e-9


class _Boundary:
    """Frontera muestreada x(θ) de un cuerpo plano suave, con θ el ángulo normal."""

    def __init__(self, service: "FloatingService", body: Body, samples: int):
        self.service = service
        self.body = body
        self.theta = TWO_PI * np.arange(samples) / samples
        self.points = self.contact(self.theta)

    @staticmethod
    def normals(theta) -> NDArray[np.float64]:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.column_stack([np.cos(theta), np.sin(theta)])

    def contact(self, theta) -> NDArray[np.float64]:
        nodes = self.normals(theta)
        if isinstance(self.body, BallBody):
            return np.asarray(self.body.center) + self.body.radius * nodes
        if isinstance(self.body, Trig2DBody):
            h, dh, _ = trig_profile(self.body, np.arctan2(nodes[:, 1], nodes[:, 0]))
            tangents = nodes @ np.array([[0.0, 1.0], [-1.0, 0.0]])
            return h[:, None] * nodes + dh[:, None] * tangents
        return np.array([self.service.body_model.contact(self.body, u) for u in nodes])

    def arc_area(self, start: float, end: float) -> float:
        """½∫ h·ρ dθ entre dos ángulos normales (end > start)."""
        def integrand(theta):
            nodes = self.normals(theta)
            h = self.service.body_model.support_many(self.body, nodes)
            rho = self.service.functionals.closed_form_radii(self.body, nodes)[:, 0]
            return 0.5 * h * rho

        value, _ = integrate.fixed_quad(integrand, start, end, n=GAUSS_NODES)
        return float(value)

    def crossings(self, level: Callable[[NDArray[np.float64]], NDArray[np.float64]]):
        """
        Ángulos (entrada, salida) del tramo de frontera con level(x(θ)) > 0,
        o "inside"/"outside" si la frontera no cruza el nivel.
        """
        outside = level(self.points) > SIGN_TOL
        if outside.all():
            return "outside"
        if not outside.any():
            return "inside"
        change = np.flatnonzero(outside != np.roll(outside, -1))
        if len(change) != 2:
            raise GeometryError(f"Se esperaban 2 cruces de frontera, hay {len(change)}")

        def shifted(theta: float) -> float:
            return float(level(self.contact(theta))[0]) - SIGN_TOL

        roots = {}
        step = TWO_PI / len(self.theta)
        for k in change:
            lo = self.theta[k]
            root = optimize.brentq(shifted, lo, lo + step, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            roots["leave" if outside[k] else "enter"] = root
        start = roots["enter"]
        return start, start + (roots["leave"] - start) % TWO_PI


class FloatingService(FloatingPort):
    """
    Implementación del cuerpo flotante en dimensión 2.
    """

    def __init__(
        self,
        body_model: BodyModelService,
        functionals: FunctionalsService,
        quadrature: QuadraturePort,
        planar_solver: PlanarBallIntersectionPort,
        threads: int | None = None,
        cache_size: int = 256
    ):
        """
        Inicializa el servicio.

        Args:
            body_model: Servicio del modelo de cuerpos
            functionals: Servicio de funcionales (áreas y objetivos)
            quadrature: Puerto de cuadratura
            planar_solver: Solver exacto 2D
            threads: Hilos para las bisecciones por dirección
            cache_size: Número de fronteras muestreadas memorizadas
        """
        self.body_model = body_model
        self.functionals = functionals
        self.quadrature = quadrature
        self.planar_solver = planar_solver
        self.threads = threads or settings.BALLBODY_THREADS
        self.cache_size = cache_size
        self._boundaries: dict[str, _Boundary] = {}

    # ------------------------------------------------------------------
    # Áreas
    # ------------------------------------------------------------------

    def area(self, body: Body) -> float:
        """Área exacta cuando hay forma cerrada; cuadratura espectral si no."""
        self._require_planar(body)
        if isinstance(body, BallBody):
            return np.pi * body.radius**2
        if isinstance(body, Trig2DBody):
            coefficients: dict[int, float] = {}
            for term in body.terms:
                coefficients[term.k] = coefficients.get(term.k, 0.0) + term.eps
            return float(np.pi * body.a**2 + 0.5 * np.pi * sum(
                eps**2 * (1 - k**2) for k, eps in coefficients.items()
            ))
        if isinstance(body, BallIntersectionBody):
            return self.planar_solver.area(body.center_array)
        grid = self.quadrature.make_grid(2, settings.CUT_BOUNDARY_SAMPLES, GridScheme.UNIFORM_ANGLE_2D)
        return self.functionals.volume(body, grid)

    @staticmethod
    def _require_planar(body: Body) -> None:
        if body.dim != 2:
            raise UnsupportedBodyError(f"El cuerpo flotante solo está implementado en el plano (dim={body.dim})")

    def _boundary(self, body: Body) -> _Boundary:
        if self.functionals.closed_form_radii(body, np.array([[1.0, 0.0]])) is None:
            raise UnsupportedBodyError(
                f"Corte por arcos no disponible para {type(body).__name__}; "
                "se requiere un cuerpo suave con radio de curvatura cerrado"
            )
        key = body.model_dump_json()
        if key not in self._boundaries:
            if len(self._boundaries) >= self.cache_size:
                self._boundaries.pop(next(iter(self._boundaries)))
            self._boundaries[key] = _Boundary(self, body, settings.CUT_BOUNDARY_SAMPLES)
        return self._boundaries[key]

    def cut_volume(self, body: Body, center: Sequence[float]) -> float:
        self._require_planar(body)
        center = np.asarray(center, dtype=float)
        if center.shape != (2,):
            raise InvalidArgumentError(f"Centro de forma {center.shape}, se esperaba (2,)")

        if isinstance(body, BallIntersectionBody):
            total = self.planar_solver.area(body.center_array)
            try:
                kept = self.planar_solver.area(np.vstack([body.center_array, center]))
            except EmptyBodyError:
                kept = 0.0
            return total - kept

        boundary = self._boundary(body)
        crossing = boundary.crossings(lambda x: np.sum((x - center) ** 2, axis=1) - 1.0)
        if crossing == "inside":
            return 0.0
        if crossing == "outside":
            return self.area(body)

        start, end = crossing
        p1, p2 = boundary.contact(start)[0], boundary.contact(end)[0]
        psi1 = np.arctan2(*(p1 - center)[::-1])
        psi2 = np.arctan2(*(p2 - center)[::-1])
        span = (psi2 - psi1) % TWO_PI
        circle = 0.5 * (
            span
            + center[0] * (np.sin(psi1 + span) - np.sin(psi1))
            - center[1] * (np.cos(psi1 + span) - np.cos(psi1))
        )
        return boundary.arc_area(start, end) - circle

    def cap_volume(self, body: Body, u: NDArray[np.float64], level: float) -> float:
        """Área de {y ∈ K : ⟨y,u⟩ > level} (corte por semiplano)."""
        self._require_planar(body)
        boundary = self._boundary(body)
        crossing = boundary.crossings(lambda x: x @ u - level)
        if crossing == "inside":
            return 0.0
        if crossing == "outside":
            return self.area(body)
        start, end = crossing
        p1, p2 = boundary.contact(start)[0], boundary.contact(end)[0]
        # Cuerda de vuelta p2 → p1
        return boundary.arc_area(start, end) + 0.5 * (p2[0] * p1[1] - p2[1] * p1[0])

    # ------------------------------------------------------------------
    # Cuerpo flotante
    # ------------------------------------------------------------------

    def _bisect(self, cut: Callable[[float], float], delta: float, bracket, u) -> float:
        """
        Bisección de un corte decreciente en el parámetro. `bracket` da los
        extremos con sus valores conocidos (tangencias, no se evalúan).
        """
        (lo, cut_lo), (hi, cut_hi) = bracket
        if not cut_lo > delta > cut_hi:
            logger.error(f"Bisección sin intervalo válido en u={np.round(u, 6).tolist()}")
            raise GeometryError(
                f"No hay intervalo de bisección para δ={delta} en la dirección {np.round(u, 6).tolist()}",
                direction=u
            )
        for _ in range(BISECTION_MAX_ITER):
            mid = 0.5 * (lo + hi)
            try:
                value = cut(mid)
            except GeometryError as e:
                logger.error(f"Corte degenerado en u={np.round(u, 6).tolist()}: {str(e)}")
                raise GeometryError(str(e), direction=u)
            if abs(value - delta) < delta * BISECTION_REL_TOL:
                return mid
            if value > delta:
                lo = mid
            else:
                hi = mid
        raise GeometryError(f"La bisección no alcanzó la tolerancia en {np.round(u, 6).tolist()}", direction=u)

    def _ball_offset(self, body: Body, u: NDArray[np.float64], delta: float, total: float):
        contact = self.body_model.contact(body, u)

        # Bola unitaria sobre la normal en x(u): tangente por fuera en t=0, contiene K en t=2
        def center(t: float) -> NDArray[np.float64]:
            return contact + (1.0 - t) * u

        t = self._bisect(
            lambda t: self.cut_volume(body, center(t)),
            delta,
            ((0.0, total), (2.0, 0.0)),
            u
        )
        return t, center(t)

    def _plane_offset(self, body: Body, u: NDArray[np.float64], delta: float, total: float):
        low = self.body_model.support(body, -u)
        width = self.body_model.support(body, u) + low
        # Semiplano {⟨y,u⟩ ≤ q − h(−u)}: corta todo K en q=0 y nada en q=ancho
        q = self._bisect(
            lambda q: self.cap_volume(body, u, q - low),
            delta,
            ((0.0, total), (width, 0.0)),
            u
        )
        return q, q - low

    def _directions(self, m: int) -> NDArray[np.float64]:
        return self.quadrature.make_grid(2, m, GridScheme.UNIFORM_ANGLE_2D, offset=0.0).nodes

    def _map(self, fn, items) -> list:
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def floating_body(
        self,
        body: Body,
        delta: float,
        m: int,
        cutter: CutterKind = CutterKind.UNIT_BALL,
        relative: bool = False
    ) -> FloatingResult:
        """
        Para cada una de las m direcciones se bisecta el corte hasta
        |corte − δ| < δ·1e−4; F es la intersección de las m bolas (o semiplanos).
        """
        self._require_planar(body)
        if m < MIN_DIRECTIONS:
            raise InvalidArgumentError(f"Se requieren al menos {MIN_DIRECTIONS} direcciones (recibido {m})")
        self._check_radii(body, cutter)

        total = self.area(body)
        absolute = delta * total if relative else delta
        if not 0.0 < absolute < total / 4.0:
            raise InvalidArgumentError(f"δ={absolute} fuera de (0, Vol(K)/4 = {total / 4.0})")

        directions = self._directions(m)
        if cutter == CutterKind.UNIT_BALL:
            solutions = self._map(lambda u: self._ball_offset(body, u, absolute, total), directions)
            centers = np.array([c for _, c in solutions])
            floating = BallIntersectionBody(dim=2, centers=centers.tolist())
            floating_volume = self.planar_solver.area(centers)
            self._check_contained(body, lambda nodes: self.body_model.support_many(floating, nodes))
        else:
            solutions = self._map(lambda u: self._plane_offset(body, u, absolute, total), directions)
            floating = None
            vertices = self._polygon(directions, np.array([level for _, level in solutions]))
            floating_volume = float(spatial.ConvexHull(vertices).volume)
            self._check_contained(body, lambda nodes: (nodes @ vertices.T).max(axis=1))

        deficit = total - floating_volume
        result = FloatingResult(
            delta=absolute,
            body=floating,
            body_volume=total,
            floating_volume=floating_volume,
            volume_deficit=deficit,
            ratio=deficit / absolute ** (2.0 / 3.0),
            directions_used=m,
            cutter=cutter,
            offsets=[float(t) for t, _ in solutions]
        )
        logger.info(f"δ={absolute:.3e}: déficit {deficit:.6e}, cociente {result.ratio:.6f} ({cutter.value})")
        return result

    def _check_radii(self, body: Body, cutter: CutterKind) -> None:
        grid = self.quadrature.make_grid(2, settings.CUT_BOUNDARY_SAMPLES, GridScheme.UNIFORM_ANGLE_2D)
        radii = self.functionals.closed_form_radii(body, grid.nodes)
        if radii is None:
            raise UnsupportedBodyError("El cuerpo flotante requiere un cuerpo suave (Ball, Trig2D o combinaciones)")
        if cutter == CutterKind.UNIT_BALL:
            if radii.max() > 1.0 + settings.CURVATURE_TOL:
                raise InvalidArgumentError(f"Radio de curvatura {radii.max():.6f} > 1: el cuerpo no está en S_2")
            if radii.max() > 1.0 - RADIUS_MARGIN:
                logger.error(f"Radio de curvatura {radii.max():.6f} por encima de 1 − {RADIUS_MARGIN}")
                raise InvalidArgumentError(
                    f"Radio de curvatura {radii.max():.6f} > 1 − {RADIUS_MARGIN}: "
                    "la ley límite requiere curvaturas estrictamente mayores que 1"
                )

    def _check_contained(
        self,
        body: Body,
        floating_support: Callable[[NDArray[np.float64]], NDArray[np.float64]]
    ) -> None:
        """F ⊆ K muestreado: h_F ≤ h_K en CONTAINMENT_DIRECTIONS direcciones desplazadas de las de corte."""
        nodes = self.quadrature.make_grid(2, CONTAINMENT_DIRECTIONS, GridScheme.UNIFORM_ANGLE_2D).nodes
        excess = floating_support(nodes) - self.body_model.support_many(body, nodes)
        worst = int(np.argmax(excess))
        if excess[worst] > CONTAINMENT_TOL:
            u = nodes[worst]
            logger.error(f"Cuerpo flotante fuera de K en u={np.round(u, 6).tolist()}: exceso {excess[worst]:.3e}")
            raise GeometryError(
                f"El cuerpo flotante no está contenido en K (exceso {excess[worst]:.3e}); "
                "aumente el número de direcciones",
                direction=u
            )

    @staticmethod
    def _polygon(directions: NDArray[np.float64], levels: NDArray[np.float64]) -> NDArray[np.float64]:
        """Vértices de ∩{⟨y,u_k⟩ ≤ level_k} por HalfspaceIntersection."""
        halfspaces = np.column_stack([directions, -levels])
        # Punto interior: centro de Chebyshev del polígono
        norms = np.linalg.norm(directions, axis=1)
        lp = optimize.linprog(
            c=[0.0, 0.0, -1.0],
            A_ub=np.column_stack([directions, norms]),
            b_ub=levels,
            bounds=[(None, None), (None, None), (0.0, None)]
        )
        if not lp.success or lp.x[2] <= 0:
            raise GeometryError("El polígono de semiplanos no tiene interior")
        return spatial.HalfspaceIntersection(halfspaces, lp.x[:2]).intersections

    # ------------------------------------------------------------------
    # Ley límite
    # ------------------------------------------------------------------

    def limit_estimate(
        self,
        body: Body,
        deltas: Sequence[float],
        m: int,
        cutter: CutterKind = CutterKind.UNIT_BALL
    ) -> LimitEstimate:
        """
        Ajuste por mínimos cuadrados de ratio(δ) = L + a·δ^{1/3}.
        """
        deltas = [float(d) for d in deltas]
        if len(deltas) < 4:
            raise InvalidArgumentError(f"Se requieren al menos 4 valores de δ (recibidos {len(deltas)})")
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise InvalidArgumentError("Los valores de δ deben ser decrecientes")
        if deltas[0] / deltas[-1] < 100.0:
            raise InvalidArgumentError("Los valores de δ deben abarcar al menos dos décadas")

        results = [self.floating_body(body, d, m, cutter) for d in deltas]
        ratios = np.array([r.ratio for r in results])
        design = np.column_stack([np.ones(len(deltas)), np.array(deltas) ** (1.0 / 3.0)])
        (estimate, slope), *_ = np.linalg.lstsq(design, ratios, rcond=None)
        residual = float(np.sqrt(np.mean((design @ np.array([estimate, slope]) - ratios) ** 2)))
        logger.info(f"Límite estimado {estimate:.6f} (residuo del ajuste {residual:.2e})")
        return LimitEstimate(estimate=float(estimate), slope=float(slope), fit_residual=residual, results=results)

    def floating_constant(self, n: int) -> float:
        if n < 2:
            raise InvalidArgumentError(f"n debe ser ≥ 2 (recibido {n})")
        return 0.5 * ((n + 1) / lower_ball_volume(n)) ** (2.0 / (n + 1))

    def target(self, body: Body, cutter: CutterKind) -> float:
        """Valor límite predicho: c_2·Ω^c(K) (bolas) o c_2·Ω(K) (semiplanos)."""
        grid = self.quadrature.make_grid(2, settings.DEFAULT_RESOLUTION, GridScheme.UNIFORM_ANGLE_2D)
        functional = (
            self.functionals.omega_c(body, grid)
            if cutter == CutterKind.UNIT_BALL
            else self.functionals.omega_classical(body, grid)
        )
        return self.floating_constant(2) * functional

    def sweep(
        self,
        body: Body,
        deltas: Sequence[float],
        m: int,
        cutter: CutterKind = CutterKind.UNIT_BALL
    ) -> List[SweepRow]:
        """Filas del barrido CSV con el ajuste y el objetivo teórico."""
        fit = self.limit_estimate(body, deltas, m, cutter)
        target = self.target(body, cutter)
        rel_error = abs(fit.estimate - target) / target if target > 0 else float("nan")
        return [
            SweepRow(
                delta=r.delta,
                deficit=r.volume_deficit,
                ratio=r.ratio,
                directions=r.directions_used,
                fit_estimate=fit.estimate,
                target=target,
                rel_error=rel_error
            )
            for r in fit.results
        ]

"""
Servicio de desigualdades: registros lhs ≤ rhs para cada desigualdad,
búsqueda del maximizador de Ω^c y barrido alrededor de r = ½.
"""
from functools import cached_property
from typing import Iterable, List, Tuple

import numpy as np
from scipy import optimize

from ballbody.application.input.port.body_port import BallBody, Body, Trig2DBody, TrigTerm, dump_body
from ballbody.application.input.port.inequality_port import (
    DUAL_KINDS,
    EvaluationPath,
    ExtremalResult,
    InequalityKind,
    InequalityPort,
    InequalityRecord,
    ScanResult
)
from ballbody.application.input.port.quadrature_port import GridScheme, QuadraturePort, SphereGrid
from ballbody.application.service.body_model_service import BodyModelService, contains_ball_intersection
from ballbody.application.service.curvature_service import CurvatureService, max_smooth_residual
from ballbody.application.service.functionals_service import (
    FunctionalsService,
    ball_volume,
    omega_c_exponents,
    sphere_surface
)
from ballbody.utils.config import settings
from ballbody.utils.exceptions import InvalidArgumentError, UnsupportedBodyError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

NEAR_EQUALITY_FACTOR = 10.0
REJECTED_STEP_PENALTY = 1e6
TRIG_SEARCH_RESOLUTION = 256
TRIG_SEARCH_START = (0.5, 0.05)


class _Evaluation:
    """Funcionales de K y K^c calculados una sola vez por verificación."""

    def __init__(self, service: "InequalityService", body: Body, grid: SphereGrid):
        self.service = service
        self.body = body
        self.grid = grid
        self.n = body.dim

    @cached_property
    def dual(self) -> Body:
        return self.service.body_model.c_dual(self.body)

    @cached_property
    def omega_c(self) -> float:
        return self.service.functionals.omega_c(self.body, self.grid)

    @cached_property
    def omega_c_dual(self) -> float:
        return self.service.functionals.omega_c(self.dual, self.grid)

    @cached_property
    def omega(self) -> float:
        return self.service.functionals.omega_classical(self.body, self.grid)

    @cached_property
    def surface(self) -> float:
        return self.service.functionals.surface_area(self.body, self.grid)

    @cached_property
    def surface_dual(self) -> float:
        return self.service.functionals.surface_area(self.dual, self.grid)

    @cached_property
    def mean_width(self) -> float:
        return self.service.functionals.mean_width_half(self.body, self.grid)

    @cached_property
    def volume(self) -> float:
        return self.service.functionals.volume(self.body, self.grid)


class InequalityService(InequalityPort):
    """
    Implementación de la batería de desigualdades.
    """

    def __init__(
        self,
        body_model: BodyModelService,
        functionals: FunctionalsService,
        curvature: CurvatureService,
        quadrature: QuadraturePort
    ):
        """
        Inicializa el servicio.

        Args:
            body_model: Servicio del modelo de cuerpos
            functionals: Servicio de funcionales
            curvature: Servicio de curvatura
            quadrature: Puerto de cuadratura
        """
        self.body_model = body_model
        self.functionals = functionals
        self.curvature = curvature
        self.quadrature = quadrature

    # ------------------------------------------------------------------
    # Verificación
    # ------------------------------------------------------------------

    def evaluation_path(self, body: Body) -> EvaluationPath:
        if contains_ball_intersection(body):
            return EvaluationPath.FINITE_DIFFERENCE
        return EvaluationPath.CLOSED_FORM

    def default_tolerance(self, path: EvaluationPath) -> float:
        if path == EvaluationPath.FINITE_DIFFERENCE:
            return settings.TOL_FINITE_DIFFERENCE
        return settings.TOL_CLOSED_FORM

    def check_applicable(self, kind: InequalityKind, body: Body) -> None:
        """
        Raises:
            UnsupportedBodyError: si K es un punto, o un trasladado de B_2^n
                en una desigualdad que involucra K^c
        """
        if self.body_model.is_point(body):
            raise UnsupportedBodyError(f"{kind.value}: K es un punto")
        if kind in DUAL_KINDS and self.body_model.is_unit_ball_translate(body):
            raise UnsupportedBodyError(f"{kind.value}: K es un trasladado de B_2^n y K^c es un punto")

    def verify(
        self,
        kind: InequalityKind,
        body: Body,
        grid: SphereGrid,
        tol: float | None = None
    ) -> InequalityRecord:
        self.check_applicable(kind, body)
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        path = self.evaluation_path(body)
        tol = self.default_tolerance(path) if tol is None else tol
        return self._evaluate(kind, _Evaluation(self, body, grid), path, tol)

    def verify_suite(
        self,
        kinds: Iterable[InequalityKind],
        body: Body,
        grid: SphereGrid,
        tol: float | None = None,
        applicable_only: bool = False
    ) -> List[InequalityRecord]:
        """
        Evalúa varias desigualdades compartiendo los funcionales.

        Con applicable_only las desigualdades excluidas para K se omiten
        con un aviso en lugar de fallar.
        """
        if grid.dim != body.dim:
            raise InvalidArgumentError(f"Malla de dimensión {grid.dim} para un cuerpo de dimensión {body.dim}")
        path = self.evaluation_path(body)
        tol = self.default_tolerance(path) if tol is None else tol
        evaluation = _Evaluation(self, body, grid)
        records = []
        for kind in kinds:
            try:
                self.check_applicable(kind, body)
            except UnsupportedBodyError as e:
                if not applicable_only:
                    raise
                logger.warning(f"Se omite {kind.value}: {str(e)}")
                continue
            records.append(self._evaluate(kind, evaluation, path, tol))
        failed = [r.kind.value for r in records if not r.passed]
        logger.info(f"{len(records)} desigualdades evaluadas, {len(failed)} violadas {failed or ''}")
        return records

    def _evaluate(self, kind: InequalityKind, ev: _Evaluation, path: EvaluationPath, tol: float) -> InequalityRecord:
        n = ev.n
        details: dict = {}

        if kind == InequalityKind.EXTREMAL_MAX:
            lhs = ev.omega_c
            rhs = self.functionals.omega_c_ball(n, n / (n + 1.0))

        elif kind == InequalityKind.SANTALO_PRODUCT:
            lhs = ev.omega_c * ev.omega_c_dual
            rhs = self.functionals.omega_c_ball(n, 0.5) ** 2
            details = {"omega_c": ev.omega_c, "omega_c_dual": ev.omega_c_dual}

        elif kind == InequalityKind.HOLDER_LINK:
            # Con Ω^c(K^c) = 0 el lado derecho es 0 y se exige Ω^c(K) = 0
            lhs = ev.omega_c
            rhs = ev.surface ** ((n - 1.0) / n) * ev.omega_c_dual ** (1.0 / n)
            details = {"surface": ev.surface, "omega_c_dual": ev.omega_c_dual}

        elif kind == InequalityKind.PRODUCT_VS_SURFACE:
            lhs = ev.omega_c * ev.omega_c_dual
            rhs = ev.surface * ev.surface_dual
            details = {"surface": ev.surface, "surface_dual": ev.surface_dual}

        elif kind == InequalityKind.ITERATED_SURFACE:
            lhs = ev.omega_c
            rhs = ev.surface ** (n / (n + 1.0)) * ev.surface_dual ** (1.0 / (n + 1.0))
            details = {"surface": ev.surface, "surface_dual": ev.surface_dual}

        elif kind == InequalityKind.SURFACE_BALL_BOUND:
            lhs = ev.surface ** (n / (n + 1.0)) * ev.surface_dual ** (1.0 / (n + 1.0))
            rhs = (
                self.functionals.surface_ball(n, n / (n + 1.0)) ** (n / (n + 1.0))
                * self.functionals.surface_ball(n, 1.0 / (n + 1.0)) ** (1.0 / (n + 1.0))
            )

        elif kind == InequalityKind.ALEXANDROV:
            lhs = (ev.surface / sphere_surface(n)) ** (1.0 / (n - 1.0))
            rhs = ev.mean_width

        elif kind == InequalityKind.ISOPERIMETRIC:
            bound = n * ball_volume(n) ** (2.0 / (n + 1.0)) * max(ev.volume, 0.0) ** ((n - 1.0) / (n + 1.0))
            links = [(ev.omega_c, ev.omega), (ev.omega, bound)]
            details = {
                "omega_c": ev.omega_c,
                "omega": ev.omega,
                "bound": bound,
                "first_link_slack": ev.omega - ev.omega_c,
                "second_link_slack": bound - ev.omega,
            }
            # Se reporta el eslabón más ajustado
            lhs, rhs = min(links, key=lambda link: link[1] - link[0])

        elif kind == InequalityKind.BM_SURFACE:
            reflected_dual = self.body_model.reflect(ev.dual)
            midpoint = self.body_model.minkowski([(0.5, ev.body), (0.5, reflected_dual)])
            lhs = np.sqrt(ev.surface * ev.surface_dual)
            rhs = self.functionals.surface_area(midpoint, ev.grid)
            details = {"surface": ev.surface, "surface_dual": ev.surface_dual}

        elif kind == InequalityKind.CURVATURE_DUALITY:
            residuals = self.curvature.duality_sweep(ev.body, ev.grid)
            lhs = max_smooth_residual(residuals)
            rhs = 0.0
            details = {
                "nodes": float(len(residuals)),
                "flagged_nodes": float(sum(1 for r in residuals if not r.smooth)),
            }

        else:
            raise InvalidArgumentError(f"Desigualdad desconocida: {kind}")

        return self._record(kind, float(lhs), float(rhs), tol, path, details, ev.body)

    @staticmethod
    def _record(kind, lhs, rhs, tol, path, details, body) -> InequalityRecord:
        slack = rhs - lhs
        record = InequalityRecord(
            kind=kind,
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            tol=tol,
            passed=slack >= -tol,
            near_equality=abs(slack) < NEAR_EQUALITY_FACTOR * tol,
            path=path,
            details={k: float(v) for k, v in details.items()},
            body=dump_body(body)
        )
        if not record.passed:
            logger.warning(f"{kind.value} violada: lhs={lhs:.12g} rhs={rhs:.12g} holgura={slack:.3e}")
        else:
            logger.debug(f"{kind.value}: holgura {slack:.3e}")
        return record

    # ------------------------------------------------------------------
    # Búsqueda extremal
    # ------------------------------------------------------------------

    def extremal_search(self, n: int, family: str, grid: SphereGrid | None = None) -> ExtremalResult:
        """
        Sección áurea sobre radios de bolas o Nelder–Mead sobre (a, eps) de
        Trig2D con k = 2; los pasos fuera de S_2 se rechazan.
        """
        if n < 2:
            raise InvalidArgumentError(f"n debe ser ≥ 2 (recibido {n})")
        if family == "balls":
            return self._search_balls(n, grid)
        if family == "trig2d":
            if n != 2:
                raise InvalidArgumentError("La familia trig2d solo existe en dimensión 2")
            return self._search_trig(grid)
        raise InvalidArgumentError(f"Familia desconocida: {family}")

    def _search_balls(self, n: int, grid: SphereGrid | None) -> ExtremalResult:
        def objective(r: float) -> float:
            if not 0.0 < r < 1.0:
                return REJECTED_STEP_PENALTY
            if grid is None:
                return -self.functionals.omega_c_ball(n, r)
            ball = BallBody(dim=n, center=[0.0] * n, radius=r)
            return -self.functionals.omega_c(ball, grid)

        result = optimize.minimize_scalar(
            objective,
            bracket=(0.05, 0.5, 0.999),
            method="golden",
            options={"xtol": 1e-12}
        )
        logger.info(f"Máximo en bolas (n={n}): r* = {result.x:.10f}, Ω^c = {-result.fun:.10f}")
        return ExtremalResult(n=n, family="balls", params={"r": float(result.x)}, value=float(-result.fun))

    def _search_trig(self, grid: SphereGrid | None) -> ExtremalResult:
        grid = grid or self.quadrature.make_grid(2, TRIG_SEARCH_RESOLUTION, GridScheme.UNIFORM_ANGLE_2D)
        rejected = 0

        def objective(params) -> float:
            nonlocal rejected
            a, eps = float(params[0]), float(params[1])
            # ρ(θ) = a − 3·eps·cos 2θ ∈ [0, 1]
            if abs(3.0 * eps) > min(a, 1.0 - a):
                rejected += 1
                logger.debug(f"Paso rechazado fuera de S_2: a={a:.6f}, eps={eps:.6f}")
                return REJECTED_STEP_PENALTY
            body = Trig2DBody(a=a, terms=[TrigTerm(k=2, eps=eps)])
            return -self.functionals.omega_c(body, grid)

        result = optimize.minimize(
            objective,
            np.array(TRIG_SEARCH_START),
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 4000}
        )
        if rejected:
            logger.warning(f"Nelder–Mead: {rejected} pasos rechazados fuera de S_2")
        a, eps = (float(v) for v in result.x)
        logger.info(f"Máximo en Trig2D: a* = {a:.8f}, eps* = {eps:.2e}, Ω^c = {-result.fun:.10f}")
        return ExtremalResult(
            n=2,
            family="trig2d",
            params={"a": a, "eps": eps},
            value=float(-result.fun),
            rejected_steps=rejected
        )

    # ------------------------------------------------------------------
    # Punto medio y segunda derivada
    # ------------------------------------------------------------------

    def santalo_midpoint_scan(
        self,
        n: int,
        r_window: Tuple[float, float] = (0.4, 0.6),
        steps: int = 401
    ) -> ScanResult:
        if n < 2:
            raise InvalidArgumentError(f"n debe ser ≥ 2 (recibido {n})")
        lo, hi = r_window
        if not 0.0 < lo < hi < 1.0:
            raise InvalidArgumentError(f"La ventana {r_window} no está contenida en (0, 1)")
        if steps < 2:
            raise InvalidArgumentError(f"steps debe ser ≥ 2 (recibido {steps})")

        center = self.functionals.omega_c_ball(n, 0.5)
        radii = np.linspace(lo, hi, steps)
        gains = np.array([
            0.5 * (self.functionals.omega_c_ball(n, r) + self.functionals.omega_c_ball(n, 1.0 - r)) - center
            for r in radii
        ])
        best = int(np.argmax(gains))
        result = ScanResult(
            n=n,
            best_r=float(radii[best]),
            gain=float(gains[best]),
            second_derivative=self.remark_second_derivative(n)
        )
        logger.info(f"Barrido n={n}: mejor r = {result.best_r:.6f}, ganancia {result.gain:.3e}")
        return result

    @staticmethod
    def remark_second_derivative(n: int) -> float:
        """f''(½) = (½)^{a+b−3}((a−b)² − (a+b)) con a = n(n−1)/(n+1), b = (n−1)/(n+1)."""
        if n < 2:
            raise InvalidArgumentError(f"n debe ser ≥ 2 (recibido {n})")
        a = n * (n - 1.0) / (n + 1.0)
        b = (n - 1.0) / (n + 1.0)
        return 0.5 ** (a + b - 3.0) * ((a - b) ** 2 - (a + b))

    def second_difference(self, n: int, h: float = 1e-3) -> float:
        """
        Segunda diferencia en ½ de f(r) = (Ω^c(rB) + Ω^c((1−r)B))/ω_n.
        """
        if not 0.0 < h < 0.5:
            raise InvalidArgumentError(f"h debe estar en (0, ½) (recibido {h})")

        def f(r: float) -> float:
            return (self.functionals.omega_c_ball(n, r) + self.functionals.omega_c_ball(n, 1.0 - r)) / sphere_surface(n)

        return (f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / h**2

    def phi_average_gap(self, body: Body, grid: SphereGrid, alpha: float | None = None, beta: float | None = None) -> float:
        """
        ½(F(K) + F(K^c)) − F(½B) para F = ω_n ∫ ∏ r_i^α (1 − r_i)^β dσ.
        """
        n = body.dim
        default_alpha, default_beta = omega_c_exponents(n)
        alpha = default_alpha if alpha is None else alpha
        beta = default_beta if beta is None else beta
        if self.body_model.is_unit_ball_translate(body):
            raise UnsupportedBodyError("K^c es un punto: F(K^c) no está definido")
        dual = self.body_model.c_dual(body)
        average = 0.5 * (
            self.functionals.radii_power_integral(body, grid, alpha, beta)
            + self.functionals.radii_power_integral(dual, grid, alpha, beta)
        )
        half_ball = sphere_surface(n) * 0.5 ** ((alpha + beta) * (n - 1))
        return average - half_ball

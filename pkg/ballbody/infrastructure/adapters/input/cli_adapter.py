"""
Adaptador de línea de comandos: lee cuerpos JSON, ejecuta los servicios y
escribe reportes legibles por máquina.

Códigos de salida: 0 todo correcto, 1 alguna desigualdad violada,
2 error de entrada o de uso, 3 fallo numérico.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Sequence

from pydantic import ValidationError

from ballbody.application.input.port.body_port import Body, dump_body, parse_body
from ballbody.application.input.port.floating_port import CutterKind
from ballbody.application.input.port.inequality_port import InequalityKind
from ballbody.application.output.port.report_writer_port import ReportFormat
from ballbody.application.service.body_model_service import BodyModelService
from ballbody.application.service.curvature_service import CurvatureService, max_smooth_residual
from ballbody.application.service.floating_service import FloatingService
from ballbody.application.service.functionals_service import FunctionalsService
from ballbody.application.service.inequality_service import InequalityService
from ballbody.application.service.sphere_quadrature_service import SphereQuadratureService
from ballbody.infrastructure.adapters.input.models import Command, DualCheckReport, RunConfig
from ballbody.infrastructure.adapters.output.arc_structure_adapter import ArcStructureAdapter
from ballbody.infrastructure.adapters.output.dykstra_projection_adapter import DykstraProjectionAdapter
from ballbody.infrastructure.adapters.output.file_report_adapter import FileReportAdapter
from ballbody.utils.config import settings
from ballbody.utils.exceptions import (
    ConvergenceError,
    EmptyBodyError,
    GeometryError,
    InvalidArgumentError,
    NumericalDomainError,
    SelfCheckError,
    UnsupportedBodyError
)
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

MEMBERSHIP_NODES = 256

# Instancias singleton
_quadrature_instance = None
_planar_solver_instance = None
_spatial_solver_instance = None
_body_model_instance = None


# Dependency Injection
def get_quadrature_service() -> SphereQuadratureService:
    """Retorna instancia del servicio de cuadratura."""
    global _quadrature_instance
    if _quadrature_instance is None:
        _quadrature_instance = SphereQuadratureService(threads=settings.BALLBODY_THREADS)
    return _quadrature_instance


def get_planar_solver() -> ArcStructureAdapter:
    """Retorna instancia del solver exacto por arcos."""
    global _planar_solver_instance
    if _planar_solver_instance is None:
        _planar_solver_instance = ArcStructureAdapter()
    return _planar_solver_instance


def get_spatial_solver() -> DykstraProjectionAdapter:
    """Retorna instancia del solver iterativo."""
    global _spatial_solver_instance
    if _spatial_solver_instance is None:
        _spatial_solver_instance = DykstraProjectionAdapter()
    return _spatial_solver_instance


def get_body_model_service() -> BodyModelService:
    """Retorna instancia del modelo de cuerpos."""
    global _body_model_instance
    if _body_model_instance is None:
        _body_model_instance = BodyModelService(
            quadrature=get_quadrature_service(),
            planar_solver=get_planar_solver(),
            spatial_solver=get_spatial_solver()
        )
    return _body_model_instance


def get_curvature_service() -> CurvatureService:
    return CurvatureService(get_body_model_service(), get_quadrature_service())


def get_functionals_service() -> FunctionalsService:
    return FunctionalsService(
        body_model=get_body_model_service(),
        curvature=get_curvature_service(),
        quadrature=get_quadrature_service(),
        planar_solver=get_planar_solver()
    )


def get_floating_service() -> FloatingService:
    return FloatingService(
        body_model=get_body_model_service(),
        functionals=get_functionals_service(),
        quadrature=get_quadrature_service(),
        planar_solver=get_planar_solver(),
        threads=settings.BALLBODY_THREADS
    )


def get_inequality_service() -> InequalityService:
    return InequalityService(
        body_model=get_body_model_service(),
        functionals=get_functionals_service(),
        curvature=get_curvature_service(),
        quadrature=get_quadrature_service()
    )


def get_report_writer() -> FileReportAdapter:
    return FileReportAdapter()


# ----------------------------------------------------------------------
# Argumentos
# ----------------------------------------------------------------------

def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Lista de reales inválida: {text}")


def _window(text: str) -> tuple:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"Se esperaba lo,hi (recibido {text})")
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    """Parser con un subcomando por operación."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", dest="body_path", type=Path, help="Descripción JSON del cuerpo")
    common.add_argument("--dim", type=int, help="Dimensión (search, scan)")
    common.add_argument("--resolution", type=int, default=settings.DEFAULT_RESOLUTION)
    common.add_argument("--seed", type=int, help="Semilla Monte Carlo (obligatoria si dim ≥ 4)")
    common.add_argument("--tolerance", type=float, help="Tolerancia (por defecto según el camino numérico)")
    common.add_argument("--output", type=Path, help="Archivo de salida (stdout si se omite)")
    common.add_argument("--format", choices=[f.value for f in ReportFormat])

    parser = argparse.ArgumentParser(
        prog="ballbody",
        description="Funcionales, dualidad y desigualdades de cuerpos de bolas"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser(Command.FUNCTIONALS.value, parents=[common], help="Ω^c, Ω, S, M*, Vol")
    subparsers.add_parser(Command.DUAL_CHECK.value, parents=[common], help="r_i(u) + s_{n−i}(−u) = 1")

    verify = subparsers.add_parser(Command.VERIFY.value, parents=[common], help="Batería de desigualdades")
    verify.add_argument("--suite", default="all", help="all, applicable o KIND,KIND,...")

    floating = subparsers.add_parser(Command.FLOATING.value, parents=[common], help="Barrido del cuerpo flotante")
    floating.add_argument("--deltas", type=_float_list, default=[])
    floating.add_argument("--directions", type=int, default=256)
    floating.add_argument("--cutter", choices=[c.value for c in CutterKind], default=CutterKind.UNIT_BALL.value)
    floating.add_argument("--relative", action="store_true", help="δ como fracción de Vol(K)")
    floating.add_argument("--emit-gnuplot", dest="emit_gnuplot", type=Path)

    search = subparsers.add_parser(Command.SEARCH.value, parents=[common], help="Maximizador de Ω^c")
    search.add_argument("--family", choices=["balls", "trig2d"], default="balls")

    scan = subparsers.add_parser(Command.SCAN.value, parents=[common], help="Barrido alrededor de r = ½")
    scan.add_argument("--window", type=_window, default=(0.4, 0.6))
    scan.add_argument("--steps", type=int, default=401)
    return parser


def build_config(argv: Sequence[str] | None = None) -> RunConfig:
    """
    Raises:
        SystemExit: argumentos mal formados (argparse)
        ValidationError: combinación de argumentos inválida
    """
    args = build_parser().parse_args(argv)
    values = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**values)


# ----------------------------------------------------------------------
# Ejecución
# ----------------------------------------------------------------------

def load_body(path: Path) -> Body:
    """
    Lee y valida la descripción JSON.

    Raises:
        json.JSONDecodeError: JSON mal formado
        ValidationError: esquema inválido
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"JSON mal formado en {path}: línea {e.lineno}, columna {e.colno}: {e.msg}")
        raise
    return parse_body(payload)


def _prepare_body(config: RunConfig) -> Body:
    body = load_body(config.body_path)
    if body.dim >= 4 and config.seed is None:
        raise InvalidArgumentError("--seed es obligatorio en dimensión ≥ 4")

    body_model = get_body_model_service()
    membership_grid = get_quadrature_service().fixed_grid(body.dim, MEMBERSHIP_NODES)
    violation = body_model.membership_violation(body, membership_grid, settings.CURVATURE_TOL)
    if violation is not None:
        raise InvalidArgumentError(f"El cuerpo no pertenece a S_{body.dim}: {violation.describe()}")
    body_model.check_invariants(body)
    logger.info(f"Cuerpo {body.type} (n={body.dim}) cargado desde {config.body_path}")
    return body


def _parse_suite(suite: str) -> tuple[List[InequalityKind], bool]:
    key = suite.strip().lower()
    if key in ("all", "applicable"):
        return list(InequalityKind), key == "applicable"
    kinds = []
    for name in suite.split(","):
        try:
            kinds.append(InequalityKind(name.strip().upper()))
        except ValueError:
            raise InvalidArgumentError(f"Desigualdad desconocida: {name}")
    return kinds, False


def _run_functionals(config: RunConfig) -> int:
    body = _prepare_body(config)
    grid = get_quadrature_service().default_grid(body.dim, config.resolution, config.seed)
    report = get_functionals_service().report(body, grid)
    get_report_writer().write(report, config.report_format, config.output)
    return EXIT_OK


def _run_dual_check(config: RunConfig) -> int:
    body = _prepare_body(config)
    grid = get_quadrature_service().default_grid(body.dim, config.resolution, config.seed)
    inequality = get_inequality_service()
    path = inequality.evaluation_path(body)
    tol = config.tolerance or inequality.default_tolerance(path)

    residuals = get_curvature_service().duality_sweep(body, grid)
    worst = max_smooth_residual(residuals)
    report = DualCheckReport(
        max_residual=worst,
        tol=tol,
        passed=worst <= tol,
        nodes=len(residuals),
        flagged_nodes=sum(1 for r in residuals if not r.smooth),
        path=path.value,
        grid=grid.descriptor(),
        body=dump_body(body)
    )
    get_report_writer().write(report, config.report_format, config.output)
    return EXIT_OK if report.passed else EXIT_VIOLATED


def _run_verify(config: RunConfig) -> int:
    body = _prepare_body(config)
    kinds, applicable_only = _parse_suite(config.suite)
    grid = get_quadrature_service().default_grid(body.dim, config.resolution, config.seed)
    records = get_inequality_service().verify_suite(kinds, body, grid, config.tolerance, applicable_only)
    get_report_writer().write(records, config.report_format, config.output)
    return EXIT_OK if all(r.passed for r in records) else EXIT_VIOLATED


def _run_floating(config: RunConfig) -> int:
    body = _prepare_body(config)
    floating = get_floating_service()
    deltas = config.deltas
    if config.relative:
        total = floating.area(body)
        deltas = [d * total for d in deltas]
    rows = floating.sweep(body, deltas, config.directions, config.cutter)
    writer = get_report_writer()
    writer.write(rows, config.report_format, config.output)
    if config.emit_gnuplot is not None:
        columns = ["delta", "deficit", "ratio", "directions", "fit_estimate", "target", "rel_error"]
        writer.write_gnuplot(rows, columns, config.emit_gnuplot)
    return EXIT_OK


def _run_search(config: RunConfig) -> int:
    grid = None
    if config.family == "trig2d":
        grid = get_quadrature_service().default_grid(2, config.resolution)
    result = get_inequality_service().extremal_search(config.dim, config.family, grid)
    get_report_writer().write(result, config.report_format, config.output)
    return EXIT_OK


def _run_scan(config: RunConfig) -> int:
    result = get_inequality_service().santalo_midpoint_scan(config.dim, config.window, config.steps)
    get_report_writer().write(result, config.report_format, config.output)
    return EXIT_OK


_HANDLERS = {
    Command.FUNCTIONALS: _run_functionals,
    Command.DUAL_CHECK: _run_dual_check,
    Command.VERIFY: _run_verify,
    Command.FLOATING: _run_floating,
    Command.SEARCH: _run_search,
    Command.SCAN: _run_scan,
}


def run(config: RunConfig) -> int:
    """
    Ejecuta el comando y traduce las excepciones a códigos de salida.

    Args:
        config: Configuración validada

    Returns:
        Código de salida
    """
    logger.info(f"Ejecutando {config.command.value}")
    try:
        return _HANDLERS[config.command](config)
    except json.JSONDecodeError:
        return EXIT_USAGE
    except ValidationError as e:
        logger.error(f"Descripción de cuerpo inválida: {str(e)}")
        return EXIT_USAGE
    except (InvalidArgumentError, UnsupportedBodyError, EmptyBodyError) as e:
        logger.error(f"Entrada inválida: {str(e)}")
        return EXIT_USAGE
    except (ConvergenceError, NumericalDomainError, GeometryError, SelfCheckError) as e:
        logger.error(f"Fallo numérico ({type(e).__name__}): {str(e)}")
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error(f"Error de E/S: {str(e)}")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    """Punto de entrada del comando `ballbody`."""
    try:
        config = build_config(argv)
    except ValidationError as e:
        logger.error(f"Argumentos inválidos: {str(e)}")
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

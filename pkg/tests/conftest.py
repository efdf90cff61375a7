"""
Fixtures compartidas: servicios conectados como en el adaptador CLI.
"""
import pytest

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    Trig2DBody,
    TrigTerm
)
from ballbody.application.service.body_model_service import BodyModelService
from ballbody.application.service.curvature_service import CurvatureService
from ballbody.application.service.floating_service import FloatingService
from ballbody.application.service.functionals_service import FunctionalsService
from ballbody.application.service.inequality_service import InequalityService
from ballbody.application.service.sphere_quadrature_service import SphereQuadratureService
from ballbody.infrastructure.adapters.output.arc_structure_adapter import ArcStructureAdapter
from ballbody.infrastructure.adapters.output.dykstra_projection_adapter import DykstraProjectionAdapter


@pytest.fixture
def quadrature():
    """Servicio de cuadratura de un hilo."""
    return SphereQuadratureService(threads=1)


@pytest.fixture
def planar_solver():
    return ArcStructureAdapter()


@pytest.fixture
def spatial_solver():
    return DykstraProjectionAdapter()


@pytest.fixture
def body_model(quadrature, planar_solver, spatial_solver):
    """Modelo de cuerpos con ambos solvers."""
    return BodyModelService(quadrature, planar_solver, spatial_solver)


@pytest.fixture
def curvature(body_model, quadrature):
    return CurvatureService(body_model, quadrature)


@pytest.fixture
def functionals(body_model, curvature, quadrature, planar_solver):
    return FunctionalsService(body_model, curvature, quadrature, planar_solver)


@pytest.fixture
def floating(body_model, functionals, quadrature, planar_solver):
    return FloatingService(body_model, functionals, quadrature, planar_solver, threads=1)


@pytest.fixture
def inequality(body_model, functionals, curvature, quadrature):
    return InequalityService(body_model, functionals, curvature, quadrature)


@pytest.fixture
def half_disc():
    """½·B_2^2 centrado."""
    return BallBody(dim=2, center=[0.0, 0.0], radius=0.5)


@pytest.fixture
def trig_body():
    """h(θ) = 0.5 + 0.05·cos 2θ."""
    return Trig2DBody(a=0.5, terms=[TrigTerm(k=2, eps=0.05)])


@pytest.fixture
def lens():
    """Intersección de dos discos unitarios con centros a distancia 1."""
    return BallIntersectionBody(dim=2, centers=[[0.5, 0.0], [-0.5, 0.0]])


@pytest.fixture
def grid_2d(quadrature):
    return quadrature.default_grid(2, 1024)

"""
Tests para el servicio de desigualdades.
"""
import math

import pytest

from ballbody.application.input.port.body_port import (
    BallBody,
    BallIntersectionBody,
    CDualBody,
    MinkowskiBody,
    MinkowskiPart,
    Trig2DBody,
    TrigTerm
)
from ballbody.application.input.port.inequality_port import (
    DUAL_KINDS,
    EvaluationPath,
    InequalityKind,
    InequalityRecord
)
from ballbody.application.service.body_model_service import BodyModelService
from ballbody.application.service.curvature_service import CurvatureService
from ballbody.application.service.functionals_service import FunctionalsService
from ballbody.application.service.inequality_service import InequalityService
from ballbody.application.service.sphere_quadrature_service import SphereQuadratureService
from ballbody.infrastructure.adapters.output.arc_structure_adapter import ArcStructureAdapter
from ballbody.infrastructure.adapters.output.dykstra_projection_adapter import DykstraProjectionAdapter
from ballbody.utils.exceptions import InvalidArgumentError, UnsupportedBodyError

ALL_KINDS = list(InequalityKind)
LENS = BallIntersectionBody(dim=2, centers=[[0.5, 0.0], [-0.5, 0.0]])
TRIANGLE = BallIntersectionBody(dim=2, centers=[[0.3, 0.0], [-0.2, 0.25], [-0.1, -0.3]])


@pytest.mark.unit
def test_half_disc_suite(inequality, grid_2d, half_disc):
    """Test de la batería completa sobre ½B: todo se cumple y Santaló es igualdad."""
    records = inequality.verify_suite(ALL_KINDS, half_disc, grid_2d)
    by_kind = {r.kind: r for r in records}

    assert len(records) == 10
    assert all(r.passed for r in records)
    assert all(r.path == EvaluationPath.CLOSED_FORM for r in records)
    assert by_kind[InequalityKind.SANTALO_PRODUCT].lhs == pytest.approx(math.pi**2, abs=1e-9)
    assert by_kind[InequalityKind.SANTALO_PRODUCT].near_equality
    assert by_kind[InequalityKind.HOLDER_LINK].near_equality
    assert not by_kind[InequalityKind.EXTREMAL_MAX].near_equality


@pytest.mark.unit
def test_trig_suite_is_strict(inequality, grid_2d, trig_body):
    """Test de Trig2D: se cumple todo y Hölder es estricta."""
    records = inequality.verify_suite(ALL_KINDS, trig_body, grid_2d)
    holder = next(r for r in records if r.kind == InequalityKind.HOLDER_LINK)

    assert all(r.passed for r in records)
    assert holder.slack > 1e-6
    assert holder.details["surface"] == pytest.approx(math.pi, abs=1e-10)


@pytest.mark.unit
def test_unit_ball_excludes_dual_kinds(inequality, grid_2d):
    """Test de exclusión de desigualdades con K^c para B_2^2."""
    unit = BallBody(dim=2, center=[0.1, 0.0], radius=1.0)

    for kind in DUAL_KINDS:
        with pytest.raises(UnsupportedBodyError):
            inequality.verify(kind, unit, grid_2d)
    with pytest.raises(UnsupportedBodyError):
        inequality.verify_suite(ALL_KINDS, unit, grid_2d)

    records = inequality.verify_suite(ALL_KINDS, unit, grid_2d, applicable_only=True)

    assert {r.kind for r in records} == {
        InequalityKind.EXTREMAL_MAX,
        InequalityKind.ALEXANDROV,
        InequalityKind.ISOPERIMETRIC
    }


@pytest.mark.unit
def test_isoperimetric_equality_at_unit_ball(inequality, grid_2d):
    """Test de igualdad en el segundo eslabón para B_2^2."""
    record = inequality.verify(InequalityKind.ISOPERIMETRIC, BallBody(dim=2, center=[0.0, 0.0], radius=1.0), grid_2d)

    assert record.passed
    assert record.near_equality
    assert record.details["omega_c"] == pytest.approx(0.0, abs=1e-12)
    assert record.details["second_link_slack"] == pytest.approx(0.0, abs=1e-9)


@pytest.mark.unit
def test_point_is_rejected(inequality, grid_2d):
    """Test de K punto."""
    point = BallBody(dim=2, center=[0.0, 0.0], radius=0.0)

    with pytest.raises(UnsupportedBodyError):
        inequality.verify(InequalityKind.EXTREMAL_MAX, point, grid_2d)


@pytest.mark.unit
def test_grid_dimension_is_checked(inequality, quadrature, half_disc):
    """Test de malla de dimensión distinta."""
    with pytest.raises(InvalidArgumentError):
        inequality.verify(InequalityKind.ALEXANDROV, half_disc, quadrature.default_grid(3, 8))


@pytest.mark.unit
def test_record_uses_pass_alias(inequality, grid_2d, half_disc):
    """Test del alias "pass" en la serialización."""
    record = inequality.verify(InequalityKind.ALEXANDROV, half_disc, grid_2d)
    dumped = record.model_dump(by_alias=True)

    assert dumped["pass"] is True
    assert InequalityRecord.model_validate(dumped).passed
    assert record.slack == pytest.approx(record.rhs - record.lhs)


@pytest.mark.unit
def test_custom_tolerance_flags_violation(inequality, grid_2d, trig_body):
    """Test de un registro fallido con tolerancia negativa forzada."""
    record = inequality.verify(InequalityKind.EXTREMAL_MAX, trig_body, grid_2d, tol=-1.0)

    assert not record.passed
    assert record.tol == -1.0


@pytest.mark.integration
def test_lens_suite_finite_difference_path(inequality, quadrature, lens):
    """Test de la lente: camino de diferencias finitas con tolerancia 1e−3."""
    grid = quadrature.default_grid(2, 256)

    records = inequality.verify_suite(ALL_KINDS, lens, grid)
    by_kind = {r.kind: r for r in records}

    assert all(r.path == EvaluationPath.FINITE_DIFFERENCE for r in records)
    assert all(r.tol == 1e-3 for r in records)
    assert all(r.passed for r in records)
    assert by_kind[InequalityKind.HOLDER_LINK].lhs == 0.0
    assert by_kind[InequalityKind.BM_SURFACE].lhs == pytest.approx(math.sqrt(8.0) * math.pi / 3.0, abs=1e-9)


@pytest.mark.unit
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_extremal_search_balls(inequality, functionals, n):
    """Test de r* = n/(n+1) en la familia de bolas."""
    result = inequality.extremal_search(n, "balls")

    assert result.params["r"] == pytest.approx(n / (n + 1.0), abs=1e-6)
    assert result.value == pytest.approx(functionals.omega_c_ball(n, n / (n + 1.0)), rel=1e-10)


@pytest.mark.integration
def test_extremal_search_trig(inequality, functionals):
    """Test de convergencia a la bola 2/3·B en la familia Trig2D."""
    result = inequality.extremal_search(2, "trig2d")

    assert abs(result.params["eps"]) < 1e-4
    assert result.params["a"] == pytest.approx(2.0 / 3.0, abs=1e-4)
    assert result.value == pytest.approx(functionals.omega_c_ball(2, 2.0 / 3.0), rel=1e-8)


@pytest.mark.unit
def test_extremal_search_rejects_invalid_arguments(inequality):
    """Test de familia desconocida y trig2d fuera del plano."""
    with pytest.raises(InvalidArgumentError):
        inequality.extremal_search(3, "trig2d")
    with pytest.raises(InvalidArgumentError):
        inequality.extremal_search(2, "polygons")
    with pytest.raises(InvalidArgumentError):
        inequality.extremal_search(1, "balls")


@pytest.mark.unit
@pytest.mark.parametrize("n", [2, 3])
def test_midpoint_scan_low_dimensions(inequality, n):
    """Test de ganancia no positiva en n = 2, 3 (r = ½ es óptimo)."""
    result = inequality.santalo_midpoint_scan(n)

    assert result.gain <= 1e-12
    assert result.best_r == pytest.approx(0.5, abs=1e-9)
    assert result.second_derivative < 0.0


@pytest.mark.unit
@pytest.mark.parametrize("n", [4, 5])
def test_midpoint_scan_high_dimensions(inequality, n):
    """Test de ganancia positiva en n ≥ 4 (½ deja de ser maximizador)."""
    result = inequality.santalo_midpoint_scan(n)

    assert result.gain > 0.0
    assert abs(result.best_r - 0.5) > 1e-3
    assert result.second_derivative > 0.0


@pytest.mark.unit
def test_scan_window_is_validated(inequality):
    """Test de ventana fuera de (0, 1)."""
    with pytest.raises(InvalidArgumentError):
        inequality.santalo_midpoint_scan(2, (0.0, 0.6))
    with pytest.raises(InvalidArgumentError):
        inequality.santalo_midpoint_scan(2, (0.6, 0.4))
    with pytest.raises(InvalidArgumentError):
        inequality.santalo_midpoint_scan(2, (0.4, 0.6), steps=1)


@pytest.mark.unit
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_second_difference_matches_closed_form(inequality, n):
    """Test de la segunda diferencia frente a f''(½) cerrado."""
    assert inequality.second_difference(n) == pytest.approx(inequality.remark_second_derivative(n), abs=1e-4)


@pytest.mark.unit
def test_remark_second_derivative_values(inequality):
    """Test de f''(½) = −32/9 en el plano."""
    assert inequality.remark_second_derivative(2) == pytest.approx(-32.0 / 9.0)
    assert inequality.remark_second_derivative(4) == pytest.approx(0.24)


@pytest.mark.unit
def test_phi_average_gap(inequality, grid_2d, trig_body, half_disc):
    """Test del promedio de F(K) y F(K^c) frente a F(½B) en el plano."""
    assert inequality.phi_average_gap(trig_body, grid_2d) <= 1e-12
    assert inequality.phi_average_gap(half_disc, grid_2d) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(UnsupportedBodyError):
        inequality.phi_average_gap(BallBody(dim=2, center=[0.0, 0.0], radius=1.0), grid_2d)


@pytest.mark.unit
def test_phi_average_gap_custom_exponents(inequality, grid_2d):
    """Test con exponentes α = β = ½."""
    body = Trig2DBody(a=0.4, terms=[TrigTerm(k=2, eps=0.02)])

    assert inequality.phi_average_gap(body, grid_2d, alpha=0.5, beta=0.5) <= 1e-12


CORPUS = {
    "ball_0.1": BallBody(dim=2, center=[0.0, 0.0], radius=0.1),
    "ball_0.25": BallBody(dim=2, center=[0.2, 0.1], radius=0.25),
    "ball_0.5": BallBody(dim=2, center=[0.0, 0.0], radius=0.5),
    "ball_2/3": BallBody(dim=2, center=[0.0, 0.0], radius=2.0 / 3.0),
    "ball_0.9": BallBody(dim=2, center=[-0.1, 0.0], radius=0.9),
    "trig_k2": Trig2DBody(a=0.5, terms=[TrigTerm(k=2, eps=0.05)]),
    "trig_k3": Trig2DBody(a=0.3, terms=[TrigTerm(k=3, eps=0.015)]),
    "trig_k4": Trig2DBody(a=0.7, terms=[TrigTerm(k=4, eps=0.01), TrigTerm(k=2, eps=-0.02)]),
    "minkowski_trig_ball": MinkowskiBody(parts=[
        MinkowskiPart(weight=0.5, body=Trig2DBody(a=0.5, terms=[TrigTerm(k=2, eps=0.05)])),
        MinkowskiPart(weight=0.5, body=BallBody(dim=2, center=[0.1, 0.0], radius=0.8))
    ]),
    "minkowski_lens_ball": MinkowskiBody(parts=[
        MinkowskiPart(weight=0.5, body=LENS),
        MinkowskiPart(weight=0.5, body=BallBody(dim=2, center=[0.0, 0.0], radius=0.4))
    ]),
    "minkowski_three_parts": MinkowskiBody(parts=[
        MinkowskiPart(weight=0.2, body=BallBody(dim=2, center=[0.0, 0.0], radius=0.2)),
        MinkowskiPart(weight=0.3, body=Trig2DBody(a=0.6, terms=[TrigTerm(k=3, eps=0.02)])),
        MinkowskiPart(weight=0.5, body=TRIANGLE)
    ]),
    "lens": LENS,
    "triangle": TRIANGLE,
    "triangle_dual": CDualBody(of=TRIANGLE)
}
NON_BALLS = [
    "trig_k2", "trig_k3", "trig_k4", "minkowski_trig_ball", "minkowski_lens_ball", "minkowski_three_parts"
]


@pytest.fixture(scope="module")
def corpus_records():
    """Registros de la batería completa sobre todo el corpus (malla de 1024 nodos)."""
    quadrature = SphereQuadratureService(threads=1)
    planar = ArcStructureAdapter()
    body_model = BodyModelService(quadrature, planar, DykstraProjectionAdapter())
    curvature = CurvatureService(body_model, quadrature)
    functionals = FunctionalsService(body_model, curvature, quadrature, planar)
    service = InequalityService(body_model, functionals, curvature, quadrature)
    grid = quadrature.default_grid(2, 1024)
    return {
        name: (
            {r.kind: r for r in service.verify_suite(ALL_KINDS, body, grid)},
            service.verify(InequalityKind.HOLDER_LINK, body_model.c_dual(body), grid)
        )
        for name, body in CORPUS.items()
    }


@pytest.mark.integration
@pytest.mark.parametrize("name", list(CORPUS))
def test_corpus_suite_passes(corpus_records, name):
    """Test de que todas las desigualdades se cumplen en cada cuerpo del corpus."""
    records, _ = corpus_records[name]

    failed = [kind.value for kind, r in records.items() if not r.passed]

    assert len(records) == 10
    assert failed == []


@pytest.mark.integration
@pytest.mark.parametrize("name", list(CORPUS))
def test_corpus_santalo_chain(corpus_records, name):
    """Test de Ω^c(K)Ω^c(K^c) ≤ S(K)S(K^c) ≤ S(½B)² = π²."""
    records, _ = corpus_records[name]
    santalo = records[InequalityKind.SANTALO_PRODUCT]
    product = records[InequalityKind.PRODUCT_VS_SURFACE]

    assert santalo.lhs <= math.pi**2 + 1e-6
    assert santalo.lhs <= product.rhs + product.tol
    assert product.rhs <= math.pi**2 + product.tol


@pytest.mark.integration
@pytest.mark.parametrize("name", list(CORPUS))
def test_corpus_iterated_follows_holder(corpus_records, name):
    """Test de consistencia: Hölder en K y en K^c implica la cota iterada."""
    records, dual_holder = corpus_records[name]
    holder = records[InequalityKind.HOLDER_LINK]
    iterated = records[InequalityKind.ITERATED_SURFACE]

    if holder.passed and dual_holder.passed:
        assert iterated.slack >= -iterated.tol


@pytest.mark.integration
@pytest.mark.parametrize("name", NON_BALLS)
def test_corpus_holder_is_strict_off_balls(corpus_records, name):
    """Test de holgura estrictamente positiva en Hölder para cuerpos que no son bolas."""
    records, _ = corpus_records[name]
    holder = records[InequalityKind.HOLDER_LINK]

    assert holder.slack > 1e-6
    assert not holder.near_equality


@pytest.mark.integration
def test_corpus_equality_cases(corpus_records):
    """Test de near_equality en los extremales: ½B y (2/3)B."""
    half, _ = corpus_records["ball_0.5"]
    two_thirds, _ = corpus_records["ball_2/3"]

    assert half[InequalityKind.SANTALO_PRODUCT].near_equality
    assert half[InequalityKind.PRODUCT_VS_SURFACE].near_equality
    assert two_thirds[InequalityKind.EXTREMAL_MAX].near_equality
    assert two_thirds[InequalityKind.SURFACE_BALL_BOUND].near_equality
    assert not two_thirds[InequalityKind.SANTALO_PRODUCT].near_equality
    assert all(
        records[InequalityKind.HOLDER_LINK].near_equality
        for name, (records, _) in corpus_records.items()
        if name.startswith("ball_")
    )

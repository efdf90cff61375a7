"""
Tests para el servicio del cuerpo flotante.
"""
import math

import numpy as np
import pytest

from ballbody.application.input.port.body_port import BallBody
from ballbody.application.input.port.floating_port import CutterKind
from ballbody.application.service.floating_service import FloatingService
from ballbody.utils.exceptions import GeometryError, InvalidArgumentError, UnsupportedBodyError

SWEEP_DELTAS = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4]


def disc_overlap(r1: float, r2: float, d: float) -> float:
    """Área de la intersección de dos discos de radios r1, r2 a distancia d."""
    first = r1**2 * math.acos((d**2 + r1**2 - r2**2) / (2.0 * d * r1))
    second = r2**2 * math.acos((d**2 + r2**2 - r1**2) / (2.0 * d * r2))
    kite = 0.5 * math.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    return first + second - kite


@pytest.mark.unit
def test_floating_constant(floating):
    """Test de c_2 = ½(3/2)^{2/3} y c_3 = ½(4/π)^{1/2}."""
    assert floating.floating_constant(2) == pytest.approx(0.655185, abs=1e-6)
    assert floating.floating_constant(3) == pytest.approx(0.564190, abs=1e-6)
    with pytest.raises(InvalidArgumentError):
        floating.floating_constant(1)


@pytest.mark.unit
def test_cut_volume_extreme_positions(floating, half_disc, lens):
    """Test de corte total, corte nulo y bola que contiene a la lente."""
    assert floating.cut_volume(half_disc, [5.0, 0.0]) == pytest.approx(math.pi / 4.0, abs=1e-12)
    assert floating.cut_volume(half_disc, [0.0, 0.0]) == 0.0
    assert floating.cut_volume(lens, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.unit
@pytest.mark.parametrize("distance", [0.7, 1.0, 1.3])
def test_cut_volume_matches_disc_overlap(floating, half_disc, distance):
    """Test del área cortada de ½B frente a la fórmula de dos discos."""
    expected = math.pi / 4.0 - disc_overlap(0.5, 1.0, distance)

    assert floating.cut_volume(half_disc, [distance, 0.0]) == pytest.approx(expected, abs=1e-9)


@pytest.mark.unit
def test_cut_volume_ball_intersection(floating, lens):
    """Test del corte de la lente con un tercer disco (solver por arcos)."""
    total = floating.area(lens)

    cut = floating.cut_volume(lens, [0.0, 0.5])

    assert total == pytest.approx(1.228370, abs=1e-6)
    assert 0.0 < cut < total


@pytest.mark.unit
def test_cap_volume_half_disc(floating, half_disc):
    """Test del segmento circular cortado por una recta."""
    u = np.array([1.0, 0.0])
    level = 0.25
    angle = 2.0 * math.acos(level / 0.5)
    expected = 0.5 * 0.25 * (angle - math.sin(angle))

    assert floating.cap_volume(half_disc, u, level) == pytest.approx(expected, abs=1e-9)


@pytest.mark.unit
def test_area_closed_forms(floating, half_disc, trig_body):
    """Test de las áreas cerradas de bola y Trig2D."""
    assert floating.area(half_disc) == pytest.approx(math.pi / 4.0)
    assert floating.area(trig_body) == pytest.approx(math.pi / 4.0 - 1.5 * math.pi * 0.05**2, abs=1e-12)


@pytest.mark.unit
def test_floating_body_rejects_invalid_arguments(floating, half_disc, lens):
    """Test de m < 64, δ fuera de rango y cuerpos no soportados."""
    with pytest.raises(InvalidArgumentError):
        floating.floating_body(half_disc, 1e-3, 32)
    with pytest.raises(InvalidArgumentError):
        floating.floating_body(half_disc, 0.3, 64)
    with pytest.raises(InvalidArgumentError):
        floating.floating_body(half_disc, -1e-3, 64)
    with pytest.raises(UnsupportedBodyError):
        floating.floating_body(BallBody(dim=3, center=[0.0, 0.0, 0.0], radius=0.5), 1e-3, 64)
    with pytest.raises(UnsupportedBodyError):
        floating.floating_body(lens, 1e-3, 64)


@pytest.mark.unit
def test_limit_estimate_validates_deltas(floating, half_disc):
    """Test de la validación de la lista de δ."""
    with pytest.raises(InvalidArgumentError):
        floating.limit_estimate(half_disc, [1e-2, 1e-3, 1e-4], 64)
    with pytest.raises(InvalidArgumentError):
        floating.limit_estimate(half_disc, [1e-2, 1e-3, 3e-3, 1e-4], 64)
    with pytest.raises(InvalidArgumentError):
        floating.limit_estimate(half_disc, [1e-2, 8e-3, 6e-3, 4e-3], 64)


@pytest.mark.integration
def test_floating_body_of_disc_is_symmetric(floating, half_disc):
    """Test de offsets iguales en todas las direcciones y δ relativo."""
    result = floating.floating_body(half_disc, 0.01, 64, relative=True)

    assert result.delta == pytest.approx(0.01 * math.pi / 4.0)
    assert result.directions_used == 64
    assert np.ptp(result.offsets) < 1e-3
    assert 0.0 < result.floating_volume < result.body_volume
    assert len(result.body.centers) == 64


@pytest.mark.integration
def test_half_plane_floating_body_of_disc(floating, half_disc):
    """Test del cuerpo flotante clásico de ½B: disco de radio reducido."""
    result = floating.floating_body(half_disc, 1e-3, 128, cutter=CutterKind.HALF_PLANE)

    assert result.body is None
    assert result.volume_deficit > 0.0
    assert np.ptp(result.offsets) < 1e-3


@pytest.mark.slow
def test_limit_law_half_disc(floating, half_disc):
    """Test de lím déficit/δ^{2/3} = c_2·Ω^c(½B) ≈ 2.05848 (5%)."""
    fit = floating.limit_estimate(half_disc, SWEEP_DELTAS, 256)

    assert fit.estimate == pytest.approx(2.05848, rel=0.05)


@pytest.mark.slow
def test_limit_law_half_plane(floating, half_disc):
    """Test del límite clásico c_2·Ω(½B) ≈ 2.5934 con semiplanos (5%)."""
    fit = floating.limit_estimate(half_disc, SWEEP_DELTAS, 256, cutter=CutterKind.HALF_PLANE)

    assert fit.estimate == pytest.approx(2.5934, rel=0.05)


@pytest.mark.slow
def test_limit_law_trig(floating, trig_body):
    """Test del barrido completo sobre Trig2D (7%)."""
    rows = floating.sweep(trig_body, SWEEP_DELTAS, 256)

    assert len(rows) == len(SWEEP_DELTAS)
    assert rows[0].rel_error < 0.07


@pytest.mark.unit
def test_floating_body_rejects_radii_near_one(floating):
    """Test de radios por encima de 1 − 1e−3: la ley límite exige curvaturas mayores que 1."""
    near_unit = BallBody(dim=2, center=[0.0, 0.0], radius=0.9995)

    with pytest.raises(InvalidArgumentError):
        floating.floating_body(near_unit, 1e-3, 64)


@pytest.mark.unit
def test_boundary_cache_is_bounded(body_model, functionals, quadrature, planar_solver):
    """Test de la caché FIFO de fronteras muestreadas."""
    service = FloatingService(body_model, functionals, quadrature, planar_solver, threads=1, cache_size=2)
    bodies = [BallBody(dim=2, center=[0.0, 0.0], radius=r) for r in (0.3, 0.4, 0.5)]

    for body in bodies:
        service.cut_volume(body, [0.9, 0.0])

    assert len(service._boundaries) == 2
    assert bodies[0].model_dump_json() not in service._boundaries
    assert bodies[2].model_dump_json() in service._boundaries


@pytest.mark.unit
def test_containment_violation_names_direction(floating, half_disc):
    """Test del error geométrico cuando F sobresale de K."""
    with pytest.raises(GeometryError) as error:
        floating._check_contained(half_disc, lambda nodes: np.full(len(nodes), 0.6))

    assert error.value.direction is not None
    assert len(error.value.direction) == 2


def _dense_nodes(count: int = 2000) -> np.ndarray:
    theta = np.random.default_rng(5).uniform(0.0, 2.0 * np.pi, count)
    return np.column_stack([np.cos(theta), np.sin(theta)])


@pytest.mark.integration
@pytest.mark.parametrize("cutter", [CutterKind.UNIT_BALL, CutterKind.HALF_PLANE])
def test_floating_body_is_contained(floating, body_model, trig_body, cutter):
    """Test de F ⊆ K en direcciones distintas de las de control."""
    result = floating.floating_body(trig_body, 1e-3, 128, cutter=cutter)
    nodes = _dense_nodes()

    if cutter == CutterKind.UNIT_BALL:
        inner = body_model.support_many(result.body, nodes)
        assert np.all(inner <= body_model.support_many(trig_body, nodes) + 1e-9)
    assert result.floating_volume < result.body_volume


@pytest.mark.integration
@pytest.mark.parametrize("body_name", ["half_disc", "trig_body"])
def test_floating_body_is_monotone_in_delta(floating, body_model, request, body_name):
    """Test de F_{δ₂} ⊆ F_{δ₁} para δ₁ < δ₂."""
    body = request.getfixturevalue(body_name)
    nodes = _dense_nodes()

    small = floating.floating_body(body, 1e-3, 128)
    large = floating.floating_body(body, 3e-3, 128)

    assert large.floating_volume < small.floating_volume
    assert np.all(
        body_model.support_many(large.body, nodes) <= body_model.support_many(small.body, nodes) + 1e-9
    )


@pytest.mark.integration
def test_floating_body_of_trig_stays_in_class(floating, body_model, quadrature, trig_body):
    """Test de que F_{c,δ} de Trig2D sigue siendo un cuerpo de bolas."""
    result = floating.floating_body(trig_body, 1e-3, 128)

    assert body_model.is_ball_body(result.body, quadrature.default_grid(2, 256), 1e-6)


@pytest.mark.slow
def test_direction_count_stability(floating, trig_body):
    """Test de variación < 0.5% del cociente al pasar de 256 a 512 direcciones."""
    coarse = floating.floating_body(trig_body, 1e-3, 256)
    fine = floating.floating_body(trig_body, 1e-3, 512)

    assert fine.ratio == pytest.approx(coarse.ratio, rel=5e-3)

"""
Tests para los solvers de intersecciones de bolas.
"""
import numpy as np
import pytest

from ballbody.infrastructure.adapters.output.arc_structure_adapter import ArcStructureAdapter, unique_centers
from ballbody.infrastructure.adapters.output.dykstra_projection_adapter import DykstraProjectionAdapter
from ballbody.utils.exceptions import EmptyBodyError, InvalidArgumentError

LENS_CENTERS = np.array([[0.5, 0.0], [-0.5, 0.0]])
LENS_AREA = 2.0 * np.pi / 3.0 - np.sqrt(3.0) / 2.0


@pytest.fixture
def arcs():
    return ArcStructureAdapter()


@pytest.fixture
def dykstra():
    return DykstraProjectionAdapter()


@pytest.mark.unit
def test_lens_area_and_perimeter(arcs):
    """Test del área exacta 1.228370 y el perímetro 4π/3 de la lente."""
    assert arcs.area(LENS_CENTERS) == pytest.approx(LENS_AREA, abs=1e-12)
    assert arcs.area(LENS_CENTERS) == pytest.approx(1.228370, abs=1e-6)
    assert arcs.perimeter(LENS_CENTERS) == pytest.approx(4.0 * np.pi / 3.0, abs=1e-12)


@pytest.mark.unit
def test_single_disc(arcs):
    """Test de un único disco: área π y un arco completo."""
    centers = np.array([[0.2, -0.1]])

    assert arcs.area(centers) == pytest.approx(np.pi, abs=1e-12)
    assert arcs.perimeter(centers) == pytest.approx(2.0 * np.pi, abs=1e-12)


@pytest.mark.unit
def test_redundant_disc_does_not_change_area(arcs):
    """Test de un disco que contiene a la lente."""
    centers = np.vstack([LENS_CENTERS, [[0.0, 0.0]]])

    assert arcs.area(centers) == pytest.approx(LENS_AREA, abs=1e-12)


@pytest.mark.unit
def test_duplicate_centers_are_merged():
    """Test de centros repetidos."""
    assert len(unique_centers(np.array([[0.1, 0.0], [0.1, 0.0], [0.0, 0.1]]))) == 2


@pytest.mark.unit
def test_far_centers_raise_empty_body(arcs):
    """Test de intersección vacía."""
    with pytest.raises(EmptyBodyError):
        arcs.area(np.array([[1.5, 0.0], [-1.5, 0.0]]))
    with pytest.raises(InvalidArgumentError):
        arcs.area(np.array([[0.0, 0.0, 0.0]]))


@pytest.mark.unit
def test_arc_solution_strata(arcs):
    """Test de estratos: interior de arco (esfera) y cono normal de vértice."""
    on_arc = arcs.solve(LENS_CENTERS, np.array([1.0, 0.0]))
    at_vertex = arcs.solve(LENS_CENTERS, np.array([0.0, 1.0]))

    assert on_arc.smooth_stratum == "sphere"
    assert np.allclose(on_arc.point, [0.5, 0.0])
    assert on_arc.active == (1,)
    assert at_vertex.smooth_stratum == "vertex"
    assert np.allclose(at_vertex.point, [0.0, np.sqrt(3.0) / 2.0], atol=1e-12)
    assert set(at_vertex.active) == {0, 1}


@pytest.mark.unit
@pytest.mark.parametrize("theta", np.linspace(0.0, 2.0 * np.pi, 13)[:-1])
def test_dykstra_matches_arc_structure(arcs, dykstra, theta):
    """Test de concordancia entre el solver iterativo y el exacto en el plano."""
    u = np.array([np.cos(theta + 0.01), np.sin(theta + 0.01)])

    exact = arcs.solve(LENS_CENTERS, u)
    iterative = dykstra.solve(LENS_CENTERS, u)

    assert iterative.value == pytest.approx(exact.value, abs=1e-8)


@pytest.mark.unit
def test_dykstra_spatial_lens(dykstra):
    """Test de la lente en R^3: soporte 0.5 en e_1 y √3/2 en e_3."""
    centers = np.array([[0.5, 0.0, 0.0], [-0.5, 0.0, 0.0]])

    along_axis = dykstra.solve(centers, np.array([1.0, 0.0, 0.0]))
    across = dykstra.solve(centers, np.array([0.0, 0.0, 1.0]))

    assert along_axis.value == pytest.approx(0.5, abs=1e-12)
    assert along_axis.smooth_stratum == "sphere"
    assert across.value == pytest.approx(np.sqrt(3.0) / 2.0, abs=1e-9)
    assert set(across.active) == {0, 1}


@pytest.mark.unit
def test_vertices(arcs):
    """Test de los vértices (0, ±√3/2) de la lente y de ninguno para un disco."""
    vertices = arcs.vertices(LENS_CENTERS)

    assert vertices.shape == (2, 2)
    assert np.allclose(sorted(vertices[:, 1]), [-np.sqrt(3.0) / 2.0, np.sqrt(3.0) / 2.0], atol=1e-12)
    assert np.allclose(vertices[:, 0], 0.0, atol=1e-12)
    assert arcs.vertices(np.array([[0.2, -0.1]])).shape == (0, 2)

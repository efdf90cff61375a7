"""
Servicio de cuadratura esférica: mallas, integración y marcos tangentes.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import special

from ballbody.application.input.port.quadrature_port import (
    Direction,
    GridScheme,
    QuadraturePort,
    SphereGrid,
    TangentFrame
)
from ballbody.utils.config import settings
from ballbody.utils.exceptions import InvalidArgumentError, NumericalDomainError
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)

UNIT_TOL = 1e-12


def as_direction(coords: Sequence[float]) -> Direction:
    """
    Convierte coordenadas en una dirección validada.

    Raises:
        InvalidArgumentError: si la norma difiere de 1 en más de 1e-12
    """
    u = np.asarray(coords, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise InvalidArgumentError(f"La dirección {u.tolist()} no es unitaria")
    return u


def normalize(x: Sequence[float]) -> Direction:
    """Normaliza un vector no nulo."""
    v = np.asarray(x, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise InvalidArgumentError("No se puede normalizar el vector nulo")
    return v / norm


def _rotation_3d(offset: float) -> NDArray[np.float64]:
    """Rotación fija Rz(offset)·Rx(offset)."""
    c, s = np.cos(offset), np.sin(offset)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return rz @ rx


class SphereQuadratureService(QuadraturePort):
    """
    Implementación de la cuadratura sobre S^{n-1} para la medida σ normalizada.
    """

    def __init__(self, threads: int | None = None):
        """
        Inicializa el servicio.

        Args:
            threads: Hilos para evaluar integrandos (por defecto BALLBODY_THREADS)
        """
        self.threads = threads or settings.BALLBODY_THREADS

    def make_grid(
        self,
        dim: int,
        resolution: int,
        scheme: GridScheme,
        seed: int | None = None,
        offset: float | None = None
    ) -> SphereGrid:
        """
        Construye la malla pedida.

        - UniformAngle2D: `resolution` ángulos equiespaciados, pesos 1/m
        - ProductGaussTrapezoid3D: Gauss-Legendre en cos(polar) × trapecio
          en azimut con 2·resolution puntos
        - MonteCarlo: gaussianas normalizadas, reproducibles desde la semilla
        """
        if dim < 2:
            raise InvalidArgumentError(f"dim debe ser ≥ 2 (recibido {dim})")
        if resolution < 4:
            raise InvalidArgumentError(f"resolution debe ser ≥ 4 (recibido {resolution})")
        offset = settings.GRID_OFFSET if offset is None else offset

        if scheme == GridScheme.UNIFORM_ANGLE_2D:
            if dim != 2:
                raise InvalidArgumentError("UniformAngle2D requiere dim = 2")
            angles = 2.0 * np.pi * np.arange(resolution) / resolution + offset
            nodes = np.column_stack([np.cos(angles), np.sin(angles)])
            weights = np.full(resolution, 1.0 / resolution)

        elif scheme == GridScheme.PRODUCT_GAUSS_TRAPEZOID_3D:
            if dim != 3:
                raise InvalidArgumentError("ProductGaussTrapezoid3D requiere dim = 3")
            t, w = special.roots_legendre(resolution)
            n_phi = 2 * resolution
            phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
            tt, pp = np.meshgrid(t, phi, indexing="ij")
            st = np.sqrt(1.0 - tt**2)
            nodes = np.column_stack([
                (st * np.cos(pp)).ravel(),
                (st * np.sin(pp)).ravel(),
                tt.ravel()
            ])
            nodes = nodes @ _rotation_3d(offset).T
            weights = np.repeat(w / 2.0, n_phi) / n_phi
            weights = weights / weights.sum()

        elif scheme == GridScheme.MONTE_CARLO:
            if seed is None:
                raise InvalidArgumentError("MonteCarlo requiere una semilla")
            rng = np.random.default_rng(seed)
            samples = rng.standard_normal((resolution, dim))
            nodes = samples / np.linalg.norm(samples, axis=1, keepdims=True)
            weights = np.full(resolution, 1.0 / resolution)

        else:
            raise InvalidArgumentError(f"Esquema desconocido: {scheme}")

        logger.debug(f"Malla {scheme.value} construida: dim={dim}, nodos={len(weights)}")
        return SphereGrid(
            dim=dim,
            nodes=nodes,
            weights=weights,
            scheme=scheme,
            resolution=resolution,
            seed=seed if scheme == GridScheme.MONTE_CARLO else None
        )

    def default_grid(self, dim: int, resolution: int, seed: int | None = None) -> SphereGrid:
        """
        Esquema recomendado por dimensión: trapecio en n=2, producto en n=3,
        Monte Carlo sembrado en n ≥ 4.
        """
        if dim == 2:
            return self.make_grid(2, resolution, GridScheme.UNIFORM_ANGLE_2D)
        if dim == 3:
            return self.make_grid(3, resolution, GridScheme.PRODUCT_GAUSS_TRAPEZOID_3D)
        return self.make_grid(
            dim,
            resolution,
            GridScheme.MONTE_CARLO,
            seed=settings.DEFAULT_SEED if seed is None else seed
        )

    def fixed_grid(self, dim: int, nodes: int | None = None) -> SphereGrid:
        """Malla fija de sondeo con ≈ `nodes` nodos (usada por contains)."""
        nodes = nodes or settings.CONTAINS_GRID_NODES
        if dim == 3:
            return self.make_grid(3, max(4, int(round(np.sqrt(nodes / 2)))),
                                  GridScheme.PRODUCT_GAUSS_TRAPEZOID_3D)
        return self.default_grid(dim, nodes, seed=0)

    def integrate(self, grid: SphereGrid, f: Callable[[Direction], float]) -> float:
        """
        Evalúa f en cada nodo y suma con pesos (suma por pares de numpy).
        """
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                values = np.fromiter(pool.map(f, grid.nodes), dtype=float, count=grid.size)
        else:
            values = np.fromiter((f(u) for u in grid.nodes), dtype=float, count=grid.size)
        return self.integrate_values(grid, values)

    def integrate_values(self, grid: SphereGrid, values: NDArray[np.float64]) -> float:
        values = np.asarray(values, dtype=float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            node = grid.nodes[bad[0]]
            logger.error(f"Integrando no finito en el nodo {node.tolist()}")
            raise NumericalDomainError(
                f"Integrando no finito ({values[bad[0]]}) en el nodo {node.tolist()}",
                node=node
            )
        return float(np.sum(grid.weights * values))

    def tangent_frame(self, u: Direction) -> TangentFrame:
        """
        Aplica la reflexión de Householder que lleva e_n a u sobre e_1..e_{n-1}.
        """
        u = np.asarray(u, dtype=float)
        n = u.shape[0]
        v = -u.copy()
        v[-1] += 1.0
        vv = float(v @ v)
        if vv < 1e-300:
            reflection = np.eye(n)
        else:
            reflection = np.eye(n) - 2.0 * np.outer(v, v) / vv
        # Columnas H e_1..H e_{n-1}; H es simétrica
        return TangentFrame(base=u, basis=reflection[:, : n - 1].T.copy())

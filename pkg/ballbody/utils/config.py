"""
Configuración del toolkit usando Pydantic Settings.
"""
from pydantic_settings import BaseSettings
from pydantic import Field


class Settings(BaseSettings):
    """Configuración del toolkit."""

    # Application
    ENVIRONMENT: str = Field(default="development", description="Entorno de ejecución")
    LOG_LEVEL: str = Field(default="INFO", description="Nivel de logging")
    LOG_TO_FILE: bool = Field(default=False, description="Escribir logs rotados en ./logs")
    BALLBODY_THREADS: int = Field(
        default=1,
        ge=1,
        description="Máximo de hilos para evaluar integrandos nodo a nodo"
    )

    # Cuadratura sobre la esfera
    GRID_OFFSET: float = Field(
        default=1e-3,
        description="Rotación fija (radianes) aplicada a las mallas deterministas"
    )
    DEFAULT_RESOLUTION: int = Field(default=1024, description="Resolución por defecto de la malla")
    DEFAULT_SEED: int = Field(default=42, description="Semilla por defecto para Monte Carlo")
    CONTAINS_GRID_NODES: int = Field(
        default=2048,
        description="Nodos de la malla fija usada por contains() (aproximación exterior)"
    )

    # Curvatura
    FD_STEP: float = Field(default=1e-4, description="Paso de diferencias centrales")
    RICHARDSON_THRESHOLD: float = Field(
        default=1e-5,
        description="Diferencia entre pasos h y h/2 que activa Richardson"
    )
    KINK_THRESHOLD: float = Field(
        default=1e-3,
        description="Diferencia entre pasos que marca un nodo no suave"
    )
    CURVATURE_TOL: float = Field(default=1e-6, description="Tolerancia de radios en [0, 1]")
    CLAMP_REPORT_THRESHOLD: float = Field(
        default=1e-6,
        description="Magnitud de recorte de radios que se contabiliza"
    )

    # Solver de intersecciones de bolas
    SOLVER_MAX_ITER: int = Field(default=10_000, description="Tope de iteraciones del solver")
    SOLVER_TOL: float = Field(default=1e-12, description="Tolerancia del solver")
    SOLVER_STEP: float = Field(default=10.0, description="Paso del ascenso por gradiente proyectado")
    TRIG_CHECK_POINTS: int = Field(
        default=4096,
        description="Ángulos usados para validar el radio de curvatura de Trig2D"
    )

    # Cuerpo flotante
    CUT_BOUNDARY_SAMPLES: int = Field(
        default=4096,
        description="Muestras de frontera para localizar cruces con el círculo"
    )

    # Tolerancias por camino de evaluación
    TOL_CLOSED_FORM: float = Field(default=1e-6, description="Tolerancia camino cerrado")
    TOL_FINITE_DIFFERENCE: float = Field(default=1e-3, description="Tolerancia camino FD")

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()

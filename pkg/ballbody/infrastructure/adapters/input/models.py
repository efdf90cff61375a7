"""
Modelos Pydantic para la línea de comandos.
"""
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from ballbody.application.input.port.floating_port import CutterKind
from ballbody.application.output.port.report_writer_port import ReportFormat
from ballbody.utils.config import settings

MIN_VERIFY_RESOLUTION = 64


class Command(str, Enum):
    """Subcomandos disponibles."""
    FUNCTIONALS = "functionals"
    DUAL_CHECK = "dual-check"
    VERIFY = "verify"
    FLOATING = "floating"
    SEARCH = "search"
    SCAN = "scan"


BODY_COMMANDS = frozenset({Command.FUNCTIONALS, Command.DUAL_CHECK, Command.VERIFY, Command.FLOATING})


class RunConfig(BaseModel):
    """Configuración de una ejecución."""
    command: Command
    body_path: Optional[Path] = Field(None, description="Descripción JSON del cuerpo")
    dim: Optional[int] = Field(None, ge=2, description="Dimensión (search, scan)")
    resolution: int = Field(default=settings.DEFAULT_RESOLUTION, ge=1)
    seed: Optional[int] = Field(None, description="Semilla Monte Carlo (obligatoria si dim ≥ 4)")
    tolerance: Optional[float] = Field(None, gt=0.0)
    output: Optional[Path] = Field(None, description="Archivo de salida (stdout si se omite)")
    format: Optional[ReportFormat] = None

    # verify
    suite: str = Field(default="all", description="all, applicable o lista de desigualdades")

    # floating
    deltas: List[float] = Field(default_factory=list)
    directions: int = Field(default=256, ge=1)
    cutter: CutterKind = CutterKind.UNIT_BALL
    relative: bool = False
    emit_gnuplot: Optional[Path] = None

    # search / scan
    family: str = Field(default="balls")
    window: Tuple[float, float] = (0.4, 0.6)
    steps: int = Field(default=401, ge=2)

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command in BODY_COMMANDS and self.body_path is None:
            raise ValueError(f"{self.command.value} requiere --body")
        if self.command in (Command.SEARCH, Command.SCAN) and self.dim is None:
            raise ValueError(f"{self.command.value} requiere --dim")
        if self.command == Command.VERIFY and self.resolution < MIN_VERIFY_RESOLUTION:
            raise ValueError(f"verify requiere resolution ≥ {MIN_VERIFY_RESOLUTION}")
        if self.command == Command.FLOATING and not self.deltas:
            raise ValueError("floating requiere --deltas")
        if self.dim is not None and self.dim >= 4 and self.seed is None:
            raise ValueError("--seed es obligatorio en dimensión ≥ 4")
        return self

    @property
    def report_format(self) -> ReportFormat:
        if self.format is not None:
            return self.format
        return ReportFormat.CSV if self.command == Command.FLOATING else ReportFormat.JSON


class DualCheckReport(BaseModel):
    """Resumen de r_i(u) + s_{n−i}(−u) = 1 sobre la malla."""
    max_residual: float = Field(..., description="Máximo sobre nodos suaves")
    tol: float
    passed: bool = Field(..., alias="pass")
    nodes: int
    flagged_nodes: int
    path: str
    grid: Dict[str, Any]
    body: Dict[str, Any]

    model_config = {"populate_by_name": True}

"""
Puerto de salida para la serialización de reportes.
"""
from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path
from typing import Any, Sequence


class ReportFormat(str, Enum):
    """Formatos de reporte."""
    JSON = "json"
    CSV = "csv"


class ReportWriterPort(ABC):
    """
    Puerto de salida para escribir reportes en disco o stdout.
    """

    @abstractmethod
    def serialize(self, report: Any, fmt: ReportFormat) -> bytes:
        """
        Serializa un reporte (modelo, lista de modelos o dict).

        Args:
            report: Reporte producido por un servicio
            fmt: Formato de salida

        Returns:
            Bytes UTF-8 del reporte
        """
        pass

    @abstractmethod
    def write(self, report: Any, fmt: ReportFormat, output: Path | None = None) -> None:
        """
        Escribe el reporte en `output` (stdout si es None).

        Raises:
            OSError: si la ruta no es escribible
        """
        pass

    @abstractmethod
    def write_gnuplot(self, rows: Sequence[Any], columns: Sequence[str], path: Path) -> None:
        """
        Escribe un archivo de datos en texto plano para gnuplot.
        """
        pass

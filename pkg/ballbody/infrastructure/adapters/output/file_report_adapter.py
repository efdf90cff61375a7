"""
Adaptador de reportes en archivo: JSON, CSV y datos para gnuplot.
"""
import csv
import io
import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, List, Sequence

from pydantic import BaseModel

from ballbody.application.output.port.report_writer_port import ReportFormat, ReportWriterPort
from ballbody.utils.logger import setup_logger

logger = setup_logger(__name__)


def _plain(value: Any) -> Any:
    """Convierte modelos y enums en estructuras JSON-compatibles."""
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", by_alias=True)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    return value


def format_cell(value: Any) -> str:
    """Celda CSV: reales con 17 cifras significativas."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    if value is None:
        return ""
    return str(value)


class FileReportAdapter(ReportWriterPort):
    """
    Escribe reportes con precisión completa.

    JSON usa la representación de ida y vuelta de Python para los reales
    (orden de claves = orden de campos del modelo); CSV usa `.17g`.
    """

    def serialize(self, report: Any, fmt: ReportFormat) -> bytes:
        payload = _plain(report)
        if fmt == ReportFormat.JSON:
            text = json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=True) + "\n"
        else:
            text = self._csv(payload)
        return text.encode("utf-8")

    def _csv(self, payload: Any) -> str:
        rows: List[dict] = payload if isinstance(payload, list) else [payload]
        buffer = io.StringIO()
        if not rows:
            return ""
        columns = list(rows[0].keys())
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(column)) for column in columns])
        return buffer.getvalue()

    def write(self, report: Any, fmt: ReportFormat, output: Path | None = None) -> None:
        data = self.serialize(report, fmt)
        if output is None:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
            return
        try:
            Path(output).write_bytes(data)
            logger.info(f"Reporte {fmt.value} escrito en {output}")
        except OSError as e:
            logger.error(f"No se pudo escribir el reporte en {output}: {str(e)}")
            raise

    def write_gnuplot(self, rows: Sequence[Any], columns: Sequence[str], path: Path) -> None:
        lines = ["# " + " ".join(columns)]
        for row in _plain(list(rows)):
            lines.append(" ".join(format_cell(row[column]) for column in columns))
        try:
            Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
            logger.info(f"Datos gnuplot escritos en {path}")
        except OSError as e:
            logger.error(f"No se pudo escribir {path}: {str(e)}")
            raise

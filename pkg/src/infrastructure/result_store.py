"""Filesystem store for run records, machine rows, tables and traces."""

from pathlib import Path
from typing import Iterable, Optional

from loguru import logger
from pydantic import BaseModel

from config import get_settings
from domain.exceptions import ResultStoreError
from domain.metrics import MACHINE_HEADER
from domain.models import DropRecord, TraceRow


TRACE_HEADER = "time_ns,series,value"
DROP_HEADER = "time_ns,vc,frame_id,reason"


class ResultStore:
    def __init__(self, output_dir: Optional[str] = None):
        """
        Write under `output_dir`, defaulting to the configured output directory.
        """
        settings = get_settings()
        self.output_dir = Path(output_dir or settings.output_dir)
        logger.debug(f"Initialized result store at {self.output_dir}")

    def _write(self, name: str, text: str) -> Path:
        path = self.output_dir / name
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            raise ResultStoreError(f"Failed to write {path}: {e}") from e
        logger.debug(f"Wrote {path}")
        return path

    def write_record(self, stem: str, record: BaseModel) -> Path:
        return self._write(f"{stem}.json", record.model_dump_json(indent=2) + "\n")

    def write_machine_rows(self, stem: str, rows: Iterable[str]) -> Path:
        return self._write(f"{stem}.csv", "\n".join([MACHINE_HEADER, *rows]) + "\n")

    def write_table(self, stem: str, text: str) -> Path:
        return self._write(f"{stem}.txt", text)

    def write_trace(self, stem: str, rows: Iterable[TraceRow]) -> Path:
        lines = [TRACE_HEADER]
        lines += [f"{row.time_ns},{row.series},{row.value}" for row in rows]
        return self._write(f"{stem}.trace.csv", "\n".join(lines) + "\n")

    def write_drops(self, stem: str, records: Iterable[DropRecord]) -> Path:
        lines = [DROP_HEADER]
        lines += [f"{r.time_ns},{r.vc},{r.frame_id},{r.reason.value}" for r in records]
        return self._write(f"{stem}.drops.csv", "\n".join(lines) + "\n")

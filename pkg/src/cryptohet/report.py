"""Deterministic report files: CSV/JSON outputs plus a run record and manifest.

Floats are written with 12 significant digits in positional notation, so
outputs are stable across platforms. The only wall-clock value anywhere is
``generated_at`` in ``<command>.run.json``.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

SIG_DIGITS = 12


def fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot format {x!r}")
    s = np.format_float_positional(float(x), precision=SIG_DIGITS, unique=False,
                                   fractional=False, trim="-")
    return "0" if s == "-0" else s


def round12(obj: Any) -> Any:
    """Round every float in a JSON-able structure to 12 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    return obj


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def dumps_json(obj: Any) -> str:
    return json.dumps(round12(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dumps_csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else fmt(float(v))
    return str(v)


class ReportWriter:
    """Collects the files one command writes into ``out_dir``."""

    def __init__(self, out_dir: str | Path, command: str):
        self.out_dir = Path(out_dir)
        self.command = command
        self.written: list[str] = []

    def _write(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8", newline="")
        if name not in self.written:
            self.written.append(name)
        return path

    def csv(self, name: str, header, rows) -> Path:
        return self._write(name, dumps_csv(header, rows))

    def json(self, name: str, obj) -> Path:
        return self._write(name, dumps_json(obj))

    def text(self, name: str, text: str) -> Path:
        return self._write(name, text)

    def register(self, name: str) -> None:
        """Record a file written by someone else (e.g. a CSV saver)."""
        if name not in self.written:
            self.written.append(name)

    def finish(self, parameters: dict, inputs: Iterable[str | Path] = (), extra: dict | None = None) -> Path:
        from . import __version__

        run = {
            "command": self.command,
            "tool_version": __version__,
            "parameters": parameters,
            "inputs": {str(p): file_digest(p) for p in inputs},
            "generated_at": dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat(),
        }
        if extra:
            run.update(extra)
        self.json(f"{self.command}.run.json", run)
        manifest = {
            "command": self.command,
            # the run record carries a timestamp, so it is listed but not hashed
            "files": [{"name": n, "sha256": None if n.endswith(".run.json") else file_digest(self.out_dir / n)}
                      for n in self.written],
        }
        path = self.out_dir / f"{self.command}.manifest.json"
        path.write_text(dumps_json(manifest), encoding="utf-8")
        return path

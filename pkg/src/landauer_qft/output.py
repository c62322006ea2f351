"""CSV and JSON emission of sweep rows."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

from .cavity import NORMALIZATION_TAG
from .sweep import SweepRow

COLUMNS = ("tau", "delta_S", "delta_Q", "delta_Q_over_TR", "residual", "delta_p", "j_max",
           "quad_err", "flags")
NOT_APPLICABLE = "NA"
FORMAT_VERSION = 1


class OutputError(OSError):
    pass


def _num(x) -> str:
    if x is None:
        return NOT_APPLICABLE
    if isinstance(x, int):
        return str(x)
    # repr round-trips every double exactly
    return repr(float(x)) if math.isfinite(x) else str(float(x))


def to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_num(r.tau), _num(r.delta_S), _num(r.delta_Q), _num(r.delta_Q_over_TR),
                         _num(r.residual), _num(r.delta_p), str(r.j_max), _num(r.quad_err),
                         ";".join(r.flags)])
    return buf.getvalue()


def to_json(rows, config=None) -> str:
    doc = {"format_version": FORMAT_VERSION, "normalization": NORMALIZATION_TAG}
    if config is not None:
        doc["config"] = config.resolved()
        doc["gap"] = config.gap()
    doc["columns"] = list(COLUMNS)
    doc["rows"] = [r.as_dict() for r in rows]
    # NaN is written as a bare token, which json.loads reads back
    return json.dumps(doc, indent=2) + "\n"


def emit(rows, fmt: str = "csv", path=None, config=None) -> str:
    """
    Serialize ``rows`` as ``csv`` or ``json`` and write them to ``path``
    (stdout when ``None`` or ``"-"``). Returns the text written.
    """
    if fmt == "csv":
        text = to_csv(rows)
    elif fmt == "json":
        text = to_json(rows, config)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def _row_from_dict(d) -> SweepRow:
    return SweepRow(d["tau"], d["delta_S"], d["delta_Q"], d["delta_Q_over_TR"], d["residual"],
                    d["delta_p"], int(d["j_max"]), d["quad_err"], tuple(d["flags"]))


def read_json(path) -> tuple[list[SweepRow], dict]:
    """Rows and the full document from a file written by ``emit(..., "json")``."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return [_row_from_dict(d) for d in doc["rows"]], doc


def read_csv(path) -> list[SweepRow]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for d in reader:
        over = d["delta_Q_over_TR"]
        rows.append(SweepRow(
            float(d["tau"]), float(d["delta_S"]), float(d["delta_Q"]),
            None if over == NOT_APPLICABLE else float(over), float(d["residual"]),
            float(d["delta_p"]), int(d["j_max"]), float(d["quad_err"]),
            tuple(f for f in d["flags"].split(";") if f)))
    return rows

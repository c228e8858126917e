"""File formats.

Dataset CSV: one row per variable, first column the variable id, remaining
columns the samples. The first non-comment line is a header
(``var_id,1,2,...,n``). Lines starting with ``#`` are comments; writers use
one to record the resolved configuration. With ``transpose=True`` the file
is read samples-as-rows instead: the header holds the variable ids and
every following line is one sample.

Floats are written with 17 significant digits in CSV. JSON uses Python's
shortest round-trip representation, which reproduces every double exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .linalg import Dataset


class CsvFormatError(ValueError):
    def __init__(self, msg, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + msg)
        self.line = line
        self.column = column


def fmt(x) -> str:
    if x is None:
        return ""
    return "%.17g" % x


def _rows(text: str):
    """Yield (line_number, cells) for non-comment, non-blank lines."""
    reader = csv.reader(io.StringIO(text))
    for cells in reader:
        line = reader.line_num
        if not cells or (len(cells) == 1 and not cells[0].strip()):
            continue
        if cells[0].lstrip().startswith("#"):
            continue
        yield line, [c.strip() for c in cells]


def _parse_float(cell, line, column):
    try:
        v = float(cell)
    except ValueError:
        raise CsvFormatError(f"not a number: {cell!r}", line, column) from None
    if not math.isfinite(v):
        raise CsvFormatError(f"non-finite value {cell!r}", line, column)
    return v


def parse_dataset(text: str, transpose: bool = False) -> Dataset:
    rows = list(_rows(text))
    if not rows:
        raise CsvFormatError("empty file")
    (hline, header), body = rows[0], rows[1:]
    if not body:
        raise CsvFormatError("no data rows", hline)
    width = len(header)
    for line, cells in body:
        if len(cells) != width:
            raise CsvFormatError(f"expected {width} fields, got {len(cells)}", line)
    if transpose:
        ids = header
        values = [[_parse_float(c, line, col + 1) for col, c in enumerate(cells)]
                  for line, cells in body]
        values = np.array(values).T
    else:
        if width < 3:
            raise CsvFormatError("need an id column and at least two samples", hline)
        ids = [cells[0] for _, cells in body]
        values = np.array([[_parse_float(c, line, col + 2) for col, c in enumerate(cells[1:])]
                           for line, cells in body])
    return Dataset(values, ids)


def read_dataset(path, transpose: bool = False) -> Dataset:
    return parse_dataset(Path(path).read_text(), transpose)


def _comment(meta: dict) -> str:
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def format_dataset(data: Dataset, meta: dict | None = None) -> str:
    out = io.StringIO()
    if meta is not None:
        out.write(_comment(meta))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["var_id"] + [str(t + 1) for t in range(data.n)])
    for vid, row in zip(data.var_ids, data.values):
        w.writerow([vid] + [fmt(v) for v in row])
    return out.getvalue()


def write_dataset(path, data: Dataset, meta: dict | None = None):
    Path(path).write_text(format_dataset(data, meta))


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def format_records(records, meta: dict | None = None) -> str:
    out = io.StringIO()
    if meta is not None:
        out.write(_comment(meta))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["trial", "method", "target", "accuracy", "coverage", "seconds", "status"])
    for r in records:
        w.writerow([r.trial, r.method, r.target, fmt(r.accuracy), fmt(r.coverage),
                    fmt(r.seconds), r.status])
    return out.getvalue()

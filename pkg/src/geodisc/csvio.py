"""CSV output with round-trip float formatting."""

from __future__ import annotations

import csv
import io
import math
import sys

__all__ = ["fmt", "write_csv", "read_csv", "write_results"]


def fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int,)) or (hasattr(v, "dtype") and v.dtype.kind in "iu"):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    return "inf" if math.isinf(v) else f"{v:.17g}"


def write_csv(path, header, rows) -> str:
    """Write ``rows`` under ``header`` to ``path`` (or stdout for ``None``/"-")."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(path):
    """Return ``(header, rows)`` with every cell parsed as float where possible."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV")

    def conv(c):
        try:
            return float(c)
        except ValueError:
            return c

    return rows[0], [[conv(c) for c in r] for r in rows[1:]]


def write_results(path, results) -> str:
    from .boxdisc import RESULT_HEADER

    buf_rows = [r.as_row() for r in results]
    return write_csv(path, RESULT_HEADER, buf_rows)

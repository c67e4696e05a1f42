"""CSV persistence for effective tables.

A file starts with ``# key=value`` header lines, then a column header and
one row per lattice node in C order.  Floats are written with ``repr`` so
reading a file back reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from ..effective import EffectiveTable, PGrid

SCHEMA_VERSION = "1"


class TableFormatError(ValueError):
    pass


def table_text(table: EffectiveTable, config_hash: str = "", extra: dict = None) -> str:
    pg = table.pgrid
    header = {
        "schema": SCHEMA_VERSION,
        "dimension": pg.dimension,
        "samples": pg.samples,
        "ranges": json.dumps([repr(r) for r in pg.ranges]),
        "provenance": table.provenance,
        "config_hash": config_hash,
        "meta": json.dumps(table.meta, sort_keys=True, default=str),
    }
    header.update(extra or {})
    buf = io.StringIO()
    for k, v in header.items():
        buf.write(f"# {k}={v}\n")
    cols = [f"p{i + 1}" for i in range(pg.dimension)] + ["hbar", "converged", "residual"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    pts = pg.flat_points()
    vals = table.values.reshape(-1)
    conv = table.converged.reshape(-1)
    res = table.residuals.reshape(-1)
    for i in range(len(vals)):
        w.writerow([repr(float(x)) for x in pts[i]]
                   + [repr(float(vals[i])), int(conv[i]), repr(float(res[i]))])
    return buf.getvalue()


def write_table(table: EffectiveTable, path, config_hash: str = "", extra: dict = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(table_text(table, config_hash, extra))


def parse_table(text: str) -> EffectiveTable:
    lines = text.splitlines()
    header = {}
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, sep, val = line[1:].strip().partition("=")
        if not sep:
            raise TableFormatError(f"malformed header line {i + 1}: {line!r}")
        header[key] = val
    else:
        raise TableFormatError("table has no data section")
    version = header.get("schema")
    if version != SCHEMA_VERSION:
        raise TableFormatError(f"schema version {version!r} is not supported (expected {SCHEMA_VERSION!r})")
    try:
        dim = int(header["dimension"])
        pg = PGrid(dim, tuple(float(r) for r in json.loads(header["ranges"])), int(header["samples"]))
        meta = json.loads(header.get("meta", "{}"))
        rows = list(csv.reader(lines[body_start + 1:]))
        if len(rows) != pg.samples ** dim:
            raise TableFormatError(f"expected {pg.samples ** dim} rows, found {len(rows)}")
        vals = np.array([float(r[dim]) for r in rows])
        conv = np.array([r[dim + 1] == "1" for r in rows])
        res = np.array([float(r[dim + 2]) for r in rows])
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, TableFormatError):
            raise
        raise TableFormatError(f"malformed table: {exc}") from None
    return EffectiveTable(pg, vals, conv, res, header.get("provenance", "direct"), meta)


def read_table(path) -> EffectiveTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())


def read_header(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            k, _, v = line[1:].strip().partition("=")
            out[k] = v
    return out

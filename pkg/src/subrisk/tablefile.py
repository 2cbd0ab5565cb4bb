"""Reading and writing delimiter-separated probability tables.

Format::

    # comment lines start with '#'
    @groups cols            # or rows, or explicit flat indices: 0,1;2,3
    @sums 0.4,0.6           # optional known group sums
    ,H1,H2                  # optional header row
    Y1,0.1,0.3              # optional label column
    Y2,0.3,0.3

Fields are split on commas, tabs, semicolons or whitespace, whichever
the first data line uses.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import ParseError, ValidationError
from .table import GroupSpec, ProbTable, validate_table


@dataclass
class TableFile:
    values: np.ndarray
    groups: GroupSpec = None
    sums: np.ndarray | None = None
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None

    def to_table(self, groups: GroupSpec = None, renormalize: bool = False) -> ProbTable:
        spec = self.groups if groups is None else groups
        try:
            return validate_table(self.values, spec, renormalize=renormalize)
        except ValidationError as exc:
            raise type(exc)(f"{exc} [row/column positions are 0-based data cells]") from None


def _split(line: str, delim: str | None) -> list[str]:
    if delim is None:
        return line.split()
    return [f.strip() for f in line.split(delim)]


def _detect(line: str) -> str | None:
    for d in (",", "\t", ";"):
        if d in line:
            return d
    return None


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_groups(spec: str) -> GroupSpec:
    """``rows``, ``cols`` or ``i,j;k,l`` (flat 0-based cell indices)."""
    text = spec.strip()
    if text.lower() in ("rows", "row", "cols", "col", "columns"):
        return text.lower()
    if text.lower() in ("none", "all", ""):
        return None
    groups = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            groups.append([int(v) for v in re.split(r"[,\s]+", part) if v])
        except ValueError:
            raise ParseError(f"bad group list {part!r} in {spec!r}") from None
    return groups


def _parse_floats(text: str, what: str, lineno: int) -> np.ndarray:
    try:
        return np.array([float(v) for v in re.split(r"[,\s;]+", text.strip()) if v])
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} {text!r}") from None


def parse_table_text(text: str) -> TableFile:
    groups: GroupSpec = None
    sums = None
    rows: list[list[str]] = []
    linenos: list[int] = []
    delim: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            key, _, arg = line[1:].partition(" ")
            key = key.lower()
            if key == "groups":
                groups = parse_groups(arg)
            elif key == "sums":
                sums = _parse_floats(arg, "sums", lineno)
            else:
                raise ParseError(f"line {lineno}: unknown directive @{key}")
            continue
        if not rows:
            delim = _detect(line)
        rows.append(_split(line, delim))
        linenos.append(lineno)
    if not rows:
        raise ParseError("no data rows")

    col_labels = None
    if not all(_is_number(f) for f in rows[0] if f):
        col_labels = rows[0]
        rows, linenos = rows[1:], linenos[1:]
        if not rows:
            raise ParseError("header row but no data rows")
    row_labels = None
    # a blank top-left header cell marks a label column even if labels are numeric
    blank_corner = col_labels is not None and col_labels[0] == ""
    if blank_corner or not all(_is_number(r[0]) for r in rows):
        row_labels = [r[0] for r in rows]
        rows = [r[1:] for r in rows]
    if col_labels is not None and len(col_labels) == len(rows[0]) + 1:
        col_labels = col_labels[1:]

    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, (r, lineno) in enumerate(zip(rows, linenos)):
        if len(r) != width:
            raise ParseError(f"line {lineno}: expected {width} fields, found {len(r)}")
        for j, f in enumerate(r):
            try:
                data[i, j] = float(f)
            except ValueError:
                raise ParseError(f"line {lineno}, column {j + 1}: not a number: {f!r}") from None
    if data.shape[0] == 1:
        # a single data row is read as a flat vector
        data = data[0]
    return TableFile(data, groups, sums, row_labels, col_labels)


def read_table_file(path: str | Path) -> TableFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_table_text(text)


def _groups_directive(m: ProbTable) -> str:
    if len(m.shape) == 2 and m.shape[0] > 1:
        for name in ("cols", "rows"):
            if m.regroup(name).groups == m.groups:
                return name
    return ";".join(",".join(str(c) for c in g) for g in m.groups)


def write_table(m: ProbTable, out: TextIO | str | Path, sums=None) -> None:
    """Write ``m`` so that reading it back gives an identical table.

    A 1-D table is written as a single row; a ``1 x k`` matrix therefore
    reads back as a flat vector with the same cells and groups.
    """
    if isinstance(out, (str, Path)):
        with open(out, "w") as fh:
            write_table(m, fh, sums)
        return
    out.write(f"@groups {_groups_directive(m)}\n")
    if sums is not None:
        out.write("@sums " + ",".join(repr(float(v)) for v in np.ravel(sums)) + "\n")
    mat = m.probs.reshape(m.shape) if len(m.shape) == 2 else m.probs.reshape(1, -1)
    for row in mat:
        out.write(",".join(repr(float(v)) for v in row) + "\n")


def dump_table(m: ProbTable, sums=None) -> str:
    buf = io.StringIO()
    write_table(m, buf, sums)
    return buf.getvalue()

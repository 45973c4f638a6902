"""
File Transport Layer

Reading and writing of the files the command line works with:
- sampled paths as CSV (`t,a1,...,ad`, one row per dyadic grid point)
- piecewise-linear paths as CSV (same header, one row per breakpoint)
- JSON documents with deterministic formatting
"""

import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from ..core.construct import SampledPath
from ..core.errors import ParseError, PreconditionError
from ..core.signature import PiecewiseLinearPath

logger = logging.getLogger(__name__)

Source = Union[str, Path, TextIO]


def _open_text(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()  # type: ignore[union-attr]
    return Path(source).read_text(encoding="utf-8")


def _read_rows(source: Source) -> Tuple[List[str], List[List[str]]]:
    reader = csv.reader(io.StringIO(_open_text(source)))
    rows = [[cell.strip() for cell in row] for row in reader if row and any(c.strip() for c in row)]
    if not rows:
        raise ParseError("empty CSV input")
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t":
        raise ParseError(f"CSV header must start with 't', got {header[:1]}")
    if len(header) < 2:
        raise ParseError("CSV needs at least one value column")
    for number, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"row {number} has {len(row)} cells, header has {len(header)}")
    return header, body


def _exact(cell: str, number: int) -> Fraction:
    try:
        return Fraction(cell)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"row {number}: cannot parse {cell!r} as a number") from e


def dyadic_depth(times: Sequence[Fraction]) -> int:
    """M such that times are exactly k/2^M for k = 0..2^M"""
    steps = len(times) - 1
    if steps < 1 or steps & (steps - 1):
        raise PreconditionError(f"{len(times)} rows is not 2^M + 1 for any M", "dyadic_grid")
    depth = steps.bit_length() - 1
    for k, t in enumerate(times):
        if t != Fraction(k, steps):
            raise PreconditionError(f"row {k + 2}: t = {t} is not {Fraction(k, steps)}", "dyadic_grid")
    return depth


def read_sampled_path(source: Source, exact: bool = False) -> Tuple[List[str], SampledPath]:
    """
    Read a path sampled on the dyadic grid of [0, 1].

    Returns:
        Channel names from the header and the sampled path
    """
    header, body = _read_rows(source)
    times = [_exact(row[0], n) for n, row in enumerate(body, start=2)]
    depth = dyadic_depth(times)
    if exact:
        values: Any = np.array(
            [[_exact(row[c], n) for n, row in enumerate(body, start=2)] for c in range(1, len(header))],
            dtype=object,
        )
    else:
        values = np.array(
            [[float(_exact(row[c], n)) for n, row in enumerate(body, start=2)] for c in range(1, len(header))],
            dtype=np.float64,
        )
    logger.info(f"Read {len(header) - 1} channels on a dyadic grid of depth {depth}")
    return header[1:], SampledPath(depth, values)


def read_breakpoints(source: Source, exact: bool = False) -> PiecewiseLinearPath:
    """Read a piecewise-linear path from its breakpoints"""
    _, body = _read_rows(source)
    rows = [[_exact(cell, n) for cell in row] for n, row in enumerate(body, start=2)]
    return PiecewiseLinearPath.from_rows(rows, exact=exact)


def write_sampled_path(target: Source, path: SampledPath, names: Optional[Sequence[str]] = None) -> None:
    names = list(names) if names is not None else [f"a{i + 1}" for i in range(path.channels)]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t"] + names)
    steps = path.points - 1
    for k in range(path.points):
        writer.writerow([str(Fraction(k, steps))] + [_cell(v) for v in path.values[:, k]])
    _write_text(target, buffer.getvalue())


def write_table_csv(target: Optional[Source], rows: Sequence[Dict[str, str]]) -> None:
    """Write string rows under the keys of the first row; `None` writes to stdout"""
    buffer = io.StringIO()
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    _write_text(target, buffer.getvalue())
    logger.info(f"Wrote {len(rows)} table rows")


def _cell(value: Any) -> str:
    if isinstance(value, Fraction):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        raise ParseError(f"cannot write non-finite value {value}")
    return repr(value)


def _write_text(target: Optional[Source], text: str) -> None:
    if target is None:
        sys.stdout.write(text)
    elif hasattr(target, "write"):
        target.write(text)  # type: ignore[union-attr]
    else:
        Path(target).write_text(text, encoding="utf-8")  # type: ignore[arg-type]


def dumps(document: Dict[str, Any]) -> str:
    """Deterministic JSON: insertion order, floats via repr, trailing newline"""
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def read_json(source: Source) -> Any:
    try:
        return json.loads(_open_text(source))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e


def write_json(target: Optional[Source], document: Dict[str, Any]) -> None:
    _write_text(target, dumps(document))

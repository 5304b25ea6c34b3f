"""Low-level helpers for the tab-separated file formats.

Every file the toolkit writes starts with a provenance comment line
(`# lscd <version> seed=<seed>`); readers skip leading `#` comments so
round-trips are clean.  Output is deterministic: no timestamps, stable
row order, `\n` line endings, UTF-8.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .errors import FormatError


def provenance_line(version: str, seed=None) -> str:
    if seed is None:
        return f"# lscd {version}"
    return f"# lscd {version} seed={seed}"


def write_tsv(path, header: list[str], rows, version: str, seed=None) -> None:
    """Write rows (iterables of values) as TSV with a provenance comment and header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(provenance_line(version, seed) + "\n")
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join("" if v is None else str(v) for v in row) + "\n")


def read_tsv_dicts(path) -> list[dict]:
    """Read a headered TSV into dicts, skipping leading comment lines.

    Raises FormatError with a line number on ragged rows.
    """
    path = Path(path)
    if not path.exists():
        raise FormatError("file not found", path=path)
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.readlines()
    start = 0
    while start < len(lines) and (lines[start].startswith("#") or not lines[start].strip()):
        start += 1
    if start >= len(lines):
        raise FormatError("no header row", path=path, line=start)
    reader = csv.reader(io.StringIO("".join(lines[start:])), delimiter="\t",
                        quoting=csv.QUOTE_NONE)
    header = next(reader)
    out = []
    for i, row in enumerate(reader):
        lineno = start + 2 + i
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise FormatError(
                f"expected {len(header)} columns, got {len(row)}", path=path, line=lineno)
        d = dict(zip(header, row))
        d["__line__"] = lineno
        out.append(d)
    return out


def read_tsv_rows(path, n_cols: int) -> list[tuple[int, list[str]]]:
    """Read a headerless TSV (comments skipped) as (lineno, fields) pairs."""
    path = Path(path)
    if not path.exists():
        raise FormatError("file not found", path=path)
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.startswith("#") or not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != n_cols:
                raise FormatError(
                    f"expected {n_cols} columns, got {len(fields)}", path=path, line=lineno)
            out.append((lineno, fields))
    return out


def parse_float(text: str, path=None, line=None) -> float:
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"not a number: {text!r}", path=path, line=line) from None


def parse_int(text: str, path=None, line=None) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"not an integer: {text!r}", path=path, line=line) from None

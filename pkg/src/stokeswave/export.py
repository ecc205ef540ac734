"""Flat-file output: atomic writes and the CSV layouts used by the CLI."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence


def atomic_write_text(path, text: str) -> Path:
    """Write ``text`` to ``path`` via a temp file in the same directory + rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_csv(
    columns: Mapping[str, Sequence[float]],
    header_comments: Iterable[str] = (),
    trailing_comments: Iterable[str] = (),
) -> str:
    """Render named, equal-length columns as CSV text.

    Floats use ``repr`` so that the file round-trips exactly. Comment lines
    are prefixed with ``# ``.
    """
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"column lengths differ: {sorted(lengths)}")
    lines = [f"# {c}" for c in header_comments]
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(repr(float(v)) for v in row))
    lines.extend(f"# {c}" for c in trailing_comments)
    return "\n".join(lines) + "\n"


def write_csv(path, columns, header_comments=(), trailing_comments=()) -> Path:
    return atomic_write_text(path, format_csv(columns, header_comments, trailing_comments))


def read_csv(path):
    """Read a CSV written by :func:`write_csv`.

    Returns ``(columns, comments)`` where ``columns`` maps name to a list of
    floats and ``comments`` holds the comment lines without the ``# `` prefix.
    """
    comments, rows, names = [], [], None
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif names is None:
            names = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    names = names or []
    columns = {n: [r[i] for r in rows] for i, n in enumerate(names)}
    return columns, comments

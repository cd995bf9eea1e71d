"""CSV input/output for multichannel series and plot-ready tables.

Series CSV: a header row of channel names, then one row per time sample with
one comma-separated decimal value per channel. Missing values are not allowed.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import MultichannelSeries
from .errors import InputError

__all__ = ["read_series_csv", "write_series_csv", "write_table_csv", "atomic_write_text"]


def read_series_csv(path: str | os.PathLike) -> MultichannelSeries:
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        except csv.Error as exc:
            raise InputError(f"{path}:1: {exc}") from exc
        names = [h.strip() for h in header]
        if not names or any(not n for n in names):
            raise InputError(f"{path}:1: header must name every channel")
        rows = []
        try:
            for row in reader:
                line = reader.line_num
                if not row:
                    continue
                if len(row) != len(names):
                    raise InputError(f"{path}:{line}: expected {len(names)} values, got {len(row)}")
                try:
                    rows.append([float(v) for v in row])
                except ValueError:
                    raise InputError(f"{path}:{line}: non-numeric or missing value in {row!r}") from None
                if not all(np.isfinite(rows[-1])):
                    raise InputError(f"{path}:{line}: non-finite value in {row!r}")
        except csv.Error as exc:
            raise InputError(f"{path}:{reader.line_num}: {exc}") from exc
    if len(rows) < 2:
        raise InputError(f"{path}: need at least 2 samples, got {len(rows)}")
    return MultichannelSeries(np.array(rows).T, tuple(names))


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if not isinstance(v, (str, int)) else v for v in row])
    return buf.getvalue()


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_series_csv(path: str | os.PathLike, series: MultichannelSeries) -> None:
    atomic_write_text(path, _csv_text(series.channel_names, series.data.T))


def write_table_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, _csv_text(header, rows))

"""CSV files written by the harness.

Floats are written with ``repr`` so that reading a file back gives the exact
values that were written.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_rows(path):
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_field(path, x, times, data):
    """One row per grid point: ``x`` then the field at each saved time."""
    data = np.asarray(data, dtype=float)
    header = ["x"] + [f"t={float(t)!r}" for t in times]
    rows = ([xi, *col] for xi, col in zip(x, data))
    return write_rows(path, header, rows)


def read_field(path):
    header, rows = read_rows(path)
    times = np.array([float(h[2:]) for h in header[1:]])
    table = np.array([[float(v) for v in row] for row in rows])
    return table[:, 0], times, table[:, 1:]


def write_energy(path, sigma, r_sq, r_lin, cumulative_sq):
    rows = zip(range(1, len(sigma) + 1), sigma, r_sq, r_lin, cumulative_sq)
    return write_rows(path, ["mode", "sigma", "r_sq", "r_lin", "cumulative_sq"], rows)

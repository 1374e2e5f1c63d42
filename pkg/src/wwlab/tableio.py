"""Deterministic CSV emission: one header line, 17-significant-digit
scientific notation, '.' decimal separator.  Data files carry no run
metadata, so identical inputs produce identical bytes."""

from __future__ import annotations

import numpy as np

_FMT = "{:.16e}"


def write_csv(path, header: list[str], columns) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = cols[0].size
    for c in cols:
        if c.size != n:
            raise ValueError("all columns must have equal length")
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for i in range(n):
            f.write(",".join(_FMT.format(c[i]) for c in cols) + "\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as f:
        header = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data

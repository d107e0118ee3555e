"""CSV input/output for signals, symbols and envelopes."""
from __future__ import annotations

import csv

import numpy as np

from .group import Group, GroupMismatchError
from .psido import Symbol
from .transforms import Signal


def _fmt(x: float) -> str:
    return repr(float(x))


def write_signal_csv(path, f: Signal) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(f.data):
            w.writerow([i, _fmt(z.real), _fmt(z.imag)])


def read_signal_csv(path, group: Group) -> Signal:
    """Rows ``index, re, im``; missing indices are zero."""
    data = np.zeros(group.order, dtype=np.complex128)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    for row in rows:
        if not row:
            continue
        i = int(row[0])
        if not 0 <= i < group.order:
            raise GroupMismatchError(f"{path}: index {i} outside a group of order {group.order}")
        data[i] = float(row[1]) + 1j * float(row[2] if len(row) > 2 else 0.0)
    return Signal(group, data)


def write_symbol_csv(path, sigma: Symbol) -> None:
    n = sigma.group.order
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "xi", "re", "im"])
        for x in range(n):
            for xi in range(n):
                z = sigma.data[x, xi]
                w.writerow([x, xi, _fmt(z.real), _fmt(z.imag)])


def read_symbol_csv(path, group: Group) -> Symbol:
    n = group.order
    data = np.zeros((n, n), dtype=np.complex128)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    for row in rows:
        if not row:
            continue
        x, xi = int(row[0]), int(row[1])
        if not (0 <= x < n and 0 <= xi < n):
            raise GroupMismatchError(f"{path}: point ({x}, {xi}) outside a group of order {n}")
        data[x, xi] = float(row[2]) + 1j * float(row[3] if len(row) > 3 else 0.0)
    return Symbol(group, data)


def write_rows(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


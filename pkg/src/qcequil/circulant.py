"""Circulant permutation matrices and exponent matrices over the shift alphabet.

A shift ``s`` in ``{-1, 0, ..., L-1}`` names the ``L x L`` identity cyclically
shifted right ``s`` times; ``-1`` is the all-zero block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError, FormatError

ZERO_BLOCK = -1


def check_shift(shift: int, L: int) -> int:
    """Return ``shift`` as an int, raising :class:`DomainError` unless it lies in A_L."""
    if L < 1:
        raise DomainError(f"circulant size must be positive, got {L}")
    if int(shift) != shift:
        raise DomainError(f"shift must be an integer, got {shift!r}")
    shift = int(shift)
    if shift < ZERO_BLOCK or shift >= L:
        raise DomainError(f"shift {shift} outside [-1, {L - 1}] for circulant size {L}")
    return shift


def cpm_from_shift(shift: int, L: int) -> np.ndarray:
    """Lift one shift to its ``L x L`` circulant permutation matrix.

    Row ``i`` of ``P^s`` has its single one in column ``(i + s) mod L``; shift
    -1 gives the zero matrix.

    >>> cpm_from_shift(1, 3)
    array([[0, 1, 0],
           [0, 0, 1],
           [1, 0, 0]], dtype=uint8)
    """
    shift = check_shift(shift, L)
    P = np.zeros((L, L), dtype=np.uint8)
    if shift == ZERO_BLOCK:
        return P
    rows = np.arange(L)
    P[rows, (rows + shift) % L] = 1
    return P


def compose_shifts(a: int, b: int, L: int) -> int:
    """Shift of the product ``P^a P^b``; the zero block absorbs."""
    a = check_shift(a, L)
    b = check_shift(b, L)
    if a == ZERO_BLOCK or b == ZERO_BLOCK:
        return ZERO_BLOCK
    return (a + b) % L


def _as_grid(entries) -> tuple:
    grid = tuple(tuple(row) for row in entries)
    if not grid or not grid[0]:
        raise DomainError("exponent matrix needs at least one row and one column")
    width = len(grid[0])
    for i, row in enumerate(grid):
        if len(row) != width:
            raise DomainError(f"row {i} has {len(row)} entries, expected {width}")
    return grid


def validate_exponent(entries, circulant_size: int | None = None) -> list[tuple[int, int, int]]:
    """List every ``(row, col, value)`` whose value is not a valid shift.

    ``entries`` may be an :class:`ExponentMatrix` or a nested sequence, in
    which case ``circulant_size`` is required. An empty list means valid.
    """
    if isinstance(entries, ExponentMatrix):
        circulant_size = entries.circulant_size
        entries = entries.entries
    if circulant_size is None or circulant_size < 1:
        raise DomainError("a positive circulant size is required")
    violations = []
    for i, row in enumerate(entries):
        for j, value in enumerate(row):
            if int(value) != value or value < ZERO_BLOCK or value >= circulant_size:
                violations.append((i, j, value))
    return violations


@dataclass(frozen=True)
class ExponentMatrix:
    """Grid of circulant shifts together with the circulant size ``L``.

    ``labels`` optionally names what each column encodes; it is carried along
    for provenance and ignored by equality.
    """

    entries: tuple
    circulant_size: int
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        grid = _as_grid(self.entries)
        grid = tuple(tuple(int(v) if int(v) == v else v for v in row) for row in grid)
        object.__setattr__(self, "entries", grid)
        if self.circulant_size < 1:
            raise DomainError(f"circulant size must be positive, got {self.circulant_size}")
        bad = validate_exponent(grid, self.circulant_size)
        if bad:
            where = ", ".join(f"({i},{j})={v}" for i, j, v in bad)
            raise DomainError(f"invalid shifts for L={self.circulant_size}: {where}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(grid[0]):
                raise DomainError("one label per column is required")
            object.__setattr__(self, "labels", labels)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def to_met(self) -> "MetExponentMatrix":
        cells = [[() if v == ZERO_BLOCK else (v,) for v in row] for row in self.entries]
        return MetExponentMatrix(cells, self.circulant_size)


@dataclass(frozen=True)
class MetExponentMatrix:
    """Exponent matrix whose cells are shift multisets (multi-edge codes).

    An empty cell is the zero block; a cell with ``w`` shifts is a circulant
    of weight ``w``.
    """

    cells: tuple
    circulant_size: int

    def __post_init__(self):
        grid = _as_grid(tuple(tuple(tuple(int(s) for s in cell) for cell in row) for row in self.cells))
        object.__setattr__(self, "cells", grid)
        L = self.circulant_size
        if L < 1:
            raise DomainError(f"circulant size must be positive, got {L}")
        for i, row in enumerate(grid):
            for j, cell in enumerate(row):
                for s in cell:
                    if s < 0 or s >= L:
                        raise DomainError(f"cell ({i},{j}): shift {s} outside [0, {L - 1}]")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cells), len(self.cells[0])

    def weights(self) -> np.ndarray:
        """Circulant weight (multiset cardinality) of every cell."""
        return np.array([[len(c) for c in row] for row in self.cells], dtype=np.int64)


# -- text format -------------------------------------------------------------
#
#   m n L
#   a11 a12 ... a1n
#   ...
#
# ``-1`` is the zero block; a MET cell is a comma-joined list such as ``1,2,7``.
# Lines starting with ``#`` are comments.


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, raw, line


def _parse_int(token: str, lineno: int, raw: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"not an integer: {token!r}", lineno, raw.find(token) + 1) from None


def parse_exponent_text(text: str, met: bool | None = None):
    """Parse the exponent-matrix text format.

    Returns an :class:`ExponentMatrix`, or a :class:`MetExponentMatrix` when
    ``met`` is true or (with ``met=None``) any cell holds a comma list.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty input", 1)
    lineno, raw, header = lines[0]
    head = header.split()
    if len(head) != 3:
        raise FormatError(f"header must be 'm n L', got {header!r}", lineno, 1)
    m, n, L = (_parse_int(t, lineno, raw) for t in head)
    if m < 1 or n < 1 or L < 1:
        raise FormatError("m, n and L must be positive", lineno, 1)
    body = lines[1:]
    if len(body) != m:
        at = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else lineno + 1)
        raise FormatError(f"expected {m} matrix rows, found {len(body)}", at)
    cells = []
    saw_list = False
    for lineno, raw, line in body:
        tokens = line.split()
        if len(tokens) != n:
            raise FormatError(f"expected {n} entries, found {len(tokens)}", lineno, 1)
        row = []
        for tok in tokens:
            if "," in tok:
                saw_list = True
                row.append(tuple(_parse_int(t, lineno, raw) for t in tok.split(",") if t))
            else:
                row.append(_parse_int(tok, lineno, raw))
        cells.append(row)
    want_met = met if met is not None else saw_list
    try:
        if want_met:
            norm = [[c if isinstance(c, tuple) else (() if c == ZERO_BLOCK else (c,)) for c in row] for row in cells]
            return MetExponentMatrix(norm, L)
        if saw_list:
            raise FormatError("comma-joined cells require the MET form")
        return ExponentMatrix(cells, L)
    except FormatError:
        raise
    except DomainError as exc:
        raise FormatError(str(exc)) from None


def format_exponent_text(E, comments: Iterable[str] = ()) -> str:
    """Serialize an exponent or MET exponent matrix, with optional ``#`` comments."""
    out = [f"# {c}" for c in comments]
    if isinstance(E, MetExponentMatrix):
        m, n = E.shape
        out.append(f"{m} {n} {E.circulant_size}")
        for row in E.cells:
            out.append(" ".join(",".join(map(str, c)) if c else str(ZERO_BLOCK) for c in row))
    else:
        m, n = E.shape
        out.append(f"{m} {n} {E.circulant_size}")
        for row in E.entries:
            out.append(" ".join(map(str, row)))
    return "\n".join(out) + "\n"


def exponent_matrix(rows: Sequence[Sequence[int]], L: int, labels=None) -> ExponentMatrix:
    """Convenience constructor accepting any nested sequence."""
    return ExponentMatrix(tuple(tuple(r) for r in rows), L, labels)

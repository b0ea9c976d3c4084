"""QC-LDPC parity-check constructions.

Covers plain and multi-edge lifting, tail-biting spatially-coupled assembly,
repeat-accumulate codes with accumulator encoding and chord distance-graph
codes. Binary matrices are ``uint8`` numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .circulant import ZERO_BLOCK, ExponentMatrix, MetExponentMatrix, check_shift, cpm_from_shift
from .exceptions import DomainError


def lift(E: ExponentMatrix) -> np.ndarray:
    """Replace every shift by its ``L x L`` CPM, giving an ``mL x nL`` matrix."""
    if isinstance(E, MetExponentMatrix):
        return lift_met(E)
    L = E.circulant_size
    m, n = E.shape
    H = np.zeros((m * L, n * L), dtype=np.uint8)
    rows = np.arange(L)
    for i, row in enumerate(E.entries):
        for j, s in enumerate(row):
            if s != ZERO_BLOCK:
                H[i * L + rows, j * L + (rows + s) % L] = 1
    return H


def base_graph(E) -> np.ndarray:
    """Protograph mask: 1 where the block is non-zero."""
    if isinstance(E, MetExponentMatrix):
        return (E.weights() > 0).astype(np.uint8)
    return (E.to_array() >= 0).astype(np.uint8)


def lift_met(ME: MetExponentMatrix) -> np.ndarray:
    """Lift a multi-edge exponent matrix; each cell becomes a sum of CPMs.

    Repeated shifts inside one cell would cancel over GF(2) and are rejected.
    """
    L = ME.circulant_size
    m, n = ME.shape
    H = np.zeros((m * L, n * L), dtype=np.uint8)
    for i, row in enumerate(ME.cells):
        for j, cell in enumerate(row):
            if len(set(cell)) != len(cell):
                raise DomainError(
                    f"cell ({i},{j}) repeats a shift {sorted(cell)}; duplicate CPMs cancel over GF(2)"
                )
            for s in cell:
                H[i * L:(i + 1) * L, j * L:(j + 1) * L] ^= cpm_from_shift(s, L)
    return H


def block(H, i: int, j: int, L: int) -> np.ndarray:
    return np.asarray(H)[i * L:(i + 1) * L, j * L:(j + 1) * L]


def exponent_from_lift(H, L: int) -> ExponentMatrix:
    """Recover shifts from a lifted matrix by reading the first row of each block."""
    H = gf2.as_binary(H)
    m, n = H.shape[0] // L, H.shape[1] // L
    rows = []
    for i in range(m):
        row = []
        for j in range(n):
            first = np.nonzero(block(H, i, j, L)[0])[0]
            row.append(int(first[0]) if first.size else ZERO_BLOCK)
        rows.append(row)
    return ExponentMatrix(rows, L)


# -- spatially coupled -------------------------------------------------------


@dataclass(frozen=True)
class ScParams:
    """Tail-biting spatially-coupled code parameters.

    ``B`` is the ``C x W`` CPM-shifts matrix and ``D`` the per-row offsets;
    ``D`` defaults to ``i*W/C`` when ``C`` divides ``W``.
    """

    W: int
    C: int
    N: int
    L_mult: int
    B: tuple
    D: tuple | None = field(default=None)

    def __post_init__(self):
        for name in ("W", "C", "N", "L_mult"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")
        B = tuple(tuple(int(v) for v in row) for row in self.B)
        if len(B) != self.C or any(len(r) != self.W for r in B):
            raise DomainError(f"B must be {self.C} x {self.W}")
        for row in B:
            for s in row:
                if s < 0:
                    raise DomainError("B entries must be CPM shifts (>= 0)")
                check_shift(s, self.N)
        object.__setattr__(self, "B", B)
        D = self.D
        if D is None:
            if self.W % self.C:
                raise DomainError("D must be given when C does not divide W")
            D = tuple(i * self.W // self.C for i in range(self.C))
        D = tuple(int(d) for d in D)
        if len(D) != self.C:
            raise DomainError(f"D must have {self.C} entries")
        if D[0] != 0 or any(a >= b for a, b in zip(D, D[1:])) or any(d >= self.W for d in D):
            raise DomainError(f"D must start at 0, increase strictly and stay below W: {D}")
        object.__setattr__(self, "D", D)


def sc_construct(p: ScParams) -> MetExponentMatrix:
    """Assemble the tail-biting coupled chain as a ``C*L x W*L`` block grid.

    Block column ``j`` sits in copy ``j // W`` at local position ``w = j % W``;
    its band starts at row ``C*(j // W) + c`` where ``c`` is the last row group
    with ``D[c] <= w``, runs over ``W`` consecutive rows and wraps modulo
    ``C*L``. The ``t``-th band position in row ``r`` carries shift
    ``B[r % C][t]``. Each block column therefore holds exactly ``W`` CPMs;
    when ``W > C*L`` the band wraps onto itself and cells become multi-edge.
    """
    rows, cols = p.C * p.L_mult, p.W * p.L_mult
    cells = [[[] for _ in range(cols)] for _ in range(rows)]
    for j in range(cols):
        copy, w = divmod(j, p.W)
        group = max(c for c in range(p.C) if p.D[c] <= w)
        anchor = copy * p.C + group
        for t in range(p.W):
            r = (anchor + t) % rows
            cells[r][j].append(p.B[r % p.C][t])
    return MetExponentMatrix([[tuple(c) for c in row] for row in cells], p.N)


# -- repeat accumulate -------------------------------------------------------


@dataclass(frozen=True)
class RaCode:
    """Repeat-accumulate code ``H = [H1 | H2]`` with ``H2`` dual-diagonal."""

    H1: ExponentMatrix

    @property
    def L(self) -> int:
        return self.H1.circulant_size

    @property
    def t(self) -> int:
        return self.H1.shape[0]

    @property
    def message_length(self) -> int:
        return self.H1.shape[1] * self.L


def dual_diagonal(t: int, L: int) -> np.ndarray:
    """``t x t`` block lower-bidiagonal matrix of identity circulants."""
    if t < 1:
        raise DomainError("need at least one block column")
    E = [[0 if (j == i or j == i - 1) else ZERO_BLOCK for j in range(t)] for i in range(t)]
    return lift(ExponentMatrix(E, L))


def ra_build(code: RaCode) -> np.ndarray:
    return np.hstack([lift(code.H1), dual_diagonal(code.t, code.L)])


def ra_encode(code: RaCode, message) -> np.ndarray:
    """Systematic codeword ``[message | parity]`` with ``H x = 0``.

    The parity is obtained by accumulating the partial syndromes ``H1 u``
    block by block down the bidiagonal ``H2``.
    """
    u = np.asarray(message, dtype=np.int64)
    if u.ndim != 1 or u.shape[0] != code.message_length:
        raise DomainError(f"message must have length {code.message_length}, got {u.shape}")
    if u.size and not np.isin(u, (0, 1)).all():
        raise DomainError("message must be binary")
    L = code.L
    s = lift(code.H1).astype(np.int64) @ u % 2
    parity = np.zeros(code.t * L, dtype=np.int64)
    prev = np.zeros(L, dtype=np.int64)
    for i in range(code.t):
        prev = (s[i * L:(i + 1) * L] + prev) % 2
        parity[i * L:(i + 1) * L] = prev
    return np.concatenate([u, parity]).astype(np.uint8)


# -- chord / cage graph ------------------------------------------------------


def chord_cage_exponent(n: int, offsets) -> ExponentMatrix:
    """Exponent matrix whose row(s) are chord offsets on a ring of ``n`` nodes.

    ``offsets`` is one list of distances, or a list of such lists for a
    multi-row matrix. The lift is the circulant adjacency of the chord
    distance graph.
    """
    if n < 1:
        raise DomainError("ring size must be positive")
    rows = [list(offsets)] if offsets and np.isscalar(list(offsets)[0]) else [list(r) for r in offsets]
    if not rows or not rows[0]:
        raise DomainError("at least one offset is required")
    for row in rows:
        if len(set(row)) != len(row):
            raise DomainError(f"duplicate chord offset in {row}")
        for d in row:
            if d < 0 or d >= n:
                raise DomainError(f"chord offset {d} outside [0, {n})")
    return ExponentMatrix(rows, n)

"""Spherical exponent matrices and the row/column shift-sum gauge.

A spherical matrix has three block rows (radius, azimuth, polar angle) of
weight-1 circulants of size ``k``, one column per particle. A line passes the
gauge when its shift sum is a multiple of the circulant size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circulant import ZERO_BLOCK, ExponentMatrix, MetExponentMatrix, check_shift, parse_exponent_text
from .exceptions import DomainError, FormatError


@dataclass(frozen=True)
class DivisibilityReport:
    k: int
    radii: tuple
    per_radius: tuple  # k % r_i == 0
    divides_sum: bool  # k % sum(r) == 0
    general_multiple: bool  # sum(r) * prod(r) divides k

    @property
    def passed(self) -> bool:
        return all(self.per_radius) and self.divides_sum

    def failures(self) -> list[str]:
        out = [f"k={self.k} is not a multiple of r{i + 1}={r}" for i, (r, ok) in enumerate(zip(self.radii, self.per_radius)) if not ok]
        if not self.divides_sum:
            out.append(f"k={self.k} is not a multiple of sum(r)={sum(self.radii)}")
        return out


def radius_divisibility(k: int, radii) -> DivisibilityReport:
    """Check that ``k`` is a multiple of every radius and of their sum.

    ``general_multiple`` additionally reports whether ``sum(r) * prod(r)``
    divides ``k``, the sufficient form that covers any choice of radii.
    """
    radii = tuple(int(r) for r in radii)
    if k < 1 or not radii or any(r < 1 for r in radii):
        raise DomainError("k and all radii must be positive, with at least one radius")
    total = sum(radii)
    return DivisibilityReport(
        k,
        radii,
        tuple(k % r == 0 for r in radii),
        k % total == 0,
        k % (total * math.prod(radii)) == 0,
    )


def shbf_gauge_check(E: ExponentMatrix, axis: str = "rows") -> list[bool]:
    """Per-line flag: shift sum (zero blocks skipped) is ``0 mod L``."""
    if axis not in ("rows", "columns"):
        raise DomainError(f"axis must be 'rows' or 'columns', got {axis!r}")
    A = E.to_array()
    if axis == "columns":
        A = A.T
    L = E.circulant_size
    return [int(np.where(line == ZERO_BLOCK, 0, line).sum()) % L == 0 for line in A]


def block_size(L: int, n_cols: int) -> int:
    """``S = L / N``; raises when the columns do not divide the circulant size."""
    if n_cols < 1 or L % n_cols:
        raise DomainError(f"circulant size {L} is not divisible by the column count {n_cols}")
    return L // n_cols


def shift_row(E: ExponentMatrix, row: int, m: int) -> ExponentMatrix:
    """Add ``m * S`` to every non-zero block of ``row`` (mod ``L``)."""
    L = E.circulant_size
    S = block_size(L, E.shape[1])
    A = E.to_array()
    if not 0 <= row < A.shape[0]:
        raise DomainError(f"row {row} out of range")
    line = A[row]
    A[row] = np.where(line == ZERO_BLOCK, ZERO_BLOCK, (line + m * S) % L)
    return ExponentMatrix(A.tolist(), L, labels=E.labels)


def row_shift_invariance(E: ExponentMatrix, row: int, m: int) -> bool:
    """Whether the gauge status of ``row`` survives adding ``m * S``."""
    before = shbf_gauge_check(E)[row]
    after = shbf_gauge_check(shift_row(E, row, m))[row]
    return before == after


# -- spherical matrices ------------------------------------------------------


@dataclass(frozen=True)
class SphericalMatrix:
    """Radius, azimuth and polar shift rows over circulants of size ``k``."""

    k: int
    radii: tuple
    phi: tuple
    theta: tuple
    gauge: tuple = field(default=(), compare=False)
    divisibility: DivisibilityReport | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("circulant size must be positive")
        rows = [tuple(int(v) for v in r) for r in (self.radii, self.phi, self.theta)]
        if len({len(r) for r in rows}) != 1 or not rows[0]:
            raise DomainError(f"row lengths differ or are empty: {[len(r) for r in rows]}")
        for r in rows:
            for s in r:
                if s < 0:
                    raise DomainError("spherical matrices carry no zero blocks")
                check_shift(s, self.k)
        for name, r in zip(("radii", "phi", "theta"), rows):
            object.__setattr__(self, name, r)

    @property
    def N(self) -> int:
        return len(self.radii)

    def to_exponent(self) -> ExponentMatrix:
        return ExponentMatrix([list(self.radii), list(self.phi), list(self.theta)], self.k)


def build_spherical(radii, phi_shifts, theta_shifts, k: int) -> SphericalMatrix:
    """Assemble the 3 x N matrix and attach gauge and divisibility reports.

    Construction never fails on a gauge violation; inspect ``.gauge``.
    Divisibility is only evaluated when every radius shift is positive.
    """
    sm = SphericalMatrix(k, tuple(radii), tuple(phi_shifts), tuple(theta_shifts))
    gauge = tuple(shbf_gauge_check(sm.to_exponent()))
    div = radius_divisibility(k, sm.radii) if all(r > 0 for r in sm.radii) else None
    return SphericalMatrix(k, sm.radii, sm.phi, sm.theta, gauge, div)


@dataclass(frozen=True)
class CollapsedMatrix:
    """Mixed-size result of :func:`collapse_radial`.

    ``radius`` holds N shifts of size-``S`` CPMs; ``phi`` and ``theta`` are the
    shift sets of one weight-N circulant of size ``k`` each.
    """

    k: int
    S: int
    radius: tuple
    phi: tuple
    theta: tuple

    def angular_met(self) -> MetExponentMatrix:
        return MetExponentMatrix([[self.phi], [self.theta]], self.k)

    def lift(self) -> np.ndarray:
        """Binary matrix: the radius row as ``S x k`` blocks side by side over
        the two ``k x k`` angular circulants."""
        top = np.zeros((self.S, self.N * self.S), dtype=np.uint8)
        rows = np.arange(self.S)
        for j, s in enumerate(self.radius):
            top[rows, j * self.S + (rows + s) % self.S] = 1
        bottom = []
        for shifts in (self.phi, self.theta):
            C = np.zeros((self.k, self.k), dtype=np.uint8)
            r = np.arange(self.k)
            for s in shifts:
                C[r, (r + s) % self.k] ^= 1
            bottom.append(C)
        return np.vstack([top] + bottom)

    @property
    def N(self) -> int:
        return len(self.radius)


def collapse_radial(sm: SphericalMatrix) -> CollapsedMatrix:
    """Fold the radius row into size ``S = k / N`` blocks (shift ``r mod S``)
    and merge each angular row into one weight-N circulant of size ``k``."""
    S = block_size(sm.k, sm.N)
    return CollapsedMatrix(sm.k, S, tuple(r % S for r in sm.radii), sm.phi, sm.theta)


# -- text I/O ----------------------------------------------------------------


def format_spherical(sm: SphericalMatrix) -> str:
    rows = [sm.radii, sm.phi, sm.theta]
    out = [f"# spherical {sm.k} {sm.N}", f"3 {sm.N} {sm.k}"]
    out += [" ".join(map(str, r)) for r in rows]
    return "\n".join(out) + "\n"


def parse_spherical(text: str) -> SphericalMatrix:
    header = next((ln for ln in text.splitlines() if ln.strip()), "")
    toks = header.split()
    if toks[:2] != ["#", "spherical"] or len(toks) != 4:
        raise FormatError("expected a '# spherical k N' header", 1)
    try:
        k, N = int(toks[2]), int(toks[3])
    except ValueError:
        raise FormatError("k and N in the header must be integers", 1) from None
    E = parse_exponent_text(text, met=False)
    if E.shape != (3, N) or E.circulant_size != k:
        raise FormatError(f"header says k={k}, N={N} but matrix is {E.shape} with L={E.circulant_size}", 1)
    A = E.to_array()
    return build_spherical(A[0].tolist(), A[1].tolist(), A[2].tolist(), k)

"""Map charge systems on irregular grids to circulant exponent matrices.

Charges become circulants and (squared) distances become circulant shifts;
circulant sizes of different interactions are brought to a common value with
least common multiples. The reverse direction reads a small QC code as a set
of particles on a flat torus.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .circulant import ZERO_BLOCK, ExponentMatrix
from .exceptions import DomainError, FormatError


def _positive_int(value, name):
    if int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class BalancedPairSet:
    """Shift pairs ``(n1, n3)`` of size-``e`` circulants with ``n1 + n3 = 0 mod e``."""

    e: int
    pairs: tuple

    def to_exponent(self) -> ExponentMatrix:
        """One row per pair; the zero circulant between the charges is dropped."""
        return ExponentMatrix([list(p) for p in self.pairs], self.e, labels=("n1", "n3"))


def map_1d_three(R1: int, R3: int) -> BalancedPairSet:
    """Balanced states of three collinear charges.

    ``R1`` and ``R3`` are the squared distances from the outer charges to the
    middle one; the circulant size is ``e = R1 + R3``. Zero shifts (the
    degenerate identity states) are excluded.
    """
    R1 = _positive_int(R1, "R1")
    R3 = _positive_int(R3, "R3")
    e = R1 + R3
    return BalancedPairSet(e, tuple((i, e - i) for i in range(1, e)))


def map_1d_four(a: int, b: int) -> ExponentMatrix:
    """Four collinear charges with squared gaps ``a``, ``b``, ``a + b``.

    The 1-3 interaction uses circulants of size ``a + b`` and the 2-4
    interaction size ``a + 2b``; both are rescaled to ``c = lcm(a+b, a+2b)``.
    Columns are ordered ``(a, b1, b2, a+b)`` and labelled accordingly.
    """
    a = _positive_int(a, "a")
    b = _positive_int(b, "b")
    c = math.lcm(a + b, a + 2 * b)
    shifts = (a * c // (a + b), b * c // (a + b), b * c // (a + 2 * b), (a + b) * c // (a + 2 * b))
    return ExponentMatrix([list(shifts)], c, labels=("a", "b1", "b2", "a+b"))


@dataclass(frozen=True)
class CellMap:
    """Two-row (x, y) circulant description of one four-particle cell."""

    L: int
    x_shifts: tuple
    y_shifts: tuple
    particles: tuple

    def to_exponent(self) -> ExponentMatrix:
        return ExponentMatrix([list(self.x_shifts), list(self.y_shifts)], self.L, labels=tuple(map(str, self.particles)))


def map_2d_cell(positions, particles=None, origin=(0, 0)) -> CellMap:
    """Map four particles given by integer ``(x, y)`` coordinates.

    Projections ``L_xi = x_i - origin_x`` (and likewise for y) must be positive
    integers. With ``L_x = sum L_xi``, ``L_y = sum L_yi`` and
    ``L = lcm(L_x, L_y)``, the shifts are ``L_xi * L / L_x`` and
    ``L_yi * L / L_y``; each row therefore sums to ``L``.
    """
    P = np.asarray(positions)
    if P.shape != (4, 2):
        raise DomainError(f"a cell needs four (x, y) positions, got shape {P.shape}")
    proj_x = [_positive_int(x - origin[0], "x projection") for x in P[:, 0]]
    proj_y = [_positive_int(y - origin[1], "y projection") for y in P[:, 1]]
    Lx, Ly = sum(proj_x), sum(proj_y)
    L = math.lcm(Lx, Ly)
    xs = tuple(v * (L // Lx) for v in proj_x)
    ys = tuple(v * (L // Ly) for v in proj_y)
    particles = tuple(particles) if particles is not None else (1, 2, 3, 4)
    return CellMap(L, xs, ys, particles)


def map_coupled_cells(cells, coordinates, origins=None) -> list[CellMap]:
    """Map a chain of cells that share particles.

    ``cells`` lists four particle ids per cell, ``coordinates`` maps an id to
    its global ``(x, y)`` (or is a list of ``(id, x, y)`` records, where a
    repeated id must repeat its coordinates). ``origins`` optionally gives
    each cell's reference corner. Shared particles contribute a column to
    every cell that contains them.
    """
    if not isinstance(coordinates, dict):
        table = {}
        for pid, x, y in coordinates:
            if pid in table and tuple(table[pid]) != (x, y):
                raise DomainError(f"particle {pid!r} has inconsistent coordinates {table[pid]} vs {(x, y)}")
            table[pid] = (x, y)
        coordinates = table
    origins = origins or [(0, 0)] * len(cells)
    if len(origins) != len(cells):
        raise DomainError("one origin per cell is required")
    out = []
    for cell, origin in zip(cells, origins):
        missing = [p for p in cell if p not in coordinates]
        if missing:
            raise DomainError(f"unknown particles {missing}")
        out.append(map_2d_cell([coordinates[p] for p in cell], particles=cell, origin=origin))
    return out


def coupled_exponent(maps: list[CellMap]) -> ExponentMatrix:
    """Stack cell maps into one exponent matrix over all distinct particles.

    Every cell contributes an x and a y row; all shifts are rescaled to the
    LCM of the cell sizes and absent particles get the zero block.
    """
    L = math.lcm(*(m.L for m in maps))
    ids = []
    for m in maps:
        ids.extend(p for p in m.particles if p not in ids)
    rows = []
    for m in maps:
        scale = L // m.L
        for shifts in (m.x_shifts, m.y_shifts):
            row = [ZERO_BLOCK] * len(ids)
            for p, s in zip(m.particles, shifts):
                row[ids.index(p)] = (s * scale) % L
            rows.append(row)
    return ExponentMatrix(rows, L, labels=tuple(map(str, ids)))


def hexagonal_rotation_map(R: float, alpha: float, q: int, nodes) -> ExponentMatrix:
    """Quantized displacement shifts of a rotated seven-node hexagonal cell.

    ``nodes`` are the seven ``(L_1jx, L_1jy)`` offsets from the rotation
    centre (node 1 first). Displacements follow the printed rule
    ``dRx = Lx - Lx cos(alpha)``, ``dRy = Ly - Ly sin(alpha)``; they are
    quantized with ``dR = floor(R / q)`` into ``floor(dR_ / dR) mod q``. The
    centre column is shift 0 in both rows. ``alpha`` is in radians.
    """
    q = _positive_int(q, "q")
    P = np.asarray(nodes, dtype=float)
    if P.shape != (7, 2):
        raise DomainError(f"expected seven (x, y) node offsets, got shape {P.shape}")
    dR = math.floor(R / q)
    if dR == 0:
        raise DomainError(f"quantization step floor(R/q) is zero for R={R}, q={q}")
    dx = P[:, 0] - P[:, 0] * math.cos(alpha)
    dy = P[:, 1] - P[:, 1] * math.sin(alpha)
    xs = [int(math.floor(v / dR)) % q for v in dx]
    ys = [int(math.floor(v / dR)) % q for v in dy]
    xs[0] = ys[0] = 0
    return ExponentMatrix([xs, ys], q, labels=tuple(f"node{j}" for j in range(1, 8)))


def barycentric(point, triangle) -> tuple[float, float, float]:
    """Area coordinates ``(L1, L2, L3)`` of ``point`` in ``triangle``.

    ``L_i`` is the signed area of the sub-triangle opposite vertex ``i``
    divided by the total area, so the coordinates sum to 1 and leave
    ``[0, 1]`` outside the triangle.
    """
    (x1, y1), (x2, y2), (x3, y3) = np.asarray(triangle, dtype=float)
    px, py = map(float, point)

    def area(ax, ay, bx, by, cx, cy):
        return 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))

    total = area(x1, y1, x2, y2, x3, y3)
    scale = max(abs(x2 - x1), abs(x3 - x1), abs(y2 - y1), abs(y3 - y1), 1e-300)
    if abs(total) <= 1e-12 * scale * scale:
        raise DomainError("degenerate triangle")
    return (
        area(px, py, x2, y2, x3, y3) / total,
        area(x1, y1, px, py, x3, y3) / total,
        area(x1, y1, x2, y2, px, py) / total,
    )


def geometry_from_exponent(E: ExponentMatrix, centered: bool = False) -> np.ndarray:
    """Place one particle per column at angles ``2*pi*shift/L`` per row axis.

    Returns an ``(n, m)`` array; zero blocks give ``nan`` on that axis. With
    ``centered`` the shifts are first lifted to ``(-L/2, L/2]``.
    """
    m, n = E.shape
    if m > 2:
        raise DomainError(f"placement is defined for one or two block rows, got {m}")
    A = E.to_array().astype(float)
    L = E.circulant_size
    if centered:
        A = np.where(A > L / 2, A - L, A)
    angles = 2 * np.pi * A / L
    angles[E.to_array() == ZERO_BLOCK] = np.nan
    return angles.T


def quantize_angles(angles, L: int) -> np.ndarray:
    """Nearest shift for each angle, reduced mod ``L``."""
    return np.mod(np.rint(np.asarray(angles) * L / (2 * np.pi)).astype(np.int64), L)


# -- charge CSV (id, q, x, y[, cell]) ----------------------------------------


@dataclass(frozen=True)
class ChargeRecord:
    id: str
    q: float
    x: float
    y: float | None = None
    cell: str | None = None


def read_charges_csv(text: str, require=("id", "q", "x")) -> list[ChargeRecord]:
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip() for f in (reader.fieldnames or [])]
    missing = [c for c in require if c not in fields]
    if missing:
        raise FormatError(f"missing columns: {', '.join(missing)}", 1)
    out = []
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v.strip() if isinstance(v, str) else v) for k, v in row.items() if k}
        try:
            out.append(
                ChargeRecord(
                    row["id"],
                    float(row["q"]),
                    float(row["x"]),
                    float(row["y"]) if row.get("y") not in (None, "") else None,
                    row.get("cell") or None,
                )
            )
        except (TypeError, ValueError):
            raise FormatError(f"bad numeric value in {row}", lineno) from None
    return out

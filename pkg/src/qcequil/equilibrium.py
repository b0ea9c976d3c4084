"""Screened Coulomb forces on a circle and on a torus, equilibrium tests, relaxation.

Units: Coulomb constant ``k = 1``. Interactions are screened: on a circle a
particle only feels its two arc neighbours; on a torus grid it feels the
eight nodes of its surrounding quadrangular multicell, through the squared
axis projections of their distances.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DomainError

DEFAULT_TOL = 1e-9

# Multicell neighbour offsets (dx, dy) for nodes 1..8 around the centre node.
MULTICELL = {
    1: (-1, -1), 2: (0, -1), 3: (1, -1), 4: (1, 0),
    5: (1, 1), 6: (0, 1), 7: (-1, 1), 8: (-1, 0),
}
# Nodes pushing the centre towards +x / -x and +y / -y.
X_PLUS, X_MINUS = (1, 8, 7), (3, 4, 5)
Y_PLUS, Y_MINUS = (1, 2, 3), (5, 6, 7)


@dataclass(frozen=True)
class Circle:
    circumference: float

    def __post_init__(self):
        if not self.circumference > 0:
            raise DomainError("circumference must be positive")

    def reduce(self, positions):
        return np.mod(np.asarray(positions, dtype=float), self.circumference)


@dataclass(frozen=True)
class Torus:
    """Flat torus with periods ``(Lx, 0)`` and ``(skew, Ly)``."""

    Lx: float
    Ly: float
    skew: float = 0.0

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0):
            raise DomainError("torus periods must be positive")

    def reduce(self, positions):
        p = np.array(positions, dtype=float)
        k = np.floor(p[..., 1] / self.Ly)
        p[..., 0] -= k * self.skew
        p[..., 1] -= k * self.Ly
        p[..., 0] = np.mod(p[..., 0], self.Lx)
        return p

    def displacement(self, a, b):
        """Minimum-image vector from ``a`` to ``b``."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        k = np.round(d[..., 1] / self.Ly)
        d[..., 0] -= k * self.skew
        d[..., 1] -= k * self.Ly
        d[..., 0] -= np.round(d[..., 0] / self.Lx) * self.Lx
        return d


@dataclass(frozen=True, eq=False)
class ChargeSystem:
    """Positive charges on a circle (arc coordinates) or a torus grid.

    On a torus, ``grid_shape = (nx, ny)`` gives the multicell topology and
    particle ``iy * nx + ix`` sits at grid node ``(ix, iy)``.
    """

    geometry: Circle | Torus
    charges: np.ndarray
    positions: np.ndarray
    grid_shape: tuple | None = None

    def __post_init__(self):
        q = np.asarray(self.charges, dtype=float).reshape(-1)
        if not (q > 0).all() or not np.isfinite(q).all():
            raise DomainError("charges must be positive and finite")
        pos = self.geometry.reduce(self.positions)
        if isinstance(self.geometry, Circle):
            if pos.shape != q.shape:
                raise DomainError("one arc coordinate per charge is required")
        else:
            if pos.shape != (q.shape[0], 2):
                raise DomainError("one (x, y) position per charge is required")
            if self.grid_shape is None:
                raise DomainError("torus systems need grid_shape=(nx, ny)")
            nx, ny = self.grid_shape
            if nx * ny != q.shape[0]:
                raise DomainError(f"grid {nx}x{ny} does not match {q.shape[0]} particles")
            if nx < 3 or ny < 3:
                raise DomainError("multicell neighbourhoods need a grid of at least 3x3")
        object.__setattr__(self, "charges", q)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.charges.shape[0]

    def with_positions(self, positions) -> "ChargeSystem":
        return replace(self, positions=positions)


@dataclass(frozen=True, eq=False)
class ForceReport:
    """Per-particle net force: tangential (circle) or ``(X1, X2)`` (torus)."""

    forces: np.ndarray

    @property
    def max_norm(self) -> float:
        return float(np.max(np.abs(self.forces))) if self.forces.size else 0.0


def uniform_circle(n: int, circumference: float = 1.0, charge: float = 1.0, offset: float = 0.0) -> ChargeSystem:
    pos = offset + circumference * np.arange(n) / n
    return ChargeSystem(Circle(circumference), np.full(n, float(charge)), pos)


def torus_grid(nx: int, ny: int, spacing: float = 1.0, shear: float = 0.0, charge: float = 1.0) -> ChargeSystem:
    """Uniform grid with lattice vectors ``(spacing, 0)`` and ``(shear, spacing)``."""
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
    ix, iy = ix.ravel(), iy.ravel()
    pos = np.stack([ix * spacing + iy * shear, iy * spacing], axis=1)
    geom = Torus(nx * spacing, ny * spacing, skew=ny * shear)
    return ChargeSystem(geom, np.full(nx * ny, float(charge)), pos, (nx, ny))


# -- circle ------------------------------------------------------------------


def _circle_neighbours(sys: ChargeSystem):
    """Arc order, gaps to the next particle counterclockwise and index maps."""
    if sys.n < 2:
        raise DomainError("at least two particles are needed")
    C = sys.geometry.circumference
    order = np.argsort(sys.positions, kind="stable")
    x = sys.positions[order]
    gaps = np.mod(np.roll(x, -1) - x, C)
    if np.any(gaps <= 0):
        raise DomainError("coincident particle positions")
    return order, gaps


def circle_net_forces(sys: ChargeSystem) -> ForceReport:
    """Tangential net force on each particle (positive = counterclockwise).

    With ``d_r`` the arc distance to the clockwise neighbour and ``d_l`` the
    distance to the counterclockwise one, the force is
    ``q_i q_r / d_r**2 - q_i q_l / d_l**2``.
    """
    order, gaps = _circle_neighbours(sys)
    q = sys.charges[order]
    q_next, q_prev = np.roll(q, -1), np.roll(q, 1)
    d_l = gaps
    d_r = np.roll(gaps, 1)
    f_sorted = q * q_prev / d_r**2 - q * q_next / d_l**2
    forces = np.empty(sys.n)
    forces[order] = f_sorted
    return ForceReport(forces)


def circle_energy(sys: ChargeSystem) -> float:
    order, gaps = _circle_neighbours(sys)
    q = sys.charges[order]
    return float(np.sum(q * np.roll(q, -1) / gaps))


# -- torus -------------------------------------------------------------------


def _multicell_index(sys: ChargeSystem):
    nx, ny = sys.grid_shape
    p = np.arange(sys.n)
    ix, iy = p % nx, p // nx
    return {k: ((iy + dy) % ny) * nx + (ix + dx) % nx for k, (dx, dy) in MULTICELL.items()}


def _projections(sys: ChargeSystem):
    nbr = _multicell_index(sys)
    pos = sys.positions
    return nbr, {k: sys.geometry.displacement(pos, pos[idx]) for k, idx in nbr.items()}


def torus_net_forces(sys: ChargeSystem) -> ForceReport:
    """``(X1, X2)`` force projections from the eight-node multicell.

    ``X1 = q0 (q1/rx1^2 + q8/rx8^2 + q7/rx7^2 - q3/rx3^2 - q4/rx4^2 - q5/rx5^2)``
    and likewise for ``X2`` with nodes ``1, 2, 3`` against ``5, 6, 7``.
    """
    if not isinstance(sys.geometry, Torus):
        raise DomainError("torus_net_forces needs a torus system")
    nbr, disp = _projections(sys)
    q = sys.charges
    F = np.zeros((sys.n, 2))
    for axis, plus, minus in ((0, X_PLUS, X_MINUS), (1, Y_PLUS, Y_MINUS)):
        for sign, group in ((1.0, plus), (-1.0, minus)):
            for k in group:
                r = np.abs(disp[k][:, axis])
                if np.any(r == 0):
                    raise DomainError(f"zero projected distance to multicell node {k} on axis {axis + 1}")
                F[:, axis] += sign * q[nbr[k]] / r**2
        F[:, axis] *= q
    return ForceReport(F)


def _torus_consistent(sys: ChargeSystem) -> bool:
    _, disp = _projections(sys)
    ok = all((disp[k][:, 0] > 0).all() for k in X_MINUS) and all((disp[k][:, 0] < 0).all() for k in X_PLUS)
    ok = ok and all((disp[k][:, 1] > 0).all() for k in Y_MINUS) and all((disp[k][:, 1] < 0).all() for k in Y_PLUS)
    return ok


def torus_energy(sys: ChargeSystem) -> float:
    """Potential whose negative gradient is the multicell projection force."""
    nbr, disp = _projections(sys)
    q = sys.charges
    e = sum(np.sum(q * q[nbr[k]] / np.abs(disp[k][:, 0])) for k in X_MINUS)
    e += sum(np.sum(q * q[nbr[k]] / np.abs(disp[k][:, 1])) for k in Y_MINUS)
    return float(e)


# -- generic -----------------------------------------------------------------


def net_forces(sys: ChargeSystem) -> ForceReport:
    return circle_net_forces(sys) if isinstance(sys.geometry, Circle) else torus_net_forces(sys)


def energy(sys: ChargeSystem) -> float:
    return circle_energy(sys) if isinstance(sys.geometry, Circle) else torus_energy(sys)


def is_equilibrium(report: ForceReport, tol: float = DEFAULT_TOL) -> bool:
    """True iff the largest force component is at most ``tol`` (inclusive)."""
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    return report.max_norm <= tol


@dataclass
class RelaxResult:
    system: ChargeSystem
    converged: bool
    iterations: int
    trajectory: list = field(default_factory=list)  # (iteration, positions, forces)

    @property
    def forces(self) -> ForceReport:
        return net_forces(self.system)


def _valid(sys: ChargeSystem, reference: ChargeSystem) -> bool:
    if isinstance(sys.geometry, Circle):
        # particles may not pass each other: same cyclic order, gaps summing to C
        order = np.argsort(reference.positions, kind="stable")
        gaps = np.mod(np.roll(sys.positions[order], -1) - sys.positions[order], sys.geometry.circumference)
        return bool((gaps > 0).all() and np.isclose(gaps.sum(), sys.geometry.circumference))
    return _torus_consistent(sys)


def relax(sys: ChargeSystem, step: float = 0.1, max_iters: int = 10_000, tol: float = DEFAULT_TOL) -> RelaxResult:
    """Fixed-step descent along the net forces, halving the step on energy increase.

    Stops when :func:`is_equilibrium` holds at ``tol`` or after ``max_iters``
    accepted or rejected steps; ``converged`` flags which.
    """
    if not step > 0:
        raise DomainError("step must be positive")
    report = net_forces(sys)
    E = energy(sys)
    trajectory = [(0, sys.positions.copy(), report.forces.copy())]
    it = 0
    while not is_equilibrium(report, tol):
        if it >= max_iters or step < 1e-300:
            return RelaxResult(sys, False, it, trajectory)
        it += 1
        trial = sys.with_positions(sys.positions + step * report.forces)
        if not _valid(trial, sys):
            step /= 2
            continue
        E_trial = energy(trial)
        if E_trial > E + 1e-12 * max(1.0, abs(E)):
            step /= 2
            continue
        sys, E = trial, E_trial
        report = net_forces(sys)
        trajectory.append((it, sys.positions.copy(), report.forces.copy()))
    return RelaxResult(sys, True, it, trajectory)


def neighbour_gaps(sys: ChargeSystem) -> np.ndarray:
    """Arc gaps between consecutive particles on a circle."""
    _, gaps = _circle_neighbours(sys)
    return gaps


def trajectory_csv(result: RelaxResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    two_d = result.system.positions.ndim == 2
    w.writerow(["iteration", "particle"] + (["x", "y", "fx", "fy"] if two_d else ["position", "force"]))
    for it, pos, F in result.trajectory:
        for p in range(pos.shape[0]):
            vals = list(pos[p]) + list(F[p]) if two_d else [pos[p], F[p]]
            w.writerow([it, p] + [repr(float(v)) for v in vals])
    return buf.getvalue()


def force_report_csv(report: ForceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    F = report.forces
    w.writerow(["particle"] + (["fx", "fy"] if F.ndim == 2 else ["force"]))
    for p in range(F.shape[0]):
        w.writerow([p] + [repr(float(v)) for v in np.atleast_1d(F[p])])
    return buf.getvalue()

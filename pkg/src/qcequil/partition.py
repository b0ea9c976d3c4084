"""Permanents, Bethe approximation and partition-function normalizers."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, FormatError, ResourceError

BRUTE_MAX_N = 9
RYSER_MAX_N = 20
BETHE_FLOOR = 1e-12
_CHUNK_BITS = 14


def as_nonneg_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise DomainError("matrix entries must be finite")
    if np.any(A < 0):
        raise DomainError("matrix entries must be non-negative")
    return A


def permanent_bruteforce(A, max_n: int = BRUTE_MAX_N) -> float:
    """Sum over all permutations of the products ``A[i, sigma(i)]``."""
    A = as_nonneg_matrix(A)
    n = A.shape[0]
    if n > max_n:
        raise ResourceError(f"brute-force permanent needs n <= {max_n}, got {n}", guard="max_n")
    rows = range(n)
    return math.fsum(math.prod(A[i, s[i]] for i in rows) for s in itertools.permutations(range(n)))


def permanent_ryser(A, max_n: int = RYSER_MAX_N) -> float:
    """Ryser inclusion-exclusion over column subsets.

    ``perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} A_ij``. Subsets are
    processed in index order in vectorized chunks and all terms are added with
    ``math.fsum``, which keeps the alternating sum accurate.
    """
    A = as_nonneg_matrix(A)
    n = A.shape[0]
    if n > max_n:
        raise ResourceError(f"Ryser permanent needs n <= {max_n}, got {n}", guard="max_n")
    if n == 0:
        return 1.0
    bits = np.arange(n, dtype=np.int64)
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)
    partial = []
    for start in range(1, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.int64)
        S = ((idx[:, None] >> bits) & 1).astype(float)
        prods = np.prod(S @ A.T, axis=1)
        sizes = S.sum(axis=1).astype(np.int64)
        signs = np.where((n - sizes) % 2 == 0, 1.0, -1.0)
        partial.extend((signs * prods).tolist())
    return math.fsum(partial)


# -- Bethe permanent ---------------------------------------------------------


@dataclass
class BetheReport:
    converged: bool
    iterations: int
    residual: float
    history: list = field(default_factory=list)
    beliefs: np.ndarray | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "residual"])
        for k, r in enumerate(self.history, start=1):
            w.writerow([k, repr(float(r))])
        return buf.getvalue()


def _leave_one_out_lse(X: np.ndarray) -> np.ndarray:
    """Row-wise ``log sum_{k != j} exp(X_ik)`` from prefix and suffix accumulations.

    No subtraction is involved, so a dominant excluded entry cannot wipe out
    the remaining terms.
    """
    pad = np.full((X.shape[0], 1), -np.inf)
    prefix = np.logaddexp.accumulate(np.hstack([pad, X[:, :-1]]), axis=1)
    tail = np.logaddexp.accumulate(X[:, ::-1], axis=1)[:, ::-1]
    suffix = np.hstack([tail[:, 1:], pad])
    return np.logaddexp(prefix, suffix)


def _beliefs(log_A, log_r, log_c):
    # sigmoid of the log ratio, written to stay finite for huge ratios
    return np.exp(-np.logaddexp(0.0, -(log_A + log_r + log_c)))


def bethe_free_energy(A, gamma) -> float:
    """``-sum g log A + sum g log g - sum (1-g) log(1-g)`` for edge beliefs ``g``."""
    A = np.asarray(A, dtype=float)
    g = np.asarray(gamma, dtype=float)
    one_minus = 1.0 - g
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(g > 0, g * np.log(A), 0.0)
        t2 = np.where(g > 0, g * np.log(g), 0.0)
        t3 = np.where(one_minus > 0, one_minus * np.log(one_minus), 0.0)
    return float(-math.fsum(t1.ravel()) + math.fsum(t2.ravel()) - math.fsum(t3.ravel()))


def bethe_permanent(A, damping: float = 0.5, tol: float = 1e-8, max_iter: int = 1000, floor: float = BETHE_FLOOR):
    """Bethe approximation of the permanent by sum-product message passing.

    The factor graph has one binary variable per entry and an exactly-one
    constraint per row and per column. Messages are kept as likelihood
    ratios: the row factor tells entry ``(i, j)`` the ratio
    ``r_ij = 1 / sum_{k != j} A_ik c_ik`` and the column factor sends
    ``c_ij = 1 / sum_{k != i} A_kj r_kj``. Updates are damped in the log
    domain (``damping=1`` is undamped) and stop when the max change of the
    edge beliefs drops below ``tol``. Beliefs rather than messages are
    monitored because the minimum can sit on a permutation vertex (always
    so for 2 x 2, where the result is ``max(ad, bc)``); there the log
    messages drift off linearly while the beliefs settle.

    Returns ``(value, report)`` with ``value = exp(-F)`` for the Bethe free
    energy ``F`` at the final beliefs ``g = b / (1 + b)``, ``b = A r c``.
    Entries below ``floor`` are raised to it.
    """
    A = as_nonneg_matrix(A)
    if not (0 < damping <= 1):
        raise DomainError(f"damping must lie in (0, 1], got {damping}")
    if tol <= 0 or max_iter < 1:
        raise DomainError("tol must be positive and max_iter at least 1")
    n = A.shape[0]
    if n == 0:
        return 1.0, BetheReport(True, 0, 0.0)
    if n == 1:
        return float(A[0, 0]), BetheReport(True, 0, 0.0, beliefs=np.ones((1, 1)))
    A = np.maximum(A, floor)
    log_A = np.log(A)
    log_r = np.zeros((n, n))
    log_c = np.zeros((n, n))
    gamma = _beliefs(log_A, log_r, log_c)
    history = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new_r = -_leave_one_out_lse(log_A + log_c)
        log_r = damping * new_r + (1 - damping) * log_r
        new_c = -_leave_one_out_lse((log_A + log_r).T).T
        log_c = damping * new_c + (1 - damping) * log_c
        # fix the gauge: scaling r up and c down leaves the beliefs unchanged
        shift = log_r.mean()
        log_r, log_c = log_r - shift, log_c + shift
        new_gamma = _beliefs(log_A, log_r, log_c)
        res = float(np.abs(new_gamma - gamma).max())
        gamma = new_gamma
        history.append(res)
        if res < tol:
            converged = True
            break
    value = math.exp(-bethe_free_energy(A, gamma))
    return value, BetheReport(converged, it, history[-1], history, gamma)


# -- normalizers -------------------------------------------------------------


def det_normalization(W) -> float:
    """``Z = 1 / |det W|``; a singular matrix raises :class:`DomainError`."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {W.shape}")
    sign, logabs = np.linalg.slogdet(W)
    if sign == 0 or not np.isfinite(logabs):
        raise DomainError("weight matrix is singular")
    return math.exp(-logabs)


def partition_from_energies(energies) -> float:
    """``sum exp(-E)`` with the minimum energy factored out.

    Energies are sorted first so the result does not depend on input order.
    """
    E = np.sort(np.asarray(energies, dtype=float).ravel())
    if E.size == 0:
        raise DomainError("need at least one energy")
    lo = E[0]
    return math.exp(-lo) * math.fsum(np.exp(lo - E))


# -- RBM marginal ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RbmParams:
    """Restricted Boltzmann machine with visible, hidden and input units.

    ``W_vh`` is visible x hidden, ``W_vx`` visible x input, ``W_hx`` hidden x
    input (zeros when omitted).
    """

    W_vh: np.ndarray
    W_vx: np.ndarray
    b_v: np.ndarray
    b_h: np.ndarray
    W_hx: np.ndarray | None = None

    def __post_init__(self):
        W_vh = np.atleast_2d(np.asarray(self.W_vh, dtype=float))
        W_vx = np.atleast_2d(np.asarray(self.W_vx, dtype=float))
        b_v = np.asarray(self.b_v, dtype=float).reshape(-1)
        b_h = np.asarray(self.b_h, dtype=float).reshape(-1)
        nv, nh = W_vh.shape
        if W_vx.shape[0] != nv or b_v.shape[0] != nv or b_h.shape[0] != nh:
            raise DomainError(
                f"inconsistent sizes: W_vh {W_vh.shape}, W_vx {W_vx.shape}, b_v {b_v.shape}, b_h {b_h.shape}"
            )
        nx = W_vx.shape[1]
        W_hx = np.zeros((nh, nx)) if self.W_hx is None else np.atleast_2d(np.asarray(self.W_hx, dtype=float))
        if W_hx.shape != (nh, nx):
            raise DomainError(f"W_hx must be {(nh, nx)}, got {W_hx.shape}")
        for name, val in (("W_vh", W_vh), ("W_vx", W_vx), ("b_v", b_v), ("b_h", b_h), ("W_hx", W_hx)):
            object.__setattr__(self, name, val)

    @property
    def n_visible(self) -> int:
        return self.W_vh.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.W_vh.shape[1]

    @property
    def n_input(self) -> int:
        return self.W_vx.shape[1]


def _bits(x, size, name):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != size:
        raise DomainError(f"{name} has length {x.shape[0]}, expected {size}")
    return x


def rbm_joint_energy(v, h, x, theta: RbmParams) -> float:
    """``-(v W_vh h + h W_hx x + v W_vx x + v b_v + h b_h)``."""
    v = _bits(v, theta.n_visible, "v")
    h = _bits(h, theta.n_hidden, "h")
    x = _bits(x, theta.n_input, "x")
    return -float(v @ theta.W_vh @ h + h @ theta.W_hx @ x + v @ theta.W_vx @ x + v @ theta.b_v + h @ theta.b_h)


def rbm_marginal_energy(v, x, theta: RbmParams) -> float:
    """Hidden units summed out analytically.

    ``sum_j log(1 + exp(v.W_vh[:, j] + W_hx[j].x + b_h[j])) + v.W_vx.x + v.b_v``,
    which equals ``log sum_h exp(-rbm_joint_energy(v, h, x))``.
    """
    v = _bits(v, theta.n_visible, "v")
    x = _bits(x, theta.n_input, "x")
    act = v @ theta.W_vh + theta.W_hx @ x + theta.b_h
    return math.fsum(np.logaddexp(0.0, act)) + float(v @ theta.W_vx @ x + v @ theta.b_v)


# -- matrix CSV --------------------------------------------------------------


def read_matrix_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, rec in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not rec or all(not t.strip() for t in rec) or rec[0].lstrip().startswith("#"):
            continue
        row = []
        for col, tok in enumerate(rec, start=1):
            try:
                row.append(float(tok))
            except ValueError:
                raise FormatError(f"not a number: {tok.strip()!r}", lineno, col) from None
        if rows and len(row) != len(rows[0]):
            raise FormatError(f"expected {len(rows[0])} values, found {len(row)}", lineno)
        rows.append(row)
    if not rows:
        raise FormatError("empty matrix", 1)
    return np.array(rows)


def write_matrix_csv(A) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(A, dtype=float):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()

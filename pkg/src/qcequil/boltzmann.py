"""Boltzmann machine and Ising energies, exact enumeration, syndrome landscapes.

The inverse temperature is fixed at 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .exceptions import DomainError, FormatError, ResourceError

MAX_UNITS = 24
_CHUNK_BITS = 16


@dataclass(frozen=True, eq=False)
class BoltzmannParams:
    """Biases ``b`` and strictly upper-triangular weights ``W``."""

    b: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).reshape(-1)
        W = np.asarray(self.W, dtype=float)
        N = b.shape[0]
        if W.shape != (N, N):
            raise DomainError(f"W must be {N}x{N}, got {W.shape}")
        if np.any(np.tril(W) != 0):
            raise DomainError("W must be strictly upper triangular (w_ij = 0 for i >= j)")
        if not (np.isfinite(b).all() and np.isfinite(W).all()):
            raise DomainError("parameters must be finite")
        b.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "W", W)

    @property
    def N(self) -> int:
        return self.b.shape[0]

    @classmethod
    def from_symmetric(cls, b, J):
        """Build from a symmetric coupling matrix by keeping its upper triangle."""
        return cls(b, np.triu(np.asarray(J, dtype=float), k=1))


def _binary_config(x, N, alphabet=(0, 1)):
    x = np.asarray(x)
    if x.shape[-1] != N:
        raise DomainError(f"configuration length {x.shape[-1]} does not match N={N}")
    if x.size and not np.isin(x, alphabet).all():
        raise DomainError(f"configuration entries must be in {alphabet}")
    return x.astype(float)


def bm_energy(theta: BoltzmannParams, x) -> float | np.ndarray:
    """``E(x) = -b.x - x.W.x``; ``x`` may be one configuration or a batch of rows."""
    X = _binary_config(x, theta.N)
    return -(X @ theta.b) - np.einsum("...i,ij,...j->...", X, theta.W, X)


def all_configurations(N: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Configurations ``start..stop-1`` in index order; bit ``i`` of the index is unit ``i``."""
    stop = (1 << N) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(N, dtype=np.int64)) & 1).astype(np.uint8)


def _check_guard(N, max_units):
    if N > max_units:
        raise ResourceError(f"exact enumeration over 2^{N} states exceeds the N <= {max_units} guard", guard="max_units")


def bm_energies(theta: BoltzmannParams, max_units: int = MAX_UNITS) -> np.ndarray:
    """Energies of all ``2^N`` configurations in index order."""
    _check_guard(theta.N, max_units)
    return bm_energy(theta, all_configurations(theta.N))


def bm_log_partition(theta: BoltzmannParams, max_units: int = MAX_UNITS) -> float:
    """``log Z`` by chunked log-sum-exp in fixed index order."""
    N = theta.N
    _check_guard(N, max_units)
    total = 1 << N
    step = 1 << min(N, _CHUNK_BITS)
    logs = []
    for start in range(0, total, step):
        e = bm_energy(theta, all_configurations(N, start, min(start + step, total)))
        m = -e.min()
        logs.append(m + math.log(math.fsum(np.exp(-e - m))))
    m = max(logs)
    return m + math.log(math.fsum(math.exp(v - m) for v in logs))


def bm_partition_exact(theta: BoltzmannParams, max_units: int = MAX_UNITS) -> float:
    """``Z = sum_x exp(-E(x))`` over all ``2^N`` binary configurations."""
    return math.exp(bm_log_partition(theta, max_units))


def bm_prob(theta: BoltzmannParams, x, max_units: int = MAX_UNITS):
    return np.exp(-bm_energy(theta, x) - bm_log_partition(theta, max_units))


def bm_marginal_prob(theta: BoltzmannParams, visible, values, max_units: int = MAX_UNITS) -> float:
    """Probability that the ``visible`` units take ``values``, summing out the rest."""
    visible = list(visible)
    values = np.asarray(values)
    hidden = [i for i in range(theta.N) if i not in set(visible)]
    _check_guard(len(hidden), max_units)
    H = all_configurations(len(hidden))
    X = np.zeros((H.shape[0], theta.N), dtype=np.uint8)
    X[:, visible] = values
    X[:, hidden] = H
    e = bm_energy(theta, X)
    m = -e.min()
    return math.exp(m + math.log(math.fsum(np.exp(-e - m))) - bm_log_partition(theta, max_units))


def load_theta(text: str) -> BoltzmannParams:
    """Parse ``N`` / biases / ``i j w`` triples (0-based, ``i < j``)."""
    lines = [(k, ln.split("#", 1)[0].split()) for k, ln in enumerate(text.splitlines(), start=1)]
    lines = [(k, t) for k, t in lines if t]
    if len(lines) < 2:
        raise FormatError("theta file needs 'N' and a bias line", len(lines) + 1)
    try:
        (N,) = [int(t) for t in lines[0][1]]
    except ValueError:
        raise FormatError("first line must be the single integer N", lines[0][0]) from None
    try:
        b = [float(t) for t in lines[1][1]]
    except ValueError:
        raise FormatError("bias line must hold floats", lines[1][0]) from None
    if len(b) != N:
        raise FormatError(f"expected {N} biases, found {len(b)}", lines[1][0])
    W = np.zeros((N, N))
    for k, toks in lines[2:]:
        if len(toks) != 3:
            raise FormatError("weight lines must be 'i j w'", k)
        try:
            i, j, w = int(toks[0]), int(toks[1]), float(toks[2])
        except ValueError:
            raise FormatError("weight lines must be 'i j w'", k) from None
        if not (0 <= i < j < N):
            raise FormatError(f"need 0 <= i < j < {N}, got i={i} j={j}", k)
        W[i, j] = w
    return BoltzmannParams(np.array(b), W)


def dump_theta(theta: BoltzmannParams) -> str:
    out = [str(theta.N), " ".join(repr(float(v)) for v in theta.b)]
    for i, j in zip(*np.nonzero(theta.W)):
        out.append(f"{i} {j} {float(theta.W[i, j])!r}")
    return "\n".join(out) + "\n"


# -- Ising -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IsingSystem:
    """Connectivity ``C`` and couplings ``J``; only pairs ``i < j`` are read."""

    C: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        J = np.asarray(self.J, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or J.shape != C.shape:
            raise DomainError("C and J must be equal-sized square matrices")
        if not np.isfinite(J[C != 0]).all():
            raise DomainError("J must be finite on the support of C")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "J", np.where(C != 0, J, 0.0))

    @property
    def N(self) -> int:
        return self.C.shape[0]


def ising_energy(sys: IsingSystem, sigma) -> float | np.ndarray:
    """``sum_{i<j} C_ij J_ij s_i s_j`` over unordered pairs."""
    s = _binary_config(sigma, sys.N, alphabet=(-1, 1))
    K = np.triu(sys.C * sys.J, k=1)
    return np.einsum("...i,ij,...j->...", s, K, s)


# -- syndrome landscape ------------------------------------------------------


def syndrome_energy(H, x) -> int | np.ndarray:
    """Number of unsatisfied checks of ``x`` (rows of a batch allowed)."""
    s = gf2.syndrome(H, x)
    return s.sum(axis=-1).astype(np.int64) if s.ndim > 1 else int(s.sum())


@dataclass
class MinimaReport:
    """Outcome of :func:`codeword_minima_check`.

    ``method`` is ``"exhaustive"`` when every codeword and neighbour was
    evaluated, ``"linear"`` when the result follows from the basis check plus
    column weights (the landscape is invariant under codeword translation).
    """

    dimension: int
    n_codewords_checked: int
    method: str
    nonzero_codeword_energy: list = field(default_factory=list)
    flat_directions: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.nonzero_codeword_energy and not self.flat_directions


def codeword_minima_check(H, max_dim: int = 16, exhaustive: bool | None = None) -> MinimaReport:
    """Check that codewords are strict local minima of the syndrome energy.

    Every codeword must have energy 0 and every single-bit flip of it energy
    greater than 0. With ``exhaustive=None`` the full enumeration runs when
    the code dimension is at most ``max_dim`` and a :class:`ResourceError` is
    raised otherwise; ``exhaustive=False`` always uses the linear certificate.
    """
    H = gf2.as_binary(H)
    n = H.shape[1]
    basis = gf2.nullspace(H)
    k = basis.shape[0]
    col_weight = H.sum(axis=0).astype(np.int64)
    flat = np.nonzero(col_weight == 0)[0].tolist()
    if exhaustive is None:
        if k > max_dim:
            raise ResourceError(f"code dimension {k} exceeds max_dim {max_dim}", guard="max_dim")
        exhaustive = True
    if not exhaustive:
        bad = [i for i, e in enumerate(syndrome_energy(H, basis)) if e] if k else []
        return MinimaReport(k, k, "linear", bad, flat)
    if k > max_dim:
        raise ResourceError(f"code dimension {k} exceeds max_dim {max_dim}", guard="max_dim")
    coeffs = all_configurations(k) if k else np.zeros((1, 0), dtype=np.uint8)
    words = gf2.matmul(coeffs, basis) if k else np.zeros((1, n), dtype=np.uint8)
    energies = syndrome_energy(H, words)
    bad = np.nonzero(energies)[0].tolist()
    flat_pairs = []
    eye = np.eye(n, dtype=np.uint8)
    for idx, c in enumerate(words):
        e = syndrome_energy(H, c ^ eye)
        for j in np.nonzero(e == 0)[0]:
            flat_pairs.append((idx, int(j)))
    return MinimaReport(k, len(words), "exhaustive", bad, flat_pairs)

"""Dense GF(2) matrices as ``uint8`` arrays, bit packing, elimination and alist I/O."""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError, FormatError


def as_binary(H) -> np.ndarray:
    """Validate and return ``H`` as a 2-D ``uint8`` array of zeros and ones."""
    A = np.asarray(H)
    if A.ndim != 2:
        raise DomainError(f"binary matrix must be 2-D, got shape {A.shape}")
    if A.size and not np.isin(A, (0, 1)).all():
        raise DomainError("binary matrix entries must be 0 or 1")
    return A.astype(np.uint8, copy=False)


def pack(H) -> np.ndarray:
    """Bit-pack each row (big-endian within a byte)."""
    return np.packbits(as_binary(H), axis=1)


def unpack(packed, cols: int) -> np.ndarray:
    return np.unpackbits(np.asarray(packed, dtype=np.uint8), axis=1, count=cols)


def matmul(A, B) -> np.ndarray:
    """Product over GF(2)."""
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64) % 2).astype(np.uint8)


def syndrome(H, x) -> np.ndarray:
    H = as_binary(H)
    x = np.asarray(x, dtype=np.int64)
    if x.shape[-1] != H.shape[1]:
        raise DomainError(f"vector length {x.shape[-1]} does not match {H.shape[1]} columns")
    return (x @ H.T.astype(np.int64) % 2).astype(np.uint8)


def row_echelon(H):
    """Reduced row echelon form over GF(2); returns ``(R, pivot_columns)``."""
    R = as_binary(H).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(R[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        R[others] ^= R[r]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(H) -> int:
    return len(row_echelon(H)[1])


def det(H) -> int:
    H = as_binary(H)
    if H.shape[0] != H.shape[1]:
        raise DomainError("determinant needs a square matrix")
    return int(rank(H) == H.shape[0])


def nullspace(H) -> np.ndarray:
    """Basis of ``{x : H x = 0}`` as the rows of a ``(k, n)`` array."""
    R, pivots = row_echelon(H)
    n = R.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, p in enumerate(pivots):
            basis[k, p] = R[r, f]
    return basis


# -- alist -------------------------------------------------------------------


def to_alist(H) -> str:
    """Render ``H`` in MacKay's alist format (1-indexed, zero padded)."""
    H = as_binary(H)
    m, n = H.shape
    col_deg = H.sum(axis=0).astype(int)
    row_deg = H.sum(axis=1).astype(int)
    max_col = int(col_deg.max()) if n else 0
    max_row = int(row_deg.max()) if m else 0
    out = [f"{n} {m}", f"{max_col} {max_row}", " ".join(map(str, col_deg)), " ".join(map(str, row_deg))]
    for j in range(n):
        idx = list(np.nonzero(H[:, j])[0] + 1) + [0] * (max_col - col_deg[j])
        out.append(" ".join(map(str, idx)) or "0")
    for i in range(m):
        idx = list(np.nonzero(H[i])[0] + 1) + [0] * (max_row - row_deg[i])
        out.append(" ".join(map(str, idx)) or "0")
    return "\n".join(out) + "\n"


def from_alist(text: str) -> np.ndarray:
    """Parse alist text; the row section, when present, is cross-checked."""
    lines = [(k, ln.split()) for k, ln in enumerate(text.splitlines(), start=1) if ln.strip()]

    def ints(k, toks):
        try:
            return [int(t) for t in toks]
        except ValueError:
            raise FormatError(f"non-integer token in {' '.join(toks)!r}", k) from None

    if len(lines) < 4:
        raise FormatError("alist needs at least four header lines", len(lines) + 1)
    n, m = ints(*lines[0])[:2]
    col_deg = ints(*lines[2])
    row_deg = ints(*lines[3])
    if len(col_deg) != n or len(row_deg) != m:
        raise FormatError("degree lists do not match the 'N M' header", lines[2][0])
    if sum(col_deg) != sum(row_deg):
        raise FormatError("column and row degree totals differ", lines[3][0])
    if len(lines) < 4 + n:
        raise FormatError(f"expected {n} column lists", lines[-1][0] + 1)
    H = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        k, toks = lines[4 + j]
        idx = [v for v in ints(k, toks) if v != 0]
        if len(idx) != col_deg[j] or any(v < 1 or v > m for v in idx):
            raise FormatError(f"column {j + 1} list inconsistent with its degree", k)
        H[np.array(idx, dtype=np.int64) - 1, j] = 1
    if len(lines) >= 4 + n + m:
        for i in range(m):
            k, toks = lines[4 + n + i]
            idx = [v for v in ints(k, toks) if v != 0]
            if len(idx) != row_deg[i] or any(v < 1 or v > n for v in idx) or not H[i, np.array(idx, dtype=np.int64) - 1].all():
                raise FormatError(f"row {i + 1} list disagrees with the column lists", k)
    return H

"""Tanner-graph analysis: girth, trapping sets, minimum distance, multigraph export."""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gf2
from .circulant import ExponentMatrix
from .exceptions import ResourceError

ACYCLIC = math.inf
DEFAULT_GIRTH_CAP = 12
DEFAULT_TS_BUDGET = 2_000_000


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite graph of a parity-check matrix.

    ``edges`` holds one ``(check, variable)`` pair per non-zero entry, in
    row-major order.
    """

    n_variables: int
    n_checks: int
    edges: np.ndarray

    def variable_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 1], minlength=self.n_variables)

    def check_degrees(self) -> np.ndarray:
        return np.bincount(self.edges[:, 0], minlength=self.n_checks)

    def adjacency(self) -> list[list[int]]:
        """Adjacency lists with variables at ``0..n-1`` and checks at ``n..n+m-1``."""
        n = self.n_variables
        adj = [[] for _ in range(n + self.n_checks)]
        for c, v in self.edges:
            adj[v].append(n + c)
            adj[n + c].append(v)
        return adj


def build_tanner(H) -> TannerGraph:
    H = gf2.as_binary(H)
    checks, variables = np.nonzero(H)
    edges = np.stack([checks, variables], axis=1).astype(np.int64)
    return TannerGraph(H.shape[1], H.shape[0], edges)


def girth_bfs(H, cap: int | None = None):
    """Shortest cycle length of the Tanner graph by BFS from every node.

    Returns ``ACYCLIC`` (``math.inf``) for a forest. With ``cap`` set, the
    search stops early and ``math.inf`` also covers girths above the cap.
    """
    adj = build_tanner(H).adjacency()
    best = math.inf if cap is None else cap + 1
    for src in range(len(adj)):
        if not adj[src]:
            continue
        dist = {src: 0}
        parent = {src: -1}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w == parent[u]:
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
    if cap is not None and best > cap:
        return ACYCLIC
    return int(best) if best != math.inf else ACYCLIC


def _base_is_forest(mask: np.ndarray) -> bool:
    m, n = mask.shape
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(*np.nonzero(mask)):
        a, b = find(i), find(m + j)
        if a == b:
            return False
        parent[a] = b
    return True


def cycle_condition_girth(E: ExponentMatrix, cap: int = DEFAULT_GIRTH_CAP):
    """Girth from the alternating shift-sum condition on the exponent matrix.

    A closed block walk ``a_1, ..., a_2l`` alternates between moving inside a
    row and inside a column, never reusing the cell it just left (also across
    the wrap-around), and closes a lifted cycle when
    ``sum((-1)**i * a_i) % L == 0``. The smallest such ``2l`` is the girth.

    Returns the girth, ``ACYCLIC`` when the base graph is a forest, or ``None``
    when no qualifying walk of length ``<= cap`` exists (girth above the cap).
    """
    A = E.to_array()
    L = E.circulant_size
    m, n = A.shape
    present = A >= 0
    if _base_is_forest(present.astype(np.uint8)):
        return ACYCLIC
    shifts = np.where(present, A, 0)
    max_half = cap // 2
    found = None
    # One DP per start cell: reach[r, c, s] = some walk from the start ends at
    # cell (r, c) with signed partial sum s (mod L).
    for r0, c0 in zip(*np.nonzero(present)):
        reach = np.zeros((m, n, L), dtype=bool)
        reach[r0, c0, (-shifts[r0, c0]) % L] = True
        limit = max_half if found is None else found // 2 - 1
        for k in range(2, 2 * limit + 1):
            sign = 1 if k % 2 == 0 else -1
            axis = 1 if k % 2 == 0 else 0  # even steps move along the row
            counts = reach.sum(axis=axis, keepdims=True, dtype=np.int64)
            others = (counts - reach) > 0
            nxt = np.zeros_like(reach)
            for r, c in zip(*np.nonzero(present)):
                nxt[r, c] = np.roll(others[r, c], sign * shifts[r, c])
            reach = nxt
            if k % 2 == 0:
                closing = reach[:, c0, 0].copy()
                closing[r0] = False
                if closing.any():
                    found = k if found is None else min(found, k)
                    break
    return found


@dataclass(frozen=True)
class TrappingSet:
    """``TS(a, b)``: ``a`` variables whose induced subgraph has ``b`` odd checks."""

    a: int
    b: int
    variables: tuple
    checks: tuple
    odd_checks: tuple

    def sort_key(self):
        return (self.a, self.b, self.variables)


def odd_degree_checks(H, variables) -> np.ndarray:
    H = gf2.as_binary(H)
    cols = np.asarray(list(variables), dtype=np.int64)
    return np.nonzero(H[:, cols].sum(axis=1) % 2)[0]


def _variable_neighbours(H: np.ndarray) -> list[set]:
    share = (H.T.astype(np.int64) @ H.astype(np.int64)) > 0
    np.fill_diagonal(share, False)
    return [set(np.nonzero(row)[0].tolist()) for row in share]


def _connected_sets_from(v, nbrs, a_max):
    """Connected variable sets whose smallest member is ``v`` (ESU enumeration)."""
    out = []

    def extend(sub, sub_nbrs, ext):
        out.append(tuple(sorted(sub)))
        if len(sub) == a_max:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_ext = set(ext)
            for u in nbrs[w]:
                if u > v and u not in sub and u not in sub_nbrs:
                    new_ext.add(u)
            extend(sub | {w}, sub_nbrs | nbrs[w], sorted(new_ext))

    extend({v}, nbrs[v] | {v}, sorted(u for u in nbrs[v] if u > v))
    return out


def find_trapping_sets(H, a_max: int, b_max: int, budget: int = DEFAULT_TS_BUDGET, n_jobs: int = 1):
    """All connected ``TS(a, b)`` with ``a <= a_max`` and ``b <= b_max``.

    The result is sorted by ``(a, b, variables)`` regardless of ``n_jobs``.
    Raises :class:`ResourceError` when ``C(n, a_max)`` exceeds ``budget``.
    """
    H = gf2.as_binary(H)
    n = H.shape[1]
    a_max = min(a_max, n)
    size = math.comb(n, a_max)
    if size > budget:
        raise ResourceError(
            f"trapping-set search over C({n}, {a_max}) = {size} subsets exceeds budget {budget}",
            guard="budget",
        )
    nbrs = _variable_neighbours(H)
    cols = H.T.astype(np.int64)

    def scan(v):
        found = []
        for sub in _connected_sets_from(v, nbrs, a_max):
            parity = cols[list(sub)].sum(axis=0)
            odd = np.nonzero(parity % 2)[0]
            if odd.size <= b_max:
                checks = np.nonzero(parity)[0]
                found.append(TrappingSet(len(sub), int(odd.size), sub, tuple(checks.tolist()), tuple(odd.tolist())))
        return found

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(scan, range(n)))
    else:
        chunks = [scan(v) for v in range(n)]
    result = [ts for chunk in chunks for ts in chunk]
    result.sort(key=TrappingSet.sort_key)
    return result


def min_distance_exhaustive(H, max_dim: int = 24):
    """Minimum Hamming weight of a non-zero codeword by full span enumeration.

    Returns ``math.inf`` for the trivial code ``{0}``.
    """
    basis = gf2.nullspace(H)
    k, n = basis.shape
    if k == 0:
        return math.inf
    if k > max_dim:
        raise ResourceError(f"nullspace dimension {k} exceeds max_dim {max_dim}", guard="max_dim")
    B = basis.astype(np.int64)
    best = n
    chunk = 1 << 16
    bits = np.arange(k, dtype=np.int64)
    for start in range(1, 1 << k, chunk):
        idx = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        coeffs = (idx[:, None] >> bits) & 1
        weights = (coeffs @ B % 2).sum(axis=1)
        best = min(best, int(weights.min()))
    return best


def export_multigraph(ME) -> str:
    """Graphviz ``graph`` text: one node per block row/column, one edge per shift.

    Parallel edges are kept; ordering is row-major, then ascending shift.
    """
    if isinstance(ME, ExponentMatrix):
        ME = ME.to_met()
    m, n = ME.shape
    lines = ["graph multigraph {"]
    lines += [f"  c{i} [shape=box];" for i in range(m)]
    lines += [f"  v{j} [shape=circle];" for j in range(n)]
    for i, row in enumerate(ME.cells):
        for j, cell in enumerate(row):
            for s in sorted(cell):
                lines.append(f'  c{i} -- v{j} [label="{s}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def trapping_sets_csv(sets) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "variables"])
    for ts in sets:
        w.writerow([ts.a, ts.b, " ".join(map(str, ts.variables))])
    return buf.getvalue()


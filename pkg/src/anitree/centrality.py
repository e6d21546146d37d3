"""Vertex centralities on the spanning tree.

Degree, eigenvector, betweenness (raw pair counts + Freeman-normalized),
closeness, and the fused total. Geodesics are hop counts on the tree, not
weighted lengths. Betweenness and closeness each have two routes: an O(k)
subtree-aggregation pass used by the pipeline, and a generic sweep
(Brandes-style accumulation, per-source BFS) kept as an independent
cross-check; the test suite holds them to exact agreement.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .dataset import Catalog
from .errors import CatalogError, ConvergenceError
from .mst import SpanningTree

DEFAULT_EIGEN_TOL = 1e-10
DEFAULT_EIGEN_MAX_ITER = 100_000


def _bfs_tree(tree: SpanningTree, root: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """BFS visit order and parent array (-1 at the root)."""
    k = tree.k
    parent = np.full(k, -1, dtype=np.int64)
    order = np.empty(k, dtype=np.int64)
    seen = np.zeros(k, dtype=bool)
    seen[root] = True
    order[0] = root
    head, tail = 0, 1
    nbr, indptr = tree._nbr, tree._indptr
    while head < tail:
        v = int(order[head])
        head += 1
        for u in nbr[indptr[v]:indptr[v + 1]].tolist():
            if not seen[u]:
                seen[u] = True
                parent[u] = v
                order[tail] = u
                tail += 1
    return order, parent


def _subtree_sizes(tree: SpanningTree, order: np.ndarray, parent: np.ndarray) -> np.ndarray:
    sz = np.ones(tree.k, dtype=np.int64)
    for v in order[:0:-1].tolist():
        sz[parent[v]] += sz[v]
    return sz


def degree_centrality(tree: SpanningTree) -> np.ndarray:
    """Fraction of the other vertices adjacent to each vertex."""
    return tree.degrees().astype(np.float64) / (tree.k - 1)


def eigenvector_centrality(
    tree: SpanningTree,
    tol: float = DEFAULT_EIGEN_TOL,
    max_iter: int = DEFAULT_EIGEN_MAX_ITER,
) -> tuple[np.ndarray, float]:
    """Dominant adjacency eigenvector (unit norm, non-negative) and eigenvalue.

    Power iteration on the identity-shifted adjacency: trees are bipartite,
    so the plain adjacency spectrum is symmetric and unshifted iteration can
    oscillate between +/- the dominant eigenvalue; the shift keeps the
    eigenvectors and makes the dominant eigenvalue strictly largest in
    magnitude. The residual is checked against the unshifted matrix.
    """
    A = tree.adjacency_matrix()
    k = tree.k
    x = np.full(k, 1.0 / math.sqrt(k))
    resid = math.inf
    for _ in range(max_iter):
        z = A @ x
        lam = float(x @ z)
        resid = float(np.linalg.norm(z - lam * x))
        if resid <= tol:
            return x, lam
        y = z + x
        x = y / np.linalg.norm(y)
    raise ConvergenceError(
        f"eigenvector power iteration stalled at residual {resid:.3e} "
        f"(tolerance {tol:g}, {max_iter} iterations)"
    )


def betweenness_centrality(tree: SpanningTree) -> tuple[np.ndarray, np.ndarray]:
    """Raw and Freeman-normalized betweenness for every vertex.

    On a tree each vertex pair has exactly one path, so the raw value of v
    is just the number of pairs (s, t) whose path passes through v: removing
    v splits the tree into components of sizes n_1..n_d, and the count is
    ((k-1)^2 - sum n_i^2) / 2. Raw values are exact integers.
    """
    k = tree.k
    order, parent = _bfs_tree(tree)
    sz = _subtree_sizes(tree, order, parent)
    nbr, indptr = tree._nbr, tree._indptr
    raw = np.empty(k, dtype=np.int64)
    others_sq = (k - 1) ** 2
    for v in range(k):
        comp_sq = 0
        for u in nbr[indptr[v]:indptr[v + 1]].tolist():
            n_comp = int(sz[u]) if parent[u] == v else k - int(sz[v])
            comp_sq += n_comp * n_comp
        raw[v] = (others_sq - comp_sq) // 2
    return raw, _freeman_normalize(raw, k)


def _freeman_normalize(raw: np.ndarray, k: int) -> np.ndarray:
    # Unordered-pair convention: a star center mediates all (k-1)(k-2)/2
    # pairs and normalizes to exactly 1. No mediated pairs exist at k=2.
    if k == 2:
        return np.zeros(k)
    return 2.0 * raw / (k * k - 3 * k + 2)


def betweenness_brandes(tree: SpanningTree) -> tuple[np.ndarray, np.ndarray]:
    """Generic shortest-path betweenness (Brandes accumulation).

    Counts fractional path shares, so it works on any graph; on trees it
    must reproduce betweenness_centrality exactly. Kept independent as the
    cross-check route.
    """
    k = tree.k
    nbr, indptr = tree._nbr, tree._indptr
    cb = np.zeros(k)
    for s in range(k):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(k)]
        sigma = np.zeros(k)
        sigma[s] = 1.0
        dist = np.full(k, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for u in nbr[indptr[v]:indptr[v + 1]].tolist():
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
                if dist[u] == dist[v] + 1:
                    sigma[u] += sigma[v]
                    preds[u].append(v)
        delta = np.zeros(k)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    raw = cb / 2.0  # ordered sweep counted each unordered pair twice
    return raw, _freeman_normalize(raw, k)


def closeness_centrality(tree: SpanningTree) -> np.ndarray:
    """(k-1) over the summed hop distance to all other vertices."""
    k = tree.k
    return (k - 1) / _farness_subtree(tree).astype(np.float64)


def _farness_subtree(tree: SpanningTree) -> np.ndarray:
    # Two-pass reroot: farness(root) from depths, then each child shifts its
    # parent's total by (k - sz[child]) - sz[child].
    k = tree.k
    order, parent = _bfs_tree(tree)
    sz = _subtree_sizes(tree, order, parent)
    depth = np.zeros(k, dtype=np.int64)
    for v in order[1:].tolist():
        depth[v] = depth[parent[v]] + 1
    farness = np.zeros(k, dtype=np.int64)
    farness[order[0]] = int(depth.sum())
    for v in order[1:].tolist():
        farness[v] = farness[parent[v]] + k - 2 * int(sz[v])
    return farness


def closeness_bfs(tree: SpanningTree) -> np.ndarray:
    """Per-source BFS route for closeness; the baseline the fast pass must match."""
    k = tree.k
    nbr, indptr = tree._nbr, tree._indptr
    farness = np.zeros(k, dtype=np.int64)
    for s in range(k):
        dist = np.full(k, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        total = 0
        while queue:
            v = queue.popleft()
            total += int(dist[v])
            for u in nbr[indptr[v]:indptr[v + 1]].tolist():
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        farness[s] = total
    return (k - 1) / farness.astype(np.float64)


def total_centrality(degree, eigenvector, betweenness, closeness):
    """Euclidean length of the four per-vertex centrality components."""
    return np.sqrt(
        degree * degree
        + eigenvector * eigenvector
        + betweenness * betweenness
        + closeness * closeness
    )


@dataclass(frozen=True)
class CentralityReport:
    """Per-vertex centralities on one tree plus the dominant eigenvalue."""

    degree: np.ndarray
    eigenvector: np.ndarray
    eigenvalue: float
    betweenness_raw: np.ndarray
    betweenness: np.ndarray
    closeness: np.ndarray
    total: np.ndarray

    @property
    def k(self) -> int:
        return len(self.degree)

    def ranking(self) -> np.ndarray:
        """Vertex indices by descending total, ties by index."""
        return np.lexsort((np.arange(self.k), -self.total))


def compute_report(
    tree: SpanningTree,
    eigen_tol: float = DEFAULT_EIGEN_TOL,
    eigen_max_iter: int = DEFAULT_EIGEN_MAX_ITER,
) -> CentralityReport:
    """All five measures for one tree."""
    degree = degree_centrality(tree)
    eigen, lam = eigenvector_centrality(tree, tol=eigen_tol, max_iter=eigen_max_iter)
    bet_raw, bet = betweenness_centrality(tree)
    close = closeness_centrality(tree)
    total = total_centrality(degree, eigen, bet, close)
    return CentralityReport(
        degree=degree,
        eigenvector=eigen,
        eigenvalue=lam,
        betweenness_raw=bet_raw,
        betweenness=bet,
        closeness=close,
        total=total,
    )


# --- report table -----------------------------------------------------------

REPORT_COLUMNS = (
    "id", "title", "degree", "eigenvector", "betweenness_raw",
    "betweenness", "closeness", "total",
)


def _clean(text: str) -> str:
    return text.replace("\t", " ").replace("\n", " ")


def write_report(
    dest: str | Path | IO[str],
    report: CentralityReport,
    catalog: Catalog,
    order: str = "total",
) -> None:
    """Write the per-vertex table as TSV.

    order="total" sorts descending by total centrality (ties by vertex
    index); order="index" keeps vertex order for distribution plots. Floats
    are written with full round-trip precision.
    """
    if catalog.size != report.k:
        raise ValueError("catalog and report sizes differ")
    if order == "total":
        indices = report.ranking()
    elif order == "index":
        indices = np.arange(report.k)
    else:
        raise ValueError(f"unknown report order {order!r}")

    def emit(fh: IO[str]) -> None:
        fh.write("\t".join(REPORT_COLUMNS) + "\n")
        for v in indices.tolist():
            rec = catalog[v]
            fh.write(
                "\t".join(
                    (
                        _clean(rec.id),
                        _clean(rec.title),
                        repr(float(report.degree[v])),
                        repr(float(report.eigenvector[v])),
                        str(int(report.betweenness_raw[v])),
                        repr(float(report.betweenness[v])),
                        repr(float(report.closeness[v])),
                        repr(float(report.total[v])),
                    )
                )
                + "\n"
            )

    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)
    else:
        emit(dest)


def read_report(path: str | Path) -> dict:
    """Parse a report table back into columns (ids, titles, float arrays)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != REPORT_COLUMNS:
            raise CatalogError(f"{path}: not a centrality report")
        ids: list[str] = []
        titles: list[str] = []
        numeric: list[list[float]] = [[] for _ in REPORT_COLUMNS[2:]]
        for line_no, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(REPORT_COLUMNS):
                raise CatalogError(f"{path}: malformed row at line {line_no}")
            ids.append(parts[0])
            titles.append(parts[1])
            for col, text in zip(numeric, parts[2:]):
                col.append(float(text))
    out = {"id": ids, "title": titles}
    for name, col in zip(REPORT_COLUMNS[2:], numeric):
        out[name] = np.array(col)
    return out

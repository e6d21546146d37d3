"""Minimum spanning tree construction over the pairwise distance table.

Kruskal's algorithm with a union-find forest. Edges are ordered by
(weight, u, v); the lexicographic tail makes tie-breaks, and therefore the
chosen edge set, independent of input order. Two entry points: the generic
``kruskal`` over explicit edges, and ``kruskal_pairs`` which consumes a
fused-distance column straight from the similarity pipeline.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from ._backend import get_backend
from .errors import CatalogError, NotConnectedError
from .similarity import pair_count, pair_index_array


class DisjointSet:
    """Union-find forest with path compression and union by rank."""

    def __init__(self, vertices: Iterable[Hashable] = ()):
        self._parent: dict = {}
        self._rank: dict = {}
        self.n_components = 0
        for v in vertices:
            self.make_set(v)

    def make_set(self, v: Hashable) -> None:
        if v not in self._parent:
            self._parent[v] = v
            self._rank[v] = 0
            self.n_components += 1

    def find_set(self, v: Hashable) -> Hashable:
        parent = self._parent
        if v not in parent:
            raise KeyError(f"vertex {v!r} was never registered with make_set")
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def union(self, u: Hashable, v: Hashable) -> bool:
        """Merge the sets containing u and v; False if already together."""
        ru, rv = self.find_set(u), self.find_set(v)
        if ru == rv:
            return False
        if self._rank[ru] < self._rank[rv]:
            ru, rv = rv, ru
        self._parent[rv] = ru
        if self._rank[ru] == self._rank[rv]:
            self._rank[ru] += 1
        self.n_components -= 1
        return True

    def __contains__(self, v: Hashable) -> bool:
        return v in self._parent

    def __len__(self) -> int:
        return len(self._parent)


@dataclass(frozen=True)
class WeightedEdge:
    """Undirected edge with endpoints stored in ascending order."""

    u: int
    v: int
    w: float

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop at vertex {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", float(self.w))
        if not math.isfinite(self.w):
            raise ValueError(f"edge ({self.u}, {self.v}) has non-finite weight")


class SpanningTree:
    """Immutable spanning tree: k-1 edges in canonical (u, v) order plus a
    sorted CSR adjacency view for traversals."""

    def __init__(self, k: int, us, vs, ws):
        us = np.asarray(us, dtype=np.int32)
        vs = np.asarray(vs, dtype=np.int32)
        ws = np.asarray(ws, dtype=np.float64)
        if k < 2:
            raise ValueError("a spanning tree needs at least 2 vertices")
        if not (len(us) == len(vs) == len(ws) == k - 1):
            raise ValueError(f"expected {k - 1} edges, got {len(us)}")
        if us.min(initial=0) < 0 or vs.max(initial=0) >= k:
            raise ValueError("edge endpoint out of range")
        if np.any(us >= vs):
            raise ValueError("edges must satisfy u < v")
        if not np.all(np.isfinite(ws)):
            raise ValueError("edge weights must be finite")

        order = np.lexsort((vs, us))
        self.k = int(k)
        self._us = np.ascontiguousarray(us[order])
        self._vs = np.ascontiguousarray(vs[order])
        self._ws = np.ascontiguousarray(ws[order])

        ds = DisjointSet(range(k))
        for u, v in zip(self._us.tolist(), self._vs.tolist()):
            if not ds.union(u, v):
                raise ValueError(f"edge ({u}, {v}) closes a cycle; not a tree")
        self.total_weight = math.fsum(self._ws.tolist())

        src = np.concatenate([self._us, self._vs])
        dst = np.concatenate([self._vs, self._us])
        wgt = np.concatenate([self._ws, self._ws])
        adj_order = np.lexsort((dst, src))
        self._nbr = np.ascontiguousarray(dst[adj_order])
        self._nbr_w = np.ascontiguousarray(wgt[adj_order])
        counts = np.bincount(src, minlength=k)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    @classmethod
    def from_edges(cls, k: int, edges: Iterable[WeightedEdge | tuple]) -> "SpanningTree":
        norm = [e if isinstance(e, WeightedEdge) else WeightedEdge(*e) for e in edges]
        return cls(
            k,
            [e.u for e in norm],
            [e.v for e in norm],
            [e.w for e in norm],
        )

    @property
    def n_edges(self) -> int:
        return self.k - 1

    def edges(self) -> Iterator[WeightedEdge]:
        for u, v, w in zip(self._us.tolist(), self._vs.tolist(), self._ws.tolist()):
            yield WeightedEdge(u, v, w)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._us, self._vs, self._ws

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Adjacent vertices (ascending) and the matching edge weights."""
        lo, hi = self._indptr[v], self._indptr[v + 1]
        return self._nbr[lo:hi], self._nbr_w[lo:hi]

    def adjacency_matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (np.ones(len(self._nbr)), self._nbr, self._indptr), shape=(self.k, self.k)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpanningTree):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self._us, other._us)
            and np.array_equal(self._vs, other._vs)
            and np.array_equal(self._ws, other._ws)
        )

    # --- persistence: magic "ATMT", version byte, k, total weight, then
    # --- k-1 records of (u u32, v u32, w f8), little-endian, canonical order.

    _HEADER = struct.Struct("<4sB3xId")
    _RECORD = np.dtype([("u", "<u4"), ("v", "<u4"), ("w", "<f8")])
    MAGIC = b"ATMT"
    VERSION = 1

    def save(self, path: str | Path) -> None:
        records = np.empty(self.n_edges, dtype=self._RECORD)
        records["u"] = self._us
        records["v"] = self._vs
        records["w"] = self._ws
        with open(path, "wb") as fh:
            fh.write(self._HEADER.pack(self.MAGIC, self.VERSION, self.k, self.total_weight))
            records.tofile(fh)

    @classmethod
    def load(cls, path: str | Path) -> "SpanningTree":
        with open(path, "rb") as fh:
            header = fh.read(cls._HEADER.size)
            if len(header) < cls._HEADER.size:
                raise CatalogError(f"{path}: truncated tree file header")
            magic, version, k, total = cls._HEADER.unpack(header)
            if magic != cls.MAGIC:
                raise CatalogError(f"{path}: not a spanning tree file")
            if version != cls.VERSION:
                raise CatalogError(f"{path}: unsupported tree file version {version}")
            records = np.fromfile(fh, dtype=cls._RECORD)
        if len(records) != k - 1:
            raise CatalogError(
                f"{path}: expected {k - 1} edges for k={k}, found {len(records)}"
            )
        try:
            tree = cls(int(k), records["u"], records["v"], records["w"])
        except ValueError as exc:
            raise CatalogError(f"{path}: invalid tree: {exc}") from None
        if abs(tree.total_weight - total) > 1e-9:
            raise CatalogError(f"{path}: stored total weight does not match edges")
        return tree


def kruskal(k: int, edges: Iterable[WeightedEdge | tuple]) -> SpanningTree:
    """Minimum spanning tree over an explicit edge stream.

    Raises NotConnectedError (naming the component count) if the stream does
    not connect all k vertices.
    """
    if k < 2:
        raise ValueError("a spanning tree needs at least 2 vertices")
    pool = [e if isinstance(e, WeightedEdge) else WeightedEdge(*e) for e in edges]
    for e in pool:
        if e.v >= k:
            raise ValueError(f"edge ({e.u}, {e.v}) endpoint out of range for k={k}")
    pool.sort(key=lambda e: (e.w, e.u, e.v))

    ds = DisjointSet(range(k))
    chosen: list[WeightedEdge] = []
    for e in pool:
        if ds.union(e.u, e.v):
            chosen.append(e)
            if len(chosen) == k - 1:
                break
    if len(chosen) < k - 1:
        raise NotConnectedError(
            f"graph not connected: {ds.n_components} components"
        )
    return SpanningTree.from_edges(k, chosen)


def kruskal_pairs(
    k: int, delta: np.ndarray, backend: str | None = None
) -> SpanningTree:
    """Minimum spanning tree of the complete graph given the fused-distance
    column in pair-index order (the fast path for full catalogs)."""
    impl = get_backend(backend)
    m = pair_count(k)
    if len(delta) != m:
        raise ValueError(f"expected {m} pair distances for k={k}, got {len(delta)}")
    # Stable sort by weight == (w, u, v) order, because pair-index order is
    # already lexicographic in (u, v).
    order = np.argsort(delta, kind="stable").astype(np.int64, copy=False)
    us = np.zeros(k - 1, dtype=np.int32)
    vs = np.zeros(k - 1, dtype=np.int32)
    parent = np.arange(k, dtype=np.int64)
    rank = np.zeros(k, dtype=np.int8)
    accepted = impl.kruskal_scan(order, k, us, vs, parent, rank)
    if accepted < k - 1:
        raise NotConnectedError(
            f"graph not connected: {k - accepted} components"
        )
    ws = np.asarray(delta, dtype=np.float64)[pair_index_array(us, vs, k)]
    return SpanningTree(k, us, vs, ws)

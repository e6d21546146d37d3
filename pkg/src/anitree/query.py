"""Recommendation queries on the spanning tree: adjacent items, k-nearest
by hop count, and the unique path between two items. Distances here are hop
counts; per-edge fused distances are reported alongside so callers can
re-rank immediate neighbors."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .dataset import Catalog
from .mst import SpanningTree


@dataclass(frozen=True)
class PathResult:
    """The unique tree path between two items."""

    endpoints: tuple[str, str]
    hops: int
    via: tuple[str, ...]

    def __post_init__(self):
        a, b = self.endpoints
        if a == b:
            if self.hops != 0 or self.via:
                raise ValueError("identical endpoints must yield an empty path")
        elif self.hops != len(self.via) + 1:
            raise ValueError("hop count inconsistent with intermediate vertices")


def neighbors(tree: SpanningTree, catalog: Catalog, item_id: str) -> list[tuple[str, float]]:
    """Tree-adjacent items with their edge distances, most similar first."""
    idx = catalog.index_of(item_id)
    nbrs, weights = tree.neighbors(idx)
    out = [(catalog[int(v)].id, float(w)) for v, w in zip(nbrs, weights)]
    out.sort(key=lambda pair: (pair[1], pair[0]))
    return out


def path(tree: SpanningTree, catalog: Catalog, from_id: str, to_id: str) -> PathResult:
    """The unique path between two items, as hop count plus intermediate ids."""
    a = catalog.index_of(from_id)
    b = catalog.index_of(to_id)
    if a == b:
        return PathResult((from_id, to_id), 0, ())
    parent = np.full(tree.k, -1, dtype=np.int64)
    parent[a] = a
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            break
        for u in tree.neighbors(v)[0].tolist():
            if parent[u] < 0:
                parent[u] = v
                queue.append(u)
    chain = [b]
    while chain[-1] != a:
        chain.append(int(parent[chain[-1]]))
    chain.reverse()
    via = tuple(catalog[v].id for v in chain[1:-1])
    return PathResult((from_id, to_id), len(chain) - 1, via)


def hop_distances(tree: SpanningTree, source: int) -> np.ndarray:
    """Hop count from one vertex to every vertex (BFS)."""
    dist = np.full(tree.k, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in tree.neighbors(v)[0].tolist():
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def k_nearest(tree: SpanningTree, catalog: Catalog, item_id: str, k: int) -> list[tuple[str, int]]:
    """The k closest other items by (hop count, id); fewer only when the
    tree runs out of vertices."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    idx = catalog.index_of(item_id)
    dist = hop_distances(tree, idx)
    ranked = sorted(
        (int(dist[v]), catalog[v].id) for v in range(tree.k) if v != idx
    )
    return [(item, hops) for hops, item in ranked[:k]]

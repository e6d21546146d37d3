"""Pure NumPy/SciPy fallback for the compiled kernels.

Same call surface and bit-identical output as ``_kernels``: intersection
counts are exact integers, and the chi-squared accumulation walks categories
in the same ascending order, one IEEE add per category.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

BACKEND_NAME = "pure"
IS_COMPILED = False

_CHUNK = 1 << 16


def _row_offset(i: int, k: int) -> int:
    return i * (k - 1) - i * (i - 1) // 2


def _intersections(ids: np.ndarray, indptr: np.ndarray, k: int, out: np.ndarray) -> None:
    # Sparse membership matrix; the Gram matrix holds all pairwise
    # intersection sizes at once.
    out[:] = 0
    if len(ids) == 0:
        return
    n_vocab = int(ids.max()) + 1
    member = sp.csr_matrix(
        (np.ones(len(ids), dtype=np.int32), ids, indptr), shape=(k, n_vocab)
    )
    gram = sp.triu(member @ member.T, k=1).tocoo()
    i = gram.row.astype(np.int64)
    j = gram.col.astype(np.int64)
    p = i * (k - 1) - i * (i - 1) // 2 + (j - i - 1)
    out[p] = gram.data


def _chi2_rows(xi: np.ndarray, rest: np.ndarray, out: np.ndarray) -> None:
    # Ascending category order, one add per category, matching the compiled
    # scalar loop bit for bit. 0/0 bins contribute nothing.
    m, n_cat = rest.shape
    acc = np.zeros(m)
    term = np.empty(m)
    for n in range(n_cat):
        s = xi[n] + rest[:, n]
        d = xi[n] - rest[:, n]
        term[:] = 0.0
        np.divide(d * d, s, out=term, where=s > 0.0)
        acc += term
    out[:] = acc


def pair_measures(crew_ids, crew_indptr, hist, topic_ids, topic_indptr,
                  crew_out, score_out, topic_out, num_threads=1):
    """Fill raw measures for all pairs in pair-index order; see _kernels."""
    k = hist.shape[0]
    _intersections(crew_ids, crew_indptr, k, crew_out)
    _intersections(topic_ids, topic_indptr, k, topic_out)
    pos = 0
    for i in range(k - 1):
        m = k - 1 - i
        _chi2_rows(hist[i], hist[i + 1:], score_out[pos:pos + m])
        pos += m


def kruskal_scan(order, k, us, vs, parent, rank):
    """Union-find scan over pair indices in sorted-weight order."""
    k = int(k)
    target = k - 1
    par = list(range(k))
    rk = [0] * k
    n_acc = 0
    b = 2 * k - 1
    for start in range(0, len(order), _CHUNK):
        for p in order[start:start + _CHUNK].tolist():
            i = int((b - (b * b - 8 * p) ** 0.5) * 0.5)
            if i < 0:
                i = 0
            while _row_offset(i + 1, k) <= p:
                i += 1
            while _row_offset(i, k) > p:
                i -= 1
            j = p - _row_offset(i, k) + i + 1
            ri = i
            while par[ri] != ri:
                par[ri] = par[par[ri]]
                ri = par[ri]
            rj = j
            while par[rj] != rj:
                par[rj] = par[par[rj]]
                rj = par[rj]
            if ri == rj:
                continue
            if rk[ri] < rk[rj]:
                ri, rj = rj, ri
            par[rj] = ri
            if rk[ri] == rk[rj]:
                rk[ri] += 1
            us[n_acc] = i
            vs[n_acc] = j
            n_acc += 1
            if n_acc == target:
                return n_acc
    return n_acc

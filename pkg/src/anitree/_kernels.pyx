"""Compiled hot kernels: the O(k^2) pairwise measure sweep and the Kruskal
edge scan. The pure fallback in ``_kernels_py`` exposes the same surface and
must produce bit-identical outputs; keep the arithmetic order in sync."""

from cython.parallel cimport prange

from libc.math cimport sqrt

BACKEND_NAME = "compiled"
IS_COMPILED = True


cdef inline long long _row_offset(long long i, long long k) nogil:
    # Number of (u, v) pairs, u < v, that precede row i in pair-index order.
    return i * (k - 1) - i * (i - 1) // 2


cdef inline long long _row_of(long long p, long long k) nogil:
    # Invert _row_offset: largest i with _row_offset(i) <= p. The float
    # estimate is within one row for any k that fits pair counts in double.
    cdef double b = <double > (2 * k - 1)
    cdef long long i = <long long > ((b - sqrt(b * b - 8.0 * <double > p)) * 0.5)
    if i < 0:
        i = 0
    while _row_offset(i + 1, k) <= p:
        i += 1
    while _row_offset(i, k) > p:
        i -= 1
    return i


cdef inline int _intersect_size(const int * ids,
                                long long a, long long a_end,
                                long long b, long long b_end) nogil:
    # ids holds per-record sorted runs; classic sorted-merge count.
    cdef int n = 0
    while a < a_end and b < b_end:
        if ids[a] < ids[b]:
            a += 1
        elif ids[a] > ids[b]:
            b += 1
        else:
            n += 1
            a += 1
            b += 1
    return n


cdef inline double _chi2(const double * x, const double * y,
                         Py_ssize_t n_cat) nogil:
    # Chi-squared histogram distance, categories accumulated in ascending
    # order; 0/0 bins contribute nothing.
    cdef double acc = 0.0
    cdef double s, d
    cdef Py_ssize_t n
    for n in range(n_cat):
        s = x[n] + y[n]
        if s > 0.0:
            d = x[n] - y[n]
            acc += d * d / s
    return acc


def pair_measures(const int[::1] crew_ids not None,
                  const long long[::1] crew_indptr not None,
                  const double[:, ::1] hist not None,
                  const int[::1] topic_ids not None,
                  const long long[::1] topic_indptr not None,
                  int[::1] crew_out not None,
                  double[::1] score_out not None,
                  int[::1] topic_out not None,
                  int num_threads):
    """Fill the three raw measure arrays for all k(k-1)/2 pairs in
    pair-index order (i ascending, then j). Crew/topic outputs are the
    integer intersection sizes; the log transform happens in the caller so
    that both backends share one rounding path."""
    cdef long long k = hist.shape[0]
    cdef Py_ssize_t n_cat = hist.shape[1]
    cdef const int * cids = NULL
    cdef const int * tids = NULL
    if crew_ids.shape[0] > 0:
        cids = &crew_ids[0]
    if topic_ids.shape[0] > 0:
        tids = &topic_ids[0]
    if num_threads < 1:
        num_threads = 1

    cdef long long i, j, p, base
    with nogil:
        for i in prange(k - 1, schedule='guided', num_threads=num_threads):
            base = _row_offset(i, k)
            for j in range(i + 1, k):
                p = base + (j - i - 1)
                crew_out[p] = _intersect_size(
                    cids, crew_indptr[i], crew_indptr[i + 1],
                    crew_indptr[j], crew_indptr[j + 1])
                score_out[p] = _chi2(&hist[i, 0], &hist[j, 0], n_cat)
                topic_out[p] = _intersect_size(
                    tids, topic_indptr[i], topic_indptr[i + 1],
                    topic_indptr[j], topic_indptr[j + 1])


cdef inline long long _find(long long[::1] parent, long long x) nogil:
    # Path halving.
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def kruskal_scan(const long long[::1] order not None,
                 long long k,
                 int[::1] us not None,
                 int[::1] vs not None,
                 long long[::1] parent not None,
                 signed char[::1] rank not None):
    """Walk pair indices in sorted-weight order, accepting edges that join
    two components; stops once k-1 edges are in. ``parent`` must come in as
    arange(k) and ``rank`` as zeros. Returns the number of accepted edges
    (< k-1 means the scanned graph was disconnected)."""
    cdef long long n_pairs = order.shape[0]
    cdef long long target = k - 1
    cdef long long n_acc = 0
    cdef long long t, p, i, j, ri, rj
    with nogil:
        for t in range(n_pairs):
            p = order[t]
            i = _row_of(p, k)
            j = p - _row_offset(i, k) + i + 1
            ri = _find(parent, i)
            rj = _find(parent, j)
            if ri != rj:
                if rank[ri] < rank[rj]:
                    ri, rj = rj, ri
                parent[rj] = ri
                if rank[ri] == rank[rj]:
                    rank[ri] += 1
                us[n_acc] = <int > i
                vs[n_acc] = <int > j
                n_acc += 1
                if n_acc == target:
                    break
    return n_acc

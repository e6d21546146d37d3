"""Pairwise similarity measures, normalization, and fused distances.

Three raw measures are computed for every unordered record pair (i, j),
i < j, enumerated in pair-index order (i ascending, then j):

* crew:  ln(1 + |shared crew|) - log-compressed overlap count
* score: chi-squared distance between the two vote histograms
* topic: |shared genre/theme terms|

Each measure is then min-max scaled over all pairs, the similarity-flavored
crew and topic measures are flipped to distances (1 - scaled), and the three
aligned components fuse into the Euclidean length delta, the edge weight of
the similarity graph. All arithmetic runs in float64 with a fixed operation
order, so results are reproducible bit for bit across runs and backends.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._backend import get_backend
from .dataset import Catalog
from .errors import CatalogError, DimensionError, EmptyHistogramError

DELTA_MAX = math.sqrt(3.0)

MEASURES = ("crew", "score", "topic")


# --- pair-index bookkeeping -------------------------------------------------

def pair_count(k: int) -> int:
    """Number of unordered pairs over k records."""
    return k * (k - 1) // 2


def row_offset(i: int, k: int) -> int:
    """Pair index of the first pair in row i (pairs (i, i+1..k-1))."""
    return i * (k - 1) - i * (i - 1) // 2


def pair_index(i: int, j: int, k: int) -> int:
    """Dense index of unordered pair (i, j); order of i, j does not matter."""
    if i == j:
        raise ValueError("self-pairs have no index")
    if i > j:
        i, j = j, i
    return row_offset(i, k) + (j - i - 1)


def pair_members(p: int, k: int) -> tuple[int, int]:
    """Invert pair_index: the (i, j) with i < j at dense index p."""
    b = 2 * k - 1
    i = int((b - math.sqrt(b * b - 8 * p)) * 0.5)
    i = max(i, 0)
    while row_offset(i + 1, k) <= p:
        i += 1
    while row_offset(i, k) > p:
        i -= 1
    return i, p - row_offset(i, k) + i + 1


def _row_offsets(k: int) -> np.ndarray:
    i = np.arange(k, dtype=np.int64)
    return i * (k - 1) - i * (i - 1) // 2


def pair_index_array(us: np.ndarray, vs: np.ndarray, k: int) -> np.ndarray:
    """Vectorized pair_index for arrays with us < vs elementwise."""
    i = us.astype(np.int64)
    j = vs.astype(np.int64)
    return i * (k - 1) - i * (i - 1) // 2 + (j - i - 1)


def pair_members_array(ps: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pair_members."""
    offsets = _row_offsets(k)
    i = np.searchsorted(offsets, ps, side="right") - 1
    j = ps - offsets[i] + i + 1
    return i, j


# --- domain types -----------------------------------------------------------

@dataclass(frozen=True)
class ScoreHistogram:
    """Per-record vote distribution over the score categories."""

    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if any(p < 0.0 for p in self.probs):
            raise ValueError("histogram entries must be non-negative")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError("histogram entries must sum to 1")

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class NormalizationStats:
    """Global per-measure min/max over all unordered pairs (self-pairs excluded)."""

    crew_min: float
    crew_max: float
    score_min: float
    score_max: float
    topic_min: float
    topic_max: float

    def __post_init__(self):
        for measure in MEASURES:
            lo, hi = self.bounds(measure)
            if lo > hi:
                raise ValueError(f"{measure}: min {lo} exceeds max {hi}")

    def bounds(self, measure: str) -> tuple[float, float]:
        return (
            getattr(self, f"{measure}_min"),
            getattr(self, f"{measure}_max"),
        )


@dataclass(frozen=True)
class SimilarityVector:
    """All measures for one pair: raw, min-max scaled/aligned, and fused."""

    pair: tuple[int, int]
    crew_raw: float
    score_raw: float
    topic_raw: int
    crew_norm: float   # aligned: 1 - scaled crew similarity
    score_norm: float
    topic_norm: float  # aligned: 1 - scaled topic similarity
    delta: float

    def __post_init__(self):
        i, j = self.pair
        if not i < j:
            raise ValueError("pair must satisfy i < j")
        for name in ("crew_norm", "score_norm", "topic_norm"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} out of [0, 1]: {val}")
        norm = math.sqrt(
            self.crew_norm * self.crew_norm
            + self.score_norm * self.score_norm
            + self.topic_norm * self.topic_norm
        )
        if abs(norm - self.delta) > 1e-12:
            raise ValueError("delta inconsistent with its components")


# --- scalar measures --------------------------------------------------------

def crew_similarity(a: Iterable[str], b: Iterable[str]) -> float:
    """Log-compressed shared-crew count: ln(1 + |a & b|)."""
    return math.log1p(len(frozenset(a) & frozenset(b)))


def score_histogram(votes: Sequence[int], item_id: str | None = None) -> ScoreHistogram:
    """Normalize per-category vote counts into a probability histogram."""
    total = sum(votes)
    if total <= 0:
        where = f"record {item_id!r}" if item_id is not None else "record"
        raise EmptyHistogramError(f"{where}: all vote counts are zero, no histogram")
    return ScoreHistogram(tuple(c / total for c in votes))


def score_similarity(
    x: ScoreHistogram | Sequence[float], y: ScoreHistogram | Sequence[float]
) -> float:
    """Chi-squared distance between two histograms (0 iff identical)."""
    xp = x.probs if isinstance(x, ScoreHistogram) else tuple(x)
    yp = y.probs if isinstance(y, ScoreHistogram) else tuple(y)
    if len(xp) != len(yp):
        raise DimensionError(
            f"histogram sizes differ: {len(xp)} vs {len(yp)}"
        )
    acc = 0.0
    for a, b in zip(xp, yp):
        s = a + b
        if s > 0.0:
            d = a - b
            acc += d * d / s
    return acc


def topic_similarity(a: Iterable[str], b: Iterable[str]) -> int:
    """Number of genre/theme terms present in both records."""
    return len(frozenset(a) & frozenset(b))


def normalize(value: float, z_min: float, z_max: float) -> float:
    """Min-max scale into [0, 1]; a degenerate range maps everything to 0."""
    if z_max == z_min:
        return 0.0
    return (value - z_min) / (z_max - z_min)


def fuse(
    crew_norm_raw: float, score_norm: float, topic_norm_raw: float
) -> tuple[float, float, float, float]:
    """Align the scaled measures and fuse them into the distance delta.

    Crew and topic scale with similarity, score with dissimilarity; crew and
    topic are therefore flipped (1 - value) before taking the Euclidean
    length. Returns (crew_aligned, score, topic_aligned, delta).
    """
    d = 1.0 - crew_norm_raw
    h = 1.0 - topic_norm_raw
    delta = math.sqrt(d * d + score_norm * score_norm + h * h)
    return d, score_norm, h, delta


# --- whole-catalog pipeline ---------------------------------------------------

@dataclass(frozen=True)
class RawPairs:
    """Raw measure columns for all pairs, in pair-index order."""

    k: int
    crew_raw: np.ndarray   # float64, ln(1 + shared crew)
    score_raw: np.ndarray  # float64, chi-squared distance
    topic_raw: np.ndarray  # int32, shared topic count

    @property
    def n_pairs(self) -> int:
        return len(self.crew_raw)

    def get(self, i: int, j: int) -> tuple[float, float, int]:
        p = pair_index(i, j, self.k)
        return (
            float(self.crew_raw[p]),
            float(self.score_raw[p]),
            int(self.topic_raw[p]),
        )


@dataclass(frozen=True)
class PairTable:
    """Raw, scaled/aligned, and fused measures for all pairs plus the stats."""

    k: int
    crew_raw: np.ndarray
    score_raw: np.ndarray
    topic_raw: np.ndarray
    stats: NormalizationStats
    crew_norm: np.ndarray
    score_norm: np.ndarray
    topic_norm: np.ndarray
    delta: np.ndarray

    @property
    def n_pairs(self) -> int:
        return len(self.delta)

    def get(self, i: int, j: int) -> SimilarityVector:
        if i > j:
            i, j = j, i
        p = pair_index(i, j, self.k)
        return SimilarityVector(
            pair=(i, j),
            crew_raw=float(self.crew_raw[p]),
            score_raw=float(self.score_raw[p]),
            topic_raw=int(self.topic_raw[p]),
            crew_norm=float(self.crew_norm[p]),
            score_norm=float(self.score_norm[p]),
            topic_norm=float(self.topic_norm[p]),
            delta=float(self.delta[p]),
        )

    def __iter__(self) -> Iterator[SimilarityVector]:
        for p in range(self.n_pairs):
            i, j = pair_members(p, self.k)
            yield self.get(i, j)


def _histogram_matrix(catalog: Catalog) -> np.ndarray:
    votes = np.array([rec.votes for rec in catalog], dtype=np.int64)
    totals = votes.sum(axis=1)
    zero = np.nonzero(totals == 0)[0]
    if len(zero):
        raise EmptyHistogramError(
            f"record {catalog[int(zero[0])].id!r}: all vote counts are zero, no histogram"
        )
    return votes.astype(np.float64) / totals.astype(np.float64)[:, None]


def _encode_sets(sets_by_record: Iterable[frozenset[str]]) -> tuple[np.ndarray, np.ndarray]:
    # Integer ids assigned by first appearance (record order, names sorted
    # within a record), per-record runs sorted for the merge intersection.
    vocab: dict[str, int] = {}
    flat: list[int] = []
    indptr = [0]
    for s in sets_by_record:
        row = [vocab.setdefault(name, len(vocab)) for name in sorted(s)]
        row.sort()
        flat.extend(row)
        indptr.append(len(flat))
    return np.array(flat, dtype=np.int32), np.array(indptr, dtype=np.int64)


def _log1p_table(max_count: int) -> np.ndarray:
    # One rounding path for the log transform in every backend: the table is
    # built by the same scalar call crew_similarity uses.
    return np.array([math.log1p(n) for n in range(max_count + 1)])


def compute_raw_pairs(
    catalog: Catalog,
    workers: int | None = None,
    backend: str | None = None,
) -> tuple[RawPairs, NormalizationStats]:
    """Compute raw measures for all k(k-1)/2 pairs plus global min/max."""
    impl = get_backend(backend)
    k = catalog.size
    hist = _histogram_matrix(catalog)
    crew_ids, crew_indptr = _encode_sets(rec.crew for rec in catalog)
    topic_ids, topic_indptr = _encode_sets(rec.topics for rec in catalog)

    m = pair_count(k)
    crew_counts = np.zeros(m, dtype=np.int32)
    score_raw = np.zeros(m, dtype=np.float64)
    topic_raw = np.zeros(m, dtype=np.int32)
    if workers is None:
        workers = os.cpu_count() or 1
    impl.pair_measures(
        crew_ids, crew_indptr, hist, topic_ids, topic_indptr,
        crew_counts, score_raw, topic_raw, max(1, int(workers)),
    )
    crew_raw = _log1p_table(int(crew_counts.max(initial=0)))[crew_counts]
    raws = RawPairs(k, crew_raw, score_raw, topic_raw)
    return raws, pair_stats(raws)


def pair_stats(raws: RawPairs) -> NormalizationStats:
    """Fold per-measure min/max over a raw pair table."""
    return NormalizationStats(
        crew_min=float(raws.crew_raw.min()),
        crew_max=float(raws.crew_raw.max()),
        score_min=float(raws.score_raw.min()),
        score_max=float(raws.score_raw.max()),
        topic_min=float(raws.topic_raw.min()),
        topic_max=float(raws.topic_raw.max()),
    )


def _scale(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if hi == lo:
        return np.zeros(len(values))
    return (values - lo) / (hi - lo)


def normalize_pairs(raws: RawPairs, stats: NormalizationStats) -> PairTable:
    """Scale, align, and fuse a raw pair table (same arithmetic as fuse())."""
    crew_norm = 1.0 - _scale(raws.crew_raw, stats.crew_min, stats.crew_max)
    score_norm = _scale(raws.score_raw, stats.score_min, stats.score_max)
    topic_norm = 1.0 - _scale(
        raws.topic_raw.astype(np.float64), stats.topic_min, stats.topic_max
    )
    delta = np.sqrt(
        crew_norm * crew_norm + score_norm * score_norm + topic_norm * topic_norm
    )
    return PairTable(
        k=raws.k,
        crew_raw=raws.crew_raw,
        score_raw=raws.score_raw,
        topic_raw=raws.topic_raw,
        stats=stats,
        crew_norm=crew_norm,
        score_norm=score_norm,
        topic_norm=topic_norm,
        delta=delta,
    )


def build_pair_table(
    catalog: Catalog,
    cache_path: str | Path | None = None,
    workers: int | None = None,
    backend: str | None = None,
) -> PairTable:
    """Full pipeline: raw measures (optionally cached to disk), then fuse."""
    raws, stats = compute_raw_pairs(catalog, workers=workers, backend=backend)
    if cache_path is not None:
        write_pair_cache(cache_path, raws)
    return normalize_pairs(raws, stats)


# --- pair cache file ----------------------------------------------------------
#
# Fixed-width binary layout, little-endian:
#   bytes 0-3   magic "ATPC"
#   byte  4     format version (1)
#   bytes 5-7   zero padding
#   bytes 8-11  k (u32)
#   bytes 12-19 pair count (u64)
#   then one 28-byte record per pair, in pair-index order:
#   i (u32), j (u32), crew_raw (f64), score_raw (f64), topic_raw (u32)

PAIR_CACHE_MAGIC = b"ATPC"
PAIR_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sB3xIQ")
_CACHE_RECORD = np.dtype(
    [("i", "<u4"), ("j", "<u4"), ("crew", "<f8"), ("score", "<f8"), ("topic", "<u4")]
)
_CACHE_CHUNK = 1 << 20


def write_pair_cache(path: str | Path, raws: RawPairs) -> None:
    """Persist raw pair measures; output bytes are input-deterministic."""
    m = raws.n_pairs
    offsets = _row_offsets(raws.k)
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(PAIR_CACHE_MAGIC, PAIR_CACHE_VERSION, raws.k, m))
        for start in range(0, m, _CACHE_CHUNK):
            stop = min(start + _CACHE_CHUNK, m)
            ps = np.arange(start, stop, dtype=np.int64)
            i = np.searchsorted(offsets, ps, side="right") - 1
            chunk = np.empty(stop - start, dtype=_CACHE_RECORD)
            chunk["i"] = i
            chunk["j"] = ps - offsets[i] + i + 1
            chunk["crew"] = raws.crew_raw[start:stop]
            chunk["score"] = raws.score_raw[start:stop]
            chunk["topic"] = raws.topic_raw[start:stop]
            chunk.tofile(fh)


def read_pair_cache(path: str | Path) -> RawPairs:
    """Load a pair cache, validating header and pair ordering."""
    with open(path, "rb") as fh:
        header = fh.read(_CACHE_HEADER.size)
        if len(header) < _CACHE_HEADER.size:
            raise CatalogError(f"{path}: truncated pair cache header")
        magic, version, k, m = _CACHE_HEADER.unpack(header)
        if magic != PAIR_CACHE_MAGIC:
            raise CatalogError(f"{path}: not a pair cache file")
        if version != PAIR_CACHE_VERSION:
            raise CatalogError(
                f"{path}: unsupported pair cache version {version}"
            )
        if m != pair_count(k):
            raise CatalogError(f"{path}: pair count {m} does not match k={k}")
        records = np.fromfile(fh, dtype=_CACHE_RECORD)
    if len(records) != m:
        raise CatalogError(f"{path}: expected {m} pair records, found {len(records)}")
    i, j = pair_members_array(np.arange(m, dtype=np.int64), k)
    if not (np.array_equal(records["i"], i) and np.array_equal(records["j"], j)):
        raise CatalogError(f"{path}: pair records out of order, cache corrupt")
    return RawPairs(
        k=int(k),
        crew_raw=np.ascontiguousarray(records["crew"]),
        score_raw=np.ascontiguousarray(records["score"]),
        topic_raw=np.ascontiguousarray(records["topic"]).astype(np.int32),
    )


def pair_table_from_cache(path: str | Path) -> PairTable:
    """Rebuild the fused table from cached raw measures (skips the sweep)."""
    raws = read_pair_cache(path)
    return normalize_pairs(raws, pair_stats(raws))

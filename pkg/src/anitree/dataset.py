"""Catalog loading, validation, and synthetic generation.

A catalog is a line-delimited text file: one JSON object per line with keys
``id``, ``title``, ``crew`` (list of strings), ``votes`` (list of N
non-negative integers, one per score category) and ``topics`` (list of
strings). Records are addressed internally by their dense index 0..k-1 in
file order; ids are only resolved at the CLI/query boundary.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import CatalogError

DEFAULT_N_CATEGORIES = 11

_RECORD_KEYS = ("id", "title", "crew", "votes", "topics")


@dataclass(frozen=True)
class AnimeRecord:
    """One catalog item: identity plus the three similarity ingredients."""

    id: str
    title: str
    crew: frozenset[str]
    votes: tuple[int, ...]
    topics: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "crew", frozenset(self.crew))
        object.__setattr__(self, "topics", frozenset(self.topics))
        object.__setattr__(self, "votes", tuple(self.votes))
        if not self.id or not isinstance(self.id, str):
            raise CatalogError("record id must be a non-empty string")
        for c in self.votes:
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise CatalogError(
                    f"record {self.id!r}: votes must be non-negative integers"
                )


@dataclass(frozen=True)
class Catalog:
    """An ordered, validated collection of records sharing one category count."""

    records: tuple[AnimeRecord, ...]
    n_categories: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if len(self.records) < 2:
            raise CatalogError("catalog too small: need at least 2 records")
        if self.n_categories < 1:
            raise CatalogError("n_categories must be positive")
        index: dict[str, int] = {}
        for pos, rec in enumerate(self.records):
            if rec.id in index:
                raise CatalogError(f"duplicate record id {rec.id!r}")
            if len(rec.votes) != self.n_categories:
                raise CatalogError(
                    f"record {rec.id!r}: expected {self.n_categories} vote "
                    f"counts, got {len(rec.votes)}"
                )
            index[rec.id] = pos
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[AnimeRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> AnimeRecord:
        return self.records[index]

    def index_of(self, item_id: str) -> int:
        from .errors import UnknownItemError

        try:
            return self._index[item_id]
        except KeyError:
            raise UnknownItemError(f"unknown item id {item_id!r}") from None

    @property
    def ids(self) -> list[str]:
        return [rec.id for rec in self.records]


def _parse_record(obj: object, line_no: int) -> AnimeRecord:
    if not isinstance(obj, dict):
        raise CatalogError(f"line {line_no}: record must be an object")
    missing = [key for key in _RECORD_KEYS if key not in obj]
    if missing:
        raise CatalogError(f"line {line_no}: missing keys {missing}")
    rid, title, crew, votes, topics = (obj[key] for key in _RECORD_KEYS)
    if not isinstance(title, str):
        raise CatalogError(f"line {line_no}: title must be a string")
    for name, val in (("crew", crew), ("votes", votes), ("topics", topics)):
        if not isinstance(val, list):
            raise CatalogError(f"line {line_no}: {name} must be a list")
    if not isinstance(rid, str):
        raise CatalogError(f"line {line_no}: id must be a string")
    try:
        return AnimeRecord(rid, title, frozenset(crew), tuple(votes), frozenset(topics))
    except CatalogError as exc:
        raise CatalogError(f"line {line_no}: {exc}") from None


def load_catalog(path: str | Path, n_categories: int = DEFAULT_N_CATEGORIES) -> Catalog:
    """Load and validate a line-delimited catalog file.

    Record order (and thus index assignment) equals file order. Raises
    CatalogError naming the offending line/record on any validation failure.
    """
    records: list[AnimeRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CatalogError(f"line {line_no}: malformed record: {exc}") from None
            records.append(_parse_record(obj, line_no))
    if len(records) < 2:
        raise CatalogError("catalog too small: need at least 2 records")
    return Catalog(tuple(records), n_categories)


def _dump_record(rec: AnimeRecord) -> str:
    obj = {
        "id": rec.id,
        "title": rec.title,
        "crew": sorted(rec.crew),
        "votes": list(rec.votes),
        "topics": sorted(rec.topics),
    }
    return json.dumps(obj, separators=(",", ":"))


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    """Write a catalog in the line-delimited format; byte-deterministic."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in catalog.records:
            fh.write(_dump_record(rec) + "\n")


# --- synthetic catalogs ----------------------------------------------------
#
# Desk-scale stand-in for a real crawl. Records are organized into
# "franchise clusters": items in one cluster share a core crew and draw the
# rest from a cluster-local pool, so same-cluster pairs always intersect
# while records 0 and 1 (different clusters, never any shared freelancers)
# are guaranteed disjoint. That gives the pair table both zero and non-zero
# crew overlaps for any k >= 10.

_TOPIC_VOCABULARY = (
    "action", "adventure", "comedy", "drama", "fantasy", "horror", "mecha",
    "mystery", "romance", "school", "science fiction", "slice of life",
    "sports", "supernatural", "thriller", "historical", "idol", "isekai",
    "magic", "martial arts", "military", "music", "ninja", "pirates",
    "police", "psychological", "samurai", "space", "steampunk", "superhero",
    "time travel", "tournament", "vampires", "virtual reality", "war",
    "yokai",
)

_TITLE_HEADS = (
    "Crimson", "Eternal", "Silent", "Midnight", "Radiant", "Lost", "Iron",
    "Sakura", "Phantom", "Azure", "Wandering", "Burning", "Frozen", "Royal",
)
_TITLE_TAILS = (
    "Blade", "Academy", "Chronicle", "Detective", "Kingdom", "Voyage",
    "Alchemist", "Symphony", "Legion", "Gate", "Garden", "Requiem",
)
_TITLE_MARKS = ("", " II", " Z", "!!", ": Rebirth", " GO")

_CLUSTER_BLOCK = 44  # crew names per cluster pool
_CORE_CREW = 4       # shared by every record in the cluster
_LEGENDS = tuple(f"legend-{m:02d}" for m in range(12))


def generate_synthetic(
    k: int, seed: int, n_categories: int = DEFAULT_N_CATEGORIES
) -> Catalog:
    """Generate a deterministic synthetic catalog of k records."""
    if k < 2:
        raise CatalogError("catalog too small: need at least 2 records")
    if n_categories < 1:
        raise CatalogError("n_categories must be positive")
    rng = random.Random(seed)
    n_clusters = max(2, math.isqrt(k))
    pools = [
        [f"c{g:03d}-{m:02d}" for m in range(_CLUSTER_BLOCK)] for g in range(n_clusters)
    ]
    vocab = list(_TOPIC_VOCABULARY)

    records = []
    for i in range(k):
        g = i % n_clusters
        pool = pools[g]
        # Records 0 and 1 (always distinct clusters) skip the shared legends
        # pool, pinning down one guaranteed-empty crew intersection.
        with_legends = i > 1 and rng.random() < 0.25
        crew = set(pool[:_CORE_CREW])
        n_extra = rng.randint(1, 33 if with_legends else 36)
        crew.update(rng.sample(pool[_CORE_CREW:], n_extra))
        if with_legends:
            crew.update(rng.sample(_LEGENDS, rng.randint(1, 3)))

        n_topics = rng.randint(1, 8)
        preferred = [vocab[(g * 5 + t) % len(vocab)] for t in range(10)]
        topics = set(rng.sample(preferred, (n_topics + 1) // 2))
        while len(topics) < n_topics:
            topics.add(rng.choice(vocab))

        votes = _synth_votes(rng, g, n_clusters, n_categories)
        title = (
            rng.choice(_TITLE_HEADS)
            + " "
            + rng.choice(_TITLE_TAILS)
            + rng.choice(_TITLE_MARKS)
        )
        records.append(
            AnimeRecord(f"a{i:05d}", title, frozenset(crew), tuple(votes), frozenset(topics))
        )
    return Catalog(tuple(records), n_categories)


def _synth_votes(rng: random.Random, cluster: int, n_clusters: int, n_cat: int) -> list[int]:
    # Bell-shaped vote histogram peaked at a cluster-flavored score; the
    # leftover count lands on the peak category so totals are never zero.
    center = (cluster / n_clusters) * (n_cat - 1)
    mu = min(max(rng.gauss(center, 1.5), 0.0), n_cat - 1.0)
    sigma = rng.uniform(0.8, 2.5)
    total = int(10 ** rng.uniform(1.3, 4.3))
    weights = [math.exp(-0.5 * ((n - mu) / sigma) ** 2) for n in range(n_cat)]
    wsum = sum(weights)
    votes = [int(total * w / wsum) for w in weights]
    votes[min(range(n_cat), key=lambda n: abs(n - mu))] += total - sum(votes)
    return votes

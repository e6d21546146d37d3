from __future__ import annotations

import json
from pathlib import Path

import pytest

from anitree import AnimeRecord, Catalog, SpanningTree

N = 11


def make_record(rid, crew=(), votes=None, topics=(), title=None):
    if votes is None:
        votes = [1] + [0] * (N - 1)
    return AnimeRecord(rid, title or f"Title {rid}", frozenset(crew), tuple(votes), frozenset(topics))


@pytest.fixture
def fig2():
    """Six-item catalog and the five-edge branch fixture:
    3598 - 3841 - 3907, with 3817, 2936, 2354 hanging off 3907."""
    ids = ["3598", "3841", "3907", "3817", "2936", "2354"]
    catalog = Catalog(
        tuple(make_record(rid, crew={f"crew-{rid}"}, topics={"action"}) for rid in ids),
        N,
    )
    at = {rid: idx for idx, rid in enumerate(ids)}
    edges = [
        (at["3598"], at["3841"], 0.30),
        (at["3841"], at["3907"], 0.35),
        (at["3907"], at["3817"], 0.40),
        (at["3907"], at["2936"], 0.45),
        (at["3907"], at["2354"], 0.50),
    ]
    tree = SpanningTree.from_edges(len(ids), edges)
    return catalog, tree


def write_build_dir(build_dir: Path, catalog: Catalog, tree: SpanningTree, report=None):
    """Assemble a loadable build directory from in-memory objects."""
    from anitree import save_catalog, write_report

    build_dir.mkdir(parents=True, exist_ok=True)
    catalog_path = build_dir / "catalog.jsonl"
    save_catalog(catalog, catalog_path)
    tree.save(build_dir / "tree.bin")
    files = {"pairs": None, "tree": "tree.bin", "report": None}
    if report is not None:
        write_report(build_dir / "report.tsv", report, catalog)
        files["report"] = "report.tsv"
    manifest = {
        "format": "anitree-build",
        "version": 1,
        "catalog": str(catalog_path),
        "n_categories": catalog.n_categories,
        "k": catalog.size,
        "eigen_tol": 1e-10,
        "eigen_max_iter": 100000,
        "pair_cache": False,
        "files": files,
    }
    (build_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return build_dir

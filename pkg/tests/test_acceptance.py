"""Acceptance suite: one test per criterion, each printing a PASS line.

Run `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
The paper-scale build (k=4029) runs once in a subprocess so its wall time
and peak memory are measured in isolation.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from anitree import (
    DELTA_MAX,
    SpanningTree,
    betweenness_brandes,
    betweenness_centrality,
    build_pair_table,
    closeness_centrality,
    compute_report,
    crew_similarity,
    degree_centrality,
    eigenvector_centrality,
    generate_synthetic,
    k_nearest,
    kruskal,
    kruskal_pairs,
    neighbors,
    pair_members,
    path,
    save_catalog,
    score_histogram,
    score_similarity,
    topic_similarity,
)
from anitree.cli import run, write_dot

from conftest import N
from oracles import brute_force_pair_table, min_spanning_total, random_tree_edges

PAPER_SCALE_K = 4029
TIME_BUDGET_S = 60.0
MEMORY_BUDGET_BYTES = 2 * 1024**3

_BUILD_SNIPPET = """\
import json, resource, sys, time
from anitree import cli
t0 = time.perf_counter()
rc = cli.run(["build", "-i", sys.argv[1], "-o", sys.argv[2]])
elapsed = time.perf_counter() - t0
peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
print(json.dumps({"rc": rc, "elapsed": elapsed, "peak_bytes": peak}))
"""


@pytest.fixture(scope="session")
def paper_scale_build(tmp_path_factory):
    root = tmp_path_factory.mktemp("paper-scale")
    catalog_path = root / "catalog.jsonl"
    save_catalog(generate_synthetic(PAPER_SCALE_K, seed=1), catalog_path)
    out_dir = root / "build"
    proc = subprocess.run(
        [sys.executable, "-c", _BUILD_SNIPPET, str(catalog_path), str(out_dir)],
        capture_output=True,
        text=True,
        check=True,
    )
    stats = json.loads(proc.stdout.strip().splitlines()[-1])
    assert stats["rc"] == 0
    return {"dir": out_dir, "catalog": catalog_path, **stats}


def test_criterion_1_mst_matches_exhaustive_enumeration():
    rng = random.Random(20260801)
    n_graphs = 200
    t0 = time.perf_counter()
    for _ in range(n_graphs):
        k = rng.randint(4, 7)
        weight = {
            (i, j): rng.random() for i, j in itertools.combinations(range(k), 2)
        }
        tree = kruskal(k, [(u, v, w) for (u, v), w in weight.items()])
        assert tree.total_weight == min_spanning_total(k, weight)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"\n[1] mst oracle equivalence: PASS ({n_graphs} graphs, exact, {elapsed:.2f}s)")


def test_criterion_2_betweenness_dual_algorithm_agreement():
    rng = random.Random(20260802)
    n_trees = 120
    t0 = time.perf_counter()
    for _ in range(n_trees):
        k = rng.randint(2, 64)
        edges = [(u, v, rng.random()) for u, v in random_tree_edges(rng, k)]
        tree = SpanningTree.from_edges(k, edges)
        raw_fast, norm_fast = betweenness_centrality(tree)
        raw_ref, norm_ref = betweenness_brandes(tree)
        assert np.array_equal(raw_ref, raw_fast.astype(float))
        assert np.max(np.abs(norm_ref - norm_fast)) <= 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    print(f"[2] betweenness dual-route agreement: PASS ({n_trees} trees, {elapsed:.2f}s)")


def test_criterion_3_eigenvector_residual(paper_scale_build):
    worst = 0.0
    # every produced tree: small and mid synthetic builds plus paper scale
    for k, seed in ((50, 3), (333, 4)):
        catalog = generate_synthetic(k, seed=seed)
        tree = kruskal_pairs(k, build_pair_table(catalog).delta)
        e, lam = eigenvector_centrality(tree)
        resid = float(np.linalg.norm(tree.adjacency_matrix() @ e - lam * e))
        assert resid <= 1e-8
        worst = max(worst, resid)

    big = SpanningTree.load(paper_scale_build["dir"] / "tree.bin")
    assert big.k == PAPER_SCALE_K
    e, lam = eigenvector_centrality(big)
    resid = float(np.linalg.norm(big.adjacency_matrix() @ e - lam * e))
    assert resid <= 1e-8
    worst = max(worst, resid)

    p3 = SpanningTree.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    e3, lam3 = eigenvector_centrality(p3)
    assert abs(lam3 - math.sqrt(2)) <= 1e-8
    assert np.max(np.abs(e3 - np.array([0.5, math.sqrt(2) / 2, 0.5]))) <= 1e-8
    print(f"[3] eigenvector residual <= 1e-8 incl k=4029 (worst {worst:.2e}): PASS")


def test_criterion_4_closed_form_centrality_fixtures():
    rng = random.Random(20260804)
    checked_trees = []
    for n in (3, 5, 9, 33):
        star = SpanningTree.from_edges(n, [(0, i, 1.0) for i in range(1, n)])
        assert degree_centrality(star)[0] == 1.0
        assert betweenness_centrality(star)[1][0] == 1.0
        checked_trees.append(star)
    p3 = SpanningTree.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert closeness_centrality(p3)[1] == 1.0
    checked_trees.append(p3)
    for n in range(4, 33):
        p = SpanningTree.from_edges(n, [(i, i + 1, 1.0) for i in range(n - 1)])
        close = closeness_centrality(p)
        assert abs(close[0] - 2.0 / n) <= 1e-12
        assert abs(close[n - 1] - 2.0 / n) <= 1e-12
        checked_trees.append(p)
    for _ in range(20):
        k = rng.randint(2, 50)
        edges = [(u, v, rng.random()) for u, v in random_tree_edges(rng, k)]
        checked_trees.append(SpanningTree.from_edges(k, edges))
    for tree in checked_trees:
        assert abs(float(degree_centrality(tree).sum()) - 2.0) <= 1e-12
    print(f"[4] closed-form centrality fixtures (1e-12, {len(checked_trees)} trees): PASS")


def test_criterion_5_similarity_oracle_and_properties():
    # exact table agreement at k <= 8
    n_tables = 0
    for k in range(2, 9):
        for seed in (0, 1):
            catalog = generate_synthetic(k, seed=seed)
            table = build_pair_table(catalog)
            rows, bounds = brute_force_pair_table(
                [(rec.crew, rec.votes, rec.topics) for rec in catalog]
            )
            for measure in ("crew", "score", "topic"):
                assert table.stats.bounds(measure) == bounds[measure]
            for p, row in enumerate(rows):
                assert pair_members(p, k) == row["pair"]
                assert table.crew_raw[p] == row["crew"]
                assert table.score_raw[p] == row["score"]
                assert table.topic_raw[p] == row["topic"]
                assert table.crew_norm[p] == row["crew_norm"]
                assert table.score_norm[p] == row["score_norm"]
                assert table.topic_norm[p] == row["topic_norm"]
                assert table.delta[p] == row["delta"]
            n_tables += 1

    # range properties over >= 10,000 pairs of one catalog
    catalog = generate_synthetic(150, seed=8)
    table = build_pair_table(catalog)
    assert table.n_pairs >= 10_000
    for arr in (table.crew_norm, table.score_norm, table.topic_norm):
        assert arr.min() >= 0.0 and arr.max() <= 1.0
    assert table.delta.min() >= 0.0 and table.delta.max() <= DELTA_MAX

    # symmetry over 10,000 random record pairs
    rng = random.Random(20260805)
    records = list(catalog)
    for _ in range(10_000):
        a, b = rng.sample(records, 2)
        assert crew_similarity(a.crew, b.crew) == crew_similarity(b.crew, a.crew)
        assert topic_similarity(a.topics, b.topics) == topic_similarity(
            b.topics, a.topics
        )
        ha, hb = score_histogram(a.votes), score_histogram(b.votes)
        assert score_similarity(ha, hb) == score_similarity(hb, ha)
    print(
        f"[5] similarity oracle exact on {n_tables} tables; "
        "range+symmetry on 10k pairs: PASS"
    )


def test_criterion_6_branch_fixture_replication(fig2):
    catalog, tree = fig2
    got = neighbors(tree, catalog, "3907")
    assert {item for item, _ in got} == {"3841", "3817", "2936", "2354"}
    result = path(tree, catalog, "3598", "2354")
    assert result.hops == 3
    assert result.via == ("3841", "3907")
    nearest = k_nearest(tree, catalog, "3907", 4)
    assert all(hops == 1 for _, hops in nearest)
    assert {item for item, _ in nearest} == {"3841", "3817", "2936", "2354"}
    print("[6] five-edge branch fixture (neighbors + 3-walk path): PASS")


def test_criterion_7_paper_scale_performance(paper_scale_build):
    elapsed = paper_scale_build["elapsed"]
    peak = paper_scale_build["peak_bytes"]
    for name in ("pairs.bin", "tree.bin", "report.tsv", "manifest.json"):
        assert (paper_scale_build["dir"] / name).exists()
    assert elapsed < TIME_BUDGET_S
    assert peak < MEMORY_BUDGET_BYTES
    print(
        f"[7] paper-scale build k={PAPER_SCALE_K} "
        f"({elapsed:.1f}s < {TIME_BUDGET_S:.0f}s, "
        f"{peak / 1024 ** 3:.2f}GB < 2GB): PASS"
    )


def test_criterion_8_determinism(tmp_path):
    catalog_path = tmp_path / "catalog.jsonl"
    save_catalog(generate_synthetic(300, seed=6), catalog_path)
    outputs = []
    for name in ("one", "two"):
        out = tmp_path / name
        assert run(["build", "-i", str(catalog_path), "-o", str(out)]) == 0
        assert run(["export-dot", "-d", str(out), "-o", str(out / "tree.dot")]) == 0
        outputs.append(out)
    first, second = outputs
    for name in ("pairs.bin", "tree.bin", "report.tsv", "tree.dot"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    print("[8] determinism: pair cache, tree, DOT, report byte-identical: PASS")

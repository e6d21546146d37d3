"""Cross-backend equivalence: the compiled kernels and the pure fallback
must produce bit-identical raw measures and identical Kruskal scans."""

from __future__ import annotations

import random

import numpy as np
import pytest

from anitree import available_backends, generate_synthetic, get_backend, kruskal_pairs
from anitree.similarity import compute_raw_pairs, pair_count

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(),
    reason="compiled extension not built",
)


def test_backend_resolution():
    assert get_backend("pure").BACKEND_NAME == "pure"
    with pytest.raises(ValueError, match="unknown backend"):
        get_backend("sparkly")


@needs_compiled
def test_compiled_is_default_when_built():
    assert get_backend().BACKEND_NAME == "compiled"
    assert get_backend("compiled").IS_COMPILED


@needs_compiled
@pytest.mark.parametrize("k,seed", [(2, 0), (13, 1), (60, 2), (151, 3)])
def test_pair_measures_bitwise_identical(k, seed):
    catalog = generate_synthetic(k, seed=seed)
    fast, fast_stats = compute_raw_pairs(catalog, backend="compiled")
    pure, pure_stats = compute_raw_pairs(catalog, backend="pure")
    assert np.array_equal(fast.crew_raw, pure.crew_raw)
    assert np.array_equal(fast.score_raw, pure.score_raw)
    assert np.array_equal(fast.topic_raw, pure.topic_raw)
    assert fast_stats == pure_stats


@needs_compiled
def test_pair_measures_single_thread_matches_parallel():
    catalog = generate_synthetic(97, seed=5)
    one, _ = compute_raw_pairs(catalog, backend="compiled", workers=1)
    many, _ = compute_raw_pairs(catalog, backend="compiled", workers=8)
    assert np.array_equal(one.score_raw, many.score_raw)
    assert np.array_equal(one.crew_raw, many.crew_raw)
    assert np.array_equal(one.topic_raw, many.topic_raw)


@needs_compiled
@pytest.mark.parametrize("k,seed", [(2, 0), (9, 1), (41, 2), (120, 3)])
def test_kruskal_scan_identical(k, seed):
    rng = random.Random(seed)
    # coarse weights make plenty of ties; both scans must agree anyway
    delta = np.array([rng.choice([0.1, 0.3, 0.5, 0.9]) for _ in range(pair_count(k))])
    assert kruskal_pairs(k, delta, backend="compiled") == kruskal_pairs(
        k, delta, backend="pure"
    )


@needs_compiled
def test_full_pipeline_trees_identical():
    from anitree import build_pair_table

    catalog = generate_synthetic(80, seed=11)
    fast = build_pair_table(catalog, backend="compiled")
    pure = build_pair_table(catalog, backend="pure")
    assert np.array_equal(fast.delta, pure.delta)
    assert kruskal_pairs(catalog.size, fast.delta, backend="compiled") == kruskal_pairs(
        catalog.size, pure.delta, backend="pure"
    )

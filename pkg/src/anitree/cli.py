"""Command-line driver for the similarity-tree pipeline.

Usage:
    anitree generate -k 500 --seed 7 -o catalog.jsonl
    anitree build -i catalog.jsonl -o build/
    anitree export-dot -d build/ -o tree.dot [--titles]
    anitree top -d build/ --by total -n 10
    anitree recommend -d build/ a00042 [-k 8]
    anitree path -d build/ a00042 a00317
    anitree distributions -d build/ [-o table.tsv]

A build directory holds the pair cache, the tree file, the centrality
report, and a manifest; query commands reuse it without recomputation.
Flags can also come from a key=value config file (--config); explicit flags
win. Exit codes: 0 success, 2 usage, 3 input/data validation, 4 computation
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import IO

import numpy as np

from . import centrality, query
from ._backend import get_backend
from .dataset import (
    DEFAULT_N_CATEGORIES,
    Catalog,
    generate_synthetic,
    load_catalog,
    save_catalog,
)
from .errors import (
    CatalogError,
    ConvergenceError,
    NotConnectedError,
    UnknownItemError,
)
from .mst import SpanningTree, kruskal_pairs
from .similarity import build_pair_table, pair_count

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "anitree-build"
MANIFEST_VERSION = 1

MEASURE_CHOICES = ("degree", "eigenvector", "betweenness", "closeness", "total")


class UsageError(Exception):
    pass


# --- config file ------------------------------------------------------------

_CONFIG_PARSERS = {
    "n_categories": int,
    "eigen_tol": float,
    "eigen_max_iter": int,
    "seed": int,
    "pair_cache": lambda text: _parse_bool("pair_cache", text),
    "workers": int,
}


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise UsageError(f"config key {key}: expected on/off, got {text!r}")


def _read_config(path: str | Path) -> dict:
    config: dict = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for line_no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _CONFIG_PARSERS:
            raise UsageError(f"config line {line_no}: unknown or malformed entry {line!r}")
        try:
            config[key] = _CONFIG_PARSERS[key](value.strip())
        except ValueError:
            raise UsageError(f"config line {line_no}: bad value for {key}") from None
    return config


def _setting(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    return config.get(key, default)


# --- build artifacts ----------------------------------------------------------

def _write_manifest(out_dir: Path, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    (out_dir / MANIFEST_NAME).write_text(text, encoding="utf-8", newline="\n")


def _load_build(build_dir: str | Path) -> tuple[dict, Catalog, SpanningTree]:
    build_dir = Path(build_dir)
    manifest_path = build_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise CatalogError(f"{build_dir}: no build manifest; run `anitree build` first")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"{manifest_path}: unreadable manifest: {exc}") from None
    if manifest.get("format") != MANIFEST_FORMAT:
        raise CatalogError(f"{manifest_path}: not an anitree build manifest")

    catalog_path = Path(manifest["catalog"])
    if not catalog_path.is_absolute() and not catalog_path.exists():
        nested = build_dir / catalog_path
        if nested.exists():
            catalog_path = nested
    catalog = load_catalog(catalog_path, int(manifest["n_categories"]))
    tree = SpanningTree.load(build_dir / manifest["files"]["tree"])
    if tree.k != catalog.size:
        raise CatalogError(
            f"{build_dir}: tree has {tree.k} vertices but catalog has {catalog.size}"
        )
    return manifest, catalog, tree


def _report_path(build_dir: str | Path) -> Path:
    build_dir = Path(build_dir)
    manifest_path = build_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise CatalogError(f"{build_dir}: no build manifest; run `anitree build` first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    report = manifest.get("files", {}).get("report")
    if not report:
        raise CatalogError(f"{build_dir}: build carries no centrality report")
    return build_dir / report


# --- DOT export ---------------------------------------------------------------

def _dot_escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    )


def write_dot(
    tree: SpanningTree,
    catalog: Catalog,
    dest: str | Path | IO[str],
    titles: bool = False,
) -> None:
    """Emit the tree as an undirected Graphviz graph, canonically ordered:
    nodes by vertex index, edges by (u, v), edge length = fused distance."""

    def emit(fh: IO[str]) -> None:
        fh.write("graph similarity_tree {\n")
        for rec in catalog:
            label = f"{rec.id}\n{rec.title}" if titles else rec.id
            fh.write(f'  "{_dot_escape(rec.id)}" [label="{_dot_escape(label)}"];\n')
        for edge in tree.edges():
            fh.write(
                f'  "{_dot_escape(catalog[edge.u].id)}" -- '
                f'"{_dot_escape(catalog[edge.v].id)}" [len={edge.w!r}];\n'
            )
        fh.write("}\n")

    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)
    else:
        emit(dest)


# --- subcommands ----------------------------------------------------------------

def _cmd_generate(args) -> int:
    config = _read_config(args.config) if args.config else {}
    seed = _setting(args.seed, config, "seed", 0)
    n_categories = _setting(args.n_categories, config, "n_categories", DEFAULT_N_CATEGORIES)
    catalog = generate_synthetic(args.k, seed, n_categories)
    save_catalog(catalog, args.output)
    print(f"wrote {catalog.size} records to {args.output} (seed={seed})")
    return 0


def _cmd_build(args) -> int:
    config = _read_config(args.config) if args.config else {}
    n_categories = _setting(args.n_categories, config, "n_categories", DEFAULT_N_CATEGORIES)
    eigen_tol = _setting(args.eigen_tol, config, "eigen_tol", centrality.DEFAULT_EIGEN_TOL)
    eigen_max_iter = _setting(
        args.eigen_max_iter, config, "eigen_max_iter", centrality.DEFAULT_EIGEN_MAX_ITER
    )
    pair_cache = _setting(args.pair_cache, config, "pair_cache", True)
    workers = _setting(args.workers, config, "workers", None)

    catalog = load_catalog(args.input, n_categories)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cache_path = out_dir / "pairs.bin" if pair_cache else None
    table = build_pair_table(catalog, cache_path=cache_path, workers=workers)
    tree = kruskal_pairs(catalog.size, table.delta)
    tree.save(out_dir / "tree.bin")
    report = centrality.compute_report(
        tree, eigen_tol=eigen_tol, eigen_max_iter=eigen_max_iter
    )
    centrality.write_report(out_dir / "report.tsv", report, catalog)
    _write_manifest(
        out_dir,
        {
            "format": MANIFEST_FORMAT,
            "version": MANIFEST_VERSION,
            "catalog": str(args.input),
            "n_categories": n_categories,
            "k": catalog.size,
            "eigen_tol": eigen_tol,
            "eigen_max_iter": eigen_max_iter,
            "eigenvalue": report.eigenvalue,
            "pair_cache": bool(pair_cache),
            "files": {
                "pairs": "pairs.bin" if pair_cache else None,
                "tree": "tree.bin",
                "report": "report.tsv",
            },
        },
    )

    k = catalog.size
    print(f"k={k} pairs={pair_count(k)} backend={get_backend().BACKEND_NAME}")
    print(f"mst total weight={tree.total_weight!r}")
    print("top 3 by total centrality:")
    for rank, v in enumerate(report.ranking()[:3].tolist(), start=1):
        rec = catalog[v]
        print(f"  {rank}. {rec.id}\t{rec.title}\t{float(report.total[v])!r}")
    return 0


def _cmd_export_dot(args) -> int:
    _, catalog, tree = _load_build(args.build_dir)
    if args.output == "-":
        write_dot(tree, catalog, sys.stdout, titles=args.titles)
    else:
        write_dot(tree, catalog, args.output, titles=args.titles)
        print(f"wrote {args.output}")
    return 0


def _cmd_top(args) -> int:
    data = centrality.read_report(_report_path(args.build_dir))
    values = data[args.by]
    order = np.lexsort((np.arange(len(values)), -values))
    print(f"rank\tid\ttitle\t{args.by}")
    for rank, row in enumerate(order[: args.n].tolist(), start=1):
        print(f"{rank}\t{data['id'][row]}\t{data['title'][row]}\t{float(values[row])!r}")
    return 0


def _cmd_recommend(args) -> int:
    _, catalog, tree = _load_build(args.build_dir)
    if args.k is None:
        print("id\ttitle\tdelta")
        for item_id, delta in query.neighbors(tree, catalog, args.id):
            rec = catalog[catalog.index_of(item_id)]
            print(f"{item_id}\t{rec.title}\t{delta!r}")
    else:
        print("id\ttitle\thops")
        for item_id, hops in query.k_nearest(tree, catalog, args.id, args.k):
            rec = catalog[catalog.index_of(item_id)]
            print(f"{item_id}\t{rec.title}\t{hops}")
    return 0


def _cmd_path(args) -> int:
    _, catalog, tree = _load_build(args.build_dir)
    result = query.path(tree, catalog, args.from_id, args.to_id)
    if result.via:
        print(f"{result.hops} walks via {', '.join(result.via)}")
    else:
        print(f"{result.hops} walks")
    return 0


def _cmd_distributions(args) -> int:
    manifest, catalog, tree = _load_build(args.build_dir)
    data = centrality.read_report(_report_path(args.build_dir))
    rows = sorted(range(len(data["id"])), key=lambda r: catalog.index_of(data["id"][r]))

    def emit(fh: IO[str]) -> None:
        fh.write("\t".join(centrality.REPORT_COLUMNS) + "\n")
        for r in rows:
            fh.write(
                "\t".join(
                    (
                        data["id"][r],
                        data["title"][r],
                        repr(float(data["degree"][r])),
                        repr(float(data["eigenvector"][r])),
                        str(int(data["betweenness_raw"][r])),
                        repr(float(data["betweenness"][r])),
                        repr(float(data["closeness"][r])),
                        repr(float(data["total"][r])),
                    )
                )
                + "\n"
            )

    if args.output is None or args.output == "-":
        emit(sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)
        print(f"wrote {args.output}")
    return 0


# --- parser / entry -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anitree",
        description="Similarity spanning tree analytics over item catalogs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic catalog")
    p.add_argument("-k", type=int, required=True, help="number of records (>= 2)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-categories", type=int, default=None)
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("build", help="build pair cache, tree, and report")
    p.add_argument("-i", "--input", required=True, help="catalog file")
    p.add_argument("-o", "--out-dir", required=True, help="build directory")
    p.add_argument("--n-categories", type=int, default=None)
    p.add_argument("--eigen-tol", type=float, default=None)
    p.add_argument("--eigen-max-iter", type=int, default=None)
    p.add_argument(
        "--pair-cache",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="write the raw pair cache (default: on)",
    )
    p.add_argument("--workers", type=int, default=None, help="kernel threads")
    p.add_argument("--config", default=None, help="key=value config file")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("export-dot", help="emit the tree as Graphviz DOT")
    p.add_argument("-d", "--build-dir", required=True)
    p.add_argument("-o", "--output", required=True, help="output file, or - for stdout")
    p.add_argument("--titles", action="store_true", help="include titles in labels")
    p.set_defaults(func=_cmd_export_dot)

    p = sub.add_parser("top", help="rank items by one centrality")
    p.add_argument("-d", "--build-dir", required=True)
    p.add_argument("--by", choices=MEASURE_CHOICES, default="total")
    p.add_argument("-n", type=int, default=10)
    p.set_defaults(func=_cmd_top)

    p = sub.add_parser("recommend", help="similar items for one id")
    p.add_argument("-d", "--build-dir", required=True)
    p.add_argument("id")
    p.add_argument("-k", type=int, default=None, help="k-nearest by hops instead of direct neighbors")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("path", help="tree path between two ids")
    p.add_argument("-d", "--build-dir", required=True)
    p.add_argument("from_id")
    p.add_argument("to_id")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("distributions", help="per-vertex centrality table in vertex order")
    p.add_argument("-d", "--build-dir", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_distributions)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (CatalogError, UnknownItemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NotConnectedError, ConvergenceError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line front end.

Verbs: ``analyze``, ``louvain``, ``cooccur``, ``export``, ``genres``. Each
verb writes into ``<out>/<verb>/`` and starts by writing ``manifest.json``.

Settings come from an optional YAML config file; command-line flags win over
it, and ``COLLABNET_OUT`` overrides the config file's output directory.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .baselines import compare_small_world
from .community import (LouvainConfig, community_profile, louvain, partition_summary,
                        partition_to_csv)
from .cooccur import build_cooccurrence, top_cooccurring, top_genres_by_degree
from .errors import AnalysisError, ConfigError, SchemaError
from .graph import (Graph, build_graph, connected_components, giant_component, induced_subgraph,
                    top_fraction_by_degree)
from .ingest import (ArtistCatalog, SchemaConfig, country_chart_set, genre_histogram, genre_set,
                     load_catalog, load_edges, seed_artists)
from .metrics import degree_distribution, fit_power_law, summarize
from .report import (Manifest, comparison_table, degree_fit_points, table, write_json,
                     write_text)

log = logging.getLogger("collabnet")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ANALYSIS = 4

OUT_ENV = "COLLABNET_OUT"


@dataclass
class Filters:
    seed_only: bool = False
    genre: str | None = None
    country: str | None = None
    top_fraction: float | None = None

    def active(self) -> bool:
        return bool(self.seed_only or self.genre or self.country or self.top_fraction)

    def label(self) -> str:
        parts = []
        if self.seed_only:
            parts.append("seed-only")
        if self.genre:
            parts.append(f"genre={self.genre}")
        if self.country:
            parts.append(f"country={self.country}")
        if self.top_fraction:
            parts.append(f"top-fraction={self.top_fraction}")
        return "+".join(parts) or "all"


@dataclass
class RunConfig:
    nodes_path: str | None = None
    edges_path: str | None = None
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    output_dir: str = "collabnet-out"
    seed: int = 0
    filters: Filters = field(default_factory=Filters)
    powerlaw_kmin: int = 1
    louvain: LouvainConfig = field(default_factory=LouvainConfig)
    cooccur_threshold: int = 5
    cooccur_inclusive: bool = False
    er_instances: int = 1
    top_communities: int = 20
    top_n: int = 20
    full_graph: bool = True
    export_format: str = "edgelist-csv"
    partition_path: str | None = None

    @classmethod
    def from_mapping(cls, d: dict | None) -> "RunConfig":
        d = dict(d or {})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "schema" in d:
                d["schema"] = SchemaConfig.from_dict(d["schema"])
            if "filters" in d:
                d["filters"] = Filters(**(d["filters"] or {}))
            if "louvain" in d:
                d["louvain"] = LouvainConfig(**(d["louvain"] or {}))
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data or {}


def _first(*values):
    return next(v for v in values if v is not None)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    raw = load_config_file(args.config) if args.config else {}
    cfg = RunConfig.from_mapping(raw)
    if os.environ.get(OUT_ENV):
        cfg.output_dir = os.environ[OUT_ENV]
    flag_map = {
        "nodes": "nodes_path", "edges": "edges_path", "out": "output_dir", "seed": "seed",
        "kmin": "powerlaw_kmin", "threshold": "cooccur_threshold", "er_instances": "er_instances",
        "top_communities": "top_communities", "top_n": "top_n", "format": "export_format",
        "partition": "partition_path",
    }
    for flag, attr in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "inclusive", False):
        cfg.cooccur_inclusive = True
    if getattr(args, "no_full", False):
        cfg.full_graph = False
    for flag in ("genre", "country", "top_fraction"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg.filters, flag, value)
    if getattr(args, "seed_only", False):
        cfg.filters.seed_only = True
    lv_raw = raw.get("louvain") or {}
    try:
        cfg.louvain = LouvainConfig(
            seed=args.seed if args.seed is not None else lv_raw.get("seed", cfg.seed),
            min_gain=_first(getattr(args, "min_gain", None), cfg.louvain.min_gain),
            max_passes=_first(getattr(args, "max_passes", None), cfg.louvain.max_passes),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.er_instances < 1:
        raise ConfigError("er_instances must be >= 1")
    if cfg.filters.top_fraction is not None and not 0 < cfg.filters.top_fraction <= 1:
        raise ConfigError("top_fraction must lie in (0, 1]")
    return cfg


# -- pipeline pieces ---------------------------------------------------------

@dataclass
class Loaded:
    catalog: ArtistCatalog
    graph: Graph
    edges_rows: int
    edges_rejected: int


def _require(path: str | None, what: str) -> Path:
    if not path:
        raise ConfigError(f"{what} path not configured")
    return Path(path)


def load_inputs(cfg: RunConfig, manifest: Manifest) -> Loaded:
    with manifest.stage("ingest"):
        catalog = load_catalog(_require(cfg.nodes_path, "nodes"), cfg.schema)
        edges = load_edges(_require(cfg.edges_path, "edges"), cfg.schema)
    with manifest.stage("build_graph"):
        g, summary = build_graph(edges, catalog.ids())
    manifest.data["cleaning"] = {
        "catalog_rows_in": catalog.rows_in,
        "catalog_rows_rejected": len(catalog.rejected),
        "edge_rows_in": edges.rows_in,
        "edge_rows_rejected": len(edges.rejected),
        **summary.as_dict(),
        "edges_after_cleaning": g.m,
        "nodes_not_in_catalog": g.n - len(catalog),
    }
    manifest.flush()
    return Loaded(catalog, g, edges.rows_in, len(edges.rejected))


def filter_nodes(cfg: RunConfig, loaded: Loaded):
    """NodeSet selected by the configured filters (intersection), or None."""
    f = cfg.filters
    if not f.active():
        return None
    g, cat = loaded.graph, loaded.catalog
    sel = np.arange(g.n, dtype=np.int64)
    if f.seed_only:
        sel = np.intersect1d(sel, seed_artists(cat, g))
    if f.genre:
        sel = np.intersect1d(sel, genre_set(cat, g, f.genre))
    if f.country:
        sel = np.intersect1d(sel, country_chart_set(cat, g, f.country))
    if f.top_fraction:
        sel = np.intersect1d(sel, top_fraction_by_degree(g, f.top_fraction))
    if len(sel) == 0:
        raise AnalysisError(f"filters {f.label()} selected no nodes")
    return sel


def graph_summary(loaded: Loaded, top: int = 10) -> dict:
    g = loaded.graph
    comps = connected_components(g)
    order = np.lexsort((np.arange(g.n), -g.degrees))[:top]
    names = loaded.catalog.records
    return {
        "n": g.n,
        "m": g.m,
        "edge_rows_in": loaded.edges_rows,
        "edge_rows_rejected": loaded.edges_rejected,
        "components": comps.count,
        "component_sizes_top": comps.sizes[:top].tolist(),
        "giant_n": int(comps.sizes[0]),
        "isolated_nodes": int((g.degrees == 0).sum()),
        "seed_artists": int(len(seed_artists(loaded.catalog, g))),
        "top_degree": [
            {"key": g.keys[v], "name": names[g.keys[v]].name if g.keys[v] in names else "",
             "degree": int(g.degrees[v])}
            for v in order
        ],
    }


def analyze_scope(g: Graph, label: str, out: Path, cfg: RunConfig, manifest: Manifest) -> dict:
    """Metrics, baselines and degree fit for one graph; returns the metrics dict."""
    with manifest.stage(f"{label}:metrics"):
        comps = connected_components(g)
        whole = summarize(g)
        giant = giant_component(g) if comps.count > 1 else g
        giant_rep = whole if giant is g else summarize(giant)
        metrics = {
            "scope": label,
            "components": comps.count,
            "whole": whole.as_dict(),
            "giant": giant_rep.as_dict(),
        }
        write_json(out / "metrics.json", metrics)
    with manifest.stage(f"{label}:degree_fit"):
        dist = degree_distribution(g)
        write_text(out / "degree_histogram.csv", dist.to_csv())
        try:
            fit = fit_power_law(dist, cfg.powerlaw_kmin)
            fit_doc = {"scope": label, "k_min": cfg.powerlaw_kmin, **fit.as_dict()}
        except AnalysisError as exc:
            fit, fit_doc = None, {"scope": label, "k_min": cfg.powerlaw_kmin, "error": str(exc)}
        write_json(out / "powerlaw.json", fit_doc)
        write_text(out / "powerlaw_points.csv", degree_fit_points(dist, fit))
    with manifest.stage(f"{label}:baselines"):
        if giant.n >= 3 and giant.m >= 1:
            cmp = compare_small_world(giant, cfg.seed, cfg.er_instances, target=giant_rep).as_dict()
            cmp["target_scope"] = "giant_component" if giant is not g else "whole_graph"
            write_json(out / "comparison.json", cmp)
            write_text(out / "comparison.txt", comparison_table(cmp))
        else:
            log.warning("%s: giant component too small for baselines", label)
    return metrics


# -- verbs -------------------------------------------------------------------

def cmd_analyze(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir) / "analyze"
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out / "manifest.json", "analyze", cfg.as_dict(),
                        {"nodes": cfg.nodes_path, "edges": cfg.edges_path})
    loaded = load_inputs(cfg, manifest)
    with manifest.stage("graph_summary"):
        write_json(out / "graph_summary.json", graph_summary(loaded))
    if cfg.full_graph:
        analyze_scope(giant_component(loaded.graph), "full_giant", out / "full_giant", cfg,
                      manifest)
    sel = filter_nodes(cfg, loaded)
    if sel is not None:
        sub = induced_subgraph(loaded.graph, sel)
        sub_out = out / "subgraph"
        write_json(sub_out / "filters.json", {"filters": dataclasses.asdict(cfg.filters),
                                              "label": cfg.filters.label(), "n": sub.n,
                                              "m": sub.m})
        analyze_scope(sub, cfg.filters.label(), sub_out, cfg, manifest)
    manifest.finish()
    return out


def _scope_graph(cfg: RunConfig, loaded: Loaded) -> Graph:
    sel = filter_nodes(cfg, loaded)
    return loaded.graph if sel is None else induced_subgraph(loaded.graph, sel)


def cmd_louvain(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir) / "louvain"
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out / "manifest.json", "louvain", cfg.as_dict(),
                        {"nodes": cfg.nodes_path, "edges": cfg.edges_path})
    loaded = load_inputs(cfg, manifest)
    g = _scope_graph(cfg, loaded)
    with manifest.stage("louvain"):
        part = louvain(g, cfg.louvain)
        write_text(out / "partition.csv", partition_to_csv(g, part))
        summary = partition_summary(part, cfg.top_communities)
        summary.update(scope=cfg.filters.label(), n=g.n, m=g.m, seed=cfg.louvain.seed,
                       min_gain=cfg.louvain.min_gain)
        write_json(out / "louvain_summary.json", summary)
    with manifest.stage("profiles"):
        rows = []
        for cid in range(min(cfg.top_communities, part.community_count)):
            prof = community_profile(g, part, cid, loaded.catalog, cfg.top_n)
            write_json(out / "profiles" / f"community_{cid:03d}.json", prof.as_dict())
            rep = prof.metrics
            rows.append([cid, prof.size, rep.m, rep.transitivity, rep.avg_local_clustering,
                         rep.diameter if prof.giant_diameter is None else prof.giant_diameter,
                         prof.genres[0][0] if prof.genres else None])
        write_text(out / "communities.txt",
                   table(["community", "size", "edges", "transitivity", "avg local",
                          "diameter", "top genre"], rows))
    manifest.finish()
    return out


def cmd_cooccur(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir) / "cooccur"
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out / "manifest.json", "cooccur", cfg.as_dict(),
                        {"nodes": cfg.nodes_path})
    with manifest.stage("ingest"):
        schema = cfg.schema
        if not schema.genres_col:
            raise SchemaError("co-occurrence needs a genres column")
        catalog = load_catalog(_require(cfg.nodes_path, "nodes"), schema)
    with manifest.stage("cooccur"):
        net = build_cooccurrence(catalog, cfg.cooccur_threshold, cfg.cooccur_inclusive)
        write_text(out / "cooccurrence.csv", net.to_csv())
        top = top_genres_by_degree(net, cfg.top_n) if net.weights else []
        report = {
            "threshold": cfg.cooccur_threshold,
            "inclusive": cfg.cooccur_inclusive,
            "genres": len(net.genres),
            "raw_pairs": len(net.raw),
            "edges": len(net.weights),
            "top_genres": [
                {"genre": gname, "degree": deg,
                 "top_cooccurring": [[o, c] for o, c in top_cooccurring(net, gname, 10)]}
                for gname, deg in top
            ],
        }
        write_json(out / "cooccur_report.json", report)
        write_text(out / "top_genres.txt", table(["genre", "degree"], [list(t) for t in top]))
    manifest.finish()
    return out


def read_partition_csv(path, g: Graph) -> np.ndarray:
    assignment = np.full(g.n, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"artist_key", "community_id"} <= set(reader.fieldnames):
            raise SchemaError(f"{path}: expected columns artist_key, community_id")
        for row in reader:
            v = g.key_index.get(row["artist_key"])
            if v is not None:
                assignment[v] = int(row["community_id"])
    if (assignment < 0).any():
        raise AnalysisError(f"{path}: partition does not cover every exported node")
    return assignment


def export_graph(g: Graph, out: Path, fmt: str, communities: np.ndarray | None = None) -> list[Path]:
    src, dst = g.edge_array()
    if fmt == "edgelist-csv":
        nodes = io.StringIO()
        w = csv.writer(nodes, lineterminator="\n")
        w.writerow(["key", "degree"] + (["community_id"] if communities is not None else []))
        for v, key in enumerate(g.keys):
            row = [key, int(g.degrees[v])]
            if communities is not None:
                row.append(int(communities[v]))
            w.writerow(row)
        edges = io.StringIO()
        w = csv.writer(edges, lineterminator="\n")
        w.writerow(["source", "target"])
        for a, b in zip(src.tolist(), dst.tolist()):
            w.writerow([g.keys[a], g.keys[b]])
        return [write_text(out / "nodes.csv", nodes.getvalue()),
                write_text(out / "edges.csv", edges.getvalue())]
    if fmt == "json":
        doc = {
            "nodes": [
                {"key": key, "degree": int(g.degrees[v]),
                 **({"community_id": int(communities[v])} if communities is not None else {})}
                for v, key in enumerate(g.keys)
            ],
            "edges": [[g.keys[a], g.keys[b]] for a, b in zip(src.tolist(), dst.tolist())],
        }
        return [write_json(out / "graph.json", doc)]
    raise ConfigError(f"unknown export format {fmt!r}")


EXPORT_SCHEMA = SchemaConfig(id_col="key", name_col=None, genres_col=None, chart_hits_col=None,
                             popularity_col=None, followers_col=None, edge_source_col="source",
                             edge_target_col="target")


def cmd_export(cfg: RunConfig) -> Path:
    if cfg.export_format not in ("edgelist-csv", "json"):
        raise ConfigError(f"unknown export format {cfg.export_format!r}")
    out = Path(cfg.output_dir) / "export"
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out / "manifest.json", "export", cfg.as_dict(),
                        {"nodes": cfg.nodes_path, "edges": cfg.edges_path,
                         "partition": cfg.partition_path})
    loaded = load_inputs(cfg, manifest)
    g = _scope_graph(cfg, loaded)
    with manifest.stage("export"):
        comm = read_partition_csv(cfg.partition_path, g) if cfg.partition_path else None
        export_graph(g, out, cfg.export_format, comm)
    manifest.finish()
    return out


def cmd_genres(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir) / "genres"
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out / "manifest.json", "genres", cfg.as_dict(),
                        {"nodes": cfg.nodes_path, "edges": cfg.edges_path})
    if cfg.filters.active():
        loaded = load_inputs(cfg, manifest)
        catalog, g, scope = loaded.catalog, loaded.graph, filter_nodes(cfg, loaded)
    else:
        with manifest.stage("ingest"):
            catalog = load_catalog(_require(cfg.nodes_path, "nodes"), cfg.schema)
        g, scope = None, None
    with manifest.stage("genres"):
        hist = genre_histogram(catalog, scope, cfg.top_n, g)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["genre", "artists"])
        w.writerows(hist)
        write_text(out / "genres.csv", buf.getvalue())
        keys = catalog.records if scope is None else [g.keys[v] for v in scope]
        no_genre = sum(1 for k in keys if k not in catalog or not catalog[k].genres)
        write_json(out / "genres.json", {"scope": cfg.filters.label(),
                                         "artists_without_genre": no_genre,
                                         "top": [list(h) for h in hist]})
        write_text(out / "genres.txt", table(["genre", "artists"], [list(h) for h in hist]))
    manifest.finish()
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "louvain": cmd_louvain,
    "cooccur": cmd_cooccur,
    "export": cmd_export,
    "genres": cmd_genres,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="seed for random baselines and Louvain")
    common.add_argument("--out", metavar="DIR", help=f"output directory (env {OUT_ENV})")
    common.add_argument("--nodes", metavar="CSV", help="artist/node table")
    common.add_argument("--edges", metavar="CSV", help="collaboration/edge table")
    common.add_argument("--log-level", default="WARNING")
    filt = common.add_argument_group("filters")
    filt.add_argument("--seed-only", action="store_true", help="keep charting (seed) artists")
    filt.add_argument("--genre", metavar="TAG")
    filt.add_argument("--country", metavar="CODE", help="chart country code, e.g. us, gb, jp")
    filt.add_argument("--top-fraction", type=float, metavar="REAL")
    filt.add_argument("--top-n", type=int, help="rows in ranked reports (default 20)")

    parser = argparse.ArgumentParser(prog="collabnet",
                                     description="Small-world analysis of collaboration networks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="metrics, baselines, degree fit")
    p.add_argument("--kmin", type=int, help="smallest degree used in the power-law fit")
    p.add_argument("--er-instances", type=int, help="random baselines to average")
    p.add_argument("--no-full", action="store_true",
                   help="skip the full-graph giant component (filtered subgraph only)")

    p = sub.add_parser("louvain", parents=[common], help="Louvain communities and profiles")
    p.add_argument("--top-communities", type=int, help="profiles to emit (default 20)")
    p.add_argument("--min-gain", type=float)
    p.add_argument("--max-passes", type=int)

    p = sub.add_parser("cooccur", parents=[common], help="genre co-occurrence network")
    p.add_argument("--threshold", type=int, help="keep pairs with count > threshold (default 5)")
    p.add_argument("--inclusive", action="store_true", help="keep count >= threshold instead")

    p = sub.add_parser("export", parents=[common], help="write node and edge files")
    p.add_argument("--format", choices=["edgelist-csv", "json"])
    p.add_argument("--partition", metavar="CSV", help="partition.csv from the louvain verb")

    sub.add_parser("genres", parents=[common], help="genre histogram")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        out = COMMANDS[args.command](cfg)
    except (ConfigError, SchemaError) as exc:
        print(f"collabnet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"collabnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AnalysisError, LookupError, ValueError) as exc:
        print(f"collabnet: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

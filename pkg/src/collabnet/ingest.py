"""Node/edge CSV loading and catalog-driven node filters.

The default :class:`SchemaConfig` matches the public Spotify feature
collaboration dump: ``nodes.csv`` with list-literal ``genres`` and
``chart_hits`` cells (``"['us (4)', 'gb (2)']"``) and ``edges.csv`` with
``id_0``/``id_1`` columns.
"""
from __future__ import annotations

import ast
import csv
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import SchemaError
from .graph import Graph, NodeSet, keys_to_node_set

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemaConfig:
    """Column mapping and list-cell conventions for the input tables.

    Any column set to ``None`` is treated as absent. ``list_style`` is either
    ``"literal"`` (a bracketed, quoted Python/JSON list) or a single delimiter
    character such as ``"|"``.
    """

    id_col: str = "spotify_id"
    name_col: str | None = "name"
    genres_col: str | None = "genres"
    chart_hits_col: str | None = "chart_hits"
    popularity_col: str | None = "popularity"
    followers_col: str | None = "followers"
    edge_source_col: str = "id_0"
    edge_target_col: str = "id_1"
    list_style: str = "literal"
    chart_hit_pattern: str = r"^\s*(?P<country>[A-Za-z][A-Za-z_-]*)\s*\(\s*(?P<count>\d+)\s*\)\s*$"

    @classmethod
    def from_dict(cls, d: dict | None) -> "SchemaConfig":
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise SchemaError(f"unknown schema keys: {sorted(unknown)}")
        return cls(**d)

    def as_dict(self) -> dict:
        return asdict(self)

    def node_columns(self) -> list[str]:
        cols = [self.id_col, self.name_col, self.genres_col, self.chart_hits_col,
                self.popularity_col, self.followers_col]
        return [c for c in cols if c]


@dataclass(frozen=True)
class ArtistRecord:
    spotify_id: str
    name: str = ""
    genres: tuple[str, ...] = ()
    chart_hits: tuple[tuple[str, int], ...] = ()
    popularity: int | None = None
    followers: int | None = None

    @property
    def is_seed(self) -> bool:
        return bool(self.chart_hits)

    def countries(self) -> set[str]:
        return {c for c, _ in self.chart_hits}


@dataclass
class ArtistCatalog:
    records: dict[str, ArtistRecord]
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    rows_in: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, key: str) -> ArtistRecord:
        return self.records[key]

    def __contains__(self, key) -> bool:
        return key in self.records

    def ids(self) -> list[str]:
        return list(self.records)


class EdgeTable(list):
    """Raw ``(source, target)`` pairs in file order, plus rejected rows."""

    def __init__(self, pairs=(), rejected=None, rows_in=0):
        super().__init__(pairs)
        self.rejected = list(rejected or [])
        self.rows_in = rows_in


def _split_list(cell: str, style: str) -> list[str] | None:
    """Parse a list-valued cell; ``None`` means the cell was malformed."""
    cell = (cell or "").strip()
    if not cell:
        return []
    if style == "literal":
        try:
            value = ast.literal_eval(cell)
        except (ValueError, SyntaxError):
            return None
        if not isinstance(value, (list, tuple)) or not all(isinstance(x, str) for x in value):
            return None
        return list(value)
    return [tok for tok in cell.split(style)]


def parse_genres(cell: str, style: str = "literal") -> tuple[str, ...] | None:
    items = _split_list(cell, style)
    if items is None:
        return None
    seen = {}
    for tag in items:
        tag = tag.strip().lower()
        if tag:
            seen.setdefault(tag, None)
    return tuple(seen)


def parse_chart_hits(cell: str, pattern: re.Pattern, style: str = "literal"
                     ) -> tuple[tuple[str, int], ...] | None:
    items = _split_list(cell, style)
    if items is None:
        return None
    hits: Counter = Counter()
    for tok in items:
        if not tok.strip():
            continue
        match = pattern.match(tok)
        if match is None:
            return None
        count = int(match["count"])
        if count >= 1:
            hits[match["country"].lower()] += count
    return tuple(sorted(hits.items()))


def _optional_int(cell: str | None) -> int | None:
    if cell is None or not cell.strip():
        return None
    try:
        return int(float(cell))
    except ValueError:
        return None


def _check_header(path: Path, header: list[str] | None, required: Iterable[str]) -> None:
    if header is None:
        raise SchemaError(f"{path}: missing header row")
    for col in required:
        if col not in header:
            raise SchemaError(f"{path}: column {col!r} not found in header")


def load_catalog(nodes_path, cfg: SchemaConfig | None = None) -> ArtistCatalog:
    """Load the artist table.

    Rows with an empty or repeated id are rejected (first occurrence wins).
    Malformed genre or chart-hit cells become empty lists with a warning.
    """
    cfg = cfg or SchemaConfig()
    path = Path(nodes_path)
    pattern = re.compile(cfg.chart_hit_pattern)
    records: dict[str, ArtistRecord] = {}
    rejected: list[tuple[int, str]] = []
    rows_in = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(path, reader.fieldnames, cfg.node_columns())
        for row_no, row in enumerate(reader, start=2):
            rows_in += 1
            key = (row.get(cfg.id_col) or "").strip()
            if not key:
                rejected.append((row_no, "empty id"))
                continue
            if key in records:
                rejected.append((row_no, f"duplicate id {key}"))
                continue
            genres: tuple = ()
            if cfg.genres_col:
                genres = parse_genres(row[cfg.genres_col], cfg.list_style)
                if genres is None:
                    log.warning("%s row %d: malformed genres cell %r", path.name, row_no,
                                row[cfg.genres_col])
                    genres = ()
            hits: tuple = ()
            if cfg.chart_hits_col:
                hits = parse_chart_hits(row[cfg.chart_hits_col], pattern, cfg.list_style)
                if hits is None:
                    log.warning("%s row %d: malformed chart_hits cell %r", path.name, row_no,
                                row[cfg.chart_hits_col])
                    hits = ()
            records[key] = ArtistRecord(
                spotify_id=key,
                name=row[cfg.name_col] if cfg.name_col else "",
                genres=genres,
                chart_hits=hits,
                popularity=_optional_int(row.get(cfg.popularity_col)) if cfg.popularity_col else None,
                followers=_optional_int(row.get(cfg.followers_col)) if cfg.followers_col else None,
            )
    for row_no, reason in rejected:
        log.warning("%s row %d rejected: %s", path.name, row_no, reason)
    return ArtistCatalog(records, cfg, rows_in, rejected)


def load_edges(edges_path, cfg: SchemaConfig | None = None) -> EdgeTable:
    cfg = cfg or SchemaConfig()
    path = Path(edges_path)
    pairs = []
    rejected = []
    rows_in = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(path, reader.fieldnames, [cfg.edge_source_col, cfg.edge_target_col])
        for row_no, row in enumerate(reader, start=2):
            rows_in += 1
            a = (row.get(cfg.edge_source_col) or "").strip()
            b = (row.get(cfg.edge_target_col) or "").strip()
            if not a or not b:
                rejected.append((row_no, "missing endpoint"))
                log.warning("%s row %d rejected: missing endpoint", path.name, row_no)
                continue
            pairs.append((a, b))
    return EdgeTable(pairs, rejected, rows_in)


def _select(catalog: ArtistCatalog, g: Graph, pred) -> NodeSet:
    return keys_to_node_set(g, (k for k, rec in catalog.records.items() if pred(rec)))


def seed_artists(catalog: ArtistCatalog, g: Graph) -> NodeSet:
    """Nodes whose artist has at least one chart hit."""
    return _select(catalog, g, lambda rec: rec.is_seed)


def genre_set(catalog: ArtistCatalog, g: Graph, genre: str) -> NodeSet:
    tag = genre.strip().lower()
    if not tag:
        raise ValueError("genre must be non-empty")
    s = _select(catalog, g, lambda rec: tag in rec.genres)
    if len(s) == 0:
        log.info("genre %r matched no artists", tag)
    return s


def country_chart_set(catalog: ArtistCatalog, g: Graph, country: str) -> NodeSet:
    code = country.strip().lower()
    s = _select(catalog, g, lambda rec: any(c == code for c, _ in rec.chart_hits))
    if len(s) == 0:
        log.info("country %r matched no artists", code)
    return s


def genre_histogram(catalog: ArtistCatalog, scope: NodeSet | None = None, top_n: int = 20,
                    g: Graph | None = None) -> list[tuple[str, int]]:
    """Artists per genre tag, descending, ties alphabetical.

    ``scope`` restricts counting to a NodeSet of ``g``; ``None`` counts the
    whole catalog.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if scope is None:
        keys = catalog.records.keys()
    else:
        if g is None:
            raise ValueError("a graph is required to resolve a NodeSet scope")
        keys = (g.keys[i] for i in np.asarray(scope))
    counts: Counter = Counter()
    for key in keys:
        rec = catalog.records.get(key)
        if rec is not None:
            counts.update(rec.genres)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_n]

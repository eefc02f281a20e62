"""Genre co-occurrence network built from per-artist tag lists."""
from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .ingest import ArtistCatalog


@dataclass
class CooccurrenceNetwork:
    """Tag-pair counts over all artists.

    ``raw`` keeps every pair ever seen; ``weights`` holds only the pairs that
    pass the threshold (count > threshold, or >= when ``inclusive``). Pair
    keys are alphabetically ordered tuples.
    """

    raw: Counter
    threshold: int
    inclusive: bool = False
    weights: dict = field(init=False)
    genres: dict = field(init=False)
    _adj: dict = field(init=False, repr=False)

    def __post_init__(self):
        keep = (lambda c: c >= self.threshold) if self.inclusive else (lambda c: c > self.threshold)
        self.weights = {pair: c for pair, c in self.raw.items() if keep(c)}
        tags = sorted({t for pair in self.raw for t in pair})
        self.genres = {t: i for i, t in enumerate(tags)}
        adj = defaultdict(dict)
        for (a, b), c in self.weights.items():
            adj[a][b] = c
            adj[b][a] = c
        self._adj = dict(adj)

    def count(self, a: str, b: str) -> int:
        """Raw co-occurrence count, regardless of threshold."""
        return self.raw.get(tuple(sorted((a, b))), 0)

    def neighbors(self, genre: str) -> dict[str, int]:
        return dict(self._adj.get(genre, {}))

    def degree(self, genre: str) -> int:
        return len(self._adj.get(genre, ()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["genre_a", "genre_b", "count"])
        for (a, b), c in sorted(self.weights.items(), key=lambda kv: (-kv[1], kv[0])):
            w.writerow([a, b, c])
        return buf.getvalue()


def build_cooccurrence(catalog: ArtistCatalog, threshold: int = 5,
                       inclusive: bool = False) -> CooccurrenceNetwork:
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    raw: Counter = Counter()
    for rec in catalog.records.values():
        if len(rec.genres) >= 2:
            raw.update(combinations(sorted(rec.genres), 2))
    return CooccurrenceNetwork(raw, threshold, inclusive)


def top_genres_by_degree(net: CooccurrenceNetwork, n: int = 10) -> list[tuple[str, int]]:
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(((g, len(nb)) for g, nb in net._adj.items()), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


def top_cooccurring(net: CooccurrenceNetwork, genre: str, n: int = 10) -> list[tuple[str, int]]:
    if genre not in net.genres:
        raise LookupError(f"genre {genre!r} not in co-occurrence network")
    ranked = sorted(net.neighbors(genre).items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]

"""Small-world analysis toolkit for artist collaboration networks."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    ComponentLabeling,
    Graph,
    build_graph,
    connected_components,
    degree,
    giant_component,
    induced_subgraph,
    top_fraction_by_degree,
)
from .metrics import (  # noqa: E402
    avg_local_clustering,
    degree_distribution,
    density,
    diameter_exact,
    fit_power_law,
    summarize,
    transitivity,
)
from .baselines import (  # noqa: E402
    compare_small_world,
    lattice_diameter_analytic,
    lattice_k_for_density,
    matched_er,
    ring_lattice,
    LatticeSpec,
)
from .community import LouvainConfig, Partition, louvain, modularity  # noqa: E402
from .cooccur import build_cooccurrence, top_cooccurring, top_genres_by_degree  # noqa: E402
from .ingest import (  # noqa: E402
    SchemaConfig,
    country_chart_set,
    genre_histogram,
    genre_set,
    load_catalog,
    load_edges,
    seed_artists,
)

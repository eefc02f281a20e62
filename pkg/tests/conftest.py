from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

from collabnet.graph import build_graph

from oracles import keyed


def make_graph(n, edges):
    """Graph whose NodeIds coincide with the integer labels used in ``edges``."""
    g, _ = build_graph(keyed(edges), [str(i) for i in range(n)])
    return g


K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
STAR5_EDGES = [(0, i) for i in range(1, 6)]


@pytest.fixture
def k4():
    return make_graph(4, K4_EDGES)


@pytest.fixture
def star5():
    return make_graph(6, STAR5_EDGES)


NODES_HEADER = "spotify_id,name,followers,popularity,genres,chart_hits\n"


def write_toy_dataset(tmp: Path) -> tuple[Path, Path]:
    """Six artists, two countries, a triangle plus a pendant path and an isolated node."""
    nodes = tmp / "nodes.csv"
    edges = tmp / "edges.csv"
    nodes.write_text(
        NODES_HEADER
        + "a1,Alpha,1000.0,80,\"['pop', 'dance pop']\",\"['us (3)', 'gb (1)']\"\n"
        + "a2,Beta,500.0,70,\"['pop']\",\"['us (1)']\"\n"
        + "a3,Gamma,20.0,40,\"['rap', 'pop']\",\"['jp (2)']\"\n"
        + "a4,\"Delta, the Band\",10.0,30,\"['rap']\",\n"
        + "a5,Epsilon,,,[],\n"
        + "a6,Zeta,3.0,1,\"['jazz']\",\n",
        encoding="utf-8",
    )
    edges.write_text(
        "id_0,id_1\n"
        "a1,a2\n"
        "a2,a3\n"
        "a3,a1\n"
        "a3,a4\n"
        "a4,a5\n"
        "a2,a1\n",
        encoding="utf-8",
    )
    return nodes, edges


@pytest.fixture
def toy_dataset(tmp_path):
    return write_toy_dataset(tmp_path)


def dataset_dir() -> Path | None:
    d = os.environ.get("COLLABNET_DATA")
    if not d:
        return None
    p = Path(d)
    if not (p / "nodes.csv").exists() or not (p / "edges.csv").exists():
        return None
    return p


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, status, detail in acceptance.RESULTS:
        terminalreporter.write_line(f"[{status}] criterion {cid}: {detail}")

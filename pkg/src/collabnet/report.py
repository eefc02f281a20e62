"""Output writers: JSON/CSV files, aligned text tables and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import platform
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, default=_default) + "\n"


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        if value != 0 and (abs(value) < 1e-3 or abs(value) >= 1e6):
            return f"{value:.4e}"
        return f"{value:.5f}"
    return str(value)


def table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for j, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(row, widths))).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def comparison_table(cmp: dict) -> str:
    """Graph vs matched random graph vs matched ring lattice, one row per metric."""
    t = cmp["target"]
    er = cmp["er"]["metrics"] or {}
    lat = cmp["lattice"]["metrics"] or {}
    rows = []
    for key, label in [("n", "nodes"), ("m", "edges"), ("density", "density"),
                       ("transitivity", "clustering (transitivity)"),
                       ("avg_local_clustering", "clustering (avg local)"),
                       ("diameter", "diameter")]:
        rows.append([label, t.get(key), er.get(key), lat.get(key)])
    rows.append(["lattice k", None, None, cmp["lattice"].get("k")])
    rows.append(["random seed", None, cmp["er"].get("seed"), None])
    return table(["metric", "graph", "random (ER)", "ring lattice"], rows)


def degree_fit_points(dist, fit) -> str:
    """log-log points plus fitted values, for external plotting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "count", "log10_degree", "log10_count", "log10_fitted", "in_fit"])
    lo, hi = fit.fit_range if fit else (None, None)
    for k, c in dist.counts.items():
        if k < 1 or c < 1:
            continue
        lk = math.log10(k)
        fitted = fit.log_intercept - fit.gamma * lk if fit else None
        w.writerow([k, c, repr(lk), repr(math.log10(c)),
                    repr(fitted) if fitted is not None else "",
                    int(fit is not None and lo <= k <= hi)])
    return buf.getvalue()


class Manifest:
    """Run manifest, rewritten to disk after every stage.

    Everything except ``timings_s`` is a pure function of config and inputs.
    """

    def __init__(self, path: Path, command: str, config: dict, inputs: dict[str, str]):
        self.path = path
        self.data = {
            "toolkit": "collabnet",
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "command": command,
            "config": config,
            "inputs": {name: {"path": str(p), "sha256": sha256_file(p)}
                       for name, p in inputs.items() if p is not None},
            "status": "running",
            "failed_stage": None,
            "error": None,
            "cleaning": None,
            "stages": [],
            "timings_s": {},
        }
        self.flush()

    def flush(self):
        write_json(self.path, self.data)

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            self.data["status"] = "failed"
            self.data["failed_stage"] = name
            self.data["error"] = f"{type(exc).__name__}: {exc}"
            raise
        finally:
            self.data["timings_s"][name] = round(time.perf_counter() - t0, 4)
            self.data["stages"].append(name)
            self.flush()

    def finish(self):
        if self.data["status"] == "running":
            self.data["status"] = "ok"
        self.flush()

"""Readers for the harness artifact schemas.

Snapshot files are CSV with header ``t,x,u`` and one row per (time, cell).
``metrics.csv`` is a flat table with a ``metric`` column; ``summary.json``
holds fits, gaps, and jump locations keyed by preset-specific sections.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import MissingSeries, SchemaError

SNAPSHOT_PATTERN = re.compile(r"snapshots_(?P<tag>.+)\.csv$")


def read_snapshots(path) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Parse one snapshot CSV into {time: (x, u)} with times in file order."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"snapshot file {path} does not exist")
    try:
        raw = np.genfromtxt(path, delimiter=",", names=True)
    except (ValueError, OSError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if raw.size == 0:
        raise SchemaError(f"{path}: no data rows")
    names = raw.dtype.names
    if names != ("t", "x", "u"):
        raise SchemaError(f"{path}: header {names}, expected ('t', 'x', 'u')")
    if not (np.all(np.isfinite(raw["x"])) and np.all(np.isfinite(raw["u"]))):
        raise SchemaError(f"{path}: non-finite entries")

    out: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for t in np.unique(raw["t"]):
        rows = raw["t"] == t
        out[float(t)] = (raw["x"][rows], raw["u"][rows])
    return out


def discover_series(input_dir) -> dict[str, Path]:
    """Map snapshot tags to files in an artifact directory."""
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise SchemaError(f"artifact directory {input_dir} does not exist")
    series = {}
    for path in sorted(input_dir.glob("snapshots_*.csv")):
        match = SNAPSHOT_PATTERN.match(path.name)
        if match:
            series[match.group("tag")] = path
    return series


def eps_series_tags(series: dict[str, Path]) -> list[str]:
    """Tags of plain sharp-epsilon runs (e-<j>), ordered by decreasing eps."""
    tags = []
    for tag in series:
        m = re.fullmatch(r"e-(\d+)", tag)
        if m:
            tags.append((int(m.group(1)), tag))
    return [t for _, t in sorted(tags)]


def read_summary(input_dir) -> dict:
    path = Path(input_dir) / "summary.json"
    if not path.is_file():
        raise SchemaError(f"summary file {path} does not exist")
    try:
        summary = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not isinstance(summary, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return summary


def read_metric_rows(input_dir, metric: str) -> list[dict]:
    path = Path(input_dir) / "metrics.csv"
    if not path.is_file():
        raise SchemaError(f"metrics file {path} does not exist")
    with path.open() as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "metric" not in reader.fieldnames:
            raise SchemaError(f"{path}: missing 'metric' column")
        rows = [row for row in reader if row["metric"] == metric]
    if not rows:
        raise MissingSeries(f"{path}: no rows with metric={metric!r}")
    return rows

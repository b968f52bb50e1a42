"""Figure recipes and deterministic rendering.

Each recipe names an artifact directory and an output image.  Rendering is
strictly a read-and-draw operation: nothing is simulated or fitted here, and
missing inputs raise instead of being regenerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .artifacts import (  # noqa: E402
    discover_series,
    eps_series_tags,
    read_metric_rows,
    read_snapshots,
    read_summary,
)
from .errors import MissingSeries, SchemaError  # noqa: E402

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5")

# Fixed rendering parameters keep repeated renders byte-identical.
FIGSIZE = (9.0, 4.0)
DPI = 120
PNG_METADATA = {"Software": None}


@dataclass(frozen=True)
class FigureRecipe:
    """What to draw: figure id, artifact directory, output image, zoom."""

    figure: str
    input_dir: str
    output: str
    zoom_center: float = 1.0
    zoom_halfwidth: float = 0.05

    def __post_init__(self) -> None:
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"figure must be one of {FIGURE_IDS}, "
                             f"got {self.figure!r}")


def load_figure_data(recipe: FigureRecipe) -> dict:
    """Assemble and validate everything a figure needs from the artifacts."""
    series = discover_series(recipe.input_dir)
    if recipe.figure == "fig2":
        tags = eps_series_tags(series)
        if not tags:
            raise MissingSeries("no sharp-epsilon snapshot series found")
        return {"series": {tag: read_snapshots(series[tag]) for tag in tags}}

    if recipe.figure == "fig3":
        tags = eps_series_tags(series)
        if not tags:
            raise MissingSeries("no sharp-epsilon snapshot series found")
        if "neumann" not in series:
            raise MissingSeries("snapshots_neumann.csv is required")
        return {
            "series": {tag: read_snapshots(series[tag]) for tag in tags},
            "neumann": read_snapshots(series["neumann"]),
        }

    if recipe.figure == "fig4":
        rows = read_metric_rows(recipe.input_dir, "gradient_decay")
        summary = read_summary(recipe.input_dir)
        fits = summary.get("fits")
        if not isinstance(fits, dict) or not fits:
            raise SchemaError("summary.json lacks the 'fits' section")
        table: dict[float, list[tuple[float, float]]] = {}
        try:
            for row in rows:
                table.setdefault(float(row["t"]), []).append(
                    (float(row["eps"]), float(row["value"])))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"gradient_decay rows malformed: {exc}") from exc
        lines = {}
        for t in table:
            key = f"t={t:g}"
            if key not in fits:
                raise SchemaError(f"summary.json fits missing {key!r}")
            fit = fits[key]
            if not {"a", "b"} <= set(fit):
                raise SchemaError(f"fit {key!r} lacks 'a'/'b'")
            lines[t] = (float(fit["a"]), float(fit["b"]))
        for points in table.values():
            points.sort(key=lambda p: p[0])
        return {"table": table, "lines": lines}

    # fig5
    tags = eps_series_tags(series)
    if not tags:
        raise MissingSeries("no sharp-epsilon snapshot series found")
    tag = tags[-1]  # the smallest epsilon in the directory
    return {"tag": tag, "snapshots": read_snapshots(series[tag])}


def fit_line_values(a: float, b: float, eps: np.ndarray) -> np.ndarray:
    """Points on the fitted decay law exp(b) * eps^a."""
    return np.exp(b) * np.asarray(eps, dtype=float) ** a


def _final_time(snapshots: dict) -> float:
    return max(snapshots)


def render(recipe: FigureRecipe) -> Path:
    """Draw the figure and return the written path."""
    data = load_figure_data(recipe)
    fig = plt.figure(figsize=FIGSIZE)

    if recipe.figure == "fig2":
        ax_half = fig.add_subplot(1, 2, 1)
        ax_zoom = fig.add_subplot(1, 2, 2)
        lo = recipe.zoom_center - recipe.zoom_halfwidth
        hi = recipe.zoom_center + recipe.zoom_halfwidth
        for tag, snaps in data["series"].items():
            t = _final_time(snaps)
            x, u = snaps[t]
            ax_half.plot(x, u, label=tag, linewidth=1.0)
            zoom = (x >= lo) & (x <= hi)
            ax_zoom.plot(x[zoom], u[zoom], linewidth=1.0)
        ax_half.set_xlim(0.0, x.max() / 2.0 + x.min())
        ax_half.set_xlabel("x")
        ax_half.set_ylabel("u")
        ax_half.set_title("final snapshots, half domain")
        ax_half.legend(fontsize=8)
        ax_zoom.set_xlim(lo, hi)
        ax_zoom.set_xlabel("x")
        ax_zoom.set_title("interface zoom")

    elif recipe.figure == "fig3":
        ax = fig.add_subplot(1, 1, 1)
        for tag, snaps in data["series"].items():
            t = _final_time(snaps)
            x, u = snaps[t]
            ax.plot(x, u, label=tag, linewidth=1.0)
        xn, un = data["neumann"][_final_time(data["neumann"])]
        ax.plot(xn, un, "k--", label="zero-flux limit", linewidth=1.4)
        ax.set_xlim(xn.min(), xn.max())
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.set_title("inner-region profiles vs the zero-flux limit")
        ax.legend(fontsize=8)

    elif recipe.figure == "fig4":
        ax_lin = fig.add_subplot(1, 2, 1)
        ax_log = fig.add_subplot(1, 2, 2)
        for t in sorted(data["table"]):
            pts = np.array(data["table"][t])
            eps, grads = pts[:, 0], pts[:, 1]
            ax_lin.plot(eps, grads, "o-", markersize=3, label=f"t={t:g}")
            ax_log.plot(eps, grads, "o", markersize=4)
            a, b = data["lines"][t]
            ax_log.plot(eps, fit_line_values(a, b, eps), "-", linewidth=1.0,
                        label=f"t={t:g}: a={a:.4f}")
        ax_lin.set_xlabel("epsilon")
        ax_lin.set_ylabel("|du/dx| at the interface, inner side")
        ax_lin.legend(fontsize=8)
        ax_log.set_xscale("log")
        ax_log.set_yscale("log")
        ax_log.set_xlabel("epsilon (log)")
        ax_log.set_title("log-log with fitted lines")
        ax_log.legend(fontsize=8)

    else:  # fig5
        ax = fig.add_subplot(1, 1, 1)
        for t in sorted(data["snapshots"]):
            x, u = data["snapshots"][t]
            ax.plot(x, u, label=f"t={t:g}", linewidth=1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.set_title(f"long-time snapshots ({data['tag']})")
        ax.legend(fontsize=8)

    fig.tight_layout()
    out = Path(recipe.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=DPI, metadata=PNG_METADATA)
    plt.close(fig)
    return out

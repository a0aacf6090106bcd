"""Render sweep CSVs from the arraynmi CLI into figure images.

Three recipes mirror the standard studies:

  nmi-vs-m       one panel per input CSV, NMI vs antenna count (log y)
  two-ray        azimuth-only / elevation-only / joint offset panels (log y)
  nmi-sinr-vs-d  NMI (log y) and mean MMSE SINR in dB (linear y) vs D

Input CSVs are consumed read-only through their canonical headers; rendering
the same inputs twice produces byte-identical images.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

TOPOLOGY_STYLE = {
    "ULA": dict(color="tab:blue", marker="o"),
    "HURA": dict(color="tab:orange", marker="s"),
    "VURA": dict(color="tab:green", marker="^"),
    "UCirA": dict(color="tab:red", marker="d"),
    "UCylA": dict(color="tab:purple", marker="v"),
}
FALLBACK_STYLE = dict(color="tab:gray", marker="x")

RECIPES = ("nmi-vs-m", "two-ray", "nmi-sinr-vs-d")


@dataclass(frozen=True)
class FigureRecipe:
    """One figure: a recipe name, its input CSVs, and the output image path."""

    name: str
    inputs: tuple[str, ...]
    output: str
    panel_titles: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.name not in RECIPES:
            raise ValueError(f"unknown recipe {self.name!r}; choose from {RECIPES}")
        if not self.inputs:
            raise ValueError("recipe needs at least one input CSV")


class RenderError(RuntimeError):
    pass


def _load_csv(path: str, required: set[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"{path}: empty file")
        missing = required - set(reader.fieldnames)
        if missing:
            raise RenderError(f"{path}: missing columns {sorted(missing)}")
        rows = list(reader)
    if not rows:
        raise RenderError(f"{path}: no data rows")
    return rows


def _topologies(rows: list[dict]) -> list[str]:
    seen = []
    for row in rows:
        t = row["topology"]
        if t not in seen:
            seen.append(t)
    return seen


def _style(topology: str) -> dict:
    return TOPOLOGY_STYLE.get(topology, FALLBACK_STYLE)


def _series(rows, topology, xcol, ycol, keep=lambda r: True):
    pts = [(float(r[xcol]), float(r[ycol]))
           for r in rows if r["topology"] == topology and keep(r)]
    pts.sort()
    return [p[0] for p in pts], [p[1] for p in pts]


def _build_nmi_vs_m(recipe: FigureRecipe):
    fig, axes = plt.subplots(1, len(recipe.inputs),
                             figsize=(5.2 * len(recipe.inputs), 4.2), squeeze=False)
    labels = []
    for ax, path in zip(axes[0], recipe.inputs):
        rows = _load_csv(path, {"topology", "M", "kappa_closed"})
        for topo in _topologies(rows):
            x, y = _series(rows, topo, "M", "kappa_closed")
            label = topo if topo not in labels else None
            if label:
                labels.append(topo)
            ax.semilogy(x, y, label=label, **_style(topo))
        ax.set_xlabel("antennas M")
        ax.set_ylabel("NMI")
        ax.grid(True, which="both", alpha=0.3)
    for ax, title in zip(axes[0], recipe.panel_titles):
        ax.set_title(title)
    fig.legend(loc="upper center", ncol=min(len(labels), 5))
    return fig, labels


def _build_two_ray(recipe: FigureRecipe):
    rows = _load_csv(recipe.inputs[0],
                     {"topology", "dphi_deg", "dtheta_deg", "I_normalized"})
    cases = [
        ("azimuth offset", "dphi_deg", lambda r: float(r["dtheta_deg"]) == 0.0),
        ("elevation offset", "dtheta_deg", lambda r: float(r["dphi_deg"]) == 0.0),
        ("joint offset", "dphi_deg",
         lambda r: float(r["dphi_deg"]) == float(r["dtheta_deg"])),
    ]
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 9.6), sharex=True)
    labels = []
    for ax, (title, xcol, keep) in zip(axes, cases):
        for topo in _topologies(rows):
            x, y = _series(rows, topo, xcol, "I_normalized", keep)
            label = topo if topo not in labels else None
            if label:
                labels.append(topo)
            ax.semilogy(x, y, label=label, markersize=3, **_style(topo))
        ax.set_title(title)
        ax.set_ylabel("two-ray interference / M^2")
        ax.grid(True, which="both", alpha=0.3)
    axes[-1].set_xlabel("offset (degrees)")
    fig.legend(loc="upper center", ncol=min(len(labels), 5))
    return fig, labels


def _build_nmi_sinr_vs_d(recipe: FigureRecipe):
    rows = _load_csv(recipe.inputs[0],
                     {"topology", "D", "kappa_closed", "sinr_db_mean"})
    fig, (ax_k, ax_s) = plt.subplots(1, 2, figsize=(10.4, 4.2))
    labels = []
    for topo in _topologies(rows):
        x, k = _series(rows, topo, "D", "kappa_closed")
        _, s = _series(rows, topo, "D", "sinr_db_mean")
        ax_k.semilogy(x, k, label=topo, **_style(topo))
        ax_s.plot(x, s, **_style(topo))
        labels.append(topo)
    ax_k.set_xlabel("constraint diagonal D (wavelengths)")
    ax_k.set_ylabel("NMI")
    ax_s.set_xlabel("constraint diagonal D (wavelengths)")
    ax_s.set_ylabel("mean MMSE SINR (dB)")
    for ax in (ax_k, ax_s):
        ax.grid(True, which="both", alpha=0.3)
    fig.legend(loc="upper center", ncol=min(len(labels), 5))
    return fig, labels


_BUILDERS = {
    "nmi-vs-m": _build_nmi_vs_m,
    "two-ray": _build_two_ray,
    "nmi-sinr-vs-d": _build_nmi_sinr_vs_d,
}


def build_figure(recipe: FigureRecipe):
    """Build the matplotlib figure; returns (figure, legend_labels)."""
    return _BUILDERS[recipe.name](recipe)


def render(recipe: FigureRecipe) -> str:
    """Render the recipe to its output image; returns the output path."""
    fig, _ = build_figure(recipe)
    try:
        fig.savefig(recipe.output, dpi=120)
    finally:
        plt.close(fig)
    return recipe.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotrender",
                                     description="Figures from arraynmi CSV sweeps")
    parser.add_argument("--recipe", required=True, choices=RECIPES)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV path(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--panel-title", action="append", default=[],
                        help="optional per-panel title (repeatable)")
    args = parser.parse_args(argv)
    recipe = FigureRecipe(name=args.recipe, inputs=tuple(args.inputs),
                          output=args.out,
                          panel_titles=tuple(args.panel_title))
    try:
        out = render(recipe)
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

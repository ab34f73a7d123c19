"""Figure renderers for degenspin sweep outputs.

This package never recomputes physics: every figure is a pure function of
the CSV files a sweep wrote.  Rendering is deterministic (fixed canvas,
fixed fonts, fixed SVG hash salt), so the same inputs give the same bytes.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "degenspin-plots"
matplotlib.rcParams["figure.figsize"] = (6.4, 4.2)
matplotlib.rcParams["figure.dpi"] = 120
matplotlib.rcParams["savefig.dpi"] = 120

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "FigureError", "FIGURE_KINDS", "render"]

FIGURE_KINDS = (
    "spectrum",
    "entropy_hist",
    "entropy_vs_field",
    "invariance_compare",
    "observables_panel",
    "magnetization",
)

# phase-region shading defaults (field windows and colors), overridable per
# spec via style["regions"] = [[h_lo, h_hi, color], ...]
_DEFAULT_REGIONS: list = []


class FigureError(ValueError):
    """Unrenderable figure spec: bad kind, missing file or column, no data."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: kind, input CSV paths, output image path, style options."""

    kind: str
    inputs: tuple
    output: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; know {FIGURE_KINDS}")
        if not self.inputs:
            raise FigureError("figure spec needs at least one input CSV")

    @classmethod
    def from_json_dict(cls, payload: dict) -> "FigureSpec":
        extra = set(payload) - {"kind", "inputs", "output", "style"}
        if extra:
            raise FigureError(f"unknown figure-spec keys: {sorted(extra)}")
        try:
            return cls(
                kind=payload["kind"],
                inputs=tuple(payload["inputs"]),
                output=payload["output"],
                style=dict(payload.get("style", {})),
            )
        except KeyError as e:
            raise FigureError(f"figure spec missing key {e.args[0]!r}") from None


def _read_csv(path: str, required: tuple) -> dict:
    """Columns as float arrays; text columns stay strings."""
    if not os.path.exists(path):
        raise FigureError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureError(f"empty CSV (no header): {path}") from None
        rows = [r for r in reader if r]
    missing = [c for c in required if c not in header]
    if missing:
        raise FigureError(f"{path}: missing columns {missing} (has {header})")
    if not rows:
        raise FigureError(f"{path}: no data rows")
    cols: dict = {}
    for idx, name in enumerate(header):
        values = [r[idx] for r in rows]
        try:
            cols[name] = np.array([float(v) if v != "" else np.nan for v in values])
        except ValueError:
            cols[name] = np.array(values, dtype=object)
    cols["__header__"] = header
    return cols


def _finish(fig, spec: FigureSpec) -> str:
    out_dir = os.path.dirname(spec.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.output, metadata=_strip_metadata(spec.output))
    plt.close(fig)
    return spec.output


def _strip_metadata(path: str):
    # keep image bytes reproducible across runs
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": None}
    return None


def _shade_regions(ax, style: dict):
    for lo, hi, color in style.get("regions", _DEFAULT_REGIONS):
        ax.axvspan(float(lo), float(hi), color=color, alpha=0.25, linewidth=0)


def _render_spectrum(spec: FigureSpec):
    cols = _read_csv(spec.inputs[0], ("h",))
    level_names = [c for c in cols["__header__"] if c.startswith("e") and c[1:].isdigit()]
    if not level_names:
        raise FigureError(f"{spec.inputs[0]}: no energy columns e0, e1, ...")
    h = cols["h"]
    e0 = cols["e0"]
    fig, ax = plt.subplots()
    _shade_regions(ax, spec.style)
    for name in level_names:
        ax.plot(h, cols[name] - e0, ".-", markersize=3, linewidth=0.7)
    ax.set_xlabel("magnetic field h")
    ax.set_ylabel(r"$E_i - E_0$")
    ax.set_title(spec.style.get("title", "low-lying eigenspectrum"))
    return _finish(fig, spec)


def _render_entropy_hist(spec: FigureSpec):
    fig, ax = plt.subplots()
    for path in spec.inputs:
        cols = _read_csv(path, ("bin_left", "bin_right", "probability"))
        centers = (cols["bin_left"] + cols["bin_right"]) / 2.0
        width = (cols["bin_right"] - cols["bin_left"]).mean()
        label = spec.style.get("labels", {}).get(path, os.path.basename(path))
        ax.bar(centers, cols["probability"], width=width * 0.95, alpha=0.6, label=label)
    ax.set_xlabel(r"$S_{vN}$ (bits)")
    ax.set_ylabel("probability")
    ax.set_title(spec.style.get("title", "entanglement-entropy distribution"))
    if len(spec.inputs) > 1:
        ax.legend()
    return _finish(fig, spec)


def _render_entropy_vs_field(spec: FigureSpec):
    cols = _read_csv(spec.inputs[0], ("h", "mean_bits", "std_bits"))
    fig, ax = plt.subplots()
    _shade_regions(ax, spec.style)
    has_spread = cols["std_bits"] > 0
    ax.errorbar(
        cols["h"][has_spread],
        cols["mean_bits"][has_spread],
        yerr=cols["std_bits"][has_spread],
        fmt="o",
        markersize=4,
        capsize=3,
        label="degenerate ensemble (mean ± std)",
    )
    if (~has_spread).any():
        ax.plot(
            cols["h"][~has_spread],
            cols["mean_bits"][~has_spread],
            "s",
            markersize=4,
            label="unique ground state",
        )
    ax.set_xlabel("magnetic field h")
    ax.set_ylabel(r"$S_{vN}$ (bits)")
    ax.set_title(spec.style.get("title", "entanglement entropy vs field"))
    ax.legend()
    return _finish(fig, spec)


def _render_invariance_compare(spec: FigureSpec):
    if len(spec.inputs) < 2:
        raise FigureError("invariance_compare needs two entropy-sample CSVs")
    bins = int(spec.style.get("bins", 50))
    fig, ax = plt.subplots()
    for path in spec.inputs:
        cols = _read_csv(path, ("sample_index", "entropy_bits"))
        s = cols["entropy_bits"]
        counts, edges = np.histogram(s, bins=bins, range=(0.0, max(1.0, s.max())))
        centers = (edges[:-1] + edges[1:]) / 2.0
        label = spec.style.get("labels", {}).get(path, os.path.basename(path))
        ax.step(centers, counts / s.size, where="mid", label=label)
    ax.set_xlabel(r"$S_{vN}$ (bits)")
    ax.set_ylabel("probability")
    ax.set_title(spec.style.get("title", "entropy distributions, two bases"))
    ax.legend()
    return _finish(fig, spec)


def _render_observables_panel(spec: FigureSpec):
    cols = _read_csv(spec.inputs[0], ("h", "Q_psi", "gamma2_nn", "gamma2_nnn", "gamma3", "S_mean"))
    panels = [
        ("S_mean", r"$\bar S_{vN}$"),
        ("Q_psi", r"$Q$"),
        ("gamma2_nn", r"$\Gamma^{zz}$ nn"),
        ("gamma2_nnn", r"$\Gamma^{zz}$ nnn"),
        ("gamma3", r"$\Gamma^{zzz}$"),
    ]
    fig, axes = plt.subplots(len(panels), 1, sharex=True, figsize=(6.4, 9.0))
    for ax, (name, label) in zip(axes, panels):
        _shade_regions(ax, spec.style)
        good = ~np.isnan(cols[name])
        ax.plot(cols["h"][good], cols[name][good], ".-", markersize=4)
        ax.set_ylabel(label)
        ax.axhline(0.0, color="gray", linewidth=0.5)
    axes[-1].set_xlabel("magnetic field h")
    axes[0].set_title(spec.style.get("title", "chirality and correlators"))
    return _finish(fig, spec)


def _render_magnetization(spec: FigureSpec):
    cols = _read_csv(spec.inputs[0], ("h", "exact_avg", "shot_avg"))
    fig, ax = plt.subplots()
    _shade_regions(ax, spec.style)
    ax.plot(cols["h"], cols["exact_avg"], "-", label="exact degenerate average")
    ax.plot(cols["h"], cols["shot_avg"], "o", markersize=5, fillstyle="none",
            label="single-shot estimate")
    ax.set_xlabel("magnetic field h")
    ax.set_ylabel(r"site-averaged $\langle S^\mu \rangle$")
    ax.set_title(spec.style.get("title", "magnetization: exact vs single shot"))
    ax.legend()
    return _finish(fig, spec)


_RENDERERS = {
    "spectrum": _render_spectrum,
    "entropy_hist": _render_entropy_hist,
    "entropy_vs_field": _render_entropy_vs_field,
    "invariance_compare": _render_invariance_compare,
    "observables_panel": _render_observables_panel,
    "magnetization": _render_magnetization,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path.

    All inputs are validated before anything is written, so a failed render
    never leaves a partial file behind.
    """
    return _RENDERERS[spec.kind](spec)

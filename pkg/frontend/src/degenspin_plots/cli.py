"""Command line for rendering degenspin figures.

    plots render <figure_spec.json>
    plots all <run_dir> [--out DIR] [--format svg|png]

`render` draws a single figure from an explicit spec; `all` walks a sweep
output directory and renders every figure its files support.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

from .figures import FigureError, FigureSpec, render

__all__ = ["main", "render_run_dir"]


def render_run_dir(run_dir: str, out_dir: str | None = None, fmt: str = "svg") -> list:
    """Render every known figure for a sweep directory; returns output paths."""
    if not os.path.isdir(run_dir):
        raise FigureError(f"not a run directory: {run_dir}")
    out_dir = out_dir or os.path.join(run_dir, "figures")
    made = []

    def path(name):
        return os.path.join(run_dir, name)

    def out(name):
        return os.path.join(out_dir, f"{name}.{fmt}")

    if os.path.exists(path("energies.csv")):
        made.append(render(FigureSpec("spectrum", (path("energies.csv"),), out("spectrum"))))
    if os.path.exists(path("entropy.csv")):
        made.append(
            render(FigureSpec("entropy_vs_field", (path("entropy.csv"),), out("entropy_vs_field")))
        )
    hists = sorted(glob.glob(path("entropy_hist_*.csv")))
    if hists:
        picks = [hists[0]] if len(hists) == 1 else [hists[0], hists[-1]]
        made.append(render(FigureSpec("entropy_hist", tuple(picks), out("entropy_hist"))))
    if os.path.exists(path("observables.csv")):
        made.append(
            render(
                FigureSpec("observables_panel", (path("observables.csv"),), out("observables_panel"))
            )
        )
    if os.path.exists(path("magnetization.csv")):
        made.append(
            render(FigureSpec("magnetization", (path("magnetization.csv"),), out("magnetization")))
        )
    # basis-comparison samples, as written by the invariance demo
    for law in ("haar_gaussian", "uniform_box"):
        pair = [path(f"entropy_samples_{law}_{v}.csv") for v in ("d", "e")]
        if all(os.path.exists(p) for p in pair):
            made.append(
                render(FigureSpec("invariance_compare", tuple(pair), out(f"invariance_{law}")))
            )
    if not made:
        raise FigureError(f"{run_dir}: no renderable files found")
    return made


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render one figure from a JSON spec")
    p_render.add_argument("spec", help="path to a figure-spec JSON")

    p_all = sub.add_parser("all", help="render every known figure for a run directory")
    p_all.add_argument("run_dir")
    p_all.add_argument("--out", default=None, help="output directory (default RUN_DIR/figures)")
    p_all.add_argument("--format", default="svg", choices=("svg", "png"))

    args = parser.parse_args(argv)
    try:
        if args.command == "render":
            with open(args.spec) as fh:
                payload = json.load(fh)
            out = render(FigureSpec.from_json_dict(payload))
            print(out)
        else:
            for out in render_run_dir(args.run_dir, args.out, args.format):
                print(out)
    except (FigureError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

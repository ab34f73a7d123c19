"""Acceptance: every figure kind renders from real sweep outputs, and the
Haar-law basis comparison shows overlapping histograms."""

import numpy as np

from degenspin_plots import FigureSpec, render


def _load_samples(path):
    import csv

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return np.array([float(r[1]) for r in reader])


def test_all_six_figure_kinds_render(ising_run_dir, dmi_run_dir, invariance_dir, tmp_path):
    jobs = [
        ("spectrum", [ising_run_dir / "energies.csv"]),
        ("entropy_hist", [ising_run_dir / "entropy_hist_000.csv"]),
        ("entropy_vs_field", [ising_run_dir / "entropy.csv"]),
        (
            "invariance_compare",
            [
                invariance_dir / "entropy_samples_haar_gaussian_d.csv",
                invariance_dir / "entropy_samples_haar_gaussian_e.csv",
            ],
        ),
        ("observables_panel", [dmi_run_dir / "observables.csv"]),
        ("magnetization", [ising_run_dir / "magnetization.csv"]),
    ]
    for kind, inputs in jobs:
        out = tmp_path / f"{kind}.svg"
        render(FigureSpec(kind=kind, inputs=tuple(str(p) for p in inputs), output=str(out)))
        assert out.stat().st_size > 0, kind
    print("\n[PASS] plots: all six figure kinds render from sweep outputs")


def test_haar_invariance_histograms_overlap(invariance_dir):
    d = _load_samples(invariance_dir / "entropy_samples_haar_gaussian_d.csv")
    e = _load_samples(invariance_dir / "entropy_samples_haar_gaussian_e.csv")
    assert d.size == 8192 and e.size == 8192
    bins = np.linspace(0.0, 1.0, 51)
    pd, _ = np.histogram(d, bins=bins)
    pe, _ = np.histogram(e, bins=bins)
    diff = np.abs(pd / d.size - pe / e.size).max()
    assert diff < 0.03, f"max bin-wise probability difference {diff:.4f}"
    print(f"\n[PASS] plots: Haar-law histograms overlap (max bin diff {diff:.4f} < 0.03)")

"""Field-sweep orchestrator and command-line entry point.

For every magnetic-field value the sweep solves for the low spectrum,
identifies the (near-)degenerate ground multiplet, draws the random-state
ensemble, and evaluates entropy statistics, correlators, chirality, and the
single-shot measurement protocol.  Results land in one output directory as
CSV files plus a manifest that pins the fully resolved configuration and
seeds, so a run can be reproduced bit for bit at a fixed thread count.

Usage:
    sweep run <config.json> [--out DIR] [--threads N] [--seed S]
    sweep validate <config.json>

Exit codes: 0 success, 2 configuration error, 3 solver failure at one or
more field points (the remaining points still complete).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from .ensemble import LAWS, EnsembleSpec, write_entropy_samples
from .entanglement import (
    BipartitionMask,
    EntropyStatistics,
    SubspaceEntropySampler,
    entropy_statistics,
    half_chain_mask,
    von_neumann_entropy,
    write_distribution_csv,
    write_summary_csv,
)
from .eigensolver import (
    ConvergenceError,
    default_degeneracy_eps,
    group_multiplets,
    lowest_eigenpairs,
    refine_degenerate_block,
)
from .hamiltonian import build_dmi, build_ising
from .lattice import (
    build_chain,
    build_triangular_supercell,
    geometric_half_sites,
    geometry_from_json,
)
from .measurement import estimate_magnetization, single_shot_protocol, write_records
from .observables import build_report

__all__ = ["SweepConfig", "SweepRecord", "validate_config", "run_sweep", "main"]


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the offending field."""


_MODEL_DEFAULTS = {
    "ising": dict(
        J=-1.0,
        D_magnitude=0.0,
        k=16,
        block_size=8,
        ensemble_count=8192,
        shots=8192,
        axis="x",
        bipartition="half_chain",
        near_degenerate={"h_max": 0.5, "eps": 0.03},
    ),
    "dmi": dict(
        J=-0.5,
        D_magnitude=1.0,
        k=24,
        block_size=24,
        ensemble_count=22528,
        shots=256,
        axis="z",
        bipartition="geometric_half",
        near_degenerate={"h_max": 0.28, "eps": 1e-6},
    ),
}

_TOP_KEYS = {
    "model",
    "geometry",
    "J",
    "D_magnitude",
    "dm_sign",
    "field_grid",
    "k",
    "solver_tol",
    "block_size",
    "max_basis",
    "eps_degenerate",
    "near_degenerate",
    "degeneracy_override",
    "ensemble_count",
    "ensemble_law",
    "histogram_bins",
    "save_entropy_samples",
    "bipartition",
    "shots",
    "axis",
    "reuse_factor",
    "master_seed",
    "workers",
    "output_dir",
}


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved sweep parameters (defaults applied and validated)."""

    model: str
    geometry: dict
    J: float
    D_magnitude: float
    dm_sign: int
    field_grid: tuple
    k: int
    solver_tol: float
    block_size: int
    max_basis: int | None
    eps_degenerate: float | None
    near_degenerate: dict | None
    degeneracy_override: tuple
    ensemble_count: int
    ensemble_law: str
    histogram_bins: int
    save_entropy_samples: bool
    bipartition: object
    shots: int
    axis: str
    reuse_factor: int
    master_seed: int
    workers: int | None
    output_dir: str | None

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["field_grid"] = list(self.field_grid)
        out["degeneracy_override"] = [dict(w) for w in self.degeneracy_override]
        if isinstance(self.bipartition, tuple):
            out["bipartition"] = list(self.bipartition)
        return out


@dataclass
class SweepRecord:
    """Everything computed at one field point."""

    h: float
    energies: np.ndarray
    degeneracy: int
    gap_above: float
    entropy_mean: float
    entropy_std: float
    entropy_samples: np.ndarray
    hist_edges: np.ndarray
    hist_probs: np.ndarray
    chirality: float | None
    gamma2_nn: float | None
    gamma2_nnn: float | None
    gamma3: float | None
    magnetization_exact: np.ndarray
    magnetization_shot: np.ndarray
    records: list
    error: str | None = None


def _fail(name: str, why: str):
    raise ConfigError(f"config field '{name}': {why}")


def _expect(cond: bool, name: str, why: str):
    if not cond:
        _fail(name, why)


def validate_config(raw: str) -> SweepConfig:
    """Parse config JSON text, apply per-model defaults, reject junk keys."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")

    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    model = data.get("model")
    _expect(model in _MODEL_DEFAULTS, "model", f"must be one of {sorted(_MODEL_DEFAULTS)}")
    defaults = _MODEL_DEFAULTS[model]

    geometry = data.get("geometry", {"n": 16} if model == "ising" else {"a": 3, "b": 2})
    _expect(isinstance(geometry, dict), "geometry", "must be an object")
    geo_keys = set(geometry)
    if model == "ising":
        _expect(geo_keys <= {"n", "periodic"}, "geometry", "ising takes {n, periodic}")
        _expect(int(geometry.get("n", 16)) >= 1, "geometry.n", "must be >= 1")
    else:
        _expect(
            geo_keys <= {"a", "b"} or geo_keys == {"json_path"},
            "geometry",
            "dmi takes {a, b} or {json_path}",
        )

    grid = data.get("field_grid")
    _expect(isinstance(grid, list) and len(grid) > 0, "field_grid", "must be a non-empty list")
    grid = [float(h) for h in grid]
    _expect(all(b >= a for a, b in zip(grid, grid[1:])), "field_grid", "must be sorted ascending")

    k = int(data.get("k", defaults["k"]))
    _expect(1 <= k <= 64, "k", "must be in [1, 64]")

    tol = float(data.get("solver_tol", 1e-8))
    _expect(tol > 0, "solver_tol", "must be > 0")
    block = int(data.get("block_size", defaults["block_size"]))
    _expect(block >= 2, "block_size", "must be >= 2")
    max_basis = data.get("max_basis")
    if max_basis is not None:
        max_basis = int(max_basis)
        _expect(max_basis >= k + block, "max_basis", "must be >= k + block_size")

    eps_deg = data.get("eps_degenerate")
    if eps_deg is not None:
        eps_deg = float(eps_deg)
        _expect(eps_deg > 0, "eps_degenerate", "must be > 0")

    near = data.get("near_degenerate", defaults["near_degenerate"])
    if near is not None:
        _expect(
            isinstance(near, dict) and set(near) <= {"h_max", "eps"},
            "near_degenerate",
            "takes {h_max, eps}",
        )
        near = {"h_max": float(near.get("h_max", 0.0)), "eps": float(near.get("eps", 1e-6))}
        _expect(near["eps"] > 0, "near_degenerate.eps", "must be > 0")

    override = data.get("degeneracy_override", [])
    _expect(isinstance(override, list), "degeneracy_override", "must be a list of windows")
    windows = []
    for w in override:
        _expect(
            isinstance(w, dict) and set(w) <= {"h_min", "h_max", "degeneracy"},
            "degeneracy_override",
            "windows take {h_min, h_max, degeneracy}",
        )
        deg = int(w.get("degeneracy", 1))
        _expect(1 <= deg <= k, "degeneracy_override.degeneracy", f"must be in [1, k={k}]")
        windows.append(
            {"h_min": float(w.get("h_min", 0.0)), "h_max": float(w.get("h_max", np.inf)),
             "degeneracy": deg}
        )

    count = int(data.get("ensemble_count", defaults["ensemble_count"]))
    _expect(count >= 1, "ensemble_count", "must be >= 1")
    law = data.get("ensemble_law", "haar_gaussian")
    _expect(law in LAWS, "ensemble_law", f"must be one of {LAWS}")

    bins = int(data.get("histogram_bins", 50))
    _expect(bins >= 1, "histogram_bins", "must be >= 1")

    bipartition = data.get("bipartition", defaults["bipartition"])
    if isinstance(bipartition, list):
        bipartition = tuple(int(s) for s in bipartition)
        _expect(len(bipartition) > 0, "bipartition", "site list must be non-empty")
    else:
        _expect(
            bipartition in ("half_chain", "geometric_half"),
            "bipartition",
            "must be 'half_chain', 'geometric_half', or a site list",
        )

    shots = int(data.get("shots", defaults["shots"]))
    _expect(shots >= 1, "shots", "must be >= 1")
    axis = data.get("axis", defaults["axis"])
    _expect(axis in ("x", "y", "z"), "axis", "must be x, y or z")
    reuse = int(data.get("reuse_factor", 1))
    _expect(reuse >= 1, "reuse_factor", "must be >= 1")

    seed = int(data.get("master_seed", 20240801))
    workers = data.get("workers")
    if workers is not None:
        workers = int(workers)
        _expect(workers >= 1, "workers", "must be >= 1")

    return SweepConfig(
        model=model,
        geometry=geometry,
        J=float(data.get("J", defaults["J"])),
        D_magnitude=float(data.get("D_magnitude", defaults["D_magnitude"])),
        dm_sign=int(data.get("dm_sign", 1)),
        field_grid=tuple(grid),
        k=k,
        solver_tol=tol,
        block_size=block,
        max_basis=max_basis,
        eps_degenerate=eps_deg,
        near_degenerate=near,
        degeneracy_override=tuple(windows),
        ensemble_count=count,
        ensemble_law=law,
        histogram_bins=bins,
        save_entropy_samples=bool(data.get("save_entropy_samples", True)),
        bipartition=bipartition,
        shots=shots,
        axis=axis,
        reuse_factor=reuse,
        master_seed=seed,
        workers=workers,
        output_dir=data.get("output_dir"),
    )


def _build_geometry(config: SweepConfig):
    g = config.geometry
    if config.model == "ising":
        return build_chain(int(g.get("n", 16)), bool(g.get("periodic", True)))
    if "json_path" in g:
        with open(g["json_path"]) as fh:
            return geometry_from_json(fh.read())
    return build_triangular_supercell(int(g.get("a", 3)), int(g.get("b", 2)))


def _build_hamiltonian(config: SweepConfig, geometry, h: float):
    if config.model == "ising":
        return build_ising(geometry, config.J, h)
    return build_dmi(geometry, config.J, config.D_magnitude, h, config.dm_sign)


def _resolve_mask(config: SweepConfig, geometry) -> BipartitionMask:
    if isinstance(config.bipartition, tuple):
        return BipartitionMask(config.bipartition, geometry.n_sites)
    if config.bipartition == "half_chain":
        return half_chain_mask(geometry.n_sites)
    half = geometry.n_sites // 2  # 9 of 19
    return BipartitionMask(geometric_half_sites(geometry, half), geometry.n_sites)


def _point_seed(master_seed: int, index: int, tag: int) -> int:
    ss = np.random.SeedSequence((master_seed, index, tag))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _pick_degeneracy(config: SweepConfig, h: float, energies) -> int:
    for w in config.degeneracy_override:
        if w["h_min"] - 1e-12 <= h <= w["h_max"] + 1e-12:
            return w["degeneracy"]
    eps = config.eps_degenerate
    if eps is None:
        eps = default_degeneracy_eps(float(energies[0]))
    if config.near_degenerate is not None and h <= config.near_degenerate["h_max"] + 1e-12:
        eps = max(eps, config.near_degenerate["eps"])
    return group_multiplets(energies, eps)[0].degree


def compute_field_point(config: SweepConfig, index: int) -> SweepRecord:
    """Solve one field point and evaluate every requested quantity."""
    h = config.field_grid[index]
    geometry = _build_geometry(config)
    mask = _resolve_mask(config, geometry)
    H = _build_hamiltonian(config, geometry, h)

    solver_seed = _point_seed(config.master_seed, index, 0)
    try:
        sol = lowest_eigenpairs(
            H,
            config.k,
            tol=config.solver_tol,
            block_size=config.block_size,
            max_basis=config.max_basis,
            seed=solver_seed,
        )
    except ConvergenceError as e:
        return SweepRecord(
            h=h, energies=np.array([]), degeneracy=0, gap_above=np.nan,
            entropy_mean=np.nan, entropy_std=np.nan, entropy_samples=np.array([]),
            hist_edges=np.array([]), hist_probs=np.array([]), chirality=None,
            gamma2_nn=None, gamma2_nnn=None, gamma3=None,
            magnetization_exact=np.array([]), magnetization_shot=np.array([]),
            records=[], error=str(e),
        )

    D = min(_pick_degeneracy(config, h, sol.energies), config.k)
    basis, _ = refine_degenerate_block(H, sol.vectors[:D])
    gap_above = (
        float(sol.energies[D] - sol.energies[:D].mean()) if D < config.k else np.nan
    )

    # ensemble entropy statistics over the multiplet
    max_bits = min(mask.size_a, mask.n_sites - mask.size_a)
    if D == 1:
        # a one-dimensional manifold only admits phase factors, which leave
        # the Schmidt weights untouched: every sample has the same entropy
        s0 = von_neumann_entropy(basis[0], mask)
        samples = np.full(config.ensemble_count, s0)
    else:
        sampler = SubspaceEntropySampler(basis, mask)
        spec = EnsembleSpec(
            count=config.ensemble_count,
            law=config.ensemble_law,
            degeneracy=D,
            master_seed=_point_seed(config.master_seed, index, 1),
        )
        samples = sampler.sample_ensemble(spec)
    stats = entropy_statistics(samples, max_bits=max_bits, bins=config.histogram_bins)

    # shell-resolved correlators, triangle averages, chirality, local moments
    report = build_report(h, basis, geometry, axis=config.axis)

    m_exact = report.local_moments
    records = single_shot_protocol(
        basis,
        shots=config.shots,
        axis=config.axis,
        master_seed=_point_seed(config.master_seed, index, 2),
        reuse_factor=config.reuse_factor,
    )
    m_shot = estimate_magnetization(records)

    return SweepRecord(
        h=h,
        energies=sol.energies,
        degeneracy=D,
        gap_above=gap_above,
        entropy_mean=stats.mean,
        entropy_std=stats.std,
        entropy_samples=samples,
        hist_edges=stats.bin_edges,
        hist_probs=stats.probabilities,
        chirality=report.chirality,
        gamma2_nn=report.gamma2_nn,
        gamma2_nnn=report.gamma2_nnn,
        gamma3=report.gamma3,
        magnetization_exact=m_exact,
        magnetization_shot=m_shot,
        records=records,
    )


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_outputs(config: SweepConfig, out_dir: str, results: list) -> None:
    os.makedirs(out_dir, exist_ok=True)
    ok = [r for r in results if r.error is None]

    with open(os.path.join(out_dir, "energies.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "degeneracy", "gap_above"] + [f"e{i}" for i in range(config.k)])
        for r in ok:
            w.writerow([_fmt(r.h), r.degeneracy, _fmt(r.gap_above)] + [_fmt(e) for e in r.energies])

    write_summary_csv(
        os.path.join(out_dir, "entropy.csv"),
        [
            (
                r.h,
                EntropyStatistics(
                    r.entropy_mean, r.entropy_std, r.hist_edges, r.hist_probs,
                    len(r.entropy_samples),
                ),
            )
            for r in ok
        ],
    )

    hist_files = {}
    for idx, r in enumerate(ok):
        name = f"entropy_hist_{idx:03d}.csv"
        hist_files[_fmt(r.h)] = name
        stats = EntropyStatistics(
            r.entropy_mean, r.entropy_std, r.hist_edges, r.hist_probs, len(r.entropy_samples)
        )
        write_distribution_csv(os.path.join(out_dir, name), stats)
        if config.save_entropy_samples:
            write_entropy_samples(
                os.path.join(out_dir, f"entropy_samples_{idx:03d}.csv"), r.entropy_samples
            )

    with open(os.path.join(out_dir, "observables.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "D", "Q_psi", "gamma2_nn", "gamma2_nnn", "gamma3", "S_mean", "S_std"])
        for r in ok:
            w.writerow(
                [
                    _fmt(r.h),
                    r.degeneracy,
                    "" if r.chirality is None else _fmt(r.chirality),
                    "" if r.gamma2_nn is None else _fmt(r.gamma2_nn),
                    "" if r.gamma2_nnn is None else _fmt(r.gamma2_nnn),
                    "" if r.gamma3 is None else _fmt(r.gamma3),
                    _fmt(r.entropy_mean),
                    _fmt(r.entropy_std),
                ]
            )

    n_sites = len(ok[0].magnetization_exact) if ok else 0
    with open(os.path.join(out_dir, "magnetization.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["h", "axis", "exact_avg", "shot_avg"]
            + [f"exact_{i}" for i in range(n_sites)]
            + [f"shot_{i}" for i in range(n_sites)]
        )
        for r in ok:
            w.writerow(
                [_fmt(r.h), config.axis, _fmt(r.magnetization_exact.mean()),
                 _fmt(r.magnetization_shot.mean())]
                + [_fmt(x) for x in r.magnetization_exact]
                + [_fmt(x) for x in r.magnetization_shot]
            )

    # one records file; shot_index restarts at 0 for each field point, points
    # appear in grid order (shots-per-point recorded in the manifest)
    rec_path = os.path.join(out_dir, "records.txt")
    if os.path.exists(rec_path):
        os.remove(rec_path)
    for idx, r in enumerate(ok):
        write_records(rec_path, r.records, append=idx > 0)

    manifest = {
        "config": config.as_dict(),
        "versions": {
            "degenspin": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "field_points": [
            {
                "index": i,
                "h": r.h,
                "error": r.error,
                "entropy_hist": hist_files.get(_fmt(r.h)),
            }
            for i, r in enumerate(results)
        ],
        "records_layout": {"shots_per_point": config.shots, "order": "field_grid"},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def run_sweep(config: SweepConfig, out_dir: str | None = None, workers: int | None = None):
    """Run every field point, persist outputs, and return the records."""
    out_dir = out_dir or config.output_dir
    if out_dir is None:
        raise ConfigError("no output directory: set 'output_dir' or pass --out")
    if workers is None:
        workers = config.workers or os.cpu_count() or 1
    indices = range(len(config.field_grid))
    if workers > 1 and len(config.field_grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(compute_field_point, [config] * len(config.field_grid), indices))
    else:
        results = [compute_field_point(config, i) for i in indices]
    _write_outputs(config, out_dir, results)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sweep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a field sweep from a JSON config")
    p_run.add_argument("config", help="path to the sweep config JSON")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--threads", type=int, default=None, help="worker limit")
    p_run.add_argument("--seed", type=int, default=None, help="override master_seed")

    p_val = sub.add_parser("validate", help="validate a config and echo defaults")
    p_val.add_argument("config", help="path to the sweep config JSON")

    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = validate_config(fh.read())
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return 2
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.command == "validate":
        json.dump(config.as_dict(), sys.stdout, indent=2)
        print()
        return 0

    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    workers = args.threads
    if workers is None and os.environ.get("THREADS"):
        workers = int(os.environ["THREADS"])

    try:
        results = run_sweep(config, out_dir=args.out, workers=workers)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    failures = [r for r in results if r.error is not None]
    for r in failures:
        print(f"solver failure at h = {r.h}: {r.error}", file=sys.stderr)
    print(f"completed {len(results) - len(failures)}/{len(results)} field points")
    return 3 if failures else 0


if __name__ == "__main__":
    sys.exit(main())

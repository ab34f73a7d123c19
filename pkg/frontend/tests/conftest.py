"""Shared fixtures: real run directories made through the degenspin CLIs.

The plotting package only consumes files, so the fixtures produce them the
same way a user would: by invoking the `sweep` command line and the
basis-invariance demo script of the simulation package.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
DEMO = REPO_ROOT / "demos" / "basis_invariance.py"

SMALL_SWEEP = {
    "model": "ising",
    "geometry": {"n": 8},
    "field_grid": [0.0, 0.3, 0.7],
    "k": 8,
    "block_size": 6,
    "ensemble_count": 256,
    "shots": 64,
    "histogram_bins": 25,
    "master_seed": 4242,
}

SMALL_DMI_SWEEP = {
    "model": "dmi",
    "geometry": {"a": 2, "b": 1},
    "field_grid": [0.0, 0.4],
    "k": 8,
    "block_size": 8,
    "ensemble_count": 128,
    "shots": 64,
    "master_seed": 77,
}


def _run(cmd, cwd=None):
    proc = subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, f"{cmd} failed:\n{proc.stdout}\n{proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def ising_run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("ising_run")
    cfg = base / "config.json"
    cfg.write_text(json.dumps(SMALL_SWEEP))
    out = base / "out"
    _run(["sweep", "run", str(cfg), "--out", str(out), "--threads", "1"])
    return out


@pytest.fixture(scope="session")
def dmi_run_dir(tmp_path_factory):
    base = tmp_path_factory.mktemp("dmi_run")
    cfg = base / "config.json"
    cfg.write_text(json.dumps(SMALL_DMI_SWEEP))
    out = base / "out"
    _run(["sweep", "run", str(cfg), "--out", str(out), "--threads", "1"])
    return out


@pytest.fixture(scope="session")
def invariance_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("invariance")
    _run([sys.executable, str(DEMO), "--out", str(out), "--samples", "8192"])
    return out

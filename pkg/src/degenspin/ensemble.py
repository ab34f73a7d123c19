"""Random superpositions inside a degenerate eigensubspace.

Normalizing a vector of i.i.d. complex Gaussian coefficients yields states
distributed with the Haar (unitarily invariant) measure on the subspace, so
ensemble statistics do not depend on which orthonormal basis the exact
diagonalization happened to return.  A uniform-box law is provided as the
counterexample: it breaks that invariance.

Per-sample random streams are derived from (master_seed, sample_index) with
a counter-based generator, so ensembles are reproducible no matter how the
samples are scheduled.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LAWS",
    "CoefficientVector",
    "EnsembleSpec",
    "sample_rng",
    "sample_coefficients",
    "coefficient_samples",
    "superpose",
    "closed_form_ising_entropy",
    "write_entropy_samples",
    "read_entropy_samples",
]

LAWS = ("haar_gaussian", "uniform_box")


@dataclass(frozen=True)
class CoefficientVector:
    """Normalized complex coefficients over a degenerate multiplet."""

    alphas: np.ndarray
    law: str
    seed_path: tuple  # (master_seed, sample_index); (-1, -1) if handmade

    def __post_init__(self):
        nrm = np.linalg.norm(self.alphas)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"coefficients not normalized: |norm - 1| = {abs(nrm-1.0):.2e}")


@dataclass(frozen=True)
class EnsembleSpec:
    """How to draw an ensemble: size, sampling law, degeneracy, master seed."""

    count: int
    law: str
    degeneracy: int
    master_seed: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("ensemble count must be >= 1")
        if self.law not in LAWS:
            raise ValueError(f"law must be one of {LAWS}, got {self.law!r}")
        if self.degeneracy < 1:
            raise ValueError("degeneracy must be >= 1")


def sample_rng(master_seed: int, sample_index: int, tag: int = 0) -> np.random.Generator:
    """Counter-based per-sample random stream (Philox keyed by the triple)."""
    seq = np.random.SeedSequence((int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(sample_index), tag))
    return np.random.Generator(np.random.Philox(seq))


def sample_coefficients(
    D: int, law: str, rng: np.random.Generator, seed_path=(-1, -1)
) -> CoefficientVector:
    """Draw one normalized coefficient vector of the given law.

    haar_gaussian: real and imaginary parts i.i.d. standard normal, then the
    vector is normalized (Haar-uniform on the D-dimensional subspace).
    uniform_box: parts i.i.d. uniform on (-1, 1), then normalized.
    """
    if D < 1:
        raise ValueError("need D >= 1 coefficients")
    if law == "haar_gaussian":
        raw = rng.standard_normal(D) + 1j * rng.standard_normal(D)
    elif law == "uniform_box":
        raw = rng.uniform(-1.0, 1.0, D) + 1j * rng.uniform(-1.0, 1.0, D)
    else:
        raise ValueError(f"unknown law {law!r}")
    nrm = np.linalg.norm(raw)
    while nrm < 1e-12:  # essentially impossible, but normalization must hold
        raw = rng.standard_normal(D) + 1j * rng.standard_normal(D)
        nrm = np.linalg.norm(raw)
    alphas = raw / nrm
    alphas /= np.linalg.norm(alphas)  # second pass pins the norm to 1 ulp-tight
    return CoefficientVector(alphas=alphas, law=law, seed_path=tuple(seed_path))


def coefficient_samples(spec: EnsembleSpec):
    """Yield the ensemble's coefficient vectors in sample-index order."""
    for idx in range(spec.count):
        rng = sample_rng(spec.master_seed, idx)
        yield sample_coefficients(spec.degeneracy, spec.law, rng, (spec.master_seed, idx))


def superpose(basis, coeffs: CoefficientVector) -> np.ndarray:
    """Normalized sum_d alpha_d |psi_d> over an orthonormal basis.

    basis is a sequence of state vectors (or a (D, dim) array).
    """
    B = np.atleast_2d(np.asarray(basis))
    D = B.shape[0]
    if D != coeffs.alphas.size:
        raise ValueError(f"{coeffs.alphas.size} coefficients for {D} basis states")
    gram = B.conj() @ B.T
    if np.abs(gram - np.eye(D)).max() > 1e-8:
        raise ValueError("basis is not orthonormal to 1e-8")
    out = coeffs.alphas @ B
    return out / np.linalg.norm(out)


def _h2(weights) -> float:
    s = 0.0
    for w in weights:
        if w > 1e-14:
            s -= w * math.log2(w)
    return s


def closed_form_ising_entropy(alpha0: complex, alpha1: complex, variant: str) -> float:
    """Half-chain entropy of a two-state superposition of fully polarized states.

    variant 'd' uses the product-state basis {|up...up>, |down...down>}:
        S = -|a0|^2 log2 |a0|^2 - |a1|^2 log2 |a1|^2.
    variant 'e' uses the GHZ-type basis (|up..> +- |down..>)/sqrt(2), which
    remixes the weights to |a0 +- a1|^2 / 2.  Valid for any cut that leaves
    both subsystems non-empty; 0 log 0 = 0.
    """
    a0, a1 = complex(alpha0), complex(alpha1)
    total = abs(a0) ** 2 + abs(a1) ** 2
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"|a0|^2 + |a1|^2 = {total:.12f}, expected 1")
    if variant == "d":
        weights = (abs(a0) ** 2, abs(a1) ** 2)
    elif variant == "e":
        weights = (abs(a0 + a1) ** 2 / 2.0, abs(a0 - a1) ** 2 / 2.0)
    else:
        raise ValueError(f"variant must be 'd' or 'e', got {variant!r}")
    return _h2(weights)


def write_entropy_samples(path, entropies) -> None:
    """Persist per-sample entropies as CSV rows (sample_index, entropy_bits)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "entropy_bits"])
        for idx, s in enumerate(entropies):
            writer.writerow([idx, format(float(s), ".17g")])


def read_entropy_samples(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["sample_index", "entropy_bits"]:
            raise ValueError(f"unexpected entropy-sample header: {header}")
        return np.array([float(row[1]) for row in reader])

"""Schmidt spectra, von Neumann entropies, and ensemble entropy statistics.

Entropies are computed from singular values of the reshaped amplitude
matrix (never from an explicitly constructed large density matrix).  For
ensembles confined to a small degenerate subspace there is a much faster
route: with basis states psi_d reshaped to matrices M_d, the reduced
density matrix of any superposition is a coefficient-weighted sum of the
precomputed Gram blocks M_d M_e^dagger, so each sample costs one small
Hermitian eigensolve.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec, coefficient_samples
from .spinops import n_sites_of, norm_check

__all__ = [
    "BipartitionMask",
    "SchmidtSpectrum",
    "EntropyStatistics",
    "reduced_spectrum",
    "von_neumann_entropy",
    "entropy_statistics",
    "entropy_distribution",
    "SubspaceEntropySampler",
    "write_distribution_csv",
    "write_summary_csv",
]

_WEIGHT_FLOOR = 1e-14  # weights below this count as zero in entropies


@dataclass(frozen=True)
class BipartitionMask:
    """A subsystem (non-empty proper subset of sites) within n_sites."""

    subsystem_a_sites: tuple
    n_sites: int

    def __post_init__(self):
        sites = tuple(sorted(set(int(s) for s in self.subsystem_a_sites)))
        if len(sites) != len(self.subsystem_a_sites):
            raise ValueError("duplicate sites in bipartition mask")
        if not sites or len(sites) >= self.n_sites:
            raise ValueError("subsystem A must be a non-empty proper subset")
        if sites[0] < 0 or sites[-1] >= self.n_sites:
            raise ValueError("mask site out of range")
        object.__setattr__(self, "subsystem_a_sites", sites)

    @property
    def complement(self) -> tuple:
        a = set(self.subsystem_a_sites)
        return tuple(s for s in range(self.n_sites) if s not in a)

    @property
    def size_a(self) -> int:
        return len(self.subsystem_a_sites)


def half_chain_mask(n: int) -> BipartitionMask:
    """Contiguous first half of a chain: sites 0 .. n//2 - 1."""
    return BipartitionMask(tuple(range(n // 2)), n)


def _amplitude_matrix(state: np.ndarray, mask: BipartitionMask) -> np.ndarray:
    """Reshape a state into a 2^|A| x 2^|B| matrix (A sites leading)."""
    n = n_sites_of(state)
    if mask.n_sites != n:
        raise ValueError(f"mask is for {mask.n_sites} sites, state has {n}")
    a_sites = mask.subsystem_a_sites
    b_sites = mask.complement
    tensor = state.reshape((2,) * n)
    axes = [n - 1 - s for s in a_sites] + [n - 1 - s for s in b_sites]
    return np.transpose(tensor, axes).reshape(1 << len(a_sites), 1 << len(b_sites))


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Eigenvalues of the reduced density matrix, descending."""

    weights: np.ndarray

    def entropy_bits(self) -> float:
        w = self.weights[self.weights > _WEIGHT_FLOOR]
        return float(-(w * np.log2(w)).sum()) + 0.0 if w.size else 0.0


def reduced_spectrum(state: np.ndarray, mask: BipartitionMask) -> SchmidtSpectrum:
    """Schmidt weights of a normalized pure state across the bipartition."""
    norm_check(state)
    M = _amplitude_matrix(state, mask)
    sv = np.linalg.svd(M, compute_uv=False)
    weights = np.sort(sv * sv)[::-1]
    return SchmidtSpectrum(weights=weights)


def von_neumann_entropy(state: np.ndarray, mask: BipartitionMask) -> float:
    """Entanglement entropy in bits: -sum w log2 w over Schmidt weights."""
    return reduced_spectrum(state, mask).entropy_bits()


@dataclass(frozen=True)
class EntropyStatistics:
    """Mean / population-std / normalized histogram of entropy samples."""

    mean: float
    std: float
    bin_edges: np.ndarray
    probabilities: np.ndarray
    sample_count: int


def entropy_statistics(entropies, max_bits: float, bins: int = 50) -> EntropyStatistics:
    """Aggregate entropy samples over the fixed range [0, max_bits]."""
    arr = np.asarray(list(entropies), dtype=float)
    if arr.size < 1:
        raise ValueError("no entropy samples")
    counts, edges = np.histogram(arr, bins=bins, range=(0.0, max(max_bits, 1e-12)))
    return EntropyStatistics(
        mean=float(arr.mean()),
        std=float(arr.std()),
        bin_edges=edges,
        probabilities=counts / arr.size,
        sample_count=arr.size,
    )


def entropy_distribution(states, mask: BipartitionMask, bins: int = 50) -> EntropyStatistics:
    """Entropy statistics of a stream of at least two states."""
    entropies = [von_neumann_entropy(s, mask) for s in states]
    if len(entropies) < 2:
        raise ValueError("need at least two states for a distribution")
    max_bits = min(mask.size_a, mask.n_sites - mask.size_a)
    return entropy_statistics(entropies, max_bits=max_bits, bins=bins)


class SubspaceEntropySampler:
    """Entropies of superpositions drawn inside a fixed degenerate subspace.

    Precomputes the Gram blocks G[d, e] = M_d M_e^dagger on the smaller side
    of the bipartition; a sample's reduced density matrix is then
    rho_A(alpha) = sum_{d,e} alpha_d alpha_e^* G[d, e].
    """

    def __init__(self, basis, mask: BipartitionMask):
        B = np.atleast_2d(np.asarray(basis, dtype=complex))
        self.degeneracy = B.shape[0]
        gram = B.conj() @ B.T
        if np.abs(gram - np.eye(self.degeneracy)).max() > 1e-8:
            raise ValueError("multiplet basis is not orthonormal to 1e-8")
        # entropy is symmetric under A <-> B; compute on the smaller side
        if mask.size_a <= mask.n_sites - mask.size_a:
            side = mask
        else:
            side = BipartitionMask(mask.complement, mask.n_sites)
        mats = [_amplitude_matrix(B[d], side) for d in range(self.degeneracy)]
        da = mats[0].shape[0]
        self.max_bits = float(min(mask.size_a, mask.n_sites - mask.size_a))
        self._gram_blocks = np.empty((self.degeneracy, self.degeneracy, da, da), dtype=complex)
        for d in range(self.degeneracy):
            for e in range(d, self.degeneracy):
                blk = mats[d] @ mats[e].conj().T
                self._gram_blocks[d, e] = blk
                if e != d:
                    self._gram_blocks[e, d] = blk.conj().T

    def entropies(self, alphas: np.ndarray, chunk: int = 128) -> np.ndarray:
        """Entropy (bits) for each row of coefficients, batched."""
        A = np.atleast_2d(np.asarray(alphas, dtype=complex))
        if A.shape[1] != self.degeneracy:
            raise ValueError(f"expected {self.degeneracy} coefficients per sample")
        D = self.degeneracy
        da = self._gram_blocks.shape[-1]
        flat = self._gram_blocks.reshape(D * D, da * da)
        out = np.empty(A.shape[0])
        for lo in range(0, A.shape[0], chunk):
            blk = A[lo : lo + chunk]
            coefs = (blk[:, :, None] * blk.conj()[:, None, :]).reshape(blk.shape[0], D * D)
            rhos = (coefs @ flat).reshape(blk.shape[0], da, da)
            w = np.linalg.eigvalsh(rhos)
            w = np.where(w > _WEIGHT_FLOOR, w, 1.0)  # 0 log 0 = 0
            out[lo : lo + chunk] = -(w * np.log2(w)).sum(axis=1)
        return out

    def sample_ensemble(self, spec: EnsembleSpec) -> np.ndarray:
        """Entropies for every sample of the ensemble, in index order."""
        if spec.degeneracy != self.degeneracy:
            raise ValueError("ensemble degeneracy does not match the sampler basis")
        alphas = np.stack([c.alphas for c in coefficient_samples(spec)])
        return self.entropies(alphas)


def write_distribution_csv(path, stats: EntropyStatistics) -> None:
    """Histogram CSV rows: (bin_left, bin_right, probability)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "probability"])
        for i, p in enumerate(stats.probabilities):
            writer.writerow(
                [
                    format(stats.bin_edges[i], ".17g"),
                    format(stats.bin_edges[i + 1], ".17g"),
                    format(float(p), ".17g"),
                ]
            )


def write_summary_csv(path, rows) -> None:
    """Summary CSV: (h, mean_bits, std_bits, sample_count) per field point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "mean_bits", "std_bits", "sample_count"])
        for h, stats in rows:
            writer.writerow(
                [
                    format(float(h), ".17g"),
                    format(stats.mean, ".17g"),
                    format(stats.std, ".17g"),
                    stats.sample_count,
                ]
            )

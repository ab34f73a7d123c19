"""Bit-level spin-1/2 operator kernels shared across the package.

Basis convention: basis index bit i encodes site i's z projection,
bit value 0 <-> |up> (S^z = +1/2), 1 <-> |down> (S^z = -1/2).  States are
complex vectors of length 2^n; reshaping with C order puts site n-1 on
axis 0, so site i lives on axis n-1-i.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "AXES",
    "spin_matrix",
    "n_sites_of",
    "norm_check",
    "apply_site_product",
    "site_product_expectation",
    "sz_expectations",
    "apply_single_site_unitary",
    "bit_values",
    "permute_sites",
]

AXES = ("x", "y", "z")

_SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
_SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
_SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
_SPIN = {"x": _SX, "y": _SY, "z": _SZ}


def spin_matrix(axis: str) -> np.ndarray:
    """2x2 spin-1/2 operator (eigenvalues +-1/2) in the (up, down) basis."""
    try:
        return _SPIN[axis].copy()
    except KeyError:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}") from None


def n_sites_of(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    return n


def norm_check(state: np.ndarray, tol: float = 1e-8) -> None:
    nrm = np.linalg.norm(state)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state is not normalized: |norm - 1| = {abs(nrm - 1.0):.3e}")


def _site_axes_view(state: np.ndarray, sites):
    """Reshape a (dim,) or (dim, b) array exposing one axis per listed site."""
    n = n_sites_of(state)
    extra = state.shape[1:]
    tensor = state.reshape((2,) * n + extra)
    return tensor, [n - 1 - s for s in sites], n


def apply_site_product(state: np.ndarray, ops) -> np.ndarray:
    """Apply a product of single-site spin operators to a state.

    ops is a sequence of (site, axis) pairs on pairwise distinct sites, e.g.
    [(0, 'z'), (3, 'x')] for S^z_0 S^x_3.  Returns a new vector.
    """
    sites = [s for s, _ in ops]
    if len(set(sites)) != len(sites):
        raise ValueError(f"repeated site in operator product: {sites}")
    n = n_sites_of(state)
    for s in sites:
        if not 0 <= s < n:
            raise ValueError(f"site {s} outside [0, {n})")
    out = state
    for site, axis in ops:
        mat = _SPIN[axis]
        tensor, (ax,), _ = _site_axes_view(out, [site])
        moved = np.moveaxis(tensor, ax, 0)
        res = np.tensordot(mat, moved, axes=(1, 0))
        out = np.moveaxis(res, 0, ax).reshape(state.shape)
    return out


def site_product_expectation(state: np.ndarray, ops) -> float:
    """<state| product of single-site spin ops |state>, asserted real."""
    val = np.vdot(state, apply_site_product(state, ops))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise AssertionError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def sz_expectations(state: np.ndarray) -> np.ndarray:
    """<S^z_i> for every site, from the Born weights (diagonal observable)."""
    n = n_sites_of(state)
    w = np.abs(state) ** 2
    out = np.empty(n)
    for i in range(n):
        t = w.reshape(1 << (n - 1 - i), 2, 1 << i)
        out[i] = 0.5 * (t[:, 0, :].sum() - t[:, 1, :].sum())
    return out


def apply_single_site_unitary(state: np.ndarray, u: np.ndarray, sites=None) -> np.ndarray:
    """Apply the same 2x2 unitary on every listed site (default: all)."""
    n = n_sites_of(state)
    if sites is None:
        sites = range(n)
    out = state.astype(complex, copy=True)
    for site in sites:
        pre = 1 << (n - 1 - site)
        post = 1 << site
        t = out.reshape(pre, 2, post)
        out = np.einsum("ab,pbq->paq", u, t).reshape(state.shape)
    return out


def bit_values(n: int, site: int) -> np.ndarray:
    """Bit of every basis index at the given site, as an int8 array."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx >> site) & 1).astype(np.int8)


def permute_sites(state: np.ndarray, perm) -> np.ndarray:
    """Relabel sites: site i of the input becomes site perm[i] of the output."""
    n = n_sites_of(state)
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(n)):
        raise ValueError("perm must be a permutation of all sites")
    idx = np.arange(1 << n, dtype=np.int64)
    new_idx = np.zeros_like(idx)
    for i in range(n):
        new_idx |= ((idx >> i) & 1) << int(perm[i])
    out = np.empty_like(state)
    out[new_idx] = state
    return out

"""Low-lying eigenpairs of spin Hamiltonians, degeneracy-safe.

The iterative solver is a thick-restart blocked Lanczos / Davidson scheme
with full reorthogonalization at every step: a block of vectors is expanded
by matrix-free applications, the projected problem is solved exactly in the
accumulated subspace, and restarts compress onto the lowest Ritz vectors.
Working with blocks (block size at least the expected degeneracy plus a
margin) is what lets exactly degenerate multiplets come out complete; a
single-vector Lanczos recursion can silently drop members.

A dense-matrix path built independently from Kronecker products serves as
the brute-force oracle for small systems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from .hamiltonian import HamiltonianTerms, apply
from .spinops import spin_matrix

__all__ = [
    "EigenSolution",
    "Multiplet",
    "ConvergenceError",
    "lowest_eigenpairs",
    "dense_matrix",
    "dense_spectrum",
    "group_multiplets",
    "refine_degenerate_block",
]


class ConvergenceError(RuntimeError):
    """Iterative solve did not reach the residual tolerance."""

    def __init__(self, message, best_residuals=None):
        super().__init__(message)
        self.best_residuals = best_residuals


@dataclass
class EigenSolution:
    """Converged eigenpairs, energies ascending.

    vectors is a (k, dim) array whose rows are orthonormal states;
    residual_norms[i] = ||H v_i - E_i v_i||.
    """

    energies: np.ndarray
    vectors: np.ndarray
    residual_norms: np.ndarray
    k: int

    def state(self, i: int) -> np.ndarray:
        return self.vectors[i]


@dataclass
class Multiplet:
    """A (near-)degenerate group of consecutive eigenpairs."""

    start_index: int
    degree: int
    energy: float
    gap_above: float


def _site_operator(n: int, site: int, op2: np.ndarray):
    """Embed a 2x2 operator on one site (bit i of the basis index)."""
    return sparse.kron(
        sparse.identity(1 << (n - 1 - site), format="csr"),
        sparse.kron(sparse.csr_matrix(op2), sparse.identity(1 << site, format="csr")),
        format="csr",
    )


def dense_matrix(H: HamiltonianTerms) -> np.ndarray:
    """Explicit 2^n x 2^n matrix, built from Kronecker products.

    Independent of the flip-table application kernel, so it doubles as a
    brute-force oracle for `apply`.
    """
    if H.n_sites > 14:
        raise ValueError(f"dense matrix limited to n <= 14, got n = {H.n_sites}")
    n = H.n_sites
    acc = sparse.csr_matrix((1 << n, 1 << n), dtype=complex)
    for site, axis, c in H.one_site_terms:
        acc = acc + c * _site_operator(n, site, spin_matrix(axis))
    for i, j, mat in H.two_site_terms:
        mat = np.asarray(mat, dtype=float)
        for mu, ax_mu in enumerate("xyz"):
            for nu, ax_nu in enumerate("xyz"):
                if mat[mu, nu] == 0:
                    continue
                acc = acc + mat[mu, nu] * (
                    _site_operator(n, i, spin_matrix(ax_mu))
                    @ _site_operator(n, j, spin_matrix(ax_nu))
                )
    return acc.toarray()


def dense_spectrum(H: HamiltonianTerms) -> EigenSolution:
    """All 2^n eigenpairs by dense Hermitian diagonalization (n <= 12)."""
    if H.n_sites > 12:
        raise ValueError(f"dense spectrum limited to n <= 12, got n = {H.n_sites}")
    mat = dense_matrix(H)
    energies, vecs = np.linalg.eigh(mat)
    vectors = np.ascontiguousarray(vecs.T)
    residuals = np.linalg.norm(mat @ vecs - vecs * energies[None, :], axis=0)
    return EigenSolution(
        energies=energies,
        vectors=vectors,
        residual_norms=residuals,
        k=energies.size,
    )


def _project_coeffs(basis: np.ndarray, block: np.ndarray) -> np.ndarray:
    """<basis_i | block_j> without conjugating the (large) basis array."""
    return (basis @ block.conj().T).conj()


def _orthonormalize_against(block: np.ndarray, basis: np.ndarray, rng) -> np.ndarray:
    """Orthonormalize rows of `block` against `basis` rows and each other.

    Rows are normalized first so the collapse test is scale-free; classical
    Gram-Schmidt passes repeat until the projection coefficients are
    negligible.  Directions that lie (numerically) inside the existing span
    are replaced with random vectors so the block always keeps full rank.
    """
    dim = block.shape[1]
    norms = np.linalg.norm(block, axis=1)
    norms[norms < 1e-300] = 1.0
    work = block / norms[:, None]
    if basis.shape[0]:
        for _ in range(4):
            coeffs = _project_coeffs(basis, work)
            work = work - coeffs.T @ basis
            if np.abs(coeffs).max() < 1e-10:
                break
    q, r = np.linalg.qr(work.T)
    dead = np.abs(np.diag(r)) < 1e-8
    out = np.ascontiguousarray(q.T)
    if dead.any():
        for idx in np.nonzero(dead)[0]:
            v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            for _ in range(3):
                if basis.shape[0]:
                    v -= (basis @ v.conj()).conj() @ basis
                v -= (out @ v.conj()).conj() @ out
            out[idx] = v / np.linalg.norm(v)
    return out


def _dense_fallback(H: HamiltonianTerms, k: int) -> EigenSolution:
    """Exact solve by applying H to the identity; for tiny Hilbert spaces."""
    dim = H.dim
    mat = apply(H, np.eye(dim, dtype=complex))
    energies, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    vectors = np.ascontiguousarray(vecs[:, :k].T)
    residuals = np.linalg.norm(mat @ vecs[:, :k] - vecs[:, :k] * energies[None, :k], axis=0)
    return EigenSolution(energies[:k].copy(), vectors, residuals, k)


def _upper_edge_estimate(H, rng, steps: int = 12) -> float:
    """Upper spectral edge from a short plain Lanczos run, with margin."""
    dim = H.dim
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    v_prev = np.zeros_like(v)
    beta = 0.0
    alphas, betas = [], []
    for _ in range(min(steps, dim)):
        w = apply(H, v) - beta * v_prev
        alpha = float(np.vdot(v, w).real)
        w -= alpha * v
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        if beta < 1e-12:
            betas.append(0.0)
            break
        betas.append(beta)
        v_prev, v = v, w / beta
    tri = np.diag(alphas) + np.diag(betas[: len(alphas) - 1], 1) + np.diag(
        betas[: len(alphas) - 1], -1
    )
    theta = np.linalg.eigvalsh(tri)
    spread = float(theta[-1] - theta[0]) if theta.size > 1 else 1.0
    return float(theta[-1]) + max(2.0 * betas[-1], 0.05 * spread)


def _chebyshev_filter(H, block, low, high, degree):
    """Amplify eigencomponents below `low` by a Chebyshev polynomial in H.

    The polynomial is bounded on [low, high] (which must enclose the unwanted
    upper spectrum) and grows fast below `low`, steering the expansion toward
    the low end without any extra orthogonalization work.
    """
    c = (high + low) / 2.0
    e = (high - low) / 2.0
    y_prev = block
    y = (apply(H, block.T).T - c * block) / e
    for _ in range(degree - 1):
        y_next = (2.0 / e) * (apply(H, y.T).T - c * y) - y_prev
        y_prev, y = y, y_next
    return y


def lowest_eigenpairs(
    H: HamiltonianTerms,
    k: int,
    tol: float = 1e-8,
    *,
    block_size: int | None = None,
    max_basis: int | None = None,
    max_matvecs: int = 200_000,
    filter_degree: int | None = None,
    seed: int = 1234,
) -> EigenSolution:
    """The k lowest eigenpairs of H with residual norms <= tol.

    Parameters
    ----------
    k : number of eigenpairs (k <= 64 and k <= dim).
    tol : absolute residual tolerance ||H v - E v||.
    block_size : vectors per expansion block; must be at least the largest
        expected degeneracy plus a margin (default max(8, k)).
    max_basis : subspace size at which a thick restart compresses onto the
        lowest Ritz vectors.
    filter_degree : Chebyshev filter degree for the expansion directions;
        None picks automatically (filtering when the diagonal is not
        dominant), 0 disables filtering.
    seed : seeds the random starting block, making runs reproducible.
    """
    dim = H.dim
    if k < 1 or k > 64:
        raise ValueError(f"k must be in [1, 64], got {k}")
    if k > dim:
        raise ValueError(f"k = {k} exceeds the Hilbert-space dimension {dim}")

    p = block_size if block_size is not None else max(8, k)
    p = max(2, min(p, dim)) if dim > 1 else 1
    if max_basis is None:
        # deep-enough Krylov per restart cycle, capped near 2 GiB of basis
        mem_cap = max(k + 3 * p, int(2_147_483_648 / (2 * dim * 16)))
        m_max = min(max(96, k + 8 * p), mem_cap)
    else:
        m_max = max_basis
    m_max = min(m_max, dim)
    keep = min(max(k + p, m_max // 3), max(m_max - 2 * p, k), dim)

    ct = H.compiled()
    diag = ct.diag
    if not ct.has_offdiagonal:
        # purely diagonal Hamiltonian (e.g. zero transverse field): the
        # eigenbasis is the computational basis, solve exactly
        order = np.argsort(diag, kind="stable")[:k]
        vectors = np.zeros((k, dim), dtype=np.complex128)
        vectors[np.arange(k), order] = 1.0
        return EigenSolution(diag[order].astype(float), vectors, np.zeros(k), k)

    if dim <= max(64, keep + p):
        return _dense_fallback(H, k)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    # diagonal (Jacobi) preconditioning only pays off when the diagonal
    # dominates; compare its spread against a row-sum bound on the rest
    offdiag_scale = ct.offdiag_scale
    precondition = (diag.max() - diag.min()) > offdiag_scale
    if filter_degree is None:
        filter_degree = 8 if (not precondition and dim >= 4096) else 0
    spectrum_top = float(diag.max()) + offdiag_scale + 1e-6  # crude safe bound
    if filter_degree:
        edge_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, 0xED6E))))
        spectrum_top = min(spectrum_top, _upper_edge_estimate(H, edge_rng))

    V = np.zeros((m_max, dim), dtype=np.complex128)
    HV = np.zeros((m_max, dim), dtype=np.complex128)
    T = np.zeros((m_max, m_max), dtype=np.complex128)

    start = rng.standard_normal((p, dim)) + 1j * rng.standard_normal((p, dim))
    V[:p] = _orthonormalize_against(start, V[:0], rng)
    HV[:p] = apply(H, V[:p].T).T
    T[:p, :p] = _project_coeffs(V[:p], HV[:p])
    m = p
    matvecs = p
    best_res = None

    while matvecs <= max_matvecs:
        # exact Rayleigh-Ritz on the accumulated subspace
        evals, Y = np.linalg.eigh((T[:m, :m] + T[:m, :m].conj().T) / 2)
        q = min(max(k, p), m)
        X = Y[:, :q].T @ V[:m]
        HX = Y[:, :q].T @ HV[:m]
        R = HX - evals[:q, None] * X
        res = np.linalg.norm(R, axis=1)

        if q >= k:
            best_res = res[:k] if best_res is None else np.minimum(best_res, res[:k])
            if np.all(res[:k] <= tol):
                vectors = np.ascontiguousarray(X[:k])
                return EigenSolution(evals[:k].copy(), vectors, res[:k].copy(), k)

        if m + p > m_max:
            # thick restart: compress onto the lowest Ritz vectors
            r = min(keep, m)
            V[:r] = Y[:, :r].T @ V[:m]
            HV[:r] = Y[:, :r].T @ HV[:m]
            T[:m_max, :m_max] = 0.0
            T[:r, :r] = np.diag(evals[:r])
            m = r
            continue

        # expansion directions from the lowest unconverged Ritz pairs
        bad = [i for i in range(q) if res[i] > tol][:p]
        if not bad:  # pairs beyond k stalled the block; top up with the next ones
            bad = list(range(min(p, q)))
        nb = len(bad)
        if filter_degree:
            # Chebyshev-filtered Ritz vectors: damp the band above the wanted
            # states.  The boundary must sit inside a spectral gap, never on
            # a degenerate shelf that the wanted window cuts through, or the
            # shelf states at the boundary would stop converging.
            spread = max(spectrum_top - float(evals[0]), 1e-6)
            j_hi = min(q + 2 * p, m - 1)
            low = float(evals[min(q + p, m - 1)])
            for j in range(q - 1, j_hi):
                if evals[j + 1] - evals[j] > 1e-4 * spread:
                    low = float(evals[j] + evals[j + 1]) / 2.0
                    break
            low = min(max(low, float(evals[0]) + 1e-3 * spread), spectrum_top - 0.05 * spread)
            D = _chebyshev_filter(H, X[bad], low, spectrum_top, filter_degree)
            matvecs += nb * filter_degree
        else:
            D = R[bad].copy()
            if precondition:
                # Davidson's diagonal correction; the clamp keeps directions
                # well defined where the diagonal crosses the Ritz value
                for row, i in enumerate(bad):
                    denom = diag - evals[i]
                    guard = 1e-2 * max(1.0, abs(evals[i]))
                    denom = np.where(
                        np.abs(denom) < guard, np.copysign(guard, denom + guard / 2), denom
                    )
                    D[row] /= denom
        V[m : m + nb] = _orthonormalize_against(D, V[:m], rng)
        HV[m : m + nb] = apply(H, V[m : m + nb].T).T
        matvecs += nb
        T[: m + nb, m : m + nb] = _project_coeffs(V[: m + nb], HV[m : m + nb])
        T[m : m + nb, :m] = T[:m, m : m + nb].conj().T
        m += nb

    raise ConvergenceError(
        f"no convergence after {matvecs} matrix applications "
        f"(best residuals {np.array2string(best_res, precision=2)})",
        best_residuals=best_res,
    )


def default_degeneracy_eps(ground_energy: float) -> float:
    """Tolerance treating eigenvalues as exactly degenerate."""
    return 1e-10 * max(1.0, abs(ground_energy))


def group_multiplets(energies, eps_deg: float) -> list:
    """Greedy grouping of an ascending energy list into near-degenerate blocks.

    A new multiplet starts whenever the gap to the previous energy exceeds
    eps_deg; the first multiplet's degree is the ground-state degeneracy.
    """
    energies = np.asarray(energies, dtype=float)
    if energies.size == 0:
        return []
    if np.any(np.diff(energies) < -1e-12):
        raise ValueError("energies must be ascending")
    groups = []
    start = 0
    for i in range(1, energies.size + 1):
        if i == energies.size or energies[i] - energies[i - 1] > eps_deg:
            members = energies[start:i]
            gap = float(energies[i] - members.mean()) if i < energies.size else np.inf
            groups.append(
                Multiplet(
                    start_index=start,
                    degree=i - start,
                    energy=float(members.mean()),
                    gap_above=gap,
                )
            )
            start = i
    return groups


def refine_degenerate_block(H: HamiltonianTerms, vectors) -> tuple:
    """Re-diagonalize H inside the span of a (near-)degenerate multiplet.

    Guards against iterative-solver mixing across close levels: the vectors
    are re-orthonormalized, H is projected onto the block, and the dense
    block eigenbasis is returned as (rotated_vectors, block_energies).
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=complex))
    q, r = np.linalg.qr(V.T)
    if np.abs(np.diag(r)).min() < 1e-8 * max(1.0, np.abs(np.diag(r)).max()):
        raise ValueError("multiplet vectors are (numerically) linearly dependent")
    Vo = q.T
    HVo = apply(H, Vo.T).T
    block = Vo.conj() @ HVo.T
    block = (block + block.conj().T) / 2
    evals, Y = np.linalg.eigh(block)
    rotated = np.ascontiguousarray(Y.T @ Vo)
    return rotated, evals

import numpy as np
import pytest

from degenspin.eigensolver import (
    ConvergenceError,
    dense_spectrum,
    group_multiplets,
    lowest_eigenpairs,
    refine_degenerate_block,
)
from degenspin.hamiltonian import apply, build_dmi, build_ising
from degenspin.lattice import build_chain, build_triangular_supercell


def test_small_ising_first_multiplets():
    # 4-site ring at zero field: fully polarized pair at -1, then the
    # one-domain-wall-pair manifold at 0 (checked against the dense oracle)
    H = build_ising(build_chain(4), -1.0, 0.0)
    sol = lowest_eigenpairs(H, 4, tol=1e-10, seed=1)
    dense = dense_spectrum(H)
    assert np.allclose(sol.energies, dense.energies[:4], atol=1e-9)
    assert np.allclose(sol.energies, [-1.0, -1.0, 0.0, 0.0], atol=1e-9)


@pytest.mark.parametrize("case", range(2))
def test_iterative_matches_dense_both_models(case):
    rng = np.random.default_rng(100 + case)
    J = -float(rng.uniform(0.5, 1.5))
    h = float(rng.uniform(0.0, 1.0))
    H_ising = build_ising(build_chain(10), J, h)
    sol = lowest_eigenpairs(H_ising, 16, tol=1e-9, seed=case)
    dense = dense_spectrum(H_ising)
    assert np.abs(sol.energies - dense.energies[:16]).max() < 1e-9

    D = float(rng.uniform(0.5, 1.5))
    H_dmi = build_dmi(build_triangular_supercell(2, 1), J / 2, D, h)
    sol = lowest_eigenpairs(H_dmi, 12, tol=1e-9, seed=case)
    dense = dense_spectrum(H_dmi)
    assert np.abs(sol.energies - dense.energies[:12]).max() < 1e-9


def test_residuals_verified_by_independent_apply():
    H = build_ising(build_chain(10), -1.0, 0.35)
    sol = lowest_eigenpairs(H, 8, tol=1e-9, seed=7)
    for i in range(8):
        v = sol.vectors[i]
        res = np.linalg.norm(apply(H, v) - sol.energies[i] * v)
        assert res <= 1e-9
        assert res == pytest.approx(sol.residual_norms[i], abs=1e-10)


def test_orthonormal_output():
    H = build_dmi(build_triangular_supercell(2, 1), -0.5, 1.0, 0.1)
    sol = lowest_eigenpairs(H, 10, tol=1e-9, seed=3)
    gram = sol.vectors.conj() @ sol.vectors.T
    assert np.abs(gram - np.eye(10)).max() < 1e-10


def test_degenerate_pair_fully_captured():
    # zero-field Ising ground pair is exactly degenerate; both members must
    # come out when k allows them
    H = build_ising(build_chain(10), -1.0, 0.0)
    sol = lowest_eigenpairs(H, 4, tol=1e-10, seed=9)
    assert sol.energies[1] - sol.energies[0] < 1e-10
    assert sol.energies[2] - sol.energies[0] > 0.5


def test_determinism_same_seed():
    H = build_ising(build_chain(9), -1.0, 0.3)
    a = lowest_eigenpairs(H, 6, tol=1e-9, seed=42)
    b = lowest_eigenpairs(H, 6, tol=1e-9, seed=42)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.vectors, b.vectors)


def test_k_validation():
    H = build_ising(build_chain(4), -1.0, 0.2)
    with pytest.raises(ValueError):
        lowest_eigenpairs(H, 0)
    with pytest.raises(ValueError):
        lowest_eigenpairs(H, 65)
    H1 = build_ising(build_chain(2), -1.0, 0.2)
    with pytest.raises(ValueError):
        lowest_eigenpairs(H1, 5)


def test_nonconvergence_reports_best_residuals():
    H = build_ising(build_chain(12), -1.0, 0.49)
    with pytest.raises(ConvergenceError) as err:
        lowest_eigenpairs(H, 16, tol=1e-13, max_matvecs=40, seed=1)
    assert err.value.best_residuals is not None


def test_dense_fallback_tiny_spaces():
    H = build_dmi(build_chain(2), -0.5, 0.0, 0.0)
    sol = lowest_eigenpairs(H, 4, tol=1e-10)
    assert np.allclose(sol.energies, [-0.125, -0.125, -0.125, 0.375], atol=1e-12)


def test_dense_spectrum_limits():
    H = build_ising(build_chain(13), -1.0, 0.1)
    with pytest.raises(ValueError):
        dense_spectrum(H)


def test_group_multiplets_examples():
    groups = group_multiplets([-4.0, -4.0 + 1e-13, -3.2], 1e-10)
    assert [g.degree for g in groups] == [2, 1]
    assert groups[0].start_index == 0
    assert groups[0].gap_above == pytest.approx(0.8, abs=1e-6)
    assert groups[1].gap_above == np.inf

    groups = group_multiplets([1.0, 2.0, 3.5], 1e-3)
    assert [g.degree for g in groups] == [1, 1, 1]

    with pytest.raises(ValueError):
        group_multiplets([1.0, 0.5], 1e-8)
    assert group_multiplets([], 1e-8) == []


def test_refine_degenerate_block_identity_on_eigenvectors():
    H = build_ising(build_chain(8), -1.0, 0.0)
    sol = lowest_eigenpairs(H, 2, tol=1e-10, seed=2)
    rotated, evals = refine_degenerate_block(H, sol.vectors[:2])
    gram = rotated.conj() @ rotated.T
    assert np.abs(gram - np.eye(2)).max() < 1e-10
    assert np.allclose(np.sort(evals), sol.energies[:2], atol=1e-9)
    # same span: projector difference vanishes
    p_old = sol.vectors[:2].T @ sol.vectors[:2].conj()
    p_new = rotated.T @ rotated.conj()
    assert np.abs(p_old - p_new).max() < 1e-9


def test_refine_degenerate_block_fixes_mixed_pair():
    H = build_ising(build_chain(8), -1.0, 0.0)
    sol = lowest_eigenpairs(H, 2, tol=1e-10, seed=4)
    theta = 0.7
    mix = np.stack([
        np.cos(theta) * sol.vectors[0] + np.sin(theta) * sol.vectors[1],
        -np.sin(theta) * sol.vectors[0] + np.cos(theta) * sol.vectors[1],
    ])
    rotated, evals = refine_degenerate_block(H, mix)
    for v, e in zip(rotated, evals):
        assert np.linalg.norm(apply(H, v) - e * v) <= 1e-9


def test_refine_degenerate_block_rejects_dependent_vectors():
    H = build_ising(build_chain(6), -1.0, 0.0)
    sol = lowest_eigenpairs(H, 2, tol=1e-10, seed=5)
    bad = np.stack([sol.vectors[0], sol.vectors[0] * (1 + 1e-12)])
    with pytest.raises(ValueError):
        refine_degenerate_block(H, bad)

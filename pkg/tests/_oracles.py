"""Brute-force reference implementations used only by the tests.

Everything here is built from explicit Kronecker products or explicit
partial traces, independent of the package's bit-kernel and reshape/SVD
code paths.
"""

import numpy as np

SX = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
SPIN = {"x": SX, "y": SY, "z": SZ}


def site_operator_dense(n, site, op2):
    """Embed a 2x2 operator at a site (basis index bit i = site i)."""
    return np.kron(np.eye(1 << (n - 1 - site)), np.kron(op2, np.eye(1 << site)))


def product_operator_dense(n, ops):
    """Dense matrix of a product of single-site spin operators."""
    out = np.eye(1 << n, dtype=complex)
    for site, axis in ops:
        out = out @ site_operator_dense(n, site, SPIN[axis])
    return out


def partial_trace_rho(state, a_sites, n):
    """Reduced density matrix of subsystem A by explicit tensor contraction."""
    a_sites = sorted(a_sites)
    b_sites = [s for s in range(n) if s not in a_sites]
    tensor = state.reshape((2,) * n)
    axes = [n - 1 - s for s in a_sites] + [n - 1 - s for s in b_sites]
    mat = np.transpose(tensor, axes).reshape(1 << len(a_sites), 1 << len(b_sites))
    return mat @ mat.conj().T


def chirality_operator_dense(n, triangle):
    """S_1 . (S_2 x S_3) on a site triple, as a dense matrix."""
    i, j, k = triangle
    eps = {
        ("x", "y", "z"): 1.0, ("y", "z", "x"): 1.0, ("z", "x", "y"): 1.0,
        ("x", "z", "y"): -1.0, ("z", "y", "x"): -1.0, ("y", "x", "z"): -1.0,
    }
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for (a, b, c), sign in eps.items():
        out += sign * product_operator_dense(n, [(i, a), (j, b), (k, c)])
    return out


def random_state(n, rng):
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def random_orthonormal_states(n, count, rng):
    raw = rng.standard_normal((1 << n, count)) + 1j * rng.standard_normal((1 << n, count))
    q, _ = np.linalg.qr(raw)
    return np.ascontiguousarray(q.T)


def triangular_min_image_pairs(positions, t1, t2, target_dist):
    """Independently enumerate site pairs at a given minimum-image distance."""
    n = len(positions)
    images = [p * np.asarray(t1) + q * np.asarray(t2) for p in range(-3, 4) for q in range(-3, 4)]
    pairs = set()
    for i in range(1, n):
        for j in range(i):
            delta = np.asarray(positions[i]) - np.asarray(positions[j])
            dmin = min(np.linalg.norm(delta + im) for im in images)
            if abs(dmin - target_dist) < 1e-9:
                pairs.add((i, j))
    return pairs

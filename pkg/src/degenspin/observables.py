"""Degenerate-manifold averages: magnetizations, Ursell correlators, chirality.

With a degenerate (or nearly degenerate) ground multiplet {psi_d}, the
physically meaningful expectation of an observable X is the uniform average
(1/D) sum_d <psi_d|X|psi_d>, which equals Tr(P X)/D for the subspace
projector P and is therefore invariant under any unitary remixing of the
multiplet basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spinops import apply_site_product, site_product_expectation

__all__ = [
    "ObservableReport",
    "degenerate_average",
    "local_magnetization",
    "ursell2",
    "ursell3",
    "scalar_chirality",
]

# signed permutations of (x, y, z): the triple-product expansion
_LEVI_CIVITA = (
    (("x", "y", "z"), 1.0),
    (("y", "z", "x"), 1.0),
    (("z", "x", "y"), 1.0),
    (("x", "z", "y"), -1.0),
    (("z", "y", "x"), -1.0),
    (("y", "x", "z"), -1.0),
)


@dataclass
class ObservableReport:
    """Per-field-point observable bundle written to the sweep CSV.

    gamma2_* are shell-averaged two-spin Ursell functions; gamma3 averages
    the three-spin function over the triangle list.  Entries that do not
    apply to a geometry (no triangles, no shell-2 pairs) stay None.
    """

    h: float
    degeneracy: int
    chirality: float | None
    gamma2_nn: float | None
    gamma2_nnn: float | None
    gamma3: float | None
    local_moments: np.ndarray | None = None


def _as_state_list(states) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(states))
    if arr.shape[0] < 1:
        raise ValueError("empty state list")
    return arr


def degenerate_average(states, ops) -> float:
    """(1/D) sum_d <psi_d| X |psi_d> for X a product of single-site spins.

    ops is a sequence of up to three (site, axis) factors on distinct sites;
    states are the orthonormal multiplet members.
    """
    arr = _as_state_list(states)
    if not 1 <= len(ops) <= 3:
        raise ValueError("operator product must have 1 to 3 factors")
    return float(np.mean([site_product_expectation(s, ops) for s in arr]))


def local_magnetization(states, axis: str) -> np.ndarray:
    """Per-site degenerate-averaged <S^axis_i>."""
    arr = _as_state_list(states)
    n = arr.shape[1].bit_length() - 1
    return np.array([degenerate_average(arr, [(i, axis)]) for i in range(n)])


def ursell2(states, i: int, j: int) -> float:
    """Two-spin Ursell (connected) function <Sz_i Sz_j> - <Sz_i><Sz_j>."""
    if i == j:
        raise ValueError("ursell2 needs two distinct sites")
    arr = _as_state_list(states)
    zz = degenerate_average(arr, [(i, "z"), (j, "z")])
    zi = degenerate_average(arr, [(i, "z")])
    zj = degenerate_average(arr, [(j, "z")])
    return zz - zi * zj


def ursell3(states, i: int, j: int, k: int, symmetric: bool = False) -> float:
    """Three-spin zzz correlation function on a site triple.

    Default form distinguishes the first index:
        <zzz> - 3 <z_i><z_j z_k> + 2 <z_i><z_j><z_k>.
    With symmetric=True the fully symmetric cumulant is returned instead:
        <zzz> - <z_i><z_j z_k> - <z_j><z_i z_k> - <z_k><z_i z_j>
              + 2 <z_i><z_j><z_k>.
    """
    if len({i, j, k}) != 3:
        raise ValueError("ursell3 needs three distinct sites")
    arr = _as_state_list(states)
    zzz = degenerate_average(arr, [(i, "z"), (j, "z"), (k, "z")])
    z = {s: degenerate_average(arr, [(s, "z")]) for s in (i, j, k)}
    zz = {
        (a, b): degenerate_average(arr, [(a, "z"), (b, "z")])
        for a, b in ((j, k), (i, k), (i, j))
    }
    triple = 2.0 * z[i] * z[j] * z[k]
    if symmetric:
        return zzz - z[i] * zz[(j, k)] - z[j] * zz[(i, k)] - z[k] * zz[(i, j)] + triple
    return zzz - 3.0 * z[i] * zz[(j, k)] + triple


def mixed_product_average(states, triangle) -> float:
    """Degenerate average of S_1 . (S_2 x S_3) on one ordered triangle."""
    i, j, k = triangle
    if len({i, j, k}) != 3:
        raise ValueError(f"malformed triangle {triangle}")
    arr = _as_state_list(states)
    total = 0.0
    for (mu, nu, lam), sign in _LEVI_CIVITA:
        total += sign * degenerate_average(arr, [(i, mu), (j, nu), (k, lam)])
    return total


def scalar_chirality(states, triangles, n_triangles: int | None = None) -> float:
    """Scalar chirality (N_tri / pi) <S_1 . [S_2 x S_3]> over the triangle list.

    The bracket is the degenerate average of the mixed product, averaged over
    all listed triangles; N_tri defaults to the number of listed triangles.
    """
    triangles = list(triangles)
    if not triangles:
        raise ValueError("empty triangle list")
    n_tri = len(triangles) if n_triangles is None else n_triangles
    mean_chi = float(np.mean([mixed_product_average(states, t) for t in triangles]))
    return n_tri / np.pi * mean_chi


class DiagonalCorrelators:
    """Degenerate-averaged z-correlators from Born weights.

    Products of S^z operators are diagonal in the computational basis, so
    every <z>, <zz>, <zzz> bracket reduces to one weighted sum; this makes
    shell and triangle averages cheap even at 2^19 dimensions.  Results are
    identical to the generic operator path.
    """

    def __init__(self, states):
        arr = _as_state_list(states)
        self._weights = (np.abs(arr) ** 2).mean(axis=0)
        n = arr.shape[1].bit_length() - 1
        idx = np.arange(arr.shape[1], dtype=np.int64)
        self._zvals = [0.5 - ((idx >> i) & 1).astype(float) for i in range(n)]

    def z(self, i: int) -> float:
        return float(self._weights @ self._zvals[i])

    def zz(self, i: int, j: int) -> float:
        return float(self._weights @ (self._zvals[i] * self._zvals[j]))

    def zzz(self, i: int, j: int, k: int) -> float:
        return float(self._weights @ (self._zvals[i] * self._zvals[j] * self._zvals[k]))

    def ursell2(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("ursell2 needs two distinct sites")
        return self.zz(i, j) - self.z(i) * self.z(j)

    def ursell3(self, i: int, j: int, k: int, symmetric: bool = False) -> float:
        if len({i, j, k}) != 3:
            raise ValueError("ursell3 needs three distinct sites")
        triple = 2.0 * self.z(i) * self.z(j) * self.z(k)
        if symmetric:
            return (
                self.zzz(i, j, k)
                - self.z(i) * self.zz(j, k)
                - self.z(j) * self.zz(i, k)
                - self.z(k) * self.zz(i, j)
                + triple
            )
        return self.zzz(i, j, k) - 3.0 * self.z(i) * self.zz(j, k) + triple


def build_report(h: float, states, geometry, axis: str = "z") -> ObservableReport:
    """All observables of one field point in a single bundle.

    Shell averages, the triangle-averaged three-spin function and chirality
    are filled only where the geometry supports them (None otherwise).
    """
    arr = _as_state_list(states)
    table = DiagonalCorrelators(arr)
    nn = list(geometry.shell_pairs(1))
    nnn = list(geometry.shell_pairs(2))
    triangles = list(geometry.triangles)
    report = ObservableReport(
        h=h,
        degeneracy=arr.shape[0],
        chirality=scalar_chirality(arr, triangles) if triangles else None,
        gamma2_nn=float(np.mean([table.ursell2(i, j) for i, j in nn])) if nn else None,
        gamma2_nnn=float(np.mean([table.ursell2(i, j) for i, j in nnn])) if nnn else None,
        gamma3=float(np.mean([table.ursell3(*t) for t in triangles])) if triangles else None,
        local_moments=local_magnetization(arr, axis),
    )
    for name in ("chirality", "gamma2_nn", "gamma2_nnn", "gamma3"):
        value = getattr(report, name)
        assert value is None or np.isfinite(value), f"{name} not finite"
    assert np.all(np.abs(report.local_moments) <= 0.5 + 1e-10)
    for g2 in (report.gamma2_nn, report.gamma2_nnn):
        assert g2 is None or abs(g2) <= 0.5 + 1e-10
    return report


def shell_average_ursell2(states, pairs) -> float | None:
    """Mean two-spin Ursell function over a shell's pair list."""
    pairs = list(pairs)
    if not pairs:
        return None
    table = DiagonalCorrelators(states)
    return float(np.mean([table.ursell2(i, j) for i, j in pairs]))


def triangle_average_ursell3(states, triangles, symmetric: bool = False) -> float | None:
    """Mean three-spin function over the triangle list (stored vertex order)."""
    triangles = list(triangles)
    if not triangles:
        return None
    table = DiagonalCorrelators(states)
    return float(np.mean([table.ursell3(*t, symmetric=symmetric) for t in triangles]))

"""Spin-1/2 Hamiltonians as term lists with matrix-free application.

A Hamiltonian is a collection of one-site terms c * S^mu_i and two-site
terms sum_{mu,nu} M[mu,nu] S^mu_i S^nu_j with real coefficients, so it is
Hermitian by construction.  Application to a state never materializes the
2^n x 2^n matrix: terms are compiled once into a diagonal vector plus a
flat list of bit-flip transitions and evaluated by a numba kernel in
O(terms * 2^n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .lattice import LatticeGeometry
from .spinops import AXES, spin_matrix

__all__ = ["HamiltonianTerms", "build_ising", "build_dmi", "apply", "expectation"]

_AXIS_ID = {"x": 0, "y": 1, "z": 2}

# levi-civita tensor
_EPS = np.zeros((3, 3, 3))
for _p, _s in (((0, 1, 2), 1.0), ((1, 2, 0), 1.0), ((2, 0, 1), 1.0),
               ((0, 2, 1), -1.0), ((2, 1, 0), -1.0), ((1, 0, 2), -1.0)):
    _EPS[_p] = _s


@dataclass
class HamiltonianTerms:
    """Term-list representation of a spin-1/2 Hamiltonian.

    one_site_terms: (site, axis, coefficient) for c * S^axis_site.
    two_site_terms: (i, j, M) with i > j and real 3x3 M for
    sum_{mu,nu} M[mu,nu] S^mu_i S^nu_j.
    """

    n_sites: int
    one_site_terms: list
    two_site_terms: list
    _compiled: "CompiledTerms | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site")
        for site, axis, c in self.one_site_terms:
            if not 0 <= site < self.n_sites:
                raise ValueError(f"one-site term on site {site} outside lattice")
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r}")
            if abs(complex(c).imag) > 0:
                raise ValueError("coefficients must be real (Hermiticity)")
        seen = set()
        for i, j, mat in self.two_site_terms:
            if not 0 <= j < i < self.n_sites:
                raise ValueError(f"two-site term ({i}, {j}) must have n > i > j >= 0")
            if (i, j) in seen:
                raise ValueError(f"pair ({i}, {j}) appears more than once")
            seen.add((i, j))
            mat = np.asarray(mat)
            if mat.shape != (3, 3) or np.iscomplexobj(mat):
                raise ValueError("coupling matrix must be real 3x3")

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def compiled(self) -> "CompiledTerms":
        """Diagonal + flip-transition tables used by the application kernel."""
        if self._compiled is None:
            self._compiled = _compile_terms(self)
        return self._compiled


def build_ising(geometry: LatticeGeometry, J: float, h: float) -> HamiltonianTerms:
    """Transverse-field Ising chain: sum_bonds J S^z_i S^z_j + h sum_i S^x_i.

    Each shell-1 bond is counted once, so the ferromagnetic (J < 0) ground
    energy at h = 0 is n_bonds * J / 4 and the ferromagnet-paramagnet
    transition sits at h = 0.5 |J|.
    """
    two_site = []
    for i, j in geometry.shell_pairs(1):
        m = np.zeros((3, 3))
        m[2, 2] = J
        two_site.append((i, j, m))
    one_site = [(i, "x", h) for i in range(geometry.n_sites)] if h != 0.0 else []
    return HamiltonianTerms(geometry.n_sites, one_site, two_site)


def build_dmi(
    geometry: LatticeGeometry,
    J: float,
    D_magnitude: float,
    h: float,
    dm_sign: int = 1,
) -> HamiltonianTerms:
    """Heisenberg + Dzyaloshinskii-Moriya model with a z-axis field.

    H = sum_{i>j} J S_i . S_j + sum_{i>j} D_ij . [S_i x S_j] + h sum_i S^z_i
    over shell-1 bonds.  D_ij = dm_sign * D_magnitude * (z_hat x u_ij) lies
    in the lattice plane, perpendicular to the bond, with u_ij the unit
    displacement from site j to site i.  dm_sign = -1 selects the opposite
    (u_ij x z_hat) convention.
    """
    if dm_sign not in (1, -1):
        raise ValueError("dm_sign must be +1 or -1")
    two_site = []
    for i, j, shell, u in geometry.bonds:
        if shell != 1:
            continue
        d_vec = dm_sign * D_magnitude * np.array([-u[1], u[0], 0.0])
        m = J * np.eye(3) + np.einsum("m,mnl->nl", d_vec, _EPS)
        two_site.append((i, j, m))
    one_site = [(i, "z", h) for i in range(geometry.n_sites)] if h != 0.0 else []
    return HamiltonianTerms(geometry.n_sites, one_site, two_site)


@dataclass
class CompiledTerms:
    """Kernel-ready form: a diagonal plus bit-flip transition tables.

    Single-bit flips are grouped by flipped site (all partner-dependent
    coefficients of that site merge into one gather stream); double-bit
    flips keep one entry per bond.  For output index s the kernel adds
    coef(bits of s) * v[s ^ mask].
    """

    diag: np.ndarray
    ss_site: np.ndarray  # flipped site per single-flip group
    ss_ptr: np.ndarray  # CSR-style offsets into ss_partner / ss_tab
    ss_partner: np.ndarray  # coefficient partner site per entry
    ss_tab: np.ndarray  # (entries, 2, 2): [bit_site, bit_partner]
    db_i: np.ndarray  # double-flip site pairs
    db_j: np.ndarray
    db_tab: np.ndarray  # (bonds, 2, 2): [bit_i, bit_j]
    offdiag_scale: float  # row-sum bound on the off-diagonal part

    @property
    def has_offdiagonal(self) -> bool:
        return bool(self.ss_site.size or self.db_i.size)


def _compile_terms(H: HamiltonianTerms) -> CompiledTerms:
    n = H.n_sites
    dim = 1 << n
    diag = np.zeros(dim)

    def zsign(site):
        idx = np.arange(dim, dtype=np.int64)
        return 0.5 - ((idx >> site) & 1).astype(np.float64)

    singles: dict = {}  # flipped site -> list of (partner, tab[b_site, b_partner])
    doubles = []

    def push_single(site, partner, tab):
        if np.any(tab != 0):
            singles.setdefault(site, []).append((partner, tab))

    for site, axis, c in H.one_site_terms:
        if c == 0:
            continue
        if axis == "z":
            diag += c * zsign(site)
        else:
            s2 = spin_matrix(axis)
            tab = np.zeros((2, 2), dtype=complex)
            for b in (0, 1):
                tab[b, b] = c * s2[b, 1 - b]  # partner = site itself
            push_single(site, site, tab)

    sx, sy = spin_matrix("x"), spin_matrix("y")
    flip_amps = {0: sx, 1: sy}
    for i, j, mat in H.two_site_terms:
        mat = np.asarray(mat, dtype=float)
        if mat[2, 2] != 0:
            diag += mat[2, 2] * zsign(i) * zsign(j)

        tab_both = np.zeros((2, 2), dtype=complex)
        tab_i = np.zeros((2, 2), dtype=complex)
        tab_j = np.zeros((2, 2), dtype=complex)
        for bi in (0, 1):
            for bj in (0, 1):
                zi = 0.5 - bi
                zj = 0.5 - bj
                for mu in (0, 1):
                    for nu in (0, 1):
                        tab_both[bi, bj] += (
                            mat[mu, nu] * flip_amps[mu][bi, 1 - bi] * flip_amps[nu][bj, 1 - bj]
                        )
                    tab_i[bi, bj] += mat[mu, 2] * flip_amps[mu][bi, 1 - bi] * zj
                    tab_j[bi, bj] += mat[2, mu] * zi * flip_amps[mu][bj, 1 - bj]
        if np.any(tab_both != 0):
            doubles.append((i, j, tab_both))
        push_single(i, j, tab_i)
        push_single(j, i, tab_j.T)  # reindex to [b_flipped, b_partner]

    ss_site, ss_ptr, ss_partner, ss_tab = [], [0], [], []
    for site in sorted(singles):
        ss_site.append(site)
        for partner, tab in singles[site]:
            ss_partner.append(partner)
            ss_tab.append(tab)
        ss_ptr.append(len(ss_partner))

    def arr(x, dtype=np.int64):
        return np.array(x, dtype=dtype)

    ss_tab_arr = (
        np.ascontiguousarray(np.stack(ss_tab)).astype(np.complex128)
        if ss_tab
        else np.zeros((0, 2, 2), dtype=np.complex128)
    )
    db_tab_arr = (
        np.ascontiguousarray(np.stack([t for _, _, t in doubles])).astype(np.complex128)
        if doubles
        else np.zeros((0, 2, 2), dtype=np.complex128)
    )
    scale = 0.0
    for t in ss_tab:
        scale += float(np.abs(t).max())
    for _, _, t in doubles:
        scale += float(np.abs(t).max())
    return CompiledTerms(
        diag=diag,
        ss_site=arr(ss_site),
        ss_ptr=arr(ss_ptr),
        ss_partner=arr(ss_partner),
        ss_tab=ss_tab_arr,
        db_i=arr([i for i, _, _ in doubles]),
        db_j=arr([j for _, j, _ in doubles]),
        db_tab=db_tab_arr,
        offdiag_scale=scale,
    )


@njit(cache=True, fastmath=True)
def _apply_kernel(v, out, diag, ss_site, ss_ptr, ss_partner, ss_tab,
                  db_i, db_j, db_tab):  # pragma: no cover
    ns, nb = v.shape
    ng = ss_site.shape[0]
    nt = db_i.shape[0]
    for s in range(ns):
        d = diag[s]
        for c in range(nb):
            out[s, c] = d * v[s, c]
        for g in range(ng):
            a = ss_site[g]
            ba = (s >> a) & 1
            coef = 0.0 + 0.0j
            for t in range(ss_ptr[g], ss_ptr[g + 1]):
                coef += ss_tab[t, ba, (s >> ss_partner[t]) & 1]
            if coef != 0:
                src = s ^ (1 << a)
                for c in range(nb):
                    out[s, c] += coef * v[src, c]
        for t in range(nt):
            coef = db_tab[t, (s >> db_i[t]) & 1, (s >> db_j[t]) & 1]
            if coef != 0:
                src = s ^ ((1 << db_i[t]) | (1 << db_j[t]))
                for c in range(nb):
                    out[s, c] += coef * v[src, c]


def apply(H: HamiltonianTerms, v: np.ndarray) -> np.ndarray:
    """H @ v for a state vector (dim,) or a block of columns (dim, b)."""
    single = v.ndim == 1
    if v.shape[0] != H.dim:
        raise ValueError(f"dimension mismatch: state {v.shape[0]}, Hamiltonian {H.dim}")
    vb = np.ascontiguousarray(v.reshape(H.dim, -1), dtype=np.complex128)
    out = np.empty_like(vb)
    ct = H.compiled()
    _apply_kernel(
        vb, out, ct.diag, ct.ss_site, ct.ss_ptr, ct.ss_partner, ct.ss_tab,
        ct.db_i, ct.db_j, ct.db_tab,
    )
    return out[:, 0] if single else out.reshape(v.shape)


def expectation(H: HamiltonianTerms, v: np.ndarray) -> float:
    """Real energy <v|H|v> of a normalized state."""
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"state not normalized: |norm - 1| = {abs(nrm - 1.0):.3e}")
    val = np.vdot(v, apply(H, v))
    assert abs(val.imag) < 1e-10, f"energy has imaginary part {val.imag:.3e}"
    return float(val.real)

"""Lattice geometries: periodic chains and triangular supercells.

A geometry is a static description of sites, bonds (grouped into neighbor
shells), and nearest-neighbor triangles.  Bonds carry the minimum-image
unit displacement from the lower site to the higher one, which the
Dzyaloshinskii-Moriya couplings need.  Geometries can also be serialized
to / loaded from JSON so alternative clusters can be swapped in without
code changes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeGeometry",
    "build_chain",
    "build_triangular_supercell",
    "geometry_to_json",
    "geometry_from_json",
    "geometric_half_sites",
]

# Primitive vectors of the triangular lattice (lattice constant 1).
_A1 = np.array([1.0, 0.0])
_A2 = np.array([0.5, math.sqrt(3.0) / 2.0])


@dataclass(frozen=True)
class LatticeGeometry:
    """Immutable description of a finite periodic cluster.

    bonds are (i, j, shell, unit_displacement) tuples with i > j; the
    displacement points from site j to site i under the minimum-image
    convention.  ``shells`` maps shell number (1 = nearest neighbor) to the
    pair list of that shell.  ``triangles`` holds counterclockwise-ordered
    nearest-neighbor triples that are pairwise edge-disjoint.
    """

    n_sites: int
    positions: np.ndarray  # (n_sites, 2)
    bonds: tuple  # of (i, j, shell, (ux, uy))
    shells: dict  # shell -> tuple of (i, j)
    triangles: tuple = ()  # of (i, j, k)
    translation_vectors: tuple = ()  # () for chains, else (T1, T2)

    def shell_pairs(self, shell: int):
        """Site pairs (i, j), i > j, belonging to the given neighbor shell."""
        return self.shells.get(shell, ())

    def shell_bonds(self, shell: int):
        """Full bond records of the given shell."""
        return tuple(b for b in self.bonds if b[2] == shell)

    def degree(self, shell: int = 1) -> np.ndarray:
        """Per-site number of neighbors in the given shell."""
        deg = np.zeros(self.n_sites, dtype=int)
        for i, j in self.shell_pairs(shell):
            deg[i] += 1
            deg[j] += 1
        return deg


def build_chain(n: int, periodic: bool = True) -> LatticeGeometry:
    """Chain of n sites with unit spacing; shell-1 bonds join consecutive sites.

    With periodic boundaries and n >= 3 the wrap-around bond is included, so
    the chain has exactly n nearest-neighbor bonds.  For n = 2 the single
    bond is never duplicated (a doubled coupling would silently rescale J).
    Next-nearest pairs are listed as shell 2 when they are distinct from
    shell-1 pairs.
    """
    if n < 1:
        raise ValueError(f"need at least one site, got n={n}")
    positions = np.column_stack([np.arange(n, dtype=float), np.zeros(n)])

    bonds = []
    for i in range(1, n):
        bonds.append((i, i - 1, 1, (1.0, 0.0)))
    if periodic and n >= 3:
        # wrap bond: from site 0 the minimum image of site n-1 sits at x = -1
        bonds.append((n - 1, 0, 1, (-1.0, 0.0)))

    # next-nearest neighbors (used by shell-resolved correlators)
    if periodic and n >= 5:
        for i in range(n):
            if i + 2 < n:
                bonds.append((i + 2, i, 2, (2.0, 0.0)))
            else:
                # wrap pair (i, i + 2 - n): the higher site's nearest image
                # sits two steps to the left of the lower one
                bonds.append((i, i + 2 - n, 2, (-2.0, 0.0)))
    elif not periodic and n >= 3:
        for i in range(n - 2):
            bonds.append((i + 2, i, 2, (2.0, 0.0)))

    shells: dict = {}
    for i, j, s, _ in bonds:
        shells.setdefault(s, []).append((i, j))
    shells = {s: tuple(p) for s, p in shells.items()}

    return LatticeGeometry(
        n_sites=n,
        positions=positions,
        bonds=tuple(bonds),
        shells=shells,
        triangles=(),
        translation_vectors=(),
    )


def _supercell_classes(a: int, b: int):
    """Map integer lattice points onto the N classes of the supercell quotient.

    The supercell translations are T1 = a*a1 + b*a2 and T2 = -b*a1 + (a+b)*a2,
    with |det| = a^2 + ab + b^2 = N.  In integer (m, n) coordinates the class
    key of a point is (( (a+b)m + bn ) mod N, ( -bm + an ) mod N).
    """
    n_cells = a * a + a * b + b * b

    def key(m: int, n: int):
        return (((a + b) * m + b * n) % n_cells, (-b * m + a * n) % n_cells)

    return n_cells, key


def build_triangular_supercell(a: int, b: int) -> LatticeGeometry:
    """Periodic triangular cluster with N = a^2 + ab + b^2 sites.

    Sites are chosen as the minimum-norm representative of each class of the
    quotient lattice, which yields a compact (hexagon-like) plaquette.
    Shell-1 and shell-2 bonds are found by minimum-image distance, and the
    triangle list contains the N upward-pointing nearest-neighbor triangles
    (counterclockwise vertex order, pairwise edge-disjoint).
    """
    n_cells, key = _supercell_classes(a, b)
    if n_cells < 7:
        raise ValueError(
            f"supercell ({a}, {b}) has only {n_cells} sites; minimum-image "
            "neighbor finding needs at least 7"
        )

    t1 = a * _A1 + b * _A2
    t2 = -b * _A1 + (a + b) * _A2

    # One representative (m, n) per class, minimizing |m a1 + n a2|.
    reach = 2 * (abs(a) + abs(b)) + 2
    reps: dict = {}
    for m in range(-reach, reach + 1):
        for n in range(-reach, reach + 1):
            r = m * _A1 + n * _A2
            d = float(r @ r)
            k = key(m, n)
            if k not in reps or d < reps[k][0] - 1e-12:
                reps[k] = (d, m, n)
    assert len(reps) == n_cells
    # stable site numbering: sort by distance from origin, then angle
    entries = sorted(
        reps.items(),
        key=lambda kv: (round(kv[1][0], 9), math.atan2(*(kv[1][2] * _A2 + kv[1][1] * _A1)[::-1])),
    )
    class_to_site = {k: idx for idx, (k, _) in enumerate(entries)}
    coords_mn = [(m, n) for _, (_, m, n) in entries]
    positions = np.array([m * _A1 + n * _A2 for m, n in coords_mn])

    # minimum-image displacements between all site pairs
    images = [p * t1 + q * t2 for p in (-2, -1, 0, 1, 2) for q in (-2, -1, 0, 1, 2)]
    images = np.array(images)

    def min_image(delta: np.ndarray):
        cands = delta[None, :] + images
        d2 = np.einsum("ij,ij->i", cands, cands)
        best = np.argmin(d2)
        ties = np.sum(np.abs(d2 - d2[best]) < 1e-9)
        return cands[best], math.sqrt(d2[best]), ties

    shell_r = {1: 1.0, 2: math.sqrt(3.0)}
    bonds = []
    for i in range(1, n_cells):
        for j in range(i):
            disp, dist, ties = min_image(positions[i] - positions[j])
            for shell, r in shell_r.items():
                if abs(dist - r) < 1e-9:
                    if ties > 1:
                        raise ValueError(
                            f"ambiguous minimum image for pair ({i}, {j}); "
                            "supercell too small"
                        )
                    u = tuple(disp / dist)
                    bonds.append((i, j, shell, u))

    shells: dict = {}
    for i, j, s, _ in bonds:
        shells.setdefault(s, []).append((i, j))
    shells = {s: tuple(p) for s, p in shells.items()}

    # upward triangles: (r, r + a1, r + a2) in class space, CCW as listed
    triangles = []
    for m, n in coords_mn:
        tri = (
            class_to_site[key(m, n)],
            class_to_site[key(m + 1, n)],
            class_to_site[key(m, n + 1)],
        )
        triangles.append(tri)

    return LatticeGeometry(
        n_sites=n_cells,
        positions=positions,
        bonds=tuple(bonds),
        shells=shells,
        triangles=tuple(triangles),
        translation_vectors=(tuple(t1), tuple(t2)),
    )


def translation_permutation(geometry: LatticeGeometry, a: int, b: int, step=(1, 0)) -> np.ndarray:
    """Site permutation realizing a translation by step[0]*a1 + step[1]*a2.

    Only meaningful for supercells built by :func:`build_triangular_supercell`
    with the same (a, b); used to test translation invariance.
    """
    n_cells, key = _supercell_classes(a, b)
    if n_cells != geometry.n_sites:
        raise ValueError("geometry does not match the given supercell (a, b)")
    reach = 2 * (abs(a) + abs(b)) + 2
    class_to_site: dict = {}
    # recover class -> site map from positions
    for idx in range(geometry.n_sites):
        x, y = geometry.positions[idx]
        n = round(y / _A2[1])
        m = round(x - n * _A2[0])
        class_to_site[key(m, n)] = idx
    perm = np.zeros(geometry.n_sites, dtype=int)
    for idx in range(geometry.n_sites):
        x, y = geometry.positions[idx]
        n = round(y / _A2[1])
        m = round(x - n * _A2[0])
        perm[idx] = class_to_site[key(m + step[0], n + step[1])]
    return perm


def geometric_half_sites(geometry: LatticeGeometry, count: int) -> tuple:
    """The `count` sites with smallest x coordinate, ties broken by y.

    Default bipartition for two-dimensional clusters.
    """
    if not 0 < count < geometry.n_sites:
        raise ValueError(f"count must be in (0, {geometry.n_sites})")
    order = sorted(
        range(geometry.n_sites),
        key=lambda s: (round(geometry.positions[s][0], 9), round(geometry.positions[s][1], 9)),
    )
    return tuple(sorted(order[:count]))


def geometry_to_json(geometry: LatticeGeometry) -> str:
    """Serialize a geometry to the interchange JSON schema."""
    payload = {
        "n_sites": geometry.n_sites,
        "positions": [[float(x), float(y)] for x, y in geometry.positions],
        "bonds": [
            [int(i), int(j), int(s), [float(u[0]), float(u[1])]]
            for i, j, s, u in geometry.bonds
        ],
        "triangles": [[int(i), int(j), int(k)] for i, j, k in geometry.triangles],
    }
    if geometry.translation_vectors:
        payload["translation_vectors"] = [
            [float(c) for c in t] for t in geometry.translation_vectors
        ]
    return json.dumps(payload, indent=2)


def geometry_from_json(text: str) -> LatticeGeometry:
    """Load a geometry from its JSON form, re-deriving the shell table."""
    payload = json.loads(text)
    n = int(payload["n_sites"])
    positions = np.array(payload["positions"], dtype=float)
    if positions.shape != (n, 2):
        raise ValueError("positions must be an (n_sites, 2) table")
    bonds = []
    seen = set()
    for i, j, s, u in payload["bonds"]:
        i, j, s = int(i), int(j), int(s)
        if not (0 <= j < i < n):
            raise ValueError(f"bond ({i}, {j}) must satisfy 0 <= j < i < n_sites")
        if (i, j, s) in seen:
            raise ValueError(f"duplicate bond ({i}, {j}) in shell {s}")
        seen.add((i, j, s))
        bonds.append((i, j, s, (float(u[0]), float(u[1]))))
    shells: dict = {}
    for i, j, s, _ in bonds:
        shells.setdefault(s, []).append((i, j))
    shells = {s: tuple(p) for s, p in shells.items()}
    triangles = tuple(tuple(int(v) for v in t) for t in payload.get("triangles", []))
    for t in triangles:
        if len(t) != 3 or len(set(t)) != 3:
            raise ValueError(f"malformed triangle {t}")
    tvecs = tuple(tuple(float(c) for c in t) for t in payload.get("translation_vectors", []))
    return LatticeGeometry(
        n_sites=n,
        positions=positions,
        bonds=tuple(bonds),
        shells=shells,
        triangles=triangles,
        translation_vectors=tvecs,
    )

"""Single-shot projective measurements of degenerate-manifold states.

The protocol mimics an experiment that can never prepare the same wave
function twice: each shot draws a fresh Haar-random superposition of the
multiplet, measures every spin once along a fixed axis, and discards the
state.  Per-site magnetizations are then estimated from the bitstring
frequencies, (p_up - p_down) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import sample_coefficients, sample_rng, superpose
from .spinops import apply_single_site_unitary, n_sites_of, norm_check

__all__ = [
    "MeasurementRecord",
    "MeasurementTally",
    "rotate_basis",
    "sample_bitstring",
    "single_shot_protocol",
    "estimate_magnetization",
    "write_records",
    "read_records",
]

_SQ2 = 1.0 / np.sqrt(2.0)
# map the S^axis eigenbasis onto the computational basis; the +1/2 outcome
# lands on bit 0
_ROTATIONS = {
    "z": np.eye(2, dtype=complex),
    "x": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "y": np.array([[_SQ2, -1j * _SQ2], [_SQ2, 1j * _SQ2]], dtype=complex),
}


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective measurement: site 0 is the first bitstring character.

    Character '0' means the +1/2 outcome along the measured axis.
    """

    shot_index: int
    basis_axis: str
    bitstring: str


@dataclass
class MeasurementTally:
    """Per-site up/down outcome counts accumulated over shots."""

    up: np.ndarray
    down: np.ndarray
    shots: int

    @classmethod
    def from_records(cls, records) -> "MeasurementTally":
        records = list(records)
        if not records:
            raise ValueError("no measurement records")
        n = len(records[0].bitstring)
        bits = np.array(
            [[1 if ch == "1" else 0 for ch in r.bitstring] for r in records], dtype=np.int64
        )
        if bits.shape[1] != n or any(len(r.bitstring) != n for r in records):
            raise ValueError("inconsistent bitstring lengths")
        down = bits.sum(axis=0)
        up = len(records) - down
        return cls(up=up, down=down, shots=len(records))


def rotate_basis(state: np.ndarray, axis: str) -> np.ndarray:
    """Rotate so that measuring S^axis becomes a computational-basis readout."""
    if axis not in _ROTATIONS:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    if axis == "z":
        return state.astype(complex, copy=True)
    return apply_single_site_unitary(state, _ROTATIONS[axis])


def sample_bitstring(state: np.ndarray, rng: np.random.Generator, shot_index: int = 0,
                     axis: str = "z") -> MeasurementRecord:
    """Draw one basis index with Born probabilities |amplitude|^2."""
    norm_check(state)
    n = n_sites_of(state)
    probs = np.abs(state) ** 2
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    idx = min(idx, probs.size - 1)
    bitstring = "".join("1" if (idx >> site) & 1 else "0" for site in range(n))
    return MeasurementRecord(shot_index=shot_index, basis_axis=axis, bitstring=bitstring)


def single_shot_protocol(
    multiplet_basis,
    shots: int,
    axis: str,
    master_seed: int,
    reuse_factor: int = 1,
) -> list:
    """Measure `shots` fresh Haar-random multiplet members once each.

    Every shot draws its own coefficients (stream (master_seed, shot, 0)) and
    its own outcome (stream (master_seed, shot, 1)), so records are
    reproducible shot by shot.  reuse_factor > 1 reuses one preparation for
    that many consecutive shots (ablation of the fresh-state-per-shot rule).
    """
    B = np.atleast_2d(np.asarray(multiplet_basis, dtype=complex))
    if shots < 1:
        raise ValueError("need at least one shot")
    if reuse_factor < 1:
        raise ValueError("reuse_factor must be >= 1")
    D = B.shape[0]
    # rotating each basis state once commutes with taking superpositions
    rotated = np.stack([rotate_basis(B[d], axis) for d in range(D)])
    records = []
    state = None
    for shot in range(shots):
        group = shot // reuse_factor
        if state is None or shot % reuse_factor == 0:
            coeffs = sample_coefficients(
                D, "haar_gaussian", sample_rng(master_seed, group, tag=0),
                seed_path=(master_seed, group),
            )
            state = superpose(rotated, coeffs)
        rec = sample_bitstring(state, sample_rng(master_seed, shot, tag=1), shot, axis)
        records.append(rec)
    return records


def estimate_magnetization(records) -> np.ndarray:
    """Per-site (p_up - p_down) / 2 from measured bitstring frequencies."""
    tally = MeasurementTally.from_records(records)
    return (tally.up - tally.down) / (2.0 * tally.shots)


def write_records(path, records, append: bool = False) -> None:
    """Text records, one 'shot_index,axis,bitstring' line per shot (LF)."""
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(f"{r.shot_index},{r.basis_axis},{r.bitstring}\n")


def read_records(path) -> list:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            shot, axis, bits = line.split(",")
            records.append(MeasurementRecord(int(shot), axis, bits))
    return records

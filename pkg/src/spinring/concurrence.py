"""Two-site reduced density matrices and nearest-neighbor concurrence.

Pair basis order is fixed everywhere as (uu, ud, du, dd), first arrow for the
first site of the pair.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .basis import sector_basis, sector_index
from .errors import BlockShapeError, ValidationError
from .states import RingState

PAIR_BASIS = ("uu", "ud", "du", "dd")

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
#: Off-block magnitudes below this count as zero when recognizing block form.
BLOCK_TOL = 1e-10


@dataclass(frozen=True)
class PairDensityMatrix:
    """Validated 4x4 density matrix of a qubit pair."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"pair density matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValidationError("pair density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise ValidationError(f"pair density matrix trace {np.trace(m)} != 1")
        if float(np.linalg.eigvalsh(m)[0]) < -PSD_TOL:
            raise ValidationError("pair density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class BlockPairDensityMatrix:
    """Pair density matrix diagonal in total pair magnetization.

    Diagonal (v, w, x, y) in the (uu, ud, du, dd) basis with the single
    coherence z between ud and du.
    """

    v: float
    w: float
    x: float
    y: float
    z: complex

    def __post_init__(self) -> None:
        for name in ("v", "w", "x", "y"):
            value = getattr(self, name)
            if value < -1e-12:
                raise ValidationError(f"negative probability {name}={value}")
            object.__setattr__(self, name, max(float(value), 0.0))
        total = self.v + self.w + self.x + self.y
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"block entries sum to {total}, not 1")
        if abs(self.z) ** 2 > self.w * self.x + 1e-12:
            raise ValidationError("central block is not positive semidefinite")

    def to_matrix(self) -> PairDensityMatrix:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.v, self.w, self.x, self.y
        m[1, 2] = self.z
        m[2, 1] = np.conj(self.z)
        return PairDensityMatrix(m)


def pair_rdm(state: RingState, site_a: int, site_b: int) -> PairDensityMatrix:
    """Partial trace of a pure sector state down to the two given sites (1-based)."""
    n = state.spec.n_sites
    if n < 2:
        raise ValidationError("pair reduction needs at least two sites")
    if site_a == site_b:
        raise ValidationError("pair sites must differ")
    for site in (site_a, site_b):
        if not 1 <= site <= n:
            raise ValidationError(f"site {site} outside 1..{n}")
    a, b = site_a - 1, site_b - 1
    pair_mask = (1 << a) | (1 << b)
    groups: dict[int, list[tuple[int, complex]]] = defaultdict(list)
    for bstate, amp in zip(sector_basis(state.spec), state.amplitudes):
        if amp == 0:
            continue
        bit_a = (bstate.bits >> a) & 1
        bit_b = (bstate.bits >> b) & 1
        idx = 2 * (1 - bit_a) + (1 - bit_b)
        groups[bstate.bits & ~pair_mask].append((idx, complex(amp)))
    rho = np.zeros((4, 4), dtype=complex)
    for members in groups.values():
        for i, ai in members:
            for j, aj in members:
                rho[i, j] += ai * np.conj(aj)
    return PairDensityMatrix(rho)


def block_form(rdm: PairDensityMatrix) -> BlockPairDensityMatrix:
    """Extract (v, w, x, y, z), rejecting matrices with cross-sector coherence."""
    m = rdm.entries
    allowed = {(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1)}
    for i in range(4):
        for j in range(4):
            if (i, j) in allowed:
                continue
            if abs(m[i, j]) > BLOCK_TOL:
                raise BlockShapeError(
                    f"entry ({PAIR_BASIS[i]},{PAIR_BASIS[j]}) = {m[i, j]:.3e} "
                    "breaks the block form"
                )
    return BlockPairDensityMatrix(
        v=m[0, 0].real, w=m[1, 1].real, x=m[2, 2].real, y=m[3, 3].real, z=complex(m[1, 2])
    )


def _check_range(raw: float) -> float:
    c = max(raw, 0.0)
    if c > 1.0 + 1e-9:
        raise ValidationError(f"concurrence {c} exceeds 1 beyond tolerance")
    return min(c, 1.0)


def concurrence_general(rdm: PairDensityMatrix) -> float:
    """Wootters concurrence from the spin-flipped spectrum of an arbitrary pair state."""
    rho = rdm.entries
    rho_tilde = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    eigenvalues = np.linalg.eigvals(rho @ rho_tilde)
    if np.max(np.abs(eigenvalues.imag)) > 1e-8:
        raise ValidationError("spin-flip spectrum came out non-real")
    real = eigenvalues.real
    if np.min(real) < -PSD_TOL:
        raise ValidationError(f"spin-flip spectrum has eigenvalue {np.min(real):.3e}")
    lams = np.sort(np.sqrt(np.clip(real, 0.0, None)))[::-1]
    return _check_range(float(lams[0] - lams[1] - lams[2] - lams[3]))


def concurrence_block(block: BlockPairDensityMatrix) -> float:
    """Closed-form concurrence 2*max(|z| - sqrt(v*y), 0) of the block form."""
    return _check_range(2.0 * (abs(block.z) - np.sqrt(block.v * block.y)))


def nearest_neighbor_concurrence(state: RingState, site: int = 1) -> float:
    """Concurrence of the (site, site+1) pair, via the block form when it applies."""
    n = state.spec.n_sites
    rdm = pair_rdm(state, site, site % n + 1)
    try:
        return concurrence_block(block_form(rdm))
    except BlockShapeError:
        return concurrence_general(rdm)


def pseudo_concurrence(state: RingState) -> float:
    """Twice the nearest-neighbor hopping expectation on the small ring.

    Evaluated bond by bond; shift invariance must make the per-bond values
    agree, and their spread is checked before averaging. Defined for real
    amplitude vectors only.
    """
    if np.max(np.abs(state.amplitudes.imag)) > 1e-12:
        raise ValidationError("pseudo-concurrence is defined for real amplitudes")
    spec = state.spec
    m, p = spec.n_sites, spec.n_up
    if p == 0 or m < 2:
        return 0.0
    from .basis import sector_index  # local import to avoid a cycle at import time

    index = sector_index(spec)
    amps = state.amplitudes.real
    values = []
    for j in range(m):
        jn = (j + 1) % m
        hop_mask = (1 << j) | (1 << jn)
        total = 0.0
        for bstate, amp in zip(sector_basis(spec), amps):
            bits = bstate.bits
            if (bits >> j) & 1 and not (bits >> jn) & 1:
                total += amp * amps[index[bits ^ hop_mask]]
        values.append(2.0 * total)
    if max(values) - min(values) > 1e-10:
        raise ValidationError(
            f"per-bond hopping values spread by {max(values) - min(values):.3e}; "
            "state is not shift invariant"
        )
    return float(np.mean(values))


def rho_to_jsonable(rdm: PairDensityMatrix) -> list[list[list[float]]]:
    """4x4 nested arrays of [re, im] pairs in the (uu, ud, du, dd) basis."""
    return [
        [[float(v.real), float(v.imag)] for v in row] for row in rdm.entries
    ]


def rho_from_jsonable(payload: list) -> PairDensityMatrix:
    m = np.array(
        [[complex(cell[0], cell[1]) for cell in row] for row in payload],
        dtype=complex,
    )
    return PairDensityMatrix(m)

"""Bitmask bases for fixed-magnetization ring sectors and their cyclic-shift orbits.

Conventions used throughout the package: site k (1-based) lives on bit k-1 of
the mask and a set bit is an up-spin. The string form prints site 1 leftmost
with '1' for up, so shifting by one rotates the string one place to the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .errors import CapacityError, EmptySectorError, ValidationError

#: Hard cap on ring size so masks stay within a 64-bit word.
MAX_SITES = 63


@dataclass(frozen=True)
class RingSpec:
    """A fixed-magnetization sector of an N-site ring.

    ``forbid_adjacent_up`` restricts the basis to configurations where no two
    up-spins sit on cyclically neighboring sites.
    """

    n_sites: int
    n_up: int
    forbid_adjacent_up: bool = False

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValidationError(f"ring needs at least one site, got {self.n_sites}")
        if self.n_sites > MAX_SITES:
            raise CapacityError(
                f"{self.n_sites} sites exceed the {MAX_SITES}-bit mask capacity"
            )
        if not 0 <= self.n_up <= self.n_sites:
            raise ValidationError(
                f"up-spin count {self.n_up} outside 0..{self.n_sites}"
            )

    @property
    def sector_is_empty(self) -> bool:
        """True when the adjacency constraint admits no configuration at all."""
        return self.forbid_adjacent_up and self.n_up > self.n_sites // 2

    def sector_size(self) -> int:
        """Number of basis states in this sector.

        For the constrained sector with 0 < p <= N/2 this is the cyclic
        no-two-adjacent count N/(N-p) * C(N-p, p).
        """
        n, p = self.n_sites, self.n_up
        if not self.forbid_adjacent_up:
            return comb(n, p)
        if p == 0:
            return 1
        if self.sector_is_empty:
            return 0
        return n * comb(n - p, p) // (n - p)


@dataclass(frozen=True)
class BasisState:
    """One computational basis configuration of the ring."""

    bits: int
    n_sites: int

    def __post_init__(self) -> None:
        if self.n_sites < 1 or self.n_sites > MAX_SITES:
            raise CapacityError(f"unsupported site count {self.n_sites}")
        if not 0 <= self.bits < (1 << self.n_sites):
            raise ValidationError(
                f"mask {self.bits:#x} out of range for {self.n_sites} sites"
            )

    def popcount(self) -> int:
        return self.bits.bit_count()

    def up_sites(self) -> tuple[int, ...]:
        """1-based site labels carrying an up-spin, ascending."""
        return tuple(k + 1 for k in range(self.n_sites) if (self.bits >> k) & 1)

    def to_string(self) -> str:
        """Bitstring with site 1 leftmost, '1' for up."""
        return "".join(
            "1" if (self.bits >> k) & 1 else "0" for k in range(self.n_sites)
        )

    @classmethod
    def from_string(cls, text: str) -> "BasisState":
        if not text or set(text) - {"0", "1"}:
            raise ValidationError(f"not a bitstring: {text!r}")
        bits = 0
        for k, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << k
        return cls(bits, len(text))


def shift(state: BasisState, k: int) -> BasisState:
    """Cyclic shift relabeling site i to i-k (mod N); the string rotates left."""
    n = state.n_sites
    k %= n
    if k == 0:
        return state
    m = state.bits
    mask = (1 << n) - 1
    return BasisState(((m >> k) | (m << (n - k))) & mask, n)


def has_adjacent_up(state: BasisState) -> bool:
    """True when some pair of cyclically neighboring sites is doubly occupied."""
    return (state.bits & shift(state, 1).bits) != 0


def enumerate_sector(spec: RingSpec) -> list[BasisState]:
    """All basis states of the sector in bitstring-lexicographic order."""
    if spec.sector_is_empty:
        raise EmptySectorError(
            f"no {spec.n_up}-up configurations without adjacent up-spins on "
            f"{spec.n_sites} sites (max is {spec.n_sites // 2})"
        )
    states = []
    for positions in combinations(range(spec.n_sites), spec.n_up):
        bits = 0
        for q in positions:
            bits |= 1 << q
        state = BasisState(bits, spec.n_sites)
        if spec.forbid_adjacent_up and has_adjacent_up(state):
            continue
        states.append(state)
    states.sort(key=BasisState.to_string)
    return states


@dataclass(frozen=True)
class Orbit:
    """A cyclic-shift equivalence class; members[s] == shift(representative, s)."""

    representative: BasisState
    period: int
    members: tuple[BasisState, ...]


@dataclass(frozen=True)
class OrbitTable:
    """Partition of a sector basis into shift orbits plus a reverse index."""

    orbits: tuple[Orbit, ...]
    _index: dict[int, tuple[int, int]]

    def locate(self, state: BasisState) -> tuple[int, int]:
        """Return (orbit id, shift offset from the representative)."""
        try:
            return self._index[state.bits]
        except KeyError:
            raise ValidationError(
                f"state {state.to_string()} not in this orbit table"
            ) from None

    def __len__(self) -> int:
        return len(self.orbits)


def build_orbits(basis: list[BasisState]) -> OrbitTable:
    """Group a sector basis into shift orbits.

    The representative of each orbit is its lexicographically smallest
    bitstring; visiting the (sorted) basis in order guarantees that.
    """
    index: dict[int, tuple[int, int]] = {}
    orbits: list[Orbit] = []
    for state in basis:
        if state.bits in index:
            continue
        members = [state]
        current = shift(state, 1)
        while current.bits != state.bits:
            members.append(current)
            current = shift(current, 1)
        orbit_id = len(orbits)
        orbits.append(Orbit(state, len(members), tuple(members)))
        for offset, member in enumerate(members):
            index[member.bits] = (orbit_id, offset)
    return OrbitTable(tuple(orbits), index)


def dump_basis(basis: list[BasisState]) -> str:
    """Newline-separated bitstrings (site 1 leftmost), for fixtures and debugging."""
    return "\n".join(state.to_string() for state in basis)


@lru_cache(maxsize=None)
def sector_basis(spec: RingSpec) -> tuple[BasisState, ...]:
    """Cached enumerate_sector."""
    return tuple(enumerate_sector(spec))


@lru_cache(maxsize=None)
def sector_orbits(spec: RingSpec) -> OrbitTable:
    """Cached orbit table for the sector."""
    return build_orbits(list(sector_basis(spec)))


@lru_cache(maxsize=None)
def sector_index(spec: RingSpec) -> dict[int, int]:
    """Cached mask -> position map matching the sector_basis ordering."""
    return {state.bits: i for i, state in enumerate(sector_basis(spec))}

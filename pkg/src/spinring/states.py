"""Translationally invariant ring states.

Covers orbit-parameterized construction, the amplitude maps between the
adjacency-constrained N-site ring and the unconstrained (N-p)-site ring, the
alternating sign gauge for balanced states, and state-file serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import (
    BasisState,
    RingSpec,
    has_adjacent_up,
    sector_basis,
    sector_index,
    sector_orbits,
    shift,
)
from .errors import ValidationError

#: Norm deviations up to this are silently renormalized on construction.
NORM_TOL = 1e-12
#: States with norm below this are rejected as degenerate.
DEGENERATE_NORM = 1e-8
#: Tolerance when checking translational invariance of numeric input.
INVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class RingState:
    """Unit-norm amplitude vector over a sector basis.

    ``amplitudes[i]`` belongs to ``sector_basis(spec)[i]``. ``momentum`` is the
    shift-phase index when the state is a momentum eigenstate, else None.
    """

    spec: RingSpec
    amplitudes: np.ndarray
    momentum: int | None = None

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        expected = self.spec.sector_size()
        if amps.shape != (expected,):
            raise ValidationError(
                f"amplitude vector has shape {amps.shape}, sector needs ({expected},)"
            )
        norm = float(np.linalg.norm(amps))
        if norm < DEGENERATE_NORM:
            raise ValidationError(f"degenerate state: norm {norm:.3e}")
        if abs(norm - 1.0) > NORM_TOL:
            amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def basis(self) -> tuple[BasisState, ...]:
        return sector_basis(self.spec)

    def amplitude_of(self, state: BasisState) -> complex:
        return complex(self.amplitudes[sector_index(self.spec)[state.bits]])

    def is_real_nonnegative(self, tol: float = 1e-10) -> bool:
        return bool(
            np.max(np.abs(self.amplitudes.imag)) <= tol
            and np.min(self.amplitudes.real) >= -tol
        )


@dataclass(frozen=True)
class OrbitState:
    """One complex amplitude per shift orbit plus a momentum index.

    Expansion places amp * exp(2*pi*i*k*s/N) on the member at shift offset s,
    so a nonzero amplitude on an orbit of period q needs k*q = 0 (mod N).
    """

    spec: RingSpec
    orbit_amplitudes: np.ndarray
    momentum_index: int = 0


def translation_deviation(state: RingState, momentum: int = 0) -> float:
    """Max amplitude mismatch against the momentum-k shift relation."""
    n = state.spec.n_sites
    index = sector_index(state.spec)
    phase = np.exp(2j * np.pi * momentum / n)
    worst = 0.0
    for i, bstate in enumerate(state.basis()):
        j = index[shift(bstate, 1).bits]
        worst = max(worst, abs(state.amplitudes[j] - phase * state.amplitudes[i]))
    return worst


def is_translation_invariant(
    state: RingState, momentum: int = 0, tol: float = INVARIANCE_TOL
) -> bool:
    return translation_deviation(state, momentum) <= tol


def expand(orbit_state: OrbitState) -> RingState:
    """Expand orbit amplitudes into a normalized full sector vector."""
    spec = orbit_state.spec
    table = sector_orbits(spec)
    amps = np.asarray(orbit_state.orbit_amplitudes, dtype=complex)
    if amps.shape != (len(table),):
        raise ValidationError(
            f"expected {len(table)} orbit amplitudes, got {amps.shape}"
        )
    k = orbit_state.momentum_index
    n = spec.n_sites
    index = sector_index(spec)
    vector = np.zeros(spec.sector_size(), dtype=complex)
    for orbit_id, orbit in enumerate(table.orbits):
        amp = amps[orbit_id]
        if (k * orbit.period) % n != 0:
            if abs(amp) > 1e-12:
                raise ValidationError(
                    f"momentum {k} incompatible with orbit of period {orbit.period} "
                    f"on {n} sites (representative {orbit.representative.to_string()})"
                )
            continue
        if amp == 0:
            continue
        for offset, member in enumerate(orbit.members):
            vector[index[member.bits]] = amp * np.exp(2j * np.pi * k * offset / n)
    return RingState(spec, vector, momentum=k % n)


def read_orbit_state(
    state: RingState, momentum: int = 0, tol: float = INVARIANCE_TOL
) -> OrbitState:
    """Inverse of expand: recover one amplitude per orbit.

    Averages the phase-unwound member amplitudes and rejects input whose
    members deviate from the momentum-k pattern by more than ``tol``.
    """
    spec = state.spec
    table = sector_orbits(spec)
    n = spec.n_sites
    index = sector_index(spec)
    amps = np.zeros(len(table), dtype=complex)
    for orbit_id, orbit in enumerate(table.orbits):
        unwound = [
            state.amplitudes[index[member.bits]]
            * np.exp(-2j * np.pi * momentum * offset / n)
            for offset, member in enumerate(orbit.members)
        ]
        mean = np.mean(unwound)
        if max(abs(u - mean) for u in unwound) > tol:
            raise ValidationError(
                f"state is not a momentum-{momentum} eigenstate on orbit of "
                f"{orbit.representative.to_string()}"
            )
        amps[orbit_id] = mean
    return OrbitState(spec, amps, momentum)


def _require_real_nonneg_invariant(state: RingState, what: str) -> None:
    if not state.is_real_nonnegative():
        raise ValidationError(f"{what} requires real non-negative amplitudes")
    if translation_deviation(state, 0) > INVARIANCE_TOL:
        raise ValidationError(f"{what} requires a shift-invariant (momentum 0) state")


def _inflate_mask(bits: int, m_sites: int) -> BasisState:
    """Insert a down-spin immediately after every up-spin, reading site order."""
    out = []
    for k in range(m_sites):
        if (bits >> k) & 1:
            out.append("10")
        else:
            out.append("0")
    return BasisState.from_string("".join(out))


def _orbit_correspondence(small_spec: RingSpec, big_spec: RingSpec) -> list[int]:
    """Map small-ring orbit id -> constrained big-ring orbit id (a bijection)."""
    small = sector_orbits(small_spec)
    big = sector_orbits(big_spec)
    if len(small) != len(big):
        raise ValidationError(
            f"orbit count mismatch: {len(small)} small vs {len(big)} constrained"
        )
    mapping = []
    hit = set()
    for orbit in small.orbits:
        image = _inflate_mask(orbit.representative.bits, small_spec.n_sites)
        big_id, _ = big.locate(image)
        mapping.append(big_id)
        hit.add(big_id)
    if len(hit) != len(big):
        raise ValidationError("orbit correspondence is not one-to-one")
    return mapping


def deflate(state: RingState) -> RingState:
    """Map a constrained N-ring state to the unconstrained (N-p)-ring state.

    Each orbit amplitude carries over unchanged and renormalization supplies
    the sqrt(N/(N-p)) rescaling, because corresponding orbits always shrink by
    exactly that factor.
    """
    spec = state.spec
    if not spec.forbid_adjacent_up:
        raise ValidationError("deflate expects an adjacency-constrained state")
    n, p = spec.n_sites, spec.n_up
    if p > 0 and n - p < 2:
        raise ValidationError(
            f"deflate target ring of {n - p} site(s) has no neighbor pair"
        )
    _require_real_nonneg_invariant(state, "deflate")
    small_spec = RingSpec(n - p, p, forbid_adjacent_up=False)
    mapping = _orbit_correspondence(small_spec, spec)
    big_amps = read_orbit_state(state, 0).orbit_amplitudes
    small_amps = np.array([big_amps[big_id].real for big_id in mapping])
    return expand(OrbitState(small_spec, small_amps, 0))


def inflate(state: RingState) -> RingState:
    """Map an unconstrained (N-p)-ring state to the constrained N-ring state.

    Inverse of deflate on real, non-negative, shift-invariant states.
    """
    spec = state.spec
    if spec.forbid_adjacent_up:
        raise ValidationError("inflate expects an unconstrained small-ring state")
    _require_real_nonneg_invariant(state, "inflate")
    m, p = spec.n_sites, spec.n_up
    big_spec = RingSpec(m + p, p, forbid_adjacent_up=True)
    mapping = _orbit_correspondence(spec, big_spec)
    small_amps = read_orbit_state(state, 0).orbit_amplitudes
    big_amps = np.zeros(len(sector_orbits(big_spec)), dtype=float)
    for small_id, big_id in enumerate(mapping):
        big_amps[big_id] = small_amps[small_id].real
    return expand(OrbitState(big_spec, big_amps, 0))


def marshall_sign(state: BasisState) -> int:
    """(-1) to the sum of the 1-based up-spin site labels."""
    return -1 if sum(state.up_sites()) & 1 else 1


def apply_marshall_signs(state: RingState) -> RingState:
    """Replace each amplitude by its modulus times the alternating sign."""
    signs = np.array([marshall_sign(b) for b in state.basis()], dtype=float)
    return RingState(state.spec, signs * np.abs(state.amplitudes))


def random_balanced_state(n: int, momentum_index: int, seed: int) -> RingState:
    """Random shift-invariant state with exactly n/2 up-spins.

    Orbit amplitudes are i.i.d. complex Gaussian (orbits incompatible with the
    requested momentum get zero); deterministic for a fixed seed.
    """
    if n < 2 or n % 2:
        raise ValidationError(f"balanced states need an even ring, got n={n}")
    spec = RingSpec(n, n // 2, forbid_adjacent_up=False)
    table = sector_orbits(spec)
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(len(table)) + 1j * rng.standard_normal(len(table))
    for orbit_id, orbit in enumerate(table.orbits):
        if (momentum_index * orbit.period) % n != 0:
            amps[orbit_id] = 0.0
    return expand(OrbitState(spec, amps, momentum_index))


# ---------------------------------------------------------------------------
# State files
# ---------------------------------------------------------------------------

_CONSTRAINT_NAMES = {False: "none", True: "no-adjacent-up"}


def state_to_dict(state: RingState) -> dict:
    """JSON-ready form: bitstrings (site 1 leftmost) with re/im amplitudes."""
    return {
        "n": state.spec.n_sites,
        "p": state.spec.n_up,
        "constraint": _CONSTRAINT_NAMES[state.spec.forbid_adjacent_up],
        "momentum": state.momentum,
        "amplitudes": [
            {
                "bits": b.to_string(),
                "re": float(a.real),
                "im": float(a.imag),
            }
            for b, a in zip(state.basis(), state.amplitudes)
        ],
    }


def state_from_dict(payload: dict) -> RingState:
    """Parse and validate a state dictionary (norm and constraint included)."""
    try:
        n = int(payload["n"])
        p = int(payload["p"])
        constraint = payload["constraint"]
        entries = payload["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state payload: {exc}") from exc
    forbid = {"none": False, "no-adjacent-up": True}.get(constraint)
    if forbid is None:
        raise ValidationError(f"unknown constraint {constraint!r}")
    momentum = payload.get("momentum")
    if momentum is not None:
        momentum = int(momentum)
    spec = RingSpec(n, p, forbid_adjacent_up=forbid)
    index = sector_index(spec)
    vector = np.zeros(spec.sector_size(), dtype=complex)
    seen = set()
    for entry in entries:
        bstate = BasisState.from_string(entry["bits"])
        if bstate.n_sites != n:
            raise ValidationError(f"bitstring {entry['bits']!r} is not {n} sites long")
        if bstate.popcount() != p:
            raise ValidationError(
                f"bitstring {entry['bits']!r} has {bstate.popcount()} up-spins, not {p}"
            )
        if forbid and has_adjacent_up(bstate):
            raise ValidationError(
                f"bitstring {entry['bits']!r} violates the no-adjacent-up constraint"
            )
        if bstate.bits in seen:
            raise ValidationError(f"duplicate bitstring {entry['bits']!r}")
        seen.add(bstate.bits)
        vector[index[bstate.bits]] = float(entry["re"]) + 1j * float(entry["im"])
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"state file norm {norm:.8f} deviates from 1")
    return RingState(spec, vector, momentum=momentum)


def save_state(state: RingState, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2, sort_keys=True))


def load_state(path: str | Path) -> RingState:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"state file {path} is not valid JSON: {exc}") from exc
    return state_from_dict(payload)

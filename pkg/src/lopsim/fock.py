"""Fock-space sectors for a fixed number of photons on a fixed number of modes.

Provides the canonical basis enumeration, pure/mixed state containers and the
elementary state algebra (ancilla extension, overlaps) everything else builds on.
"""

import math
from functools import lru_cache

import numpy as np

# Global numeric tolerance for invariant checks; callers may override per call.
ATOL = 1e-10

# Desk-scale guard: sectors larger than this are rejected outright.
MAX_SECTOR_DIM = 10000


def dimension(modes: int, photons: int) -> int:
    """Dimension of the sector with `photons` photons on `modes` modes.

    Equals (photons + modes - 1)! / (photons! (modes - 1)!), computed as an
    exact integer binomial (no intermediate overflow).
    """
    if modes < 1:
        raise ValueError(f"need at least one mode, got {modes}")
    if photons < 0:
        raise ValueError(f"photon number must be non-negative, got {photons}")
    return math.comb(photons + modes - 1, photons)


def _occupations(modes, photons):
    # Anti-lexicographic: first mode count descending, then recurse.
    if modes == 1:
        yield (photons,)
        return
    for k in range(photons, -1, -1):
        for rest in _occupations(modes - 1, photons - k):
            yield (k,) + rest


class FockBasis:
    """Ordered basis of the fixed-photon-number sector.

    States are occupation tuples in anti-lexicographic order, e.g. for two
    photons on two modes: (2,0), (1,1), (0,2).
    """

    def __init__(self, modes: int, photons: int):
        d = dimension(modes, photons)
        if d > MAX_SECTOR_DIM:
            raise ValueError(
                f"sector dimension {d} exceeds the desk-scale limit {MAX_SECTOR_DIM}"
            )
        self.modes = modes
        self.photons = photons
        self.states = tuple(_occupations(modes, photons))
        self._index = {occ: i for i, occ in enumerate(self.states)}

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, occupation) -> int:
        """Position of an occupation tuple in the canonical ordering."""
        try:
            return self._index[tuple(occupation)]
        except KeyError:
            raise ValueError(
                f"{tuple(occupation)} is not a {self.photons}-photon "
                f"{self.modes}-mode occupation"
            ) from None

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        return (
            isinstance(other, FockBasis)
            and self.modes == other.modes
            and self.photons == other.photons
        )

    def __hash__(self):
        return hash((self.modes, self.photons))

    def __repr__(self):
        return f"FockBasis(modes={self.modes}, photons={self.photons})"


@lru_cache(maxsize=None)
def enumerate_basis(modes: int, photons: int) -> FockBasis:
    """Canonically ordered basis of the (modes, photons) sector."""
    return FockBasis(modes, photons)


class MultiSectorBasis:
    """Stacked bases of several photon-number sectors on the same modes.

    Used for conditional states after an imperfect ancilla measurement, whose
    branches carry different photon numbers. Sectors are stacked in the given
    order; states within each sector keep the canonical ordering.
    """

    def __init__(self, modes: int, sectors):
        self.modes = modes
        self.sectors = tuple(sectors)
        if len(set(self.sectors)) != len(self.sectors):
            raise ValueError("sectors must be distinct")
        states = []
        self._offsets = {}
        for n in self.sectors:
            self._offsets[n] = len(states)
            states.extend(enumerate_basis(modes, n).states)
        self.states = tuple(states)
        self._index = {occ: i for i, occ in enumerate(self.states)}

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, occupation) -> int:
        try:
            return self._index[tuple(occupation)]
        except KeyError:
            raise ValueError(f"{tuple(occupation)} not in any stacked sector") from None

    def sector_slice(self, photons: int) -> slice:
        off = self._offsets[photons]
        return slice(off, off + dimension(self.modes, photons))

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        return (
            isinstance(other, MultiSectorBasis)
            and self.modes == other.modes
            and self.sectors == other.sectors
        )

    def __hash__(self):
        return hash((self.modes, self.sectors))

    def __repr__(self):
        return f"MultiSectorBasis(modes={self.modes}, sectors={self.sectors})"


class PureState:
    """Amplitude vector over a Fock basis; may be unnormalized (norm <= 1)."""

    def __init__(self, basis, amplitudes, *, atol: float = ATOL):
        self.basis = basis
        self.amplitudes = np.array(amplitudes, dtype=complex)
        if self.amplitudes.shape != (basis.size,):
            raise ValueError(
                f"expected {basis.size} amplitudes, got {self.amplitudes.shape}"
            )
        n2 = self.squared_norm
        if n2 > 1 + atol:
            raise ValueError(f"squared norm {n2} exceeds 1")

    @classmethod
    def from_occupation(cls, basis, occupation) -> "PureState":
        amps = np.zeros(basis.size, dtype=complex)
        amps[basis.index(occupation)] = 1.0
        return cls(basis, amps)

    @property
    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, occupation) -> complex:
        return complex(self.amplitudes[self.basis.index(occupation)])

    def normalized(self) -> "PureState":
        n = math.sqrt(self.squared_norm)
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return PureState(self.basis, self.amplitudes / n)

    def to_json(self) -> dict:
        return {
            "modes": self.basis.modes,
            "photons": self.basis.photons,
            "amplitudes": [[z.real, z.imag] for z in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        basis = enumerate_basis(int(data["modes"]), int(data["photons"]))
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        return cls(basis, amps)

    def __repr__(self):
        terms = []
        for occ, amp in zip(self.basis.states, self.amplitudes):
            if abs(amp) > 1e-12:
                label = "".join(str(k) for k in occ) if max(occ, default=0) < 10 else str(occ)
                terms.append(f"({amp:.4g})|{label}>")
        return " + ".join(terms) if terms else "0"


class MixedState:
    """Density matrix over a Fock basis (single- or multi-sector).

    Checked Hermitian and positive semidefinite within tolerance on
    construction; trace must not exceed 1.
    """

    def __init__(self, basis, matrix, *, atol: float = ATOL):
        self.basis = basis
        self.matrix = np.array(matrix, dtype=complex)
        d = basis.size
        if self.matrix.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got {self.matrix.shape}")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > atol:
            raise ValueError("density matrix is not Hermitian")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.size and evals[0] < -atol:
            raise ValueError(f"density matrix is not PSD (min eigenvalue {evals[0]})")
        tr = self.trace
        if tr > 1 + atol or tr < -atol:
            raise ValueError(f"trace {tr} is outside [0, 1]")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def expectation(self, state: PureState) -> float:
        """<psi|rho|psi> for a state on the same basis."""
        if state.basis != self.basis:
            raise ValueError("state and density matrix live on different bases")
        v = state.amplitudes
        return float(np.vdot(v, self.matrix @ v).real)

    def to_json(self) -> dict:
        photons = (
            list(self.basis.sectors)
            if isinstance(self.basis, MultiSectorBasis)
            else self.basis.photons
        )
        return {
            "modes": self.basis.modes,
            "photons": photons,
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix],
        }


def tensor_with_ancilla(state: PureState, ancilla) -> PureState:
    """Adjoin ancilla modes prepared in a number state.

    `ancilla` is a photon count for one extra mode, or a tuple of counts for
    several. Amplitudes carry over unchanged onto occupations that end with
    the ancilla pattern; the norm is preserved exactly.
    """
    if isinstance(ancilla, (int, np.integer)):
        pattern = (int(ancilla),)
    else:
        pattern = tuple(int(k) for k in ancilla)
    if any(k < 0 for k in pattern):
        raise ValueError("ancilla photon counts must be non-negative")
    old = state.basis
    new = enumerate_basis(old.modes + len(pattern), old.photons + sum(pattern))
    amps = np.zeros(new.size, dtype=complex)
    for occ, amp in zip(old.states, state.amplitudes):
        amps[new.index(occ + pattern)] = amp
    return PureState(new, amps)


def overlap(s1: PureState, s2: PureState) -> complex:
    """Inner product <s1|s2>, conjugate-linear in the first argument."""
    if s1.basis != s2.basis:
        raise ValueError(
            f"basis mismatch: {s1.basis!r} vs {s2.basis!r}"
        )
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))

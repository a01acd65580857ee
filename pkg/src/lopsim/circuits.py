"""Two-mode circuit elements, their recomposition and triangular decomposition.

A circuit is an ordered element list applied left to right to the mode vector,
so the recomposed matrix is the reversed product of element matrices.
"""

import math
from dataclasses import dataclass

import numpy as np

from .lifting import ModeUnitary


@dataclass(frozen=True)
class BeamSplitter:
    """Two-mode mixer: block [[cos t, e^{i p} sin t], [-e^{-i p} sin t, cos t]]."""

    modes: tuple  # (i, j), 1-based
    theta: float
    phi: float = 0.0


@dataclass(frozen=True)
class PhaseShifter:
    mode: int  # 1-based
    phase: float


@dataclass(frozen=True)
class Swap:
    modes: tuple  # (i, j), 1-based


@dataclass(frozen=True)
class Circuit:
    modes: int
    elements: tuple

    def to_json(self) -> dict:
        out = []
        for e in self.elements:
            if isinstance(e, BeamSplitter):
                out.append(
                    {"kind": "bs", "modes": list(e.modes), "theta": e.theta, "phi": e.phi}
                )
            elif isinstance(e, PhaseShifter):
                out.append({"kind": "ps", "mode": e.mode, "phase": e.phase})
            elif isinstance(e, Swap):
                out.append({"kind": "swap", "modes": list(e.modes)})
            else:
                raise TypeError(f"unknown circuit element {e!r}")
        return {"modes": self.modes, "elements": out}

    @classmethod
    def from_json(cls, data: dict) -> "Circuit":
        elements = []
        for item in data["elements"]:
            kind = item["kind"]
            if kind == "bs":
                elements.append(
                    BeamSplitter(tuple(item["modes"]), float(item["theta"]),
                                 float(item.get("phi", 0.0)))
                )
            elif kind == "ps":
                elements.append(PhaseShifter(int(item["mode"]), float(item["phase"])))
            elif kind == "swap":
                elements.append(Swap(tuple(item["modes"])))
            else:
                raise ValueError(f"unknown element kind {kind!r}")
        return cls(int(data["modes"]), tuple(elements))


def _check_pair(modes, n):
    i, j = modes
    if i == j or not (1 <= i <= n) or not (1 <= j <= n):
        raise ValueError(f"mode pair {modes} invalid for {n} modes")
    return i - 1, j - 1


def element_matrix(element, modes: int) -> ModeUnitary:
    """Full NxN matrix of one element: identity outside the touched modes."""
    m = np.eye(modes, dtype=complex)
    if isinstance(element, BeamSplitter):
        i, j = _check_pair(element.modes, modes)
        c, s = math.cos(element.theta), math.sin(element.theta)
        ph = np.exp(1j * element.phi)
        m[i, i] = c
        m[i, j] = ph * s
        m[j, i] = -np.conj(ph) * s
        m[j, j] = c
    elif isinstance(element, PhaseShifter):
        k = element.mode - 1
        if not (0 <= k < modes):
            raise ValueError(f"mode {element.mode} invalid for {modes} modes")
        m[k, k] = np.exp(1j * element.phase)
    elif isinstance(element, Swap):
        i, j = _check_pair(element.modes, modes)
        m[i, i] = m[j, j] = 0.0
        m[i, j] = m[j, i] = 1.0
    else:
        raise TypeError(f"unknown circuit element {element!r}")
    return ModeUnitary(m)


def recompose(circuit: Circuit) -> ModeUnitary:
    """Matrix of the whole circuit (first element acts first)."""
    m = np.eye(circuit.modes, dtype=complex)
    for e in circuit.elements:
        m = element_matrix(e, circuit.modes).matrix @ m
    return ModeUnitary(m)


def decompose(mode_unitary: ModeUnitary, *, atol: float = 1e-12) -> Circuit:
    """Factor a mode unitary into beam splitters plus residual phase shifters.

    Triangular elimination: Givens-type blocks on adjacent rows zero the
    subdiagonal column by column, leaving a diagonal of phases. The returned
    circuit recomposes to the input exactly (within rounding), phases
    included, using at most N(N-1)/2 beam splitters and N phase shifters.
    """
    n = mode_unitary.size
    w = mode_unitary.matrix.copy()
    rotations = []  # (row pair, theta, phi) in elimination order
    for c in range(n - 1):
        for r in range(n - 1, c, -1):
            x, y = w[r - 1, c], w[r, c]
            if abs(y) <= atol:
                continue
            if abs(x) <= atol:
                theta, phi = math.pi / 2, 0.0
            else:
                theta = math.atan2(abs(y), abs(x))
                phi = float(np.angle(x) - np.angle(y))
            block = np.array(
                [
                    [math.cos(theta), np.exp(1j * phi) * math.sin(theta)],
                    [-np.exp(-1j * phi) * math.sin(theta), math.cos(theta)],
                ]
            )
            w[[r - 1, r], :] = block @ w[[r - 1, r], :]
            rotations.append((r, theta, phi))
    elements = []
    for k in range(n):
        phase = float(np.angle(w[k, k]))
        if abs(phase) > atol:
            elements.append(PhaseShifter(k + 1, phase))
    # w == G_m ... G_1 M is diagonal, so M = G_1^dag ... G_m^dag D: append the
    # inverse rotations in reverse order (theta -> -theta stays in the family).
    for r, theta, phi in reversed(rotations):
        elements.append(BeamSplitter((r, r + 1), -theta, phi))
    return Circuit(n, tuple(elements))


def bunching_circuit() -> Circuit:
    """Symmetric 50% beam splitter on modes 1,2 followed by a swap of modes 2,3.

    Post-selected on an empty third mode this bunches |110> into |200> with
    probability 1/2; fed with |201> and one detected ancilla photon it splits
    |20> back into |11> with the same probability.
    """
    return Circuit(
        3, (BeamSplitter((1, 2), math.pi / 4, math.pi / 2), Swap((2, 3)))
    )

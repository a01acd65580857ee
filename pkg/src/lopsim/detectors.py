"""Imperfect on/off photodetection on the ancilla mode.

A detector with quantum efficiency eta misses each photon independently, so
the no-click weight on k photons is (1-eta)^k and the click weight is its
complement. Conditioning on either outcome mixes the ideal fixed-photon
branches of the evolved state; fidelity to the intended branch then trades
off against the raw outcome probability.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, bunching_circuit, recompose
from .fock import (
    MixedState,
    MultiSectorBasis,
    PureState,
    enumerate_basis,
    tensor_with_ancilla,
)
from .lifting import ModeUnitary, apply, lift_unitary


@dataclass(frozen=True)
class DetectorModel:
    """On/off detector with quantum efficiency eta in [0, 1]."""

    eta: float

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"quantum efficiency must be in [0, 1], got {self.eta}")

    def no_click_weight(self, photons: int) -> float:
        return (1.0 - self.eta) ** photons

    def click_weight(self, photons: int) -> float:
        return 1.0 - (1.0 - self.eta) ** photons


def povm_no_click(eta: float, max_photons: int) -> np.ndarray:
    """Diagonal weights of the no-click POVM element on 0..max_photons photons."""
    if max_photons < 0:
        raise ValueError("max_photons must be non-negative")
    det = DetectorModel(eta)
    return np.array([det.no_click_weight(k) for k in range(max_photons + 1)])


def povm_click(eta: float, max_photons: int) -> np.ndarray:
    """Diagonal weights of the click POVM element, 1 - (1-eta)^k."""
    return 1.0 - povm_no_click(eta, max_photons)


def ancilla_branches(state: PureState):
    """Split a state with one trailing ancilla mode by ancilla photon number.

    Returns the list of unnormalized computational-mode states phi_k for
    k = 0..n; branch k lives on the sector with n - k photons. Branches with
    different k are orthogonal by construction.
    """
    if state.basis.modes < 2:
        raise ValueError("need computational modes plus one ancilla mode")
    n = state.basis.photons
    comp_modes = state.basis.modes - 1
    branches = []
    for k in range(n + 1):
        comp_basis = enumerate_basis(comp_modes, n - k)
        amps = np.array([state.amplitude(occ + (k,)) for occ in comp_basis.states])
        branches.append(PureState(comp_basis, amps))
    return branches


def _mix_branches(branches, weights):
    """Weighted mixture of orthogonal branches as a block-diagonal density matrix."""
    n = len(branches) - 1
    modes = branches[0].basis.modes
    basis = MultiSectorBasis(modes, tuple(n - k for k in range(n + 1)))
    total = float(sum(w * b.squared_norm for w, b in zip(weights, branches)))
    rho = np.zeros((basis.size, basis.size), dtype=complex)
    for k, (w, b) in enumerate(zip(weights, branches)):
        if w == 0.0 or b.squared_norm == 0.0:
            continue
        sl = basis.sector_slice(n - k)
        rho[sl, sl] += (w / total) * np.outer(b.amplitudes, b.amplitudes.conj())
    return MixedState(basis, rho), total


def conditional_no_click(state: PureState, eta: float):
    """Conditional mixed state and probability of the no-click outcome.

    rho_0 mixes the ideal branches phi_k with weights (1-eta)^k / P_0, where
    P_0 = sum_k (1-eta)^k <phi_k|phi_k>. Returns (None, 0.0) if no click is
    impossible (perfect detector and an empty vacuum branch).
    """
    det = DetectorModel(eta)
    branches = ancilla_branches(state)
    weights = [det.no_click_weight(k) for k in range(len(branches))]
    p0 = sum(w * b.squared_norm for w, b in zip(weights, branches))
    if p0 < 1e-24:
        return None, 0.0
    return _mix_branches(branches, weights)


def conditional_click(state: PureState, eta: float):
    """Conditional mixed state and probability of the click outcome.

    Weights are 1 - (1-eta)^k; the k = 0 branch never contributes. Returns
    (None, 0.0) when a click is impossible (blind detector, or no photon ever
    reaches the ancilla).
    """
    det = DetectorModel(eta)
    branches = ancilla_branches(state)
    weights = [det.click_weight(k) for k in range(len(branches))]
    p1 = sum(w * b.squared_norm for w, b in zip(weights, branches))
    if p1 < 1e-24:
        return None, 0.0
    return _mix_branches(branches, weights)


def fidelity_to_branch(rho: MixedState, branch: PureState) -> float:
    """Overlap <phi|rho|phi> / <phi|phi> of a conditional state with an ideal branch."""
    n2 = branch.squared_norm
    if n2 < 1e-24:
        raise ValueError("cannot take fidelity to a zero-norm branch")
    if isinstance(rho.basis, MultiSectorBasis):
        v = np.zeros(rho.basis.size, dtype=complex)
        sl = rho.basis.sector_slice(branch.basis.photons)
        v[sl] = branch.amplitudes
    else:
        if branch.basis != rho.basis:
            raise ValueError("branch and conditional state bases are incompatible")
        v = branch.amplitudes
    return float(np.vdot(v, rho.matrix @ v).real) / n2


@dataclass(frozen=True)
class TradeoffPoint:
    eta: float
    probability: float
    fidelity: float


def _as_mode_unitary(circuit) -> ModeUnitary:
    if isinstance(circuit, Circuit):
        return recompose(circuit)
    if isinstance(circuit, ModeUnitary):
        return circuit
    raise TypeError(f"expected a Circuit or ModeUnitary, got {type(circuit)!r}")


def tradeoff_sweep(circuit, input_state: PureState, protocol: str, eta_grid,
                   target_branch: int | None = None):
    """Probability and fidelity of a post-selection protocol across efficiencies.

    The input state (ancilla mode included) is evolved once; for each eta the
    detector outcome is conditioned and the fidelity to the ideal branch is
    evaluated. The ideal branch is k = 0 for `no-click` and k = 1 for `click`
    unless `target_branch` overrides it. Points where the outcome cannot occur
    report probability 0 and NaN fidelity.
    """
    if protocol not in ("no-click", "click"):
        raise ValueError(f"protocol must be 'no-click' or 'click', got {protocol!r}")
    unitary = _as_mode_unitary(circuit)
    if unitary.size != input_state.basis.modes:
        raise ValueError("circuit and input state must cover the same modes")
    evolved = apply(lift_unitary(unitary, input_state.basis.photons), input_state)
    branches = ancilla_branches(evolved)
    branch_index = target_branch if target_branch is not None else (
        0 if protocol == "no-click" else 1
    )
    if not (0 <= branch_index < len(branches)):
        raise ValueError(
            f"target branch {branch_index} outside 0..{len(branches) - 1}"
        )
    ideal = branches[branch_index]
    condition = conditional_no_click if protocol == "no-click" else conditional_click
    points = []
    for eta in eta_grid:
        rho, p = condition(evolved, float(eta))
        if rho is None:
            points.append(TradeoffPoint(float(eta), 0.0, math.nan))
            continue
        points.append(
            TradeoffPoint(float(eta), p, fidelity_to_branch(rho, ideal))
        )
    return points


def write_sweep_csv(points, stream) -> None:
    """Serialize sweep points: header + one row per point, 12 significant digits."""
    stream.write("eta,probability,fidelity\n")
    for p in points:
        stream.write(f"{p.eta:.12g},{p.probability:.12g},{p.fidelity:.12g}\n")


def bunching_tradeoff_report(eta_grid=None) -> dict:
    """Compare detection quality of the two canonical runs of the bunching circuit.

    The pair-bunching preparation (|110>, no-click) and its reversal
    (|201>, click) share the same circuit and ideal success probability 1/2;
    this reports their fidelity curves over the efficiency grid and whether
    the no-click preparation dominates. The comparison is recorded, not
    asserted: it is an observed fact about this circuit.
    """
    if eta_grid is None:
        eta_grid = np.linspace(0.0, 1.0, 21)
    circuit = bunching_circuit()
    basis = enumerate_basis(2, 2)
    forward = tensor_with_ancilla(PureState.from_occupation(basis, (1, 1)), 0)
    reverse = tensor_with_ancilla(PureState.from_occupation(basis, (2, 0)), 1)
    no_click = tradeoff_sweep(circuit, forward, "no-click", eta_grid)
    click = tradeoff_sweep(circuit, reverse, "click", eta_grid)
    deltas = [
        p0.fidelity - p1.fidelity
        for p0, p1 in zip(no_click, click)
        if not (math.isnan(p0.fidelity) or math.isnan(p1.fidelity))
    ]
    return {
        "eta": [float(e) for e in eta_grid],
        "no_click_fidelity": [p.fidelity for p in no_click],
        "click_fidelity": [p.fidelity for p in click],
        "no_click_dominates": bool(deltas) and min(deltas) >= -1e-12,
    }

import itertools
import math

import numpy as np
import pytest

from lopsim.fock import (
    MixedState,
    MultiSectorBasis,
    PureState,
    dimension,
    enumerate_basis,
    overlap,
    tensor_with_ancilla,
)


def brute_force_occupations(modes, photons):
    """Independent oracle: filter the full hypercube of per-mode counts."""
    return [
        occ
        for occ in itertools.product(range(photons + 1), repeat=modes)
        if sum(occ) == photons
    ]


class TestDimension:
    def test_two_photons_two_modes_is_a_qutrit(self):
        assert dimension(2, 2) == 3

    def test_vacuum_sector_is_one_dimensional(self):
        for modes in range(1, 6):
            assert dimension(modes, 0) == 1

    def test_three_photons_three_modes(self):
        # frozen from the brute-force enumeration oracle
        assert len(brute_force_occupations(3, 3)) == 10
        assert dimension(3, 3) == 10

    def test_rejects_zero_modes(self):
        with pytest.raises(ValueError):
            dimension(0, 2)

    def test_rejects_negative_photons(self):
        with pytest.raises(ValueError):
            dimension(2, -1)

    def test_no_overflow_at_desk_scale(self):
        assert dimension(8, 12) == math.comb(19, 12)


class TestEnumerateBasis:
    def test_qutrit_ordering(self):
        assert enumerate_basis(2, 2).states == ((2, 0), (1, 1), (0, 2))

    def test_single_mode(self):
        assert enumerate_basis(1, 4).states == ((4,),)

    def test_one_photon_ordering(self):
        assert enumerate_basis(3, 1).states == ((1, 0, 0), (0, 1, 0), (0, 0, 1))

    def test_counts_and_contents_match_brute_force(self):
        for modes in range(1, 6):
            for photons in range(7):
                basis = enumerate_basis(modes, photons)
                assert basis.size == dimension(modes, photons)
                assert sorted(basis.states) == sorted(
                    brute_force_occupations(modes, photons)
                )
                assert len(set(basis.states)) == basis.size

    def test_index_round_trip(self):
        basis = enumerate_basis(3, 2)
        for i, occ in enumerate(basis.states):
            assert basis.index(occ) == i

    def test_index_rejects_foreign_occupation(self):
        with pytest.raises(ValueError):
            enumerate_basis(2, 2).index((1, 0))

    def test_desk_scale_guard(self):
        with pytest.raises(ValueError, match="desk-scale"):
            enumerate_basis(8, 12)


class TestPureState:
    def test_norm_cap(self):
        basis = enumerate_basis(2, 2)
        with pytest.raises(ValueError):
            PureState(basis, [1.0, 1.0, 0.0])

    def test_amplitude_lookup(self):
        basis = enumerate_basis(2, 2)
        state = PureState(basis, [0.5, 0.5j, np.sqrt(0.5)])
        assert state.amplitude((1, 1)) == 0.5j

    def test_json_round_trip(self):
        basis = enumerate_basis(2, 2)
        state = PureState(basis, [0.5, 0.5j, np.sqrt(0.5)])
        again = PureState.from_json(state.to_json())
        assert again.basis == basis
        assert np.allclose(again.amplitudes, state.amplitudes)

    def test_normalized(self):
        basis = enumerate_basis(2, 1)
        state = PureState(basis, [0.3, 0.4])
        assert abs(state.normalized().squared_norm - 1.0) < 1e-14

    def test_normalizing_zero_state_rejected(self):
        basis = enumerate_basis(2, 1)
        with pytest.raises(ValueError):
            PureState(basis, [0.0, 0.0]).normalized()


class TestTensorWithAncilla:
    def test_vacuum_ancilla_on_11(self):
        basis = enumerate_basis(2, 2)
        out = tensor_with_ancilla(PureState.from_occupation(basis, (1, 1)), 0)
        assert out.basis.modes == 3 and out.basis.photons == 2
        assert out.amplitude((1, 1, 0)) == 1.0

    def test_one_photon_ancilla_on_20(self):
        basis = enumerate_basis(2, 2)
        out = tensor_with_ancilla(PureState.from_occupation(basis, (2, 0)), 1)
        assert out.basis.photons == 3
        assert out.amplitude((2, 0, 1)) == 1.0

    def test_linearity(self):
        basis = enumerate_basis(2, 2)
        a, b, c = 0.6, 0.48j, complex(np.sqrt(1 - 0.36 - 0.2304))
        out = tensor_with_ancilla(PureState(basis, [a, b, c]), 0)
        assert out.amplitude((2, 0, 0)) == a
        assert out.amplitude((1, 1, 0)) == b
        assert out.amplitude((0, 2, 0)) == c

    def test_norm_preserved(self):
        rng = np.random.default_rng(7)
        basis = enumerate_basis(2, 2)
        for m in range(3):
            amps = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            amps /= np.linalg.norm(amps)
            state = PureState(basis, amps)
            out = tensor_with_ancilla(state, m)
            assert abs(out.squared_norm - state.squared_norm) <= 1e-14

    def test_multiple_ancilla_modes(self):
        basis = enumerate_basis(2, 2)
        out = tensor_with_ancilla(PureState.from_occupation(basis, (1, 1)), (0, 2))
        assert out.basis.modes == 4 and out.basis.photons == 4
        assert out.amplitude((1, 1, 0, 2)) == 1.0

    def test_rejects_negative_counts(self):
        basis = enumerate_basis(2, 2)
        with pytest.raises(ValueError):
            tensor_with_ancilla(PureState.from_occupation(basis, (1, 1)), -1)

    def test_accepts_numpy_integer_counts(self):
        basis = enumerate_basis(2, 2)
        out = tensor_with_ancilla(
            PureState.from_occupation(basis, (1, 1)), np.int64(1)
        )
        assert out.amplitude((1, 1, 1)) == 1.0


class TestOverlap:
    def test_orthonormal_basis_states(self):
        basis = enumerate_basis(2, 2)
        s20 = PureState.from_occupation(basis, (2, 0))
        s11 = PureState.from_occupation(basis, (1, 1))
        assert overlap(s20, s11) == 0.0
        assert overlap(s20, s20) == 1.0

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(11)
        basis = enumerate_basis(3, 2)
        for _ in range(20):
            x = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
            y = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
            s1 = PureState(basis, x / np.linalg.norm(x))
            s2 = PureState(basis, y / np.linalg.norm(y))
            assert abs(overlap(s1, s2) - np.conj(overlap(s2, s1))) <= 1e-14

    def test_conjugate_linear_in_first_argument(self):
        basis = enumerate_basis(2, 1)
        s1 = PureState(basis, [0.6j, 0.8])
        s2 = PureState(basis, [0.8, 0.6])
        assert abs(overlap(s1, s2) - (np.conj(0.6j) * 0.8 + 0.8 * 0.6)) < 1e-15

    def test_basis_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            overlap(
                PureState.from_occupation(enumerate_basis(2, 2), (1, 1)),
                PureState.from_occupation(enumerate_basis(2, 1), (1, 0)),
            )


class TestMixedState:
    def test_rejects_non_hermitian(self):
        basis = enumerate_basis(2, 1)
        with pytest.raises(ValueError, match="Hermitian"):
            MixedState(basis, [[0.5, 0.5], [0.0, 0.5]])

    def test_rejects_negative_eigenvalue(self):
        basis = enumerate_basis(2, 1)
        with pytest.raises(ValueError, match="PSD"):
            MixedState(basis, [[0.5, 0.6], [0.6, 0.5]])

    def test_accepts_valid_density_matrix(self):
        basis = enumerate_basis(2, 1)
        rho = MixedState(basis, [[0.5, 0.25], [0.25, 0.5]])
        assert abs(rho.trace - 1.0) < 1e-15

    def test_expectation_value(self):
        basis = enumerate_basis(2, 1)
        rho = MixedState(basis, [[0.75, 0.0], [0.0, 0.25]])
        probe = PureState.from_occupation(basis, (1, 0))
        assert rho.expectation(probe) == pytest.approx(0.75)

    def test_json_serialization_shape(self):
        basis = enumerate_basis(2, 1)
        data = MixedState(basis, [[0.5, 0.0], [0.0, 0.5]]).to_json()
        assert data["modes"] == 2 and data["photons"] == 1
        assert data["matrix"][0][0] == [0.5, 0.0]


class TestMultiSectorBasis:
    def test_stacking_and_slices(self):
        basis = MultiSectorBasis(2, (2, 1, 0))
        assert basis.size == 3 + 2 + 1
        assert basis.states[basis.sector_slice(1)] == ((1, 0), (0, 1))
        assert basis.index((0, 0)) == 5

    def test_rejects_duplicate_sectors(self):
        with pytest.raises(ValueError):
            MultiSectorBasis(2, (1, 1))

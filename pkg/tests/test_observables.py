import itertools

import numpy as np
import pytest

from qstomo import observables
from qstomo.errors import DimensionMismatch, IndexOutOfRange, NotPrime, TooManyBases

PRIMES = (2, 3, 5, 7, 11, 13)


class TestObservable:
    def test_stores_basis_and_labels(self):
        obs = observables.Observable(np.eye(3, dtype=complex), np.array([2.0, 1.0, 0.0]))
        assert obs.dim == 3
        assert not obs.basis.flags.writeable

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            observables.Observable(2 * np.eye(2, dtype=complex), np.array([1.0, -1.0]))

    def test_rejects_degenerate_labels(self):
        with pytest.raises(ValueError):
            observables.Observable(np.eye(2, dtype=complex), np.array([1.0, 1.0]))

    def test_rejects_wrong_label_count(self):
        with pytest.raises(DimensionMismatch):
            observables.Observable(np.eye(2, dtype=complex), np.array([1.0, 0.0, -1.0]))


class TestProjector:
    def test_outer_product(self):
        obs = observables.random_observable_set(3, 1, seed=0)[0]
        for j in range(3):
            u = obs.basis[:, j]
            np.testing.assert_allclose(
                observables.projector(obs, j), np.outer(u, u.conj()), atol=1e-15
            )

    def test_projectors_sum_to_identity(self):
        obs = observables.random_observable_set(4, 1, seed=1)[0]
        total = sum(observables.projector(obs, j) for j in range(4))
        np.testing.assert_allclose(total, np.eye(4), atol=1e-12)

    def test_index_out_of_range(self):
        obs = observables.pauli_set()[0]
        with pytest.raises(IndexOutOfRange):
            observables.projector(obs, 2)
        with pytest.raises(IndexOutOfRange):
            observables.projector(obs, -1)


class TestMubSet:
    @pytest.mark.parametrize("d", PRIMES)
    def test_pairwise_unbiased(self, d):
        oset = observables.mub_set(d, d + 1)
        assert len(oset) == d + 1
        for a, b in itertools.combinations(range(d + 1), 2):
            overlap = np.abs(oset[a].basis.conj().T @ oset[b].basis) ** 2
            np.testing.assert_allclose(overlap, np.full((d, d), 1.0 / d), atol=1e-12)

    def test_first_basis_is_computational(self):
        oset = observables.mub_set(5, 6)
        np.testing.assert_array_equal(oset[0].basis, np.eye(5))

    def test_qubit_bases_are_pauli(self):
        oset = observables.mub_set(2, 3)
        pauli = observables.pauli_set()
        for a, b in zip(oset, pauli):
            np.testing.assert_allclose(a.basis, b.basis, atol=1e-15)

    def test_prefix_property(self):
        small = observables.mub_set(7, 3)
        full = observables.mub_set(7, 8)
        for a, b in zip(small, full):
            np.testing.assert_array_equal(a.basis, b.basis)

    def test_rejects_composite_dimension(self):
        for d in (4, 6, 8, 9, 12):
            with pytest.raises(NotPrime):
                observables.mub_set(d, 2)

    def test_rejects_too_many_bases(self):
        with pytest.raises(TooManyBases):
            observables.mub_set(3, 5)
        with pytest.raises(TooManyBases):
            observables.mub_set(3, 0)

    def test_family_tag(self):
        assert observables.mub_set(3, 2).family == "mub"


class TestRandomObservables:
    def test_unitary_and_deterministic(self):
        a = observables.random_observable_set(4, 3, seed=9)
        b = observables.random_observable_set(4, 3, seed=9)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.basis, y.basis)
        c = observables.random_observable_set(4, 3, seed=10)
        assert np.abs(a[0].basis - c[0].basis).max() > 1e-3

    def test_column_phase_convention(self):
        oset = observables.random_observable_set(5, 4, seed=3)
        for obs in oset:
            for j in range(5):
                col = obs.basis[:, j]
                pivot = col[np.flatnonzero(np.abs(col) > 1e-14)[0]]
                assert abs(pivot.imag) < 1e-14
                assert pivot.real > 0

    def test_family_tag(self):
        assert observables.random_observable_set(2, 1, seed=0).family == "random"


class TestPauliSet:
    def test_bases_and_labels(self):
        oset = observables.pauli_set()
        assert len(oset) == 3 and oset.dim == 2
        z, x, y = oset
        np.testing.assert_array_equal(z.basis, np.eye(2))
        np.testing.assert_allclose(
            x.basis, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15
        )
        np.testing.assert_allclose(
            y.basis, np.array([[1, 1], [1j, -1j]]) / np.sqrt(2), atol=1e-15
        )
        for obs in oset:
            np.testing.assert_array_equal(obs.eigenvalues, [1.0, -1.0])

    def test_diagonalizes_paulis(self):
        oset = observables.pauli_set()
        sigma = [
            np.diag([1.0, -1.0]).astype(complex),
            np.array([[0, 1], [1, 0]], dtype=complex),
            np.array([[0, -1j], [1j, 0]], dtype=complex),
        ]
        for obs, s in zip(oset, sigma):
            u = obs.basis
            np.testing.assert_allclose(
                u.conj().T @ s @ u, np.diag(obs.eigenvalues), atol=1e-14
            )


class TestObservableSet:
    def test_rejects_mixed_dimensions(self):
        a = observables.pauli_set()[0]
        b = observables.random_observable_set(3, 1, seed=0)[0]
        with pytest.raises(DimensionMismatch):
            observables.ObservableSet((a, b))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            observables.ObservableSet(())

    def test_iteration_and_indexing(self):
        oset = observables.mub_set(3, 4)
        assert [o.dim for o in oset] == [3, 3, 3, 3]
        assert oset[1] is oset.observables[1]


class TestIsPrime:
    def test_small_values(self):
        primes = [n for n in range(2, 30) if observables.is_prime(n)]
        assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        assert not observables.is_prime(1)
        assert not observables.is_prime(0)


class TestJson:
    def test_observable_roundtrip(self):
        obs = observables.random_observable_set(3, 1, seed=4)[0]
        back = observables.observable_from_json(observables.observable_to_json(obs))
        np.testing.assert_array_equal(back.basis, obs.basis)
        np.testing.assert_array_equal(back.eigenvalues, obs.eigenvalues)

    def test_set_roundtrip(self):
        oset = observables.mub_set(5, 4)
        obj = observables.observable_set_to_json(oset)
        assert obj["dim"] == 5 and obj["family"] == "mub"
        back = observables.observable_set_from_json(obj)
        assert back.family == "mub" and len(back) == 4
        for a, b in zip(back, oset):
            np.testing.assert_array_equal(a.basis, b.basis)

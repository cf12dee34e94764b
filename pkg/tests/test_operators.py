import numpy as np
import pytest

from otoc_criticality import operators
from otoc_criticality.errors import ParameterError, ShapeError
from otoc_criticality.linalg import is_hermitian

SX = np.array([[0, 1], [1, 0]], dtype=complex)


class TestBoson:
    def test_annihilation_n2(self):
        assert np.array_equal(operators.annihilation(2),
                              np.array([[0, 1], [0, 0]], complex))

    def test_annihilation_n3(self):
        a = operators.annihilation(3)
        assert np.allclose(np.diag(a, k=1), [1.0, np.sqrt(2)])
        assert np.count_nonzero(a) == 2

    def test_number_from_ladder(self):
        a = operators.annihilation(4)
        assert np.allclose(a.conj().T @ a, np.diag([0.0, 1, 2, 3]))

    def test_number_operator(self):
        assert np.array_equal(operators.number_operator(2), np.diag([0.0, 1]))
        assert np.array_equal(operators.number_operator(5),
                              np.diag([0.0, 1, 2, 3, 4]))
        assert np.trace(operators.number_operator(4)).real == 6

    def test_cutoff_validation(self):
        with pytest.raises(ParameterError):
            operators.annihilation(1)

    def test_truncated_commutator(self):
        # [a, a+] = I - n |n-1><n-1|: the truncation corrects only the top corner
        for n in (2, 5, 12):
            a = operators.annihilation(n)
            comm = a @ a.conj().T - a.conj().T @ a
            expected = np.eye(n, dtype=complex)
            expected[n - 1, n - 1] = 1.0 - n
            assert np.allclose(comm, expected, atol=1e-14 * n)
            assert np.count_nonzero(comm - np.diag(np.diag(comm))) == 0


class TestCollectiveSpin:
    def test_single_spin_half(self):
        Jz, Jp, Jm = operators.collective_spin(1)
        assert np.array_equal(Jz, np.diag([0.5, -0.5]))
        assert np.array_equal(Jp + Jm, SX)

    def test_two_atoms(self):
        Jz, Jp, _ = operators.collective_spin(2)
        assert np.array_equal(Jz, np.diag([1.0, 0.0, -1.0]))
        nz = Jp[Jp != 0]
        assert np.allclose(nz, np.sqrt(2))

    def test_ladder_algebra(self):
        for N in range(1, 17):
            Jz, Jp, Jm = operators.collective_spin(N)
            assert np.allclose(Jz @ Jp - Jp @ Jz, Jp, atol=1e-12)
            assert np.allclose(Jp @ Jm - Jm @ Jp, 2 * Jz, atol=1e-12)

    def test_casimir(self):
        for N in range(1, 17):
            Jz, Jp, Jm = operators.collective_spin(N)
            Jx = (Jp + Jm) / 2
            Jy = (Jp - Jm) / 2j
            j = N / 2
            casimir = Jx @ Jx + Jy @ Jy + Jz @ Jz
            assert np.max(np.abs(casimir - j * (j + 1) * np.eye(N + 1))) <= 1e-12 * N


class TestEmbed:
    def test_identity(self):
        out = operators.embed(np.eye(3), np.eye(2), 3, 1)
        assert np.array_equal(out, np.eye(6))

    def test_number_embedding(self):
        out = operators.embed(operators.number_operator(2), np.eye(2), 2, 1)
        assert np.array_equal(out, np.diag([0.0, 0, 1, 1]))

    def test_trace(self):
        out = operators.embed(operators.number_operator(4), np.eye(2), 4, 1)
        assert np.trace(out).real == 12

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            operators.embed(np.eye(3), np.eye(2), 4, 1)

    def test_preserves_hermiticity(self):
        rng = np.random.default_rng(2)
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        A = (A + A.conj().T) / 2
        B = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        B = (B + B.conj().T) / 2
        assert is_hermitian(operators.embed(A, B, 3, 3))

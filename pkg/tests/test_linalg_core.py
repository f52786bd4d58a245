from fractions import Fraction

import numpy as np
import pytest

from seifertpmhs.classify import E_per, J
from seifertpmhs.errors import InputError, NotHermitian, NotNilpotent, NotSymmetric, SingularMatrix
from seifertpmhs.linalg_core import (
    MatrixQ,
    Subspace,
    default_tol,
    exp_nilpotent,
    exponent_class,
    hermitian_signature,
    jordan_block_counts,
    jordan_parts,
    log_unipotent,
    signature,
    to_fraction,
)

from .conftest import random_real_matrix


def test_identity_parts():
    p = jordan_parts(np.eye(3))
    assert np.allclose(p.Ms, np.eye(3)) and np.allclose(p.Mu, np.eye(3))
    assert np.abs(p.N).max() == 0
    assert len(p.groups) == 1 and p.groups[0].dim == 3 and p.groups[0].value == 1


def test_p1_mirror_monodromy_parts():
    M = np.array([[-3, -2], [2, 1]])
    p = jordan_parts(M)
    assert len(p.groups) == 1 and abs(p.groups[0].value + 1) < 1e-12
    assert np.allclose(p.Ms, -np.eye(2))
    # N = log of the unipotent part -M; here -M - id is already nilpotent of square 0
    assert np.allclose(p.N, np.array([[2, 2], [-2, -2]]))
    assert jordan_block_counts(p.N) == {2: 1}


def test_diagonal_semisimple():
    p = jordan_parts(np.diag([2.0, 0.5]))
    assert np.allclose(p.Ms, np.diag([2.0, 0.5]))
    assert np.abs(p.N).max() < 1e-14
    assert sorted(g.value.real for g in p.groups) == [0.5, 2.0]


def test_singular_rejected():
    with pytest.raises(SingularMatrix):
        jordan_parts(np.zeros((2, 2)))


@pytest.mark.parametrize("seed", range(8))
def test_random_reassembly(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    M = random_real_matrix(rng, n)
    p = jordan_parts(M)
    assert np.abs(p.Ms @ p.Mu - M).max() < 1e-7
    assert np.abs(p.Ms @ p.Mu - p.Mu @ p.Ms).max() < 1e-7
    assert np.abs(np.linalg.matrix_power(p.N, n)).max() < 1e-7
    assert np.abs(exp_nilpotent(p.N) - p.Mu).max() < 1e-7
    assert sum(g.dim for g in p.groups) == n


def test_block_counts():
    assert jordan_block_counts(np.zeros((3, 3))) == {1: 3}
    assert jordan_block_counts(J(2)) == {2: 1}
    N = np.zeros((6, 6))
    N[:3, :3] = J(3)
    N[3:5, 3:5] = J(2)
    assert jordan_block_counts(N) == {3: 1, 2: 1, 1: 1}


def test_block_counts_conjugation_invariant():
    rng = np.random.default_rng(4)
    N = np.zeros((5, 5))
    N[:3, :3] = J(3)
    N[3:, 3:] = J(2)
    for _ in range(5):
        C = random_real_matrix(rng, 5)
        assert jordan_block_counts(np.linalg.solve(C, N @ C)) == {3: 1, 2: 1}


def test_block_counts_not_nilpotent():
    with pytest.raises(NotNilpotent):
        jordan_block_counts(np.eye(2))


def test_signatures():
    assert signature(np.diag([1, -1])) == (1, 0, 1)
    assert signature(np.zeros((2, 2), dtype=int)) == (0, 2, 0)
    assert signature([[0, 1], [1, 0]]) == (1, 0, 1)
    with pytest.raises(NotSymmetric):
        signature(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_signatures():
    assert hermitian_signature(np.array([[1.0]])) == (1, 0, 0)
    assert hermitian_signature(np.array([[0, 1], [1, 0]])) == (1, 0, 1)
    # i^{n-1} diag(E_2^per, E_2^per): E_2^per = [[0,1],[-1,0]], times i is hermitian
    E = E_per(2)
    H = 1j * np.block([[E, np.zeros((2, 2))], [np.zeros((2, 2)), E]])
    assert hermitian_signature(H) == (2, 0, 2)
    with pytest.raises(NotHermitian):
        hermitian_signature(np.array([[0, 1j], [1j, 0]]))


def test_sylvester_invariance():
    rng = np.random.default_rng(0)
    S = np.diag([3.0, 1.0, -2.0, 0.0])
    for _ in range(10):
        C = random_real_matrix(rng, 4)
        assert signature(C.T @ S @ C) == (2, 1, 1)


def test_exact_matrix_arithmetic():
    A = MatrixQ.from_any([[1, "1/2"], [0, 3]])
    assert A.det() == Fraction(3)
    Ai = A.inv()
    assert (A @ Ai) == MatrixQ.identity(2)
    assert A.kron(MatrixQ.identity(1)) == A
    assert to_fraction("3/4") == Fraction(3, 4)
    with pytest.raises(InputError):
        to_fraction("x")


def test_log_exp_round_trip():
    N = 0.3 * J(4)
    assert np.abs(log_unipotent(exp_nilpotent(N)) - N).max() < 1e-14


def test_exponent_class():
    assert exponent_class(1) == 1
    assert exponent_class(-1) == Fraction(1, 2)
    assert exponent_class(1j) == Fraction(3, 4)
    # only the argument matters
    assert exponent_class(2.0) == 1
    b = exponent_class(np.exp(-2j * np.pi * (2 ** 0.5 - 1)))
    assert isinstance(b, float) and abs(b - (2 ** 0.5 - 1)) < 1e-12


def test_subspace_ops():
    a = Subspace(3, np.array([[1, 0], [0, 1], [0, 0]], dtype=complex))
    b = Subspace(3, np.array([[0], [1], [1]], dtype=complex))
    assert (a + b).dim == 3
    assert a.intersect(b).dim == 0
    assert a.contains(np.array([1, 2, 0]))
    assert not a.contains(np.array([0, 0, 1]))
    assert a.complement_in(Subspace(3, np.array([[1], [0], [0]], dtype=complex))).dim == 1


def test_env_tolerance(monkeypatch):
    monkeypatch.setenv("SEIFERT_TOL", "1e-7")
    assert default_tol() == 1e-7
    monkeypatch.setenv("SEIFERT_TOL", "-1")
    with pytest.raises(InputError):
        default_tol()

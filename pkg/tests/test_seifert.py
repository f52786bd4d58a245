from fractions import Fraction

import numpy as np
import pytest

from seifertpmhs.errors import EigenvalueObstruction, InputError, NotSymmetric, SingularGram, VariantDomain
from seifertpmhs.linalg_core import MatrixQ
from seifertpmhs.seifert import (
    IsometricTriple,
    SeifertFormPair,
    derived_forms,
    dual_pair,
    duality_residuals,
    intersection_form,
    intersection_form_via_monodromy,
    milnor_monodromy,
    monodromy_array,
    monodromy_of,
    radical,
    seifert_from_triple,
)

from .conftest import random_real_matrix

L_UNI = [[1, 0], [2, 1]]


def test_monodromy_examples():
    assert monodromy_of([[1]]) == MatrixQ.from_any([[1]])
    assert monodromy_of([[1, 0], [0, -1]]) == MatrixQ.identity(2)
    # antisymmetric part flips the sign
    assert monodromy_of([[0, 1], [-1, 0]]) == MatrixQ.identity(2).scale(-1)
    assert monodromy_of(L_UNI) == MatrixQ.from_any([[-3, -2], [2, 1]])


def test_monodromy_defining_identity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 7))
        G = random_real_matrix(rng, n)
        M = monodromy_array(G)
        a, b = rng.normal(size=n), rng.normal(size=n)
        assert abs((M @ a) @ G @ b - b @ G @ a) < 1e-8
        # M preserves L
        assert np.abs(M.T @ G @ M - G).max() < 1e-7


def test_degenerate_rejected():
    with pytest.raises(SingularGram):
        SeifertFormPair.from_gram([[1, 1], [1, 1]])
    with pytest.raises(InputError):
        SeifertFormPair.from_gram([[1, 2, 3]])


def test_derived_forms_unipotent():
    f = derived_forms(L_UNI)
    assert np.allclose(f["I_s"].gram, [[2, 2], [2, 2]])
    assert np.allclose(f["I_a"].gram, [[0, 2], [-2, 0]])
    # M = [[-3,-2],[2,1]] has only eigenvalue -1
    assert f["I_s2"].dim == 0 and f["I_a3"].dim == 2 and f["I_s3"].dim == 0
    assert f["I_a2"].dim == 2


def test_derived_forms_symmetry():
    rng = np.random.default_rng(9)
    for _ in range(6):
        G = random_real_matrix(rng, 4)
        f = derived_forms(G)
        assert np.abs(f["I_s"].gram - f["I_s"].gram.T).max() < 1e-12
        assert np.abs(f["I_a"].gram + f["I_a"].gram.T).max() < 1e-12
        for name, sgn in (("I_s2", 1), ("I_a2", -1)):
            g = f[name].gram
            if g.size:
                assert np.abs(g - sgn * g.T).max() < 1e-6


def test_seifert_from_triple_1dim():
    T = IsometricTriple.build([[1]], [[1]], 0)
    L1 = seifert_from_triple(T, 1)
    assert L1.exact == MatrixQ.from_any([["1/2"]])
    L2 = seifert_from_triple(T, 2)
    assert L2.exact == MatrixQ.from_any([[2]])
    L3 = seifert_from_triple(T, 3)
    assert np.allclose(L3.gram, [[1]])


def test_seifert_from_triple_obstructions():
    with pytest.raises(EigenvalueObstruction):
        seifert_from_triple(IsometricTriple.build([[1]], [[-1]], 0), 1)
    with pytest.raises(VariantDomain):
        seifert_from_triple(IsometricTriple.build(np.eye(2), [[0, -1], [1, 0]], 0), 3)
    with pytest.raises(NotSymmetric):
        IsometricTriple.build([[0, 1], [0, 0]], np.eye(2), 0)
    with pytest.raises(InputError):
        IsometricTriple.build(np.eye(2), 2 * np.eye(2), 0)


@pytest.mark.parametrize("variant", [1, 2])
def test_triple_round_trip(variant):
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    T = IsometricTriple.build(np.eye(2), R, 0)
    L = seifert_from_triple(T, variant)
    M = monodromy_array(L)
    if variant == 1:
        assert np.abs(M - R).max() < 1e-12
    assert np.abs(M.T @ L.gram @ M - L.gram).max() < 1e-12


def test_dual_pair():
    d = dual_pair([[2, 0], [0, 3]])
    assert d.L_dual.exact == MatrixQ.from_any([["1/2", 0], [0, "1/3"]])
    assert np.allclose(d.M_dual, np.eye(2))


def test_duality_residuals_small():
    rng = np.random.default_rng(12)
    for _ in range(8):
        G = random_real_matrix(rng, 3)
        M = monodromy_array(G)
        ev = np.linalg.eigvals(M)
        for delta in (1, -1):
            if np.min(np.abs(ev + delta)) < 1e-3:
                continue
            res = duality_residuals(G, delta)
            assert max(res.values()) < 1e-7, res


def test_intersection_form():
    I0 = intersection_form(L_UNI, 0)
    # m=0: -L - L^T, symmetric
    assert I0 == MatrixQ.from_any([[-2, -2], [-2, -2]])
    I1 = intersection_form(L_UNI, 1)
    assert I1 == MatrixQ.from_any([[0, 2], [-2, 0]])
    for m in range(4):
        assert intersection_form(L_UNI, m) == intersection_form_via_monodromy(L_UNI, m)


def test_milnor_monodromy_sign():
    assert milnor_monodromy([[1]], 0) == MatrixQ.from_any([[-1]])
    assert milnor_monodromy([[1]], 1) == MatrixQ.from_any([[1]])


def test_radical():
    assert radical(np.array([[2.0, 2.0], [2.0, 2.0]])).dim == 1
    assert radical(np.eye(3)).dim == 0


def test_fraction_entries_kept_exact():
    L = SeifertFormPair.from_gram([["1/3", 0], [1, 2]])
    assert L.exact is not None and L.exact.entries[0][0] == Fraction(1, 3)

import cmath
import math

import numpy as np
import pytest

from seifertpmhs.classify import (
    Decomposition,
    E_per,
    Seif1,
    Seif2Circle,
    Seif2Real,
    Seif2Unipotent,
    Seif4,
    Tr1,
    Tr2R,
    Tr2S1,
    Tr4,
    all_seif_types,
    all_tr_types,
    classify_seifert,
    classify_triple,
    direct_sum,
    model_seifert,
    model_triple,
    seif1_witness,
    signature_of_seif_type,
)
from seifertpmhs.errors import NonCanonicalType
from seifertpmhs.linalg_core import signature
from seifertpmhs.seifert import IsometricTriple, dual_pair

from .conftest import random_real_matrix

W3 = cmath.exp(2j * math.pi / 3)


def base_change(T, C):
    return IsometricTriple.build(C.T @ T.S @ C, np.linalg.solve(C, T.M @ C), T.sym)


def one(t):
    return Decomposition([(t, 1)])


def test_tr1_trivial_model():
    T = model_triple(Tr1(1, 1, 1))
    assert np.allclose(T.M, [[1]]) and np.allclose(T.S, [[1]])
    assert classify_triple(IsometricTriple.build([[1]], [[1]], 0)) == one(Tr1(1, 1, 1))


def test_tr1_gram_shape():
    for lam in (1, -1):
        for eps in (1, -1):
            T = model_triple(Tr1(lam, 2, eps))
            assert np.allclose(T.S, eps * np.array([[0, 1], [-1, 0]]))
    assert np.allclose(E_per(2), [[0, 1], [-1, 0]])


def test_tr2r_model():
    T = model_triple(Tr2R(2.0, 1, 0))
    assert np.allclose(T.S, [[0, 1], [1, 0]])
    assert np.allclose(sorted(np.linalg.eigvals(T.M).real), [0.5, 2.0])


def test_tr2s1_round_trip():
    t = Tr2S1(1j, 2, 0, -1)
    assert classify_triple(model_triple(t)) == one(t)


@pytest.mark.parametrize("n,m", [(1, 0), (2, 1), (3, 0), (4, 1)])
def test_tr2_splits_into_tr1(n, m):
    # n + m + 1 even: Tr2S1(+-1, n, m, eps) splits into two Tr1
    for lam in (1, -1):
        for eps in (1, -1):
            got = classify_triple(model_triple(Tr2S1(lam, n, m, eps), strict=False))
            expect = Decomposition([(Tr1(lam, n, (-1) ** ((n + m + 1) // 2) * eps), 2)])
            assert got == expect, (lam, n, m, eps, got)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tr2_sign_irrelevant(n):
    m = n % 2
    for lam in (1, -1):
        a = classify_triple(model_triple(Tr2S1(lam, n, m, 1), strict=False))
        b = classify_triple(model_triple(Tr2S1(lam, n, m, -1), strict=False))
        assert a == b


def test_noncanonical_rejected():
    with pytest.raises(NonCanonicalType):
        model_triple(Tr2R(0.5, 1, 0))
    with pytest.raises(NonCanonicalType):
        model_triple(Tr4(2 - 1j, 1, 0))
    with pytest.raises(NonCanonicalType):
        model_seifert(Seif1(1, 2, 1))


def test_conjugate_canonicalisation():
    # Im lambda < 0 is mapped to the conjugate with a sign change
    t = Tr2S1(W3.conjugate(), 1, 0, 1)
    got = classify_triple(model_triple(t, strict=False))
    assert got == one(Tr2S1(W3, 1, 0, (-1) ** (1 + 0 + 1)))


def test_round_trip_small_grid():
    for t in all_tr_types(2):
        assert classify_triple(model_triple(t)) == one(t), t.tag


def test_base_change_invariance():
    rng = np.random.default_rng(5)
    for t in [Tr1(1, 3, -1), Tr2S1(1j, 2, 1, 1), Tr2R(-3.0, 2, 1), Tr4(2 + 1j, 1, 0)]:
        T = model_triple(t)
        for _ in range(4):
            C = random_real_matrix(rng, T.dim)
            assert classify_triple(base_change(T, C)) == one(t)


def test_direct_sum_additivity():
    ts = [Tr1(-1, 2, 1), Tr2S1(W3, 1, 0, -1), Tr2R(2.0, 1, 0)]
    Ts = [model_triple(t) for t in ts]
    for sym in (0, 1):
        same = [T for T, t in zip(Ts, ts) if T.sym == sym]
        if len(same) < 2:
            continue
        got = classify_triple(direct_sum(*same))
        expect = Decomposition()
        for T in same:
            expect = expect + classify_triple(T)
        assert got == expect


def test_decomposition_dim_sum():
    T = direct_sum(model_triple(Tr2R(2.0, 2, 0)), model_triple(Tr4(2 + 1j, 1, 0)))
    d = classify_triple(T)
    assert d.dim == 8


def test_seifert_examples():
    assert classify_seifert([[1]]) == one(Seif1(1, 1, 1))
    d = classify_seifert([[1, 0], [2, 1]])
    assert d == one(Seif1(-1, 2, 1))
    assert d.to_json() == [{"type": "Seif(-1,1,2,1)", "mult": 1}]
    assert classify_seifert([[0, -42], [42, -21]]) == one(Seif1(-1, 2, -1))


def test_witness_sign():
    # L(a, N a) carries eps for the -1 blocks of the examples
    assert seif1_witness([[1, 0], [2, 1]]) > 0
    assert seif1_witness([[0, -42], [42, -21]]) < 0


def test_signature_table_examples():
    assert signature_of_seif_type(Seif1(1, 1, 1))[0] == (1, 0, 0)
    assert signature_of_seif_type(Seif1(1, 3, -1))[0] == (2, 0, 1)
    assert signature_of_seif_type(Seif2Unipotent(-1, 3))[0] == (2, 2, 2)
    assert signature_of_seif_type(Seif4(2 + 1j, 2))[0] == (4, 0, 4)


@pytest.mark.parametrize("t", all_seif_types(3), ids=lambda t: t.tag)
def test_signature_table_vs_models(t):
    L = model_seifert(t)
    G = L.gram
    assert signature(G + G.T) == signature_of_seif_type(t)[0]
    assert classify_seifert(L) == one(t)


def test_seifert_duality():
    for t in all_seif_types(2):
        L = model_seifert(t)
        assert classify_seifert(dual_pair(L).L_dual) == classify_seifert(L), t.tag


def test_seif2_circle_zeta_relation():
    for t in all_seif_types(2):
        if isinstance(t, Seif2Circle):
            lam, n = complex(t.lam), t.n
            assert abs(complex(t.zeta) ** 2 - lam.conjugate() * (-1) ** (n + 1)) < 1e-12


def test_real_types_present():
    assert any(isinstance(t, Seif2Real) for t in all_seif_types(1))

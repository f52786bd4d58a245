import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from seifertpmhs.classify import J
from seifertpmhs.errors import ExponentOutOfRange, IncompatibleExponents, ParityMismatch, TruncationInsufficient
from seifertpmhs.flbundle import (
    ElementarySection,
    Lattice,
    bundle_from_seifert,
    check_thm52,
    fl_elementary,
    fl_lattice,
    gamma_of_filtration,
    hodge_from_lattice,
    lattice_from_hodge,
    lattice_pairing,
    pairing_fiber,
    pairing_fiber_swapped,
    pairing_P,
    pairing_P_closed,
    parse_generator,
    quadrature_fl,
    seifert_from_bundle,
    seifert_from_triple_sum,
    triple_from_seifert,
    twisted_hodge_from_fl_lattice,
)
from seifertpmhs.gamma_twist import normalized_seifert
from seifertpmhs.hodge import make_split_pmhs
from seifertpmhs.linalg_core import Subspace, exp_nilpotent, jordan_parts
from seifertpmhs.seifert import monodromy_array

from .conftest import lattice_spec

EULER = float(mpmath.euler)
Z0 = np.zeros((1, 1))


def test_fl_trivial_cases():
    s = fl_elementary(ElementarySection(np.array([1.0]), 0), Z0)
    assert s.alpha == 1 and np.allclose(s.A, [1.0])
    s = fl_elementary(ElementarySection(np.array([1.0]), Fraction(-1, 2)), Z0)
    assert s.alpha == Fraction(1, 2) and np.allclose(s.A, [math.sqrt(math.pi)])


def test_fl_jordan_block():
    N = J(2).astype(float)
    A = np.array([1.0, 2.0])
    s = fl_elementary(ElementarySection(A, 0), N)
    assert np.allclose(s.A, (np.eye(2) + EULER * N / (2j * math.pi)) @ A)


def test_fl_exponent_bound():
    with pytest.raises(ExponentOutOfRange):
        fl_elementary(ElementarySection(np.ones(1), -1), Z0)


def test_quadrature_trivial():
    assert np.allclose(quadrature_fl(ElementarySection(np.ones(1), 0), 1, Z0), [1.0], atol=1e-9)
    assert np.allclose(quadrature_fl(ElementarySection(np.ones(1), Fraction(-1, 2)), 1, Z0), [math.sqrt(math.pi)], atol=1e-9)


@pytest.mark.parametrize("alpha", [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_quadrature_grid(alpha, k):
    N = 0.7 * J(k)
    A = np.arange(1, k + 1) + 0.5j
    s = ElementarySection(A, alpha - 1)
    closed = fl_elementary(s, N)
    for z in (1, 2j, -1 + 1j):
        q = quadrature_fl(s, z, N)
        e = closed.evaluate(np.log(complex(z)), N)
        assert np.abs(q - e).max() < 1e-6


def test_pairing_exponent_check():
    L = np.eye(1)
    with pytest.raises(IncompatibleExponents):
        pairing_P(ElementarySection(np.ones(1), Fraction(1, 3)), ElementarySection(np.ones(1), Fraction(1, 3)), L, 0, 1, Z0)
    with pytest.raises(IncompatibleExponents):
        pairing_P_closed(np.ones(1), Fraction(1, 3), np.ones(1), Fraction(1, 2), L, 0, Z0)


def test_pairing_closed_vs_direct():
    # the closed form needs N to be an infinitesimal isometry of L
    L = np.array([[1.0, 0.0], [2.0, 1.0]])
    N = jordan_parts(-monodromy_array(L)).N.real
    rng = np.random.default_rng(3)
    A, B = rng.normal(size=2), rng.normal(size=2)
    for a1, a2 in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(3, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(5, 2))):
        power, coeff = pairing_P_closed(A, a1, B, a2, L, 0, N)
        for z in (1, 2j, 0.3 - 0.7j):
            v = pairing_P(ElementarySection(A, a1), ElementarySection(B, a2), L, 0, z, N)
            assert abs(v - coeff * complex(z) ** int(power)) < 1e-10


@pytest.mark.parametrize("m", [0, 1, 2])
def test_pairing_checks_on_fixtures(m):
    rng = np.random.default_rng(20 + m)
    for _ in range(4):
        p = make_split_pmhs(lattice_spec(rng, m, 8), m, bool(rng.integers(0, 2)), rng=rng, base_change=True)
        rep = check_thm52(p)
        assert rep.ok, [e.to_json() for e in rep.failed()]


def test_P_symmetry_random():
    rng = np.random.default_rng(1)
    L = np.array([[1.0, 0.0], [2.0, 1.0]])
    for m in range(4):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert abs(pairing_fiber_swapped(b, a, L, m) - (-1) ** (m + 1) * pairing_fiber(a, b, L, m)) < 1e-12


def test_conversion_round_trips():
    L = np.array([[1.0, 0.0], [2.0, 1.0]])
    for m in range(3):
        M, S = triple_from_seifert(L, m)
        assert np.abs(seifert_from_triple_sum(M, S, m) - L).max() < 1e-12
        assert np.abs(seifert_from_bundle(bundle_from_seifert(L, m)) - L).max() < 1e-15
    # 1-dim, m odd: P = L / (2πi)^{m+1}
    b = bundle_from_seifert([[1.0]], 1)
    assert np.allclose(b.P, [[1 / (2j * math.pi) ** 2]])


def test_conversion_parity():
    with pytest.raises(ParityMismatch):
        seifert_from_triple_sum(np.eye(1), np.eye(1), 0)


def test_fixture_round_trip():
    rng = np.random.default_rng(4)
    for m in range(3):
        p = make_split_pmhs(lattice_spec(rng, m), m, rng=rng, base_change=True)
        ln = normalized_seifert(p).gram
        M, S = triple_from_seifert(ln, m)
        assert np.abs(M - p.M).max() < 1e-8 and np.abs(S - p.S).max() < 1e-8


def test_single_generator_lattice():
    lat = Lattice([{Fraction(0): np.array([1.0])}], Z0)
    F = hodge_from_lattice(lat, 0, jordan_parts(np.eye(1)))
    assert F[0].dim == 1 and F[1].dim == 0


def test_two_generator_lattice_unipotent():
    A = np.array([1.0, 0.0])
    lat = Lattice([{Fraction(0): A}, {Fraction(1): np.array([0.0, 1.0])}], np.zeros((2, 2)))
    F = hodge_from_lattice(lat, 0, jordan_parts(np.eye(2)))
    assert F[0].equals(Subspace(2, A.reshape(2, 1).astype(complex)))
    assert F[-1].dim == 2 and F[1].dim == 0


def test_two_generator_lattice_nilpotent():
    N = J(2).astype(float)
    parts = jordan_parts(exp_nilpotent(N))
    g1 = parse_generator([{"A": [1, 0], "alpha": 0}])
    g2 = parse_generator([{"A": [0, 1], "alpha": 1, "poly": [1, 2]}])
    lat = Lattice([g1, g2], N)
    F = hodge_from_lattice(lat, 1, parts)
    GF_direct = gamma_of_filtration(F, parts)
    GF_z = twisted_hodge_from_fl_lattice(fl_lattice(lat), 1, parts)
    assert GF_z.equals(GF_direct)
    assert F.is_nested()


def test_lattice_exponent_bounds():
    with pytest.raises(ExponentOutOfRange):
        Lattice([{Fraction(-1): np.ones(1)}], Z0)
    with pytest.raises(ExponentOutOfRange):
        Lattice([{Fraction(0): np.ones(1)}], Z0, "z")


def test_truncation_insufficient():
    lat = Lattice([{Fraction(0): np.ones(1)}], Z0, cutoff=Fraction(1))
    with pytest.raises(TruncationInsufficient):
        lat.gr(2)


def test_lattice_hodge_round_trip_and_pairing():
    rng = np.random.default_rng(8)
    for m in range(3):
        p = make_split_pmhs(lattice_spec(rng, m), m, bool(rng.integers(0, 2)), rng=rng, base_change=True)
        lat = lattice_from_hodge(p.mhs)
        parts = p.mhs.parts
        assert hodge_from_lattice(lat, m, parts).equals(p.F)
        zlat = fl_lattice(lat)
        assert twisted_hodge_from_fl_lattice(zlat, m, parts).equals(gamma_of_filtration(p.F, parts))
        pr = lattice_pairing(zlat, normalized_seifert(p).gram, m)
        lead = min(pr)
        assert lead == m + 1
        assert np.linalg.svd(pr[lead], compute_uv=False)[-1] > 1e-8

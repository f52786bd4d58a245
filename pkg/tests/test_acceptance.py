"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import cmath
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from seifertpmhs.classify import (
    Decomposition,
    J,
    Seif1,
    Tr2S1,
    all_seif_types,
    all_tr_types,
    classify_seifert,
    classify_triple,
    model_seifert,
    model_triple,
    seif1_witness,
    signature_of_seif_type,
)
from seifertpmhs.flbundle import (
    ElementarySection,
    check_thm52,
    fl_elementary,
    pairing_fiber,
    pairing_fiber_swapped,
    quadrature_fl,
)
from seifertpmhs.gamma_twist import (
    classify_pmhs_seifert,
    gamma_identity_residuals,
    normalized_seifert,
    sqrt_tate_twist,
    tate_twist_residuals,
    verify_thm43,
)
from seifertpmhs.hodge import check_pmhs, make_split_pmhs, random_spec
from seifertpmhs.linalg_core import MatrixQ, exact_signature, signature
from seifertpmhs.seifert import IsometricTriple
from seifertpmhs.thomseb import a1_fixture, gamma_filtration, hnor_sign, p1_mirror, suspend, t_pqr, tensor_seifert, ts_hodge

from .conftest import lattice_spec, random_fixtures, random_real_matrix

W3 = cmath.exp(2j * math.pi / 3)


def report(n, ok, detail=""):
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, detail


def one(t):
    return Decomposition([(t, 1)])


@pytest.fixture(scope="module")
def fixtures50():
    # dims <= 12, m in {0,1,2}, mixed signed and unsigned
    return random_fixtures(2024, 50, max_dim=12)


def test_criterion_1_worked_examples():
    t0 = time.perf_counter()
    ok = classify_seifert([[1, 0], [2, 1]]) == one(Seif1(-1, 2, 1))
    gram = t_pqr(2, 3, 7).L.exact
    ok &= gram == MatrixQ.from_any([[0, -42], [42, -21]])
    ok &= classify_seifert(gram) == one(Seif1(-1, 2, -1))
    ok &= seif1_witness([[1, 0], [2, 1]]) == 2
    ok &= seif1_witness(gram) == 42**2 * (Fraction(41, 42) - 1) == -42
    dt = time.perf_counter() - t0
    report(1, bool(ok) and dt < 1.0, f"{dt:.3f}s")


def _expected(t):
    # Im lambda < 0 is canonicalised to the conjugate with sign (-1)^(n+m+1)
    if isinstance(t, Tr2S1) and complex(t.lam).imag < 0:
        return Tr2S1(complex(t.lam).conjugate(), t.n, t.m, (-1) ** (t.n + t.m + 1) * t.eps)
    return t


def test_criterion_2_round_trip():
    t0 = time.perf_counter()
    types = all_tr_types(4, circle=(W3, W3.conjugate(), 1j))
    rng = np.random.default_rng(7)
    bad = []
    for t in types:
        T = model_triple(t, strict=False)
        want = one(_expected(t))
        if classify_triple(T) != want:
            bad.append(t.tag)
            continue
        for _ in range(20):
            C = random_real_matrix(rng, T.dim)
            B = IsometricTriple.build(C.T @ T.S @ C, np.linalg.solve(C, T.M @ C), T.sym)
            if classify_triple(B) != want:
                bad.append(t.tag + " (base change)")
                break
    dt = time.perf_counter() - t0
    report(2, not bad and dt < 30, f"{len(types)} types, {dt:.1f}s, failures {bad[:5]}")


def test_criterion_3_signature_table():
    bad = []
    types = all_seif_types(5)
    for t in types:
        L = model_seifert(t)
        # exact where the model is rational
        sig = signature(L.gram + L.gram.T) if L.exact is None else exact_signature(L.exact + L.exact.T)
        if sig != signature_of_seif_type(t)[0]:
            bad.append(t.tag)
    report(3, not bad, f"{len(types)} types, failures {bad}")


def test_criterion_4_gamma_identities():
    worst = 0.0
    for a in (Fraction(1, 6), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)):
        for n in range(1, 7):
            for scale in (0.3, 1.0, 2.5):
                worst = max(worst, gamma_identity_residuals(a, scale * J(n)))
    report(4, worst < 1e-10, f"max residual {worst:.2e}")


def test_criterion_5_pmhs_identities(fixtures50):
    signs = Counter(s for _, _, s, _ in fixtures50)
    bad = []
    for spec, m, signed, p in fixtures50:
        if not (check_pmhs(p).ok and verify_thm43(p).ok):
            bad.append((spec, m, signed))
    ok = not bad and len(fixtures50) >= 50 and signs[True] > 0 and signs[False] > 0
    ok &= max(p.n for *_, p in fixtures50) <= 12
    report(5, ok, f"{len(fixtures50)} fixtures, signed {signs[True]}, failures {len(bad)}")


def test_criterion_6_fl():
    worst = 0.0
    for alpha in (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)):
        for k in (1, 2, 3):
            N = 0.7 * J(k)
            s = ElementarySection(np.arange(1, k + 1) + 0.5j, alpha - 1)
            closed = fl_elementary(s, N)
            for z in (1, 2j, -1 + 1j):
                worst = max(worst, float(np.abs(quadrature_fl(s, z, N) - closed.evaluate(np.log(complex(z)), N)).max()))
    rng = np.random.default_rng(6)
    thm = all(check_thm52(make_split_pmhs(lattice_spec(rng, m), m, bool(i % 2), rng=rng, base_change=True)).ok
              for i, m in enumerate((0, 1, 2, 0, 1, 2)))
    L = rng.normal(size=(3, 3))
    sym = max(abs(pairing_fiber_swapped(b, a, L, m) - (-1) ** (m + 1) * pairing_fiber(a, b, L, m))
              for m in range(4) for a, b in [rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))])
    report(6, worst < 1e-6 and thm and sym < 1e-12, f"quadrature {worst:.1e}, closed form {thm}, symmetry {sym:.1e}")


def test_criterion_7_twist(fixtures50):
    bad = []
    for spec, m, signed, p in fixtures50:
        t = sqrt_tate_twist(p)
        if t.spectral_pairs() != p.spectral_pairs().shifted(Fraction(1, 2), 1):
            bad.append("spp")
        if np.abs(normalized_seifert(t).gram - normalized_seifert(p).gram).max() >= 1e-9:
            bad.append("lnor")
        if max(tate_twist_residuals(p, sqrt_tate_twist(t)).values()) >= 1e-9:
            bad.append("double")
    report(7, not bad, f"failures {Counter(bad)}")


def _pairs(spec):
    """Indices of entries that have a distinct conjugate partner."""
    return [i for i, (p, q, b, d) in enumerate(spec) if p < q]


def _conj_beta(b):
    return Fraction(1) if b == 1 else 1 - b


def _shifted_spec(spec, i, s):
    p, q, b, d = spec[i]
    partner = (q, p, _conj_beta(b))
    out, dropped = [], False
    for k, e in enumerate(spec):
        if k == i:
            continue
        if not dropped and tuple(e[:3]) == partner and e[3] == d:
            dropped = True
            continue
        out.append(e)
    assert dropped
    return out + [(p - s, q + s, b, d), (q + s, p - s, _conj_beta(b), d)]


def _spp_mod2(p):
    c = Counter()
    for a_num, a_den, k, mult in p.spectral_pairs().to_json():
        c[(Fraction(a_num, a_den) % 2, k)] += mult
    return c


def test_criterion_8_nemethi():
    rng = np.random.default_rng(88)
    family = []
    while len(family) < 10:
        m = int(rng.integers(0, 3))
        spec = random_spec(rng, m, 8)
        if _pairs(spec):
            family.append((spec, m, bool(rng.integers(0, 2))))
    same_bad = iff_bad = differing = 0
    for spec, m, signed in family:
        base = make_split_pmhs(spec, m, signed, rng=rng, base_change=True)
        cls0, mod0 = classify_pmhs_seifert(base), _spp_mod2(base)
        for i in _pairs(spec):
            for s in (2, -2, 4):
                v = make_split_pmhs(_shifted_spec(spec, i, s), m, signed, rng=rng, base_change=True)
                same_bad += classify_pmhs_seifert(v) != cls0 or _spp_mod2(v) != mod0
            for s in (1, -1, 3):
                v = make_split_pmhs(_shifted_spec(spec, i, s), m, signed, rng=rng, base_change=True)
                diff = _spp_mod2(v) != mod0
                differing += diff
                iff_bad += diff != (classify_pmhs_seifert(v) != cls0)
    ok = same_bad == 0 and iff_bad == 0 and differing > 0
    report(8, ok, f"2Z-shift mismatches {same_bad}, mod-2 disagreements {iff_bad}, distinct variants {differing}")


def test_criterion_9_thom_sebastiani():
    grams = [[[1, 0], [2, 1]], [[0, -42], [42, -21]], [[3]], [[2, 1, 0], [-1, 1, 5], [0, 2, -1]]]
    ok = True
    for a in grams:
        for b in grams:
            A, B = MatrixQ.from_any(a), MatrixQ.from_any(b)
            for m in range(3):
                for n in range(3):
                    raw, hn = tensor_seifert(A, m, B, n)
                    ok &= raw.exact == A.kron(B).scale((-1) ** ((m + 1) * (n + 1)))
                    ok &= hn.exact == A.scale(hnor_sign(m)).kron(B.scale(hnor_sign(n)))
    for t in (p1_mirror(), t_pqr(2, 3, 7)):
        s = suspend(t)
        ok &= s.m == t.m + 1 and s.L.exact == t.L.exact.scale((-1) ** t.m) and s.M == t.M.scale(-1)
        ok &= s.L_hnor.exact == t.L_hnor.exact and s.M_hnor == t.M_hnor
    x2 = a1_fixture()
    rng = np.random.default_rng(9)
    for i in range(10):
        m = i % 3
        p = make_split_pmhs(lattice_spec(rng, m), m, bool(i % 2), rng=rng, base_change=True)
        GF = ts_hodge(gamma_filtration(p), p.mhs.parts, m, gamma_filtration(x2.pmhs), x2.pmhs.mhs.parts, 0)
        ok &= GF.equals(gamma_filtration(sqrt_tate_twist(p)), 1e-9)
    report(9, bool(ok))

"""The Gamma automorphism G, the normalized Seifert form of a PMHS, the
paired forms L^sym / L^herm, and the square root of a Tate twist."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import polygamma

from .classify import Decomposition, Seif1, Seif2Circle, Seif2Unipotent
from .errors import BadSquareRoot, EigenvalueOffCircle, NotSplit, SingularNu
from .hodge import (
    CheckEntry,
    Filtration,
    SteenbrinkMHS,
    SteenbrinkPMHS,
    ValidationReport,
    ladders,
    theta,
)
from .linalg_core import (
    AutomorphismParts,
    Subspace,
    _tol,
    as_array,
    exp_nilpotent,
    jordan_parts,
)
from .seifert import SeifertFormPair, monodromy_array

TWO_PI_I = 2j * math.pi

# ---------------------------------------------------------------------------
# Gamma derivatives


def gamma_derivatives(a: float, order: int) -> list[float]:
    """[Γ(a), Γ'(a), ..., Γ^{(order)}(a)].

    Γ^{(k)} = Γ · B_k(ψ, ψ', ..., ψ^{(k-1)}) with the complete Bell
    polynomials, B_k = sum_i C(k-1, i) B_{k-1-i} ψ^{(i)}.
    """
    a = float(a)
    psi = [float(polygamma(j, a)) for j in range(order)]
    bell = [1.0]
    for k in range(1, order + 1):
        bell.append(sum(math.comb(k - 1, i) * bell[k - 1 - i] * psi[i] for i in range(k)))
    g = float(_gamma(a))
    return [g * b for b in bell]


def gamma_operator(a, X: np.ndarray) -> np.ndarray:
    """Γ(a·id + X) for nilpotent X, as a finite Taylor sum."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    coeffs = gamma_derivatives(float(a), n)
    out = np.zeros((n, n), dtype=complex)
    power = np.eye(n, dtype=complex)
    for k, c in enumerate(coeffs):
        if k:
            power = power @ X
        out = out + (c / math.factorial(k)) * power
    return out


def exp_series_quotient(N: np.ndarray) -> np.ndarray:
    """(e^N - id)/N = sum_k N^k/(k+1)!."""
    n = N.shape[0]
    out = np.zeros((n, n), dtype=complex)
    power = np.eye(n, dtype=complex)
    for k in range(n + 1):
        out = out + power / math.factorial(k + 1)
        power = power @ N
    return out


def gamma_identity_residuals(alpha, N: np.ndarray) -> float:
    """Max residual of the reflection identities for Γ applied to a nilpotent N."""
    N = np.asarray(N, dtype=complex)
    n = N.shape[0]
    I = np.eye(n)
    X = N / TWO_PI_I
    a = float(alpha)
    if a == 1.0:
        lhs = gamma_operator(1.0, X) @ gamma_operator(1.0, -X)
        rhs = exp_nilpotent(N / 2) @ np.linalg.inv(exp_series_quotient(N))
    else:
        lhs = gamma_operator(a, X) @ gamma_operator(1 - a, -X)
        rhs = (cmath.exp(1j * math.pi * a) * TWO_PI_I) * exp_nilpotent(N / 2) @ np.linalg.inv(
            cmath.exp(TWO_PI_I * a) * exp_nilpotent(N) - I
        )
    return float(np.abs(lhs - rhs).max())


# ---------------------------------------------------------------------------
# G


@dataclass
class GammaAutomorphism:
    G: np.ndarray
    parts: AutomorphismParts

    def block(self, i: int) -> np.ndarray:
        """G restricted to the i-th eigen-sector (zero elsewhere)."""
        return self.G @ self.parts.projectors[i]

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.G)


def _require_circle(parts: AutomorphismParts):
    for g in parts.groups:
        if g.beta is None:
            raise EigenvalueOffCircle(f"eigenvalue {g.value} is not on the unit circle")


def gamma_automorphism(parts: AutomorphismParts) -> GammaAutomorphism:
    """G = ⊕ Γ(β·id - N/2πi) over the eigen-sectors, β ∈ (0,1]."""
    _require_circle(parts)
    n = parts.dim
    X = -parts.N / TWO_PI_I
    G = np.zeros((n, n), dtype=complex)
    for g, P in zip(parts.groups, parts.projectors):
        G = G + gamma_operator(g.beta, X) @ P
    return GammaAutomorphism(G, parts)


# ---------------------------------------------------------------------------
# normalized Seifert form


@dataclass
class NormalizedSeifert:
    gram: np.ndarray
    nu: np.ndarray

    @property
    def pair(self) -> SeifertFormPair:
        return SeifertFormPair(self.gram)


def _realish(a: np.ndarray, what: str) -> np.ndarray:
    if np.abs(a.imag).max(initial=0.0) > 1e-7 * max(1.0, np.abs(a).max()):
        raise SingularNu(f"{what} is not real")
    return a.real


def nu_inverse(M: np.ndarray, parts: AutomorphismParts) -> np.ndarray:
    """ν^{-1}: M - id on H_{≠1} and -(M - id)/N on H_1."""
    n = M.shape[0]
    P1 = parts.projector_where(lambda g: g.beta == 1)
    Pn = np.eye(n) - P1
    return (M - np.eye(n)) @ Pn - exp_series_quotient(parts.N) @ P1


def normalized_seifert(p: SteenbrinkPMHS) -> NormalizedSeifert:
    """L^nor(a, b) = -S(a, ν^{-1} b)."""
    parts = p.mhs.parts
    _require_circle(parts)
    S = as_array(p.S, complex)
    vinv = nu_inverse(p.M, parts)
    sv = np.linalg.svd(vinv, compute_uv=False)
    if sv[-1] < 1e-10 * max(1.0, sv[0]):
        raise SingularNu("nu is not invertible")
    gram = _realish(-S @ vinv, "L^nor")
    nu = _realish(np.linalg.inv(vinv), "nu")
    return NormalizedSeifert(gram, nu)


# ---------------------------------------------------------------------------
# L^sym and L^herm


@dataclass
class SectorPairing:
    """Bilinear (or sesquilinear) form on span(left) × span(right), Gram in those bases."""

    left: np.ndarray
    right: np.ndarray
    gram: np.ndarray


def _log_part(L) -> tuple[np.ndarray, AutomorphismParts]:
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L)
    parts = jordan_parts(monodromy_array(L))
    return L.gram.astype(complex), parts


def _check_root(lam, kappa, tol):
    if abs(complex(kappa) ** 2 - complex(lam)) > max(_tol(tol), 1e-9) * 10:
        raise BadSquareRoot(f"kappa^2 = {complex(kappa) ** 2} differs from lambda = {lam}")


def _sector_basis(parts: AutomorphismParts, lam) -> np.ndarray:
    i = parts.index_of(complex(lam))
    if i is None:
        return np.zeros((parts.dim, 0), dtype=complex)
    return parts.groups[i].space.basis


def lsym(L, lam, kappa, tol: float | None = None) -> SectorPairing:
    """κ·L(a, e^{-N/2} b) on H_λ × H_{1/λ}."""
    _check_root(lam, kappa, tol)
    G, parts = _log_part(L)
    A = _sector_basis(parts, lam)
    B = _sector_basis(parts, 1 / complex(lam))
    E = exp_nilpotent(-parts.N / 2)
    return SectorPairing(A, B, complex(kappa) * (A.T @ G @ E @ B))


def lherm(L, lam, kappa, tol: float | None = None) -> SectorPairing:
    """L^sym_κ(a, conj b) on H_λ × H_λ, λ on the unit circle; hermitian."""
    if abs(abs(complex(lam)) - 1) > 1e-9:
        raise EigenvalueOffCircle("lherm needs |lambda| = 1")
    _check_root(lam, kappa, tol)
    G, parts = _log_part(L)
    A = _sector_basis(parts, lam)
    E = exp_nilpotent(-parts.N / 2)
    return SectorPairing(A, A, complex(kappa) * (A.T @ G @ E @ A.conj()))


# ---------------------------------------------------------------------------
# identities relating S, L^nor and G


def _rel(a: np.ndarray, scale: float) -> float:
    return float(np.abs(a).max(initial=0.0)) / scale


def verify_thm43(p: SteenbrinkPMHS, tol: float | None = None) -> ValidationReport:
    """S vs L^nor through G, isotropy of G(F), and the phase of L^nor(a, N^l conj a)."""
    mhs = p.mhs
    parts = mhs.parts
    S = as_array(p.S, complex)
    n = mhs.n
    sc = max(1.0, float(np.abs(S).max()))
    thr = max(_tol(tol), 1e-9)
    ln = normalized_seifert(p).gram.astype(complex)
    sl = max(1.0, float(np.abs(ln).max()))
    Gm = gamma_automorphism(parts).G
    N = parts.N
    E = exp_nilpotent(-N / 2)
    entries = []

    # S(a, b) = c · L^nor(Ga, e^{-N/2} G b)
    worst = {"S_via_Lnor_circle": 0.0, "S_via_Lnor_one": 0.0}
    for i, g in enumerate(parts.groups):
        j = mhs.conj_index(i)
        A = g.space.basis
        B = parts.groups[j].space.basis
        lhs = A.T @ S @ B
        core = (Gm @ A).T @ ln @ E @ (Gm @ B)
        if g.beta == 1:
            key, rhs = "S_via_Lnor_one", core
        else:
            b = float(g.beta)
            key, rhs = "S_via_Lnor_circle", (-1 / TWO_PI_I) * cmath.exp(-1j * math.pi * b) * core
        worst[key] = max(worst[key], _rel(lhs - rhs, sc))
    for k, v in worst.items():
        entries.append(CheckEntry(k, v < thr, v))

    # isotropy of G(F) for L^nor(., e^{-N/2} .)
    iso = 0.0
    wit = None
    for i, g in enumerate(parts.groups):
        j = mhs.conj_index(i)
        w = mhs.center(g)
        for q in mhs.hodge_range():
            A = mhs.sector_F[i][q]
            B = mhs.sector_F[j][w + 1 - q]
            if A.dim and B.dim:
                r = _rel((Gm @ A.basis).T @ ln @ E @ (Gm @ B.basis), sl * max(1.0, np.abs(Gm).max()) ** 2)
                if r > iso:
                    iso, wit = r, f"p={q}, sector {g.value:.4g}"
    entries.append(CheckEntry("G_F_isotropy", iso < thr, iso, None if iso < thr else wit))

    # phase of L^nor(a, N^l conj a) on I_0^{pq} and G(I_0^{pq})
    ds = mhs.deligne
    herm = 0.0
    pos_ok = True
    pos_wit = None
    min_ev = math.inf
    for (pp, qq, i), sp in ds.I0.items():
        g = parts.groups[i]
        l = pp + qq - mhs.center(g)
        alpha = mhs.alpha(g, pp)
        d = 2 * alpha + l + 1 - mhs.m
        phase = cmath.exp(0.5j * math.pi * float(d))
        if p.signed and (l + 1) % 2 == 0:
            phase = -phase
        Nl = np.linalg.matrix_power(N, l)
        for label, V in (("I0", sp.basis), ("G_I0", Gm @ sp.basis)):
            H = (V.T @ ln @ Nl @ V.conj()) / phase
            herm = max(herm, _rel(H - H.conj().T, sl * max(1.0, np.abs(V).max()) ** 2))
            ev = np.linalg.eigvalsh((H + H.conj().T) / 2)
            min_ev = min(min_ev, float(ev.min()))
            if ev.min() <= 1e-9 * sl:
                pos_ok = False
                pos_wit = pos_wit or f"{label} (p,q)=({pp},{qq}), sector {g.value:.4g}"
    entries.append(CheckEntry("Lnor_phase_hermitian", herm < thr, herm))
    entries.append(CheckEntry("Lnor_phase_positive", pos_ok, None if min_ev is math.inf else min_ev, pos_wit))
    return ValidationReport(entries)


# ---------------------------------------------------------------------------
# classification of the normalized Seifert form from ladders


def classify_pmhs_seifert(p: SteenbrinkPMHS, tol: float | None = None) -> Decomposition:
    """Seif types of (H_R, L^nor) read off from the spectral pair ladders."""
    if not p.mhs.deligne.is_split(tol):
        raise NotSplit("Deligne splitting is not conjugation symmetric")
    m = p.m
    out = Decomposition()
    for lad in ladders(p.mhs):
        n = lad.l + 1
        lam = (-1) ** (m + 1) * complex(lad.lam)
        d = 2 * lad.alpha + lad.l + 1 - m
        flip = -1 if (p.signed and n % 2 == 0) else 1
        if abs(lam.imag) > 1e-9:
            zeta = flip * cmath.exp(0.5j * math.pi * float(d))
            if lam.imag < 0:
                lam, zeta = lam.conjugate(), zeta.conjugate()
            out.add(Seif2Circle(_snap_unit(lam), n, _snap_unit(zeta)), lad.mult)
            continue
        lam_i = 1 if lam.real > 0 else -1
        d_int = int(d) if isinstance(d, Fraction) else int(round(float(d)))
        if d_int % 2:
            out.add(Seif2Unipotent(lam_i, n), lad.mult)
        else:
            eps = flip * (-1 if (d_int // 2) % 2 else 1)
            out.add(Seif1(lam_i, n, eps), lad.mult * (1 if lad.kind == "single" else 2))
    return out


def _snap_unit(z: complex) -> complex:
    for v in (1, -1, 1j, -1j):
        if abs(z - v) < 1e-12:
            return complex(v)
    return z


# ---------------------------------------------------------------------------
# square root of a Tate twist


def _twist_factor(beta, N: np.ndarray):
    """(new exponent, Hodge index shift, Γ(new - N/2πi)^{-1} Γ(beta - N/2πi))."""
    X = -N / TWO_PI_I
    if beta <= Fraction(1, 2):
        new, shift = beta + Fraction(1, 2), 1
    else:
        new, shift = beta - Fraction(1, 2), 0
    if not isinstance(beta, Fraction):
        new = float(new)
    R = np.linalg.solve(gamma_operator(new, X), gamma_operator(beta, X))
    return new, shift, R


def sqrt_tate_twist(p: SteenbrinkPMHS, tol: float | None = None) -> SteenbrinkPMHS:
    """A PMHS of weight m+1 on the same space with monodromy -M and the same L^nor."""
    mhs = p.mhs
    parts = mhs.parts
    n = mhs.n
    ln = normalized_seifert(p).gram
    Mt = -mhs.M
    parts_t = jordan_parts(Mt, tol, mhs.cluster_tol)
    nu_t = np.linalg.inv(nu_inverse(Mt, parts_t))
    St = -ln @ nu_t
    St = St.real if np.abs(St.imag).max(initial=0) < 1e-9 * max(1.0, np.abs(St).max()) else St

    lo, hi = mhs.F.lo - 1, mhs.F.hi + 2
    pieces = {q: [] for q in range(lo, hi + 1)}
    for i, g in enumerate(parts.groups):
        _, shift, R = _twist_factor(g.beta, parts.N)
        for q in range(lo, hi + 1):
            src = mhs.sector_F[i][q - shift]
            if src.dim:
                pieces[q].append(src.image(R))
    steps = {}
    for q in range(lo, hi + 1):
        steps[q] = Subspace(n, np.hstack([x.basis for x in pieces[q]])) if pieces[q] else Subspace.zero(n)
    Ft = Filtration(steps, True, Subspace.full(n))
    return SteenbrinkPMHS(SteenbrinkMHS(Mt, Ft, mhs.m + 1, tol, mhs.cluster_tol), St, p.signed)


def tate_twist_residuals(p: SteenbrinkPMHS, pp: SteenbrinkPMHS) -> dict[str, float]:
    """Compare a doubly twisted PMHS ``pp`` against ``p``: F^{k+1} vs F^k, W_{k+2} vs W_k, M and S."""
    F0, F2 = p.F, pp.F
    W0, W2 = p.mhs.W, pp.mhs.W
    fgap = max(F2[k + 1].distance(F0[k]) for k in range(F0.lo - 2, F0.hi + 3))
    wgap = max(W2[k + 2].distance(W0[k]) for k in range(W0.lo - 2, W0.hi + 3))
    sc = max(1.0, float(np.abs(p.S).max()))
    return {
        "F_shift": fgap,
        "W_shift": wgap,
        "M": float(np.abs(pp.M - p.M).max()),
        "S": float(np.abs(np.asarray(pp.S) - np.asarray(p.S)).max()) / sc,
        "m": float(pp.m - p.m - 2),
    }

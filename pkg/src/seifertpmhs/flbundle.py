"""Elementary sections, the Fourier-Laplace transform on them, the flat
pairing P, and Hodge filtrations read off from lattices of sections."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .errors import (
    ExponentOutOfRange,
    IncompatibleExponents,
    InputError,
    ParityMismatch,
    QuadratureNonconvergence,
    TruncationInsufficient,
)
from .gamma_twist import TWO_PI_I, gamma_operator, normalized_seifert, nu_inverse
from .hodge import CheckEntry, Filtration, SteenbrinkMHS, SteenbrinkPMHS, ValidationReport
from .linalg_core import (
    AutomorphismParts,
    Subspace,
    as_array,
    exp_nilpotent,
    realify,
    exponent_class,
    jordan_parts,
    null_space,
    sum_spaces,
    to_fraction,
)
from .seifert import monodromy_array

QUAD_TOL = 1e-6


def _X(N: np.ndarray) -> np.ndarray:
    return np.asarray(N, dtype=complex) / TWO_PI_I


def _tau_power(logt: complex, alpha, N: np.ndarray) -> np.ndarray:
    """exp(log t · (alpha - N/2πi))."""
    n = N.shape[0]
    return cmath.exp(logt * float(alpha)) * exp_nilpotent(-logt * _X(N))


# ---------------------------------------------------------------------------
# elementary sections


@dataclass(frozen=True)
class ElementarySection:
    """es(A, alpha): the univalued section t^{alpha - N/2πi} A."""

    A: np.ndarray
    alpha: object

    def evaluate(self, logt: complex, N: np.ndarray) -> np.ndarray:
        """Flat-section coordinates of es(A, alpha) at the point with logarithm ``logt``."""
        return _tau_power(logt, self.alpha, N) @ np.asarray(self.A, dtype=complex)


def fl_elementary(s: ElementarySection, N: np.ndarray) -> ElementarySection:
    """FL(es(A, a-1)) = es(Γ(a - N/2πi) A, a) for a > 0."""
    a = s.alpha + 1
    if a <= 0:
        raise ExponentOutOfRange(f"Fourier-Laplace needs exponent > -1, got {s.alpha}")
    G = gamma_operator(a, -_X(N))
    return ElementarySection(G @ np.asarray(s.A, dtype=complex), a)


def quadrature_fl(s: ElementarySection, z: complex, N: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """∫_0^{∞·z} e^{-τ/z} es(A, a-1)(τ) dτ by adaptive quadrature along the ray.

    With τ = z·t and t = u^{1/a} the integrand becomes
    (z^a / a) e^{-u^{1/a}} exp((log z + log u / a)(-N/2πi)) A on (0, ∞).
    """
    a = float(s.alpha) + 1
    if a <= 0:
        raise ExponentOutOfRange(f"Fourier-Laplace needs exponent > -1, got {s.alpha}")
    z = complex(z)
    if z == 0:
        raise InputError("z must be nonzero")
    logz = cmath.log(z)
    X = _X(N)
    A = np.asarray(s.A, dtype=complex)
    n = A.shape[0]
    # powers of X applied to A
    XA = [A]
    for _ in range(n):
        XA.append(X @ XA[-1])

    def vec(u):
        if u <= 0:
            return np.zeros(n, dtype=complex)
        lt = logz + math.log(u) / a
        out = np.zeros(n, dtype=complex)
        c = 1.0 + 0j
        for k in range(n):
            out = out + c * XA[k]
            c = c * (-lt) / (k + 1)
        return out * math.exp(-u ** (1 / a))

    pref = cmath.exp(a * logz) / a
    result = np.zeros(n, dtype=complex)
    for i in range(n):
        if all(x[i] == 0 for x in XA):
            continue
        total = 0j
        for part in (np.real, np.imag):
            acc = 0.0
            for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
                val, err = quad(lambda u: float(part(vec(u)[i])), lo, hi, epsabs=tol, epsrel=tol, limit=400)
                if not np.isfinite(val) or err > max(QUAD_TOL * 1e-2, 10 * tol * max(1.0, abs(val))):
                    raise QuadratureNonconvergence(f"quadrature error estimate {err:.2e} on coordinate {i}")
                acc += val
            total += acc if part is np.real else 1j * acc
        result[i] = pref * total
    return result


# ---------------------------------------------------------------------------
# the flat pairing P


def pairing_P(s1: ElementarySection, s2: ElementarySection, L, m: int, z: complex, N: np.ndarray) -> complex:
    """P(s1(z), s2(-z)) = (2πi)^{-(m+1)} L(s1(z), γ_{-π} s2(e^{πi} z)).

    Flat-section coordinates are used on both fibers; the second argument is
    evaluated on the branch log z + πi.
    """
    a1, a2 = s1.alpha, s2.alpha
    if abs(float(a1 + a2) - round(float(a1 + a2))) > 1e-9:
        raise IncompatibleExponents("exponents must add up to an integer")
    L = np.asarray(L, dtype=complex)
    logz = cmath.log(complex(z))
    u = s1.evaluate(logz, N)
    v = s2.evaluate(logz + 1j * math.pi, N)
    return complex(u @ L @ v) / TWO_PI_I ** (m + 1)


def pairing_P_closed(A, a1, B, a2, L, m: int, N: np.ndarray) -> tuple:
    """(power, coefficient) with P(es(A,a1)(z), es(B,a2)(-z)) = coefficient · z^power."""
    if abs(float(a1 + a2) - round(float(a1 + a2))) > 1e-9:
        raise IncompatibleExponents("exponents must add up to an integer")
    L = np.asarray(L, dtype=complex)
    E = exp_nilpotent(-np.asarray(N, dtype=complex) / 2)
    coeff = cmath.exp(1j * math.pi * float(a2)) * complex(np.asarray(A) @ L @ E @ np.asarray(B)) / TWO_PI_I ** (m + 1)
    return a1 + a2, coeff


def pairing_fiber(a, b, L, m: int) -> complex:
    """P(a, b) for a on the fiber at z (branch s) and b on the fiber at -z (branch s + π)."""
    return complex(np.asarray(a) @ np.asarray(L, dtype=complex) @ np.asarray(b)) / TWO_PI_I ** (m + 1)


def pairing_fiber_swapped(b, a, L, m: int) -> complex:
    """P(b, a) for b at -z (branch s + π) and a at z viewed on branch s + 2π."""
    L = np.asarray(L, dtype=complex)
    Mb = (-1) ** (m + 1) * monodromy_array(L.real)
    return complex(np.asarray(b) @ L @ np.linalg.solve(Mb, np.asarray(a))) / TWO_PI_I ** (m + 1)


def check_thm52(p: SteenbrinkPMHS, zs=(1.0, 2j, -1 + 1j, 0.3 - 0.7j)) -> ValidationReport:
    """Identities for P on Fourier-Laplace images of elementary sections, against S."""
    mhs = p.mhs
    parts = mhs.parts
    N = parts.N
    m = p.m
    S = np.asarray(p.S, dtype=complex)
    ln = normalized_seifert(p).gram
    sc = max(1.0, float(np.abs(S).max()))
    res = {"P_vs_S_circle": 0.0, "P_vs_S_one": 0.0, "P_closed_form": 0.0, "P_z_power": 0.0}
    for i, g in enumerate(parts.groups):
        j = mhs.conj_index(i)
        A = g.space.basis
        B = parts.groups[j].space.basis
        a = g.beta
        b = parts.groups[j].beta
        Ga = gamma_operator(a, -_X(N))
        Gb = gamma_operator(b, -_X(N))
        for x in range(A.shape[1]):
            for y in range(B.shape[1]):
                s1 = ElementarySection(Ga @ A[:, x], a)
                s2 = ElementarySection(Gb @ B[:, y], b)
                sval = complex(A[:, x] @ S @ B[:, y])
                power, coeff = pairing_P_closed(s1.A, a, s2.A, b, ln, m, N)
                for z in zs:
                    pv = pairing_P(s1, s2, ln, m, z, N)
                    zp = complex(z) ** int(power)
                    res["P_closed_form"] = max(res["P_closed_form"], abs(pv - coeff * zp) / sc)
                    if g.beta == 1:
                        target = -complex(z) ** 2 / TWO_PI_I ** (m + 1) * sval
                        res["P_vs_S_one"] = max(res["P_vs_S_one"], abs(pv - target) / sc)
                    else:
                        target = complex(z) / TWO_PI_I ** m * sval
                        res["P_vs_S_circle"] = max(res["P_vs_S_circle"], abs(pv - target) / sc)
                expected = 2 if g.beta == 1 else 1
                if power != expected:
                    res["P_z_power"] = max(res["P_z_power"], 1.0)
                # flatness: P(z)/z^power constant over several z
                vals = [pairing_P(s1, s2, ln, m, z, N) / complex(z) ** int(power) for z in zs]
                res["P_z_power"] = max(res["P_z_power"], max(abs(v - vals[0]) for v in vals) / sc)
    # (-1)^{m+1} symmetry on random fiber vectors
    rng = np.random.default_rng(0)
    n = mhs.n
    sym = 0.0
    for _ in range(5):
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        sym = max(sym, abs(pairing_fiber_swapped(b, a, ln, m) - (-1) ** (m + 1) * pairing_fiber(a, b, ln, m)))
    res["P_symmetry"] = sym
    return ValidationReport([CheckEntry(k, v < 1e-9, v) for k, v in res.items()])


# ---------------------------------------------------------------------------
# the three equivalent data


@dataclass
class FlatBundleData:
    """Flat bundle in flat-section coordinates: monodromy and the Gram of P(z-fiber, -z-fiber)."""

    monodromy: np.ndarray
    P: np.ndarray
    m: int


def _check_parity(M: np.ndarray, S: np.ndarray, m: int, parts: AutomorphismParts | None = None):
    parts = parts or jordan_parts(M)
    n = M.shape[0]
    P1 = parts.projector_where(lambda g: g.beta == 1)
    Pn = np.eye(n) - P1
    sc = max(1.0, float(np.abs(S).max()))
    for P, sign in ((Pn, (-1) ** m), (P1, (-1) ** (m + 1))):
        R = P.T @ S @ P
        if np.abs(R.T - sign * R).max() > 1e-8 * sc:
            raise ParityMismatch("S has the wrong symmetry on one of H_1, H_{≠1}")
    return parts


def seifert_from_triple_sum(M, S, m: int) -> np.ndarray:
    """(H, M, S, m) -> L^nor = -S ν^{-1}."""
    M = realify(as_array(M, complex))
    S = realify(as_array(S, complex))
    if np.iscomplexobj(M) or np.iscomplexobj(S):
        raise InputError("M and S must be real")
    parts = _check_parity(M, S, m)
    L = -S @ nu_inverse(M, parts)
    return L.real


def triple_from_seifert(L, m: int) -> tuple[np.ndarray, np.ndarray]:
    """(H, L, m) -> (M, S) with M = (-1)^{m+1} · monodromy of L and S = -L ν."""
    L = np.asarray(L, dtype=float)
    M = (-1) ** (m + 1) * monodromy_array(L)
    parts = jordan_parts(M)
    S = -L @ np.linalg.inv(nu_inverse(M, parts))
    return M, S.real


def bundle_from_seifert(L, m: int) -> FlatBundleData:
    L = np.asarray(L, dtype=float)
    return FlatBundleData((-1) ** (m + 1) * monodromy_array(L), L / TWO_PI_I ** (m + 1), m)


def seifert_from_bundle(b: FlatBundleData) -> np.ndarray:
    L = b.P * TWO_PI_I ** (b.m + 1)
    if np.abs(L.imag).max() > 1e-9 * max(1.0, np.abs(L).max()):
        raise InputError("P does not take values in i^{m+1} R")
    return L.real


# ---------------------------------------------------------------------------
# lattices of sections


def _key(a):
    return a if isinstance(a, Fraction) else Fraction(a).limit_denominator(10 ** 6)


@dataclass
class Lattice:
    """A module of sections spanned by finite sums of elementary sections.

    ``coordinate`` is "tau" (span over C{{∂_τ^{-1}}}) or "z" (span over C{z});
    each generator maps exponent -> coefficient vector in H.
    """

    gens: list[dict]
    N: np.ndarray
    coordinate: str = "tau"
    cutoff: Fraction | None = None

    def __post_init__(self):
        if self.coordinate not in ("tau", "z"):
            raise InputError("coordinate must be 'tau' or 'z'")
        self.gens = [{_key(a): np.asarray(v, dtype=complex) for a, v in g.items()} for g in self.gens]
        n = self.N.shape[0]
        if self.cutoff is None:
            lo = min((min(g) for g in self.gens if g), default=Fraction(0))
            self.cutoff = Fraction(math.floor(lo)) + n + 2
        self.cutoff = _key(self.cutoff)
        bound = -1 if self.coordinate == "tau" else 0
        for g in self.gens:
            for a in g:
                if a <= bound:
                    raise ExponentOutOfRange(f"exponent {a} must exceed {bound}")

    @property
    def dim(self) -> int:
        return self.N.shape[0]

    def shift(self, a: Fraction, v: np.ndarray) -> tuple[Fraction, np.ndarray]:
        """∂_τ^{-1} on the tau side, multiplication by z on the z side."""
        if self.coordinate == "z":
            return a + 1, v
        X = _X(self.N)
        return a + 1, np.linalg.solve(float(a + 1) * np.eye(self.dim) - X, v)

    def _elements(self) -> list[dict]:
        if getattr(self, "_cache", None) is not None:
            return self._cache
        out = []
        for g in self.gens:
            cur = {a: v for a, v in g.items() if a <= self.cutoff}
            while cur:
                out.append(cur)
                nxt = {}
                for a, v in cur.items():
                    b, w = self.shift(a, v)
                    if b <= self.cutoff:
                        nxt[b] = nxt.get(b, 0) + w
                cur = nxt
        self._cache = out
        return out

    def gr(self, gamma) -> Subspace:
        """Gr_V^gamma of the module as a subspace of H (coefficients of es(., gamma))."""
        gamma = _key(gamma)
        if gamma > self.cutoff:
            raise TruncationInsufficient(f"exponent {gamma} beyond cutoff {self.cutoff}")
        n = self.dim
        elems = self._elements()
        if not elems:
            return Subspace.zero(n)
        below = sorted({a for e in elems for a in e if a < gamma})
        lead = np.array([e.get(gamma, np.zeros(n)) for e in elems], dtype=complex).T  # n × k
        if below:
            low = np.vstack([np.array([e.get(a, np.zeros(n)) for e in elems], dtype=complex).T for a in below])
            scale = max(1.0, float(np.abs(low).max()))
            ker = null_space(low, scale=scale)
            if ker.shape[1] == 0:
                return Subspace.zero(n)
            return Subspace(n, lead @ ker)
        return Subspace(n, lead)


def parse_generator(terms) -> dict:
    """Generator from a list of {"A": vector, "alpha": exponent, "poly": [c0, c1, ...]}."""
    out: dict = {}
    for t in terms:
        A = np.asarray([complex(x) if not isinstance(x, str) or "j" in x else float(to_fraction(x)) for x in t["A"]], dtype=complex)
        a = to_fraction(t["alpha"]) if isinstance(t["alpha"], (str, int, Fraction)) else t["alpha"]
        poly = t.get("poly", [1])
        for k, c in enumerate(poly):
            key = _key(a + k)
            out[key] = out.get(key, 0) + complex(c) * A
    return out


def fl_lattice(lat: Lattice) -> Lattice:
    """Fourier-Laplace image: es(A, a) in tau goes to es(Γ(a+1 - N/2πi) A, a+1) in z."""
    if lat.coordinate != "tau":
        raise InputError("Fourier-Laplace transform expects a tau-lattice")
    gens = []
    for g in lat.gens:
        h = {}
        for a, v in g.items():
            s = fl_elementary(ElementarySection(v, a), lat.N)
            h[s.alpha] = s.A
        gens.append(h)
    return Lattice(gens, lat.N, "z", lat.cutoff + 1)


def _descend(A: np.ndarray, gamma: Fraction, steps: int, X: np.ndarray) -> np.ndarray:
    """Coefficient of ∂_τ^{steps} es(A, gamma) (steps may be negative)."""
    n = X.shape[0]
    I = np.eye(n)
    out = A
    if steps >= 0:
        for j in range(steps):
            out = (float(gamma - j) * I - X) @ out
    else:
        for j in range(-steps):
            b = gamma + j  # ∂_τ^{-1}: C^b -> C^{b+1}
            out = np.linalg.solve(float(b + 1) * I - X, out)
    return out


def _sector_filtration(lat: Lattice, parts: AutomorphismParts, m: int, twisted: bool) -> Filtration:
    n = lat.dim
    X = _X(lat.N)
    sectors = []
    for g in parts.groups:
        if g.beta is None:
            raise InputError("eigenvalues must lie on the unit circle")
        alpha = _key(g.beta)
        steps = {}
        p = m + 2
        while True:
            gamma = m - p + alpha - (0 if twisted else 1)
            if gamma > lat.cutoff:
                raise TruncationInsufficient("cutoff too small to reach the full sector")
            gr = lat.gr(gamma).intersect(g.space)
            if gr.dim == 0:
                steps[p] = Subspace.zero(n)
            elif twisted:
                steps[p] = gr  # z^{-(m-p)} only moves the exponent
            else:
                steps[p] = Subspace(n, _descend(gr.basis, gamma, m - p, X))
            if steps[p].dim == g.dim:
                break
            p -= 1
        sectors.append(Filtration(steps, True, g.space))
    lo = min(f.lo for f in sectors)
    hi = max(f.hi for f in sectors)
    full = {k: sum_spaces([f[k] for f in sectors], n) for k in range(lo, hi + 1)}
    return Filtration(full, True, Subspace.full(n))


def hodge_from_lattice(lat: Lattice, m: int, parts: AutomorphismParts | None = None) -> Filtration:
    """F^p on H_λ from Gr_V^{m-p+α-1} of a tau-lattice, moved down to C^{α-1}."""
    if lat.coordinate != "tau":
        raise InputError("expected a tau-lattice")
    parts = parts or jordan_parts(exp_nilpotent(lat.N))
    return _sector_filtration(lat, parts, m, twisted=False)


def twisted_hodge_from_fl_lattice(zlat: Lattice, m: int, parts: AutomorphismParts) -> Filtration:
    """G^{(α)} F^p on H_λ from Gr_V^{m-p+α} of a z-lattice, moved to C^α by z^{-(m-p)}."""
    if zlat.coordinate != "z":
        raise InputError("expected a z-lattice")
    return _sector_filtration(zlat, parts, m, twisted=True)


def gamma_of_filtration(F: Filtration, parts: AutomorphismParts) -> Filtration:
    """G(F) sectorwise, with G = Γ(β - N/2πi) on H_λ."""
    from .gamma_twist import gamma_automorphism

    G = gamma_automorphism(parts).G
    return F.map(G, Subspace.full(parts.dim))


def lattice_from_hodge(mhs: SteenbrinkMHS) -> Lattice:
    """A tau-lattice whose Hodge filtration is F: one generator per F-adapted basis vector."""
    n = mhs.n
    X = _X(mhs.N)
    gens = []
    for i, g in enumerate(mhs.groups):
        alpha = _key(g.beta)
        F = mhs.sector_F[i]
        for p in range(F.hi, F.lo - 2, -1):
            piece = F[p].complement_in(F[p + 1])
            if piece.dim == 0:
                continue
            gamma = mhs.m - p + alpha - 1
            if gamma <= -1:
                raise ExponentOutOfRange("Hodge filtration reaches below the lattice bound")
            D = _descend(np.eye(n, dtype=complex), gamma, mhs.m - p, X)
            for v in piece.basis.T:
                gens.append({gamma: np.linalg.solve(D, v)})
    return Lattice(gens, mhs.N, "tau")


def lattice_pairing(zlat: Lattice, L, m: int, order: int | None = None) -> dict[int, np.ndarray]:
    """P between generators of a z-lattice as a truncated z-power series: power -> Gram."""
    L = np.asarray(L, dtype=complex)
    k = len(zlat.gens)
    out: dict[int, np.ndarray] = {}
    for i, gi in enumerate(zlat.gens):
        for j, gj in enumerate(zlat.gens):
            for a, va in gi.items():
                for b, vb in gj.items():
                    s = a + b
                    if s.denominator != 1:
                        continue
                    power, coeff = pairing_P_closed(va, a, vb, b, L, m, zlat.N)
                    power = int(power)
                    if order is not None and power > order:
                        continue
                    if power not in out:
                        out[power] = np.zeros((k, k), dtype=complex)
                    out[power][i, j] += coeff
    return {p: v for p, v in sorted(out.items()) if np.abs(v).max() > 1e-12}

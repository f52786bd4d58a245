"""Filtrations, weight filtrations, Deligne splittings, Steenbrink
(polarized) mixed Hodge structures, spectral pairs and their ladders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from .classify import Decomposition, Tr1, Tr2S1, _classify_parts, model_triple
from .errors import (
    EigenvalueOffCircle,
    InconsistentSpec,
    InputError,
    MHSViolation,
    NotInfinitesimalIsometry,
    NotNilpotent,
    NotSplit,
)
from .linalg_core import (
    AutomorphismParts,
    EigenGroup,
    Subspace,
    _tol,
    as_array,
    exp_nilpotent,
    exponent_class,
    hermitian_signature,
    jordan_parts,
    sum_spaces,
    to_fraction,
    unit_from_beta,
)

# ---------------------------------------------------------------------------
# filtrations


class Filtration:
    """Finite exhaustive filtration by subspaces of ``top``.

    Decreasing: F^p = top below the stored range and {0} above it.
    Increasing: W_k = {0} below the stored range and top above it.
    """

    def __init__(self, steps: dict[int, Subspace], decreasing: bool, top: Subspace):
        self.steps = dict(sorted(steps.items()))
        self.decreasing = decreasing
        self.top = top
        self.ambient = top.ambient

    @property
    def lo(self) -> int:
        return min(self.steps) if self.steps else 0

    @property
    def hi(self) -> int:
        return max(self.steps) if self.steps else 0

    def __getitem__(self, k: int) -> Subspace:
        if k in self.steps:
            return self.steps[k]
        if not self.steps:
            return self.top if self.decreasing else Subspace.zero(self.ambient)
        if k < self.lo:
            return self.top if self.decreasing else Subspace.zero(self.ambient)
        if k > self.hi:
            return Subspace.zero(self.ambient) if self.decreasing else self.top
        # a gap repeats the nearest stored step below it
        return self.steps[max(x for x in self.steps if x < k)]

    def indices(self, pad: int = 1) -> range:
        return range(self.lo - pad, self.hi + pad + 1)

    def is_nested(self, tol: float | None = None) -> bool:
        for k in range(self.lo - 1, self.hi + 1):
            a, b = self[k], self[k + 1]
            if self.decreasing and not a.contains_space(b, tol):
                return False
            if not self.decreasing and not b.contains_space(a, tol):
                return False
        return True

    def shifted(self, d: int) -> "Filtration":
        """Index shift: new[k] = old[k + d]."""
        return Filtration({k - d: v for k, v in self.steps.items()}, self.decreasing, self.top)

    def equals(self, other: "Filtration", tol: float | None = None) -> bool:
        lo = min(self.lo, other.lo) - 1
        hi = max(self.hi, other.hi) + 1
        return all(self[k].equals(other[k], tol) for k in range(lo, hi + 1))

    def max_gap(self, other: "Filtration") -> float:
        lo = min(self.lo, other.lo) - 1
        hi = max(self.hi, other.hi) + 1
        return max(self[k].distance(other[k]) for k in range(lo, hi + 1))

    def dims(self) -> dict[int, int]:
        return {k: self[k].dim for k in self.indices()}

    def map(self, A: np.ndarray, top: Subspace | None = None) -> "Filtration":
        return Filtration({k: v.image(A) for k, v in self.steps.items()}, self.decreasing, top or self.top.image(A))

    def intersect_with(self, sub: Subspace) -> "Filtration":
        return Filtration({k: v.intersect(sub) for k, v in self.steps.items()}, self.decreasing, self.top.intersect(sub))


def sum_filtrations(parts: Iterable[Filtration], ambient: int, decreasing: bool) -> Filtration:
    parts = list(parts)
    if not parts:
        return Filtration({}, decreasing, Subspace.full(ambient))
    lo = min(f.lo for f in parts)
    hi = max(f.hi for f in parts)
    top = sum_spaces([f.top for f in parts], ambient)
    steps = {k: sum_spaces([f[k] for f in parts], ambient) for k in range(lo, hi + 1)}
    return Filtration(steps, decreasing, top)


def filtration_from_bases(start: int, bases: list, ambient: int) -> Filtration:
    """Decreasing filtration F^{start} ⊇ F^{start+1} ⊇ ... from column bases."""
    steps = {}
    for i, b in enumerate(bases):
        arr = np.asarray(b, dtype=complex)
        if arr.size == 0:
            steps[start + i] = Subspace.zero(ambient)
        else:
            arr = arr.reshape(ambient, -1) if arr.ndim == 2 and arr.shape[0] == ambient else np.asarray(b, dtype=complex).T
            steps[start + i] = Subspace(ambient, arr)
    return Filtration(steps, True, Subspace.full(ambient))


# ---------------------------------------------------------------------------
# weight filtration


def _nil_index(N: np.ndarray, domain: Subspace) -> int:
    """Smallest k with N^k = 0 on the domain."""
    scale = max(1.0, float(np.linalg.norm(N, 2)))
    P = domain.basis
    for k in range(0, domain.dim + 1):
        if P.shape[1] == 0 or np.abs(P).max() <= 1e-7 * scale ** k:
            return k
        P = N @ P
    raise NotNilpotent("N is not nilpotent on the domain")


def weight_filtration(N, m: int, domain: Subspace | None = None) -> Filtration:
    """W^{(N,m)} on an N-invariant domain.

    W_{m+l} = sum_{j >= max(0,-l)} ker N^{l+j+1} ∩ Im N^j.
    """
    N = as_array(N, complex)
    n = N.shape[0]
    domain = Subspace.full(n) if domain is None else domain
    if domain.dim == 0:
        return Filtration({}, False, domain)
    k = _nil_index(N, domain)
    if k == 0:
        return Filtration({m: domain}, False, domain)
    scale = max(1.0, float(np.linalg.norm(N, 2)))
    images = [domain]
    for j in range(1, k):
        images.append(images[-1].image(N))
    kernels = {}

    def ker(e):
        if e <= 0:
            return Subspace.zero(n)
        if e >= k:
            return domain
        if e not in kernels:
            kernels[e] = domain.kernel_of(np.linalg.matrix_power(N, e), scale=scale ** e)
        return kernels[e]

    steps = {}
    for l in range(-k, k):
        parts = []
        for j in range(max(0, -l), k):
            parts.append(ker(l + j + 1).intersect(images[j]))
        steps[m + l] = sum_spaces(parts, n)
    return Filtration(steps, False, domain)


def check_weight_properties(W: Filtration, N: np.ndarray, m: int) -> bool:
    """N W_l ⊆ W_{l-2} and N^l : Gr_{m+l} -> Gr_{m-l} bijective."""
    for k in W.indices(2):
        if not W[k - 2].contains_space(W[k].image(N)):
            return False
    for l in range(0, max(W.hi - m, m - W.lo) + 2):
        top = W[m + l].complement_in(W[m + l - 1])
        img = top.image(np.linalg.matrix_power(N, l)) + W[m - l - 1]
        if img.dim != W[m - l].dim or top.dim != W[m - l].dim - W[m - l - 1].dim:
            return False
    return True


# ---------------------------------------------------------------------------
# graded forms of (S, N, m)


@dataclass(frozen=True)
class GradedData:
    W: Filtration
    gr: dict[int, np.ndarray]  # weight -> basis of a complement of W_{k-1} in W_k
    S_l: dict[int, np.ndarray]  # l -> Gram of S_l on gr[m+l]
    primitive: dict[int, Subspace]  # weight -> P_k
    checks: dict[str, bool]


def graded_data(S, N, m: int, tol: float | None = None) -> GradedData:
    tol = _tol(tol)
    S = as_array(S, complex)
    N = as_array(N, complex)
    n = S.shape[0]
    scale = max(1.0, np.abs(S).max()) * max(1.0, np.abs(N).max())
    if np.abs(N.T @ S + S @ N).max() > 1e-8 * scale:
        raise NotInfinitesimalIsometry("N is not an infinitesimal isometry of S")
    W = weight_filtration(N, m)
    gr = {}
    prim = {}
    S_l = {}
    for k in W.indices(1):
        Q = W[k].complement_in(W[k - 1])
        gr[k] = Q.basis
    checks = {"orthogonality": True, "nondegenerate": True, "primitive_decomposition": True, "symmetry": True}
    for k in W.indices(1):
        for k2 in W.indices(1):
            if k + k2 < 2 * m and W[k].dim and W[k2].dim:
                if np.abs(W[k].basis.T @ S @ W[k2].basis).max() > 1e-7 * scale:
                    checks["orthogonality"] = False
    for l in range(0, W.hi - m + 1):
        k = m + l
        Q = Subspace(n, gr.get(k, np.zeros((n, 0))), _orthonormal=True)
        if Q.dim == 0:
            continue
        Nl = np.linalg.matrix_power(N, l)
        G = Q.basis.T @ S @ Nl @ Q.basis
        S_l[l] = G
        sgn = (-1) ** (m + l)
        if np.abs(G.T - sgn * G).max() > 1e-7 * scale:
            checks["symmetry"] = False
        if np.linalg.svd(G, compute_uv=False)[-1] < 1e-7 * scale:
            checks["nondegenerate"] = False
        prim[k] = Q.preimage(np.linalg.matrix_power(N, l + 1), W[m - l - 3])
    # Gr_{m+l} = ⊕_i N^i P_{m+l+2i}, S_l-orthogonal
    for l in range(0, W.hi - m + 1):
        k = m + l
        if k not in S_l:
            continue
        pieces = []
        i = 0
        while k + 2 * i in prim:
            Pi = prim[k + 2 * i]
            # N^i P lifted, then projected to the chosen complement
            img = Pi.image(np.linalg.matrix_power(N, i))
            proj = Subspace(n, gr[k], _orthonormal=True).projector()
            pieces.append(Subspace(n, proj @ img.basis) if img.dim else Subspace.zero(n))
            i += 1
        total = sum(p.dim for p in pieces)
        if total != gr[k].shape[1] or sum_spaces(pieces, n).dim != total:
            checks["primitive_decomposition"] = False
        Nl = np.linalg.matrix_power(N, l)
        for a in range(len(pieces)):
            for b in range(a + 1, len(pieces)):
                if pieces[a].dim and pieces[b].dim:
                    if np.abs(pieces[a].basis.T @ S @ Nl @ pieces[b].basis).max() > 1e-7 * scale:
                        checks["primitive_decomposition"] = False
    return GradedData(W, gr, S_l, prim, checks)


# ---------------------------------------------------------------------------
# Steenbrink MHS / PMHS


def theta(g: EigenGroup) -> int:
    return 1 if g.beta == 1 else 0


def _beta_value(g: EigenGroup):
    if g.beta is None:
        raise EigenvalueOffCircle(f"eigenvalue {g.value} is not on the unit circle")
    return g.beta


class SteenbrinkMHS:
    """H = C^n with the standard real structure, monodromy M, Hodge filtration F, weight m."""

    def __init__(self, M, F: Filtration, m: int, tol: float | None = None, cluster_tol: float | None = None):
        self.M = as_array(M, complex)
        self.n = self.M.shape[0]
        self.F = F
        self.m = int(m)
        self.tol = _tol(tol)
        self.cluster_tol = cluster_tol
        if F.ambient != self.n:
            raise InputError("Hodge filtration lives in a different dimension")
        for g in self.parts.groups:
            _beta_value(g)

    @cached_property
    def parts(self) -> AutomorphismParts:
        return jordan_parts(self.M, self.tol, self.cluster_tol)

    @property
    def N(self) -> np.ndarray:
        return self.parts.N

    @property
    def groups(self):
        return self.parts.groups

    def center(self, g: EigenGroup) -> int:
        return self.m + theta(g)

    @cached_property
    def sector_W(self) -> list[Filtration]:
        return [weight_filtration(self.N, self.center(g), g.space) for g in self.groups]

    @cached_property
    def W(self) -> Filtration:
        return sum_filtrations(self.sector_W, self.n, False)

    @cached_property
    def sector_F(self) -> list[Filtration]:
        out = []
        for g, P in zip(self.groups, self.parts.projectors):
            out.append(Filtration({k: v.image(P) for k, v in self.F.steps.items()}, True, g.space))
        return out

    def conj_index(self, i: int) -> int:
        v = self.groups[i].value.conjugate()
        j = self.parts.index_of(v)
        if j is None:
            raise InputError("monodromy spectrum is not closed under conjugation")
        return j

    def gr_space(self, i: int, k: int) -> Subspace:
        W = self.sector_W[i]
        return W[k].complement_in(W[k - 1])

    def gr_F(self, i: int, p: int, k: int) -> Subspace:
        """F^p Gr^W_k on sector i, inside the chosen complement."""
        Q = self.gr_space(i, k)
        if Q.dim == 0:
            return Q
        V = self.sector_F[i][p].intersect(self.sector_W[i][k])
        return V.image(Q.projector())

    def weight_range(self) -> range:
        return range(self.W.lo - 1, self.W.hi + 2)

    def hodge_range(self) -> range:
        return range(self.F.lo - 1, self.F.hi + 2)

    def mhs_violations(self) -> list[tuple[int, int]]:
        """Pairs (k, p) where Gr^W_k is not F^p ⊕ conj F^{k+1-p}."""
        bad = []
        for i, g in enumerate(self.groups):
            j = self.conj_index(i)
            for k in self.weight_range():
                Q = self.gr_space(i, k)
                if Q.dim == 0:
                    continue
                for p in self.hodge_range():
                    A = self.gr_F(i, p, k)
                    B = self.gr_F(j, k + 1 - p, k).conj()
                    if A.dim + B.dim != Q.dim or (A + B).dim != Q.dim:
                        bad.append((k, p))
        return sorted(set(bad))

    def check_structure(self) -> dict[str, bool]:
        Ms, N = self.parts.Ms, self.N
        out = {"F_nested": self.F.is_nested(), "F_Ms_stable": True, "N_shifts_F": True}
        for p in self.F.indices():
            Fp = self.F[p]
            if not Fp.contains_space(Fp.image(Ms)):
                out["F_Ms_stable"] = False
            if not self.F[p - 1].contains_space(Fp.image(N)):
                out["N_shifts_F"] = False
        out["pure_graded"] = not self.mhs_violations()
        return out

    # spectral data ---------------------------------------------------

    def alpha(self, g: EigenGroup, p: int):
        beta = _beta_value(g)
        return self.m - p - 1 + beta

    def spectral_pairs(self) -> "SpectralPairs":
        d: dict = {}
        for i, g in enumerate(self.groups):
            F, W = self.sector_F[i], self.sector_W[i]
            th = theta(g)

            def f(p, w):
                return F[p].intersect(W[w]).dim

            for w in self.weight_range():
                for p in self.hodge_range():
                    c = f(p, w) - f(p + 1, w) - f(p, w - 1) + f(p + 1, w - 1)
                    if c:
                        key = (self.alpha(g, p), w - th)
                        d[key] = d.get(key, 0) + c
        return SpectralPairs(d)

    def spectral_numbers(self) -> dict:
        return self.spectral_pairs().numbers()

    @cached_property
    def deligne(self) -> "DeligneSplitting":
        return deligne_splitting(self)


@dataclass
class SteenbrinkPMHS:
    mhs: SteenbrinkMHS
    S: np.ndarray
    signed: bool = False

    @property
    def m(self) -> int:
        return self.mhs.m

    @property
    def n(self) -> int:
        return self.mhs.n

    @property
    def M(self) -> np.ndarray:
        return self.mhs.M

    @property
    def F(self) -> Filtration:
        return self.mhs.F

    def spectral_pairs(self) -> "SpectralPairs":
        return self.mhs.spectral_pairs()


# ---------------------------------------------------------------------------
# spectral pairs


def _alpha_key(a):
    return float(a)


class SpectralPairs:
    """Multiset of (alpha, k)."""

    def __init__(self, d: dict):
        self.d = {k: v for k, v in d.items() if v}

    @property
    def total(self) -> int:
        return sum(self.d.values())

    def items(self):
        return sorted(self.d.items(), key=lambda kv: (_alpha_key(kv[0][0]), kv[0][1]))

    def numbers(self) -> dict:
        out: dict = {}
        for (a, _), v in self.d.items():
            out[a] = out.get(a, 0) + v
        return dict(sorted(out.items(), key=lambda kv: _alpha_key(kv[0])))

    def shifted(self, da, dk) -> "SpectralPairs":
        return SpectralPairs({(a + da, k + dk): v for (a, k), v in self.d.items()})

    def mod2(self) -> "SpectralPairs":
        """Reduce alpha modulo 2Z into [0, 2)."""
        out: dict = {}
        for (a, k), v in self.d.items():
            r = a - 2 * math.floor(float(a) / 2)
            key = (r, k)
            out[key] = out.get(key, 0) + v
        return SpectralPairs(out)

    def pi1(self, m: int) -> "SpectralPairs":
        return SpectralPairs({(m - 1 - a, 2 * m - k): v for (a, k), v in self.d.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralPairs):
            return NotImplemented
        return self._canon() == other._canon()

    def _canon(self):
        out = {}
        for (a, k), v in self.d.items():
            key = (a if isinstance(a, Fraction) else round(float(a), 9), k)
            out[key] = out.get(key, 0) + v
        return out

    def to_json(self) -> list:
        rows = []
        for (a, k), v in self.items():
            if isinstance(a, Fraction):
                rows.append([a.numerator, a.denominator, k, v])
            else:
                rows.append([float(a), None, k, v])
        return rows

    def __repr__(self) -> str:
        return "Spp{" + ", ".join(f"({a},{k}):{v}" for (a, k), v in self.items()) + "}"


# ---------------------------------------------------------------------------
# Deligne splitting


@dataclass
class DeligneSplitting:
    I: dict[tuple[int, int], Subspace]
    I0: dict[tuple[int, int, int], Subspace]  # (p, q, sector index)
    mhs: SteenbrinkMHS = field(repr=False)

    def I_sector(self, p: int, q: int, i: int) -> Subspace:
        P = self.mhs.parts.projectors[i]
        return self.I.get((p, q), Subspace.zero(self.mhs.n)).image(P)

    def is_split(self, tol: float | None = None) -> bool:
        for (p, q), sp in self.I.items():
            other = self.I.get((q, p), Subspace.zero(sp.ambient))
            if not other.equals(sp.conj(), tol):
                return False
        return True

    def total_dim(self) -> int:
        return sum(s.dim for s in self.I.values())


def deligne_splitting(mhs: SteenbrinkMHS) -> DeligneSplitting:
    F, W = mhs.F, mhs.W
    n = mhs.n
    Fbar = {p: F[p].conj() for p in mhs.hodge_range()}

    def fbar(p):
        if p in Fbar:
            return Fbar[p]
        return F[p].conj()

    I = {}
    w_lo = W.lo
    for p in range(F.lo, F.hi + 1):
        for q in range(F.lo, F.hi + 1):
            k = p + q
            A = F[p].intersect(W[k])
            if A.dim == 0:
                continue
            parts = [fbar(q).intersect(W[k])]
            j = 1
            while k - j - 1 >= w_lo:
                parts.append(fbar(q - j).intersect(W[k - j - 1]))
                j += 1
            B = sum_spaces(parts, n)
            sp = A.intersect(B)
            if sp.dim:
                I[(p, q)] = sp
    I0 = {}
    N = mhs.N
    scale = max(1.0, float(np.linalg.norm(N, 2)))
    for (p, q), sp in I.items():
        for i, g in enumerate(mhs.groups):
            e = p + q - mhs.center(g) + 1
            if e <= 0:
                continue
            sec = sp.image(mhs.parts.projectors[i])
            if sec.dim == 0:
                continue
            ker = sec.kernel_of(np.linalg.matrix_power(N, e), scale=scale ** e)
            if ker.dim:
                I0[(p, q, i)] = ker
    return DeligneSplitting(I, I0, mhs)


def check_deligne(mhs: SteenbrinkMHS, ds: DeligneSplitting | None = None) -> dict[str, bool]:
    ds = ds or mhs.deligne
    n = mhs.n
    out = {"F_sum": True, "W_sum": True, "N_shift": True, "conj_mod_W": True, "primitive_sum": True}
    for p in mhs.hodge_range():
        parts = [s for (i, q), s in ds.I.items() if i >= p]
        tot = sum(s.dim for s in parts)
        if tot != mhs.F[p].dim or not sum_spaces(parts, n).equals(mhs.F[p]):
            out["F_sum"] = False
    for k in mhs.weight_range():
        parts = [s for (p, q), s in ds.I.items() if p + q <= k]
        tot = sum(s.dim for s in parts)
        if tot != mhs.W[k].dim or not sum_spaces(parts, n).equals(mhs.W[k]):
            out["W_sum"] = False
    for (p, q), s in ds.I.items():
        target = ds.I.get((p - 1, q - 1), Subspace.zero(n))
        if not target.contains_space(s.image(mhs.N)):
            out["N_shift"] = False
        other = ds.I.get((q, p), Subspace.zero(n))
        lhs = other + mhs.W[p + q - 2]
        if not lhs.equals(s.conj() + mhs.W[p + q - 2]):
            out["conj_mod_W"] = False
    # I^{pq} = ⊕_j N^j I_0^{p+j,q+j}, sectorwise
    for (p, q), s in ds.I.items():
        pieces = []
        for (a, b, i), s0 in ds.I0.items():
            j = a - p
            if j >= 0 and b - q == j:
                pieces.append(s0.image(np.linalg.matrix_power(mhs.N, j)))
        tot = sum(x.dim for x in pieces)
        if tot != s.dim or not sum_spaces(pieces, n).equals(s):
            out["primitive_sum"] = False
    return out


# ---------------------------------------------------------------------------
# validation of a PMHS


@dataclass
class CheckEntry:
    name: str
    passed: bool
    residual: float | None = None
    witness: str | None = None

    def to_json(self) -> dict:
        d = {"name": self.name, "passed": self.passed}
        if self.residual is not None:
            d["residual"] = self.residual
        if self.witness:
            d["witness"] = self.witness
        return d


@dataclass
class ValidationReport:
    entries: list[CheckEntry]

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def failed(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def get(self, name: str) -> list[CheckEntry]:
        return [e for e in self.entries if e.name.startswith(name)]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [e.to_json() for e in self.entries]}


def _scale(S) -> float:
    return max(1.0, float(np.abs(S).max()))


def check_pmhs(p: SteenbrinkPMHS, tol: float | None = None) -> ValidationReport:
    """Evaluate the axioms of a (signed) Steenbrink PMHS; never raises on failure."""
    tol = _tol(tol)
    mhs = p.mhs
    S = as_array(p.S, complex)
    M, N = mhs.M, mhs.N
    n = mhs.n
    sc = _scale(S)
    rtol = max(tol, 1e-9) * 10
    entries: list[CheckEntry] = []

    def add(name, ok, res=None, wit=None):
        entries.append(CheckEntry(name, bool(ok), None if res is None else float(res), wit))

    try:
        smin = float(np.linalg.svd(S, compute_uv=False)[-1])
    except np.linalg.LinAlgError:
        smin = 0.0
    add("S_nondegenerate", smin > 1e-9 * sc, smin)
    res = np.abs(M.T @ S @ M - S).max() / sc
    add("S_M_invariant", res < rtol, res)
    res = np.abs(N.T @ S + S @ N).max() / sc
    add("N_infinitesimal_isometry", res < rtol, res)
    P1 = mhs.parts.projector_where(lambda g: g.beta == 1)
    Pn = np.eye(n) - P1
    r1 = np.abs(Pn.T @ S @ Pn - (-1) ** p.m * (Pn.T @ S @ Pn).T).max() / sc
    r2 = np.abs(P1.T @ S @ P1 - (-1) ** (p.m + 1) * (P1.T @ S @ P1).T).max() / sc
    add("S_symmetry", max(r1, r2) < rtol, max(r1, r2))

    for k, v in mhs.check_structure().items():
        wit = None
        if k == "pure_graded" and not v:
            wit = f"(k,p) = {mhs.mhs_violations()}"
        add(k, v, None, wit)

    # isotropy S(F^p, F^{w+1-p}) = 0 per sector of weight w = m + theta
    worst = 0.0
    witness = None
    for i, g in enumerate(mhs.groups):
        w = mhs.center(g)
        for j, h in enumerate(mhs.groups):
            if theta(h) != theta(g):
                continue
            for q in mhs.hodge_range():
                A = mhs.sector_F[i][q]
                B = mhs.sector_F[j][w + 1 - q]
                if A.dim and B.dim:
                    r = np.abs(A.basis.T @ S @ B.basis).max() / sc
                    if r > worst:
                        worst, witness = r, f"p={q}, sector {g.value:.4g}"
    add("isotropy", worst < rtol, worst, witness if worst >= rtol else None)

    # positivity on primitive parts
    Nsign = -N if p.signed else N
    worst_min = math.inf
    pos_ok = True
    pos_wit = None
    herm_res = 0.0
    for i, g in enumerate(mhs.groups):
        j = mhs.conj_index(i)
        w = mhs.center(g)
        Wi, Wj = mhs.sector_W[i], mhs.sector_W[j]
        for l in range(0, max(0, Wi.hi - w) + 1):
            Qi = mhs.gr_space(i, w + l)
            Qj = mhs.gr_space(j, w + l)
            if Qi.dim == 0:
                continue
            Pi = Qi.preimage(np.linalg.matrix_power(N, l + 1), Wi[w - l - 3])
            Pj = Qj.preimage(np.linalg.matrix_power(N, l + 1), Wj[w - l - 3])
            for q in mhs.hodge_range():
                A = mhs.gr_F(i, q, w + l).intersect(Pi)
                B = mhs.gr_F(j, w + l - q, w + l).intersect(Pj).conj()
                V = A.intersect(B)
                if V.dim == 0:
                    continue
                Nl = np.linalg.matrix_power(Nsign, l)
                H = (1j ** (2 * q - w - l)) * (V.basis.T @ S @ Nl @ V.basis.conj())
                herm_res = max(herm_res, np.abs(H - H.conj().T).max() / sc)
                ev = np.linalg.eigvalsh((H + H.conj().T) / 2)
                worst_min = min(worst_min, float(ev.min()) / sc)
                if ev.min() <= 1e-9 * sc:
                    pos_ok = False
                    pos_wit = pos_wit or f"p={q}, l={l}, sector {g.value:.4g}, min eigenvalue {ev.min():.3g}"
                # (alpha) S_l(F^q P, F^{w+l+1-q} P) = 0
    add("positivity_hermitian", herm_res < rtol, herm_res)
    add("positivity", pos_ok, None if worst_min is math.inf else worst_min, pos_wit)
    return ValidationReport(entries)


# ---------------------------------------------------------------------------
# ladders and the isometric decomposition


@dataclass(frozen=True)
class Ladder:
    kind: str  # "pair" or "single"
    p: int
    q: int
    lam: complex
    beta: object
    alpha: object
    l: int
    mult: int
    m: int

    @property
    def length(self) -> int:
        return self.l + 1

    @property
    def distance(self):
        return 2 * self.alpha + self.l + 1 - self.m

    def pairs(self) -> list[tuple]:
        """The spectral pairs this ladder (and its partner) account for."""
        m, l, a = self.m, self.l, self.alpha
        first = [(a + j, m + l - 2 * j) for j in range(l + 1)]
        if self.kind == "single":
            return first
        second = [(m - l - 1 - a + j, m + l - 2 * j) for j in range(l + 1)]
        return first + second

    def to_json(self) -> dict:
        a = self.alpha
        return {
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "alpha": [a.numerator, a.denominator] if isinstance(a, Fraction) else float(a),
            "length": self.length,
            "distance": str(self.distance) if isinstance(self.distance, Fraction) else float(self.distance),
            "mult": self.mult,
        }


def ladders(mhs: SteenbrinkMHS) -> list[Ladder]:
    """Ordered pairs of spectral pair ladders and single ladders."""
    ds = mhs.deligne
    out = []
    for (p, q, i), sp in sorted(ds.I0.items()):
        g = mhs.groups[i]
        th = theta(g)
        l = p + q - mhs.m - th
        if l < 0:
            continue
        j = mhs.conj_index(i)
        single = (p == q and i == j)
        if not single:
            # list each unordered pair once: the member with Im lambda > 0, or p < q on the real axis
            if g.value.imag < 0 or (i == j and p > q):
                continue
        alpha = mhs.alpha(g, p)
        out.append(Ladder("single" if single else "pair", p, q, g.value, g.beta, alpha, l, sp.dim, mhs.m))
    return out


def spp_from_ladders(lads: list[Ladder]) -> SpectralPairs:
    d: dict = {}
    for lad in lads:
        for key in lad.pairs():
            d[key] = d.get(key, 0) + lad.mult
    return SpectralPairs(d)


def _sign_pow(k: int) -> int:
    return -1 if k % 2 else 1


def _ceil(a) -> int:
    return math.ceil(a) if isinstance(a, Fraction) else math.ceil(float(a) - 1e-12)


def ladder_tr_type(lad: Ladder, signed: bool):
    """The irreducible triple type (and multiplicity factor) attached to a ladder."""
    m, l = lad.m, lad.l
    th = 1 if lad.beta == 1 else 0
    ca = _ceil(lad.alpha)
    if lad.kind == "single":
        if (-1) ** (m + 1) * round(lad.lam.real) != (-1) ** l:
            raise InconsistentSpec("single ladder violates (-1)^(m+1) lambda = (-1)^l")
        e2 = ca * 2 - (m - th - l)
        eps = _sign_pow(e2 // 2)
        if signed and (l + 1) % 2 == 0:
            eps = -eps
        return [(Tr1(int(round(lad.lam.real)), l + 1, eps), 1)]
    mp = (m + th) % 2
    e2 = 2 * (ca - 1) - (m - th + mp)
    eps = _sign_pow(e2 // 2)
    if signed and (l + 1) % 2 == 0:
        eps = -eps
    return canonical_tr2(lad.lam, l + 1, mp, eps)


def canonical_tr2(lam: complex, n: int, m: int, eps: int) -> list[tuple]:
    """Canonical form of Tr(lambda,2,n,m,eps), as a list of (type, multiplicity)."""
    lam = complex(lam)
    if abs(lam.imag) < 1e-9:
        lam_i = 1 if lam.real > 0 else -1
        if (n + m + 1) % 2 == 0:
            e = (-1) ** ((n + m + 1) // 2) * eps
            return [(Tr1(lam_i, n, e), 2)]
        return [(Tr2S1(lam_i, n, m, 1), 1)]
    if lam.imag < 0:
        return [(Tr2S1(lam.conjugate(), n, m, (-1) ** (n + m + 1) * eps), 1)]
    return [(Tr2S1(lam, n, m, eps), 1)]


def pmhs_isometric_decomposition(p: SteenbrinkPMHS, tol: float | None = None) -> Decomposition:
    """Irreducible triples of (H_{≠1}, M, S) ⊕ (H_1, M, S) for a split PMHS."""
    ds = p.mhs.deligne
    if not ds.is_split(tol):
        raise NotSplit("Deligne splitting is not conjugation symmetric")
    out = Decomposition()
    for lad in ladders(p.mhs):
        for t, k in ladder_tr_type(lad, p.signed):
            out.add(t, k * lad.mult)
    return out


def classify_pmhs_triples(p: SteenbrinkPMHS) -> Decomposition:
    """Direct classification of (H_{≠1}, M, S) and (H_1, M, S) via the triple classifier."""
    mhs = p.mhs
    S = as_array(p.S, complex)
    out = Decomposition()
    for is_one in (False, True):
        sp = mhs.parts.space_where(lambda g: (g.beta == 1) == is_one)
        if sp.dim == 0:
            continue
        B = sp.real_basis()
        SB = (B.T @ S @ B).real
        MB = np.linalg.lstsq(B, mhs.M @ B, rcond=None)[0].real
        sub = jordan_parts(MB)
        out = out + _classify_parts(SB, sub, (p.m + int(is_one)) % 2)
    return out


# ---------------------------------------------------------------------------
# split fixtures


def _parse_eig(x):
    """Accept an eigenvalue (complex/int/float) or an exponent class (Fraction or "a/b" string)."""
    if isinstance(x, (Fraction, str)):
        beta = to_fraction(x)
        if not (0 < beta <= 1):
            raise InconsistentSpec("exponent class must lie in (0, 1]")
        return unit_from_beta(beta), beta
    lam = complex(x)
    if abs(abs(lam) - 1) > 1e-9:
        raise EigenvalueOffCircle("fixture eigenvalues must lie on the unit circle")
    beta = exponent_class(lam)
    return (unit_from_beta(beta) if isinstance(beta, Fraction) else lam), beta


def _random_real_change(n: int, rng: np.random.Generator) -> np.ndarray:
    q1, _ = np.linalg.qr(rng.normal(size=(n, n)))
    q2, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return q1 @ np.diag(rng.uniform(0.5, 2.0, n)) @ q2


def make_split_pmhs(entries, m: int, signed: bool = False, rng=None, base_change: bool = False,
                    tol: float | None = None) -> SteenbrinkPMHS:
    """Build a split (signed) Steenbrink PMHS from its primitive Hodge numbers.

    ``entries`` lists (p, q, lambda_or_beta, d) with d = dim (I_0^{pq})_lambda;
    the list must be closed under (p, q, lambda) -> (q, p, conj lambda).
    """
    parsed = {}
    for e in entries:
        if len(e) != 4:
            raise InconsistentSpec("entries are (p, q, lambda, dim)")
        p, q, x, d = e
        lam, beta = _parse_eig(x)
        if int(d) <= 0:
            raise InconsistentSpec("dimensions must be positive")
        key = (int(p), int(q), _beta_key(beta))
        parsed[key] = (lam, beta, parsed.get(key, (0, 0, 0))[2] + int(d))

    blocks = []  # (M block, S block, list of (basis column index range, hodge index per column))
    done = set()
    for key in sorted(parsed, key=lambda k: (k[0], k[1], float(k[2]))):
        if key in done:
            continue
        p, q, bk = key
        lam, beta, d = parsed[key]
        cbk = _beta_key(_conj_beta(beta))
        partner = (q, p, cbk)
        if partner not in parsed or parsed[partner][2] != d:
            raise InconsistentSpec(f"entry {(p, q, lam)} lacks its conjugate partner with equal dimension")
        done.add(key)
        done.add(partner)
        th = 1 if beta == 1 else 0
        l = p + q - m - th
        if l < 0:
            raise InconsistentSpec(f"p + q must be at least m + theta, got {(p, q)}")
        single = key == partner
        lad = Ladder("single" if single else "pair", p, q, lam, beta, m - p - 1 + beta, l, d, m)
        types = ladder_tr_type(lad, signed) if single else None
        n = l + 1
        for _ in range(d):
            if single:
                t = types[0][0]
                T = model_triple(t)
                hodge = [p - j for j in range(n)]
                blocks.append((T.M, T.S, np.eye(n, dtype=complex), hodge))
            else:
                # complex chain a_j in I^{p-j,q-j}, conjugate chain in I^{q-j,p-j}
                mp = (m + th) % 2
                e2 = 2 * (_ceil(lad.alpha) - 1) - (m - th + mp)
                eps = _sign_pow(e2 // 2)
                if signed and n % 2 == 0:
                    eps = -eps
                T = model_triple(Tr2S1(lam, n, mp, eps), strict=False)
                I = np.eye(n)
                Tm = np.block([[I, 1j * I], [I, -1j * I]])
                # columns of coords: complex basis vectors (a, abar) in the real basis
                coords = np.linalg.inv(Tm)
                hodge = [p - j for j in range(n)] + [q - j for j in range(n)]
                blocks.append((T.M, T.S, coords, hodge))

    from scipy.linalg import block_diag

    M = block_diag(*[b[0] for b in blocks])
    S = block_diag(*[b[1] for b in blocks])
    total = M.shape[0]
    cols = []
    hodge = []
    off = 0
    for b in blocks:
        k = b[0].shape[0]
        c = np.zeros((total, k), dtype=complex)
        c[off:off + k, :] = b[2]
        cols.append(c)
        hodge += b[3]
        off += k
    V = np.hstack(cols)
    hodge = np.array(hodge)
    lo, hi = int(hodge.min()), int(hodge.max())
    steps = {r: Subspace(total, V[:, hodge >= r]) for r in range(lo, hi + 1)}
    if base_change:
        rng = rng if rng is not None else np.random.default_rng()
        C = _random_real_change(total, rng)
        Ci = np.linalg.inv(C)
        M = Ci @ M @ C
        S = C.T @ S @ C
        steps = {r: sp.image(Ci) for r, sp in steps.items()}
    F = Filtration(steps, True, Subspace.full(total))
    mhs = SteenbrinkMHS(M, F, m, tol)
    return SteenbrinkPMHS(mhs, S, signed)


def _beta_key(beta):
    return beta if isinstance(beta, Fraction) else round(float(beta), 9)


def _conj_beta(beta):
    if isinstance(beta, Fraction):
        return Fraction(1) if beta == 1 else 1 - beta
    b = 1.0 - float(beta)
    return 1.0 if b <= 0 else b


def random_spec(rng: np.random.Generator, m: int, max_dim: int = 12, betas=None):
    """Random closed entry list for make_split_pmhs with total dimension <= max_dim."""
    betas = betas or [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6), Fraction(2, 3)]
    entries = []
    dim = 0
    for _ in range(20):
        beta = betas[rng.integers(len(betas))]
        th = 1 if beta == 1 else 0
        l = int(rng.integers(0, 3))
        cb = _conj_beta(beta)
        p = int(rng.integers(-1, 3))
        q = m + th + l - p
        single = (p == q and cb == beta)
        if single:
            lam = 1 if beta == 1 else -1
            if (-1) ** (m + 1) * lam != (-1) ** l:
                continue
            size = l + 1
        else:
            size = 2 * (l + 1)
        if dim + size > max_dim:
            continue
        dim += size
        if single:
            entries.append((p, q, beta, 1))
        else:
            entries.append((p, q, beta, 1))
            entries.append((q, p, cb, 1))
    if not entries:
        return random_spec(rng, m, max_dim, betas)
    return _merge(entries)


def _merge(entries):
    out: dict = {}
    for p, q, b, d in entries:
        out[(p, q, b)] = out.get((p, q, b), 0) + d
    return [(p, q, b, d) for (p, q, b), d in out.items()]


"""Seifert form pairs, isometric triples and the forms derived from them.

Gram convention throughout: L(a, b) = a^T G b.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    EigenvalueObstruction,
    InputError,
    NotSymmetric,
    SingularGram,
    VariantDomain,
)
from .linalg_core import (
    MatrixQ,
    Subspace,
    _tol,
    as_array,
    is_real,
    jordan_parts,
    try_exact,
)


def _exact_or_array(g):
    exact = try_exact(g)
    if exact is not None:
        return exact, exact.to_array(float)
    arr = as_array(g, complex)
    if is_real(arr):
        arr = arr.real
    return None, arr


@dataclass(frozen=True)
class SeifertFormPair:
    """A nondegenerate real bilinear form L."""

    gram: np.ndarray
    exact: MatrixQ | None = None

    @classmethod
    def from_gram(cls, g, tol: float | None = None) -> "SeifertFormPair":
        exact, arr = _exact_or_array(g)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InputError("Gram matrix must be square and nonempty")
        if exact is not None:
            if exact.det() == 0:
                raise SingularGram("Seifert form is degenerate")
        elif np.linalg.svd(arr, compute_uv=False)[-1] < _tol(tol) * max(1.0, np.abs(arr).max()):
            raise SingularGram("Seifert form is degenerate")
        return cls(arr, exact)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, a, b):
        return np.asarray(a) @ self.gram @ np.asarray(b)


@dataclass(frozen=True)
class IsometricTriple:
    """(H, M, S) with S nondegenerate and (-1)^sym-symmetric, M an isometry of S."""

    S: np.ndarray
    M: np.ndarray
    sym: int

    @classmethod
    def build(cls, S, M, sym: int, tol: float | None = None) -> "IsometricTriple":
        tol = _tol(tol)
        S = as_array(S, complex)
        M = as_array(M, complex)
        S = S.real if is_real(S) else S
        M = M.real if is_real(M) else M
        if sym not in (0, 1):
            raise InputError("sym must be 0 or 1")
        scale = max(1.0, np.abs(S).max())
        if np.abs(S.T - (-1) ** sym * S).max() > tol * scale * 10:
            raise NotSymmetric(f"S is not {(-1) ** sym:+d}-symmetric")
        if np.linalg.svd(S, compute_uv=False)[-1] < tol * scale:
            raise SingularGram("S is degenerate")
        if np.abs(M.T @ S @ M - S).max() > 1e-7 * scale * max(1.0, np.abs(M).max()) ** 2:
            raise InputError("M is not an isometry of S")
        return cls(S, M, sym)

    @property
    def dim(self) -> int:
        return self.S.shape[0]


def monodromy_of(L, tol: float | None = None):
    """M = (G^T)^{-1} G, the unique M with L(Ma, b) = L(b, a).

    Returns a MatrixQ for exact input, else an ndarray.
    """
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L, tol)
    if L.exact is not None:
        return L.exact.T.inv() @ L.exact
    return np.linalg.solve(L.gram.T, L.gram)


def monodromy_array(L, tol: float | None = None) -> np.ndarray:
    m = monodromy_of(L, tol)
    return m.to_array(float) if isinstance(m, MatrixQ) else m


@dataclass(frozen=True)
class RestrictedForm:
    """A bilinear form given on the real span of ``basis`` (columns)."""

    gram: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _operator_on(basis: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Matrix R of an X-invariant subspace: X B = B R."""
    return np.linalg.lstsq(basis, X @ basis, rcond=None)[0]


def _real_domain(parts, pred) -> np.ndarray:
    sp = parts.space_where(pred)
    if sp.dim == 0:
        return np.zeros((parts.dim, 0))
    return sp.real_basis()


def series_M_minus_eps_over_N(N: np.ndarray, eps: int) -> np.ndarray:
    """(M - eps)/N := eps * sum_{k=1}^{dim} N^{k-1}/k!  on H_eps."""
    n = N.shape[0]
    out = np.zeros_like(N, dtype=complex)
    power = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        out = out + power / factorial(k)
        power = power @ N
    return eps * out


def derived_forms(L, tol: float | None = None, cluster_tol: float | None = None) -> dict[str, RestrictedForm]:
    """The six forms I_s, I_a, I_s2, I_a2, I_s3, I_a3 of a Seifert form pair."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L, tol)
    G = L.gram.astype(float)
    n = L.dim
    M = monodromy_array(L)
    parts = jordan_parts(M, tol, cluster_tol)
    I = np.eye(n)
    out = {
        "I_s": RestrictedForm(G + G.T, I),
        "I_a": RestrictedForm(G.T - G, I),
    }

    def near(g, v):
        return abs(g.value - v) < 1e-9

    for name, pred, shift in (
        ("I_s2", lambda g: not near(g, -1), 1.0),
        ("I_a2", lambda g: not near(g, 1), -1.0),
    ):
        B = _real_domain(parts, pred)
        if B.shape[1] == 0:
            out[name] = RestrictedForm(np.zeros((0, 0)), B)
            continue
        R = _operator_on(B, M + shift * I)
        out[name] = RestrictedForm(B.T @ G @ B @ np.linalg.inv(R), B)

    Nr = parts.N.real
    for name, eps in (("I_s3", 1), ("I_a3", -1)):
        B = _real_domain(parts, lambda g, e=eps: near(g, e))
        if B.shape[1] == 0:
            out[name] = RestrictedForm(np.zeros((0, 0)), B)
            continue
        R = _operator_on(B, series_M_minus_eps_over_N(Nr, eps).real)
        out[name] = RestrictedForm(B.T @ G @ B @ np.linalg.inv(R), B)
    return out


def seifert_from_triple(T: IsometricTriple, variant: int, tol: float | None = None, cluster_tol: float | None = None) -> SeifertFormPair:
    """L^(1), L^(2) or L^(3) built from an isometric triple."""
    if variant not in (1, 2, 3):
        raise InputError("variant must be 1, 2 or 3")
    delta = (-1) ** T.sym
    parts = jordan_parts(T.M, tol, cluster_tol)
    if any(abs(g.value + delta) < 1e-9 for g in parts.groups):
        raise EigenvalueObstruction(f"eigenvalue {-delta} present; M + {delta} id is not invertible")
    S, M = T.S, T.M
    n = T.dim
    if variant == 1:
        gram = np.linalg.solve((M + delta * np.eye(n)).T, S)
    elif variant == 2:
        gram = S @ (M + delta * np.eye(n))
    else:
        if not all(abs(g.value - delta) < 1e-9 for g in parts.groups):
            raise VariantDomain("variant 3 needs H = H_delta")
        gram = S @ series_M_minus_eps_over_N(parts.N, delta)
    gram = gram.real if is_real(gram) else gram
    exact = None
    ex_S, ex_M = try_exact(_maybe_int(S)), try_exact(_maybe_int(M))
    if variant in (1, 2) and ex_S is not None and ex_M is not None:
        shift = ex_M + MatrixQ.identity(n).scale(delta)
        exact = shift.T.inv() @ ex_S if variant == 1 else ex_S @ shift
        gram = exact.to_array(float)
    return SeifertFormPair(gram, exact)


def _maybe_int(a: np.ndarray):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if np.abs(a.imag).max(initial=0) > 0:
            return a
        a = a.real
    if np.all(a == np.round(a)):
        return a.astype(np.int64)
    return a


@dataclass(frozen=True)
class DualPair:
    L_dual: SeifertFormPair
    M_dual: np.ndarray
    iso: np.ndarray


def dual_pair(L, tol: float | None = None) -> DualPair:
    """L^vee with Gram G^{-T}, M^vee = M^{-T}, and the isomorphism (L^lin)^{-1} = G^T."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L, tol)
    if L.exact is not None:
        gd = L.exact.T.inv()
        dual = SeifertFormPair(gd.to_array(float), gd)
    else:
        dual = SeifertFormPair(np.linalg.inv(L.gram.T))
    M = monodromy_array(L)
    return DualPair(dual, np.linalg.inv(M).T, L.gram.T.copy())


def duality_residuals(L, delta: int, tol: float | None = None) -> dict[str, float]:
    """Residuals of the dual-space identities for S = I_s (delta=1) or I_a (delta=-1).

    Requires M + delta id invertible.
    """
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L, tol)
    G = L.gram
    n = L.dim
    M = monodromy_array(L)
    d = dual_pair(L)
    Md = d.M_dual
    L_lin = np.linalg.inv(G.T)
    S = G + G.T if delta == 1 else G.T - G
    S_lin = np.linalg.inv(S.T)
    inv_d = np.linalg.inv(Md + delta * np.eye(n))
    inv_m = np.linalg.inv(M + delta * np.eye(n))
    S_dual = np.linalg.inv(S.T)
    res = {
        "lin_intertwines": np.abs(L_lin @ Md - M @ L_lin).max(),
        "S_lin_left": np.abs(S_lin - L_lin @ inv_d).max(),
        "S_lin_right": np.abs(S_lin - inv_m @ L_lin).max(),
        "S_dual": np.abs(S_dual - d.L_dual.gram @ inv_d).max(),
        "iso_form": np.abs(d.iso.T @ d.L_dual.gram @ d.iso - G).max(),
        "iso_monodromy": np.abs(d.iso @ M - Md @ d.iso).max(),
    }
    return {k: float(v) for k, v in res.items()}


def milnor_monodromy(L, m: int):
    """The M with L(Ma, b) = (-1)^{m+1} L(b, a)."""
    mono = monodromy_of(L)
    sign = (-1) ** (m + 1)
    return mono.scale(sign) if isinstance(mono, MatrixQ) else sign * mono


def intersection_form(L, m: int):
    """I(a, b) = -L(a, b) + (-1)^{m+1} L(b, a), a (-1)^m-symmetric form."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L)
    sign = (-1) ** (m + 1)
    if L.exact is not None:
        return (-L.exact) + L.exact.T.scale(sign)
    return -L.gram + sign * L.gram.T


def intersection_form_via_monodromy(L, m: int):
    """The same form written as L((M - id) a, b) with the Milnor monodromy."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L)
    Mm = milnor_monodromy(L, m)
    if isinstance(Mm, MatrixQ):
        return (Mm - MatrixQ.identity(L.dim)).T @ L.exact
    return (Mm - np.eye(L.dim)).T @ L.gram


def radical(form: np.ndarray) -> Subspace:
    return Subspace.full(form.shape[0]).kernel_of(form)

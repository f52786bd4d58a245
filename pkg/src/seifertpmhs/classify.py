"""Normal forms of irreducible isometric triples and Seifert form pairs,
and classification of arbitrary ones into multisets of these types."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np
from scipy.linalg import expm

from .errors import InconsistentParity, InputError, NonCanonicalType
from .linalg_core import (
    AutomorphismParts,
    EigenGroup,
    Subspace,
    exponent_class,
    hermitian_signature,
    jordan_block_counts,
    jordan_parts,
    signature,
)
from .seifert import IsometricTriple, SeifertFormPair, derived_forms, monodromy_array, seifert_from_triple

UNIT_TOL = 1e-6


# ---------------------------------------------------------------------------
# number formatting


def _fmt_real(x: float) -> str:
    if abs(x - round(x)) < 1e-9:
        return str(int(round(x)))
    return f"{x:.6g}"


def format_number(z: complex) -> str:
    """Compact text for eigenvalues and units; roots of unity get an exact angle."""
    z = complex(z)
    if abs(abs(z) - 1) < UNIT_TOL:
        beta = exponent_class(z)
        if isinstance(beta, Fraction):
            theta = -beta % 1
            if theta > Fraction(1, 2):
                theta -= 1
            special = {Fraction(0): "1", Fraction(1, 2): "-1", Fraction(1, 4): "i", Fraction(-1, 4): "-i"}
            if theta in special:
                return special[theta]
            return f"exp(2pi*i*{theta})"
    if abs(z.imag) < 1e-9 * max(1.0, abs(z)):
        return _fmt_real(z.real)
    return f"{_fmt_real(z.real)}{'+' if z.imag >= 0 else '-'}{_fmt_real(abs(z.imag))}i"


def _on_circle(z: complex) -> bool:
    return abs(abs(z) - 1) < UNIT_TOL


def _is_pm1(z: complex) -> bool:
    return abs(z - 1) < UNIT_TOL or abs(z + 1) < UNIT_TOL


def _sign(x) -> int:
    if x not in (1, -1):
        raise NonCanonicalType(f"sign must be +1 or -1, got {x}")
    return int(x)


def E_per(n: int) -> np.ndarray:
    """Antidiagonal matrix with entries (-1)^{j-1} in row j."""
    e = np.zeros((n, n))
    for j in range(n):
        e[j, n - 1 - j] = (-1) ** j
    return e


def J(n: int) -> np.ndarray:
    """Lower shift: J a_k = a_{k+1}."""
    return np.eye(n, k=-1)


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Tr1:
    lam: int
    n: int
    eps: int
    family = "Tr"

    @property
    def dim(self):
        return self.n

    @property
    def tag(self):
        return f"Tr({format_number(self.lam)},1,{self.n},{self.eps})"


@dataclass(frozen=True)
class Tr2S1:
    lam: complex
    n: int
    m: int
    eps: int
    family = "Tr"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def tag(self):
        return f"Tr({format_number(self.lam)},2,{self.n},{self.m},{self.eps})"


@dataclass(frozen=True)
class Tr2R:
    lam: float
    n: int
    m: int
    family = "Tr"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def tag(self):
        return f"Tr({format_number(self.lam)},2,{self.n},{self.m})"


@dataclass(frozen=True)
class Tr4:
    lam: complex
    n: int
    m: int
    family = "Tr"

    @property
    def dim(self):
        return 4 * self.n

    @property
    def tag(self):
        return f"Tr({format_number(self.lam)},4,{self.n},{self.m})"


@dataclass(frozen=True)
class Seif1:
    lam: int
    n: int
    eps: int
    family = "Seif"

    @property
    def dim(self):
        return self.n

    @property
    def tag(self):
        return f"Seif({format_number(self.lam)},1,{self.n},{self.eps})"


@dataclass(frozen=True)
class Seif2Unipotent:
    lam: int
    n: int
    family = "Seif"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def tag(self):
        return f"Seif({format_number(self.lam)},2,{self.n})"


@dataclass(frozen=True)
class Seif2Circle:
    lam: complex
    n: int
    zeta: complex
    family = "Seif"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def tag(self):
        return f"Seif({format_number(self.lam)},2,{self.n},{format_number(self.zeta)})"


@dataclass(frozen=True)
class Seif2Real:
    lam: float
    n: int
    family = "Seif"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def tag(self):
        return f"Seif({format_number(self.lam)},2,{self.n})"


@dataclass(frozen=True)
class Seif4:
    lam: complex
    n: int
    family = "Seif"

    @property
    def dim(self):
        return 4 * self.n

    @property
    def tag(self):
        return f"Seif({format_number(self.lam)},4,{self.n})"


IsoType = Union[Tr1, Tr2S1, Tr2R, Tr4]
SeifType = Union[Seif1, Seif2Unipotent, Seif2Circle, Seif2Real, Seif4]


class Decomposition:
    """Multiset of irreducible types, compared through their tags."""

    def __init__(self, items: Iterable[tuple[object, int]] = ()):
        self._items: dict[str, list] = {}
        for t, k in items:
            self.add(t, k)

    def add(self, t, k: int = 1) -> None:
        if k <= 0:
            return
        slot = self._items.setdefault(t.tag, [t, 0])
        slot[1] += k

    def __add__(self, other: "Decomposition") -> "Decomposition":
        out = Decomposition(self.items())
        for t, k in other.items():
            out.add(t, k)
        return out

    def items(self) -> list[tuple[object, int]]:
        return [(v[0], v[1]) for _, v in sorted(self._items.items())]

    def counts(self) -> dict[str, int]:
        return {tag: v[1] for tag, v in sorted(self._items.items())}

    @property
    def dim(self) -> int:
        return sum(t.dim * k for t, k in self.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, Decomposition):
            return self.counts() == other.counts()
        return NotImplemented

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{tag}: {k}" for tag, k in self.counts().items()) + "}"

    def lines(self) -> list[str]:
        return [f"{tag} x{k}" for tag, k in self.counts().items()]

    def to_json(self) -> list[dict]:
        return [{"type": tag, "mult": k} for tag, k in self.counts().items()]


# ---------------------------------------------------------------------------
# canonical checks


def check_canonical(t) -> None:
    if t.n < 1:
        raise NonCanonicalType("n must be >= 1")
    if isinstance(t, Tr1):
        _sign(t.eps)
        if t.lam not in (1, -1):
            raise NonCanonicalType("Tr(lambda,1,...) needs lambda = +-1")
    elif isinstance(t, Tr2S1):
        _sign(t.eps)
        if t.m not in (0, 1) or not _on_circle(t.lam):
            raise NonCanonicalType("Tr(lambda,2,n,m,eps) needs |lambda| = 1 and m in {0,1}")
        if _is_pm1(t.lam):
            if (t.m - t.n) % 2 or t.eps != 1:
                raise NonCanonicalType("for lambda = +-1 the canonical form needs m = n mod 2 and eps = 1")
        elif complex(t.lam).imag <= 0:
            raise NonCanonicalType("canonical form needs Im lambda > 0")
    elif isinstance(t, Tr2R):
        if t.m not in (0, 1) or abs(complex(t.lam).imag) > 0 or abs(t.lam) <= 1 + UNIT_TOL:
            raise NonCanonicalType("Tr(lambda,2,n,m) needs real |lambda| > 1")
    elif isinstance(t, Tr4):
        lam = complex(t.lam)
        if t.m not in (0, 1) or abs(lam) <= 1 + UNIT_TOL or lam.imag <= 0:
            raise NonCanonicalType("Tr(lambda,4,n,m) needs |lambda| > 1 and Im lambda > 0")
    elif isinstance(t, Seif1):
        _sign(t.eps)
        if not ((t.lam == 1 and t.n % 2 == 1) or (t.lam == -1 and t.n % 2 == 0)):
            raise NonCanonicalType("Seif(lambda,1,n,eps) needs (1, n odd) or (-1, n even)")
    elif isinstance(t, Seif2Unipotent):
        if not ((t.lam == 1 and t.n % 2 == 0) or (t.lam == -1 and t.n % 2 == 1)):
            raise NonCanonicalType("Seif(lambda,2,n) with lambda = +-1 needs (1, n even) or (-1, n odd)")
    elif isinstance(t, Seif2Circle):
        lam, zeta = complex(t.lam), complex(t.zeta)
        if not _on_circle(lam) or _is_pm1(lam) or lam.imag <= 0 or not _on_circle(zeta):
            raise NonCanonicalType("Seif(lambda,2,n,zeta) needs lambda on the circle with Im > 0")
        if abs(zeta ** 2 - lam.conjugate() * (-1) ** (t.n + 1)) > 1e-6:
            raise NonCanonicalType("zeta^2 must equal conj(lambda) (-1)^(n+1)")
    elif isinstance(t, Seif2Real):
        if abs(complex(t.lam).imag) > 0 or abs(t.lam) <= 1 + UNIT_TOL:
            raise NonCanonicalType("Seif(lambda,2,n) needs real |lambda| > 1")
    elif isinstance(t, Seif4):
        lam = complex(t.lam)
        if abs(lam) <= 1 + UNIT_TOL or lam.imag <= 0:
            raise NonCanonicalType("Seif(lambda,4,n) needs |lambda| > 1 and Im lambda > 0")
    else:
        raise NonCanonicalType(f"unknown type {t!r}")


# ---------------------------------------------------------------------------
# model triples


def _pair_block(n: int, m: int) -> np.ndarray:
    e = E_per(n)
    z = np.zeros((n, n))
    return np.block([[z, e], [(-1) ** (n + m + 1) * e, z]])


def _realify(Mc: np.ndarray, Sc: np.ndarray, T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    M = np.linalg.solve(T, Mc @ T)
    S = T.T @ Sc @ T
    if np.abs(M.imag).max() > 1e-9 or np.abs(S.imag).max() > 1e-9:
        raise AssertionError("model is not real")
    return M.real, S.real


def model_triple(t: IsoType, strict: bool = True) -> IsometricTriple:
    """Explicit real matrices of the normal form ``t``.

    With ``strict=False`` non-canonical parameters are accepted (for
    example Tr(lambda,2,n,m,eps) with lambda = +-1 and any m, eps).
    """
    if strict:
        check_canonical(t)
    n = t.n
    up = expm(J(n))
    if isinstance(t, Tr1):
        return IsometricTriple(t.eps * E_per(n), t.lam * up, (n - 1) % 2)
    if isinstance(t, Tr2S1):
        lam = complex(t.lam)
        Mc = np.block([[lam * up, np.zeros((n, n))], [np.zeros((n, n)), lam.conjugate() * up]])
        Sc = (1j ** (n + t.m + 1)) * t.eps * _pair_block(n, t.m)
        I = np.eye(n)
        T = np.block([[I, 1j * I], [I, -1j * I]])
        M, S = _realify(Mc, Sc, T)
        return IsometricTriple(S, M, t.m)
    if isinstance(t, Tr2R):
        lam = float(np.real(t.lam))
        z = np.zeros((n, n))
        M = np.block([[lam * up, z], [z, up / lam]])
        return IsometricTriple(_pair_block(n, t.m), M, t.m)
    if isinstance(t, Tr4):
        lam = complex(t.lam)
        vals = [lam, 1 / lam, lam.conjugate(), 1 / lam.conjugate()]
        Mc = np.zeros((4 * n, 4 * n), dtype=complex)
        for k, v in enumerate(vals):
            Mc[k * n:(k + 1) * n, k * n:(k + 1) * n] = v * up
        K = _pair_block(n, t.m)
        Sc = np.zeros((4 * n, 4 * n), dtype=complex)
        Sc[: 2 * n, : 2 * n] = K
        Sc[2 * n:, 2 * n:] = K
        I = np.eye(2 * n)
        T = np.block([[I, 1j * I], [I, -1j * I]])
        M, S = _realify(Mc, Sc, T)
        return IsometricTriple(S, M, t.m)
    raise NonCanonicalType(f"unknown type {t!r}")


def direct_sum(*triples: IsometricTriple) -> IsometricTriple:
    from scipy.linalg import block_diag

    syms = {t.sym for t in triples}
    if len(syms) != 1:
        raise InputError("summands must have the same symmetry")
    return IsometricTriple(block_diag(*[t.S for t in triples]), block_diag(*[t.M for t in triples]), syms.pop())


# ---------------------------------------------------------------------------
# classification of isometric triples


def _length_n_primitives(N: np.ndarray, H: Subspace, n: int) -> Subspace:
    """A complement of ker N^{n-1} + N(ker N^{n+1}) inside ker N^n, within H.

    Its dimension is the number of Jordan blocks of length n on H.
    """
    scale = max(1.0, float(np.linalg.norm(N, 2)))
    ker_n = H.kernel_of(np.linalg.matrix_power(N, n), scale=scale ** n)
    ker_n1 = H.kernel_of(np.linalg.matrix_power(N, n - 1), scale=scale ** (n - 1)) if n > 1 else Subspace.zero(H.ambient)
    ker_np1 = H.kernel_of(np.linalg.matrix_power(N, n + 1), scale=scale ** (n + 1))
    D = ker_n1 + ker_np1.image(N)
    return ker_n.complement_in(D)


def _canonical_real(v: complex) -> float:
    return float(v.real)


def classify_triple(T: IsometricTriple, tol: float | None = None, cluster_tol: float | None = None) -> Decomposition:
    """Decompose an isometric triple into irreducible Tr types."""
    if not isinstance(T, IsometricTriple):
        raise InputError("isometric triple expected")
    parts = jordan_parts(T.M, tol, cluster_tol)
    return _classify_parts(T.S, parts, T.sym)


def _classify_parts(S: np.ndarray, parts: AutomorphismParts, m: int) -> Decomposition:
    N = parts.N
    out = Decomposition()
    for g in parts.groups:
        lam = g.value
        counts = jordan_block_counts(N, g.space)
        if g.on_circle and _is_pm1(lam):
            lam_i = 1 if lam.real > 0 else -1
            for n, k in counts.items():
                Q = _length_n_primitives(N, g.space, n)
                if Q.dim != k:
                    raise InconsistentParity("primitive dimension does not match Jordan block count")
                B = Q.real_basis()
                A = B.T @ S @ np.linalg.matrix_power(N.real, n - 1) @ B
                if (n + m + 1) % 2 == 0:
                    p, q, r = signature(A)
                    if q:
                        raise InconsistentParity("restricted form is degenerate")
                    out.add(Tr1(lam_i, n, 1), p)
                    out.add(Tr1(lam_i, n, -1), r)
                else:
                    if k % 2:
                        raise InconsistentParity(f"odd number of length-{n} blocks at eigenvalue {lam_i}")
                    out.add(Tr2S1(lam_i, n, m, 1), k // 2)
        elif g.on_circle:
            if lam.imag < 0:
                continue
            for n, k in counts.items():
                Q = _length_n_primitives(N, g.space, n)
                if Q.dim != k:
                    raise InconsistentParity("primitive dimension does not match Jordan block count")
                B = Q.basis
                A = ((-1j) ** (n + m + 1)) * (B.T @ S @ np.linalg.matrix_power(N, n - 1) @ B.conj())
                p, q, r = hermitian_signature(A)
                if q:
                    raise InconsistentParity("restricted hermitian form is degenerate")
                out.add(Tr2S1(lam, n, m, 1), p)
                out.add(Tr2S1(lam, n, m, -1), r)
        else:
            if abs(lam) < 1:
                continue
            if abs(lam.imag) == 0.0:
                for n, k in counts.items():
                    out.add(Tr2R(_canonical_real(lam), n, m), k)
            elif lam.imag > 0:
                for n, k in counts.items():
                    out.add(Tr4(lam, n, m), k)
    if out.dim != parts.dim:
        raise InconsistentParity(f"classified dimension {out.dim} differs from {parts.dim}")
    return out


# ---------------------------------------------------------------------------
# Seifert form pairs


def _zeta0(lam: complex, n: int) -> complex:
    lam = complex(lam)
    return (lam.conjugate() + 1) / abs(lam + 1) * (1j ** (n + 1))


def seif_from_tr(t: IsoType) -> SeifType:
    """Seifert type of the pair obtained from ``t`` by the first construction."""
    if isinstance(t, Tr1):
        return Seif1(t.lam, t.n, t.lam * t.eps)
    if isinstance(t, Tr2S1):
        if _is_pm1(t.lam):
            return Seif2Unipotent(1 if complex(t.lam).real > 0 else -1, t.n)
        return Seif2Circle(t.lam, t.n, _zeta0(t.lam, t.n) * t.eps)
    if isinstance(t, Tr2R):
        return Seif2Real(t.lam, t.n)
    if isinstance(t, Tr4):
        return Seif4(t.lam, t.n)
    raise NonCanonicalType(f"unknown type {t!r}")


def tr_for_seif(t: SeifType) -> tuple[IsoType, int]:
    """(isometric type, delta) with L^(1) of the model triple of that type giving ``t``."""
    check_canonical(t)
    if isinstance(t, Seif1):
        return Tr1(t.lam, t.n, t.lam * t.eps), t.lam
    if isinstance(t, Seif2Unipotent):
        m = t.n % 2
        return Tr2S1(t.lam, t.n, m, 1), (-1) ** m
    if isinstance(t, Seif2Circle):
        ratio = complex(t.zeta) / _zeta0(t.lam, t.n)
        eps = 1 if ratio.real > 0 else -1
        return Tr2S1(t.lam, t.n, 0, eps), 1
    if isinstance(t, Seif2Real):
        return Tr2R(t.lam, t.n, 0), 1
    if isinstance(t, Seif4):
        return Tr4(t.lam, t.n, 0), 1
    raise NonCanonicalType(f"unknown type {t!r}")


def model_seifert(t: SeifType) -> SeifertFormPair:
    """A Seifert form pair of type ``t``."""
    tr, delta = tr_for_seif(t)
    T = model_triple(tr)
    if T.sym != (0 if delta == 1 else 1):
        raise AssertionError("symmetry mismatch in model table")
    return seifert_from_triple(T, 1)


def classify_seifert(L, tol: float | None = None, cluster_tol: float | None = None) -> Decomposition:
    """Decompose a Seifert form pair into irreducible Seif types."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L, tol)
    G = L.gram.astype(float)
    M = monodromy_array(L)
    parts = jordan_parts(M, tol, cluster_tol)
    out = Decomposition()
    for delta, form in ((1, G + G.T), (-1, G.T - G)):
        # H_{-1} uses I_a, everything else I_s
        pred = (lambda g: abs(g.value + 1) < UNIT_TOL) if delta == -1 else (lambda g: abs(g.value + 1) >= UNIT_TOL)
        sp = parts.space_where(pred)
        if sp.dim == 0:
            continue
        B = sp.real_basis()
        S_B = B.T @ form @ B
        M_B = np.linalg.lstsq(B, M @ B, rcond=None)[0]
        sub = jordan_parts(M_B, tol, cluster_tol)
        dec = _classify_parts(S_B, sub, 0 if delta == 1 else 1)
        for t, k in dec.items():
            out.add(seif_from_tr(t), k)
    return out


def seif1_witness(L, a=None) -> float:
    """L(a, N^{n-1} a) for a single-block pair with eigenvalue +-1; its sign is eps."""
    if not isinstance(L, SeifertFormPair):
        L = SeifertFormPair.from_gram(L)
    parts = jordan_parts(monodromy_array(L))
    n = L.dim
    N = parts.N.real
    if a is None:
        # any vector outside Im N; take the coordinate vector with largest N^{n-1} image
        Nk = np.linalg.matrix_power(N, n - 1)
        a = np.eye(n)[:, int(np.argmax(np.linalg.norm(Nk, axis=0)))]
    return float(np.asarray(a) @ L.gram @ np.linalg.matrix_power(N, n - 1) @ np.asarray(a))


def signature_of_seif_type(t: SeifType) -> tuple[tuple[int, int, int], IsoType | None]:
    """Signature of I_s for an irreducible Seifert type and, when nondegenerate, its triple."""
    check_canonical(t)
    n = t.n
    if isinstance(t, Seif1):
        if t.lam == 1:
            if (n - t.eps) % 4 == 0:
                return ((n + 1) // 2, 0, (n - 1) // 2), Tr1(1, n, t.eps)
            return ((n - 1) // 2, 0, (n + 1) // 2), Tr1(1, n, t.eps)
        if (n - 1 - t.eps) % 4 == 0:
            return (n // 2, 1, (n - 2) // 2), None
        return ((n - 2) // 2, 1, n // 2), None
    if isinstance(t, Seif2Unipotent):
        if t.lam == 1:
            return (n, 0, n), Tr2S1(1, n, 0, 1)
        return (n - 1, 2, n - 1), None
    if isinstance(t, Seif2Circle):
        ratio = complex(t.zeta) / _zeta0(t.lam, n)
        eps = 1 if ratio.real > 0 else -1
        if n % 2 == 0:
            return (n, 0, n), Tr2S1(t.lam, n, 0, eps)
        if eps == 1:
            return (n - 1, 0, n + 1), Tr2S1(t.lam, n, 0, 1)
        return (n + 1, 0, n - 1), Tr2S1(t.lam, n, 0, -1)
    if isinstance(t, Seif2Real):
        return (n, 0, n), Tr2R(t.lam, n, 0)
    if isinstance(t, Seif4):
        return (2 * n, 0, 2 * n), Tr4(t.lam, n, 0)
    raise NonCanonicalType(f"unknown type {t!r}")


def all_seif_types(n_max: int, circle=(cmath.exp(2j * math.pi / 3), 1j), real=(2.0, -3.0), quad=(2 + 1j,)):
    """Every canonical Seifert type with n <= n_max over a grid of eigenvalues."""
    out = []
    for n in range(1, n_max + 1):
        for lam in (1, -1):
            if (lam == 1 and n % 2) or (lam == -1 and n % 2 == 0):
                out += [Seif1(lam, n, 1), Seif1(lam, n, -1)]
            else:
                out.append(Seif2Unipotent(lam, n))
        for lam in circle:
            z0 = _zeta0(lam, n)
            out += [Seif2Circle(lam, n, z0), Seif2Circle(lam, n, -z0)]
        out += [Seif2Real(lam, n) for lam in real]
        out += [Seif4(lam, n) for lam in quad]
    return out


def all_tr_types(n_max: int, circle=(cmath.exp(2j * math.pi / 3), 1j), real=(2.0, -3.0), quad=(2 + 1j,)):
    """Every canonical isometric type with n <= n_max over a grid of eigenvalues."""
    out = []
    for n in range(1, n_max + 1):
        for lam in (1, -1):
            out += [Tr1(lam, n, 1), Tr1(lam, n, -1)]
            out.append(Tr2S1(lam, n, n % 2, 1))
        for lam in circle:
            for m in (0, 1):
                out += [Tr2S1(lam, n, m, 1), Tr2S1(lam, n, m, -1)]
        for m in (0, 1):
            out += [Tr2R(lam, n, m) for lam in real]
            out += [Tr4(lam, n, m) for lam in quad]
    return out

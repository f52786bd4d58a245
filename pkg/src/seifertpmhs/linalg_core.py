"""Linear-algebra substrate.

Exact rational matrices for input Gram data, complex subspaces with
orthonormal bases, the Jordan decomposition M = Ms*Mu with N = log Mu,
and inertia of symmetric and hermitian forms.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    ClusterAmbiguity,
    InputError,
    NotHermitian,
    NotNilpotent,
    NotSymmetric,
    SingularMatrix,
)

DEFAULT_CLUSTER_TOL = 1e-6
# Relative threshold for rank and zero-eigenvalue decisions.
RANK_RTOL = 1e-7
MAX_ROOT_ORDER = 200


def default_tol() -> float:
    raw = os.environ.get("SEIFERT_TOL")
    if raw is None or raw.strip() == "":
        return 1e-9
    try:
        val = float(raw)
    except ValueError as exc:
        raise InputError(f"SEIFERT_TOL is not a number: {raw!r}") from exc
    if not (val > 0 and math.isfinite(val)):
        raise InputError(f"SEIFERT_TOL must be a positive finite number, got {raw!r}")
    return val


def _tol(tol: float | None) -> float:
    return default_tol() if tol is None else tol


# ---------------------------------------------------------------------------
# exact rationals


def to_fraction(x) -> Fraction:
    """Parse an int, Fraction, "p/q" string or float into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError("booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(float(x)):
            raise InputError("non-finite entry")
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise InputError(f"not a rational number: {x!r}")


@dataclass(frozen=True)
class MatrixQ:
    """Immutable matrix of Fractions."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise InputError("empty matrix")
        width = len(self.entries[0])
        if any(len(r) != width for r in self.entries):
            raise InputError("ragged matrix")

    @classmethod
    def from_any(cls, rows) -> "MatrixQ":
        if isinstance(rows, MatrixQ):
            return rows
        if isinstance(rows, np.ndarray):
            if np.iscomplexobj(rows):
                if np.any(np.abs(rows.imag) > 0):
                    raise InputError("complex entries cannot be exact rationals")
                rows = rows.real
            rows = rows.tolist()
        try:
            return cls(tuple(tuple(to_fraction(x) for x in r) for r in rows))
        except TypeError as exc:
            raise InputError("matrix must be a list of rows") from exc

    @classmethod
    def identity(cls, n: int) -> "MatrixQ":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def T(self) -> "MatrixQ":
        return MatrixQ(tuple(zip(*self.entries)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __add__(self, other: "MatrixQ") -> "MatrixQ":
        return MatrixQ(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: "MatrixQ") -> "MatrixQ":
        return self + (-other)

    def __neg__(self) -> "MatrixQ":
        return self.scale(-1)

    def scale(self, c) -> "MatrixQ":
        c = to_fraction(c)
        return MatrixQ(tuple(tuple(c * a for a in r) for r in self.entries))

    def __matmul__(self, other: "MatrixQ") -> "MatrixQ":
        cols = list(zip(*other.entries))
        return MatrixQ(tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.entries))

    def kron(self, other: "MatrixQ") -> "MatrixQ":
        rows = []
        for r in self.entries:
            for s in other.entries:
                rows.append(tuple(a * b for a in r for b in s))
        return MatrixQ(tuple(rows))

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def _gauss(self):
        """Row reduction returning (det, inverse or None)."""
        n, m = self.shape
        if n != m:
            raise InputError("square matrix required")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.entries)]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                return Fraction(0), None
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            p = a[col][col]
            det *= p
            a[col] = [x / p for x in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return det, MatrixQ(tuple(tuple(r[n:]) for r in a))

    def det(self) -> Fraction:
        return self._gauss()[0]

    def inv(self) -> "MatrixQ":
        det, inv = self._gauss()
        if inv is None:
            raise SingularMatrix("matrix is singular")
        return inv

    def to_array(self, dtype=float) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.entries], dtype=dtype)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]


def as_array(m, dtype=complex) -> np.ndarray:
    """Coerce a MatrixQ, nested list (possibly of "p/q" strings) or array."""
    if isinstance(m, MatrixQ):
        return m.to_array(dtype=dtype)
    if isinstance(m, np.ndarray):
        return m.astype(dtype)
    try:
        arr = np.array(m, dtype=dtype)
    except (ValueError, TypeError):
        arr = MatrixQ.from_any(m).to_array(dtype=dtype)
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    return arr


def try_exact(m) -> MatrixQ | None:
    """Return an exact copy when the input is rational (not float noise)."""
    if isinstance(m, MatrixQ):
        return m
    if isinstance(m, np.ndarray):
        if m.dtype.kind in "iu":
            return MatrixQ.from_any(m)
        return None
    try:
        flat = [x for r in m for x in r]
    except TypeError:
        return None
    if all(isinstance(x, (int, Fraction, str)) and not isinstance(x, bool) for x in flat):
        return MatrixQ.from_any(m)
    return None


def is_real(a: np.ndarray, tol: float | None = None) -> bool:
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        return True
    return bool(np.max(np.abs(a.imag), initial=0.0) <= _tol(tol) * max(1.0, np.max(np.abs(a), initial=0.0)))


def realify(a: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Drop a negligible imaginary part."""
    return np.asarray(a).real.copy() if is_real(a, tol) else np.asarray(a)


# ---------------------------------------------------------------------------
# ranks, kernels and subspaces


def numerical_rank(a: np.ndarray, scale: float | None = None) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    ref = max(1.0, s[0] if scale is None else scale)
    return int(np.sum(s > RANK_RTOL * ref))


def null_space(a: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    u, s, vh = np.linalg.svd(a)
    ref = max(1.0, s[0] if (scale is None and s.size) else (scale or 1.0))
    rank = int(np.sum(s > RANK_RTOL * ref))
    return vh[rank:].conj().T


def orth(a: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column span."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    ref = max(1.0, s[0]) if s.size else 1.0
    rank = int(np.sum(s > RANK_RTOL * ref))
    return u[:, :rank]


class Subspace:
    """A complex subspace of C^n held as an orthonormal column basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, basis: np.ndarray | None = None, *, _orthonormal: bool = False):
        self.ambient = int(ambient)
        if basis is None:
            basis = np.zeros((ambient, 0), dtype=complex)
        basis = np.asarray(basis, dtype=complex).reshape(ambient, -1)
        self.basis = basis if _orthonormal else orth(basis)

    # constructors
    @classmethod
    def span(cls, vectors, ambient: int | None = None) -> "Subspace":
        arr = np.asarray(vectors, dtype=complex)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if ambient is None:
            ambient = arr.shape[0]
        return cls(ambient, arr)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0), dtype=complex), _orthonormal=True)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n, dtype=complex), _orthonormal=True)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def contains(self, v, tol: float | None = None) -> bool:
        v = np.asarray(v, dtype=complex).reshape(self.ambient, -1)
        resid = v - self.basis @ (self.basis.conj().T @ v)
        scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
        return bool(np.max(np.abs(resid), initial=0.0) <= max(_tol(tol), 1e2 * RANK_RTOL) * scale)

    def contains_space(self, other: "Subspace", tol: float | None = None) -> bool:
        return other.dim == 0 or self.contains(other.basis, tol)

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        return self.dim == other.dim and self.contains_space(other, tol) and other.contains_space(self, tol)

    def distance(self, other: "Subspace") -> float:
        """Spectral-norm gap between orthogonal projectors (inf when dims differ)."""
        if self.dim != other.dim:
            return math.inf
        if self.ambient == 0:
            return 0.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.ambient, np.hstack([self.basis, other.basis]))

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient)
        # x in U∩V  <=>  x = U a with (I - P_V) U a = 0
        comp = self.basis - other.basis @ (other.basis.conj().T @ self.basis)
        ker = null_space(comp, scale=1.0)
        return Subspace(self.ambient, self.basis @ ker)

    def conj(self) -> "Subspace":
        return Subspace(self.ambient, self.basis.conj(), _orthonormal=True)

    def image(self, a: np.ndarray) -> "Subspace":
        return Subspace(a.shape[0], np.asarray(a, dtype=complex) @ self.basis)

    def kernel_of(self, a: np.ndarray, scale: float | None = None) -> "Subspace":
        """{x in self : a x = 0}."""
        if self.dim == 0:
            return self
        ker = null_space(np.asarray(a, dtype=complex) @ self.basis, scale=scale)
        return Subspace(self.ambient, self.basis @ ker)

    def preimage(self, a: np.ndarray, target: "Subspace") -> "Subspace":
        """{x in self : a x in target}."""
        comp = np.eye(target.ambient, dtype=complex) - target.projector()
        return self.kernel_of(comp @ np.asarray(a, dtype=complex), scale=max(1.0, float(np.linalg.norm(a, 2))))

    def complement_in(self, sub: "Subspace") -> "Subspace":
        """Orthogonal complement of ``sub`` inside ``self``."""
        if sub.dim == 0:
            return self
        comp = self.basis - sub.basis @ (sub.basis.conj().T @ self.basis)
        return Subspace(self.ambient, comp)

    def real_basis(self) -> np.ndarray:
        """Real orthonormal basis, valid when the subspace is conjugation invariant."""
        stacked = np.hstack([self.basis.real, self.basis.imag])
        q = orth(stacked).real
        if q.shape[1] != self.dim:
            raise InputError("subspace is not defined over the reals")
        u, s, _ = np.linalg.svd(stacked, full_matrices=False)
        return u[:, : self.dim]

    def is_real(self, tol: float | None = None) -> bool:
        return self.equals(self.conj(), tol)

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient}, dim={self.dim})"


def sum_spaces(spaces: Iterable[Subspace], ambient: int) -> Subspace:
    parts = [s.basis for s in spaces if s.dim]
    if not parts:
        return Subspace.zero(ambient)
    return Subspace(ambient, np.hstack(parts))


# ---------------------------------------------------------------------------
# nilpotent series


def matrix_power(a: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(a, k)


def exp_nilpotent(x: np.ndarray, terms: int | None = None) -> np.ndarray:
    """exp(x) for nilpotent x via the finite Taylor sum."""
    n = x.shape[0]
    terms = n if terms is None else terms
    out = np.eye(n, dtype=np.result_type(x, float))
    term = np.eye(n, dtype=out.dtype)
    for k in range(1, terms + 1):
        term = term @ x / k
        out = out + term
    return out


def log_unipotent(u: np.ndarray) -> np.ndarray:
    """log(u) for unipotent u: sum_{k=1}^{dim} (-1)^{k-1} X^k / k, X = u - id."""
    n = u.shape[0]
    x = u - np.eye(n)
    out = np.zeros_like(x)
    power = np.eye(n, dtype=x.dtype)
    for k in range(1, n + 1):
        power = power @ x
        out = out + ((-1) ** (k - 1)) * power / k
    return out


def nilpotent_function(coeffs: Sequence[complex], x: np.ndarray) -> np.ndarray:
    """sum_k coeffs[k] x^k."""
    n = x.shape[0]
    out = np.zeros((n, n), dtype=complex)
    power = np.eye(n, dtype=complex)
    for k, c in enumerate(coeffs):
        if k:
            power = power @ x
        out = out + c * power
    return out


# ---------------------------------------------------------------------------
# eigenvalues and Jordan parts


def exponent_class(lam: complex, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """beta in (0,1] with lam = exp(-2 pi i beta); a Fraction for roots of unity."""
    beta = (-np.angle(lam) / (2 * math.pi)) % 1.0
    if beta <= 0.0:
        beta = 1.0
    frac = Fraction(beta).limit_denominator(MAX_ROOT_ORDER)
    if abs(float(frac) - beta) < cluster_tol and frac.denominator <= MAX_ROOT_ORDER:
        if frac == 0:
            frac = Fraction(1)
        return frac
    # wrap-around near 0 / 1
    if abs(beta - 1.0) < cluster_tol or beta < cluster_tol:
        return Fraction(1)
    return float(beta)


def unit_from_beta(beta) -> complex:
    """exp(-2 pi i beta) with exact values at quarter turns."""
    if isinstance(beta, Fraction) and (4 * beta).denominator == 1:
        k = int(4 * beta) % 4
        return (1 + 0j, -1j, -1 + 0j, 1j)[k]
    return complex(np.exp(-2j * math.pi * float(beta)))


@dataclass(frozen=True)
class EigenGroup:
    """Generalized eigenspace H_lambda."""

    value: complex
    space: Subspace
    beta: Fraction | float | None  # exponent class when |lambda| = 1

    @property
    def on_circle(self) -> bool:
        return self.beta is not None

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class AutomorphismParts:
    M: np.ndarray
    Ms: np.ndarray
    Mu: np.ndarray
    N: np.ndarray
    groups: tuple[EigenGroup, ...]
    projectors: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    @property
    def eigen_groups(self):
        return [(g.value, g.space) for g in self.groups]

    def index_of(self, lam: complex, tol: float = DEFAULT_CLUSTER_TOL) -> int | None:
        for i, g in enumerate(self.groups):
            if abs(g.value - lam) < max(tol, 1e-9) * max(1.0, abs(lam)):
                return i
        return None

    def group(self, lam: complex) -> EigenGroup | None:
        i = self.index_of(lam)
        return None if i is None else self.groups[i]

    def projector_where(self, pred: Callable[[EigenGroup], bool]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for g, p in zip(self.groups, self.projectors):
            if pred(g):
                out = out + p
        return out

    def space_where(self, pred: Callable[[EigenGroup], bool]) -> Subspace:
        return sum_spaces((g.space for g in self.groups if pred(g)), self.dim)

    def projector(self, lam: complex) -> np.ndarray:
        i = self.index_of(lam)
        if i is None:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.projectors[i]


def _single_linkage(ev: np.ndarray, radius: float) -> list[list[int]]:
    n = len(ev)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(ev[i] - ev[j]) < radius * max(1.0, abs(ev[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _snap(c: complex, cluster_tol: float):
    r = abs(c)
    beta = None
    if abs(r - 1.0) < cluster_tol:
        beta = exponent_class(c / r, cluster_tol)
        if isinstance(beta, Fraction):
            c = unit_from_beta(beta)
        else:
            c = c / r
    elif abs(c.imag) < cluster_tol * max(1.0, r):
        c = complex(c.real, 0.0)
    return c, beta


def jordan_parts(M, tol: float | None = None, cluster_tol: float | None = None) -> AutomorphismParts:
    """Jordan decomposition M = Ms Mu with N = log Mu and generalized eigenspaces.

    Eigenvalues are clustered by single linkage.  The radius starts at
    ``cluster_tol`` and grows until the generalized eigenspaces found by
    sorted Schur decompositions are independent; perturbed Jordan blocks
    split their eigenvalues at the scale eps**(1/size), which the first
    radius does not always reach.
    """
    tol = _tol(tol)
    cluster_tol = DEFAULT_CLUSTER_TOL if cluster_tol is None else cluster_tol
    Mc = as_array(M, complex)
    n = Mc.shape[0]
    if Mc.shape != (n, n):
        raise InputError("square matrix required")
    real_input = is_real(Mc, tol)
    scale = max(1.0, float(np.linalg.norm(Mc, 2)))
    if abs(np.linalg.det(Mc)) < tol or np.linalg.svd(Mc, compute_uv=False)[-1] < tol * scale:
        raise SingularMatrix("automorphism expected, matrix is singular")
    ev = np.linalg.eigvals(Mc)

    radius = cluster_tol
    accepted = None
    while radius < 0.5:
        clusters = _single_linkage(ev, radius)
        centers = [complex(np.mean(ev[c])) for c in clusters]
        if real_input:
            centers = _conj_symmetrize(centers)
        bases = []
        ok = True
        for i, c in enumerate(clusters):
            def pick(x, i=i):
                d = [abs(x - cc) for cc in centers]
                return int(np.argmin(d)) == i
            _, z, sdim = sla.schur(Mc, output="complex", sort=pick)
            if sdim != len(c):
                ok = False
                break
            bases.append(z[:, :sdim])
        if ok:
            V = np.hstack(bases)
            smin = np.linalg.svd(V, compute_uv=False)[-1]
            if smin > 1e-6:
                accepted = (clusters, centers, bases, V)
                break
        radius *= math.sqrt(10.0)
    if accepted is None:
        raise ClusterAmbiguity("could not separate generalized eigenspaces")
    clusters, centers, bases, V = accepted

    snapped = [_snap(c, cluster_tol) for c in centers]
    Vinv = np.linalg.inv(V)
    diag = np.concatenate([np.full(len(c), s[0]) for c, s in zip(clusters, snapped)])
    Ms = V @ np.diag(diag) @ Vinv
    projectors = []
    start = 0
    for b in bases:
        k = b.shape[1]
        projectors.append(V[:, start:start + k] @ Vinv[start:start + k, :])
        start += k
    Mu = np.linalg.solve(Ms, Mc)
    N = log_unipotent(Mu)
    if real_input:
        Ms, Mu, N = Ms.real.astype(complex), Mu.real.astype(complex), N.real.astype(complex)
        projectors = _real_pairs(projectors, [s[0] for s in snapped])
    nscale = max(1.0, float(np.linalg.norm(N, 2)))
    if np.linalg.norm(np.linalg.matrix_power(N, n), 2) > 1e-6 * nscale ** n:
        raise ClusterAmbiguity("nilpotent part is not nilpotent; clustering failed")

    groups = []
    for b, (val, beta) in zip(bases, snapped):
        sp = Subspace(n, b)
        if real_input and abs(val.imag) == 0.0:
            sp = Subspace(n, sp.real_basis().astype(complex), _orthonormal=True)
        groups.append(EigenGroup(val, sp, beta))
    order = sorted(range(len(groups)), key=lambda i: _group_key(groups[i]))
    return AutomorphismParts(
        M=Mc,
        Ms=Ms,
        Mu=Mu,
        N=N,
        groups=tuple(groups[i] for i in order),
        projectors=tuple(projectors[i] for i in order),
    )


def _group_key(g: EigenGroup):
    return (round(abs(g.value), 9), round(float(np.angle(g.value)), 9))


def _conj_symmetrize(centers: list[complex]) -> list[complex]:
    out = list(centers)
    used = set()
    for i, c in enumerate(centers):
        if i in used:
            continue
        if abs(c.imag) < 1e-12 * max(1.0, abs(c)):
            out[i] = complex(c.real, 0.0)
            continue
        j = min(
            (k for k in range(len(centers)) if k != i and k not in used),
            key=lambda k: abs(centers[k] - c.conjugate()),
            default=None,
        )
        if j is not None and abs(centers[j] - c.conjugate()) < 1e-3 * max(1.0, abs(c)):
            avg = (c + centers[j].conjugate()) / 2
            out[i], out[j] = avg, avg.conjugate()
            used.update((i, j))
    return out


def _real_pairs(projectors, values):
    """For real input, projectors of conjugate eigenvalues are conjugate."""
    out = list(projectors)
    for i, v in enumerate(values):
        if abs(v.imag) == 0.0:
            out[i] = projectors[i].real.astype(complex)
    return out


def jordan_block_counts(N, restrict: Subspace | None = None) -> dict[int, int]:
    """Counts of Jordan blocks by size, from ranks of N^k on ``restrict``."""
    Nc = as_array(N, complex)
    n = Nc.shape[0]
    B = np.eye(n, dtype=complex) if restrict is None else restrict.basis
    d = B.shape[1]
    if d == 0:
        return {}
    nscale = max(1.0, float(np.linalg.norm(Nc, 2)))
    ranks = [d]
    P = B
    for k in range(1, d + 2):
        P = Nc @ P
        ranks.append(numerical_rank(P, scale=nscale ** k))
    if ranks[d] != 0:
        raise NotNilpotent("N is not nilpotent on the given subspace")
    counts = {}
    for size in range(1, d + 1):
        c = (ranks[size - 1] - ranks[size]) - (ranks[size] - ranks[size + 1])
        if c:
            counts[size] = c
    return counts


# ---------------------------------------------------------------------------
# signatures


def exact_signature(S: MatrixQ) -> tuple[int, int, int]:
    """Inertia by exact congruence diagonalization."""
    n, m = S.shape
    if n != m or S.T != S:
        raise NotSymmetric("matrix is not symmetric")
    a = [list(r) for r in S.entries]
    signs = []
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                signs.extend([0] * len(active))
                break
            i, j = pair
            # e_i -> e_i + e_j makes the diagonal entry 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        signs.append(1 if p > 0 else -1)
        for i in active:
            if i != piv and a[i][piv] != 0:
                f = a[i][piv] / p
                for k in range(n):
                    a[i][k] -= f * a[piv][k]
                for k in range(n):
                    a[k][i] -= f * a[k][piv]
        active.remove(piv)
    return signs.count(1), signs.count(0), signs.count(-1)


def _inertia(eigs: np.ndarray, scale: float) -> tuple[int, int, int]:
    thr = RANK_RTOL * max(1.0, scale)
    return int(np.sum(eigs > thr)), int(np.sum(np.abs(eigs) <= thr)), int(np.sum(eigs < -thr))


def signature(S, tol: float | None = None) -> tuple[int, int, int]:
    """(p, q, r) = (positive index, radical dimension, negative index)."""
    exact = try_exact(S)
    if exact is not None:
        return exact_signature(exact)
    tol = _tol(tol)
    a = as_array(S, complex)
    scale = float(np.max(np.abs(a), initial=0.0))
    if not is_real(a, tol):
        raise NotSymmetric("symmetric form must be real")
    a = a.real
    if np.max(np.abs(a - a.T), initial=0.0) > tol * max(1.0, scale):
        raise NotSymmetric("matrix is not symmetric")
    if a.shape[0] == 0:
        return (0, 0, 0)
    return _inertia(np.linalg.eigvalsh((a + a.T) / 2), scale)


def hermitian_signature(S, tol: float | None = None) -> tuple[int, int, int]:
    tol = _tol(tol)
    a = as_array(S, complex)
    scale = float(np.max(np.abs(a), initial=0.0))
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol * max(1.0, scale) * 10:
        raise NotHermitian("matrix is not hermitian")
    if a.shape[0] == 0:
        return (0, 0, 0)
    return _inertia(np.linalg.eigvalsh((a + a.conj().T) / 2), scale)

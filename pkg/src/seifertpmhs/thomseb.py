"""Thom-Sebastiani operations: tensor products of Seifert data, suspension,
the Hodge filtration of a sum, and the two named singularity fixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import HyperbolicityViolation, InputError, SectorMismatch, TierMismatch
from .flbundle import Lattice, fl_lattice, lattice_from_hodge, triple_from_seifert
from .gamma_twist import gamma_automorphism, sqrt_tate_twist
from .hodge import Filtration, SteenbrinkMHS, SteenbrinkPMHS, check_pmhs
from .linalg_core import AutomorphismParts, MatrixQ, Subspace, jordan_parts, sum_spaces
from .seifert import SeifertFormPair, dual_pair, milnor_monodromy, monodromy_array


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _form(g) -> SeifertFormPair:
    return g if isinstance(g, SeifertFormPair) else SeifertFormPair.from_gram(g)


def _scaled(L: SeifertFormPair, c: int) -> SeifertFormPair:
    if L.exact is not None:
        e = L.exact.scale(c)
        return SeifertFormPair(e.to_array(float), e)
    return SeifertFormPair(c * L.gram)


def _kron(a: SeifertFormPair, b: SeifertFormPair, c: int = 1) -> SeifertFormPair:
    if a.exact is not None and b.exact is not None:
        e = a.exact.kron(b.exact).scale(c)
        return SeifertFormPair(e.to_array(float), e)
    return SeifertFormPair(c * np.kron(a.gram, b.gram))


def hnor_sign(m: int) -> int:
    return _sign((m + 1) * (m + 2) // 2)


@dataclass
class TEZPData:
    """Milnor lattice Seifert form L with parity m, plus optional analytic tiers.

    ``pmhs`` and ``lattice`` (a z-lattice) live on the coordinates of L^nor.
    """

    L: SeifertFormPair
    m: int
    pmhs: SteenbrinkPMHS | None = None
    lattice: Lattice | None = None

    def __post_init__(self):
        self.L = _form(self.L)
        if self.lattice is not None and self.pmhs is None:
            raise InputError("a lattice tier needs Hodge data as well")

    @property
    def mu(self) -> int:
        return self.L.dim

    @property
    def tier(self) -> str:
        if self.lattice is not None:
            return "fl-lattice"
        return "hodge" if self.pmhs is not None else "lattice"

    @property
    def L_hnor(self) -> SeifertFormPair:
        return _scaled(self.L, hnor_sign(self.m))

    @property
    def L_nor(self) -> SeifertFormPair:
        return dual_pair(self.L_hnor).L_dual

    @property
    def M(self):
        """Milnor monodromy: L(Ma, b) = (-1)^{m+1} L(b, a)."""
        return milnor_monodromy(self.L, self.m)

    @property
    def M_hnor(self):
        return monodromy_of_form(self.L_hnor)


def monodromy_of_form(L: SeifertFormPair):
    from .seifert import monodromy_of

    return monodromy_of(L)


def tensor_seifert(Lf, m: int, Lg, n: int) -> tuple[SeifertFormPair, SeifertFormPair]:
    """L(f+g) = (-1)^{(m+1)(n+1)} L(f)⊗L(g) and L^hnor(f+g) = L^hnor(f)⊗L^hnor(g)."""
    Lf, Lg = _form(Lf), _form(Lg)
    raw = _kron(Lf, Lg, _sign((m + 1) * (n + 1)))
    hn = _kron(_scaled(Lf, hnor_sign(m)), _scaled(Lg, hnor_sign(n)))
    return raw, hn


# ---------------------------------------------------------------------------
# Hodge filtration of a sum


def _sector_pieces(F: Filtration, parts: AutomorphismParts, name: str):
    """Per-sector filtrations; SectorMismatch if F does not split along the sectors."""
    out = []
    for g, P in zip(parts.groups, parts.projectors):
        if g.beta is None:
            raise SectorMismatch(f"eigenvalue {g.value} of {name} is off the unit circle")
        out.append({k: v.image(P) for k, v in F.steps.items()})
    for k, v in F.steps.items():
        total = sum_spaces([s[k] for s in out], F.ambient)
        if not total.equals(v):
            raise SectorMismatch(f"filtration of {name} does not split along eigenvalue sectors")
    return out


def _kron_space(a: Subspace, b: Subspace) -> Subspace:
    n = a.ambient * b.ambient
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n)
    return Subspace(n, np.kron(a.basis, b.basis))


def ts_hodge(GFf: Filtration, parts_f: AutomorphismParts, m: int,
             GFg: Filtration, parts_g: AutomorphismParts, n: int) -> Filtration:
    """G(F^p) of f+g, sector by sector, as a sum of G(F^q)(f) ⊗ G(F^r)(g).

    The sum runs over sector exponents beta, gamma in (0, 1] and q, r with
    (m - q + beta) + (n - r + gamma) = m + n + 1 - p + alpha, where alpha in (0, 1]
    is beta + gamma or beta + gamma - 1.
    """
    sf = _sector_pieces(GFf, parts_f, "f")
    sg = _sector_pieces(GFg, parts_g, "g")
    Nf, Ng = parts_f.dim, parts_g.dim

    def at(pieces, i, k, F, parts):
        if k in pieces[i]:
            return pieces[i][k]
        if k < F.lo:
            return parts.groups[i].space
        if k > F.hi:
            return Subspace.zero(parts.dim)
        return pieces[i][max(x for x in pieces[i] if x < k)]

    p_lo = GFf.lo + GFg.lo - 1
    p_hi = GFf.hi + GFg.hi + 2
    steps = {}
    for p in range(p_lo, p_hi + 1):
        spaces = []
        for i, gf in enumerate(parts_f.groups):
            for j, gg in enumerate(parts_g.groups):
                delta = 1 if gf.beta + gg.beta > 1 else 0
                total = p - 1 + delta  # q + r
                for q in range(GFf.lo - 1, GFf.hi + 1):
                    a = at(sf, i, q, GFf, parts_f)
                    b = at(sg, j, total - q, GFg, parts_g)
                    if a.dim and b.dim:
                        spaces.append(_kron_space(a, b))
        steps[p] = sum_spaces(spaces, Nf * Ng)
    return Filtration(steps, True, Subspace.full(Nf * Ng))


def spectral_numbers_of(F: Filtration, parts: AutomorphismParts, m: int) -> dict:
    """alpha = m - p - 1 + beta counted by dim Gr_F^p on each sector."""
    out: dict = {}
    for g, P in zip(parts.groups, parts.projectors):
        for p in F.indices():
            d = F[p].image(P).dim - F[p + 1].image(P).dim
            if d:
                a = m - p - 1 + g.beta
                out[a] = out.get(a, 0) + d
    return out


def gamma_filtration(p: SteenbrinkPMHS) -> Filtration:
    G = gamma_automorphism(p.mhs.parts).G
    return p.F.map(G, Subspace.full(p.mhs.n))


def pmhs_from_twisted(M: np.ndarray, GF: Filtration, S: np.ndarray, m: int, signed: bool) -> SteenbrinkPMHS:
    """Undo G on a twisted Hodge filtration and assemble a PMHS candidate."""
    parts = jordan_parts(M)
    Gi = gamma_automorphism(parts).inverse()
    F = GF.map(Gi, Subspace.full(parts.dim))
    return SteenbrinkPMHS(SteenbrinkMHS(M, F, m), S, signed)


# ---------------------------------------------------------------------------
# TEZP operations


def _lattice_tensor(a: Lattice, b: Lattice, N: np.ndarray) -> Lattice:
    gens = []
    for ga in a.gens:
        for gb in b.gens:
            h: dict = {}
            for x, va in ga.items():
                for y, vb in gb.items():
                    h[x + y] = h.get(x + y, 0) + np.kron(va, vb)
            gens.append(h)
    return Lattice(gens, N, "z", a.cutoff + b.cutoff)


def tensor_tezp(a: TEZPData, b: TEZPData) -> TEZPData:
    if a.tier != b.tier:
        raise TierMismatch(f"cannot tensor {a.tier} data with {b.tier} data")
    L, _ = tensor_seifert(a.L, a.m, b.L, b.m)
    k = a.m + b.m + 1
    out = TEZPData(L, k)
    if a.pmhs is None:
        return out
    pa, pb = a.pmhs, b.pmhs
    M = np.kron(pa.M, pb.M)
    Lnor = np.kron(a.L_nor.gram, b.L_nor.gram)
    _, S = triple_from_seifert(Lnor, k)
    GF = ts_hodge(gamma_filtration(pa), pa.mhs.parts, a.m, gamma_filtration(pb), pb.mhs.parts, b.m)
    out.pmhs = pmhs_from_twisted(M, GF, S, k, pa.signed != pb.signed)
    if a.lattice is not None:
        out.lattice = _lattice_tensor(a.lattice, b.lattice, out.pmhs.mhs.N)
    return out


def suspend(t: TEZPData) -> TEZPData:
    """f -> f + x^2: L -> (-1)^m L, M -> -M; Hodge data via the square-root twist."""
    out = TEZPData(_scaled(t.L, _sign(t.m)), t.m + 1)
    if t.pmhs is not None:
        out.pmhs = sqrt_tate_twist(t.pmhs)
    if t.lattice is not None:
        x2 = a1_fixture()
        out.lattice = _lattice_tensor(t.lattice, x2.lattice, out.pmhs.mhs.N)
    return out


def tensor_harness(a: TEZPData, b: TEZPData):
    """Check whether the tensor Hodge data is a (signed or unsigned) PMHS; returns both reports."""
    t = tensor_tezp(a, b)
    p = t.pmhs
    return {s: check_pmhs(SteenbrinkPMHS(p.mhs, p.S, s)) for s in (False, True)}


# ---------------------------------------------------------------------------
# fixtures


def pmhs_on_lattice(t: TEZPData, top: dict[int, np.ndarray], signed: bool) -> SteenbrinkPMHS:
    """PMHS in the coordinates of L^nor: M = (-1)^{m+1} mono(L^nor), S = -L^nor ν,
    F^p spanned by the columns of top[p] together with all top[p'] for p' > p."""
    M, S = triple_from_seifert(t.L_nor.gram, t.m)
    n = t.mu
    ks = sorted(top)
    steps = {}
    for p in range(ks[0], ks[-1] + 2):
        cols = [np.asarray(top[k], dtype=complex).reshape(n, -1) for k in ks if k >= p]
        steps[p] = Subspace(n, np.hstack(cols)) if cols else Subspace.zero(n)
    steps[ks[0] - 1] = Subspace.full(n)
    return SteenbrinkPMHS(SteenbrinkMHS(M, Filtration(steps, True, Subspace.full(n)), t.m), S, signed)


def _top_vector(t: TEZPData) -> np.ndarray:
    """A standard basis vector outside ker N."""
    M, _ = triple_from_seifert(t.L_nor.gram, t.m)
    N = jordan_parts(M).N
    k = int(np.argmax(np.linalg.norm(N, axis=0)))
    v = np.zeros(N.shape[0])
    v[k] = 1.0
    return v


def p1_mirror() -> TEZPData:
    """x_0 + 1/x_0: L^hnor = [[1,0],[2,1]], m = 0."""
    m = 0
    Lh = MatrixQ.from_any([[1, 0], [2, 1]])
    L = Lh.scale(hnor_sign(m))
    t = TEZPData(SeifertFormPair(L.to_array(float), L), m)
    t.pmhs = pmhs_on_lattice(t, {1: _top_vector(t)}, False)
    return t


def t_pqr(p: int, q: int, r: int) -> TEZPData:
    """Rank-2 sublattice of a hyperbolic T_pqr surface singularity, m = 2."""
    if min(p, q, r) < 1:
        raise InputError("p, q, r must be positive")
    kappa = Fraction(1, p) + Fraction(1, q) + Fraction(1, r)
    if kappa >= 1:
        raise HyperbolicityViolation(f"1/p + 1/q + 1/r = {kappa} is not < 1")
    chi = math.lcm(p, q, r)
    L = MatrixQ.from_any([[0, -chi], [chi, Fraction(chi * chi) * (kappa - 1) / 2]])
    t = TEZPData(SeifertFormPair(L.to_array(float), L), 2)
    t.pmhs = pmhs_on_lattice(t, {2: _top_vector(t)}, True)
    return t


def a1_fixture() -> TEZPData:
    """x^2 in one variable: L = [[-1]], m = 0, z-lattice generated by es(1, 1/2)."""
    t = TEZPData(SeifertFormPair(np.array([[-1.0]]), MatrixQ.from_any([[-1]])), 0)
    t.pmhs = pmhs_on_lattice(t, {0: np.ones((1, 1))}, False)
    t.lattice = fl_lattice(lattice_from_hodge(t.pmhs.mhs))
    return t


def tezp_from_pmhs(p: SteenbrinkPMHS, with_lattice: bool = True) -> TEZPData:
    """TEZP data whose L^nor is the normalized Seifert form of ``p`` (same coordinates)."""
    from .gamma_twist import normalized_seifert

    ln = normalized_seifert(p).gram
    Lh = np.linalg.inv(ln).T  # L^nor = (L^hnor)^vee
    t = TEZPData(SeifertFormPair(hnor_sign(p.m) * Lh), p.m)
    t.pmhs = p
    if with_lattice:
        t.lattice = fl_lattice(lattice_from_hodge(p.mhs))
    return t


FIXTURE_NAMES = ("p1-mirror", "t-pqr:p,q,r", "a1")


def fixture(name: str) -> TEZPData:
    name = name.strip().lower()
    if name in ("p1-mirror", "p1_mirror"):
        return p1_mirror()
    if name in ("a1", "x2"):
        return a1_fixture()
    if name.startswith("t-pqr") or name.startswith("t_pqr"):
        _, _, args = name.partition(":")
        try:
            p, q, r = (int(x) for x in args.split(","))
        except ValueError:
            raise InputError("expected t-pqr:p,q,r") from None
        return t_pqr(p, q, r)
    raise InputError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")

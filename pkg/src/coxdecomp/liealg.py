"""Lie algebras over Q given by structure constants.

Builds the Lie algebras of(p, q, r) (translations^r semidirect so(p, q)),
computes derived series, centers and centroids exactly, and splits
centerless algebras into indecomposable ideals through idempotents of the
centroid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint
import numpy as np

from .errors import ConsistencyError, ValidationError

fmpq, fmpq_mat, fmpz_mat, fmpq_poly = flint.fmpq, flint.fmpq_mat, flint.fmpz_mat, flint.fmpq_poly

Vector = list  # list of fmpq


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------


def _q(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    x = Fraction(x)
    return fmpq(x.numerator, x.denominator)


def _frac(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _zeros(r: int, c: int) -> fmpq_mat:
    return fmpq_mat(r, c)


def _identity(d: int) -> fmpq_mat:
    M = fmpq_mat(d, d)
    for i in range(d):
        M[i, i] = 1
    return M


def _rows(M: fmpq_mat) -> list[Vector]:
    return [list(r) for r in M.tolist()]


def _from_rows(rows: Sequence[Sequence], ncols: int) -> fmpq_mat:
    M = fmpq_mat(len(rows), ncols)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            if v:
                M[i, j] = _q(v)
    return M


def _integer_rows(M: fmpq_mat) -> fmpz_mat:
    out = []
    for row in M.tolist():
        den = math.lcm(*(int(v.q) for v in row)) if row else 1
        out.append([int(v.p) * (den // int(v.q)) for v in row])
    return fmpz_mat(out) if out else fmpz_mat(0, M.ncols())


def nullspace(M: fmpq_mat) -> list[Vector]:
    """Basis of ``{x : M x = 0}`` as a list of vectors."""
    n = M.ncols()
    if M.nrows() == 0:
        return [[fmpq(1) if i == j else fmpq(0) for i in range(n)] for j in range(n)]
    X, k = _integer_rows(M).nullspace()
    return [[fmpq(X[i, j]) for i in range(n)] for j in range(k)]


def span(vectors: Sequence[Vector], dim: int) -> list[Vector]:
    """Reduced row-echelon basis of the span."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    R, rank = _from_rows(vectors, dim).rref()
    return _rows(R)[:rank]


def _in_span(basis: list[Vector], v: Vector, dim: int) -> bool:
    return len(span(basis + [v], dim)) == len(basis)


def _coords(basis: list[Vector], v: Vector, dim: int) -> Vector:
    """Coordinates of v in a basis of a subspace containing it."""
    k = len(basis)
    A = fmpq_mat(dim, k)
    for j, b in enumerate(basis):
        for i in range(dim):
            A[i, j] = b[i]
    # least-squares-free exact solve: use the normal equations on a full-rank system
    At = A.transpose()
    sol = (At * A).solve(At * fmpq_mat(dim, 1, list(v)))
    coords = [sol[i, 0] for i in range(k)]
    back = [sum((coords[j] * basis[j][i] for j in range(k)), fmpq(0)) for i in range(dim)]
    if back != list(v):
        raise ConsistencyError("vector is not in the subspace")
    return coords


def _poly_of_matrix(p: fmpq_poly, M: fmpq_mat) -> fmpq_mat:
    d = M.nrows()
    out = _zeros(d, d)
    for c in reversed(p.coeffs()):
        out = out * M
        if c:
            out = out + _identity(d) * c
    return out


# ---------------------------------------------------------------------------
# Lie algebras
# ---------------------------------------------------------------------------


class LieAlgebra:
    """Structure constants ``[x_i, x_j] = sum_k c[i][j][k] x_k`` over Q.

    Stored as adjoint matrices: column j of ``ad[i]`` is ``[x_i, x_j]``.
    Antisymmetry and the Jacobi identity are verified exactly on construction.
    """

    def __init__(self, dim: int, brackets: dict[tuple[int, int], dict[int, object]] | None = None,
                 *, ad: list[fmpq_mat] | None = None, name: str | None = None, check: bool = True):
        self.dim = dim
        self.name = name
        if ad is None:
            ad = [_zeros(dim, dim) for _ in range(dim)]
            for (i, j), terms in (brackets or {}).items():
                for k, c in terms.items():
                    if c:
                        ad[i][k, j] = _q(c)
        self.ad = ad
        if check:
            self._check()

    def __repr__(self):
        return f"<LieAlgebra {self.name or ''} of dim {self.dim}>"

    def const(self, i: int, j: int, k: int) -> fmpq:
        return self.ad[i][k, j]

    def ad_of(self, u: Vector) -> fmpq_mat:
        out = _zeros(self.dim, self.dim)
        for i, c in enumerate(u):
            if c:
                out = out + self.ad[i] * c
        return out

    def bracket(self, u: Vector, v: Vector) -> Vector:
        col = self.ad_of(u) * fmpq_mat(self.dim, 1, list(v))
        return [col[i, 0] for i in range(self.dim)]

    def basis_vector(self, i: int) -> Vector:
        return [fmpq(1) if k == i else fmpq(0) for k in range(self.dim)]

    def _check(self):
        d = self.dim
        for i in range(d):
            for j in range(i, d):
                for k in range(d):
                    if self.ad[i][k, j] != -self.ad[j][k, i]:
                        raise ValidationError(f"structure constants not antisymmetric at ({i},{j},{k})")
        # Jacobi <=> ad is a homomorphism: ad([x_i, x_j]) = [ad x_i, ad x_j]
        for i in range(d):
            for j in range(i + 1, d):
                lhs = self.ad_of(self.bracket(self.basis_vector(i), self.basis_vector(j)))
                rhs = self.ad[i] * self.ad[j] - self.ad[j] * self.ad[i]
                if lhs != rhs:
                    raise ValidationError(f"Jacobi identity fails for basis pair ({i},{j})")

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        entries = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(self.dim):
                    c = self.ad[i][k, j]
                    if c:
                        entries.append([i, j, k, f"{int(c.p)}/{int(c.q)}"])
        return {"dim": self.dim, "brackets": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "LieAlgebra":
        d = int(obj["dim"])
        brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
        for entry in obj.get("brackets", []):
            i, j, k, c = entry
            i, j, k = int(i), int(j), int(k)
            if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
                raise ValidationError(f"bracket index out of range in {entry}")
            if i == j:
                raise ValidationError(f"bracket [x_{i}, x_{i}] must vanish")
            c = Fraction(str(c))
            brackets.setdefault((i, j), {})[k] = brackets.get((i, j), {}).get(k, 0) + c
            brackets.setdefault((j, i), {})[k] = brackets.get((j, i), {}).get(k, 0) - c
        return cls(d, brackets)

    # -- transformations ----------------------------------------------------

    def change_basis(self, P) -> "LieAlgebra":
        """Same algebra in the basis ``y_a = sum_i P[i][a] x_i`` (P invertible)."""
        P = P if isinstance(P, fmpq_mat) else _from_rows(P, self.dim)
        if P.det() == 0:
            raise ValidationError("basis change must be invertible")
        Pinv = P.inv()
        ad = []
        for a in range(self.dim):
            col = [P[i, a] for i in range(self.dim)]
            ad.append(Pinv * self.ad_of(col) * P)
        return LieAlgebra(self.dim, ad=ad, name=self.name, check=False)

    def restrict(self, basis: list[Vector]) -> "LieAlgebra":
        """The subalgebra spanned by ``basis``, in that basis."""
        k = len(basis)
        ad = [_zeros(k, k) for _ in range(k)]
        for a in range(k):
            for b in range(k):
                br = self.bracket(basis[a], basis[b])
                for c, val in enumerate(_coords(basis, br, self.dim)):
                    ad[a][c, b] = val
        return LieAlgebra(k, ad=ad, check=False)


def random_basis_change(dim: int, rng: np.random.Generator, spread: int = 2) -> fmpq_mat:
    """A random invertible integer matrix with small entries."""
    while True:
        P = fmpq_mat(dim, dim, [int(x) for x in rng.integers(-spread, spread + 1, size=dim * dim)])
        if P.det() != 0:
            return P


# ---------------------------------------------------------------------------
# of(p, q, r)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OfSignature:
    p: int
    q: int
    r: int

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0 or self.p + self.q + self.r < 1:
            raise ValidationError("signature entries must be nonnegative with positive sum")


def of_basis(sig: OfSignature) -> list[np.ndarray]:
    """Matrix basis: J(E_ij - E_ji) for i < j < p+q, then E_(p+q+a, c) for the translations."""
    p, q, r = sig.p, sig.q, sig.r
    m, n = p + q, p + q + r
    J = np.diag([1] * p + [-1] * q)
    basis = []
    for i in range(m):
        for j in range(i + 1, m):
            S = np.zeros((m, m), dtype=np.int64)
            S[i, j], S[j, i] = 1, -1
            M = np.zeros((n, n), dtype=np.int64)
            M[:m, :m] = J @ S
            basis.append(M)
    for a in range(r):
        for c in range(m):
            M = np.zeros((n, n), dtype=np.int64)
            M[m + a, c] = 1
            basis.append(M)
    return basis


def of_algebra(sig: OfSignature | tuple[int, int, int]) -> LieAlgebra:
    """Lie algebra of the B-isometries fixing Ker(B) pointwise, for B of signature (p, q, r)."""
    if not isinstance(sig, OfSignature):
        sig = OfSignature(*sig)
    p, q, r = sig.p, sig.q, sig.r
    m = p + q
    J = np.diag([1] * p + [-1] * q)
    basis = of_basis(sig)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    d = len(basis)

    def coords(M: np.ndarray) -> dict[int, int]:
        out = {}
        S = J @ M[:m, :m]
        for k, (i, j) in enumerate(pairs):
            if S[i, j]:
                out[k] = int(S[i, j])
        for a in range(r):
            for c in range(m):
                if M[m + a, c]:
                    out[len(pairs) + a * m + c] = int(M[m + a, c])
        return out

    brackets = {}
    for a in range(d):
        for b in range(d):
            if a != b:
                C = basis[a] @ basis[b] - basis[b] @ basis[a]
                if C.any():
                    brackets[(a, b)] = coords(C)
    return LieAlgebra(d, brackets, name=f"of({p},{q},{r})")


def of_dimension(p: int, q: int, r: int) -> int:
    m = p + q
    return m * (m - 1) // 2 + r * m


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------


def bracket_span(L: LieAlgebra, A: list[Vector], B: list[Vector]) -> list[Vector]:
    return span([L.bracket(a, b) for a in A for b in B], L.dim)


def full_basis(L: LieAlgebra) -> list[Vector]:
    return [L.basis_vector(i) for i in range(L.dim)]


def derived(L: LieAlgebra) -> list[Vector]:
    """Basis of [L, L]."""
    B = full_basis(L)
    return bracket_span(L, B, B)


def center(L: LieAlgebra) -> list[Vector]:
    """Basis of ``{x : [x, L] = 0}``."""
    d = L.dim
    # row (j, k): sum_i x_i c_ij^k = 0
    M = fmpq_mat(d * d, d)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                c = L.ad[i][k, j]
                if c:
                    M[j * d + k, i] = c
    return span(nullspace(M), d)


def is_perfect(L: LieAlgebra) -> bool:
    return len(derived(L)) == L.dim


def derived_series(L: LieAlgebra) -> list[list[Vector]]:
    series = [full_basis(L)]
    while series[-1]:
        nxt = bracket_span(L, series[-1], series[-1])
        if len(nxt) == len(series[-1]):
            break
        series.append(nxt)
    return series


def is_solvable(L: LieAlgebra) -> bool:
    return not derived_series(L)[-1]


def is_nilpotent_subalgebra(L: LieAlgebra, I: list[Vector]) -> bool:
    """Lower central series of the subalgebra spanned by I reaches zero."""
    cur = I
    while cur:
        nxt = bracket_span(L, I, cur)
        if len(nxt) == len(cur):
            return False
        cur = nxt
    return True


def nilradical_codim_check(L: LieAlgebra) -> bool:
    """True iff [L, L] has codimension 1, is nilpotent, and L itself is not nilpotent.

    Then [L, L] is a nilpotent ideal and the only larger ideal is L, which is
    not nilpotent, so [L, L] is the nilradical and has codimension 1.
    """
    D = derived(L)
    if len(D) != L.dim - 1:
        return False
    return is_nilpotent_subalgebra(L, D) and not is_nilpotent_subalgebra(L, full_basis(L))


def is_ideal(L: LieAlgebra, I: list[Vector]) -> bool:
    return all(_in_span(I, v, L.dim) for v in bracket_span(L, I, full_basis(L))) if I else True


# ---------------------------------------------------------------------------
# centroid
# ---------------------------------------------------------------------------


def lie_generators(L: LieAlgebra) -> list[int]:
    """Greedy set of basis indices generating L as a Lie algebra."""
    gens: list[int] = []
    generated: list[Vector] = []
    for i in range(L.dim):
        if generated and _in_span(generated, L.basis_vector(i), L.dim):
            continue
        gens.append(i)
        cur = span([L.basis_vector(g) for g in gens], L.dim)
        while True:
            nxt = span(cur + [L.bracket(a, b) for a in cur for b in cur], L.dim)
            if len(nxt) == len(cur):
                break
            cur = nxt
        generated = cur
        if len(generated) == L.dim:
            break
    return gens


def _commutant(mats: list[fmpq_mat], d: int, within: list[fmpq_mat] | None = None) -> list[fmpq_mat]:
    """Basis of the maps commuting with every matrix in ``mats``."""
    if within is None:
        within = []
        for a in range(d):
            for b in range(d):
                E = _zeros(d, d)
                E[a, b] = 1
                within.append(E)
    basis = within
    for A in mats:
        if not basis:
            break
        comms = [X * A - A * X for X in basis]
        M = fmpq_mat(d * d, len(basis))
        for c, C in enumerate(comms):
            for a in range(d):
                for b in range(d):
                    v = C[a, b]
                    if v:
                        M[a * d + b, c] = v
        sols = nullspace(M)
        new = []
        for s in sols:
            X = _zeros(d, d)
            for c, coef in enumerate(s):
                if coef:
                    X = X + basis[c] * coef
            new.append(X)
        basis = new
    return basis


def centroid(L: LieAlgebra, method: str = "generators") -> list[fmpq_mat]:
    """Basis of the centroid ``{phi : phi([x, y]) = [phi(x), y]}``.

    The defining condition is ``phi ad_y = ad_y phi`` for every y; it
    suffices to impose it for y in a Lie generating set (``method="generators"``,
    the default) or for the whole basis (``method="full"``).
    """
    d = L.dim
    if method == "full":
        idx = list(range(d))
    elif method == "generators":
        idx = lie_generators(L)
    else:
        raise ValidationError(f"unknown centroid method {method!r}")
    return _commutant([L.ad[i] for i in idx], d)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------


@dataclass
class Split:
    ideals: list[list[Vector]]
    certificates: list[str | None] = field(default_factory=list)

    kind = "Split"

    def dims(self) -> list[int]:
        return sorted(len(I) for I in self.ideals)


@dataclass
class CertifiedIndecomposable:
    certificate: str
    centroid_dim: int

    kind = "CertifiedIndecomposable"


@dataclass
class Inconclusive:
    reason: str
    centroid_dim: int

    kind = "Inconclusive"


def _candidates(C: list[fmpq_mat]) -> list[fmpq_mat]:
    out = list(C)
    for a, b in itertools.combinations(range(len(C)), 2):
        out.append(C[a] + C[b] * 2)
    return out


def _idempotent(phi: fmpq_mat) -> fmpq_mat | None:
    """A nontrivial idempotent polynomial in phi from a rational eigenvalue, if any."""
    m = phi.minpoly()
    if m.degree() < 2:
        return None
    sq = m.derivative()
    sqfree = fmpq_poly(m)
    g = m.gcd(sq)
    if g.degree() > 0:
        sqfree = m / g
    for lam, _ in sqfree.roots():
        lin = fmpq_poly([-lam, 1])
        # m = (x - lam)^k h with h coprime to x - lam
        power, h = fmpq_poly([1]), fmpq_poly(m)
        while h(lam) == 0:
            h = h / lin
            power = power * lin
        if h.degree() == 0:
            continue
        gcd, a, b = power.xgcd(h)  # a*power + b*h = gcd (a unit)
        e = _poly_of_matrix(b * h / gcd.coeffs()[0], phi)
        return e
    return None


def _image(M: fmpq_mat) -> list[Vector]:
    d = M.nrows()
    return span([[M[i, j] for i in range(d)] for j in range(M.ncols())], d)


def _local_certificate(C: list[fmpq_mat]) -> bool:
    """C commutative and every basis element is a scalar plus a nilpotent.

    Then every element of C is scalar plus nilpotent, so C is local and has
    no idempotents other than 0 and 1.
    """
    for A, B in itertools.combinations(C, 2):
        if A * B != B * A:
            return False
    for A in C:
        m = A.minpoly()
        roots = m.roots()
        if len(roots) != 1 or roots[0][1] != m.degree():
            return False
    return True


def _field_certificate(C: list[fmpq_mat]) -> bool:
    """Some element generates C and has an irreducible minimal polynomial: C is a field."""
    for A in _candidates(C):
        m = A.minpoly()
        if m.degree() != len(C):
            continue
        _, factors = m.factor()
        if len(factors) == 1 and factors[0][1] == 1:
            return True
    return False


def decompose_ideals(L: LieAlgebra):
    """Split a centerless Lie algebra into indecomposable ideals.

    Returns :class:`Split` (ideal bases in L's coordinates, at least two),
    :class:`CertifiedIndecomposable` or :class:`Inconclusive`.
    """
    if center(L):
        raise ValidationError("decompose_ideals requires a centerless algebra")
    ideals, certs = _split(L, full_basis(L))
    if len(ideals) > 1:
        verify_split(L, ideals)
        return Split(ideals, certs)
    C = centroid(L)
    cert = certs[0]
    if cert is None:
        return Inconclusive("centroid has no rational idempotent and no certificate applies", len(C))
    return CertifiedIndecomposable(cert, len(C))


def _split(L: LieAlgebra, basis: list[Vector]) -> tuple[list[list[Vector]], list[str | None]]:
    """Recursive splitting of the ideal spanned by ``basis`` (a direct summand of L)."""
    sub = L.restrict(basis) if len(basis) < L.dim else L
    C = centroid(sub)
    if len(C) == 1:
        return [basis], ["centroid-dim-1"]
    for phi in _candidates(C):
        e = _idempotent(phi)
        if e is None:
            continue
        d = sub.dim
        parts = [_image(e), _image(_identity(d) - e)]
        out, certs = [], []
        for part in parts:
            lifted = [_lift(basis, v, L.dim) for v in part]
            o, c = _split(L, span(lifted, L.dim))
            out += o
            certs += c
        return out, certs
    if _local_certificate(C):
        return [basis], ["centroid-local"]
    if _field_certificate(C):
        return [basis], ["centroid-field"]
    return [basis], [None]


def _lift(basis: list[Vector], coords: Vector, dim: int) -> Vector:
    return [sum((coords[a] * basis[a][i] for a in range(len(basis))), fmpq(0)) for i in range(dim)]


def verify_split(L: LieAlgebra, ideals: list[list[Vector]]) -> None:
    """Exact soundness checks for a claimed decomposition into ideals."""
    d = L.dim
    if sum(len(I) for I in ideals) != d or len(span([v for I in ideals for v in I], d)) != d:
        raise ConsistencyError("ideals do not form a direct sum spanning L")
    for I in ideals:
        if not is_ideal(L, I):
            raise ConsistencyError("a summand is not an ideal")
    for I, K in itertools.combinations(ideals, 2):
        if bracket_span(L, I, K):
            raise ConsistencyError("two summands do not commute")


def transport(P: fmpq_mat, vectors: list[Vector]) -> list[Vector]:
    """Images of coordinate vectors of the new basis in the old coordinates."""
    d = P.nrows()
    out = []
    for v in vectors:
        col = P * fmpq_mat(d, 1, list(v))
        out.append([col[i, 0] for i in range(d)])
    return out


def is_isomorphism_on(L1: LieAlgebra, L2: LieAlgebra, P: fmpq_mat, I: list[Vector]) -> bool:
    """Does ``v -> P v`` preserve brackets between elements of I (in L1) and their images (in L2)?"""
    imgs = transport(P, I)
    for a in range(len(I)):
        for b in range(len(I)):
            lhs = transport(P, [L1.bracket(I[a], I[b])])[0]
            if lhs != L2.bracket(imgs[a], imgs[b]):
                return False
    return True


def same_subspace(A: list[Vector], B: list[Vector], dim: int) -> bool:
    return len(A) == len(B) == len(span(A + B, dim))


def match_summands(L: LieAlgebra, split: Split, L2: LieAlgebra, P: fmpq_mat, split2: Split
                   ) -> list[tuple[int, int]] | None:
    """Pair the summands of ``split2`` (of ``L2 = L.change_basis(P)``) with those of ``split``.

    A summand I2 of L2 is carried to L by ``v -> P v``; it is matched with the
    summand of L spanning the same subspace, and the matched pair is checked
    to be isomorphic via that map. Returns the pairs or None.
    """
    if len(split.ideals) != len(split2.ideals):
        return None
    pairs = []
    free = set(range(len(split.ideals)))
    for j, I2 in enumerate(split2.ideals):
        img = transport(P, I2)
        hit = next((i for i in sorted(free) if same_subspace(split.ideals[i], img, L.dim)), None)
        if hit is None or not is_isomorphism_on(L2, L, P, I2):
            return None
        free.discard(hit)
        pairs.append((hit, j))
    return pairs


def verdict_to_json(v) -> dict:
    if isinstance(v, Split):
        return {
            "verdict": "Split",
            "ideals": [[[f"{int(x.p)}/{int(x.q)}" for x in vec] for vec in I] for I in v.ideals],
            "dims": [len(I) for I in v.ideals],
            "certificates": v.certificates,
        }
    if isinstance(v, CertifiedIndecomposable):
        return {"verdict": "CertifiedIndecomposable", "certificate": v.certificate,
                "centroid_dim": v.centroid_dim}
    return {"verdict": "Inconclusive", "reason": v.reason, "centroid_dim": v.centroid_dim}


__all__ = [
    "CertifiedIndecomposable",
    "Inconclusive",
    "LieAlgebra",
    "OfSignature",
    "Split",
    "center",
    "centroid",
    "decompose_ideals",
    "derived",
    "derived_series",
    "is_ideal",
    "is_nilpotent_subalgebra",
    "is_perfect",
    "is_solvable",
    "is_isomorphism_on",
    "match_summands",
    "nilradical_codim_check",
    "of_algebra",
    "of_basis",
    "of_dimension",
    "random_basis_change",
    "same_subspace",
    "transport",
    "verdict_to_json",
    "verify_split",
]

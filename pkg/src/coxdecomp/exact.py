"""Exact arithmetic in cyclotomic fields and exact signatures of symmetric matrices.

A :class:`CycloNumber` is an element of ``Q(zeta_L)`` stored as the residue of a
rational polynomial in ``zeta_L`` modulo the cyclotomic polynomial ``Phi_L``.
Signs are decided by a symbolic zero test followed by interval evaluation at
``zeta_L = exp(2*pi*i/L)`` with doubling precision, so no tolerance appears
anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from mpmath.ctx_iv import MPIntervalContext

from .errors import BudgetExceeded, ValidationError

DEFAULT_PRECISION_BITS = 16384
_START_PRECISION_BITS = 64

NEGATIVE, ZERO, POSITIVE = -1, 0, 1


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divmod_monic(num: list[int], den: Sequence[int]) -> tuple[list[int], list[int]]:
    # integer polynomial division by a monic divisor, lowest degree first
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    rem = num[:dd] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.

    Obtained from ``x**n - 1`` by dividing out ``Phi_d`` for every proper divisor d.
    """
    if n < 1:
        raise ValidationError("cyclotomic index must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _divmod_monic(poly, cyclotomic_poly(d))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_residues(conductor: int) -> tuple[tuple[int, ...], ...]:
    """Reduced coefficient vectors of zeta**j for j in range(conductor)."""
    phi = cyclotomic_poly(conductor)
    d = len(phi) - 1
    rows = []
    cur = [1] + [0] * (d - 1)
    for _ in range(conductor):
        rows.append(tuple(cur))
        # multiply by x, then fold x**d = -sum(phi[i] x**i)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(rows)


def _poly_trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    if len(a) < len(b):
        return [Fraction(0)], a
    quot = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        quot[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    rem = _poly_trim(a[: len(b) - 1] or [Fraction(0)])
    return quot, rem


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


class CycloNumber:
    """An exact element of the cyclotomic field ``Q(zeta_L)``.

    ``coeffs[k]`` is the rational coefficient of ``zeta_L**k``; the vector has
    length ``phi(L)`` and is the canonical residue modulo ``Phi_L``. Instances
    are immutable.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Iterable = ()):
        if conductor < 1:
            raise ValidationError("conductor must be positive")
        vec = _reduce_exponents(conductor, {k: Fraction(c) for k, c in enumerate(coeffs) if c})
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", vec)

    def __setattr__(self, name, value):
        raise AttributeError("CycloNumber is immutable")

    @classmethod
    def _raw(cls, conductor: int, coeffs: tuple[Fraction, ...]) -> "CycloNumber":
        obj = object.__new__(cls)
        object.__setattr__(obj, "conductor", conductor)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @classmethod
    def rational(cls, value, conductor: int = 2) -> "CycloNumber":
        d = euler_phi(conductor)
        return cls._raw(conductor, (Fraction(value),) + (Fraction(0),) * (d - 1))

    @classmethod
    def zeta(cls, conductor: int, power: int = 1) -> "CycloNumber":
        return cls._raw(conductor, _reduce_exponents(conductor, {power % conductor: Fraction(1)}))

    # -- conductor handling -------------------------------------------------

    def lift(self, conductor: int) -> "CycloNumber":
        """Re-express this value in ``Q(zeta_conductor)``; conductor must be a multiple."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ValidationError(
                f"cannot lift conductor {self.conductor} to {conductor}: not a multiple"
            )
        step = conductor // self.conductor
        terms = {k * step: c for k, c in enumerate(self.coeffs) if c}
        return CycloNumber._raw(conductor, _reduce_exponents(conductor, terms))

    def _unify(self, other) -> tuple["CycloNumber", "CycloNumber"]:
        if not isinstance(other, CycloNumber):
            other = CycloNumber.rational(other, self.conductor)
        if other.conductor == self.conductor:
            return self, other
        lcm = math.lcm(self.conductor, other.conductor)
        return self.lift(lcm), other.lift(lcm)

    # -- field operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, (CycloNumber, int, Fraction)):
            return NotImplemented
        a, b = self._unify(other)
        return CycloNumber._raw(a.conductor, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber._raw(self.conductor, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, (CycloNumber, int, Fraction)):
            return NotImplemented
        a, b = self._unify(other)
        return CycloNumber._raw(a.conductor, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloNumber._raw(self.conductor, tuple(x * other for x in self.coeffs))
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._unify(other)
        terms: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        terms[i + j] = terms.get(i + j, 0) + x * y
        return CycloNumber._raw(a.conductor, _reduce_exponents(a.conductor, terms))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        """Multiplicative inverse via the extended Euclidean algorithm modulo Phi_L."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero CycloNumber")
        modulus = [Fraction(c) for c in cyclotomic_poly(self.conductor)]
        r0, r1 = modulus, _poly_trim(list(self.coeffs))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r0 is a nonzero constant because Phi_L is irreducible
        inv_const = 1 / r0[0]
        terms = {k: c * inv_const for k, c in enumerate(s0) if c}
        return CycloNumber._raw(self.conductor, _reduce_exponents(self.conductor, terms))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNumber.rational(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "CycloNumber":
        """Image under zeta -> zeta**-1 (complex conjugation)."""
        L = self.conductor
        terms = {(-k) % L: c for k, c in enumerate(self.coeffs) if c}
        return CycloNumber._raw(L, _reduce_exponents(L, terms))

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._unify(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # equal values may live in different conductors; only the rational
        # part has a conductor-free canonical form
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash("CycloNumber")

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CycloNumber(L={self.conductor}: {' + '.join(terms) or '0'})"

    # -- embedding ----------------------------------------------------------

    def interval(self, precision_bits: int):
        """Certified enclosure of the real part at ``zeta = exp(2*pi*i/L)``.

        Returns ``(lo, hi)`` as mpmath interval endpoints evaluated in a
        private interval context, so no global precision is touched.
        """
        ctx = MPIntervalContext()
        ctx.prec = precision_bits
        total = ctx.mpf(0)
        L = self.conductor
        for k, c in enumerate(self.coeffs):
            if c:
                coef = ctx.mpf(c.numerator) / c.denominator
                if k == 0:
                    total += coef
                else:
                    total += coef * ctx.cos(2 * ctx.pi * k / L)
        return total

    def approx(self) -> float:
        iv = self.interval(80)
        return (float(iv.a) + float(iv.b)) / 2

    def preview(self, digits: int = 15) -> tuple[str, str]:
        """Decimal preview and a certified bound on its error, both as strings."""
        bits = max(64, int(digits * 3.33) + 32)
        iv = self.interval(bits)
        ctx = MPIntervalContext()
        ctx.prec = bits
        mid = (iv.a + iv.b) / 2
        err = (iv.b - iv.a) / 2
        mid_s = ctx.nstr(mid, digits)
        # the printed midpoint is rounded: add half a unit in its last digit
        err_bound = float(err.b) + 10.0 ** (-digits) * max(1.0, abs(float(mid.a)))
        return mid_s.strip("[]").split(",")[0].strip(), f"{err_bound:.3e}"

    def sign(self, budget_bits: int = DEFAULT_PRECISION_BITS) -> int:
        return sign(self, budget_bits)


def _reduce_exponents(conductor: int, terms: dict[int, Fraction]) -> tuple[Fraction, ...]:
    table = _power_residues(conductor)
    d = len(table[0])
    out = [Fraction(0)] * d
    for k, c in terms.items():
        if not c:
            continue
        row = table[k % conductor]
        for i, v in enumerate(row):
            if v:
                out[i] += c * v
    return tuple(out)


def sign(x: CycloNumber, budget_bits: int = DEFAULT_PRECISION_BITS) -> int:
    """Exact sign of a real cyclotomic number: -1, 0 or +1.

    Zero is decided symbolically. Otherwise the value is enclosed in intervals
    of doubling precision until the enclosure excludes zero; for a nonzero
    value this always terminates, but a finite ``budget_bits`` may run out.
    """
    if x.is_zero():
        return ZERO
    if not x.is_real():
        raise ValidationError("sign() requires a real cyclotomic number")
    if x.is_rational():
        return POSITIVE if x.coeffs[0] > 0 else NEGATIVE
    bits = _START_PRECISION_BITS
    while bits <= budget_bits:
        iv = x.interval(bits)
        if iv.a > 0:
            return POSITIVE
        if iv.b < 0:
            return NEGATIVE
        bits *= 2
    raise BudgetExceeded(
        f"sign undecided within {budget_bits} bits of precision", {"bits": budget_bits}
    )


INF = math.inf


def cyclo_cos_pi_over(m, conductor: int) -> CycloNumber:
    """``cos(pi/m)`` as an element of ``Q(zeta_conductor)``; ``m = INF`` gives 1."""
    if m == INF:
        return CycloNumber.rational(1, conductor)
    if int(m) != m or m < 2:
        raise ValidationError(f"label must be an integer >= 2 or infinity, got {m!r}")
    m = int(m)
    if conductor % (2 * m):
        raise ValidationError(
            f"conductor mismatch: {conductor} is not a multiple of 2*{m}"
        )
    k = conductor // (2 * m)
    two_cos = CycloNumber.zeta(conductor, k) + CycloNumber.zeta(conductor, -k)
    return two_cos * Fraction(1, 2)


@dataclass(frozen=True)
class Signature:
    """Inertia triple (p, q, r): positive, negative and kernel dimensions."""

    p: int
    q: int
    r: int

    @property
    def n(self) -> int:
        return self.p + self.q + self.r

    def as_list(self) -> list[int]:
        return [self.p, self.q, self.r]


def _as_cyclo(v, conductor: int) -> CycloNumber:
    return v if isinstance(v, CycloNumber) else CycloNumber.rational(v, conductor)


class SymMatrix:
    """Symmetric matrix with CycloNumber entries, all in one conductor."""

    __slots__ = ("entries", "conductor")

    def __init__(self, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValidationError("matrix must be square")
        conductor = 1
        for r in rows:
            for v in r:
                if isinstance(v, CycloNumber):
                    conductor = math.lcm(conductor, v.conductor)
        conductor = max(conductor, 2) if conductor > 1 else 2
        entries = tuple(
            tuple(_as_cyclo(v, conductor).lift(conductor) if isinstance(v, CycloNumber)
                  else CycloNumber.rational(v, conductor) for v in r)
            for r in rows
        )
        for i in range(n):
            for j in range(i + 1, n):
                if entries[i][j] != entries[j][i]:
                    raise ValidationError(f"matrix not symmetric at ({i},{j})")
        self.entries = entries
        self.conductor = conductor

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and self.entries == other.entries

    def __neg__(self):
        return SymMatrix([[-v for v in row] for row in self.entries])

    def congruent(self, A: Sequence[Sequence]) -> "SymMatrix":
        """Return ``A^T M A`` for a square matrix A of rationals or CycloNumbers."""
        n = self.n
        L = self.conductor
        A = [[_as_cyclo(v, L) for v in row] for row in A]
        MA = [[sum((self.entries[i][k] * A[k][j] for k in range(n)), CycloNumber.rational(0, L))
               for j in range(n)] for i in range(n)]
        return SymMatrix([[sum((A[k][i] * MA[k][j] for k in range(n)), CycloNumber.rational(0, L))
                           for j in range(n)] for i in range(n)])

    def rows(self) -> list[list[CycloNumber]]:
        return [list(r) for r in self.entries]


def signature(M: SymMatrix | Sequence[Sequence], budget_bits: int = DEFAULT_PRECISION_BITS) -> Signature:
    """Signature of a symmetric matrix by congruence (Lagrange) elimination.

    A nonzero diagonal pivot contributes its sign; if the whole diagonal is
    zero but some off-diagonal entry b is not, the 2x2 block [[0,b],[b,0]] is
    eliminated as one hyperbolic (+1, -1) pair; an all-zero remainder is the
    kernel.
    """
    if not isinstance(M, SymMatrix):
        M = SymMatrix(M)
    A = M.rows()
    p = q = 0
    while A:
        n = len(A)
        piv = next((i for i in range(n) if not A[i][i].is_zero()), None)
        if piv is not None:
            a = A[piv][piv]
            if sign(a, budget_bits) > 0:
                p += 1
            else:
                q += 1
            inv_a = a.inverse()
            rest = [i for i in range(n) if i != piv]
            A = [[A[i][j] - A[i][piv] * A[piv][j] * inv_a for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if not A[i][j].is_zero()), None)
        if pair is None:
            break
        i0, j0 = pair
        inv_b = A[i0][j0].inverse()
        rest = [i for i in range(n) if i not in pair]
        A = [[A[i][j] - (A[i][i0] * A[j0][j] + A[i][j0] * A[i0][j]) * inv_b for j in rest]
             for i in rest]
        p += 1
        q += 1
    return Signature(p, q, M.n - p - q)


def rank(M: SymMatrix | Sequence[Sequence]) -> int:
    """Rank by ordinary Gaussian elimination (independent of :func:`signature`)."""
    rows = M.rows() if isinstance(M, SymMatrix) else [list(r) for r in M]
    if not rows:
        return 0
    L = math.lcm(2, *(v.conductor for r in rows for v in r if isinstance(v, CycloNumber)))
    rows = [[_as_cyclo(v, L).lift(L) if isinstance(v, CycloNumber) else CycloNumber.rational(v, L)
             for v in r] for r in rows]
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        for i in range(r + 1, len(rows)):
            if not rows[i][c].is_zero():
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def cyclo_to_json(x: CycloNumber) -> dict:
    approx, err = x.preview()
    return {
        "conductor": x.conductor,
        "coeffs": [f"{c.numerator}/{c.denominator}" for c in x.coeffs],
        "approx": approx,
        "error": err,
    }


def cyclo_from_json(obj: dict) -> CycloNumber:
    return CycloNumber(int(obj["conductor"]), [Fraction(c) for c in obj["coeffs"]])

"""Cyclic group rings, cyclotomic fields and their norms.

Two carriers are provided:

* :class:`GroupRingElem` -- elements of Z[u]/(u^p - 1) ("full" mode) or of
  Z[u]/(1 + u + ... + u^(p-1)) ("reduced" mode).
* :class:`CycNum` -- elements of Q(zeta_d) stored as a pair of integer vectors
  over the power basis 1, zeta, ..., zeta^(phi(d)-1), reduced modulo the d-th
  cyclotomic polynomial.

All arithmetic is exact.  Norms are computed by a multi-modular evaluation at
the roots of Phi_d modulo primes p = 1 (mod d) followed by CRT.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

from .laurent import LaurentPoly, exact_div

__all__ = [
    "BadDivisor",
    "cyclotomic_poly",
    "phi_coeffs",
    "euler_phi",
    "units_mod",
    "GroupRingElem",
    "CycNum",
    "project_psi",
    "d_norm",
    "associate_eq",
    "AssociateClass",
    "canonical_rep",
    "real_linear_norm",
]

FULL = "full"
REDUCED = "reduced"


class BadDivisor(ValueError):
    """Raised when a requested character order does not divide the group order."""


# -- elementary number theory --------------------------------------------------


def divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def euler_phi(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def units_mod(n: int) -> list[int]:
    """Representatives 1..n-1 coprime to n (for n = 1, 2: the residue 1)."""
    if n <= 2:
        return [1]
    return [a for a in range(1, n) if gcd(a, n) == 1]


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power_base(n: int) -> int | None:
    """Return l when n = l^k with l prime and k >= 1, else None."""
    ps = prime_factors(n)
    return ps[0] if len(ps) == 1 else None


def inverse_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- cyclotomic polynomials ----------------------------------------------------


@lru_cache(maxsize=None)
def _cyclotomic(d: int) -> LaurentPoly:
    u = LaurentPoly.var(0, 1)
    num = u**d - 1
    den = LaurentPoly.one(1)
    for e in divisors(d)[:-1]:
        den = den * _cyclotomic(e)
    return exact_div(num, den)


def cyclotomic_poly(d: int) -> LaurentPoly:
    """The d-th cyclotomic polynomial as a one-variable LaurentPoly."""
    if d < 1:
        raise ValueError("d must be positive")
    return _cyclotomic(d)


@lru_cache(maxsize=None)
def phi_coeffs(d: int) -> tuple[int, ...]:
    """Dense coefficients of Phi_d, constant term first."""
    lo, coeffs = cyclotomic_poly(d).coeff_list()
    assert lo == 0
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _power_table(d: int) -> tuple[tuple[int, ...], ...]:
    """Reductions of u^k modulo Phi_d for 0 <= k < max(d, 2*phi(d) - 1)."""
    phi = phi_coeffs(d)
    n = len(phi) - 1
    rows = []
    cur = [0] * n
    cur[0] = 1
    for _ in range(max(d, 2 * n - 1)):
        rows.append(tuple(cur))
        # multiply by u and reduce the overflow with the monic Phi_d
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(n):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _reduce_dense(d: int, coeffs) -> tuple[int, ...]:
    """Reduce a dense vector (indices are exponents, arbitrary length) mod Phi_d."""
    table = _power_table(d)
    n = len(table[0])
    out = [0] * n
    for k, c in enumerate(coeffs):
        if c:
            row = table[k % d] if k >= len(table) else table[k]
            for i in range(n):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


def _reduce_exponents(d: int, terms) -> tuple[int, ...]:
    """Reduce {exponent: coeff} (negative exponents allowed) into Z[zeta_d]."""
    table = _power_table(d)
    n = len(table[0])
    out = [0] * n
    for e, c in terms:
        if c:
            row = table[e % d]
            for i in range(n):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


def _mul_vec(d: int, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    n = len(a)
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    return _reduce_dense(d, prod)


def _times_zeta(d: int, a: tuple[int, ...]) -> tuple[int, ...]:
    phi = phi_coeffs(d)
    top = a[-1]
    out = [0] + list(a[:-1])
    if top:
        for i in range(len(out)):
            out[i] -= top * phi[i]
    return tuple(out)


# -- multi-modular norms -------------------------------------------------------


_PRIME_CACHE: dict[int, list[tuple[int, tuple[int, ...]]]] = {}


def _norm_primes(d: int, count: int) -> list[tuple[int, tuple[int, ...]]]:
    """``count`` primes l = 1 (mod d) near 2^61, each with the powers r^0..r^(d-1)
    of a primitive d-th root of unity r mod l."""
    out = _PRIME_CACHE.setdefault(d, [])
    k = ((1 << 61) // d) if not out else (out[-1][0] - 1) // d
    qs = prime_factors(d)
    while len(out) < count:
        k += 1
        ell = k * d + 1
        if not _is_probable_prime(ell):
            continue
        # find an element of exact order d
        for g in range(2, 200):
            r = pow(g, (ell - 1) // d, ell)
            if all(pow(r, d // q, ell) != 1 for q in qs):
                break
        else:  # pragma: no cover - practically unreachable
            continue
        powers = [1] * d
        for i in range(1, d):
            powers[i] = powers[i - 1] * r % ell
        out.append((ell, tuple(powers)))
    return out[:count]


def _norm_int(d: int, vec: tuple[int, ...]) -> int:
    """Exact norm from Q(zeta_d) to Q of an element of Z[zeta_d]."""
    if not any(vec):
        return 0
    if len(vec) == 1:
        return vec[0] ** 1 if d <= 2 else vec[0] ** euler_phi(d)
    l1 = sum(abs(c) for c in vec)
    bound = l1 ** len(vec)
    # symmetric residues need modulus > 2 * bound
    count = (bound.bit_length() + 2) // 60 + 1
    primes = _norm_primes(d, count)
    support = [(i, c) for i, c in enumerate(vec) if c]
    units = units_mod(d) if d > 2 else [1]
    residues = []
    modulus = 1
    for ell, powers in primes:
        acc = 1
        for a in units:
            v = sum(c * powers[a * i % d] for i, c in support) % ell
            acc = acc * v % ell
        residues.append((ell, acc))
        modulus *= ell
    x = 0
    for ell, res in residues:
        m = modulus // ell
        x = (x + res * m * pow(m, -1, ell)) % modulus
    if x > modulus // 2:
        x -= modulus
    return x


# -- group ring ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupRingElem:
    """Element of Z[u]/(u^p - 1) or of Z[u]/(1 + u + ... + u^(p-1)).

    ``coeffs`` has length p in full mode.  In reduced mode it is the
    canonical remainder of degree < p - 1 (length p - 1).
    """

    order: int
    mode: str
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("group order must be at least 2")
        if self.mode not in (FULL, REDUCED):
            raise ValueError(f"unknown mode {self.mode!r}")
        want = self.order if self.mode == FULL else self.order - 1
        if len(self.coeffs) != want:
            raise ValueError(f"{self.mode} mode needs {want} coefficients")

    @classmethod
    def from_terms(cls, order: int, terms, mode: str = REDUCED) -> GroupRingElem:
        """Build from (exponent, coeff) pairs; exponents are taken mod ``order``."""
        vec = [0] * order
        for e, c in terms:
            vec[e % order] += c
        return cls._from_full_vector(order, vec, mode)

    @classmethod
    def from_coeffs(cls, order: int, coeffs, mode: str = REDUCED) -> GroupRingElem:
        return cls.from_terms(order, enumerate(coeffs), mode)

    @classmethod
    def from_laurent(cls, P: LaurentPoly, order: int, mode: str = REDUCED) -> GroupRingElem:
        if P.nvars != 1:
            raise ValueError("need a one-variable polynomial")
        return cls.from_terms(order, ((m[0], c) for m, c in P.items()), mode)

    @classmethod
    def _from_full_vector(cls, order: int, vec, mode: str) -> GroupRingElem:
        if mode == FULL:
            return cls(order, FULL, tuple(vec))
        top = vec[order - 1]
        return cls(order, REDUCED, tuple(v - top for v in vec[: order - 1]))

    @classmethod
    def unit(cls, order: int, l: int = 0, sign: int = 1, mode: str = REDUCED) -> GroupRingElem:
        return cls.from_terms(order, [(l, sign)], mode)

    def full_vector(self) -> list[int]:
        if self.mode == FULL:
            return list(self.coeffs)
        return list(self.coeffs) + [0]

    def reduce(self) -> GroupRingElem:
        """Image in the reduced quotient ring."""
        return self._from_full_vector(self.order, self.full_vector(), REDUCED)

    def _same(self, other: GroupRingElem) -> None:
        if not isinstance(other, GroupRingElem) or (other.order, other.mode) != (self.order, self.mode):
            raise ValueError("ring elements live in different rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = GroupRingElem.unit(self.order, 0, other, self.mode)
        self._same(other)
        return GroupRingElem(self.order, self.mode, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElem(self.order, self.mode, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElem(self.order, self.mode, tuple(other * a for a in self.coeffs))
        self._same(other)
        p = self.order
        a, b = self.full_vector(), other.full_vector()
        out = [0] * p
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % p] += x * y
        return self._from_full_vector(p, out, self.mode)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = GroupRingElem.unit(self.order, 0, 1, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def rotate(self, l: int, sign: int = 1) -> GroupRingElem:
        """sign * u^l * self."""
        p = self.order
        vec = self.full_vector()
        out = [0] * p
        for i, c in enumerate(vec):
            out[(i + l) % p] = sign * c
        return self._from_full_vector(p, out, self.mode)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> dict:
        return {"p": self.order, "mode": self.mode, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> GroupRingElem:
        mode = data.get("mode", REDUCED)
        return cls.from_coeffs(int(data["p"]), [int(c) for c in data["coeffs"]], mode)


# -- cyclotomic numbers --------------------------------------------------------


class CycNum:
    """Exact element num/den of Q(zeta_d)."""

    __slots__ = ("order", "num", "den")

    def __init__(self, order: int, num, den=None):
        if order < 1:
            raise ValueError("order must be positive")
        n = len(phi_coeffs(order)) - 1
        num = tuple(num)
        den = tuple(den) if den is not None else (1,) + (0,) * (n - 1)
        if len(num) != n or len(den) != n:
            raise ValueError(f"Q(zeta_{order}) vectors have length {n}")
        if not any(den):
            raise ZeroDivisionError("zero denominator")
        self.order = order
        self.num = num
        self.den = den

    # constructors

    @classmethod
    def from_int(cls, d: int, c: int) -> CycNum:
        return cls(d, _reduce_exponents(d, [(0, c)]))

    @classmethod
    def zeta(cls, d: int, k: int = 1) -> CycNum:
        return cls(d, _reduce_exponents(d, [(k, 1)]))

    @classmethod
    def from_terms(cls, d: int, terms) -> CycNum:
        """sum c * zeta^e over (e, c) pairs; negative exponents allowed."""
        return cls(d, _reduce_exponents(d, terms))

    @classmethod
    def from_laurent(cls, d: int, P: LaurentPoly) -> CycNum:
        if P.nvars != 1:
            raise ValueError("need a one-variable polynomial")
        return cls.from_terms(d, ((m[0], c) for m, c in P.items()))

    @classmethod
    def zeta_minus_one(cls, d: int, k: int = 1) -> CycNum:
        return cls.from_terms(d, [(k, 1), (0, -1)])

    # arithmetic

    def _same(self, other: CycNum) -> None:
        if other.order != self.order:
            raise ValueError("elements of different cyclotomic fields")

    def _lift(self, other) -> CycNum:
        if isinstance(other, CycNum):
            self._same(other)
            return other
        if isinstance(other, int):
            return CycNum.from_int(self.order, other)
        if isinstance(other, Fraction):
            return CycNum.from_int(self.order, other.numerator) / other.denominator
        return NotImplemented

    def _mul(self, a, b):
        return _mul_vec(self.order, a, b)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CycNum(self.order, tuple(x + y for x, y in zip(self.num, other.num)), self.den)
        num = tuple(
            x + y for x, y in zip(self._mul(self.num, other.den), self._mul(other.num, self.den))
        )
        return CycNum(self.order, num, self._mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.order, tuple(-x for x in self.num), self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return CycNum(self.order, self._mul(self.num, other.num), self._mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return CycNum(self.order, self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int) -> CycNum:
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.from_int(self.order, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def times_zeta(self, l: int = 1) -> CycNum:
        num = self.num
        for _ in range(l % self.order):
            num = _times_zeta(self.order, num)
        return CycNum(self.order, num, self.den)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CycNum.from_int(self.order, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        if other.order != self.order:
            return False
        return self._mul(self.num, other.den) == self._mul(other.num, self.den)

    def __hash__(self):
        # equal values may have different num/den pairs; hash the canonical form
        num, den = self.integral_form()
        return hash((self.order, num, den))

    def conjugate(self, a: int) -> CycNum:
        """Galois conjugate zeta -> zeta^a (a coprime to the order)."""
        d = self.order
        if gcd(a, d) != 1:
            raise ValueError(f"{a} is not a unit mod {d}")
        return CycNum(
            d,
            _reduce_exponents(d, ((a * i, c) for i, c in enumerate(self.num))),
            _reduce_exponents(d, ((a * i, c) for i, c in enumerate(self.den))),
        )

    def integral_form(self) -> tuple[tuple[int, ...], int]:
        """(vector, positive integer) with self = vector / integer, in lowest terms."""
        d = self.order
        vec = self.num
        if not any(self.den[1:]):
            n = self.den[0]
        else:
            others = [CycNum(d, self.den).conjugate(a).num for a in units_mod(d)[1:]] if d > 2 else []
            for o in others:
                vec = self._mul(vec, o)
            n = _norm_int(d, self.den)
        g = gcd(n, *vec) if any(vec) else abs(n)
        vec = tuple(v // g for v in vec)
        n //= g
        if n < 0:
            vec, n = tuple(-v for v in vec), -n
        return vec, n

    def norm(self) -> Fraction:
        return d_norm(self)

    def to_complex(self, k: int = 1) -> complex:
        """Numerical value at zeta = exp(2 pi i k / d); diagnostic use only."""
        import cmath

        z = cmath.exp(2j * cmath.pi * k / self.order)
        num = sum(c * z**i for i, c in enumerate(self.num))
        den = sum(c * z**i for i, c in enumerate(self.den))
        return num / den

    def to_json(self) -> dict:
        return {"d": self.order, "num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_json(cls, data: dict) -> CycNum:
        return cls(int(data["d"]), [int(c) for c in data["num"]], [int(c) for c in data["den"]])

    def __repr__(self) -> str:
        return f"CycNum({self.order}, num={list(self.num)}, den={list(self.den)})"


Elem = Union[GroupRingElem, CycNum]


def project_psi(x: GroupRingElem, d: int) -> CycNum:
    """Ring homomorphism u -> zeta_d from the cyclic group ring of order p."""
    p = x.order
    if d < 2 or p % d:
        raise BadDivisor(f"{d} is not a divisor >= 2 of {p}")
    return CycNum.from_terms(d, enumerate(x.full_vector()))


def d_norm(x: CycNum) -> Fraction:
    """Product of all Galois conjugates of x, as an exact rational."""
    if x.is_zero():
        return Fraction(0)
    return Fraction(_norm_int(x.order, x.num), _norm_int(x.order, x.den))


def norm_by_conjugates(x: CycNum) -> Fraction:
    """Slow reference norm: literally multiply the conjugates together."""
    d = x.order
    prod = CycNum.from_int(d, 1)
    for a in units_mod(d):
        prod = prod * x.conjugate(a)
    num, den = prod.integral_form()
    if any(num[1:]):
        raise ArithmeticError("conjugate product is not rational")
    return Fraction(num[0], den)


@lru_cache(maxsize=None)
def real_min_poly(d: int) -> tuple[int, ...]:
    """Coefficients (constant first) of the minimal polynomial of zeta_d + zeta_d^-1, d >= 3."""
    if d < 3:
        raise ValueError("needs d >= 3")
    phi = list(phi_coeffs(d))
    m = (len(phi) - 1) // 2
    # centred palindromic coefficients c_{-m..m}; peel off (u + 1/u)^k from the top
    cur = {k - m: c for k, c in enumerate(phi) if c}
    out = [0] * (m + 1)
    from math import comb

    for k in range(m, -1, -1):
        a = cur.get(k, 0)
        out[k] = a
        if a:
            for j in range(k + 1):
                e = k - 2 * j
                cur[e] = cur.get(e, 0) - a * comb(k, j)
    return tuple(out)


def real_linear_norm(d: int, A: int, B: int) -> int:
    """Exact N_{Q(zeta_d)/Q}(A*(zeta_d + zeta_d^-1) + B)."""
    if d <= 2:
        w = 2 if d == 1 else -2
        return A * w + B
    psi = real_min_poly(d)
    m = len(psi) - 1
    # prod_j (A w_j + B) = sum_i psi_i (-1)^(m+i) A^(m-i) B^i
    half = sum(c * (-1) ** (m + i) * A ** (m - i) * B**i for i, c in enumerate(psi))
    return half * half


# -- associates ----------------------------------------------------------------


def _group_assoc(x: GroupRingElem, y: GroupRingElem):
    if (x.order, x.mode) != (y.order, y.mode):
        raise ValueError("elements live in different rings")
    if x.is_zero() or y.is_zero():
        return (x.is_zero() and y.is_zero()), ((1, 0) if x.is_zero() and y.is_zero() else None)
    for sign in (1, -1):
        for l in range(x.order):
            if y.rotate(l, sign) == x:
                return True, (sign, l)
    return False, None


def _cyc_assoc(x: CycNum, y: CycNum):
    if x.order != y.order:
        raise ValueError("elements of different cyclotomic fields")
    if x.is_zero() or y.is_zero():
        return (x.is_zero() and y.is_zero()), ((1, 0) if x.is_zero() and y.is_zero() else None)
    d = x.order
    lhs = _mul_vec(d, x.num, y.den)
    rhs = _mul_vec(d, y.num, x.den)
    neg = tuple(-c for c in lhs)
    period = d if d > 1 else 1
    cur = rhs
    for l in range(period):
        if cur == lhs:
            return True, (1, l)
        cur = _times_zeta(d, cur)
    cur = rhs
    for l in range(period):
        if cur == neg:
            return True, (-1, l)
        cur = _times_zeta(d, cur)
    return False, None


def associate_eq(x: Elem, y: Elem) -> tuple[bool, tuple[int, int] | None]:
    """Decide x = sign * u^l * y (resp. zeta^l); returns (found, (sign, l))."""
    if isinstance(x, GroupRingElem) and isinstance(y, GroupRingElem):
        return _group_assoc(x, y)
    if isinstance(x, CycNum) and isinstance(y, CycNum):
        return _cyc_assoc(x, y)
    raise TypeError("associate_eq needs two elements of the same kind")


@dataclass(frozen=True)
class AssociateClass:
    """Class of an element under multiplication by +-(group element)."""

    element: Elem

    def __contains__(self, other: Elem) -> bool:
        return associate_eq(self.element, other)[0]

    def representative(self) -> Elem:
        return canonical_rep(self)


def _rep_key(vec):
    # smallest l1 norm first (so units map to 1 in either mode), then lex greatest
    return (-sum(abs(c) for c in vec), tuple(vec))


def canonical_rep(c: AssociateClass | Elem) -> Elem:
    """Deterministic representative of an associate class.

    Among the 2p associates pick the smallest coefficient l1 norm, then the
    lexicographically greatest vector; every unit maps to 1.  For CycNum the
    value is first written as integral vector / positive integer.
    """
    x = c.element if isinstance(c, AssociateClass) else c
    if isinstance(x, GroupRingElem):
        if x.is_zero():
            return x
        cands = [x.rotate(l, s) for s in (1, -1) for l in range(x.order)]
        return max(cands, key=lambda g: _rep_key(g.coeffs))
    if x.is_zero():
        return CycNum(x.order, x.num)
    vec, n = x.integral_form()
    d = x.order
    best = None
    base = vec
    for s in (1, -1):
        cur = tuple(s * v for v in base)
        for _ in range(d):
            if best is None or _rep_key(cur) > _rep_key(best):
                best = cur
            cur = _times_zeta(d, cur)
    return CycNum(d, best, CycNum.from_int(d, n).num)


def parse_coeff_list(text: str) -> list[int]:
    """Parse ``[c0,c1,...]`` or ``c0,c1,...``."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    if not body.strip():
        return []
    return [int(tok) for tok in body.split(",")]

"""Sparse multivariate Laurent polynomials with integer coefficients.

Polynomials are immutable.  Terms are stored as a mapping from exponent
tuples (one entry per variable, negative entries allowed) to nonzero ints and
are kept in ascending lexicographic order of the exponent tuples, which makes
printing and hashing deterministic.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "NotDivisible",
    "NotSymmetric",
    "specialize",
    "set_to_one",
    "substitute",
    "exact_div",
    "torres_specialize",
    "duality_normalize",
    "duality_form",
    "parse_poly",
    "format_poly",
    "default_names",
]


class NotDivisible(ArithmeticError):
    """Raised when an exact quotient does not exist."""


class NotSymmetric(ValueError):
    """Raised when no unit multiple of a polynomial satisfies duality."""


Monomial = tuple[int, ...]


class LaurentPoly:
    __slots__ = ("_nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]] = ()):
        if nvars < 0:
            raise ValueError("variable count must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, int] = {}
        for mono, coeff in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} exponents")
            acc[mono] = acc.get(mono, 0) + int(coeff)
        self._nvars = nvars
        self._terms = {m: acc[m] for m in sorted(acc) if acc[m] != 0}
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, c: int) -> LaurentPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> LaurentPoly:
        return cls(nvars)

    @classmethod
    def one(cls, nvars: int) -> LaurentPoly:
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> LaurentPoly:
        return cls(len(exponents), {tuple(exponents): coeff})

    @classmethod
    def var(cls, i: int, nvars: int, power: int = 1) -> LaurentPoly:
        exps = [0] * nvars
        exps[i] = power
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], shift: int = 0) -> LaurentPoly:
        """One-variable polynomial sum(coeffs[i] * t^(i+shift))."""
        return cls(1, {(i + shift,): c for i, c in enumerate(coeffs) if c})

    # -- basic accessors ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coeff(self, mono: Sequence[int]) -> int:
        return self._terms.get(tuple(mono), 0)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self._nvars, 0)

    def leading(self) -> tuple[Monomial, int]:
        """Lexicographically largest term."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        m = next(reversed(self._terms))
        return m, self._terms[m]

    def trailing(self) -> tuple[Monomial, int]:
        """Lexicographically smallest term."""
        if not self._terms:
            raise ValueError("zero polynomial has no trailing term")
        m = next(iter(self._terms))
        return m, self._terms[m]

    def min_degrees(self) -> Monomial:
        return tuple(min(m[i] for m in self._terms) for i in range(self._nvars))

    def max_degrees(self) -> Monomial:
        return tuple(max(m[i] for m in self._terms) for i in range(self._nvars))

    def coeff_list(self) -> tuple[int, list[int]]:
        """For one variable: (lowest exponent, dense coefficient list)."""
        if self._nvars != 1:
            raise ValueError("coeff_list needs a one-variable polynomial")
        if not self._terms:
            return 0, []
        lo = self.min_degrees()[0]
        hi = self.max_degrees()[0]
        out = [0] * (hi - lo + 1)
        for (e,), c in self._terms.items():
            out[e - lo] = c
        return lo, out

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: LaurentPoly) -> None:
        if other._nvars != self._nvars:
            raise ValueError(f"variable counts differ: {self._nvars} vs {other._nvars}")

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(self._nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return LaurentPoly(self._nvars, acc)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self._nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return LaurentPoly(self._nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) == 1:
                (m, c), = self._terms.items()
                if c in (1, -1):
                    return LaurentPoly(self._nvars, {tuple(-e * -n for e in m): c ** -n})
            raise ValueError("only units can be raised to negative powers")
        result = LaurentPoly.one(self._nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, exponents: Sequence[int]) -> LaurentPoly:
        """Multiply by the monomial with the given exponents."""
        return LaurentPoly(
            self._nvars, {tuple(a + b for a, b in zip(m, exponents)): c for m, c in self._terms.items()}
        )

    def invert_variables(self) -> LaurentPoly:
        """P(t_1^-1, ..., t_n^-1)."""
        return LaurentPoly(self._nvars, {tuple(-e for e in m): c for m, c in self._terms.items()})

    def evaluate(self, values: Sequence) -> object:
        """Evaluate at a point; values may be any ring elements supporting ** with ints."""
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in zip(values, m):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == LaurentPoly.constant(self._nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._nvars == other._nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._nvars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly({self._nvars}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


# -- substitution ------------------------------------------------------------


def substitute(P: LaurentPoly, images: Sequence[Sequence[int]], nvars: int) -> LaurentPoly:
    """Monomial substitution t_i -> prod_j s_j^images[i][j] into ``nvars`` new variables."""
    if len(images) != P.nvars:
        raise ValueError(f"need {P.nvars} images, got {len(images)}")
    acc: dict[Monomial, int] = {}
    for m, c in P.items():
        new = [0] * nvars
        for e, img in zip(m, images):
            if e:
                for j, w in enumerate(img):
                    new[j] += e * w
        key = tuple(new)
        acc[key] = acc.get(key, 0) + c
    return LaurentPoly(nvars, acc)


def specialize(P: LaurentPoly, exponents: Sequence[int]) -> LaurentPoly:
    """Substitute t_i -> u^exponents[i] into a single fresh variable u.

    An exponent of 0 sets the variable to 1.
    """
    return substitute(P, [(e,) for e in exponents], 1)


def set_to_one(P: LaurentPoly, indices: Iterable[int]) -> LaurentPoly:
    """Set the listed variables to 1 and drop them; the rest keep their order."""
    drop = set(indices)
    keep = [i for i in range(P.nvars) if i not in drop]
    acc: dict[Monomial, int] = {}
    for m, c in P.items():
        key = tuple(m[i] for i in keep)
        acc[key] = acc.get(key, 0) + c
    return LaurentPoly(len(keep), acc)


def torres_specialize(delta: LaurentPoly, linking_numbers: Sequence[int] | None = None) -> LaurentPoly:
    """Set the last variable of a (lambda+1)-variable polynomial to 1.

    ``linking_numbers`` is only validated for length; the comparison against
    the sublink polynomial is left to the caller (see :func:`torres_expected`).
    """
    if delta.nvars < 2:
        raise ValueError("need at least two variables")
    if linking_numbers is not None and len(linking_numbers) != delta.nvars - 1:
        raise ValueError("one linking number per remaining variable")
    return set_to_one(delta, [delta.nvars - 1])


def torres_expected(sub_delta: LaurentPoly, linking_numbers: Sequence[int]) -> LaurentPoly:
    """Right-hand side of the Torres formula for a sublink polynomial."""
    n = sub_delta.nvars
    if len(linking_numbers) != n:
        raise ValueError("one linking number per variable")
    if n == 1:
        k = linking_numbers[0]
        t = LaurentPoly.var(0, 1)
        return exact_div(LaurentPoly.var(0, 1, k) - 1, t - 1) * sub_delta
    return (LaurentPoly.monomial(list(linking_numbers)) - 1) * sub_delta


# -- exact division ----------------------------------------------------------


def exact_div(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Return Q with num == Q * den, or raise NotDivisible."""
    if den.nvars != num.nvars:
        raise ValueError("variable counts differ")
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return LaurentPoly.zero(num.nvars)
    n = num.nvars
    # a quotient must live in the box [min(num)-min(den), max(num)-max(den)]
    lo = tuple(a - b for a, b in zip(num.min_degrees(), den.min_degrees()))
    hi = tuple(a - b for a, b in zip(num.max_degrees(), den.max_degrees()))
    if any(l > h for l, h in zip(lo, hi)):
        raise NotDivisible("degree bounds are inconsistent")
    dlead, dc = den.leading()
    dterms = list(den.items())
    rem = dict(num.items())
    quot: dict[Monomial, int] = {}
    while rem:
        m = max(rem)
        c = rem[m]
        if c % dc:
            raise NotDivisible(f"leading coefficient {c} not divisible by {dc}")
        qm = tuple(a - b for a, b in zip(m, dlead))
        if any(e < l or e > h for e, l, h in zip(qm, lo, hi)):
            raise NotDivisible("quotient term leaves the admissible degree box")
        qc = c // dc
        quot[qm] = qc
        for dm, dcoef in dterms:
            key = tuple(a + b for a, b in zip(qm, dm))
            v = rem.get(key, 0) - qc * dcoef
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return LaurentPoly(n, quot)


def divides(den: LaurentPoly, num: LaurentPoly) -> bool:
    try:
        exact_div(num, den)
    except NotDivisible:
        return False
    return True


# -- duality -----------------------------------------------------------------


def duality_form(delta: LaurentPoly) -> tuple[LaurentPoly, int, tuple[int, ...]]:
    """Centre ``delta`` and report how it relates to its inverse.

    Returns (D, sign, odd) where D is ``delta`` times a monomial, ``odd`` marks
    the variables with odd exponent spread and D(t) = sign * t^odd * D(t^-1).
    Raises NotSymmetric if no such relation holds.
    """
    n = delta.nvars
    if delta.is_zero():
        return delta, 1, (0,) * n
    lo = delta.min_degrees()
    hi = delta.max_degrees()
    odd = tuple((h - l) % 2 for l, h in zip(lo, hi))
    # exponents end up in [-(s//2), s - s//2]
    shift = tuple(-(l + (h - l) // 2) for l, h in zip(lo, hi))
    D = delta.shift(shift)
    mirrored = D.invert_variables().shift(odd)
    if mirrored == D:
        return D, 1, odd
    if mirrored == -D:
        return D, -1, odd
    raise NotSymmetric(f"{format_poly(delta)} has no unit multiple satisfying duality")


def duality_normalize(delta: LaurentPoly) -> LaurentPoly:
    """Deterministic duality-centred associate of ``delta``.

    Variables with even exponent spread are centred exactly; odd spreads are
    placed on [-(s//2), s - s//2].  The overall sign makes the lexicographically
    first term positive.
    """
    D, _sign, _odd = duality_form(delta)
    if D.is_zero():
        return D
    if D.trailing()[1] < 0:
        D = -D
    return D


def is_symmetric(delta: LaurentPoly) -> bool:
    """True when delta(t) == delta(t^-1) exactly."""
    return delta.invert_variables() == delta


# -- text form ---------------------------------------------------------------


def default_names(nvars: int) -> list[str]:
    if nvars == 1:
        return ["t"]
    return [f"t{i + 1}" for i in range(nvars)]


def format_poly(P: LaurentPoly, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = default_names(P.nvars)
    if P.is_zero():
        return "0"
    pieces = []
    for m, c in reversed(list(P.items())):
        factors = []
        for name, e in zip(names, m):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        mono = "*".join(factors)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TERM_SPLIT = re.compile(r"(?<![\^(])\s*([+-])\s*")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9']*)(?:\^\(?\s*([+-]?\d+)\s*\)?)?$")


def _name_key(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d*)('*)", name)
    if not m:
        return (name, 0, "")
    return (m.group(1), int(m.group(2)) if m.group(2) else 0, m.group(3))


def parse_poly(text: str, names: Sequence[str] | None = None) -> LaurentPoly:
    """Parse ``2*t1^2*t2^-1 - t3 + 1``-style text.

    Without ``names`` the variables are collected from the text and sorted
    naturally (t1 < t2 < ... < t10).  A bare numeric text gives a constant in
    ``len(names)`` (or zero) variables.
    """
    src = text.strip()
    if not src:
        raise ValueError("empty polynomial text")
    if src[0] not in "+-":
        src = "+" + src
    parts = _TERM_SPLIT.split(src)
    # parts = ['', sign, term, sign, term, ...]
    if parts[0].strip():
        raise ValueError(f"cannot parse polynomial {text!r}")
    raw_terms: list[tuple[int, dict[str, int]]] = []
    seen: list[str] = []
    for sign, body in zip(parts[1::2], parts[2::2]):
        body = body.strip()
        if not body:
            raise ValueError(f"empty term in {text!r}")
        coeff = -1 if sign == "-" else 1
        powers: dict[str, int] = {}
        for factor in body.split("*"):
            factor = factor.strip()
            if re.fullmatch(r"\d+", factor):
                coeff *= int(factor)
                continue
            fm = _FACTOR.match(factor)
            if not fm:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            name = fm.group(1)
            exp = int(fm.group(2)) if fm.group(2) is not None else 1
            powers[name] = powers.get(name, 0) + exp
            if name not in seen:
                seen.append(name)
        raw_terms.append((coeff, powers))
    if names is None:
        names = sorted(seen, key=_name_key)
    index = {n: i for i, n in enumerate(names)}
    for n in seen:
        if n not in index:
            raise ValueError(f"unknown variable {n!r}; expected one of {list(names)}")
    nv = len(names)
    terms = []
    for coeff, powers in raw_terms:
        exps = [0] * nv
        for name, e in powers.items():
            exps[index[name]] += e
        terms.append((tuple(exps), coeff))
    return LaurentPoly(nv, terms)


def random_poly(rng, nvars: int, nterms: int, exp_range=(-5, 5), coeff_range=(-9, 9)) -> LaurentPoly:
    """Random polynomial helper used by tests and benchmarks."""
    terms = []
    for _ in range(nterms):
        mono = tuple(rng.randint(*exp_range) for _ in range(nvars))
        terms.append((mono, rng.randint(*coeff_range)))
    return LaurentPoly(nvars, terms)


def product_of(polys: Iterable[LaurentPoly], nvars: int) -> LaurentPoly:
    out = LaurentPoly.one(nvars)
    for p in polys:
        out = out * p
    return out

"""Link families and their Alexander-polynomial data.

Variable conventions: a lambda-component link uses t1..t_lambda.  The
augmented link (the link plus an extra component K meeting each K_i once)
uses t1..t_lambda followed by t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod

from .laurent import (
    LaurentPoly,
    NotDivisible,
    duality_normalize,
    exact_div,
    format_poly,
    parse_poly,
    set_to_one,
    substitute,
)

__all__ = [
    "BadArity",
    "NotDecomposable",
    "LinkModel",
    "FGParts",
    "milnor_alexander",
    "normalize_fg",
    "assemble_fg",
    "model_augmented_alexander",
    "hatK_alexander",
    "satellite_alexander",
    "per_index_f",
]

MILNOR = "milnor"
WHITEHEAD = "whitehead"
BRUNNIAN_TYPE = "brunnian_type"
SATELLITE2 = "satellite2"
FAMILIES = (MILNOR, WHITEHEAD, BRUNNIAN_TYPE, SATELLITE2)


class BadArity(ValueError):
    """Raised when a family is requested with an unsupported component count."""


class NotDecomposable(ValueError):
    """Raised when an augmented polynomial has no f/g split."""


def _t(i: int, n: int, power: int = 1) -> LaurentPoly:
    return LaurentPoly.var(i, n, power)


def _split_factor(lam: int) -> LaurentPoly:
    """(t1...t_lam - 1) * prod (t_i - 1) in lam variables."""
    all_t = LaurentPoly.monomial([1] * lam)
    out = all_t - 1
    for i in range(lam):
        out = out * (_t(i, lam) - 1)
    return out


# -- link models ---------------------------------------------------------------


@dataclass(frozen=True)
class LinkModel:
    """A link family together with the algebraic data the obstructions use.

    ``f`` is the symmetric part of the Alexander polynomial for the Brunnian
    families (Milnor links included); ``twists`` is n for twisted Whitehead
    links; ``k`` and ``inner`` describe a two-component satellite.
    """

    family: str
    components: int
    f: LaurentPoly | None = None
    twists: int | None = None
    k: int | None = None
    inner: LinkModel | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.components < 2:
            raise BadArity("links need at least two components")
        if self.family == WHITEHEAD:
            if self.components != 2:
                raise BadArity("twisted Whitehead links have two components")
            if not self.twists:
                raise ValueError("twisted Whitehead links need n != 0")
        if self.family == MILNOR and self.components < 3:
            raise BadArity("Milnor links need at least three components")
        if self.family == BRUNNIAN_TYPE:
            if self.f is None or self.f.nvars != self.components:
                raise ValueError("brunnian_type needs f in one variable per component")

    @classmethod
    def milnor(cls, lam: int) -> LinkModel:
        if lam < 3:
            raise BadArity(f"Milnor links need at least three components, got {lam}")
        f = LaurentPoly.one(lam) if lam == 3 else LaurentPoly.zero(lam)
        return cls(MILNOR, lam, f=f)

    @classmethod
    def whitehead(cls, n: int) -> LinkModel:
        return cls(WHITEHEAD, 2, twists=n)

    @classmethod
    def brunnian_type(cls, lam: int, f: LaurentPoly) -> LinkModel:
        return cls(BRUNNIAN_TYPE, lam, f=f)

    @classmethod
    def satellite2(cls, k: int, inner: LinkModel) -> LinkModel:
        return cls(SATELLITE2, inner.components, k=k, inner=inner)

    def symmetric_f(self) -> LaurentPoly:
        """The f-part used by the torsion formulas.

        For the n-twisted Whitehead link this is the constant n.
        """
        if self.family == WHITEHEAD:
            return LaurentPoly.constant(2, self.twists)
        if self.f is None:
            raise ValueError(f"{self.family} has no f-part")
        return self.f

    def f_at(self, k: int) -> LaurentPoly:
        """f_k: f with every variable except the k-th set to 1 (0-based k)."""
        return per_index_f(self.symmetric_f())[k]

    def alexander(self) -> LaurentPoly:
        if self.family == MILNOR:
            return milnor_alexander(self.components)
        if self.family in (BRUNNIAN_TYPE, WHITEHEAD):
            out = self.symmetric_f()
            for i in range(self.components):
                out = out * (_t(i, self.components) - 1)
            return out
        return satellite_alexander(self.k, self.inner.symmetric_f(), self.inner.components)

    def to_json(self) -> dict:
        if self.family == MILNOR:
            return {"family": MILNOR, "components": self.components}
        if self.family == WHITEHEAD:
            return {"family": WHITEHEAD, "twists": self.twists}
        if self.family == BRUNNIAN_TYPE:
            return {"family": BRUNNIAN_TYPE, "components": self.components, "f": format_poly(self.f)}
        return {"family": SATELLITE2, "k": self.k, "inner": self.inner.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> LinkModel:
        fam = data.get("family")
        if fam in (MILNOR, "milnor3"):
            return cls.milnor(int(data.get("components", 3)))
        if fam == WHITEHEAD:
            return cls.whitehead(int(data["twists"]))
        if fam == BRUNNIAN_TYPE:
            lam = int(data["components"])
            names = [f"t{i + 1}" for i in range(lam)]
            return cls.brunnian_type(lam, parse_poly(str(data["f"]), names))
        if fam == SATELLITE2:
            return cls.satellite2(int(data["k"]), cls.from_json(data["inner"]))
        raise ValueError(f"unknown family {fam!r}")

    def describe(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- Milnor links --------------------------------------------------------------


def milnor_alexander(lam: int) -> LaurentPoly:
    """Alexander polynomial of the Milnor link with ``lam`` components."""
    if lam < 3:
        raise BadArity(f"Milnor links need at least three components, got {lam}")
    if lam > 3:
        return LaurentPoly.zero(lam)
    out = LaurentPoly.one(3)
    for i in range(3):
        out = out * (_t(i, 3) - 1)
    return out


# -- f/g decomposition ---------------------------------------------------------


@dataclass(frozen=True)
class FGParts:
    """Split of an augmented polynomial.

    The input equals ``sign * t^shift * (A*f + (t - 1)*g)`` with
    A = (t1...t_lam - 1) prod(t_i - 1), and g(1,...,1,t) = (t-1)^(lam-2).
    """

    lam: int
    f: LaurentPoly
    g: LaurentPoly
    per_index_f: tuple[LaurentPoly, ...]
    sign: int = 1
    shift: int = 0


def per_index_f(f: LaurentPoly) -> tuple[LaurentPoly, ...]:
    n = f.nvars
    return tuple(set_to_one(f, [j for j in range(n) if j != i]) for i in range(n))


def _lift(P: LaurentPoly, extra: int = 1) -> LaurentPoly:
    """Embed P into a ring with ``extra`` further variables."""
    n = P.nvars
    return substitute(P, [[1 if j == i else 0 for j in range(n + extra)] for i in range(n)], n + extra)


def normalize_fg(delta_bar: LaurentPoly, lam: int) -> FGParts:
    if delta_bar.nvars != lam + 1:
        raise ValueError(f"expected {lam + 1} variables, got {delta_bar.nvars}")
    if lam < 2:
        raise BadArity("need at least two link components")
    n = lam + 1
    A = _split_factor(lam)
    t = _t(lam, n)
    try:
        f = exact_div(set_to_one(delta_bar, [lam]), A)
        g = exact_div(delta_bar - _lift(A * f), t - 1)
    except NotDivisible as exc:
        raise NotDecomposable(str(exc)) from exc
    g_line = set_to_one(g, range(lam))
    target = (LaurentPoly.var(0, 1) - 1) ** (lam - 2)
    try:
        unit = exact_div(g_line, target)
    except NotDivisible as exc:
        raise NotDecomposable("g(1,...,1,t) is not a unit times (t-1)^(lam-2)") from exc
    if len(unit) != 1:
        raise NotDecomposable("g(1,...,1,t) is not a unit times (t-1)^(lam-2)")
    (e,), c = unit.leading()
    if abs(c) != 1:
        raise NotDecomposable("g(1,...,1,t) has a non-unit content")
    # delta_bar = c * t^e * normalized
    normalized = delta_bar.shift([0] * lam + [-e]) * c
    f = exact_div(set_to_one(normalized, [lam]), A)
    g = exact_div(normalized - _lift(A * f), t - 1)
    return FGParts(lam, f, g, per_index_f(f), sign=c, shift=e)


def assemble_fg(parts: FGParts) -> LaurentPoly:
    lam = parts.lam
    n = lam + 1
    body = _lift(_split_factor(lam) * parts.f) + (_t(lam, n) - 1) * parts.g
    return body.shift([0] * lam + [parts.shift]) * parts.sign


def model_augmented_alexander(f: LaurentPoly, lam: int, h: LaurentPoly | None = None) -> LaurentPoly:
    """A polynomial with the augmented-link shape of a Brunnian link.

    A*f + (t-1)^(lam-1) * t1...t_lam + (t-1) * prod(t_i - 1) * h.  Each
    K_i is unknotted (its polynomial is t_i) and every f_I vanishes.
    """
    if f.nvars != lam:
        raise ValueError("f must have one variable per component")
    n = lam + 1
    t = _t(lam, n)
    out = _lift(_split_factor(lam) * f)
    out = out + (t - 1) ** (lam - 1) * LaurentPoly.monomial([1] * lam + [0])
    if h is not None:
        if h.nvars != n:
            raise ValueError("h must live in the augmented ring")
        core = LaurentPoly.one(n)
        for i in range(lam):
            core = core * (_t(i, n) - 1)
        out = out + (t - 1) * core * h
    return out


# -- knots produced by surgery ------------------------------------------------


def hatK_alexander(f_i: LaurentPoly, q_others, lam: int) -> LaurentPoly:
    """Alexander polynomial of the knot left after +-1/q surgery on the other components."""
    if lam < 2:
        raise BadArity("need at least two components")
    q_others = list(q_others)
    if len(q_others) != lam - 1:
        raise ValueError(f"need {lam - 1} slopes for the other components")
    if any(q == 0 for q in q_others):
        raise ValueError("q values must be nonzero")
    if f_i.nvars == 0:
        f_i = LaurentPoly.constant(1, f_i.constant_value() if not f_i.is_zero() else 0)
    if f_i.nvars != 1:
        raise ValueError("f_i must be a one-variable polynomial")
    t = LaurentPoly.var(0, 1)
    sign = -1 if lam % 2 == 0 else 1
    return t + f_i * (t - 1) ** 2 * (sign * prod(q_others))


def satellite_alexander(k: int, f_prime: LaurentPoly, q: int, outer_components: int = 2) -> LaurentPoly:
    """Alexander polynomial of the satellite of a Brunnian-type pattern.

    Variables are (t1, t1', ..., t'_(q-1)).  The pattern's last variable is
    replaced by t1^k.  Outer links with three or more components give 0.
    """
    if q < 2:
        raise BadArity("pattern needs at least two components")
    if f_prime.nvars != q:
        raise ValueError(f"f' must have {q} variables")
    if k == 0 or outer_components >= 3:
        return LaurentPoly.zero(q)
    t1 = _t(0, q)
    head = exact_div((_t(0, q, k) - 1) ** 2, t1 - 1)
    for i in range(1, q):
        head = head * (_t(i, q) - 1)
    images = [[0] * q for _ in range(q)]
    for i in range(q - 1):
        images[i][i + 1] = 1
    images[q - 1][0] = k
    return head * substitute(f_prime, images, q)


def symmetric_f(f: LaurentPoly) -> LaurentPoly:
    return duality_normalize(f)

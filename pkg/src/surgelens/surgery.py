"""Homology and Reidemeister torsion of surgeries on Brunnian-type links."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, prod

from .alexander import LinkModel
from .cyclo import (
    BadDivisor,
    CycNum,
    _mul_vec,
    _reduce_exponents,
    _times_zeta,
    d_norm,
    divisors,
    units_mod,
)
from .laurent import LaurentPoly

__all__ = [
    "NotCyclic",
    "SurgerySlope",
    "SurgerySpec",
    "HomologyDecomp",
    "TorsionCertificate",
    "LensTestResult",
    "h1_surgery",
    "rho_weights",
    "rho_check",
    "torsion_lens",
    "knot_surgery_torsion",
    "torsion_brunnian_surgery",
    "lens_torsion_test",
    "parse_slopes",
]


class NotCyclic(ValueError):
    """Raised when H_1 of the surgered manifold is not cyclic of order >= 2."""


# -- slopes and specs ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class SurgerySlope:
    """A finite surgery slope p/q stored with q > 0."""

    p: int
    q: int

    def __post_init__(self):
        if self.q == 0:
            raise ValueError("slope must be finite (q != 0)")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not reduced")
        if self.q < 0:
            object.__setattr__(self, "p", -self.p)
            object.__setattr__(self, "q", -self.q)

    @classmethod
    def parse(cls, text: str) -> SurgerySlope:
        m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse slope {text!r}")
        return cls(int(m.group(1)), int(m.group(2)) if m.group(2) else 1)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def parse_slopes(text: str) -> list[SurgerySlope]:
    return [SurgerySlope.parse(tok) for tok in text.split(",") if tok.strip()]


@dataclass(frozen=True)
class SurgerySpec:
    link: LinkModel
    slopes: tuple[SurgerySlope, ...]

    def __post_init__(self):
        object.__setattr__(self, "slopes", tuple(self.slopes))
        if len(self.slopes) != self.link.components:
            raise ValueError(
                f"{self.link.components}-component link needs {self.link.components} slopes, got {len(self.slopes)}"
            )

    @property
    def ps(self) -> tuple[int, ...]:
        return tuple(s.p for s in self.slopes)

    @property
    def qs(self) -> tuple[int, ...]:
        return tuple(s.q for s in self.slopes)

    def to_json(self) -> dict:
        return {"link": self.link.to_json(), "slopes": [str(s) for s in self.slopes]}

    @classmethod
    def from_json(cls, data: dict) -> SurgerySpec:
        slopes = data["slopes"]
        if isinstance(slopes, str):
            slopes = parse_slopes(slopes)
        else:
            slopes = [SurgerySlope.parse(str(s)) for s in slopes]
        return cls(LinkModel.from_json(data["link"]), tuple(slopes))


# -- homology ------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyDecomp:
    """Invariant factors; 0 stands for a free Z summand."""

    factors: tuple[int, ...]

    @property
    def is_cyclic(self) -> bool:
        return len(self.factors) <= 1

    @property
    def order(self) -> int | None:
        """Order of the group, or None when it is infinite."""
        if 0 in self.factors:
            return None
        return prod(self.factors)

    def to_json(self) -> list[int]:
        return list(self.factors)


def _lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return a * b // gcd(a, b)


def h1_surgery(spec: SurgerySpec) -> HomologyDecomp:
    """H_1 of a surgery on an algebraically split link: the sum of Z/p_i."""
    vals = [abs(p) for p in spec.ps]
    # gcd/lcm sweeps turn a diagonal into Smith normal form
    n = len(vals)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = vals[i], vals[j]
            vals[i], vals[j] = gcd(a, b), _lcm(a, b)
    return HomologyDecomp(tuple(v for v in vals if v != 1))


def _cyclic_order(ps) -> int:
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if gcd(ps[i], ps[j]) != 1:
                raise NotCyclic(f"p_{i + 1}={ps[i]} and p_{j + 1}={ps[j]} are not coprime")
    order = abs(prod(ps))
    if order < 2:
        raise NotCyclic(f"H_1 has order {order}")
    return order


@dataclass(frozen=True)
class RhoWeights:
    order: int
    meridians: tuple[int, ...]
    cores: tuple[int, ...]
    pattern: int


def rho_weights(spec: SurgerySpec) -> RhoWeights:
    """Exponents of T under rho for meridians t_i, cores l_i' and the extra meridian t."""
    ps, qs = spec.ps, spec.qs
    p = _cyclic_order(ps)
    return RhoWeights(
        p,
        tuple(q * p // pi for pi, q in zip(ps, qs)),
        tuple(p // pi for pi in ps),
        -p,
    )


def _bezout_core(p: int, q: int) -> tuple[int, int]:
    """(r, s) with p*s - q*r = -1."""
    # extended gcd on (q, p): q*x + p*y = 1, then r = x, s = -y
    old_r, r = q, p
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_x, x = x, old_x - k * x
        old_y, y = y, old_y - k * y
    if old_r < 0:
        old_x, old_y = -old_x, -old_y
    return old_x, -old_y


def rho_check(spec: SurgerySpec) -> bool:
    """Verify that rho kills every relator of the augmented presentation and is onto."""
    w = rho_weights(spec)
    m = w.pattern
    for pi, qi, mi, core in zip(spec.ps, spec.qs, w.meridians, w.cores):
        if pi * mi + qi * m != 0:
            return False
        r, s = _bezout_core(pi, qi)
        if pi * s - qi * r != -1:
            return False
        if r * mi + s * m != core:
            return False
    return gcd(*w.meridians, m) == 1


# -- torsion -------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionCertificate:
    """A torsion value in Q(zeta_d), with the associate witness of a successful match."""

    d: int
    value: CycNum
    witness: tuple[int, int] | None = None
    matched: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out = {"d": self.d, "num": list(self.value.num), "den": list(self.value.den)}
        if self.witness is not None:
            out["class_witness"] = {"sign": self.witness[0], "l": self.witness[1]}
        if self.matched is not None:
            out["matched"] = list(self.matched)
        return out

    @classmethod
    def from_json(cls, data: dict) -> TorsionCertificate:
        value = CycNum(int(data["d"]), data["num"], data["den"])
        w = data.get("class_witness")
        witness = (int(w["sign"]), int(w["l"])) if w else None
        matched = tuple(data["matched"]) if data.get("matched") is not None else None
        return cls(int(data["d"]), value, witness, matched)


def _check_divisor(d: int, n: int) -> None:
    if d < 2 or n % d:
        raise BadDivisor(f"{d} is not a divisor >= 2 of {n}")


def _zm1(d: int, a: int) -> tuple[int, ...]:
    """zeta_d^a - 1 as a vector."""
    return _reduce_exponents(d, [(a, 1), (0, -1)])


def torsion_lens(p: int, q: int, d: int) -> TorsionCertificate:
    if p < 2:
        raise ValueError("lens torsion needs p >= 2")
    if gcd(p, q) != 1:
        raise ValueError(f"q={q} is not coprime to p={p}")
    _check_divisor(d, p)
    qbar = pow(q, -1, p)
    den = _mul_vec(d, _zm1(d, 1), _zm1(d, qbar))
    one = _reduce_exponents(d, [(0, 1)])
    return TorsionCertificate(d, CycNum(d, one, den))


def knot_surgery_torsion(delta: LaurentPoly, p: int, q: int, d: int) -> TorsionCertificate:
    """Torsion of p/q surgery on a knot, glued from the exterior and the new solid torus.

    The exterior contributes Delta(zeta)/(zeta - 1); the attached solid torus
    contributes 1/(zeta^r - 1) where its core is m^r l^s with p*s - q*r = -1.
    """
    if p < 2:
        raise ValueError("needs p >= 2")
    _check_divisor(d, p)
    r, _s = _bezout_core(p, q)
    num = CycNum.from_laurent(d, delta)
    den = _mul_vec(d, _zm1(d, 1), _zm1(d, r))
    return TorsionCertificate(d, CycNum(d, num.num, den))


def _bracket(f_k: LaurentPoly, lam: int, P: int, Q: int, d: int) -> tuple[int, ...]:
    """f_k(zeta) * Q * (zeta - 1)^2 + (-1)^(lam-1) * P * zeta, as a vector."""
    fz = CycNum.from_laurent(d, f_k).num
    sq = _reduce_exponents(d, [(2, Q), (1, -2 * Q), (0, Q)])
    sign = -1 if lam % 2 == 0 else 1
    lin = _reduce_exponents(d, [(1, sign * P)])
    return tuple(a + b for a, b in zip(_mul_vec(d, fz, sq), lin))


def bracket_poly(f_k: LaurentPoly, lam: int, P: int, Q: int) -> LaurentPoly:
    """The bracket as a Laurent polynomial in u."""
    u = LaurentPoly.var(0, 1)
    sign = -1 if lam % 2 == 0 else 1
    return f_k * (u - 1) ** 2 * Q + u * (sign * P)


@dataclass(frozen=True)
class _Reduced:
    """Torsion data after the component index k is fixed."""

    f_k: LaurentPoly
    lam: int
    P_other: int
    Q_other: int
    p_k: int
    q_k: int


def _reduce_spec(spec: SurgerySpec, k: int) -> _Reduced:
    lam = spec.link.components
    if lam < 3:
        raise ValueError("the Brunnian torsion formula needs at least three components")
    if not 1 <= k <= lam:
        raise ValueError(f"component index {k} out of range 1..{lam}")
    _cyclic_order(spec.ps)
    i = k - 1
    f_k = spec.link.f_at(i)
    P = prod(p for j, p in enumerate(spec.ps) if j != i)
    Q = prod(q for j, q in enumerate(spec.qs) if j != i)
    return _Reduced(f_k, lam, P, Q, spec.ps[i], spec.qs[i])


@lru_cache(maxsize=200_000)
def _brunnian_value(f_k: LaurentPoly, lam: int, P: int, Q: int, p_k: int, q_k: int, d: int) -> CycNum:
    n = abs(p_k)
    qbar = pow(q_k, -1, n)
    num = _bracket(f_k, lam, P, Q, d)
    den = _mul_vec(d, _zm1(d, 1), _zm1(d, qbar))
    return CycNum(d, num, den)


def torsion_brunnian_surgery(spec: SurgerySpec, k: int, d: int) -> TorsionCertificate:
    """Torsion at zeta_d of a surgery on a Brunnian-type link, d | p_k (k is 1-based)."""
    r = _reduce_spec(spec, k)
    _check_divisor(d, abs(r.p_k))
    return TorsionCertificate(d, _brunnian_value(r.f_k, r.lam, r.P_other, r.Q_other, r.p_k, r.q_k, d))


# -- lens tests ------------------------------------------------------------------

# the untargeted search is O(p^3); larger orders are refused
MAX_SEARCH_ORDER = 500


def _rotations(d: int, vec: tuple[int, ...]):
    """All sign * zeta^l * vec, yielding (vector, sign, l)."""
    cur = vec
    for l in range(d):
        yield cur, 1, l
        cur = _times_zeta(d, cur)
    cur = tuple(-c for c in vec)
    for l in range(d):
        yield cur, -1, l
        cur = _times_zeta(d, cur)


def _unit_norm(d: int, vec: tuple[int, ...]) -> bool:
    return abs(d_norm(CycNum(d, vec))) == 1


@lru_cache(maxsize=200_000)
def _untargeted(bracket: tuple[int, ...], d: int, qbar: int):
    """Search a <= b (units mod d) with F*(z^a-1)(z^b-1) = +-z^l (z-1)(z^qbar-1)."""
    if not _unit_norm(d, bracket):
        return None
    target = _mul_vec(d, _zm1(d, 1), _zm1(d, qbar))
    lookup = {}
    for vec, sign, l in _rotations(d, target):
        lookup.setdefault(vec, (sign, l))
    us = units_mod(d)
    for ia, a in enumerate(us):
        fa = _mul_vec(d, bracket, _zm1(d, a))
        for b in us[ia:]:
            hit = lookup.get(_mul_vec(d, fa, _zm1(d, b)))
            if hit is not None:
                return (a, b), hit
    return None


@lru_cache(maxsize=200_000)
def _targeted(bracket: tuple[int, ...], d: int, qbar: int, Qbar: int):
    """Search s (unit mod d) with F*(z^s-1)(z^(s*Qbar)-1) = +-z^l (z-1)(z^qbar-1)."""
    if not _unit_norm(d, bracket):
        return None
    target = _mul_vec(d, _zm1(d, 1), _zm1(d, qbar))
    lookup = {}
    for vec, sign, l in _rotations(d, target):
        lookup.setdefault(vec, (sign, l))
    for s in units_mod(d):
        lhs = _mul_vec(d, bracket, _mul_vec(d, _zm1(d, s), _zm1(d, s * Qbar)))
        hit = lookup.get(lhs)
        if hit is not None:
            return (s,), hit
    return None


@dataclass
class LensTestResult:
    k: int
    per_d: dict[int, bool] = field(default_factory=dict)
    certificates: dict[int, TorsionCertificate] = field(default_factory=dict)
    untested: list[int] = field(default_factory=list)
    target: tuple[int, int] | None = None

    @property
    def aggregate(self) -> bool:
        return all(self.per_d.values())

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "target": list(self.target) if self.target else None,
            "per_d": {str(d): ok for d, ok in sorted(self.per_d.items())},
            "aggregate": self.aggregate,
            "untested": self.untested,
            "certificates": [self.certificates[d].to_json() for d in sorted(self.certificates)],
        }


def lens_test_reduced(
    f_k: LaurentPoly, lam: int, P: int, Q: int, p_k: int, q_k: int, d: int, target=None
):
    """Single-divisor lens test on already reduced data; returns the witness or None."""
    n = abs(p_k)
    if n > MAX_SEARCH_ORDER:
        raise ValueError(f"|p_k| = {n} exceeds the search bound {MAX_SEARCH_ORDER}")
    qbar = pow(q_k, -1, n) % d
    bracket = _bracket(f_k, lam, P, Q, d)
    if target is None:
        return _untargeted(bracket, d, qbar)
    tP, tQ = target
    Qbar = pow(tQ, -1, tP) % d
    return _targeted(bracket, d, qbar, Qbar)


def lens_torsion_test(spec: SurgerySpec, k: int, target=None) -> LensTestResult:
    """Per-divisor lens-torsion test at component k (1-based).

    ``target`` is an optional (P, Q) pair.  Divisors of |H_1| that do not
    divide p_k are listed as untested.
    """
    r = _reduce_spec(spec, k)
    order = _cyclic_order(spec.ps)
    n = abs(r.p_k)
    res = LensTestResult(k)
    if target is not None:
        tP, tQ = target
        if tP < 0:
            tP, tQ = -tP, -tQ
        res.target = (tP, tQ % tP if tP > 1 else tQ)
        if tP != order or gcd(tP, tQ) != 1:
            # a lens space of the wrong order can never match
            for d in divisors(n)[1:]:
                res.per_d[d] = False
            return res
    for d in divisors(order)[1:]:
        if n % d:
            res.untested.append(d)
            continue
        found = lens_test_reduced(r.f_k, r.lam, r.P_other, r.Q_other, r.p_k, r.q_k, d, res.target)
        res.per_d[d] = found is not None
        value = _brunnian_value(r.f_k, r.lam, r.P_other, r.Q_other, r.p_k, r.q_k, d)
        if found is not None:
            matched, witness = found
            res.certificates[d] = TorsionCertificate(d, value, witness, matched)
        else:
            res.certificates[d] = TorsionCertificate(d, value)
    return res

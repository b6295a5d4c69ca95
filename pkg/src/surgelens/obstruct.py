"""Necessary conditions for a surgery to be a lens space.

Everything here is a search or a direct test; the hand case analysis that
motivates these conditions is replaced by exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .alexander import hatK_alexander
from .cyclo import REDUCED, CycNum, GroupRingElem, associate_eq, divisors, units_mod
from .laurent import LaurentPoly, duality_form, exact_div
from .surgery import (
    LensTestResult,
    SurgerySpec,
    _cyclic_order,
    _reduce_spec,
    bracket_poly,
    lens_torsion_test,
)

__all__ = [
    "LiftedEquationProblem",
    "lifted_equation_solve",
    "lifted_equation_solve_per_d",
    "tuple_satisfies_per_d",
    "norm_test_fzero",
    "ConstFVerdict",
    "const_f_classify",
    "OSResult",
    "os_form_check",
    "KYResult",
    "ky_form_check",
    "TangeResult",
    "tange_check",
    "FilterVerdict",
    "lens_candidate_filter",
]

STAGES = ("norm", "constf", "forms", "torsion")


# -- the lifted equation -------------------------------------------------------


@dataclass(frozen=True)
class LiftedEquationProblem:
    """F*(u^a-1)*(u^b-1) = sign*u^l*(u-1)*(u^c-1) in Z[u]/(1+u+...+u^(p-1)).

    ``a_values``/``b_values``/``c_values`` restrict the search; None means
    every residue coprime to p.
    """

    F: GroupRingElem
    a_values: tuple[int, ...] | None = None
    b_values: tuple[int, ...] | None = None
    c_values: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.F.mode != REDUCED:
            object.__setattr__(self, "F", self.F.reduce())

    @property
    def order(self) -> int:
        return self.F.order

    @classmethod
    def from_poly(cls, F: LaurentPoly, p: int, **bounds) -> LiftedEquationProblem:
        return cls(GroupRingElem.from_laurent(F, abs(p), REDUCED), **bounds)

    def _values(self, given):
        units = units_mod(self.order)
        if given is None:
            return units
        return [v for v in given if gcd(v, self.order) == 1]


def _um1(p: int, a: int) -> GroupRingElem:
    return GroupRingElem.from_terms(p, [(a, 1), (0, -1)], REDUCED)


def lifted_equation_solve(problem: LiftedEquationProblem) -> list[tuple[int, int, int, int, int]]:
    """All (a, b, c, sign, l) solving the lifted equation, sorted."""
    p = problem.order
    if p < 2:
        raise ValueError("needs |p_k| >= 2")
    rhs: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
    for c in problem._values(problem.c_values):
        base = _um1(p, 1) * _um1(p, c)
        for sign in (1, -1):
            for l in range(p):
                rhs.setdefault(base.rotate(l, sign).coeffs, []).append((c, sign, l))
    out = []
    bs = problem._values(problem.b_values)
    for a in problem._values(problem.a_values):
        fa = problem.F * _um1(p, a)
        for b in bs:
            for c, sign, l in rhs.get((fa * _um1(p, b)).coeffs, ()):
                out.append((a, b, c, sign, l))
    return sorted(out)


def tuple_satisfies_per_d(F: LaurentPoly, p: int, sol: tuple[int, int, int, int, int]) -> bool:
    """Check one tuple in Q(zeta_d) for every divisor d >= 2 of p."""
    a, b, c, sign, l = sol
    for d in divisors(p)[1:]:
        lhs = CycNum.from_laurent(d, F) * CycNum.zeta_minus_one(d, a) * CycNum.zeta_minus_one(d, b)
        rhs = CycNum.zeta_minus_one(d, 1) * CycNum.zeta_minus_one(d, c) * CycNum.zeta(d, l) * sign
        if lhs != rhs:
            return False
    return True


def lifted_equation_solve_per_d(F: LaurentPoly, p: int) -> dict[int, list[tuple[int, int, int, int, int]]]:
    """Diagnostic: solutions of the cyclotomic equation separately for each d | p.

    Exponents are reported mod d, so the sign and power of zeta may differ
    between divisors.
    """
    out = {}
    for d in divisors(p)[1:]:
        Fd = CycNum.from_laurent(d, F)
        us = units_mod(d)
        rhs = {}
        for c in us:
            base = CycNum.zeta_minus_one(d, 1) * CycNum.zeta_minus_one(d, c)
            for sign in (1, -1):
                for l in range(d):
                    rhs.setdefault((base * CycNum.zeta(d, l) * sign).num, []).append((c, sign, l))
        sols = []
        for a in us:
            for b in us:
                lhs = Fd * CycNum.zeta_minus_one(d, a) * CycNum.zeta_minus_one(d, b)
                for c, sign, l in rhs.get(lhs.num, ()):
                    sols.append((a, b, c, sign, l))
        out[d] = sorted(sols)
    return out


# -- norm and constant-f obstructions ----------------------------------------


def norm_test_fzero(P: int, p_k: int) -> bool:
    """With f_k = 0 the bracket is +-P*u, a unit only when |P| = 1."""
    if abs(p_k) < 2:
        raise ValueError("needs |p_k| >= 2")
    return abs(P) == 1


@dataclass(frozen=True)
class ConstFVerdict:
    excluded: bool
    allowed_products: tuple[int, ...]
    reason: str = ""

    def admits(self, P: int) -> bool:
        return not self.excluded and P in self.allowed_products


def const_f_classify(f_k: int, p_k: int, eta: int, lam: int = 3) -> ConstFVerdict:
    """Allowed products of the other p_j when f_k is a nonzero constant.

    ``eta`` is the product of the other q_j, which must be +-1.  The result
    lists the P values for which the bracket is an associate of
    u^2 - u + 1, u^2 + 1 or u^2 + u + 1 up to sign.
    """
    if abs(p_k) < 5:
        raise ValueError("the constant-f classification needs |p_k| >= 5")
    if f_k == 0:
        raise ValueError("f_k = 0 is handled by the norm test")
    if abs(eta) != 1:
        return ConstFVerdict(True, (), f"product of the other q_j is {eta}, not +-1")
    if abs(f_k) != 1:
        return ConstFVerdict(True, (), f"f_k = {f_k} but must be +-1")
    sign = -1 if lam % 2 == 0 else 1
    allowed = tuple(sorted(sign * f_k * eta * m for m in (1, 2, 3)))
    return ConstFVerdict(False, allowed)


# -- Alexander polynomial forms ----------------------------------------------


def _centre(delta: LaurentPoly) -> LaurentPoly | None:
    """Symmetric centring with positive top coefficient; None if the spread is odd."""
    if delta.nvars != 1:
        raise ValueError("one-variable polynomial expected")
    if delta.is_zero():
        raise ValueError("zero polynomial")
    D, _sign, odd = duality_form(delta)
    if odd[0] or _sign != 1:
        return None
    if D.leading()[1] < 0:
        D = -D
    return D


@dataclass(frozen=True)
class OSResult:
    ok: bool
    exponents: tuple[int, ...] = ()


def os_form_check(delta: LaurentPoly) -> OSResult:
    """Alternating +-1 coefficients with constant term (-1)^m."""
    D = _centre(delta)
    if D is None:
        return OSResult(False)
    pos = [(m[0], c) for m, c in D.items() if m[0] > 0]
    pos.sort(reverse=True)
    for k, (_e, c) in enumerate(pos):
        if c != (-1) ** k:
            return OSResult(False)
    m = len(pos)
    if D.coeff((0,)) != (-1) ** m:
        return OSResult(False)
    return OSResult(True, tuple(e for e, _ in pos))


@dataclass(frozen=True)
class TangeResult:
    ok: bool
    trace: Fraction
    exponents: tuple[int, ...] = ()


def _trace(delta: LaurentPoly) -> Fraction:
    lo, coeffs = delta.coeff_list()
    if len(coeffs) < 2:
        return Fraction(0)
    return Fraction(-coeffs[-2], coeffs[-1])


def tange_check(delta: LaurentPoly) -> TangeResult:
    """OS form with n_1 - n_2 = 1, the constant term counting as exponent 0."""
    tr = _trace(delta)
    os_ = os_form_check(delta)
    if not os_.ok:
        return TangeResult(False, tr)
    ns = os_.exponents
    if not ns:
        return TangeResult(True, tr, ns)
    gap = ns[0] - (ns[1] if len(ns) > 1 else 0)
    return TangeResult(gap == 1 and tr == 1, tr, ns)


@dataclass(frozen=True)
class KYResult:
    ok: bool
    witness: tuple[int, int] | None = None


@lru_cache(maxsize=4096)
def _ky_quotient(r: int, s: int) -> LaurentPoly:
    t = LaurentPoly.var(0, 1)
    num = (LaurentPoly.var(0, 1, r * s) - 1) * (t - 1)
    return exact_div(num, (LaurentPoly.var(0, 1, r) - 1) * (LaurentPoly.var(0, 1, s) - 1))


@lru_cache(maxsize=20_000)
def ky_form_check(delta: LaurentPoly, p: int, q: int) -> KYResult:
    """Search 1 <= r <= s < p, gcd(r, s) = 1, q*r*s = +-1 (mod p), with
    delta associate to the quotient modulo (t^p - 1)/(t - 1)."""
    if p < 2:
        raise ValueError("needs p >= 2")
    if gcd(p, q) != 1:
        raise ValueError(f"q={q} is not coprime to p={p}")
    if delta.nvars != 1:
        raise ValueError("one-variable polynomial expected")
    target = GroupRingElem.from_laurent(delta, p, REDUCED)
    for r in range(1, p):
        for s in range(r, p):
            if gcd(r, s) != 1 or (q * r * s) % p not in (1, p - 1):
                continue
            cand = GroupRingElem.from_laurent(_ky_quotient(r, s), p, REDUCED)
            if associate_eq(target, cand)[0]:
                return KYResult(True, (r, s))
    return KYResult(False)


# -- pipeline ------------------------------------------------------------------


@dataclass
class FilterVerdict:
    k: int
    excluded_by: str | None
    reason: str = ""
    details: dict = field(default_factory=dict)
    torsion: LensTestResult | None = None

    @property
    def candidate(self) -> bool:
        return self.excluded_by is None

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "excluded_by": self.excluded_by,
            "verdict": "candidate" if self.candidate else "excluded",
            "reason": self.reason,
        }
        out.update(self.details)
        if self.torsion is not None:
            out["torsion"] = self.torsion.to_json()
        return out


def _forms_stage(f_k: LaurentPoly, lam: int, q_eff: tuple[int, ...], p_k: int, q_k: int):
    hat = hatK_alexander(f_k, q_eff, lam)
    os_ = os_form_check(hat)
    ky = ky_form_check(hat, abs(p_k), q_k if p_k > 0 else -q_k)
    tg = tange_check(hat)
    info = {
        "hatK": str(hat),
        "os": os_.ok,
        "ky": ky.ok,
        "ky_witness": list(ky.witness) if ky.witness else None,
        "tange": tg.ok,
        "trace": str(tg.trace),
    }
    failed = [name for name, ok in (("os", os_.ok), ("ky", ky.ok), ("tange", tg.ok)) if not ok]
    return failed, info


def lens_candidate_filter(spec: SurgerySpec, k: int) -> FilterVerdict:
    """Run norm, constant-f, form and torsion tests at component k (1-based)."""
    r = _reduce_spec(spec, k)
    _cyclic_order(spec.ps)
    i = k - 1
    p_k, q_k = r.p_k, r.q_k
    out = FilterVerdict(k, None)
    if abs(p_k) < 2:
        out.reason = "|p_k| < 2: no divisor to test"
        return out
    f_k = r.f_k
    # norm / constant f
    if f_k.is_zero():
        if not norm_test_fzero(r.P_other, p_k):
            out.excluded_by = "norm"
            out.reason = f"f_k = 0 and product of the other p_j is {r.P_other}"
            return out
    elif f_k.is_constant() and abs(p_k) >= 5:
        cv = const_f_classify(f_k.constant_value(), p_k, r.Q_other, r.lam)
        others_q = [q for j, q in enumerate(spec.qs) if j != i]
        if cv.excluded or any(abs(q) != 1 for q in others_q) or not cv.admits(r.P_other):
            out.excluded_by = "constf"
            out.reason = cv.reason or f"product of the other p_j is {r.P_other}, allowed {list(cv.allowed_products)}"
            return out
    # forms, when the other surgeries leave a homology sphere
    others_p = [p for j, p in enumerate(spec.ps) if j != i]
    if all(abs(p) == 1 for p in others_p):
        q_eff = tuple(p * q for j, (p, q) in enumerate(zip(spec.ps, spec.qs)) if j != i)
        failed, info = _forms_stage(f_k, r.lam, q_eff, p_k, q_k)
        out.details["forms"] = info
        if failed:
            out.excluded_by = "forms"
            out.reason = "failed " + ", ".join(failed)
            return out
    res = lens_torsion_test(spec, k)
    out.torsion = res
    if not res.aggregate:
        out.excluded_by = "torsion"
        bad = [d for d, ok in sorted(res.per_d.items()) if not ok]
        out.reason = f"no lens torsion match at d in {bad}"
    return out


def bracket_for(spec: SurgerySpec, k: int) -> LaurentPoly:
    r = _reduce_spec(spec, k)
    return bracket_poly(r.f_k, r.lam, r.P_other, r.Q_other)

"""Closed-form lens-surgery classifications and lens-space normal forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import gcd, prod

from .surgery import SurgerySlope

__all__ = [
    "LensSpace",
    "ClassificationVerdict",
    "lens_canonical",
    "classify_milnor3",
    "classify_twisted_whitehead",
    "classify_milnor",
    "LENS",
    "NOT_LENS",
    "NOT_CYCLIC",
    "OUT_OF_RANGE",
]

LENS = "lens"
NOT_LENS = "not_lens"
NOT_CYCLIC = "not_cyclic_h1"
OUT_OF_RANGE = "out_of_table_range"

PAPER_THEOREM = "paper_theorem"
TORSION_CERTIFICATE = "torsion_certificate"

# (case, multiplier c of the second slope, m in |eps*p - m*q| = 1)
_CASES = ((1, 1, 6), (2, 2, 4), (3, 3, 3))


@dataclass(frozen=True, order=True)
class LensSpace:
    p: int
    q: int

    def __post_init__(self):
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"L({self.p},{self.q}) needs gcd(p, q) = 1")

    def canonical(self) -> LensSpace:
        return lens_canonical(self.p, self.q)

    def to_json(self) -> list[int]:
        return [self.p, self.q]

    def __str__(self) -> str:
        return f"L({self.p},{self.q})"


def lens_canonical(p: int, q: int) -> LensSpace:
    """Representative with 0 <= q <= p/2 under q -> +-q^(+-1) (mod p).

    L(1, *) is S^3 = L(1, 0); L(0, +-1) is S^1 x S^2 = L(0, 1).
    """
    if gcd(p, q) != 1:
        raise ValueError(f"L({p},{q}) needs gcd(p, q) = 1")
    if p < 0:
        p, q = -p, -q
    if p == 0:
        return LensSpace(0, 1)
    if p == 1:
        return LensSpace(1, 0)
    r = q % p
    rbar = pow(r, -1, p)
    return LensSpace(p, min(r, p - r, rbar, p - rbar))


@dataclass(frozen=True)
class ClassificationVerdict:
    outcome: str
    lens: LensSpace | None = None
    raw_lens: tuple[int, int] | None = None
    case: int | None = None
    epsilon: int | None = None
    permutation: tuple[int, ...] | None = None
    source: str = PAPER_THEOREM
    evidence: dict | None = field(default=None, compare=False)

    @property
    def is_lens(self) -> bool:
        return self.outcome == LENS

    def to_json(self) -> dict:
        out = {
            "outcome": self.outcome,
            "lens": self.lens.to_json() if self.lens else None,
            "case": self.case,
            "epsilon": self.epsilon,
            "permutation": list(self.permutation) if self.permutation is not None else None,
            "source": self.source,
        }
        if self.raw_lens is not None:
            out["raw_lens"] = list(self.raw_lens)
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out


def _slopes(slopes) -> list[SurgerySlope]:
    return [s if isinstance(s, SurgerySlope) else SurgerySlope.parse(str(s)) for s in slopes]


def _coprime(ps) -> bool:
    return all(gcd(ps[i], ps[j]) == 1 for i in range(len(ps)) for j in range(i + 1, len(ps)))


def _is_int(s: SurgerySlope, value: int) -> bool:
    return s.q == 1 and s.p == value


def _case_lens(case: int, eps: int, p: int, q: int) -> tuple[int, int] | None:
    """Target lens space of a case if |eps*p - m*q| = 1 holds."""
    _case, _c, m = _CASES[case - 1]
    if abs(eps * p - m * q) != 1:
        return None
    if case == 1:
        return p, 4 * eps * q
    if case == 2:
        return 2 * p, eps * (8 * q - p)
    return 3 * p, eps * (3 * q - 2 * p)


def _lens_verdict(raw, case, eps, perm) -> ClassificationVerdict:
    return ClassificationVerdict(LENS, lens_canonical(*raw), raw, case, eps, perm)


def classify_milnor3(slopes) -> ClassificationVerdict:
    """Lens surgeries on the Borromean rings: two slopes (eps, c*eps), c in {1, 2, 3}."""
    ss = _slopes(slopes)
    if len(ss) != 3:
        raise ValueError("Milnor-3 classification needs three slopes")
    if not _coprime([s.p for s in ss]):
        return ClassificationVerdict(NOT_CYCLIC)
    for perm in permutations(range(3)):
        i, j, k = perm
        for eps in (1, -1):
            if not _is_int(ss[i], eps):
                continue
            for case, c, _m in _CASES:
                if not _is_int(ss[j], c * eps):
                    continue
                raw = _case_lens(case, eps, ss[k].p, ss[k].q)
                if raw is not None:
                    return _lens_verdict(raw, case, eps, perm)
    return ClassificationVerdict(NOT_LENS)


def classify_twisted_whitehead(n: int, slopes) -> ClassificationVerdict:
    """Lens surgeries on the n-twisted Whitehead link (only n = +-1 can give one)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    ss = _slopes(slopes)
    if len(ss) != 2:
        raise ValueError("twisted Whitehead classification needs two slopes")
    if not _coprime([s.p for s in ss]):
        return ClassificationVerdict(NOT_CYCLIC)
    if abs(n) >= 2:
        return ClassificationVerdict(NOT_LENS)
    eps = n
    for perm in permutations(range(2)):
        i, k = perm
        for case, c, _m in _CASES:
            if not _is_int(ss[i], c * eps):
                continue
            raw = _case_lens(case, eps, ss[k].p, ss[k].q)
            if raw is not None:
                return _lens_verdict(raw, case, eps, perm)
    return ClassificationVerdict(NOT_LENS)


def classify_milnor(lam: int, slopes, evidence: bool = False) -> ClassificationVerdict:
    """Milnor links: three components use the table, four or more never give a lens space.

    With ``evidence`` the obstruction pipeline is run at every component and
    attached to a not-lens verdict for four or more components.
    """
    if lam < 3:
        raise ValueError("Milnor links need at least three components")
    ss = _slopes(slopes)
    if len(ss) != lam:
        raise ValueError(f"need {lam} slopes")
    if lam == 3:
        return classify_milnor3(ss)
    if not _coprime([s.p for s in ss]):
        return ClassificationVerdict(NOT_CYCLIC)
    extra = None
    if evidence:
        extra = milnor_evidence(lam, ss)
    return ClassificationVerdict(NOT_LENS, evidence=extra)


def milnor_evidence(lam: int, ss) -> dict:
    """Obstruction pipeline verdicts at every component with |p_k| >= 2."""
    from .alexander import LinkModel
    from .obstruct import lens_candidate_filter
    from .surgery import SurgerySpec

    spec = SurgerySpec(LinkModel.milnor(lam), tuple(ss))
    order = abs(prod(s.p for s in ss))
    if order < 2:
        return {"source": TORSION_CERTIFICATE, "per_component": [], "note": "H_1 has order < 2"}
    comps = []
    for k in range(1, lam + 1):
        if abs(ss[k - 1].p) < 2:
            continue
        v = lens_candidate_filter(spec, k)
        comps.append({"k": k, "excluded_by": v.excluded_by, "reason": v.reason})
    return {"source": TORSION_CERTIFICATE, "per_component": comps}

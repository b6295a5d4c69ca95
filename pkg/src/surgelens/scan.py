"""Grid scans: classify every slope tuple and cross-check it against the obstructions.

The per-record work is reduced to cached keys that depend only on the data
the obstructions actually see (f_k, the products of the other p_j and q_j,
p_k and q_k mod p_k), which keeps full grids tractable in pure Python.
"""

from __future__ import annotations

import csv
import json
import os
import signal
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from itertools import product as iproduct
from math import gcd, prod

from .alexander import LinkModel
from .catalog import (
    LENS,
    NOT_LENS,
    classify_milnor3,
    lens_canonical,
)
from .cyclo import CycNum, d_norm, divisors, real_linear_norm
from .laurent import LaurentPoly
from .obstruct import _forms_stage, const_f_classify
from .surgery import SurgerySlope, SurgerySpec, _bracket, lens_test_reduced, lens_torsion_test

__all__ = ["ScanConfig", "ScanRecord", "ScanSummary", "grid_slopes", "run_scan", "stream_scan", "evaluate_tuple"]

CSV_TAIL = ("verdict", "lens_p", "lens_q", "case", "excluded_by", "needs_review")


@dataclass(frozen=True)
class ScanConfig:
    family: str = "milnor3"
    components: int = 3
    max_abs_p: int = 5
    max_abs_q: int = 2
    parallelism: int = 1
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.family not in ("milnor3", "milnor"):
            raise ValueError(f"scan supports milnor3 and milnor families, not {self.family!r}")
        if self.family == "milnor3" and self.components != 3:
            object.__setattr__(self, "components", 3)
        if self.components < 3:
            raise ValueError("Milnor scans need at least three components")
        if self.max_abs_p < 0 or self.max_abs_q < 0:
            raise ValueError("grid bounds must be nonnegative")
        if self.parallelism < 1:
            raise ValueError("parallelism must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    @classmethod
    def from_mapping(cls, values: dict) -> ScanConfig:
        conv = {
            "family": str,
            "components": int,
            "max_abs_p": int,
            "max_abs_q": int,
            "parallelism": int,
            "output": str,
            "format": str,
        }
        kwargs = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_").lower()
            aliases = {"maxabsp": "max_abs_p", "maxabsq": "max_abs_q", "threads": "parallelism"}
            key = aliases.get(key.replace("_", ""), key)
            if key not in conv:
                raise ValueError(f"unknown config key {key!r}")
            if raw is None:
                continue
            kwargs[key] = conv[key](raw)
        return cls(**kwargs)


def read_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def grid_slopes(max_abs_p: int, max_abs_q: int) -> list[tuple[int, int]]:
    """Reduced finite slopes p/q with |p| <= max_abs_p and 1 <= q <= max_abs_q."""
    return [
        (p, q)
        for p in range(-max_abs_p, max_abs_p + 1)
        for q in range(1, max_abs_q + 1)
        if gcd(p, q) == 1
    ]


# -- cached per-component obstructions ------------------------------------------


def _sign(lam: int) -> int:
    return -1 if lam % 2 == 0 else 1


@lru_cache(maxsize=None)
def _norm_ok(f_k: LaurentPoly, lam: int, P: int, Q: int, d: int) -> bool:
    """Is the bracket a unit of Z[zeta_d] (norm +-1)?"""
    if f_k.is_constant() or f_k.is_zero():
        c = f_k.constant_value() if not f_k.is_zero() else 0
        # bracket = zeta * (cQ*(zeta + 1/zeta) + sP - 2cQ)
        return abs(real_linear_norm(d, c * Q, _sign(lam) * P - 2 * c * Q)) == 1
    return abs(d_norm(CycNum(d, _bracket(f_k, lam, P, Q, d)))) == 1


@lru_cache(maxsize=None)
def _torsion_pass(f_k: LaurentPoly, lam: int, P: int, Q: int, p_k: int, q_res: int) -> bool:
    """Untargeted lens-torsion test at every d | p_k (q_res = q_k mod |p_k|)."""
    n = abs(p_k)
    ds = divisors(n)[1:]
    if not all(_norm_ok(f_k, lam, P, Q, d) for d in ds):
        return False
    return all(lens_test_reduced(f_k, lam, P, Q, p_k, q_res, d) is not None for d in ds)


@lru_cache(maxsize=None)
def _forms_pass(f_k: LaurentPoly, lam: int, q_prod: int, p_k: int, q_res: int) -> bool:
    # hatK only sees the product of the effective q's
    q_eff = (q_prod,) + (1,) * (lam - 2)
    failed, _info = _forms_stage(f_k, lam, q_eff, p_k, q_res)
    return not failed


def _stage_exclusion(f_k, lam, ps, qs, i) -> str | None:
    """First pipeline stage excluding component i (0-based), or None."""
    p_k, q_k = ps[i], qs[i]
    P = prod(p for j, p in enumerate(ps) if j != i)
    Q = prod(q for j, q in enumerate(qs) if j != i)
    n = abs(p_k)
    if f_k.is_zero():
        if abs(P) != 1:
            return "norm"
    elif f_k.is_constant() and n >= 5:
        cv = const_f_classify(f_k.constant_value(), p_k, Q, lam)
        if cv.excluded or any(abs(q) != 1 for j, q in enumerate(qs) if j != i) or not cv.admits(P):
            return "constf"
    if all(abs(p) == 1 for j, p in enumerate(ps) if j != i):
        q_prod = prod(p * q for j, (p, q) in enumerate(zip(ps, qs)) if j != i)
        q_signed = q_k if p_k > 0 else -q_k
        if not _forms_pass(f_k, lam, q_prod, n, q_signed % n):
            return "forms"
    if not _torsion_pass(f_k, lam, P, Q, p_k, q_k % n):
        return "torsion"
    return None


# -- records -------------------------------------------------------------------


@dataclass
class ScanRecord:
    slopes: tuple[tuple[int, int], ...]
    h1: int
    verdict: str
    lens: tuple[int, int] | None = None
    case: int | None = None
    excluded_by: str | None = None
    excluded_k: int | None = None
    torsion_pass: bool = False
    targeted_pass: bool | None = None
    needs_review: bool = False
    agreement: bool = True
    certificates: list | None = None

    def to_json(self) -> dict:
        out = {
            "slopes": [f"{p}/{q}" for p, q in self.slopes],
            "h1": self.h1,
            "verdict": self.verdict,
            "lens": list(self.lens) if self.lens else None,
            "case": self.case,
            "excluded_by": self.excluded_by,
            "excluded_k": self.excluded_k,
            "torsion_pass": self.torsion_pass,
            "targeted_pass": self.targeted_pass,
            "needs_review": self.needs_review,
            "agreement": self.agreement,
        }
        if self.certificates is not None:
            out["certificates"] = self.certificates
        return out

    def csv_row(self) -> list[str]:
        cells = [str(x) for pq in self.slopes for x in pq]
        lp, lq = self.lens if self.lens else ("", "")
        cells += [
            self.verdict,
            str(lp),
            str(lq),
            "" if self.case is None else str(self.case),
            self.excluded_by or "",
            "1" if self.needs_review else "0",
        ]
        return cells


def _small_int_count(slopes) -> int:
    return sum(1 for p, q in slopes if q == 1 and 1 <= abs(p) <= 3)


def evaluate_tuple(link: LinkModel, slopes: tuple[tuple[int, int], ...], fs=None) -> ScanRecord | None:
    """Evaluate one grid point; None when H_1 is not cyclic of order >= 2.

    ``fs`` may carry the precomputed per-component f_k of ``link``.
    """
    ps = tuple(p for p, _ in slopes)
    qs = tuple(q for _, q in slopes)
    lam = len(slopes)
    for i in range(lam):
        for j in range(i + 1, lam):
            if gcd(ps[i], ps[j]) != 1:
                return None
    order = abs(prod(ps))
    if order < 2:
        return None
    # a lens verdict needs two slopes in {+-1, +-2, +-3}; four or more components never give one
    if lam == 3 and _small_int_count(slopes) >= 2:
        verdict = classify_milnor3([SurgerySlope(p, q) for p, q in slopes])
    else:
        verdict = None
    rec = ScanRecord(slopes, order, verdict.outcome if verdict else NOT_LENS)
    if verdict is not None and verdict.is_lens:
        rec.lens = (verdict.lens.p, verdict.lens.q)
        rec.case = verdict.case
    if fs is None:
        fs = [link.f_at(i) for i in range(lam)]
    tp = True
    for i in range(lam):
        n = abs(ps[i])
        if n < 2:
            continue
        P = prod(p for j, p in enumerate(ps) if j != i)
        Q = prod(q for j, q in enumerate(qs) if j != i)
        if not _torsion_pass(fs[i], lam, P, Q, ps[i], qs[i] % n):
            tp = False
        if rec.excluded_by is None:
            stage = _stage_exclusion(fs[i], lam, ps, qs, i)
            if stage is not None:
                rec.excluded_by, rec.excluded_k = stage, i + 1
    rec.torsion_pass = tp
    if rec.verdict == LENS:
        spec = SurgerySpec(link, tuple(SurgerySlope(p, q) for p, q in slopes))
        results = [lens_torsion_test(spec, i + 1, verdict.raw_lens) for i in range(lam) if abs(ps[i]) >= 2]
        rec.certificates = [r.to_json() for r in results]
        rec.targeted_pass = all(r.aggregate for r in results)
        rec.agreement = rec.targeted_pass and rec.excluded_by is None
    elif rec.verdict == NOT_LENS:
        rec.needs_review = tp
    return rec


# -- running a scan --------------------------------------------------------------


@dataclass
class ScanSummary:
    total_points: int = 0
    records: int = 0
    counts: Counter = field(default_factory=Counter)
    excluded: Counter = field(default_factory=Counter)
    lens_targeted_fail: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)
    needs_review: list = field(default_factory=list)
    interrupted: bool = False

    def add(self, rec: ScanRecord, keep_review: int = 50) -> None:
        self.records += 1
        self.counts[rec.verdict] += 1
        if rec.excluded_by:
            self.excluded[rec.excluded_by] += 1
        if not rec.agreement:
            self.disagreements.append(rec.slopes)
        if rec.targeted_pass is False:
            self.lens_targeted_fail.append(rec.slopes)
        if rec.needs_review:
            self.needs_review.append(rec.slopes)

    def merge(self, other: ScanSummary) -> None:
        self.total_points += other.total_points
        self.records += other.records
        self.counts.update(other.counts)
        self.excluded.update(other.excluded)
        self.lens_targeted_fail.extend(other.lens_targeted_fail)
        self.disagreements.extend(other.disagreements)
        self.needs_review.extend(other.needs_review)

    def finish(self) -> None:
        self.lens_targeted_fail.sort()
        self.disagreements.sort()
        self.needs_review.sort()

    def to_json(self, review_limit: int | None = 100) -> dict:
        review = self.needs_review if review_limit is None else self.needs_review[:review_limit]
        fmt = lambda ss: [f"{p}/{q}" for p, q in ss]  # noqa: E731
        return {
            "grid_points": self.total_points,
            "records": self.records,
            "counts": dict(sorted(self.counts.items())),
            "excluded_by": dict(sorted(self.excluded.items())),
            "lens_targeted_failures": [fmt(s) for s in self.lens_targeted_fail],
            "disagreements": [fmt(s) for s in self.disagreements],
            "needs_review_count": len(self.needs_review),
            "needs_review": [fmt(s) for s in review],
            "interrupted": self.interrupted,
        }


def _link_for(cfg: ScanConfig) -> LinkModel:
    return LinkModel.milnor(cfg.components)


def iter_points(cfg: ScanConfig, first_indices=None):
    """Yield (slopes, record or None) for the grid, optionally restricted by first slope."""
    link = _link_for(cfg)
    fs = [link.f_at(i) for i in range(cfg.components)]
    slopes = grid_slopes(cfg.max_abs_p, cfg.max_abs_q)
    if first_indices is None:
        first_indices = range(len(slopes))
    for idx in first_indices:
        s0 = (slopes[idx],)
        for tail in iproduct(slopes, repeat=cfg.components - 1):
            pt = s0 + tail
            yield pt, evaluate_tuple(link, pt, fs)


def _run_chunk(cfg: ScanConfig, first_indices, keep_records: bool):
    summary = ScanSummary()
    records = []
    for _pt, rec in iter_points(cfg, first_indices):
        summary.total_points += 1
        if rec is None:
            continue
        summary.add(rec)
        if keep_records:
            records.append(rec)
    return summary, records


def _ignore_sigint():
    signal.signal(signal.SIGINT, signal.SIG_IGN)


def stream_scan(cfg: ScanConfig, summary: ScanSummary, keep_records: bool = True):
    """Yield record lists one first slope at a time, in slope order.

    Each first slope is one task; at most ``2 * parallelism`` are in flight,
    so memory stays bounded however large the grid is. On Ctrl-C the summary
    is marked interrupted and the generator stops after the last whole chunk.
    """
    slopes = grid_slopes(cfg.max_abs_p, cfg.max_abs_q)
    workers = max(1, min(cfg.parallelism, len(slopes) or 1))
    try:
        if workers == 1:
            for idx in range(len(slopes)):
                part, recs = _run_chunk(cfg, [idx], keep_records)
                summary.merge(part)
                yield recs
            return
        with ProcessPoolExecutor(max_workers=workers, initializer=_ignore_sigint) as pool:
            pending = deque()
            todo = iter(range(len(slopes)))
            try:
                for idx in islice(todo, 2 * workers):
                    pending.append(pool.submit(_run_chunk, cfg, [idx], keep_records))
                while pending:
                    part, recs = pending.popleft().result()
                    for idx in islice(todo, 1):
                        pending.append(pool.submit(_run_chunk, cfg, [idx], keep_records))
                    summary.merge(part)
                    yield recs
            finally:
                for fut in pending:
                    fut.cancel()
    except KeyboardInterrupt:
        summary.interrupted = True
    finally:
        summary.finish()


def run_scan(cfg: ScanConfig, keep_records: bool = True):
    """Run a scan; returns (summary, records sorted by slopes)."""
    summary = ScanSummary()
    records: list[ScanRecord] = []
    for recs in stream_scan(cfg, summary, keep_records):
        records.extend(recs)
    return summary, records


def threads_from_env(default: int = 1) -> int:
    raw = os.environ.get("SURGELENS_THREADS")
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"SURGELENS_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError("SURGELENS_THREADS must be positive")
    return n


def lens_key(p: int, q: int) -> tuple[int, int]:
    L = lens_canonical(p, q)
    return (L.p, L.q)


def report_config(cfg: ScanConfig) -> dict:
    # parallelism and the output path are left out so reports compare byte for byte
    return {
        "family": cfg.family,
        "components": cfg.components,
        "max_abs_p": cfg.max_abs_p,
        "max_abs_q": cfg.max_abs_q,
    }


def _csv_header(cfg: ScanConfig) -> list[str]:
    head = [f"{c}{i}" for i in range(1, cfg.components + 1) for c in ("p", "q")]
    return head + list(CSV_TAIL)


def write_report(cfg: ScanConfig, summary: ScanSummary, records, fh) -> None:
    """Write finished records as JSON or CSV."""
    write_stream(cfg, summary, [records], fh)


def write_stream(cfg: ScanConfig, summary: ScanSummary, chunks, fh) -> None:
    """Write record chunks as they arrive; the JSON summary goes last since it is only final then."""
    if cfg.format == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_csv_header(cfg))
        for chunk in chunks:
            writer.writerows(rec.csv_row() for rec in chunk)
        return
    fh.write('{\n "config": ' + json.dumps(report_config(cfg)) + ',\n "records": [')
    sep = "\n  "
    for chunk in chunks:
        for rec in chunk:
            fh.write(sep + json.dumps(rec.to_json()))
            sep = ",\n  "
    fh.write("\n ],\n \"summary\": ")
    fh.write(json.dumps(summary.to_json(review_limit=None), indent=1).replace("\n", "\n "))
    fh.write("\n}\n")

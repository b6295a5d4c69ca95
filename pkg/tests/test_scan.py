import io
import json

import pytest

import surgelens.scan as scan_mod
from surgelens.alexander import LinkModel
from surgelens.obstruct import lens_candidate_filter
from surgelens.scan import (
    ScanConfig,
    evaluate_tuple,
    grid_slopes,
    iter_points,
    read_config_file,
    ScanSummary,
    run_scan,
    stream_scan,
    threads_from_env,
    write_report,
    write_stream,
)
from surgelens.surgery import SurgerySlope, SurgerySpec, lens_torsion_test


def test_grid_slopes_are_reduced():
    g = grid_slopes(20, 8)
    assert len(g) == len(set(g)) == 211
    assert all(q >= 1 for _p, q in g)
    assert grid_slopes(0, 3) == [(0, 1)]


def _pipeline_reference(link, pt):
    spec = SurgerySpec(link, tuple(SurgerySlope(p, q) for p, q in pt))
    first = None
    passes = True
    for k in range(1, len(pt) + 1):
        if abs(pt[k - 1][0]) < 2:
            continue
        if first is None:
            v = lens_candidate_filter(spec, k)
            if v.excluded_by:
                first = (v.excluded_by, k)
        passes &= lens_torsion_test(spec, k).aggregate
    return first, passes


@pytest.mark.parametrize("lam, P, Q", [(3, 7, 2), (4, 3, 2)])
def test_fast_path_matches_pipeline(lam, P, Q):
    cfg = ScanConfig("milnor", lam, P, Q)
    link = LinkModel.milnor(lam)
    seen = 0
    for pt, rec in iter_points(cfg):
        if rec is None:
            continue
        seen += 1
        first, passes = _pipeline_reference(link, pt)
        got = (rec.excluded_by, rec.excluded_k) if rec.excluded_by else None
        assert got == first, pt
        assert rec.torsion_pass == passes, pt
    assert seen > 100


def test_lens_records_agree_and_carry_certificates():
    summary, records = run_scan(ScanConfig(max_abs_p=8, max_abs_q=3))
    lens = [r for r in records if r.verdict == "lens"]
    assert lens and not summary.disagreements
    for r in lens:
        assert r.targeted_pass and r.excluded_by is None
        assert all(c["aggregate"] for c in r.certificates)


def test_milnor4_two_large_p_never_pass():
    _summary, records = run_scan(ScanConfig("milnor", 4, 4, 2))
    multi = [r for r in records if sum(abs(p) >= 2 for p, _q in r.slopes) >= 2]
    assert multi
    assert not any(r.torsion_pass for r in multi)
    assert all(r.excluded_by == "norm" for r in multi)


def _report(cfg):
    summary, records = run_scan(cfg)
    buf = io.StringIO()
    write_report(cfg, summary, records, buf)
    return buf.getvalue()


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_reports_identical_across_parallelism(fmt):
    a = _report(ScanConfig(max_abs_p=5, max_abs_q=2, parallelism=1, format=fmt))
    b = _report(ScanConfig(max_abs_p=5, max_abs_q=2, parallelism=3, format=fmt))
    assert a == b
    assert a == _report(ScanConfig(max_abs_p=5, max_abs_q=2, parallelism=1, format=fmt))


def test_csv_header():
    text = _report(ScanConfig(max_abs_p=3, max_abs_q=1, format="csv"))
    assert text.splitlines()[0] == "p1,q1,p2,q2,p3,q3,verdict,lens_p,lens_q,case,excluded_by,needs_review"


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_streamed_report_matches_batch(fmt):
    cfg = ScanConfig(max_abs_p=4, max_abs_q=2, parallelism=2, format=fmt)
    summary = ScanSummary()
    buf = io.StringIO()
    write_stream(cfg, summary, stream_scan(cfg, summary), buf)
    assert buf.getvalue() == _report(cfg)
    if fmt == "json":
        doc = json.loads(buf.getvalue())
        assert doc["summary"]["records"] == len(doc["records"])


def test_records_sorted():
    _s, records = run_scan(ScanConfig(max_abs_p=4, max_abs_q=2, parallelism=2))
    keys = [r.slopes for r in records]
    assert keys == sorted(keys)


def test_empty_grid():
    summary, records = run_scan(ScanConfig(max_abs_p=0, max_abs_q=3))
    assert records == [] and summary.records == 0


def test_interrupt_keeps_partial_results(monkeypatch):
    calls = {"n": 0}
    real = scan_mod.evaluate_tuple

    def flaky(*args):
        calls["n"] += 1
        if calls["n"] > 500:
            raise KeyboardInterrupt
        return real(*args)

    monkeypatch.setattr(scan_mod, "evaluate_tuple", flaky)
    summary, records = run_scan(ScanConfig(max_abs_p=5, max_abs_q=2))
    assert summary.interrupted
    assert 0 < len(records) < 2112


def test_config_file(tmp_path):
    path = tmp_path / "scan.cfg"
    path.write_text("# grid\nfamily = milnor\ncomponents=4\nmaxAbsP=3\nmax_abs_q = 1  # tail\n")
    cfg = ScanConfig.from_mapping(read_config_file(str(path)))
    assert (cfg.family, cfg.components, cfg.max_abs_p, cfg.max_abs_q) == ("milnor", 4, 3, 1)
    path.write_text("nonsense\n")
    with pytest.raises(ValueError):
        read_config_file(str(path))
    with pytest.raises(ValueError):
        ScanConfig.from_mapping({"colour": "blue"})


def test_threads_env(monkeypatch):
    monkeypatch.delenv("SURGELENS_THREADS", raising=False)
    assert threads_from_env(1) == 1
    monkeypatch.setenv("SURGELENS_THREADS", "4")
    assert threads_from_env() == 4
    monkeypatch.setenv("SURGELENS_THREADS", "zero")
    with pytest.raises(ValueError):
        threads_from_env()


def test_non_cyclic_points_skipped():
    assert evaluate_tuple(LinkModel.milnor(3), ((2, 1), (4, 1), (1, 1))) is None
    assert evaluate_tuple(LinkModel.milnor(3), ((1, 1), (-1, 1), (1, 2))) is None

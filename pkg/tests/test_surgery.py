import random
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surgelens.alexander import LinkModel
from surgelens.cyclo import BadDivisor, CycNum, associate_eq, d_norm, divisors
from surgelens.laurent import LaurentPoly
from surgelens.surgery import (
    NotCyclic,
    SurgerySlope,
    SurgerySpec,
    TorsionCertificate,
    h1_surgery,
    knot_surgery_torsion,
    lens_test_reduced,
    lens_torsion_test,
    parse_slopes,
    rho_check,
    rho_weights,
    torsion_brunnian_surgery,
    torsion_lens,
)

M3 = LinkModel.milnor(3)
M4 = LinkModel.milnor(4)


def spec(link, text):
    return SurgerySpec(link, tuple(parse_slopes(text)))


def zm1(d, a=1):
    return CycNum.zeta_minus_one(d, a)


def test_slope_normalization():
    assert SurgerySlope(3, -2) == SurgerySlope(-3, 2)
    assert str(SurgerySlope.parse("7")) == "7/1"
    with pytest.raises(ValueError):
        SurgerySlope(2, 4)
    with pytest.raises(ValueError):
        SurgerySlope(1, 0)
    with pytest.raises(ValueError):
        SurgerySlope.parse("1/x")


def test_h1_examples():
    assert h1_surgery(spec(M3, "1/1,1/1,7/1")).factors == (7,)
    assert h1_surgery(spec(LinkModel.whitehead(1), "2/1,4/1")).factors == (2, 4)
    assert h1_surgery(spec(M3, "2/1,3/1,5/1")).factors == (30,)
    assert h1_surgery(spec(M3, "0/1,1/1,1/1")).order is None


def test_rho_examples():
    w = rho_weights(spec(M3, "1/1,1/1,7/1"))
    assert (w.meridians, w.cores, w.pattern) == ((7, 7, 1), (7, 7, 1), -7)
    w = rho_weights(spec(M3, "1/1,2/1,9/2"))
    assert (w.meridians, w.cores, w.pattern) == ((18, 9, 4), (18, 9, 2), -18)
    with pytest.raises(NotCyclic):
        rho_weights(spec(LinkModel.whitehead(1), "2/1,4/1"))


@given(st.lists(st.sampled_from([1, 2, 3, 5, 7, 11, -1, -2, -3, -5]), min_size=3, max_size=3, unique_by=abs), st.data())
def test_rho_kills_relators(ps, data):
    if abs(ps[0] * ps[1] * ps[2]) < 2:
        return
    qs = [data.draw(st.integers(1, 9).filter(lambda q, p=p: gcd(p, q) == 1)) for p in ps]
    s = SurgerySpec(M3, tuple(SurgerySlope(p, q) for p, q in zip(ps, qs)))
    assert rho_check(s)


def test_torsion_lens_examples():
    assert torsion_lens(5, 1, 5).value == 1 / (zm1(5) * zm1(5))
    assert torsion_lens(7, 4, 7).value == 1 / (zm1(7) * zm1(7, 2))
    assert torsion_lens(2, 1, 2).value == CycNum.from_int(2, 1) / 4
    with pytest.raises(BadDivisor):
        torsion_lens(7, 1, 3)


@pytest.mark.parametrize("p", range(2, 31))
def test_lens_torsion_is_unknot_surgery(p):
    one = LaurentPoly.one(1)
    for q in range(1, p):
        if gcd(p, q) != 1:
            continue
        for d in divisors(p)[1:]:
            assert torsion_lens(p, q, d).value == knot_surgery_torsion(one, p, q, d).value


def test_borromean_lens_torsion():
    s = spec(M3, "1/1,1/1,7/1")
    z = CycNum.zeta(7)
    value = torsion_brunnian_surgery(s, 3, 7).value
    assert value == (zm1(7) * zm1(7) + z) / (zm1(7) * zm1(7))
    # a Galois conjugate of the L(7,4) torsion, found by the targeted search
    res = lens_torsion_test(s, 3, (7, 4))
    assert res.per_d == {7: True}
    assert res.certificates[7].matched == (2,)


def test_milnor4_unit_torsion():
    s = spec(M4, "1/1,1/1,1/1,5/1")
    value = torsion_brunnian_surgery(s, 4, 5).value
    assert value == -CycNum.zeta(5) / (zm1(5) * zm1(5))
    assert associate_eq(value, torsion_lens(5, 1, 5).value)[0]


def test_two_component_links_rejected():
    with pytest.raises(ValueError):
        torsion_brunnian_surgery(spec(LinkModel.whitehead(2), "1/1,5/1"), 2, 5)


def test_lens_test_examples():
    assert not lens_torsion_test(spec(M3, "1/1,1/1,7/2"), 3).aggregate
    res = lens_torsion_test(spec(M4, "1/1,1/1,2/1,3/1"), 4)
    assert res.per_d == {3: False}
    assert res.untested == [2, 6]
    assert not res.aggregate


def test_wrong_order_target_never_matches():
    res = lens_torsion_test(spec(M3, "1/1,1/1,7/1"), 3, (11, 2))
    assert res.per_d == {7: False}


def test_search_bound():
    with pytest.raises(ValueError):
        lens_test_reduced(LaurentPoly.one(1), 3, 1, 1, 503, 1, 503)


@given(st.sampled_from([5, 7, 9, 11, 13]), st.integers(1, 12), st.integers(1, 3))
def test_torsion_depends_on_q_mod_p(p, q, shift):
    if gcd(p, q) != 1:
        return
    a = spec(M3, f"1/1,1/1,{p}/{q}")
    b = spec(M3, f"1/1,1/1,{p}/{q + shift * p}")
    for d in divisors(p)[1:]:
        assert associate_eq(torsion_brunnian_surgery(a, 3, d).value, torsion_brunnian_surgery(b, 3, d).value)[0]


def test_norm_of_torsion_factors():
    rng = random.Random(3)
    for _ in range(20):
        p = rng.choice([5, 7, 9, 11, 12, 15])
        q = rng.choice([q for q in range(1, p) if gcd(p, q) == 1])
        s = spec(M3, f"1/1,1/1,{p}/{q}")
        qbar = pow(q, -1, p)
        for d in divisors(p)[1:]:
            v = torsion_brunnian_surgery(s, 3, d).value
            bracket = zm1(d) * zm1(d) + CycNum.zeta(d)
            assert d_norm(v) == d_norm(bracket) / (d_norm(zm1(d)) * d_norm(zm1(d, qbar)))


def test_certificate_json_roundtrip():
    cert = lens_torsion_test(spec(M3, "1/1,1/1,7/1"), 3, (7, 4)).certificates[7]
    back = TorsionCertificate.from_json(cert.to_json())
    assert back == cert
    assert set(cert.to_json()) >= {"d", "num", "den", "class_witness"}

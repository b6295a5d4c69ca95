import cmath
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surgelens.cyclo import (
    FULL,
    REDUCED,
    AssociateClass,
    BadDivisor,
    CycNum,
    GroupRingElem,
    associate_eq,
    canonical_rep,
    cyclotomic_poly,
    d_norm,
    divisors,
    euler_phi,
    norm_by_conjugates,
    parse_coeff_list,
    prime_power_base,
    project_psi,
    real_linear_norm,
    units_mod,
)
from surgelens.laurent import parse_poly


def _phi_by_roots(d):
    coeffs = [1 + 0j]
    for k in range(1, d + 1):
        if math.gcd(k, d) != 1:
            continue
        w = cmath.exp(2j * math.pi * k / d)
        coeffs = [a - w * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    return [round(c.real) for c in reversed(coeffs)]  # lowest degree first


def _complex_norm(x: CycNum) -> complex:
    out = 1 + 0j
    for a in units_mod(x.order) if x.order > 2 else [1]:
        out *= x.to_complex(a)
    return out


@pytest.mark.parametrize("d, text", [(1, "u - 1"), (6, "u^2 - u + 1"), (8, "u^4 + 1")])
def test_cyclotomic_examples(d, text):
    assert cyclotomic_poly(d) == parse_poly(text, ["u"])


@pytest.mark.parametrize("d", range(1, 61))
def test_cyclotomic_against_roots(d):
    P = cyclotomic_poly(d)
    lo, coeffs = P.coeff_list()
    assert lo == 0
    assert list(coeffs) == _phi_by_roots(d)
    assert len(coeffs) - 1 == euler_phi(d)


def test_norm_examples():
    assert d_norm(CycNum.zeta(2)) == -1
    assert d_norm(1 - CycNum.zeta(9)) == 3
    assert d_norm(1 - CycNum.zeta(6)) == 1
    assert d_norm(CycNum.from_int(7, 0)) == 0


@pytest.mark.parametrize("p", range(2, 41))
def test_norm_of_one_minus_zeta(p):
    for d in divisors(p)[1:]:
        base = prime_power_base(d)
        assert d_norm(1 - CycNum.zeta(d)) == (base or 1)


def test_real_linear_norm_matches_direct_norm():
    for d in range(3, 30):
        for A in range(-3, 4):
            for B in range(-4, 5):
                x = CycNum.from_terms(d, [(1, A), (-1, A), (0, B)])
                assert real_linear_norm(d, A, B) == d_norm(x)


def _cyc(draw_vec, d):
    return CycNum.from_terms(d, list(enumerate(draw_vec)))


@given(st.integers(2, 24), st.lists(st.integers(-4, 4), min_size=1, max_size=6), st.lists(st.integers(-4, 4), min_size=1, max_size=6))
def test_norm_multiplicative(d, a, b):
    x, y = _cyc(a, d), _cyc(b, d)
    assert d_norm(x * y) == d_norm(x) * d_norm(y)


@given(st.integers(2, 16), st.lists(st.integers(-3, 3), min_size=1, max_size=5))
def test_norm_matches_slow_and_complex_oracles(d, a):
    x = _cyc(a, d)
    n = d_norm(x)
    assert n == norm_by_conjugates(x)
    assert abs(_complex_norm(x) - float(n)) < 1e-6 * max(1.0, abs(float(n)))


@given(st.integers(2, 16), st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.lists(st.integers(-3, 3), min_size=1, max_size=5))
def test_field_division_roundtrip(d, a, b):
    x, y = _cyc(a, d), _cyc(b, d)
    if y.is_zero():
        return
    assert (x / y) * y == x
    assert hash(x / y * y) == hash(x)


def test_project_psi_examples():
    for p in (6, 10, 12):
        orbit = GroupRingElem.from_coeffs(p, [1] * p, FULL)
        for d in divisors(p)[1:]:
            assert project_psi(orbit, d).is_zero()
            assert project_psi(GroupRingElem.unit(p, p, 1, FULL), d) == CycNum.from_int(d, 1)
    x = GroupRingElem.from_terms(7, [(0, 1), (1, -1)], FULL)
    assert project_psi(x, 7) == 1 - CycNum.zeta(7)
    assert d_norm(project_psi(x, 7)) == 7
    with pytest.raises(BadDivisor):
        project_psi(x, 3)


def test_reduced_mode_kills_orbit_sum():
    for p in range(2, 12):
        assert GroupRingElem.from_coeffs(p, [1] * p, REDUCED).is_zero()


@given(st.integers(2, 30), st.data())
def test_project_psi_is_a_ring_map(p, data):
    vec = st.lists(st.integers(-5, 5), min_size=p, max_size=p)
    x = GroupRingElem.from_coeffs(p, data.draw(vec), FULL)
    y = GroupRingElem.from_coeffs(p, data.draw(vec), FULL)
    for d in divisors(p)[1:]:
        assert project_psi(x * y, d) == project_psi(x, d) * project_psi(y, d)
        assert project_psi(x + y, d) == project_psi(x, d) + project_psi(y, d)


@given(st.integers(2, 20), st.integers(0, 40), st.sampled_from((1, -1)))
def test_units_have_unit_norm(p, l, sign):
    x = GroupRingElem.unit(p, l, sign, FULL)
    for d in divisors(p)[1:]:
        n = d_norm(project_psi(x, d))
        assert abs(n) == 1 if d == 2 else n == 1


@given(st.integers(2, 20), st.data())
def test_crt_consistency(p, data):
    vec = st.lists(st.integers(-2, 2), min_size=p, max_size=p)
    x = GroupRingElem.from_coeffs(p, data.draw(vec), REDUCED)
    y = x if data.draw(st.booleans()) else GroupRingElem.from_coeffs(p, data.draw(vec), REDUCED)
    same_everywhere = all(project_psi(x, d) == project_psi(y, d) for d in divisors(p)[1:])
    assert (x == y) == same_everywhere


def test_reduce_idempotent():
    x = GroupRingElem.from_coeffs(7, [3, 1, 4, 1, 5, 9, 2], FULL)
    r = x.reduce()
    assert r.reduce() == r


def test_associate_examples():
    u3 = GroupRingElem.from_terms(7, [(3, 1), (4, -1)], FULL)  # u^3 (1 - u)
    ok, wit = associate_eq(u3, GroupRingElem.from_terms(7, [(1, 1), (0, -1)], FULL))
    assert ok and wit == (-1, 3)
    two = GroupRingElem.from_terms(5, [(0, 2), (1, -2)], FULL)
    one = GroupRingElem.from_terms(5, [(0, 1), (1, -1)], FULL)
    assert associate_eq(two, one) == (False, None)
    z = GroupRingElem.from_coeffs(5, [0] * 5, FULL)
    assert associate_eq(z, z) == (True, (1, 0))


def test_associate_in_field():
    x = CycNum.zeta(9, 4) * (1 - CycNum.zeta(9))
    ok, (sign, l) = associate_eq(x, CycNum.zeta(9) - 1)
    assert ok and x == (CycNum.zeta(9) - 1) * CycNum.zeta(9, l) * sign


def test_canonical_rep_examples():
    minus_u2 = GroupRingElem.unit(5, 2, -1, FULL)
    assert canonical_rep(AssociateClass(minus_u2)).coeffs == (1, 0, 0, 0, 0)
    assert canonical_rep(GroupRingElem.unit(5, 3, -1, REDUCED)).coeffs == (1, 0, 0, 0)
    a = GroupRingElem.from_terms(5, [(1, 1), (0, -1)], FULL)
    b = GroupRingElem.from_terms(5, [(0, 1), (4, -1)], FULL) * GroupRingElem.unit(5, 1, 1, FULL)
    assert canonical_rep(a) == canonical_rep(b)
    zero = GroupRingElem.from_coeffs(5, [0] * 5, FULL)
    assert canonical_rep(zero) == zero


@given(st.integers(2, 12), st.data())
def test_associate_is_an_equivalence(p, data):
    vec = st.lists(st.integers(-2, 2), min_size=p, max_size=p)
    x = GroupRingElem.from_coeffs(p, data.draw(vec), FULL)
    l1, l2 = data.draw(st.integers(0, p - 1)), data.draw(st.integers(0, p - 1))
    s1, s2 = data.draw(st.sampled_from((1, -1))), data.draw(st.sampled_from((1, -1)))
    y = x.rotate(l1, s1)
    z = y.rotate(l2, s2)
    assert associate_eq(x, x)[0]
    assert associate_eq(x, y)[0] and associate_eq(y, x)[0]
    assert associate_eq(x, z)[0]
    assert canonical_rep(x) == canonical_rep(y) == canonical_rep(z)


def test_json_roundtrips():
    x = GroupRingElem.from_coeffs(6, [1, -2, 0, 3, 0, 1], REDUCED)
    assert GroupRingElem.from_json(x.to_json()) == x
    y = (1 - CycNum.zeta(12)) / (CycNum.zeta(12, 5) + 2)
    assert CycNum.from_json(y.to_json()) == y
    assert parse_coeff_list("[1,-2, 3]") == [1, -2, 3]


def test_large_order_norm_is_fast_and_exact():
    rng = random.Random(7)
    for d in (97, 120, 199):
        x = CycNum.from_terms(d, [(rng.randrange(d), rng.randint(-3, 3)) for _ in range(6)])
        y = CycNum.from_terms(d, [(rng.randrange(d), rng.randint(-3, 3)) for _ in range(6)])
        assert d_norm(x * y) == d_norm(x) * d_norm(y)

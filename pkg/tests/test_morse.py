import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realstrata.morse import (
    PoincareSeries,
    Verdict,
    check_inequalities,
    classifying_space_circle,
    kirwan_product,
    projective_line,
    sl2c_p1_data,
    sl2r_p1_data,
)


def test_product_example():
    got = PoincareSeries.polynomial([1, 0, 1], 6) * classifying_space_circle(6)
    assert got.coeffs == (1, 0, 2, 0, 2, 0, 2)


def test_shift_and_identity():
    one = PoincareSeries.one(4)
    assert one.shift(1).coeffs == (0, 1, 0, 0, 0)
    a = PoincareSeries.polynomial([3, 1, 4], 4)
    assert (a + PoincareSeries.zero(4)).coeffs == a.coeffs
    with pytest.raises(ValueError):
        a.shift(-1)


def test_truncation_takes_minimum():
    a = PoincareSeries.polynomial([1, 1, 1, 1], 3)
    b = PoincareSeries.polynomial([1, 1], 1)
    assert (a + b).truncation == 1 and (a * b).coeffs == (1, 2)


def test_integers_only():
    with pytest.raises(TypeError):
        PoincareSeries((1, 0.5))
    with pytest.raises(ValueError):
        PoincareSeries((1,), field="R")


def test_field_mismatch():
    with pytest.raises(ValueError):
        PoincareSeries.one(3, "Q") + PoincareSeries.one(3, "Z2")


def test_kirwan_product_examples():
    n = 10
    bk = classifying_space_circle(n)
    assert kirwan_product(projective_line(n), bk).coeffs == (1,) + (0, 2) * 5
    assert kirwan_product(PoincareSeries.one(n), bk).coeffs == bk.coeffs
    s1 = PoincareSeries.polynomial([1, 1], n)
    assert kirwan_product(s1, PoincareSeries.one(n)).coeffs == s1.coeffs


def test_sl2r_morse_inequalities():
    terms, total = sl2r_p1_data(32)
    chk = check_inequalities(terms, total)
    assert chk.verdict is Verdict.PASS and chk.exact
    assert chk.difference.coeffs[:2] == (1, 1) and not any(chk.difference.coeffs[2:])
    assert chk.quotient.coeffs == (1,) + (0,) * 31


def test_sl2r_missing_stratum_fails():
    terms, total = sl2r_p1_data(32)
    chk = check_inequalities(terms[:1], total)
    assert chk.verdict is Verdict.FAIL and chk.offending_degree == 1


def test_kirwan_equality_case():
    chk = check_inequalities(*sl2c_p1_data(32))
    assert chk.verdict is Verdict.PASS and chk.quotient.is_zero() and chk.difference.is_zero()


def test_serialization_roundtrip():
    s = classifying_space_circle(5)
    assert PoincareSeries.from_dict(s.to_dict()) == s
    assert "verdict" in check_inequalities(*sl2r_p1_data(8)).to_dict()


small = st.lists(st.integers(0, 3), min_size=1, max_size=8)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), small), min_size=1, max_size=4), small, st.integers(0, 1000))
def test_roundtrip_recovers_r(parts, r_coeffs, seed):
    """total = sum t^m P_m - (1 + t) R with R >= 0 gives back R exactly."""
    n = 12
    terms = [(m, PoincareSeries.polynomial(c, n)) for m, c in parts]
    r = PoincareSeries.polynomial(r_coeffs, n)
    acc = PoincareSeries.zero(n)
    for m, p in terms:
        acc = acc + p.shift(m)
    total = acc - PoincareSeries.polynomial([1, 1], n) * r
    shuffled = list(terms)
    random.Random(seed).shuffle(shuffled)
    for ts in (terms, shuffled):
        chk = check_inequalities(ts, total)
        assert chk.verdict is Verdict.PASS
        assert chk.quotient.coeffs == r.coeffs[:n]

"""Exact backend: field axioms, square-root layer, Laurent round trip, jets, hbar series."""

import flint
import pytest
from hypothesis import given
from hypothesis import strategies as st

from painleve_tr.algebra import (
    EVEN,
    INF,
    ODD,
    QQ,
    FieldDescriptor,
    HbarSeries,
    Jet,
    LaurentSeries,
    NestedExtension,
    adjoin_sqrt,
    decode_element,
    encode_element,
    evaluate,
    laurent_expand,
    parse_rational,
    residue,
    symbolic,
)

small = st.fractions(min_value=-7, max_value=7, max_denominator=6)
coeffs = st.lists(small, min_size=1, max_size=4)

DESC, Q0 = symbolic("q0")
SQ_DESC, ROOT = adjoin_sqrt(DESC, Q0 * Q0 + 2)


def q(f):
    return flint.fmpq(f.numerator, f.denominator)


def poly_in(cs, x):
    acc = x * 0
    for c in reversed(cs):
        acc = acc * x + q(c)
    return acc


@st.composite
def elements(draw, nonzero=False):
    """a + b sqrt(q0^2 + 2) with a, b random rational functions of q0."""
    a = poly_in(draw(coeffs), Q0) / poly_in(draw(coeffs) + [1], Q0)
    b = poly_in(draw(coeffs), Q0)
    e = a.coerce_to(SQ_DESC) + b.coerce_to(SQ_DESC) * ROOT
    if nonzero and e.is_zero():
        e = e + 1
    return e


@given(elements(), elements(), elements())
def test_field_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert (a - a).is_zero()


@given(elements(nonzero=True))
def test_field_inverse_and_norm(a):
    assert (a * a.inverse() - 1).is_zero()
    assert (a * a.conjugate() - a.norm()).is_zero()


@given(elements(), elements())
def test_derivative_is_a_derivation(a, b):
    assert (a * b).derivative("q0") == a.derivative("q0") * b + a * b.derivative("q0")


def test_sqrt_layer():
    assert (ROOT * ROOT - (Q0 * Q0 + 2)).is_zero()
    d, r = adjoin_sqrt(QQ, flint.fmpq(480))
    assert str(d.d) == "30" and (r * r - 480).is_zero()
    # already a square: the descriptor is unchanged
    d2, r2 = adjoin_sqrt(DESC, Q0 * Q0 * 4)
    assert d2 == DESC and (r2 * r2 - Q0 * Q0 * 4).is_zero()
    with pytest.raises(NestedExtension):
        adjoin_sqrt(SQ_DESC, Q0)


def test_parse_rational_refuses_floats():
    assert parse_rational("-3/4") == flint.fmpq(-3, 4)
    for bad in ("1.5", "1e3", "0.25"):
        with pytest.raises(ValueError):
            parse_rational(bad)


@given(elements())
def test_exact_serialization_round_trip(a):
    assert decode_element(SQ_DESC, encode_element(a)) == a


@given(coeffs, st.integers(0, 4), small)
def test_laurent_round_trip(cs, m, p):
    """Expanding P(z)/(z-p)^m at p and summing the finite series gives back the function."""
    zd = FieldDescriptor(("z",))
    z = zd.gen("z")
    f = poly_in(cs, z) / (z - q(p)) ** m
    s = laurent_expand(f, q(p), len(cs) + 1, "z")
    back = sum(((z - q(p)) ** k * c for k, c in zip(range(s.lo, s.prec), s.coeffs)), z * 0)
    assert back == f


@given(coeffs, st.lists(small, min_size=1, max_size=3, unique=True))
def test_residue_sum_zero_rational(cs, poles):
    """Residues of a rational 1-form, including infinity, add up to zero."""
    zd = FieldDescriptor(("z",))
    z = zd.gen("z")
    den = z * 0 + 1
    for p in poles:
        den = den * (z - q(p)) ** 2
    f = poly_in(cs, z) / den
    total = sum((residue(f, q(p), "z") for p in poles), z * 0) + residue(f, INF, "z")
    assert total.is_zero()


def test_laurent_arithmetic():
    zd = FieldDescriptor(("z",))
    z = zd.gen("z")
    s = laurent_expand(1 / (z * (1 - z)), 0, 4, "z")
    assert isinstance(s, LaurentSeries) and s.lo == -1 and s[-1] == 1 and s[2] == 1
    t = s * s.inverse()
    assert t[0] == 1 and all(t[k].is_zero() for k in range(1, t.prec))


@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_jet_product_rule(a, b):
    A = Jet([q(x) for x in a])
    B = Jet([q(x) for x in b])
    lhs = (A * B).derivative()
    rhs = A.derivative() * B + A * B.derivative()
    assert all(x == y for x, y in zip(lhs.c, rhs.c))


def test_hbar_series_parity():
    h = HbarSeries.hbar(QQ.one(), 6)
    even = h * h + 1
    assert even.parity == EVEN
    assert (even * h).parity == ODD
    assert (h.flip() + h).is_zero()


def test_evaluate_precision():
    import mpmath
    v = evaluate(QQ.element(flint.fmpq(1, 3)))
    with mpmath.workprec(256):
        assert abs(v - mpmath.mpf(1) / 3) < mpmath.mpf(2) ** -250

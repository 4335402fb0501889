"""Spectral curves: construction at pinned bases, genericity guards, derived formulas."""

import flint
import pytest
import sympy as sp

from painleve_tr import detform as df
from painleve_tr.curves import (
    DegenerateCurve,
    Label,
    LeadingRelationError,
    SingularTime,
    build_curve,
    check_curve,
    leading_relation,
    pinned_bases,
    singular_time_polynomial,
    time_derivative_q0,
)
from painleve_tr.painleve import formal_solution

ALL = [(L, kw) for L in Label for kw in pinned_bases(L)]


def _id(v):
    L, kw = v
    return f"{L.value}-" + "-".join(f"{k}={v}" for k, v in sorted(kw.items()) if k != "params")


@pytest.mark.parametrize("case", ALL, ids=[_id(c) for c in ALL])
def test_pinned_curves_are_generic(case):
    L, kw = case
    c = build_curve(L, **kw)
    assert all(check_curve(c).values())
    assert leading_relation(L, c.params, c.base.q0, c.base.t).is_zero()
    assert len(c.descriptor_hash()) == 64


def test_descriptor_round_trip_is_stable():
    a = build_curve("PII", q0="1", params={"theta": "1"})
    b = build_curve("PII", q0="1", params={"theta": "1"})
    assert a.descriptor() == b.descriptor() and a.descriptor_hash() == b.descriptor_hash()
    c = build_curve("PII", q0="2", params={"theta": "-1/2"})
    assert c.descriptor_hash() != a.descriptor_hash()


def test_singular_times_rejected():
    with pytest.raises(SingularTime):
        build_curve("PI", q0="0")
    with pytest.raises(SingularTime):
        build_curve("PII", q0="1", params={"theta": "-4"})  # 4 q0^3 + theta = 0


def test_inconsistent_time_rejected():
    with pytest.raises(LeadingRelationError):
        build_curve("PI", q0="1", t="5")


def test_degenerate_base_rejected():
    with pytest.raises((DegenerateCurve, SingularTime, ValueError)):
        build_curve("PIII", q0="1", params={"theta0": "1", "thetainf": "3"})  # q0^4 = 1


def test_piv_singular_polynomial_against_resultant():
    """Independent oracle: discriminant of A_IV in q0 via a sympy resultant."""
    q, t, a, b = sp.symbols("q0 t theta0 thetainf")
    A = 3 * q**4 + 4 * t * q**3 + (t**2 - 2 * b) * q**2 - a**2
    # eliminate t between A = 0 and dA/dq0 = 0
    res = sp.factor(sp.resultant(A, sp.diff(A, q), t))
    c = build_curve("PIV", q0="1", t="1", params={"theta0": "1"})
    ours = singular_time_polynomial("PIV", c.params, c.base.q0, c.base.t)
    P = {a: 1, b: sp.Rational(str(c.params["thetainf"])), q: 1}
    target = sp.Rational(str(ours))
    # the resultant equals -4 q0^2 times the singular-time polynomial
    assert res.subs(P) == -4 * target


def test_piv_time_derivative_against_implicit_differentiation():
    q, t, a, b = sp.symbols("q0 t theta0 thetainf")
    A = 3 * q**4 + 4 * t * q**3 + (t**2 - 2 * b) * q**2 - a**2
    qdot = -sp.diff(A, t) / sp.diff(A, q)
    c = build_curve("PIV", params={"theta0": "1"})
    ours = time_derivative_q0("PIV", c.params, c.base.q0, c.base.t)
    for qv, tv in ((2, sp.Rational(1, 3)), (sp.Rational(-1, 2), 3)):
        bv = sp.solve(A.subs({q: qv, t: tv, a: 1}), b)[0]
        want = qdot.subs({q: qv, t: tv, a: 1, b: bv})
        got = ours.substitute("q0", _fmpq(qv)).substitute("t", _fmpq(tv))
        assert sp.Rational(str(got)) == want


def _fmpq(v):
    n, d = sp.fraction(sp.Rational(v))
    return flint.fmpq(int(n), int(d))


def test_piii_double_zero_conventions():
    """E has its double zero at x = -1/q0 while det R^(0) vanishes at x = +1/q0."""
    kw = pinned_bases("PIII", symbolic=False)[0]
    c = build_curve("PIII", **kw)
    q0 = c.base.q0
    E = c.E
    assert E.substitute("x", -1 / q0).is_zero()
    assert E.derivative("x").substitute("x", -1 / q0).is_zero()
    lax = df.build_lax(formal_solution("PIII", order=2, **kw))
    R0 = lax.R_at_base(0)
    assert R0.det().substitute("x", 1 / q0).is_zero()
    assert not R0.det().substitute("x", -1 / q0).is_zero()


@pytest.mark.parametrize("L", [Label.PI, Label.PII, Label.PIII, Label.PIV])
def test_involution_and_branch_points(L):
    c = build_curve(L, **pinned_bases(L, symbolic=True)[0])
    assert (c.pullback(c.x) - c.x).is_zero()
    assert (c.pullback(c.y) + c.y).is_zero()
    for r in c.branch_points:
        assert c.dx().substitute("z", c.desc.element(r)).is_zero()

"""Formal hbar-series solutions, Hamiltonians, parity and the sigma form."""

import pytest

from painleve_tr.algebra import FieldDescriptor
from painleve_tr.curves import Label, build_curve, pinned_bases
from painleve_tr.painleve import (
    compatibility_pair,
    formal_solution,
    hamilton_check,
    hamiltonian,
    parity_report,
    pvi_z_check,
    sigma_ode_residual,
    sigma_series,
    tau_coefficients,
)

CASES = [(L, kw) for L in Label for kw in pinned_bases(L)[:2]]
IDS = [f"{L.value}-{i}" for L in Label for i in range(len(pinned_bases(L)[:2]))]


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_formal_solution_solves_the_pair(case):
    L, kw = case
    sol = formal_solution(L, order=6, **kw)
    for r in sol.residuals():
        assert r.is_zero()
    for r in sol.hamilton_residuals():
        assert r.is_zero()


@pytest.mark.parametrize("case", CASES, ids=IDS)
def test_parity_structure(case):
    L, kw = case
    rep = parity_report(formal_solution(L, order=6, **kw))
    assert all(rep.values()), rep


@pytest.mark.parametrize("L", list(Label))
def test_hamilton_equations_reproduce_pair(L):
    c = build_curve(L, **pinned_bases(L)[0])
    assert hamilton_check(L, c.params) == {"q": True, "p": True}


def test_pvi_printed_hamiltonian_is_a_negative_control():
    c = build_curve("PVI", **pinned_bases("PVI")[0])
    d = FieldDescriptor(("t", "p", "q", "h"))
    p, q, t, h = (d.gen(v) for v in ("p", "q", "t", "h"))
    H = hamiltonian("PVI", c.params, p, q, t, h, printed=True)
    (fq, Pq), (fp, Pp) = compatibility_pair("PVI", c.params, p, q, t, h)
    assert (H.derivative("p") * fq - Pq).is_zero()
    assert not (-H.derivative("q") * fp - Pp).is_zero()


def test_pvi_z1_unsquared():
    c = build_curve("PVI", **pinned_bases("PVI")[0])
    d = FieldDescriptor(("t", "p", "q"))
    p, q, t = (d.gen(v) for v in ("p", "q", "t"))
    assert all(v.is_zero() for v in pvi_z_check(c.params, p, q, t).values())
    assert not all(v.is_zero() for v in pvi_z_check(c.params, p, q, t, printed=True).values())


@pytest.mark.parametrize("L", [Label.PI, Label.PII, Label.PIII, Label.PIV])
def test_sigma_ode_symbolic_through_hbar8(L):
    sol = formal_solution(L, order=9, **pinned_bases(L, symbolic=True)[0])
    res = sigma_ode_residual(sigma_series(sol), sol)
    assert all(c.is_zero() for k, c in res.items() if k <= 8)


def test_tau_pi_leading_order():
    sol = formal_solution("PI", order=3, q0="symbolic")
    q0 = sol.base.q0
    assert tau_coefficients(sol)[0] == q0 ** 3 * 4

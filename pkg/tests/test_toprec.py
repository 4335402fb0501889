"""Topological recursion: independent residue oracle, structural properties, cache."""

import itertools

import flint
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from painleve_tr.algebra import INF, residue
from painleve_tr.curves import build_curve
from painleve_tr.toprec import (
    TableCache,
    TopologicalRecursion,
    omega02_integral,
    table_bytes,
)

nonzero_q0 = st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(lambda f: f != 0)


def _pi(q0):
    return build_curve("PI", q0=f"{q0.numerator}/{q0.denominator}")


def test_omega11_against_literal_kernel():
    """Res of the kernel built by hand in sympy reproduces the engine's omega_1^(1) for PI."""
    z, z0 = sp.symbols("z z0")
    q0 = 1
    x = z**2 - 2 * q0
    y = 2 * z * (z**2 - 3 * q0)
    integral = sp.integrate(1 / (z0 - sp.Symbol("w")) ** 2, (sp.Symbol("w"), z, -z))
    K = sp.Rational(1, 2) * integral / ((y - y.subs(z, -z)) * sp.diff(x, z))
    B_conj = (1 / (z - (-z)) ** 2) * sp.diff(-z, z)
    want = sp.simplify(sp.residue(sp.simplify(K * B_conj), z, 0))
    engine = TopologicalRecursion(build_curve("PI", q0="1")).get(1, 1).as_rational(build_curve("PI", q0="1"))
    got = sp.sympify(str(engine).replace("^", "**")).subs(sp.Symbol("z"), z0)
    assert sp.simplify(got - want) == 0
    assert sp.simplify(want + (z0**2 + 3) / (288 * z0**4)) == 0


def test_omega02_integral_orientation():
    z, z0, w = sp.symbols("z z0 w")
    lit = sp.integrate(1 / (z0 - w) ** 2, (w, z, -z))
    ours = omega02_integral()
    assert sp.simplify(sp.sympify(str(ours).replace("^", "**")) - lit) == 0
    lit_inv = sp.integrate(1 / (z0 - w) ** 2, (w, z, 1 / z))
    ours_inv = omega02_integral(involution="inv")
    assert sp.simplify(sp.sympify(str(ours_inv).replace("^", "**")) - lit_inv) == 0


def test_kernel_normalisation_negative_control():
    """Doubling the kernel scales F^(2) by 2^3, so it cannot reproduce -7/207360."""
    c = build_curve("PI", q0="1")
    assert TopologicalRecursion(c).F(2) == flint.fmpq(-7, 207360)
    assert TopologicalRecursion(c, kernel_factor=1).F(2) == 8 * flint.fmpq(-7, 207360)


@given(nonzero_q0, st.integers(1, 2))
def test_residue_sum_zero_and_poles_at_branch_points(q0, g):
    c = _pi(q0)
    w = TopologicalRecursion(c).get(g, 1).as_rational(c)
    res = [residue(w, r, "z") for r in c.branch_points]
    assert all(r.is_zero() for r in res)
    assert (sum(res, w.desc.zero()) + residue(w, INF, "z")).is_zero()


@given(st.sampled_from([1, 3, -2]), st.fractions(min_value=1, max_value=3, max_denominator=3))
def test_odd_under_involution(theta, q0):
    """omega_1^(g)(sigma z) d(sigma z) = -omega_1^(g)(z) dz for g >= 1."""
    c = build_curve("PII", q0=f"{q0.numerator}/{q0.denominator}", params={"theta": str(theta)})
    w = TopologicalRecursion(c).get(1, 1).as_rational(c)
    s = c.sigma_z()
    assert (w.substitute("z", s) * s.derivative("z") + w).is_zero()


def test_symmetry_of_omega3():
    c = build_curve("PII", q0="symbolic", params={"theta": "1"})
    w = TopologicalRecursion(c).get(0, 3).as_rational(c)
    pts = [flint.fmpq(2, 3), flint.fmpq(-5, 2), flint.fmpq(7)]

    def at(a, b, d):
        return w.substitute("z1", a).substitute("z2", b).substitute("z3", d)

    ref = at(*pts)
    assert not ref.is_zero()
    for perm in itertools.permutations(pts):
        assert at(*perm) == ref


def test_f_homogeneity_pi():
    c = build_curve("PI", q0="symbolic")
    q0 = c.base.q0
    e = TopologicalRecursion(c)
    for g in (2, 3):
        assert (e.F(g) * q0 ** (5 * g - 5)).derivative("q0").is_zero()


@given(q0=nonzero_q0)
def test_cache_byte_identity(tmp_path_factory, q0):
    root = tmp_path_factory.mktemp("cache")
    c = _pi(q0)
    fresh = TopologicalRecursion(c, cache=TableCache(root))
    F_fresh = fresh.F(3)
    paths = sorted((root).rglob("omega_*.json"))
    before = {p.name: p.read_bytes() for p in paths}
    assert before
    cached = TopologicalRecursion(c, cache=TableCache(root))
    assert cached.F(3) == F_fresh
    for g, n in ((1, 1), (2, 1), (3, 1)):
        assert table_bytes(c, cached.get(g, n)) == before[f"omega_{g}_{n}.json"]
        assert table_bytes(c, TopologicalRecursion(c).get(g, n)) == before[f"omega_{g}_{n}.json"]
    after = {p.name: p.read_bytes() for p in sorted(root.rglob("omega_*.json"))}
    assert after == before

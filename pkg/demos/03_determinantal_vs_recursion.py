"""Correlators from the Lax pair against the recursion, for Painleve II."""
from painleve_tr import detform as df
from painleve_tr.curves import build_curve
from painleve_tr.painleve import formal_solution
from painleve_tr.toprec import TopologicalRecursion

kw = dict(q0="symbolic", params={"theta": "1"})
curve = build_curve("PII", **kw)
lax = df.build_lax(formal_solution("PII", order=6, **kw))

## Zero curvature and the spectral curve
print(df.zero_curvature_report(lax, through=4))
print(df.check_spectral_curve(lax, curve))

## Rank-one projector M(x) = sum hbar^k M^(k), solved order by order
tower = df.m_tower(lax, 4, curve)
res, traces = df.projector_residuals(tower)
print("M^2 = M and Tr M = 1 at every order:", all(r.is_zero() for r in res) and all(t.is_zero() for t in traces))

## W_1 and W_3 carry a sign (-1)^n relative to omega_n^(g); W_2 does not
engine = TopologicalRecursion(curve)
W1 = df.correlators(tower, 1, 3)
W2 = df.correlators(tower, 2, 2)
W3 = df.correlators(tower, 3, 1)
print("W_1 at hbar^1 = -omega_1^(1):", (W1.form(1) + engine.get(1, 1).as_rational(curve)).is_zero())
print("W_1 at hbar^3 = -omega_1^(2):", (W1.form(3) + engine.get(2, 1).as_rational(curve)).is_zero())
print("W_2 at hbar^2 = +omega_2^(1):", (W2.form(2) - engine.get(1, 2).as_rational(curve)).is_zero())
print("W_3 at hbar^1 = -omega_3^(0):", (W3.form(1) + engine.get(0, 3).as_rational(curve)).is_zero())

## At hbar^0, W_2 is the Bergman kernel minus its double pole at x1 = x2
print("W_2^(0) = B - dx1 dx2/(x1-x2)^2:", (W2.form(0) - df.shifted_bergman(curve)).is_zero())

## Topological-type conditions through hbar^4
for row in df.tt_report(tower, nmax=3, order=3):
    print(f"  W_{row['n']} {row['condition']}: {row['ok']}")

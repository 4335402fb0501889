"""Free energies of the Painleve I curve, and the tau function they reproduce."""
from painleve_tr.curves import build_curve
from painleve_tr.painleve import formal_solution, tau_coefficients
from painleve_tr.toprec import TopologicalRecursion, f0_closed_form, f1_closed_form

## The curve y^2 = 4 (x + 2 q0) (x - q0)^2, with q0 kept as a symbol
curve = build_curve("PI", q0="symbolic")
print("x(z) =", curve.x)
print("y(z) =", curve.y)
print("descriptor hash:", curve.descriptor_hash())

## Recursion output: omega_1^(1) as the coefficient of dz
engine = TopologicalRecursion(curve)
print("omega_1^(1) =", engine.get(1, 1).as_rational(curve))

## Symplectic invariants
print("F^(0) =", f0_closed_form(curve))
print("F^(1) =", f1_closed_form(curve))
for g in (2, 3):
    print(f"F^({g}) =", engine.F(g))

## The tau function from the formal solution of PI
sol = formal_solution("PI", order=7, q0="symbolic")
taus = tau_coefficients(sol)
D = sol.D  # d/dt acting through dq0/dt = -1/(12 q0)
print("dq0/dt =", D.q0dot)

## ln tau = -sum hbar^(2g-2) F^(g): compare t-derivatives order by order
print("g = 0:", (f0_closed_form(curve).derivative(D) + taus[0]).is_zero())
print("g = 1:", (f1_closed_form(curve).derivative(D) + taus[1]).is_zero())
for g in (2, 3):
    print(f"g = {g}:", (D(engine.F(g)) + taus[g]).is_zero())

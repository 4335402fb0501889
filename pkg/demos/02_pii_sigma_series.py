"""Formal hbar-expansion of Painleve II at an exact base point."""
from painleve_tr.curves import build_curve
from painleve_tr.painleve import formal_solution, parity_report, sigma_ode_residual, sigma_series

## Base point q0 = 1, theta = 1; the time t follows from the leading relation
curve = build_curve("PII", q0="1", params={"theta": "1"})
print("t =", curve.base.t, " branch points of x:", curve.a, curve.b)

## (q, p) as hbar-series whose coefficients are Taylor jets in t - t_base
sol = formal_solution("PII", order=8, q0="1", params={"theta": "1"})
for k, c in sol.q.items():
    print(f"q at hbar^{k}:", c.value())

## The sigma function only involves even powers of hbar
sigma = sigma_series(sol)
print("sigma parity:", sigma.parity)
for k, c in sigma.items():
    print(f"sigma at hbar^{k}:", c.value())

## sigma solves its second-order ODE order by order
res = sigma_ode_residual(sigma, sol)
print("sigma-ODE residual vanishes through hbar^6:", all(c.is_zero() for k, c in res.items() if k <= 6))

## Behaviour under hbar -> -hbar
for name, ok in parity_report(sol).items():
    print(f"{name}: {ok}")

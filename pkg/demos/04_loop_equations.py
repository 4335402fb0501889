"""Loop equations of the determinantal correlators at a Painleve III base point."""
from painleve_tr import detform as df
from painleve_tr.curves import build_curve, pinned_bases
from painleve_tr.painleve import formal_solution

kw = pinned_bases("PIII", symbolic=False)[0]
curve = build_curve("PIII", **kw)
lax = df.build_lax(formal_solution("PIII", order=6, **kw))
tower = df.m_tower(lax, 4, curve)

## First loop equation: P_1 = W_2(x, x) + W_1(x)^2 with P_1 = -hbar^-2 det D
print("first loop equation, orders -2..2:",
      [r.is_zero() for r in df.first_loop_equation(tower, 4)])

## Second loop equation: x^2 P_2 is x-independent only at even hbar orders.
## The odd orders carry W_1'(x1)/x from the bounded Lax matrix at infinity.
report = df.loop_equation_check(tower, 2)
for row in report["orders"]:
    print(f"hbar^{row['order']}: x^2 P_2 constant in x: {row['stated']}, "
          f"after removing W_1'(x1) x: {row['corrected']}")

"""Formal hbar-series solutions of the six Hamiltonian Painleve systems.

A solution (q, p) = sum_k (q_k, p_k) hbar^k is built order by order from the
first-order pair hbar q' = H_p, hbar p' = -H_q.  Time derivatives act on the
coefficient ring through a :class:`TimeDerivation`:

* symbolic mode: coefficients are rational functions of q0 (and t for PIV),
  d/dt = q0' d/dq0 (+ d/dt for PIV);
* jet mode: coefficients are Taylor jets in e = t - t_base with exact
  field-element entries, and each derivative costs one jet order.
"""

from __future__ import annotations

from dataclasses import dataclass

import flint

from .algebra.field import FieldDescriptor, FieldElement
from .algebra.hbar import EVEN, HbarSeries
from .algebra.jet import Jet
from .curves import (
    PARAM_NAMES,
    BasePoint,
    Label,
    MonodromyParams,
    SingularTime,
    derive_theta_inf_PIV,
    leading_relation,
    make_base,
    time_derivative_q0,
)

DEFAULT_ORDER = 8

# Hamiltonians with explicit hbar terms: H itself is not invariant under
# (p, q, hbar) -> (p+, q+, -hbar), only hbar^2 d ln tau/dt is.
HBAR_DEPENDENT_H = (Label.PIII, Label.PVI)


def _zero(x):
    return x.is_zero() if hasattr(x, "is_zero") else x == 0


def _theta(params, *names):
    return tuple(params[n] for n in names)


# ---------------------------------------------------------------------------
# Hamiltonians and first-order systems


def hamiltonian(label, params, p, q, t, h=0, printed=False):
    """H_J(p, q, t, hbar) evaluated in any ring (field elements, series, jets).

    For PVI the hbar shift in the q-linear term is 2*hbar, which is what the
    zero-curvature system produces; ``printed=True`` gives the single-hbar
    variant, whose Hamilton equations contradict that system.
    """
    L = Label.parse(label)
    half = flint.fmpq(1, 2)
    if L is Label.PI:
        return p * p * half - q ** 3 * 2 - t * q
    if L is Label.PII:
        (th,) = _theta(params, "theta")
        return p * p * half + (q * q + t * half) * p + q * th
    if L is Label.PIII:
        t0, ti = _theta(params, "theta0", "thetainf")
        return (q * q * p * p * 2 + (-(t * q * q) + q * ti + t) * p * 2 - t * q * (t0 + ti) - t * t
                - (t0 * t0 - ti * ti) / 4 - h * p * q) / t
    if L is Label.PIV:
        t0, ti = _theta(params, "theta0", "thetainf")
        return q * p * p + (q * q + t * q + t0) * p * 2 + q * (t0 + ti) * 2
    if L is Label.PV:
        t0, t1, ti = _theta(params, "theta0", "theta1", "thetainf")
        return (q * (q - 1) ** 2 * p * p
                + ((q - 1) ** 2 * ((t0 - t1 + ti) / 2) + q * (q - 1) * (t0 + t1) - t * q) * p
                + q * (t0 * (t0 + t1 + ti) / 2)) / t
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    th = -h + tt
    c = 1 if printed else 2
    return (q * (q - 1) * (q - t) * p * p
            - ((q - 1) * (q - t) * t0 + q * (q - t) * t1 + q * (q - 1) * th) * p
            + (-(h * c) + t0 + t1 + tt + ti) * (q - t) * ((t0 + t1 + tt - ti) / 4)
            + ((t - 1) * t0 + t * t1) * th / 2) / (t * (t - 1))


def compatibility_pair(label, params, p, q, t, h=0):
    """The first-order system from zero curvature, as ((f_q, P_q), (f_p, P_p)).

    Meaning: f_q * hbar q' = P_q and f_p * hbar p' = P_p, with the prefactors
    f (1, t or t(t-1)) kept separate so P is polynomial where possible.
    """
    L = Label.parse(label)
    if L is Label.PI:
        return (1, p), (1, q * q * 6 + t)
    if L is Label.PII:
        (th,) = _theta(params, "theta")
        return (1, p + q * q + t / 2), (1, -(q * p * 2) - th)
    if L is Label.PIII:
        t0, ti = _theta(params, "theta0", "thetainf")
        Pq = q * q * p * 4 - t * q * q * 2 + q * (-h + ti * 2) + t * 2
        Pp = -(q * p * p * 4) - p * (-(t * q * 4) + ti * 2 - h) + t * (t0 + ti)
        return (t, Pq), (t, Pp)
    if L is Label.PIV:
        t0, ti = _theta(params, "theta0", "thetainf")
        return (1, (p * q + q * q + t * q + t0) * 2), (1, -(p * p) - p * q * 4 - t * p * 2 - (t0 + ti) * 2)
    if L is Label.PV:
        t0, t1, ti = _theta(params, "theta0", "theta1", "thetainf")
        Pq = (q * (q - 1) ** 2 * p * 2 + q * q * ((t0 * 3 + t1 + ti) / 2) - q * (t + t0 * 2 + ti)
              + (t0 - t1 + ti) / 2)
        Pp = (-((q * q * 3 - q * 4 + 1) * p * p) + (-(q * (t0 * 3 + t1 + ti)) + t + t0 * 2 + ti) * p
              - t0 * (t0 + t1 + ti) / 2)
        return (t, Pq), (t, Pp)
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    th = -h + tt
    f = t * (t - 1)
    Pq = q * (q - 1) * (q - t) * p * 2 - (q - 1) * (q - t) * t0 - q * (q - t) * t1 - q * (q - 1) * th
    Pp = ((-(q * q * 3) + q * (t + 1) * 2 - t) * p * p
          + ((q * 2 - t - 1) * t0 + (q * 2 - t) * t1 + (q * 2 - 1) * th) * p
          - (t0 + t1 + tt - ti) * (-(h * 2) + t0 + t1 + tt + ti) / 4)
    return (f, Pq), (f, Pp)


def hamilton_check(label, params):
    """Symbolic check that Hamilton's equations give the compatibility pair.

    Returns {"q": bool, "p": bool}.
    """
    L = Label.parse(label)
    d = FieldDescriptor(("t", "p", "q", "h"))
    p, q, t, h = (d.gen(v) for v in ("p", "q", "t", "h"))
    H = hamiltonian(L, params, p, q, t, h)
    (fq, Pq), (fp, Pp) = compatibility_pair(L, params, p, q, t, h)
    ok_q = (H.derivative("p") * fq - Pq).is_zero()
    ok_p = (-H.derivative("q") * fp - Pp).is_zero()
    return {"q": ok_q, "p": ok_p}


# ---------------------------------------------------------------------------
# tau and sigma from (p, q)


def tau_logderiv(label, params, p, q, t, h=0):
    """hbar^2 d/dt ln tau_J in terms of (p, q)."""
    L = Label.parse(label)
    if L in (Label.PI, Label.PII, Label.PIV):
        return hamiltonian(L, params, p, q, t, h)
    if L is Label.PIII:
        return hamiltonian(L, params, p, q, t, h) + h * p * q / t
    if L is Label.PV:
        t0, t1, ti = _theta(params, "theta0", "theta1", "thetainf")
        return (hamiltonian(L, params, p, q, t, h) - (t0 + ti) / 2
                - (t0 - t1 + ti) * (t0 + t1 + ti) / (t * 4))
    return hamiltonian(L, params, p, q, t, 0)


def sigma_from(label, params, p, q, t, h=0):
    """Okamoto's sigma function in terms of (p, q)."""
    L = Label.parse(label)
    tau = tau_logderiv(L, params, p, q, t, h)
    if L in (Label.PI, Label.PII):
        return tau
    if L is Label.PIII:
        return tau * t
    if L is Label.PIV:
        t0, ti = _theta(params, "theta0", "thetainf")
        return tau + t * (t0 + ti / 3) * 2
    if L is Label.PV:
        return hamiltonian(L, params, p, q, t, h) * t
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    return tau * t * (t - 1) + t * (tt * tt - ti * ti) / 4 - (t0 * t0 + tt * tt - t1 * t1 - ti * ti) / 8


def sigma_ode(label, params, s, sd, sdd, t, h2):
    """Left-hand side of the sigma-form ODE; ``h2`` stands for hbar^2."""
    L = Label.parse(label)
    if L is Label.PI:
        return h2 * sdd * sdd + sd ** 3 * 4 + t * sd * 2 - s * 2
    if L is Label.PII:
        (th,) = _theta(params, "theta")
        return h2 * sdd * sdd + sd ** 3 * 4 + t * sd * sd * 2 - s * sd * 2 - th * th / 4
    if L is Label.PIII:
        t0, ti = _theta(params, "theta0", "thetainf")
        a = t * sdd - sd
        return (h2 * a * a - (s * 2 - t * sd) * (sd * sd - t * t * 4) * 4
                - (sd * sd + t * t * 4) * (t0 * t0 + ti * ti) * 2 + t * sd * (t0 * ti * 16))
    if L is Label.PIV:
        t0, ti = _theta(params, "theta0", "thetainf")
        al = -(t0 * 2) - ti * flint.fmpq(2, 3)
        be = t0 * 2 - ti * flint.fmpq(2, 3)
        ga = ti * flint.fmpq(4, 3)
        u = t * sd - s
        return h2 * sdd * sdd - u * u * 4 + (sd + al) * (sd + be) * (sd + ga) * 4
    if L is Label.PV:
        t0, t1, ti = _theta(params, "theta0", "theta1", "thetainf")
        n1, n2, n3 = -(t0 - t1 + ti) / 2, -t0, -(t0 + t1 + ti) / 2
        u = s - t * sd + sd * sd * 2 + sd * (n1 + n2 + n3)
        return h2 * t * t * sdd * sdd - u * u + sd * (sd + n1) * (sd + n2) * (sd + n3) * 4
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    u = sd * (t * sd - s) * 2 - sd * sd + (tt * tt - ti * ti) * (t1 * t1 - t0 * t0) / 16
    prod = ((sd + (tt + ti) ** 2 / 4) * (sd + (tt - ti) ** 2 / 4)
            * (sd + (t0 + t1) ** 2 / 4) * (sd + (t0 - t1) ** 2 / 4))
    return h2 * sd * t * t * (t - 1) ** 2 * sdd * sdd + u * u - prod


# ---------------------------------------------------------------------------
# hbar -> -hbar


def pvi_z(params, p, q, t, printed=False):
    """(z0, z1, zt) in terms of (p, q) for PVI.

    ``printed=True`` squares the factor s = theta0 + theta1 + thetat - thetainf
    in the p-linear term of z1; that version fails both the p relation and
    the diagonality of A_inf (see :func:`pvi_z_check`).
    """
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    s = t0 + t1 + tt - ti
    s1 = s * s if printed else s
    z0 = (q * q * (q - 1) * (q - t) * p * p
          - p * q * (q * q * s - q * ((t0 + t1 - ti) * t + t0 + tt - ti) + (t0 - ti) * t)
          + q * q * (s * s / 4) - q * (s * ((t0 + t1 - tt - ti) * t + t0 - t1 - ti + tt) / 4)
          - t * t0 * ti) / (t * ti)
    z1 = (-(q * (q - 1) ** 2 * (q - t) * p * p)
          + p * (q - 1) * (q * q * s1 - q * ((t0 + t1 - ti) * t + t0 + tt) + t * t0)
          - (q - 1) ** 2 * (s * s / 4) + (q - 1) * (s * (t * (t0 + t1 - tt - ti) + ti * 2 - t1 * 2) / 4)
          - (t - 1) * (t1 * ti)) / ((t - 1) * ti)
    zt = -z0 - z1 - (t0 + t1 + tt + ti) / 2
    return z0, z1, zt


def pvi_residue_matrices(params, p, q, t, z=None):
    """A_0, A_1, A_t as nested lists."""
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    z0, z1, zt = z if z is not None else pvi_z(params, p, q, t)
    A0 = [[z0 + t0 / 2, -q / t], [t * z0 * (z0 + t0) / q, -(z0 + t0 / 2)]]
    A1 = [[z1 + t1 / 2, (q - 1) / (t - 1)], [-((t - 1) * z1 * (z1 + t1) / (q - 1)), -(z1 + t1 / 2)]]
    At = [[zt + tt / 2, -(q - t) / (t * (t - 1))], [t * (t - 1) * zt * (zt + tt) / (q - t), -(zt + tt / 2)]]
    return A0, A1, At


def pvi_z_check(params, p, q, t, printed=False):
    """Residuals of A_inf = diag(thetainf/2, -thetainf/2) and of the p relation."""
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    z0, z1, zt = pvi_z(params, p, q, t, printed=printed)
    A0, A1, At = pvi_residue_matrices(params, p, q, t, (z0, z1, zt))
    Ainf = [[-(A0[i][j] + A1[i][j] + At[i][j]) for j in range(2)] for i in range(2)]
    return {
        "A_inf[0][0] - thetainf/2": Ainf[0][0] - ti / 2,
        "A_inf[0][1]": Ainf[0][1],
        "A_inf[1][0]": Ainf[1][0],
        "p relation": p - ((z0 + t0) / q + (z1 + t1) / (q - 1) + (zt + tt) / (q - t)),
    }


def parity_conjugate_pq(label, params, p, q, t):
    """(p^dagger, q^dagger) from the printed hbar -> -hbar relations."""
    L = Label.parse(label)
    if L is Label.PI:
        return -p, q
    if L is Label.PII:
        (th,) = _theta(params, "theta")
        return p, -q - th / p
    if L is Label.PIII:
        t0, ti = _theta(params, "theta0", "thetainf")
        return p, (-(q * p * p * 2) + (t * q - ti) * p * 2 + t * (t0 + ti)) / ((p - t) * p * 2)
    if L is Label.PIV:
        t0, ti = _theta(params, "theta0", "thetainf")
        u = p * q
        return (q * (u + t0 + ti) * 2) / (u + t0 * 2), p * (u + t0 * 2) / ((u + t0 + ti) * 2)
    if L is Label.PV:
        t0, t1, ti = _theta(params, "theta0", "theta1", "thetainf")
        u = p * q
        a = u * 2 + t0 - t1 + ti
        b = (u + t0) * (u * 2 + t0 + t1 + ti)
        return q * b / a, p * a / b
    t0, t1, tt, ti = _theta(params, *PARAM_NAMES[Label.PVI])
    z0, z1, zt = pvi_z(params, p, q, t)
    n0 = t * t * z0 * (z0 + t0) * (q - 1)
    qd = n0 / (n0 - (t - 1) ** 2 * z1 * (z1 + t1) * q)
    pd = (z0 + t0) / qd + (z1 + t1) / (qd - 1) + (zt + tt) / (qd - t)
    return pd, qd


# ---------------------------------------------------------------------------
# time derivation


class TimeDerivation:
    """d/dt on the coefficient ring of a formal solution.

    ``mode`` is "symbolic" (rational functions of q0, and t for PIV) or "jet".
    """

    def __init__(self, label, params, base, jet_order=None):
        self.label = Label.parse(label)
        self.params = params
        self.base = base
        sym = base.symbolic
        if sym:
            if self.label in (Label.PV, Label.PVI):
                raise ValueError("PV and PVI run at exact numeric base points")
            self.mode = "symbolic"
            self.q0dot = time_derivative_q0(self.label, params, base.q0, base.t)
            self.t = base.t
            self.jet_order = None
        else:
            self.mode = "jet"
            self.jet_order = jet_order or DEFAULT_ORDER + 4
            self.t = Jet.variable(base.t, self.jet_order)
            self.q0dot = None

    def __call__(self, f):
        if self.mode == "jet":
            if isinstance(f, Jet):
                return f.derivative()
            return f * 0
        if not isinstance(f, FieldElement):
            return self.base.q0 * 0
        out = f.derivative("q0") * self.q0dot if "q0" in f.desc.variables else f * 0
        if self.label is Label.PIV and "t" in f.desc.variables:
            out = out + f.derivative("t")
        return out

    def lift(self, v):
        """A constant as a ring element."""
        if self.mode == "jet":
            return Jet.constant(v if isinstance(v, FieldElement) else self.base.t * 0 + v, self.jet_order)
        return v

    def value(self, f):
        """The value at the base point."""
        return f.c[0] if isinstance(f, Jet) else f

    def one(self):
        return self.lift(self.base.t * 0 + 1)

    def annihilates_leading_relation(self):
        """D applied to A_J(q0, t) (or to theta_inf(q0, t) for PIV) is exactly zero."""
        if self.mode != "symbolic":
            raise ValueError("symbolic mode only")
        if self.label is Label.PIV:
            ti = derive_theta_inf_PIV(self.base.q0, self.base.t, self.params["theta0"])
            return self(ti).is_zero()
        A = leading_relation(self.label, self.params, self.base.q0, self.base.t)
        return self(A * 1).is_zero() and A.is_zero()


# ---------------------------------------------------------------------------
# formal solutions


@dataclass
class FormalSolution:
    label: Label
    params: MonodromyParams
    base: BasePoint
    q: HbarSeries
    p: HbarSeries
    D: TimeDerivation

    @property
    def order(self):
        return self.q.prec - 1

    def hbar(self, prec=None):
        prec = self.q.prec if prec is None else prec
        return HbarSeries.hbar(self.D.one(), prec)

    def residuals(self):
        """Compatibility-pair residuals f*hbar*x' - P(x) as series."""
        h = self.hbar()
        (fq, Pq), (fp, Pp) = compatibility_pair(self.label, self.params, self.p, self.q, self.D.t, h)
        rq = self.q.map(self.D).shift(1) * fq - Pq
        rp = self.p.map(self.D).shift(1) * fp - Pp
        return rq, rp

    def hamilton_residuals(self):
        """hbar x' -+ dH evaluated through the symbolic partial derivatives."""
        d = FieldDescriptor(("t", "p", "q", "h"))
        P_, Q_, T_, H_ = (d.gen(v) for v in ("p", "q", "t", "h"))
        H = hamiltonian(self.label, self.params, P_, Q_, T_, H_)
        Hp = _evaluate_rational(H.derivative("p"), self)
        Hq = _evaluate_rational(H.derivative("q"), self)
        return self.q.map(self.D).shift(1) - Hp, self.p.map(self.D).shift(1) + Hq

    def to_json(self):
        def ser(s):
            return {"lo": s.lo, "prec": s.prec, "parity": s.parity,
                    "coefficients": [_coeff_str(c) for c in s.coeffs]}
        return {
            "label": self.label.value,
            "params": self.params.to_json(),
            "base": self.base.to_json(),
            "mode": self.D.mode,
            "truncation": self.order,
            "q": ser(self.q),
            "p": ser(self.p),
        }


def _coeff_str(c):
    if isinstance(c, Jet):
        return [str(x) for x in c.c]
    return str(c)


def _evaluate_rational(f, sol):
    """Evaluate a rational function of (p, q, t, h) on the solution series."""
    a = f.a
    num, den = a.num, a.den
    names = a.ctx.names() if hasattr(a, "ctx") else f.desc.variables
    vals = {"p": sol.p, "q": sol.q, "t": sol.D.t, "h": sol.hbar(), "q0": sol.base.q0}
    return _eval_mpoly(num, names, vals, sol) / _eval_mpoly(den, names, vals, sol)


def _eval_mpoly(poly, names, vals, sol):
    total = None
    prec = sol.q.prec
    for exps, c in zip(poly.monoms(), poly.coeffs()):
        term = HbarSeries([sol.D.one() * c], 0, prec, sol.q.zero)
        for name, e in zip(names, exps):
            if e:
                term = term * (vals[name] ** int(e))
        total = term if total is None else total + term
    return total if total is not None else sol.hbar() * 0


def leading_pair(label, params, base, D=None):
    """(q0, p0) at the base point (exact field elements)."""
    L = Label.parse(label)
    q0, t = base.q0, base.t
    (_, P0), _ = compatibility_pair(L, params, q0 * 0, q0, t, 0)
    (_, P1), _ = compatibility_pair(L, params, q0 * 0 + 1, q0, t, 0)
    slope = P1 - P0
    if _zero(slope):
        raise SingularTime("first equation does not determine p0")
    p0 = -P0 / slope
    _, (_, Pp) = compatibility_pair(L, params, p0, q0, t, 0)
    if not _zero(Pp):
        raise SingularTime(f"order-zero conditions inconsistent: {Pp}")
    if L is Label.PV:
        # cross-check against the curve data
        if not (base.get("p0") - p0).is_zero():
            raise ValueError("PV p0 disagrees with the curve data")
    return q0, p0


def solve_leading(label, params=None, base=None, **kw):
    L = Label.parse(label)
    if base is None or not isinstance(params, MonodromyParams):
        params, base = make_base(L, params, **kw)
    return leading_pair(L, params, base)


def _linearization(label, params, x0, t, one):
    """Jacobian of (P_q, P_p) in (q, p) at hbar = 0, via a first-order perturbation."""
    q0, p0 = x0
    h = HbarSeries.hbar(one, 2)
    cols = []
    base_q = HbarSeries([q0], 0, 2, q0 * 0)
    base_p = HbarSeries([p0], 0, 2, p0 * 0)
    (_, A0), (_, B0) = compatibility_pair(label, params, base_p, base_q, t, h)
    for dq, dp in ((h, 0), (0, h)):
        (_, A), (_, B) = compatibility_pair(label, params, base_p + dp, base_q + dq, t, h)
        cols.append((A[1] - A0[1], B[1] - B0[1]))
    (a, c), (b, d) = cols
    return a, b, c, d


def _solve2(a, b, c, d, r1, r2):
    det = a * d - b * c
    if _zero(det.c[0] if isinstance(det, Jet) else det):
        raise SingularTime("linearization is singular at the base point")
    return (d * r1 - b * r2) / det, (a * r2 - c * r1) / det


def _jet_leading(label, params, base, D):
    """q0(t), p0(t) as jets around the base time (chord iteration)."""
    q0, p0 = leading_pair(label, params, base)
    n = D.jet_order
    a, b, c, d = _linearization(label, params, (q0, p0), base.t, q0 * 0 + 1)
    q = Jet.constant(q0, n)
    p = Jet.constant(p0, n)
    for _ in range(n + 1):
        (_, A), (_, B) = compatibility_pair(label, params, p, q, D.t, 0)
        dq, dp = _solve2(a, b, c, d, A, B)
        q, p = q - dq, p - dp
    (_, A), (_, B) = compatibility_pair(label, params, p, q, D.t, 0)
    if not (A.is_zero() and B.is_zero()):
        raise ArithmeticError("leading jets did not converge")
    return q, p


def formal_solution(label, params=None, base=None, order=DEFAULT_ORDER, jet_order=None, **kw):
    """Formal solution through hbar^order."""
    L = Label.parse(label)
    if base is None or not isinstance(params, MonodromyParams):
        params, base = make_base(L, params, **kw)
    sym = bool(base.symbolic)
    D = TimeDerivation(L, params, base, jet_order=jet_order or (None if sym else order + 4))
    if D.mode == "jet":
        q0, p0 = _jet_leading(L, params, base, D)
    else:
        q0, p0 = leading_pair(L, params, base)
    zero = q0 * 0
    sol = FormalSolution(L, params, base, HbarSeries([q0], 0, 1, zero), HbarSeries([p0], 0, 1, zero), D)
    return extend_solution(sol, order)


def extend_solution(sol, order):
    """Extend the solution to hbar^order by solving the linearized pair order by order."""
    L, params, D = sol.label, sol.params, sol.D
    q, p = sol.q, sol.p
    if order < q.prec:
        return FormalSolution(L, params, sol.base, q.truncate(order + 1), p.truncate(order + 1), D)
    one = D.one()
    a, b, c, d = _linearization(L, params, (q[0], p[0]), D.t, one)
    zero = q.zero
    for k in range(q.prec, order + 1):
        qk = HbarSeries(q.coeffs + [zero], 0, k + 1, zero)
        pk = HbarSeries(p.coeffs + [zero], 0, k + 1, zero)
        h = HbarSeries.hbar(one, k + 1)
        (fq, Pq), (fp, Pp) = compatibility_pair(L, params, pk, qk, D.t, h)
        rq = (qk.map(D).shift(1) * fq - Pq)[k]
        rp = (pk.map(D).shift(1) * fp - Pp)[k]
        dq, dp = _solve2(a, b, c, d, rq, rp)
        q = HbarSeries(q.coeffs + [dq], 0, k + 1, zero)
        p = HbarSeries(p.coeffs + [dp], 0, k + 1, zero)
    return FormalSolution(L, params, sol.base, q, p, D)


# ---------------------------------------------------------------------------
# derived series


def tau_logderiv_series(sol):
    """hbar^2 d/dt ln tau_J as a series (even in hbar)."""
    if sol.label is not Label.PI and not sol.base.symbolic and _zero(sol.base.t):
        raise SingularTime("t = 0")
    return tau_logderiv(sol.label, sol.params, sol.p, sol.q, sol.D.t, sol.hbar())


def tau_coefficients(sol):
    """d/dt tau^(g) for g = 0, 1, ...: the hbar^(2g) coefficients of tau_logderiv_series."""
    s = tau_logderiv_series(sol)
    return [s[2 * g] for g in range((s.prec + 1) // 2)]


def sigma_series(sol):
    return sigma_from(sol.label, sol.params, sol.p, sol.q, sol.D.t, sol.hbar())


def sigma_ode_residual(sigma, sol):
    """Residual series of the sigma-form ODE; it vanishes to the available order."""
    D = sol.D
    sd = sigma.map(D)
    sdd = sd.map(D)
    h2 = HbarSeries.hbar(D.one(), sigma.prec, power=2)
    return sigma_ode(sol.label, sol.params, sigma, sd, sdd, D.t, h2)


def parity_conjugate(sol):
    """(q^dagger, p^dagger) as series; should equal (q, p) with hbar -> -hbar."""
    p0 = sol.p[0]
    v = p0.c[0] if isinstance(p0, Jet) else p0
    needs_p = sol.label in (Label.PII, Label.PIII)
    if needs_p and _zero(v):
        raise ZeroDivisionError("p^(0) = 0; the conjugation divides by p")
    pd, qd = parity_conjugate_pq(sol.label, sol.params, sol.p, sol.q, sol.D.t)
    return FormalSolution(sol.label, sol.params, sol.base, qd, pd, sol.D)


def parity_report(sol):
    """Checks of the hbar -> -hbar structure; every value should be True."""
    conj = parity_conjugate(sol)
    out = {
        "q^dagger = q(-hbar)": (conj.q - sol.q.flip()).is_zero(),
        "p^dagger = p(-hbar)": (conj.p - sol.p.flip()).is_zero(),
    }
    h = sol.hbar()
    if sol.label not in HBAR_DEPENDENT_H:
        H1 = hamiltonian(sol.label, sol.params, sol.p, sol.q, sol.D.t, h)
        H2 = hamiltonian(sol.label, sol.params, conj.p, conj.q, sol.D.t, -h)
        out["H(p+, q+, t, -hbar) = H(p, q, t, hbar)"] = (H1 - H2).is_zero()
    T1 = tau_logderiv(sol.label, sol.params, sol.p, sol.q, sol.D.t, h)
    T2 = tau_logderiv(sol.label, sol.params, conj.p, conj.q, sol.D.t, -h)
    out["tau'(p+, q+, t, -hbar) = tau'(p, q, t, hbar)"] = (T1 - T2).is_zero()
    p2, q2 = parity_conjugate_pq(sol.label, sol.params, conj.p, conj.q, sol.D.t)
    out["dagger twice"] = (q2 - sol.q).is_zero() and (p2 - sol.p).is_zero()
    s = sigma_series(sol)
    out["sigma even"] = s.parity == EVEN or s.is_zero()
    out["tau even"] = tau_logderiv_series(sol).parity == EVEN
    return out

"""Spectral curves of the six Painleve equations.

Each curve is the genus-0 curve y^2 = E_J(x) with E_J = -det D^(0), written
as E_J(x) = (x - a)(x - b) C_J(x)^2 and parametrized rationally by

* PI:      x = z^2 - 2 q0,  y = 2 z (z^2 - 3 q0), one branch point z = 0;
* PII-PVI: x = (a+b)/2 + (b-a)/4 (z + 1/z), y = (b-a)/4 (z - 1/z) C_J(x(z)),
  branch points z = +1, -1 and involution z -> 1/z.

Base points are parametrized by q0: t is derived from q0 for PI-PIII, PIV
takes (q0, t) and derives theta_inf, PV starts from the double zero Q0 and
PVI takes an exact pair (q0, t) checked against its leading relation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

from .algebra.field import QQ, FieldDescriptor, FieldElement, adjoin_sqrt, to_fmpq, unify
from .algebra.poly import numerator_denominator

SCHEMA_VERSION = 1


class Label(str, Enum):
    PI = "PI"
    PII = "PII"
    PIII = "PIII"
    PIV = "PIV"
    PV = "PV"
    PVI = "PVI"

    @classmethod
    def parse(cls, s):
        if isinstance(s, cls):
            return s
        s = str(s).upper().replace("P", "", 1) if str(s).upper().startswith("P") else str(s).upper()
        roman = {"1": "I", "2": "II", "3": "III", "4": "IV", "5": "V", "6": "VI"}.get(s, s)
        return cls("P" + roman)


PainleveLabel = Label

PARAM_NAMES = {
    Label.PI: (),
    Label.PII: ("theta",),
    Label.PIII: ("theta0", "thetainf"),
    Label.PIV: ("theta0", "thetainf"),
    Label.PV: ("theta0", "theta1", "thetainf"),
    Label.PVI: ("theta0", "theta1", "thetat", "thetainf"),
}


class CurveError(ValueError):
    pass


class SingularMonodromy(CurveError):
    pass


class SingularTime(CurveError):
    pass


class DegenerateCurve(CurveError):
    pass


class LeadingRelationError(CurveError):
    pass


class Unsupported(CurveError):
    pass


def _el(v, desc=QQ):
    if isinstance(v, FieldElement):
        return v
    return desc.element(to_fmpq(v))


# ---------------------------------------------------------------------------
# monodromy parameters


@dataclass(frozen=True)
class MonodromyParams:
    """Monodromy parameters of one label, each a field element."""

    label: Label
    values: tuple  # ((name, FieldElement), ...)

    @classmethod
    def make(cls, label, check=True, **kw):
        label = Label.parse(label)
        names = PARAM_NAMES[label]
        extra = set(kw) - set(names)
        if extra:
            raise ValueError(f"unknown parameters for {label.value}: {sorted(extra)}")
        vals = []
        for n in names:
            if n not in kw:
                raise ValueError(f"{label.value} needs parameter {n}")
            vals.append((n, _el(kw[n])))
        p = cls(label, tuple(vals))
        if check:
            p.check_generic()
        return p

    def __getitem__(self, name):
        for n, v in self.values:
            if n == name:
                return v
        raise KeyError(name)

    def as_dict(self):
        return dict(self.values)

    def replace(self, **kw):
        d = self.as_dict()
        d.update({k: _el(v) for k, v in kw.items()})
        return MonodromyParams.make(self.label, **d)

    def check_generic(self):
        """Non-vanishing and non-resonance conditions on the parameters."""
        L = self.label
        bad = []

        def nz(expr, what):
            if expr.is_zero():
                bad.append(what)

        if L is Label.PII:
            nz(self["theta"], "theta = 0")
        elif L in (Label.PIII, Label.PIV):
            t0, ti = self["theta0"], self["thetainf"]
            nz(t0, "theta0 = 0")
            nz(ti, "thetainf = 0")
            nz(ti * ti - t0 * t0, "thetainf^2 = theta0^2")
        elif L is Label.PV:
            t0, t1, ti = self["theta0"], self["theta1"], self["thetainf"]
            for n in ("theta0", "theta1", "thetainf"):
                nz(self[n], f"{n} = 0")
            for e0, e1 in product((1, -1), repeat=2):
                nz(ti + t0 * e0 + t1 * e1, f"thetainf {e0:+d} theta0 {e1:+d} theta1 = 0")
        elif L is Label.PVI:
            t0, t1, tt, ti = (self[n] for n in PARAM_NAMES[L])
            for n in PARAM_NAMES[L]:
                nz(self[n], f"{n} = 0")
            nz(t0 * t0 - t1 * t1, "theta0^2 = theta1^2")
            for e0, e1 in product((1, -1), repeat=2):
                nz(ti + t0 * e0 + t1 * e1, f"thetainf {e0:+d} theta0 {e1:+d} theta1 = 0")
            for e0, e1, et in product((1, -1), repeat=3):
                nz(ti + t0 * e0 + t1 * e1 + tt * et,
                   f"thetainf {e0:+d} theta0 {e1:+d} theta1 {et:+d} thetat = 0")
        if bad:
            raise SingularMonodromy(f"{L.value}: " + "; ".join(bad))
        return True

    def to_json(self):
        return {n: str(v) for n, v in self.values}


# ---------------------------------------------------------------------------
# leading relations and singular times


def leading_relation(label, params, q0, t):
    """A_J(q0, t); zero exactly on the leading-order locus."""
    L = Label.parse(label)
    if L is Label.PI:
        return q0 * q0 * 6 + t
    if L is Label.PII:
        return q0 ** 3 * 2 + t * q0 - params["theta"]
    if L is Label.PIII:
        t0, ti = params["theta0"], params["thetainf"]
        return t * q0 ** 4 + t0 * q0 ** 3 - ti * q0 - t
    if L is Label.PIV:
        t0, ti = params["theta0"], params["thetainf"]
        return q0 ** 4 * 3 + t * q0 ** 3 * 4 + (t * t - ti * 2) * q0 * q0 - t0 * t0
    if L is Label.PV:
        t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
        m = t0 - t1 - ti
        pl = t0 - t1 + ti
        c3 = t * t * 2 - (t0 + t1) * t * 4 - t0 * t0 - t1 * t1 - ti * ti + ti * (t0 - t1) * 4 + t0 * t1 * 2
        c2 = t * t * 2 + (t0 + t1) * t * 4 - t0 * t0 - t1 * t1 - ti * ti - ti * (t0 - t1) * 4 + t0 * t1 * 2
        return (m * m * q0 ** 5 - m * m * 3 * q0 ** 4 - c3 * 2 * q0 ** 3 - c2 * 2 * q0 ** 2
                - pl * pl * 3 * q0 + pl * pl)
    t0, t1, tt, ti = (params[n] for n in PARAM_NAMES[L])
    return (ti * ti - t0 * t0 * t / q0 ** 2 + (t - 1) * t1 * t1 / (q0 - 1) ** 2
            - tt * tt * t * (t - 1) / (q0 - t) ** 2)


def singular_time_polynomial(label, params, q0, t=None):
    """Value of the singular-time polynomial; zero iff the base point is singular."""
    L = Label.parse(label)
    if L is Label.PI:
        return _el(q0)
    if L is Label.PII:
        return q0 ** 3 * 4 + params["theta"]
    if L is Label.PIII:
        t0, ti = params["theta0"], params["thetainf"]
        return t0 * q0 ** 6 - ti * 3 * q0 ** 4 + t0 * 3 * q0 ** 2 - ti
    if L is Label.PIV:
        # resultant in t of A_IV and dA_IV/dq0, up to a factor -4 q0^2
        t0, ti = params["theta0"], params["thetainf"]
        return q0 ** 8 * 3 + ti * 8 * q0 ** 6 + t0 * t0 * 6 * q0 ** 4 - t0 ** 4
    if L is Label.PV:
        t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
        m, pl = t0 - t1 - ti, t0 - t1 + ti
        s = t0 * t0 + t0 * t1 * 6 + t1 * t1 - ti * ti
        return (m ** 4 * q0 ** 9 + m ** 4 * 3 * q0 ** 8 + m * m * s * 8 * q0 ** 6
                - m * m * pl * pl * 6 * q0 ** 5 + m * m * pl * pl * 6 * q0 ** 4
                - pl * pl * s * 8 * q0 ** 3 - pl ** 4 * 3 * q0 - pl ** 4)
    t0, t1, tt, ti = (params[n] for n in PARAM_NAMES[L])
    return t0 * t0 * t / q0 ** 3 - (t - 1) * t1 * t1 / (q0 - 1) ** 3 + t * (t - 1) * tt * tt / (q0 - t) ** 3


def singular_time_test(label, params, q0, t=None):
    """(is_singular, witness value)."""
    w = singular_time_polynomial(label, params, q0, t)
    return w.is_zero(), w


def derive_time(label, params, q0):
    """t(q0) on the leading-order locus, for the labels where it is rational."""
    L = Label.parse(label)
    q0 = _el(q0)
    if q0.is_zero():
        raise SingularTime("q0 = 0")
    if L is Label.PI:
        return -(q0 * q0 * 6)
    if L is Label.PII:
        return -(q0 * q0 * 2) + params["theta"] / q0
    if L is Label.PIII:
        den = q0 ** 4 - 1
        if den.is_zero():
            raise DegenerateCurve("q0^4 = 1")
        return q0 * (params["thetainf"] - params["theta0"] * q0 * q0) / den
    raise Unsupported(f"{L.value}: t is not a rational function of q0; supply (q0, t)")


def derive_theta_inf_PIV(q0, t, theta0):
    """theta_inf solving 3q0^4 + 4t q0^3 + (t^2 - 2 theta_inf) q0^2 - theta0^2 = 0."""
    q0, t, theta0 = _el(q0), _el(t), _el(theta0)
    if q0.is_zero():
        raise SingularTime("q0 = 0")
    return (q0 ** 4 * 3 + t * q0 ** 3 * 4 + t * t * q0 * q0 - theta0 * theta0) / (q0 * q0 * 2)


def time_derivative_q0(label, params, q0, t):
    """dq0/dt on the leading-order locus, -A_t / A_q."""
    L = Label.parse(label)
    if L is Label.PIV:
        # theta_inf is eliminated in favour of (q0, t), so differentiate that
        ti = derive_theta_inf_PIV(q0, t, params["theta0"])
        return -ti.derivative("t") / ti.derivative("q0")
    if L in (Label.PI, Label.PII, Label.PIII):
        tq = derive_time(L, params, q0)
        return 1 / tq.derivative("q0")
    raise Unsupported(f"{L.value}: no symbolic time derivation")


# ---------------------------------------------------------------------------
# PV and PVI base-point algebra


@dataclass(frozen=True)
class PVData:
    t: FieldElement
    Q0: FieldElement
    S: FieldElement
    P: FieldElement
    q0: FieldElement
    p0: FieldElement


def pv_t_quadratic(params, Q0):
    t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
    w = Q0 * Q0 * (Q0 - 1) ** 2
    return w * (Q0 * 2 - 1), -(ti * w * 2), (Q0 * (t0 + t1) - t0) * (Q0 * (t0 - t1) - t0)


def pv_curve_data(params, Q0, t=None, root=1):
    """(t, S, P, q0, p0) from the double zero Q0 of E_V.

    t solves a quadratic; pass ``t`` to pick a known root, or ``root=+-1``
    to choose the branch (a square root is adjoined when needed).
    """
    if params.label is not Label.PV:
        raise ValueError("PV parameters expected")
    Q0 = _el(Q0)
    if Q0.is_zero() or (Q0 - 1).is_zero():
        raise DegenerateCurve("Q0 in {0, 1}")
    A, B, C = pv_t_quadratic(params, Q0)
    if t is None:
        if A.is_zero():
            t = -C / B
        else:
            disc = B * B - A * C * 4
            if disc.is_zero():
                t = -B / (A * 2)
            else:
                _, r = adjoin_sqrt(disc.desc, disc)
                t = (-B + r * root) / (A * 2)
    else:
        t = _el(t)
        if not (A * t * t + B * t + C).is_zero():
            raise LeadingRelationError("t does not solve the Q0 quadratic")
    if t.is_zero():
        raise SingularTime("t = 0")
    t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
    S = ti * 2 / t + 2 - Q0 * 2
    P = t0 * t0 / (t * t * Q0 * Q0)
    resid = t * t * (1 - Q0) ** 2 * (1 - S + P) - t1 * t1
    if not resid.is_zero():
        raise LeadingRelationError(f"second PV curve condition fails: {resid}")
    q0 = ((Q0 * Q0 * (t0 - t1) - t0 * (Q0 * 2 - 1) + Q0 * (Q0 - 1) * ((Q0 * 2 - 1) * t - ti))
          / (Q0 * (Q0 - 1) * (t0 - t1 - ti)))
    s = (t0 + t1 + ti) / 2
    den = Q0 * (q0 - 1) + 1
    if den.is_zero():
        raise DegenerateCurve("p0 undefined for this Q0")
    p0 = -(Q0 * s) / den
    return PVData(t, Q0, S, P, q0, p0)


def pv_leading_equations(params, q0, p0, t):
    """The two order-zero conditions on (q0, p0) for PV; both vanish on the locus."""
    t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
    e1 = p0 * (p0 + (t0 - t1 + ti) / (q0 * 2)) - (p0 * q0 + t0) * (p0 * q0 + (t0 + t1 + ti) / 2)
    e2 = t - p0 * (q0 - 1) ** 2 * 2 + (q0 - 1) * ((t0 - t1 + ti) / (q0 * 2) - (t0 * 3 + t1 + ti) / 2)
    return e1, e2


def pv_catalog():
    """Exact PV base points with rational t (theta_inf chosen to make t rational)."""
    out = []
    for Q0, t, t0, t1 in (("3", "2", "1", "1/3"), ("-1", "1/2", "1/2", "1/5")):
        Q0, t, t0, t1 = (_el(x) for x in (Q0, t, t0, t1))
        w = Q0 * Q0 * (Q0 - 1) ** 2
        C = (Q0 * (t0 + t1) - t0) * (Q0 * (t0 - t1) - t0)
        ti = (w * (Q0 * 2 - 1) * t * t + C) / (w * t * 2)
        out.append({"theta0": t0, "theta1": t1, "thetainf": ti, "Q0": Q0, "t": t})
    return out


def pvi_relation(params, q0, t):
    return leading_relation(Label.PVI, params, q0, t)


def pvi_p2(params, q0, t, x=None):
    """The quadratic factor P_2 of E_VI as a rational function of ``x``.

    Returns (coefficient form, interpolation form); they agree exactly.
    """
    q0, t = _el(q0), _el(t)
    for bad, what in ((q0, "q0 = 0"), (q0 - 1, "q0 = 1"), (q0 - t, "q0 = t")):
        if bad.is_zero():
            raise DegenerateCurve(what)
    r = pvi_relation(params, q0, t)
    if not r.is_zero():
        raise LeadingRelationError(f"leading relation residual {r}")
    t0, t1, tt, ti = (params[n] for n in PARAM_NAMES[Label.PVI])
    if x is None:
        x = unify(q0.desc, t.desc).with_variables(["x"]).gen("x")
    a0 = t0 * t0 * t * t / (ti * ti * q0 * q0)
    a1 = t1 * t1 * (t - 1) ** 2 / (ti * ti * (q0 - 1) ** 2)
    coeff = x * x + (-1 - a0 + a1) * x + a0
    interp = (t0 * t0 * t / (ti * ti * q0 * q0) * (x - 1) * (x - t)
              - (t - 1) * t1 * t1 / (ti * ti * (q0 - 1) ** 2) * x * (x - t)
              + t * (t - 1) * tt * tt / (ti * ti * (q0 - t) ** 2) * x * (x - 1))
    return coeff, interp


def pvi_catalog():
    """Exact PVI tuples (q0, t, thetas) on the leading-order locus.

    Found by fixing q0, t and three thetas and solving for theta_t^2, keeping
    the cases where it is a rational square.
    """
    return [
        {"q0": "3", "t": "-1", "theta0": "2", "theta1": "1/3", "thetat": "26/3", "thetainf": "3"},
        {"q0": "3", "t": "4", "theta0": "1/2", "theta1": "2", "thetat": "1/2", "thetainf": "1/3"},
    ]


# ---------------------------------------------------------------------------
# base points


@dataclass(frozen=True)
class BasePoint:
    """q0 and t (field elements, possibly symbols) plus label-specific data."""

    q0: FieldElement
    t: FieldElement
    extra: tuple = ()

    def get(self, key):
        for k, v in self.extra:
            if k == key:
                return v
        raise KeyError(key)

    @property
    def symbolic(self):
        return tuple(v for v in ("q0", "t") if v in unify(self.q0.desc, self.t.desc).variables)

    def to_json(self):
        d = {"q0": str(self.q0), "t": str(self.t)}
        d.update({k: str(v) for k, v in self.extra})
        return d


def _symbol_or_value(v, name, desc):
    if v is None or (isinstance(v, str) and v.strip().lower() in ("symbolic", name)):
        return desc.gen(name)
    return desc.element(v) if not isinstance(v, FieldElement) else v


def make_base(label, params=None, q0=None, t=None, Q0=None, root=1):
    """Validated (params, BasePoint) for a label.

    ``q0 = None`` (or ``"symbolic"``) makes q0 a symbol for PI-PIV; for PIV
    ``t = None`` makes t a symbol too and theta_inf is eliminated.
    """
    L = Label.parse(label)
    params = params if params is not None else {}
    if isinstance(params, MonodromyParams):
        params = params.as_dict()
    if L in (Label.PI, Label.PII, Label.PIII):
        sym = q0 is None or (isinstance(q0, str) and q0.strip().lower() in ("symbolic", "q0"))
        desc = FieldDescriptor(("q0",)) if sym else QQ
        P = MonodromyParams.make(L, **params)
        q = _symbol_or_value(q0, "q0", desc)
        tv = derive_time(L, P, q)
        if t is not None and not (tv - _el(t)).is_zero():
            raise LeadingRelationError("t is inconsistent with q0")
        base = BasePoint(q, tv)
    elif L is Label.PIV:
        names = [n for n, v in (("q0", q0), ("t", t)) if v is None or str(v).lower() in ("symbolic", n)]
        desc = FieldDescriptor(tuple(names)) if names else QQ
        q = _symbol_or_value(q0, "q0", desc)
        tv = _symbol_or_value(t, "t", desc)
        ti = derive_theta_inf_PIV(q, tv, params["theta0"])
        if "thetainf" in params and not (_el(params["thetainf"]) - ti).is_zero():
            raise LeadingRelationError("thetainf is inconsistent with (q0, t, theta0)")
        P = MonodromyParams.make(L, theta0=params["theta0"], thetainf=ti)
        base = BasePoint(q, tv)
    elif L is Label.PV:
        P = MonodromyParams.make(L, **params)
        if Q0 is None:
            raise ValueError("PV base points are given by the double zero Q0")
        data = pv_curve_data(P, Q0, t=t, root=root)
        e1, e2 = pv_leading_equations(P, data.q0, data.p0, data.t)
        if not (e1.is_zero() and e2.is_zero()):
            raise LeadingRelationError("PV order-zero conditions fail")
        base = BasePoint(data.q0, data.t, (("Q0", data.Q0), ("S", data.S), ("P", data.P), ("p0", data.p0)))
    else:
        P = MonodromyParams.make(L, **params)
        q, tv = _el(q0), _el(t)
        coeff, _ = pvi_p2(P, q, tv)
        base = BasePoint(q, tv)
    if L is not Label.PI and (base.t.is_zero() if not base.symbolic else False):
        raise SingularTime("t = 0")
    if L is Label.PVI and ((base.t - 1).is_zero()):
        raise SingularTime("t = 1")
    sing, w = singular_time_test(L, P, base.q0, base.t)
    if sing:
        raise SingularTime(f"{L.value}: singular-time polynomial vanishes at the base point")
    r = leading_relation(L, P, base.q0, base.t)
    if not r.is_zero():
        raise LeadingRelationError(f"A_J(q0, t) = {r}")
    return P, base


# ---------------------------------------------------------------------------
# curve data from the table


def curve_factors(label, params, base, x):
    """(quadratic factor, C_J(x), double point, finite poles) in the variable x."""
    L = Label.parse(label)
    q0, t = base.q0, base.t
    if L is Label.PII:
        return x * x + q0 * x * 2 + q0 * q0 + params["theta"] / q0, x - q0, q0, ()
    if L is Label.PIII:
        t0, ti = params["theta0"], params["thetainf"]
        quad = x * x + q0 * (ti * q0 * q0 - t0) * 2 / (t0 * q0 * q0 - ti) * x + q0 * q0
        C = (ti - t0 * q0 * q0) * (q0 * x + 1) / (x * x * 2 * (q0 ** 4 - 1))
        return quad, C, -1 / q0, (0,)
    if L is Label.PIV:
        t0 = params["theta0"]
        return x * x + (q0 + t) * x * 2 + t0 * t0 / (q0 * q0), (x - q0) / x, q0, (0,)
    if L is Label.PV:
        Q0, S, P = base.get("Q0"), base.get("S"), base.get("P")
        # the double zero of E_V sits at Q0, not at q0
        return x * x - S * x + P, t * (x - Q0) / (x * (x - 1) * 2), Q0, (0, 1)
    if L is Label.PVI:
        coeff, _ = pvi_p2(params, q0, t, x)
        ti = params["thetainf"]
        return coeff, ti * (x - q0) / (x * (x - 1) * (x - t) * 2), q0, (0, 1, t)
    raise ValueError("PI has no quadratic factor")


def table_E(label, params, base, x):
    """E_J(x) written as in the list of spectral curves."""
    L = Label.parse(label)
    q0, t = base.q0, base.t
    if L is Label.PI:
        return (x + q0 * 2) * (x - q0) ** 2 * 4
    if L is Label.PII:
        return (x - q0) ** 2 * (x * x + q0 * x * 2 + q0 * q0 + params["theta"] / q0)
    if L is Label.PIII:
        t0, ti = params["theta0"], params["thetainf"]
        return ((ti - t0 * q0 * q0) ** 2 * (q0 * x + 1) ** 2
                * (x * x + q0 * (ti * q0 * q0 - t0) * 2 / (t0 * q0 * q0 - ti) * x + q0 * q0)
                / (x ** 4 * 4 * (q0 ** 4 - 1) ** 2))
    if L is Label.PIV:
        t0 = params["theta0"]
        return (x - q0) ** 2 * (x * x + (q0 + t) * x * 2 + t0 * t0 / (q0 * q0)) / (x * x)
    if L is Label.PV:
        Q0, S, P = base.get("Q0"), base.get("S"), base.get("P")
        return t * t * (x - Q0) ** 2 * (x * x - S * x + P) / (x * x * (x - 1) ** 2 * 4)
    coeff, _ = pvi_p2(params, q0, t, x)
    ti = params["thetainf"]
    return ti * ti * (x - q0) ** 2 * coeff / (x * x * (x - 1) ** 2 * (x - t) ** 2 * 4)


# ---------------------------------------------------------------------------
# spectral curve


@dataclass(frozen=True)
class SpectralCurve:
    label: Label
    params: MonodromyParams
    base: BasePoint
    desc: FieldDescriptor  # coefficient field, including any adjoined root
    x: FieldElement  # rational functions of z
    y: FieldElement
    branch_points: tuple
    involution: str  # "neg" (z -> -z) or "inv" (z -> 1/z)
    a: FieldElement = None
    b: FieldElement = None
    C: FieldElement = None  # C_J as a rational function of x
    E: FieldElement = None  # table E_J as a rational function of x
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def zdesc(self):
        return self.desc.with_variables(["z"])

    @property
    def xdesc(self):
        return self.desc.with_variables(["x"])

    def z(self):
        return self.zdesc.gen("z")

    def sigma_z(self):
        z = self.z()
        return -z if self.involution == "neg" else 1 / z

    def pullback(self, f, var="z"):
        """f(sigma(z))."""
        s = self.sigma_z()
        if var != "z":
            w = f.desc.gen(var)
            s = -w if self.involution == "neg" else 1 / w
        return f.substitute(var, s)

    def dx(self):
        return self.x.derivative("z")

    def at_x(self, f, var="z"):
        """Compose a rational function of x with x(z) (renaming z to ``var``)."""
        xz = self.x if var == "z" else self.x.substitute("z", self.x.desc.with_variables([var]).gen(var))
        return f.substitute("x", xz)

    def descriptor(self):
        d = {
            "schema": SCHEMA_VERSION,
            "label": self.label.value,
            "params": self.params.to_json(),
            "base": self.base.to_json(),
            "sqrt": None if self.desc.d is None else str(self.desc.d),
            "symbols": list(self.desc.symbols),
        }
        return d

    def descriptor_hash(self):
        s = json.dumps(self.descriptor(), sort_keys=True)
        return hashlib.sha256(s.encode()).hexdigest()

    def to_json(self):
        d = self.descriptor()
        d["hash"] = self.descriptor_hash()
        d["x(z)"] = str(self.x)
        d["y(z)"] = str(self.y)
        d["branch_points"] = [str(r) for r in self.branch_points]
        if self.a is not None:
            d["a"], d["b"] = str(self.a), str(self.b)
        return d


def build_curve(label, params=None, base=None, **kw):
    """Build and validate the spectral curve.

    Either pass validated ``params`` (MonodromyParams) and ``base``, or pass
    raw keyword data that :func:`make_base` understands.
    """
    L = Label.parse(label)
    if base is None or not isinstance(params, MonodromyParams):
        params, base = make_base(L, params, **kw)
    cdesc = unify(base.q0.desc, base.t.desc)
    for _, v in base.extra:
        cdesc = unify(cdesc, v.desc)
    for _, v in params.values:
        cdesc = unify(cdesc, v.desc)
    if L is Label.PI:
        zd = cdesc.with_variables(["z"])
        z = zd.gen("z")
        q0 = base.q0
        x = z * z - q0 * 2
        y = z * (z * z - q0 * 3) * 2
        xd = cdesc.with_variables(["x"])
        curve = SpectralCurve(L, params, base, cdesc, x, y, (cdesc.zero(),), "neg",
                              E=table_E(L, params, base, xd.gen("x")))
    else:
        xd = cdesc.with_variables(["x"])
        X = xd.gen("x")
        quad, C, dbl, poles = curve_factors(L, params, base, X)
        c1 = quad.derivative("x").substitute("x", cdesc.zero())  # x^2 + c1 x + c0
        c0 = quad.substitute("x", cdesc.zero())
        disc = c1 * c1 / 4 - c0
        if disc.is_zero():
            raise DegenerateCurve("the two simple zeros coincide")
        desc2, root = adjoin_sqrt(cdesc, disc)
        a = -c1 / 2 + root
        b = -c1 / 2 - root
        for pt in (dbl,) + tuple(poles):
            v = quad.substitute("x", _el(pt).coerce_to(cdesc) if isinstance(pt, FieldElement) else cdesc.element(pt))
            if v.is_zero():
                raise DegenerateCurve(f"a simple zero coincides with x = {pt}")
        zd = desc2.with_variables(["z"])
        z = zd.gen("z")
        x = (a + b) / 2 + (b - a) / 4 * (z + 1 / z)
        Cz = C.coerce_to(desc2.with_variables(["x"])).substitute("x", x)
        y = (b - a) / 4 * (z - 1 / z) * Cz
        one = desc2.one()
        curve = SpectralCurve(L, params, base, desc2, x, y, (one, -one), "inv", a, b,
                              C.coerce_to(desc2.with_variables(["x"])),
                              table_E(L, params, base, X).coerce_to(desc2.with_variables(["x"])))
    check = check_curve(curve)
    if not all(check.values()):
        failed = [k for k, v in check.items() if not v]
        raise DegenerateCurve(f"curve invariants fail: {failed}")
    return curve


def check_curve(curve):
    """The structural identities every curve must satisfy."""
    out = {}
    x, y = curve.x, curve.y
    Ez = curve.at_x(curve.E)
    out["y^2 = E(x(z))"] = (y * y - Ez).is_zero()
    out["x(sigma z) = x(z)"] = (curve.pullback(x) - x).is_zero()
    out["y(sigma z) = -y(z)"] = (curve.pullback(y) + y).is_zero()
    dx = curve.dx()
    num, _ = numerator_denominator(dx, "z")
    num = num.monic()
    prod = None
    zd = curve.zdesc
    for r in curve.branch_points:
        f = zd.gen("z") - r
        prod = f if prod is None else prod * f
    pn, _ = numerator_denominator(prod, "z")
    out["dx zeros = R, simple"] = num == pn.monic()
    dy = y.derivative("z")
    out["dy != 0 on R"] = all(not dy.substitute("z", r).is_zero() for r in curve.branch_points)
    return out


# ---------------------------------------------------------------------------
# pinned base points


def pinned_bases(label, symbolic=None):
    """Keyword sets for :func:`make_base` used by the test and verification suites.

    ``symbolic=True`` keeps only symbolic entries, ``False`` only exact numeric
    ones, ``None`` both.  PV and PVI have numeric entries only.
    """
    L = Label.parse(label)
    table = {
        Label.PI: [dict(q0="symbolic"), dict(q0="1"), dict(q0="-2/3")],
        Label.PII: [dict(q0="symbolic", params={"theta": "1"}),
                    dict(q0="symbolic", params={"theta": "3"}),
                    dict(q0="1", params={"theta": "1"}),
                    dict(q0="2", params={"theta": "-1/2"})],
        Label.PIII: [dict(q0="symbolic", params={"theta0": "1", "thetainf": "3"}),
                     dict(q0="2", params={"theta0": "1", "thetainf": "3"}),
                     dict(q0="3", params={"theta0": "2", "thetainf": "5"})],
        Label.PIV: [dict(params={"theta0": "1"}),
                    dict(q0="1", t="1", params={"theta0": "1"}),
                    dict(q0="2", t="-1/3", params={"theta0": "1/2"})],
        Label.PV: [dict(params={k: c[k] for k in ("theta0", "theta1", "thetainf")}, Q0=c["Q0"], t=c["t"])
                   for c in pv_catalog()],
        Label.PVI: [dict(params={k: v for k, v in c.items() if k.startswith("theta")}, q0=c["q0"], t=c["t"])
                    for c in pvi_catalog()],
    }[L]

    def is_sym(kw):
        return kw.get("q0") in (None, "symbolic")

    if symbolic is None:
        return [dict(kw) for kw in table]
    return [dict(kw) for kw in table if is_sym(kw) == symbolic]

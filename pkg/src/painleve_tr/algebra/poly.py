"""Dense univariate polynomials and rational functions over a coefficient field.

Rational functions are stored as :class:`~painleve_tr.algebra.field.FieldElement`
values whose descriptor carries a free variable; this module gives them the
numerator/denominator view used by the curve code and by the tests.
"""

from __future__ import annotations

from .field import (
    FieldDescriptor,
    FieldElement,
    Frac,
    RationalFunctionBase,
    _is_scalar,
    make_element,
    poly_coeffs_in,
    unify,
)

RationalFunction = RationalFunctionBase


class Polynomial:
    """c[0] + c[1] v + ... with coefficients in ``desc`` and no trailing zeros."""

    __slots__ = ("desc", "var", "coeffs")

    def __init__(self, coeffs, var, desc=None):
        coeffs = list(coeffs)
        if desc is None:
            descs = [c.desc for c in coeffs if isinstance(c, FieldElement)]
            desc = descs[0] if descs else FieldDescriptor(())
            for d in descs[1:]:
                desc = unify(desc, d)
        self.desc = desc
        self.var = var
        cs = [desc.element(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = cs

    @classmethod
    def gen(cls, var, desc):
        return cls([desc.zero(), desc.one()], var, desc)

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.desc.zero()

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.desc.zero()

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.var != self.var:
                raise ValueError("variable mismatch")
            return other
        return Polynomial([self.desc.element(other) if _is_scalar(other) else other], self.var, self.desc)

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return Polynomial([self[i] + o[i] for i in range(n)], self.var, unify(self.desc, o.desc))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.var, self.desc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        desc = unify(self.desc, o.desc)
        if self.is_zero() or o.is_zero():
            return Polynomial([], self.var, desc)
        out = [desc.zero()] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out, self.var, desc)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = Polynomial([self.desc.one()], self.var, self.desc)
        for _ in range(k):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = self._coerce(other)
        return self.var == other.var and len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.var, tuple(self.coeffs)))

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        desc = unify(self.desc, other.desc)
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Polynomial([], self.var, desc), self
        q = [desc.zero()] * (dq + 1)
        inv = other.lc().inverse()
        for k in range(dq, -1, -1):
            c = r[k + len(other.coeffs) - 1] * inv
            q[k] = c
            if c.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                r[k + j] = r[k + j] - c * b
        return Polynomial(q, self.var, desc), Polynomial(r[: len(other.coeffs) - 1], self.var, desc)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        inv = self.lc().inverse()
        return Polynomial([c * inv for c in self.coeffs], self.var, self.desc)

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def derivative(self):
        return Polynomial([c * i for i, c in enumerate(self.coeffs)][1:], self.var, self.desc)

    def __call__(self, value):
        acc = self.desc.zero()
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def to_rational_function(self):
        rdesc = self.desc.with_variables([self.var])
        v = rdesc.gen(self.var)
        return self(v) if self.coeffs else rdesc.zero()

    def taylor_shift(self, p):
        """Coefficients of self(p + u) as a list."""
        b = list(self.coeffs)
        n = len(b)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                b[j] = b[j] + p * b[j + 1]
        return b

    def __repr__(self):
        terms = [f"({c})*{self.var}^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# numerator/denominator view of a rational function


def base_parts(f, var):
    """Split f = a + b*sqrt(d) and return ``[(num, den), ...]`` for a and b.

    Each entry is a pair of coefficient lists (FieldElements of the descriptor
    without ``var``); the second entry is None when b vanishes.
    """
    desc = f.desc
    cdesc = _drop_var(desc, var)
    out = []
    for part in (f.a, f.b):
        if part is None:
            out.append(None)
            continue
        if not isinstance(part, Frac):
            out.append(([cdesc.element(part)], [cdesc.one()]))
            continue
        sub_ctx = cdesc.ctx
        num = poly_coeffs_in(part.num, var, sub_ctx) if sub_ctx is not None else _const_coeffs(part.num, var)
        den = poly_coeffs_in(part.den, var, sub_ctx) if sub_ctx is not None else _const_coeffs(part.den, var)
        out.append(([_wrap(cdesc, c) for c in num], [_wrap(cdesc, c) for c in den]))
    return cdesc, out


def _drop_var(desc, var):
    rest = tuple(v for v in desc.variables if v != var)
    d = desc.d
    if d is not None and isinstance(d, Frac):
        from .field import _project_base
        d = _project_base(d, rest)
    return FieldDescriptor(rest, d, _checked=True)


def _wrap(cdesc, c):
    if cdesc.ctx is None:
        return make_element(cdesc, c, None)
    return make_element(cdesc, Frac._raw(c, c.context().from_dict({}) + 1), None)


def _const_coeffs(p, var):
    from .field import _const_coeffs as cc
    return cc(p, var)


def numerator_denominator(f, var=None):
    """Reduced (numerator, monic denominator) as Polynomials over the coefficient field."""
    var = var or f.var
    cdesc, parts = base_parts(f, var)
    (na, da), pb = parts
    Na, Da = Polynomial(na, var, cdesc), Polynomial(da, var, cdesc)
    if pb is None:
        return Na, Da.monic() if Da.lc() == 1 else Da.monic()
    Nb, Db = Polynomial(pb[0], var, cdesc), Polynomial(pb[1], var, cdesc)
    root = cdesc.sqrt_d()
    g = Da.gcd(Db)
    L = (Da * Db) // g
    num = Na * (L // Da) + Nb * (L // Db) * root
    h = num.gcd(L)
    num, den = num // h, L // h
    inv = den.lc().inverse()
    return Polynomial([c * inv for c in num.coeffs], var, cdesc), den.monic()


def rational_function(num, den=None):
    """Build a RationalFunction from Polynomials."""
    r = num.to_rational_function()
    if den is not None:
        r = r / den.to_rational_function()
    return r

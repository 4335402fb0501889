"""Exact coefficient fields.

Every value in the package lives in a field of the form

    Q(v_1, ..., v_k)(sqrt d)

where the v_i are the coefficient symbols ``q0`` and ``t`` and, for rational
functions, further free variables such as ``z``, ``x`` or ``z1``.  At most one
square root is adjoined, and ``d`` never involves a free variable, so
``K(sqrt d)(z)`` and ``K(z)(sqrt d)`` are the same field and a single
representation ``a + b*sqrt(d)`` serves both.

The layers ``a`` and ``b`` are either ``flint.fmpq`` (no variables) or
:class:`Frac`, a gcd-reduced quotient of ``flint.fmpq_mpoly`` with a monic
denominator.  Canonical forms are unique, so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

import flint

#: Coefficient symbols, innermost first.
SYMBOLS = ("q0", "t")


class DescriptorMismatch(TypeError):
    """Operands live in incompatible fields."""


class NotASquare(ValueError):
    pass


class NestedExtension(ValueError):
    """A second square root was requested on top of an existing one."""


def canonical_vars(names):
    names = set(names)
    head = [v for v in SYMBOLS if v in names]
    return tuple(head + sorted(v for v in names if v not in SYMBOLS))


@lru_cache(maxsize=None)
def poly_ctx(names):
    return flint.fmpq_mpoly_ctx.get(tuple(names), "lex")


def to_fmpq(x):
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, (int, flint.fmpz)):
        return flint.fmpq(x)
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    if isinstance(x, Rational):
        return flint.fmpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(s):
    """Parse ``"p/q"`` or an integer string.  Floats are refused."""
    s = s.strip()
    if any(c in s for c in ".eE") and not s.lstrip("+-").isdigit():
        raise ValueError(f"floating input is not accepted, use p/q: {s!r}")
    f = Fraction(s)
    return flint.fmpq(f.numerator, f.denominator)


def _is_scalar(x):
    return isinstance(x, (int, flint.fmpq, flint.fmpz, Fraction))


# ---------------------------------------------------------------------------
# Frac: reduced quotient of multivariate polynomials over Q


class Frac:
    """num/den with gcd(num, den) = 1 and den monic in lex order."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            self.num = num
            self.den = num.context().from_dict({}) + 1
        else:
            self.num, self.den = _reduce(num, den)

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @property
    def ctx(self):
        return self.num.context()

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Frac):
            return other
        if _is_scalar(other):
            return Frac._raw(self.num.context().from_dict({}) + to_fmpq(other), self.den * 0 + 1)
        return NotImplemented

    def __add__(self, other):
        if _is_scalar(other):
            c = to_fmpq(other)
            if c == 0:
                return self
            return Frac._raw(self.num + self.den * c, self.den)
        if not isinstance(other, Frac):
            return NotImplemented
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if n1.is_zero():
            return other
        if n2.is_zero():
            return self
        if d1 == d2:
            if d1.is_one():
                return Frac._raw(n1 + n2, d1)
            return Frac(n1 + n2, d1)
        if d1.is_one():
            return Frac._raw(n1 * d2 + n2, d2)
        if d2.is_one():
            return Frac._raw(n1 + n2 * d1, d1)
        g = d1.gcd(d2)
        if g.is_one():
            return Frac._raw(n1 * d2 + n2 * d1, d1 * d2)
        d1g = d1 / g
        d2g = d2 / g
        n = n1 * d2g + n2 * d1g
        if n.is_zero():
            return Frac._raw(n, n.context().from_dict({}) + 1)
        h = n.gcd(g)
        if not h.is_one():
            n = n / h
            g = g / h
        den = d1g * d2g * g
        return Frac._raw(n, den)

    __radd__ = __add__

    def __neg__(self):
        return Frac._raw(-self.num, self.den)

    def __sub__(self, other):
        if _is_scalar(other):
            return self + (-to_fmpq(other))
        if not isinstance(other, Frac):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = to_fmpq(other)
            if c == 0:
                return Frac._raw(self.num * 0, self.den * 0 + 1)
            return Frac._raw(self.num * c, self.den)
        if not isinstance(other, Frac):
            return NotImplemented
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if n1.is_zero() or n2.is_zero():
            return Frac._raw(n1 * 0, d1 * 0 + 1)
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1 = n1 / g
                d2 = d2 / g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2 = n2 / g
                d1 = d1 / g
        return Frac._raw(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        lc = self.num.leading_coefficient()
        return Frac._raw(self.den / lc, self.num / lc)

    def __truediv__(self, other):
        if _is_scalar(other):
            c = to_fmpq(other)
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return Frac._raw(self.num / c, self.den)
        if not isinstance(other, Frac):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        return Frac._raw(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, Frac):
            return self.num == other.num and self.den == other.den
        if _is_scalar(other):
            return self.den.is_one() and self.num == to_fmpq(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num.str(), self.den.str()))

    def __repr__(self):
        return f"Frac({self})"

    def __str__(self):
        n = self.num.str()
        if self.den.is_one():
            return n
        return f"({n})/({self.den.str()})"

    # calculus and substitution --------------------------------------------

    def derivative(self, var):
        n, d = self.num, self.den
        dn = n.derivative(var)
        if d.is_constant():
            return Frac._raw(dn, d)
        dd = d.derivative(var)
        return Frac(dn * d - n * dd, d * d)

    def lift(self, ctx):
        if ctx is self.num.context():
            return self
        return Frac._raw(self.num.project_to_context(ctx), self.den.project_to_context(ctx))

    def degree_in(self, var):
        i = self.ctx.variable_to_index(var)
        return self.num.degrees()[i], self.den.degrees()[i]


def _one_like(p):
    return p.context().from_dict({}) + 1


def _reduce(num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, _one_like(den)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def poly_coeffs_in(p, var, sub_ctx):
    """Coefficients of ``p`` as a polynomial in ``var``, each living in ``sub_ctx``."""
    ctx = p.context()
    i = ctx.variable_to_index(var)
    buckets = {}
    for exps, c in p.to_dict().items():
        e = exps[i]
        rest = exps[:i] + exps[i + 1:]
        buckets.setdefault(e, {})[rest] = c
    if not buckets:
        return []
    out = [sub_ctx.from_dict({})] * (max(buckets) + 1)
    for e, terms in buckets.items():
        out[e] = sub_ctx.from_dict(terms)
    return out


# ---------------------------------------------------------------------------
# descriptors


class FieldDescriptor:
    """Q(variables)(sqrt d).

    ``variables`` is kept in canonical order (q0, t, then the free variables
    sorted by name).  ``d`` is a base-layer value over the coefficient symbols
    or ``None``.
    """

    __slots__ = ("variables", "d", "ctx", "_key")

    def __init__(self, variables=(), d=None, *, _checked=False):
        variables = canonical_vars(variables)
        self.variables = variables
        self.ctx = poly_ctx(variables) if variables else None
        if d is not None:
            d = _as_base(d, self)
            if _base_is_zero(d):
                raise ValueError("cannot adjoin sqrt(0)")
            if not _checked and base_sqrt(d) is not None:
                raise NotASquare("d is a square in the base layer")
            if isinstance(d, Frac):
                free = set(variables) - set(SYMBOLS)
                for v in free:
                    if d.degree_in(v) != (0, 0):
                        raise ValueError("the radicand may only involve coefficient symbols")
        self.d = d
        self._key = (variables, None if d is None else str(d))

    @property
    def symbols(self):
        return tuple(v for v in self.variables if v in SYMBOLS)

    @property
    def free(self):
        return tuple(v for v in self.variables if v not in SYMBOLS)

    @property
    def has_sqrt(self):
        return self.d is not None

    def __eq__(self, other):
        return isinstance(other, FieldDescriptor) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        inner = ",".join(self.variables)
        s = f"Q({inner})" if inner else "Q"
        if self.d is not None:
            s += f"(sqrt({self.d}))"
        return s

    def coefficient_descriptor(self):
        """Drop the free variables."""
        if not self.free:
            return self
        d = self.d
        syms = self.symbols
        if d is not None and isinstance(d, Frac):
            d = _project_base(d, syms)
        return FieldDescriptor(syms, d, _checked=True)

    def with_variables(self, extra):
        vars_ = canonical_vars(set(self.variables) | set(extra))
        if vars_ == self.variables:
            return self
        d = self.d
        if d is not None:
            d = _lift_base(d, poly_ctx(vars_))
        return FieldDescriptor(vars_, d, _checked=True)

    def without_sqrt(self):
        return FieldDescriptor(self.variables) if self.d is not None else self

    # element construction -------------------------------------------------

    def zero(self):
        return make_element(self, self._base_const(0), None)

    def one(self):
        return make_element(self, self._base_const(1), None)

    def __call__(self, value):
        return self.element(value)

    def element(self, value):
        if isinstance(value, FieldElement):
            return value.coerce_to(self)
        if isinstance(value, str):
            value = parse_rational(value)
        if isinstance(value, Frac):
            return make_element(self, _lift_base(value, self.ctx), None)
        return make_element(self, self._base_const(value), None)

    def gen(self, name):
        if name not in self.variables:
            raise KeyError(name)
        return make_element(self, Frac._raw(self.ctx.gen(self.ctx.variable_to_index(name)), _one_like(self.ctx.gen(0))), None)

    def sqrt_d(self):
        if self.d is None:
            raise ValueError("descriptor has no quadratic layer")
        return make_element(self, self._base_const(0), self._base_const(1))

    def _base_const(self, c):
        c = to_fmpq(c)
        if self.ctx is None:
            return c
        one = self.ctx.from_dict({}) + 1
        return Frac._raw(one * c, one)


def _as_base(value, desc):
    if isinstance(value, FieldElement):
        if value.b is not None:
            raise NestedExtension("radicand must lie in the layer below")
        value = value.a
    if isinstance(value, Frac):
        return _lift_base(value, desc.ctx)
    c = to_fmpq(value)
    return desc._base_const(c) if desc.ctx is not None else c


def _base_is_zero(v):
    return v == 0 if not isinstance(v, Frac) else v.is_zero()


def _lift_base(v, ctx):
    if ctx is None:
        if isinstance(v, Frac):
            if not v.is_constant():
                raise DescriptorMismatch("cannot drop variables from a non-constant value")
            return v.constant_value() / v.den.leading_coefficient()
        return v
    if isinstance(v, Frac):
        return v.lift(ctx)
    one = ctx.from_dict({}) + 1
    return Frac._raw(one * to_fmpq(v), one)


def _project_base(v, syms):
    if not syms:
        return _lift_base(v, None)
    return v.lift(poly_ctx(syms))


def base_sqrt(v):
    """Square root of a base-layer value, or None when it is not a square."""
    if isinstance(v, Frac):
        try:
            sn = v.num.sqrt()
            sd = v.den.sqrt()
        except Exception:
            sn = None
        if sn is not None:
            return Frac(sn, sd)
        # numerator and denominator may each be non-square only up to a
        # rational factor; test num*den
        try:
            s = (v.num * v.den).sqrt()
        except Exception:
            return None
        return Frac(s, v.den)
    v = to_fmpq(v)
    if v < 0:
        return None
    n, d = int(v.p), int(v.q)
    rn, rd = _isqrt_exact(n), _isqrt_exact(d)
    if rn is None or rd is None:
        return None
    return flint.fmpq(rn, rd)


def _isqrt_exact(n):
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def adjoin_sqrt(desc, d):
    """Adjoin sqrt(d) to ``desc``.

    Returns ``(new_descriptor, root)`` where ``root`` is an element of the new
    descriptor squaring to ``d``.  When ``d`` is already a square the
    descriptor is returned unchanged and ``root`` is the witness.
    """
    if isinstance(d, FieldElement):
        if d.desc != desc:
            d = d.coerce_to(desc)
        if d.is_zero():
            raise ValueError("cannot adjoin sqrt(0)")
        if d.b is not None:
            raise NestedExtension("nested square roots are not supported")
        base = d.a
    else:
        base = _as_base(d, desc)
        if _base_is_zero(base):
            raise ValueError("cannot adjoin sqrt(0)")
    s = base_sqrt(base)
    if s is not None:
        return desc, make_element(desc, s, None)
    if desc.d is not None:
        # sqrt(base) lies in K(sqrt d) iff base/d is a square in K
        ratio = base / desc.d
        s = base_sqrt(ratio)
        if s is not None:
            return desc, make_element(desc, _zero_like(s), s)
        raise NestedExtension("a second square root would be needed")
    core, scale = _squarefree_radicand(base, desc)
    new = FieldDescriptor(desc.variables, core, _checked=True)
    return new, new.sqrt_d() * make_element(new, _lift_base(scale, new.ctx), None)


def _rational_squarefree(c):
    """c = s^2 * core with core a squarefree integer; returns (core, s)."""
    c = to_fmpq(c)
    n = int(c.p) * int(c.q)
    sign = -1 if n < 0 else 1
    core, s = 1, 1
    for pr, e in flint.fmpz(abs(n)).factor():
        pr = int(pr)
        core *= pr ** (e % 2)
        s *= pr ** (e // 2)
    return flint.fmpq(sign * core), flint.fmpq(s, int(c.q))


def _squarefree_radicand(base, desc):
    """Write base = scale^2 * core with core a squarefree polynomial."""
    if not isinstance(base, Frac):
        return _rational_squarefree(base)
    n = base.num * base.den
    ctx = n.context()
    content, facs = n.factor_squarefree()
    core = ctx.from_dict({}) + 1
    half = ctx.from_dict({}) + 1
    for f, e in facs:
        if e % 2:
            core = core * f
        half = half * f ** (e // 2)
    ccore, cs = _rational_squarefree(content)
    core = core * ccore
    scale = Frac(half * cs, base.den)
    return Frac._raw(core, ctx.from_dict({}) + 1), scale


def _zero_like(v):
    return v * 0


# ---------------------------------------------------------------------------
# elements


def make_element(desc, a, b):
    if b is not None and _base_is_zero(b):
        b = None
    cls = RationalFunctionBase if desc.free else FieldElement
    obj = object.__new__(cls)
    obj.desc = desc
    obj.a = a
    obj.b = b
    return obj


def unify(x, y):
    """Common descriptor for two descriptors, or DescriptorMismatch."""
    if x == y:
        return x
    vars_ = canonical_vars(set(x.variables) | set(y.variables))
    ctx = poly_ctx(vars_) if vars_ else None
    dx = None if x.d is None else _lift_base(x.d, ctx)
    dy = None if y.d is None else _lift_base(y.d, ctx)
    if dx is not None and dy is not None and dx != dy:
        raise DescriptorMismatch(f"{x} vs {y}")
    return FieldDescriptor(vars_, dx if dx is not None else dy, _checked=True)


class FieldElement:
    """a + b*sqrt(d) over the descriptor's rational-function layer."""

    __slots__ = ("desc", "a", "b")

    def __init__(self, desc, value=0):
        e = desc.element(value)
        self.desc, self.a, self.b = e.desc, e.a, e.b

    # coercion ---------------------------------------------------------------

    def coerce_to(self, desc):
        if self.desc == desc:
            return self
        if not set(self.desc.variables) <= set(desc.variables):
            raise DescriptorMismatch(f"cannot embed {self.desc} into {desc}")
        if self.b is not None:
            if desc.d is None or _lift_base(self.desc.d, desc.ctx) != desc.d:
                raise DescriptorMismatch(f"cannot embed {self.desc} into {desc}")
        a = _lift_base(self.a, desc.ctx)
        b = None if self.b is None else _lift_base(self.b, desc.ctx)
        return make_element(desc, a, b)

    def _pair(self, other):
        if isinstance(other, FieldElement):
            if other.desc == self.desc:
                return self, other
            u = unify(self.desc, other.desc)
            return self.coerce_to(u), other.coerce_to(u)
        if _is_scalar(other):
            return self, make_element(self.desc, self.desc._base_const(other), None)
        return None, None

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if _is_scalar(other):
            return make_element(self.desc, self.a + to_fmpq(other), self.b)
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        if x.b is None:
            b = y.b
        elif y.b is None:
            b = x.b
        else:
            b = x.b + y.b
        return make_element(x.desc, x.a + y.a, b)

    __radd__ = __add__

    def __neg__(self):
        return make_element(self.desc, -self.a, None if self.b is None else -self.b)

    def __sub__(self, other):
        if _is_scalar(other):
            return make_element(self.desc, self.a - to_fmpq(other), self.b)
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return x + (-y)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = to_fmpq(other)
            return make_element(self.desc, self.a * c, None if self.b is None else self.b * c)
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        a1, b1, a2, b2 = x.a, x.b, y.a, y.b
        if b1 is None:
            if b2 is None:
                return make_element(x.desc, a1 * a2, None)
            return make_element(x.desc, a1 * a2, a1 * b2)
        if b2 is None:
            return make_element(x.desc, a1 * a2, b1 * a2)
        d = x.desc.d
        return make_element(x.desc, a1 * a2 + b1 * b2 * d, a1 * b2 + b1 * a2)

    __rmul__ = __mul__

    def norm(self):
        """a^2 - d b^2, an element of the layer below."""
        if self.b is None:
            return make_element(self.desc.without_sqrt(), self.a * self.a, None)
        return make_element(self.desc.without_sqrt(), self.a * self.a - self.b * self.b * self.desc.d, None)

    def conjugate(self):
        return make_element(self.desc, self.a, None if self.b is None else -self.b)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.b is None:
            return make_element(self.desc, _base_inv(self.a), None)
        n = self.a * self.a - self.b * self.b * self.desc.d
        ni = _base_inv(n)
        return make_element(self.desc, self.a * ni, -(self.b * ni))

    def __truediv__(self, other):
        if _is_scalar(other):
            c = to_fmpq(other)
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / c)
        x, y = self._pair(other)
        if x is None:
            return NotImplemented
        return x * y.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, Integral):
            raise TypeError("integer powers only")
        if k < 0:
            return self.inverse() ** (-k)
        result = self.desc.one() if k == 0 else None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if _is_scalar(other):
            return self.b is None and self.a == to_fmpq(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        try:
            x, y = self._pair(other)
        except DescriptorMismatch:
            return False
        return x.a == y.a and x.b == y.b

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.desc, str(self.a), None if self.b is None else str(self.b)))

    def is_zero(self):
        return self.b is None and _base_is_zero(self.a)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self):
        """True when the element is a constant in Q."""
        if self.b is not None:
            return False
        return not isinstance(self.a, Frac) or self.a.is_constant()

    def to_fmpq(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational constant")
        a = self.a
        if isinstance(a, Frac):
            return a.constant_value() / a.den.leading_coefficient()
        return a

    def in_base(self):
        """True when the sqrt(d) part vanishes."""
        return self.b is None

    def sqrt_part(self):
        return make_element(self.desc, _zero_like(self.a) if self.b is None else self.b, None)

    def rational_part(self):
        return make_element(self.desc, self.a, None)

    # calculus -----------------------------------------------------------------

    def derivative(self, var):
        desc = self.desc
        if var not in desc.variables:
            return desc.zero()
        da = _base_derivative(self.a, var)
        if self.b is None:
            return make_element(desc, da, None)
        db = _base_derivative(self.b, var)
        dd = _base_derivative(desc.d, var)
        if not _base_is_zero(dd):
            db = db + self.b * dd / (desc.d * 2)
        return make_element(desc, da, db)

    def substitute(self, var, value):
        """Replace the free or symbolic variable ``var`` by ``value``."""
        if var not in self.desc.variables:
            return self
        rest = tuple(v for v in self.desc.variables if v != var)
        d = self.desc.d
        if d is not None and isinstance(d, Frac) and d.degree_in(var) != (0, 0):
            raise ValueError("cannot substitute a variable of the radicand")
        sub_desc = FieldDescriptor(rest, None if d is None else _project_base(d, rest), _checked=True)
        a = _substitute_base(self.a, var, value, sub_desc)
        if self.b is None:
            return a
        b = _substitute_base(self.b, var, value, sub_desc)
        root = sub_desc.sqrt_d()
        if isinstance(value, FieldElement):
            u = unify(sub_desc, value.desc)
            root = root.coerce_to(u)
        return a + b * root

    def __repr__(self):
        return f"FieldElement[{self.desc}]({self})"

    def __str__(self):
        if self.b is None:
            return str(self.a)
        return f"{self.a} + ({self.b})*sqrt({self.desc.d})"

    def to_string(self):
        return str(self)


def _base_inv(v):
    if isinstance(v, Frac):
        return v.inverse()
    if v == 0:
        raise ZeroDivisionError("inverse of zero")
    return 1 / v


def _base_derivative(v, var):
    if isinstance(v, Frac):
        return v.derivative(var)
    return v * 0


def _substitute_base(v, var, value, sub_desc):
    """Evaluate a base-layer Frac at var=value; result in unify(sub_desc, value)."""
    if not isinstance(v, Frac):
        return sub_desc.element(v)
    sub_ctx = sub_desc.ctx
    num = poly_coeffs_in(v.num, var, sub_ctx) if sub_ctx is not None else _const_coeffs(v.num, var)
    den = poly_coeffs_in(v.den, var, sub_ctx) if sub_ctx is not None else _const_coeffs(v.den, var)

    def wrap(p):
        if sub_ctx is None:
            return make_element(sub_desc, p, None)
        return make_element(sub_desc, Frac._raw(p, _one_like(p)), None)

    def horner(coeffs):
        acc = None
        for c in reversed(coeffs):
            acc = wrap(c) if acc is None else acc * value + wrap(c)
        return acc if acc is not None else sub_desc.zero()

    return horner(num) / horner(den)


def _const_coeffs(p, var):
    i = p.context().variable_to_index(var)
    out = {}
    for exps, c in p.to_dict().items():
        out[exps[i]] = c
    if not out:
        return []
    res = [flint.fmpq(0)] * (max(out) + 1)
    for e, c in out.items():
        res[e] = c
    return res


class RationalFunctionBase(FieldElement):
    """Element whose descriptor carries free variables (see ``ratfunc``)."""

    __slots__ = ()

    @property
    def variables(self):
        return self.desc.free

    @property
    def var(self):
        f = self.desc.free
        if len(f) != 1:
            raise ValueError("multivariate rational function has no single variable")
        return f[0]


# ---------------------------------------------------------------------------
# convenience constructors

QQ = FieldDescriptor(())


def Q(value):
    """An element of the rationals."""
    return QQ.element(value)


def symbolic(*names):
    """Q(names) and its generators."""
    desc = FieldDescriptor(names)
    return (desc,) + tuple(desc.gen(n) for n in names)


# ---------------------------------------------------------------------------
# exact serialization


def _encode_poly(p):
    return [[[int(x) for x in e], str(c)] for e, c in sorted(p.to_dict().items())]


def _encode_base(v):
    if v is None:
        return None
    if isinstance(v, Frac):
        return {"num": _encode_poly(v.num), "den": _encode_poly(v.den)}
    return str(v)


def _decode_base(data, desc):
    if data is None:
        return None
    if isinstance(data, str):
        return desc._base_const(parse_rational(data))

    def poly(terms):
        return desc.ctx.from_dict({tuple(e): parse_rational(c) for e, c in terms})

    return Frac._raw(poly(data["num"]), poly(data["den"]))


def encode_element(e):
    """A JSON-ready exact encoding of a field element (variables in descriptor order)."""
    return {"a": _encode_base(e.a), "b": _encode_base(e.b)}


def decode_element(desc, data):
    """Inverse of :func:`encode_element` for elements of ``desc``."""
    return make_element(desc, _decode_base(data["a"], desc), _decode_base(data["b"], desc))

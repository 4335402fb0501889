"""High-precision evaluation of exact values, and log-rational expressions.

Exact values are evaluated with mpmath at a working precision of 256 bits.
The square root adjoined by a descriptor is embedded with a chosen sign of
the principal branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import flint
import mpmath

from .field import FieldElement, Frac, to_fmpq

PREC_BITS = 256


def set_precision(bits):
    """Set the working precision (in bits) used by :func:`evaluate`; returns the old value."""
    global PREC_BITS
    if bits < 212:
        raise ValueError("the 2^-200 comparison tolerance needs at least 212 bits")
    old, PREC_BITS = PREC_BITS, int(bits)
    return old
#: relative tolerance for numeric agreement of log parts
REL_TOL = mpmath.mpf(2) ** -200


def _mp(c):
    c = to_fmpq(c)
    return mpmath.mpf(int(c.p)) / int(c.q)


def _eval_poly(p, point):
    names = p.context().names()
    vals = [point[n] for n in names]
    acc = mpmath.mpf(0)
    for exps, c in p.to_dict().items():
        term = _mp(c)
        for v, e in zip(vals, exps):
            if e:
                term *= v ** int(e)
        acc += term
    return acc


def _eval_base(v, point):
    if isinstance(v, Frac):
        return _eval_poly(v.num, point) / _eval_poly(v.den, point)
    return _mp(v)


def evaluate(value, point=None, sqrt_sign=1, prec=None):
    """Numeric value of an exact object.

    ``point`` maps variable names to numbers (rationals are converted exactly
    before rounding).  ``sqrt_sign`` picks the embedding of sqrt(d).
    """
    prec = prec or PREC_BITS
    with mpmath.workprec(prec):
        point = {k: (v if isinstance(v, (mpmath.mpf, mpmath.mpc)) else _mp(v))
                 for k, v in (point or {}).items()}
        if isinstance(value, LogExpression):
            return value.evaluate(point, sqrt_sign, prec)
        if isinstance(value, FieldElement):
            a = _eval_base(value.a, point)
            if value.b is None:
                return +a
            root = mpmath.sqrt(mpmath.mpc(_eval_base(value.desc.d, point)))
            if root.imag == 0:
                root = root.real
            return a + sqrt_sign * root * _eval_base(value.b, point)
        if isinstance(value, Frac):
            return _eval_base(value, point)
        return _mp(value)


def close(x, y, rel=REL_TOL):
    """Relative agreement, absolute near zero."""
    scale = max(abs(x), abs(y), mpmath.mpf(1))
    return abs(x - y) <= rel * scale


@dataclass
class LogExpression:
    """rational + sum_i c_i * log(arg_i) with exact rational parts."""

    rational: FieldElement
    logs: list = field(default_factory=list)  # [(coefficient, argument)]

    def evaluate(self, point=None, sqrt_sign=1, prec=None):
        prec = prec or PREC_BITS
        with mpmath.workprec(prec):
            total = mpmath.mpc(evaluate(self.rational, point, sqrt_sign, prec))
            for c, arg in self.logs:
                total += evaluate(c, point, sqrt_sign, prec) * mpmath.log(
                    mpmath.mpc(evaluate(arg, point, sqrt_sign, prec)))
            return total

    def derivative(self, derivation):
        """Exact image under a derivation acting on field elements."""
        out = derivation(self.rational)
        for c, arg in self.logs:
            if not derivation(c).is_zero():
                raise ValueError("log coefficients must be constants")
            out = out + c * derivation(arg) / arg
        return out

    def equals(self, other, points, sqrt_sign=1):
        """Exact comparison of rational parts, numeric comparison of log parts.

        Log parts are compared at each of ``points`` and may differ by an
        integer multiple of 2*pi*i times a log coefficient.
        """
        if self.rational != other.rational:
            return False
        for pt in points:
            with mpmath.workprec(PREC_BITS):
                a = LogExpression(self.rational * 0, self.logs).evaluate(pt, sqrt_sign)
                b = LogExpression(other.rational * 0, other.logs).evaluate(pt, sqrt_sign)
                if not close(mpmath.re(a), mpmath.re(b)):
                    return False
        return True

    def __str__(self):
        parts = [str(self.rational)] + [f"({c})*log({a})" for c, a in self.logs]
        return " + ".join(parts)


def fmpq_from_str(s):
    return flint.fmpq(*(int(x) for x in s.split("/"))) if "/" in s else flint.fmpq(int(s))

"""Truncated Taylor jets in (t - t_base).

At a base point where t is a number rather than a symbol, d/dt is realised on
jets: a value is known through its first ``n`` Taylor coefficients, and every
derivative costs one order of precision.
"""

from __future__ import annotations

from numbers import Integral

import flint


def _is_zero(c):
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


class Jet:
    """c[0] + c[1] e + ... + c[n-1] e^(n-1) + O(e^n), e = t - t_base."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)
        if not self.c:
            raise ValueError("a jet needs at least one coefficient")

    @classmethod
    def constant(cls, value, n):
        z = value * 0
        return cls([value] + [z] * (n - 1))

    @classmethod
    def variable(cls, base, n):
        """The jet of t itself."""
        z = base * 0
        return cls([base, z + 1] + [z] * (n - 2) if n > 1 else [base])

    @property
    def order(self):
        return len(self.c)

    def value(self):
        return self.c[0]

    @staticmethod
    def _foreign(other):
        # containers that wrap jets (series, matrices) handle the product themselves
        return hasattr(other, "coeffs") or hasattr(other, "rows")

    def __add__(self, other):
        if self._foreign(other):
            return NotImplemented
        o = other if isinstance(other, Jet) else None
        if o is None:
            return Jet([self.c[0] + other] + self.c[1:])
        n = min(len(self.c), len(o.c))
        return Jet([self.c[i] + o.c[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-x for x in self.c])

    def __sub__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if self._foreign(other):
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        if self._foreign(other):
            return NotImplemented
        o = other if isinstance(other, Jet) else None
        if o is None:
            return Jet([x * other for x in self.c])
        n = min(len(self.c), len(o.c))
        a, b = self.c, o.c
        out = []
        for k in range(n):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return Jet(out)

    def __rmul__(self, other):
        if self._foreign(other):
            return NotImplemented
        return Jet([other * x for x in self.c])

    def inverse(self):
        a = self.c
        if _is_zero(a[0]):
            raise ZeroDivisionError("jet with vanishing constant term")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, len(a)):
            acc = a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc = acc + a[i] * out[k - i]
            out.append(-(acc * inv0))
        return Jet(out)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        if self._foreign(other):
            return NotImplemented
        if isinstance(other, (Integral, flint.fmpz)):
            other = flint.fmpq(other)
        return self * (1 / other)

    def __rtruediv__(self, other):
        if self._foreign(other):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r = Jet.constant(self.c[0] * 0 + 1, len(self.c))
        for _ in range(k):
            r = r * self
        return r

    def derivative(self):
        if len(self.c) == 1:
            raise ArithmeticError("jet precision exhausted by differentiation")
        return Jet([self.c[i] * i for i in range(1, len(self.c))])

    def map(self, fn):
        return Jet([fn(x) for x in self.c])

    def is_zero(self):
        return all(_is_zero(x) for x in self.c)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return (self - other).is_zero()
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return "Jet(" + ", ".join(str(x) for x in self.c) + ")"

"""Truncated formal series in hbar."""

from __future__ import annotations

from numbers import Integral

import flint

from .laurent import TruncationError

EVEN, ODD, MIXED, UNKNOWN = "even", "odd", "mixed", "unknown"


def _is_zero(c):
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


def parity_of(lo, coeffs):
    seen = set()
    for i, c in enumerate(coeffs):
        if not _is_zero(c):
            seen.add((lo + i) % 2)
    if seen == {0}:
        return EVEN
    if seen == {1}:
        return ODD
    if seen == {0, 1}:
        return MIXED
    return UNKNOWN


class HbarSeries:
    """sum_{k=lo}^{prec-1} c_k hbar^k + O(hbar^prec).

    Coefficients may be any exact ring values (field elements, rational
    functions, jets, matrices of those).  The parity tag is always recomputed
    from the coefficients.
    """

    __slots__ = ("lo", "coeffs", "prec", "zero", "_parity")

    def __init__(self, coeffs, lo=0, prec=None, zero=None):
        coeffs = list(coeffs)
        if prec is None:
            prec = lo + len(coeffs)
        if zero is None:
            if not coeffs:
                raise ValueError("an empty series needs an explicit zero")
            zero = coeffs[0] * 0
        coeffs = coeffs[: max(prec - lo, 0)]
        coeffs += [zero] * (prec - lo - len(coeffs))
        self.lo, self.coeffs, self.prec, self.zero = lo, coeffs, prec, zero
        self._parity = None

    @classmethod
    def hbar(cls, one, prec, power=1):
        return cls([one], lo=power, prec=prec, zero=one * 0)

    @property
    def parity(self):
        if self._parity is None:
            self._parity = parity_of(self.lo, self.coeffs)
        return self._parity

    def parity_infer(self):
        return self.parity

    def __getitem__(self, k):
        if k >= self.prec:
            raise TruncationError(f"hbar^{k} requested, series known below hbar^{self.prec}")
        if k < self.lo:
            return self.zero
        return self.coeffs[k - self.lo]

    coefficient = __getitem__

    def items(self):
        return [(self.lo + i, c) for i, c in enumerate(self.coeffs)]

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.lo + i
        return self.prec

    def is_zero(self):
        return all(_is_zero(c) for c in self.coeffs)

    def first_nonzero(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.lo + i, c
        return None

    # arithmetic -------------------------------------------------------------

    def _const(self, c):
        return HbarSeries([self.zero + c], 0, max(self.prec, 1), self.zero)

    def __add__(self, other):
        if not isinstance(other, HbarSeries):
            other = self._const(other)
        lo = min(self.lo, other.lo)
        prec = min(self.prec, other.prec)
        return HbarSeries([self[k] + other[k] for k in range(lo, prec)], lo, prec, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return HbarSeries([-c for c in self.coeffs], self.lo, self.prec, self.zero)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HbarSeries):
            return HbarSeries([c * other for c in self.coeffs], self.lo, self.prec, self.zero * other)
        v1, v2 = self.valuation(), other.valuation()
        lo = self.lo + other.lo
        prec = min(self.prec + min(v2, other.prec), other.prec + min(v1, self.prec))
        out = []
        for k in range(lo, prec):
            acc = None
            for i in range(max(self.lo, k - other.prec + 1), min(self.prec - 1, k - other.lo) + 1):
                a = self[i]
                if _is_zero(a):
                    continue
                b = other[k - i]
                if _is_zero(b):
                    continue
                t = a * b
                acc = t if acc is None else acc + t
            out.append(self.zero * other.zero if acc is None else acc)
        return HbarSeries(out, lo, prec, self.zero * other.zero)

    def __rmul__(self, other):
        return HbarSeries([other * c for c in self.coeffs], self.lo, self.prec, other * self.zero)

    def inverse(self):
        v = self.valuation()
        if v >= self.prec:
            raise ZeroDivisionError("series vanishes to its precision")
        a0 = self[v]
        inv0 = 1 / a0
        n = self.prec - v
        out = [inv0]
        for k in range(1, n):
            acc = None
            for i in range(1, k + 1):
                a = self[v + i]
                if _is_zero(a):
                    continue
                t = a * out[k - i]
                acc = t if acc is None else acc + t
            out.append(self.zero * inv0 if acc is None else -(acc * inv0))
        return HbarSeries(out, -v, -v + n, self.zero * inv0)

    def __truediv__(self, other):
        if isinstance(other, HbarSeries):
            return self * other.inverse()
        if isinstance(other, (Integral, flint.fmpz)):
            other = flint.fmpq(other)
        return self * (1 / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r = None
        for _ in range(k):
            r = self if r is None else r * self
        return r if r is not None else self._const(1)

    # transformations -----------------------------------------------------

    def map(self, fn, zero=None):
        cs = [fn(c) for c in self.coeffs]
        return HbarSeries(cs, self.lo, self.prec, fn(self.zero) if zero is None else zero)

    def derivative(self, derivation):
        """Apply a coefficient-level derivation (d/dt) termwise."""
        return self.map(derivation)

    def truncate(self, prec):
        return HbarSeries(self.coeffs, self.lo, min(prec, self.prec), self.zero)

    def flip(self):
        """hbar -> -hbar."""
        return HbarSeries([c if (self.lo + i) % 2 == 0 else -c for i, c in enumerate(self.coeffs)],
                          self.lo, self.prec, self.zero)

    def shift(self, k):
        """Multiply by hbar^k."""
        return HbarSeries(self.coeffs, self.lo + k, self.prec + k, self.zero)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        terms = [f"({c})*h^{k}" for k, c in self.items() if not _is_zero(c)]
        return (" + ".join(terms) if terms else "0") + f" + O(h^{self.prec})"

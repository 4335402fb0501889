"""Truncated Laurent series, expansion of rational functions, residues."""

from __future__ import annotations

from .field import FieldElement, _is_scalar
from .poly import Polynomial, base_parts


class TruncationError(ArithmeticError):
    """A coefficient at or beyond the truncation order was requested."""


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "oo"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _is_zero(c):
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


class LaurentSeries:
    """sum_{k >= lo} c_k u^k + O(u^prec) in a local coordinate u at ``point``.

    For a finite point u = z - point; at infinity u = 1/z.  ``prec`` is the
    exclusive truncation exponent.  The leading stored coefficient is nonzero
    unless the series vanishes to its precision, in which case ``coeffs`` is
    empty and ``lo == prec``.
    """

    __slots__ = ("point", "lo", "coeffs", "prec", "zero")

    def __init__(self, point, lo, coeffs, prec, zero=None):
        coeffs = list(coeffs[: max(prec - lo, 0)])
        k = 0
        while k < len(coeffs) and _is_zero(coeffs[k]):
            k += 1
        if zero is None:
            zero = coeffs[0] * 0 if coeffs else 0
        self.zero = zero
        if k == len(coeffs):
            self.point, self.lo, self.coeffs, self.prec = point, prec, [], prec
        else:
            self.point, self.lo, self.coeffs, self.prec = point, lo + k, coeffs[k:], prec
            # pad so every exponent below prec is represented
            missing = prec - self.lo - len(self.coeffs)
            if missing > 0:
                self.coeffs.extend([zero] * missing)

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        return self.lo

    def __getitem__(self, k):
        if k >= self.prec:
            raise TruncationError(f"coefficient u^{k} requested, series known below u^{self.prec}")
        if k < self.lo:
            return self.zero
        return self.coeffs[k - self.lo]

    coefficient = __getitem__

    def _check(self, other):
        if isinstance(other, LaurentSeries):
            if other.point is not self.point and other.point != self.point:
                raise ValueError("series at different points")
            return other
        return None

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return self + LaurentSeries(self.point, 0, [other], self.prec if self.prec > 0 else 1, self.zero)
        prec = min(self.prec, o.prec)
        lo = min(self.lo, o.lo)
        return LaurentSeries(self.point, lo, [self[k] + o[k] if k < prec else self.zero
                                              for k in range(lo, prec)], prec, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.point, self.lo, [-c for c in self.coeffs], self.prec, self.zero)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check(other)
        if o is None:
            return LaurentSeries(self.point, self.lo, [c * other for c in self.coeffs], self.prec, self.zero)
        if self.is_zero() or o.is_zero():
            prec = min(self.prec + o.lo, o.prec + self.lo)
            return LaurentSeries(self.point, prec, [], prec, self.zero)
        lo = self.lo + o.lo
        prec = min(self.prec + o.lo, o.prec + self.lo)
        n = prec - lo
        a, b = self.coeffs, o.coeffs
        out = []
        for k in range(n):
            acc = None
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                t = a[i] * b[k - i]
                acc = t if acc is None else acc + t
            out.append(self.zero if acc is None else acc)
        return LaurentSeries(self.point, lo, out, prec, self.zero)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("series vanishes to its precision")
        n = self.prec - self.lo
        a = self.coeffs
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, n):
            acc = None
            for i in range(1, min(k, len(a) - 1) + 1):
                t = a[i] * out[k - i]
                acc = t if acc is None else acc + t
            out.append(-(acc * inv0) if acc is not None else self.zero)
        return LaurentSeries(self.point, -self.lo, out, -self.lo + n, self.zero)

    def __truediv__(self, other):
        o = self._check(other)
        if o is None:
            return self * (1 / other)
        return self * o.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        r = None
        for _ in range(k):
            r = self if r is None else r * self
        return r if r is not None else LaurentSeries(self.point, 0, [self.zero + 1], self.prec - self.lo, self.zero)

    def derivative(self):
        """d/du in the local coordinate."""
        cs = [c * (self.lo + i) for i, c in enumerate(self.coeffs)]
        return LaurentSeries(self.point, self.lo - 1, cs, self.prec - 1, self.zero)

    def integral(self):
        """Primitive in u with zero constant term; needs no u^-1 term."""
        if self.lo <= -1 and self.prec > -1 and not _is_zero(self[-1]):
            raise ValueError("series has a residue; primitive is not a Laurent series")
        cs = []
        for i, c in enumerate(self.coeffs):
            k = self.lo + i
            cs.append(self.zero if k == -1 else c / (k + 1))
        return LaurentSeries(self.point, self.lo + 1, cs, self.prec + 1, self.zero)

    def truncate(self, prec):
        return LaurentSeries(self.point, self.lo, self.coeffs, min(prec, self.prec), self.zero)

    def shift(self, k):
        """Multiply by u^k."""
        return LaurentSeries(self.point, self.lo + k, self.coeffs, self.prec + k, self.zero)

    def __repr__(self):
        terms = [f"({c})*u^{self.lo + i}" for i, c in enumerate(self.coeffs) if not _is_zero(c)]
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(u^{self.prec}) at {self.point}"


# ---------------------------------------------------------------------------
# expansion of rational functions


def _series_quotient(point, num, den, lo_shift, prec, zero):
    """(num/den) u^lo_shift where num, den are coefficient lists in u."""
    vn = next((i for i, c in enumerate(num) if not c.is_zero()), None)
    if vn is None:
        return LaurentSeries(point, prec, [], prec, zero)
    vd = next(i for i, c in enumerate(den) if not c.is_zero())
    lo = vn - vd + lo_shift
    n = prec - lo
    if n <= 0:
        return LaurentSeries(point, prec, [], prec, zero)
    a = num[vn:]
    b = den[vd:]
    inv0 = b[0].inverse()
    out = []
    for k in range(n):
        acc = a[k] if k < len(a) else zero
        for i in range(1, min(k, len(b) - 1) + 1):
            acc = acc - b[i] * out[k - i]
        out.append(acc * inv0)
    return LaurentSeries(point, lo, out, prec, zero)


def laurent_expand(f, point, order, var=None):
    """Expansion of the rational function ``f`` at ``point`` up to u^order (exclusive).

    ``point`` is a field element, a rational scalar, or :data:`INF`.  At
    infinity the local coordinate is u = 1/var.
    """
    if _is_scalar(f) or not getattr(f.desc, "free", ()):
        f = _as_rf(f, var)
    var = var or f.var
    cdesc, parts = base_parts(f, var)
    if point is not INF and not isinstance(point, FieldElement):
        point = cdesc.element(point)
    zero = cdesc.zero()
    if point is not INF:
        zero = zero + point * 0
    result = None
    for idx, part in enumerate(parts):
        if part is None:
            continue
        num, den = part
        if point is INF:
            dn, dd = len(num) - 1, len(den) - 1
            s = _series_quotient(INF, list(reversed(num)), list(reversed(den)), dd - dn, order, zero)
        else:
            N = Polynomial(num, var, cdesc).taylor_shift(point)
            D = Polynomial(den, var, cdesc).taylor_shift(point)
            s = _series_quotient(point, N, D, 0, order, zero)
        if idx == 1:
            root = cdesc.sqrt_d()
            s = s * root
        result = s if result is None else result + s
    return result


def _as_rf(f, var):
    from .field import FieldDescriptor
    if var is None:
        raise ValueError("a variable name is required for constant input")
    if _is_scalar(f):
        desc = FieldDescriptor((var,))
        return desc.element(f)
    return f.coerce_to(f.desc.with_variables([var]))


def residue(f, point, var=None):
    """Res of f(var) d(var) at ``point`` (finite or :data:`INF`)."""
    if point is INF:
        s = laurent_expand(f, INF, 2, var)
        return -s[1]
    s = laurent_expand(f, point, 0, var)
    return s[-1]


def principal_part_order(f, point, var=None):
    """Pole order of ``f`` at ``point`` (0 when regular)."""
    s = laurent_expand(f, point, 1, var)
    return max(0, -s.lo) if not s.is_zero() else 0

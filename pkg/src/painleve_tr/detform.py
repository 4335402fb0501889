"""The Lax side: Lax pairs, projector towers, determinantal correlators.

Lax matrices are 2x2 matrices whose entries are hbar-series; the series
coefficients are rational functions of ``x`` over the coefficient ring of the
formal solution (field elements in symbolic mode, Taylor jets in jet mode).

Everything downstream of the Lax pair (the projector M, the correlators W_n
and the loop-equation data) is evaluated at the base time and written in the
curve's uniformizing coordinate z, where sqrt(E(x)) = y(z) is rational.
Two constructions of the projector tower are available:

* ``method="t"`` uses hbar dM/dt = [R, M] (symbolic base points only);
* ``method="x"`` uses hbar dM/dx = [D, M] (every base point).

Both solve the same 3x3 linear system per order and must agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import flint

from .algebra.field import Frac
from .algebra.hbar import EVEN, ODD, HbarSeries
from .algebra.jet import Jet
from .curves import PARAM_NAMES, Label, SpectralCurve, build_curve
from .painleve import FormalSolution, extend_solution, parity_conjugate_pq, pvi_z

HALF = flint.fmpq(1, 2)


class ConsistencyError(ArithmeticError):
    """A structural identity that must hold exactly was violated."""


def _zero(c):
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


# ---------------------------------------------------------------------------
# 2x2 matrices over any ring


class Mat2:
    """A 2x2 matrix with entries in any ring that supports + - *."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        if len(self.rows) != 2 or any(len(r) != 2 for r in self.rows):
            raise ValueError("2x2 matrix expected")

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def map(self, fn):
        return Mat2([[fn(c) for c in r] for r in self.rows])

    def __add__(self, other):
        if isinstance(other, Mat2):
            return Mat2([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])
        return Mat2([[self.rows[0][0] + other, self.rows[0][1]], [self.rows[1][0], self.rows[1][1] + other]])

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Mat2):
            a, b = self.rows, other.rows
            return Mat2([[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)])
        return self.map(lambda c: c * other)

    def __rmul__(self, other):
        return self.map(lambda c: other * c)

    def __truediv__(self, other):
        return self.map(lambda c: c / other)

    def trace(self):
        return self.rows[0][0] + self.rows[1][1]

    def det(self):
        return self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]

    def transpose(self):
        r = self.rows
        return Mat2([[r[0][0], r[1][0]], [r[0][1], r[1][1]]])

    def inverse(self):
        d = self.det()
        r = self.rows
        return Mat2([[r[1][1] / d, -r[0][1] / d], [-r[1][0] / d, r[0][0] / d]])

    def is_zero(self):
        return all(_zero(c) for r in self.rows for c in r)

    def entries(self):
        return [c for r in self.rows for c in r]

    def __repr__(self):
        return f"Mat2({self.rows!r})"


def commutator(a, b):
    return a * b - b * a


def series_coefficient(m, k):
    """The hbar^k coefficient of a matrix of series."""
    return m.map(lambda s: s[k])


# ---------------------------------------------------------------------------
# Lax pairs


@dataclass
class LaxPair:
    label: Label
    sol: FormalSolution
    D: Mat2
    R: Mat2
    xdesc: object

    @property
    def order(self):
        return self.sol.order

    def x(self):
        return self.xdesc.gen("x")

    def dt(self, m):
        """d/dt at fixed x, entrywise on a matrix of series."""
        return m.map(lambda s: s.map(self.sol.D))

    def dx(self, m):
        return m.map(lambda s: s.map(_dx_coeff))

    def D_at_base(self, k):
        """The hbar^k coefficient of D at the base time, a matrix of rational functions of x."""
        return _value_matrix(series_coefficient(self.D, k), self.sol)

    def R_at_base(self, k):
        return _value_matrix(series_coefficient(self.R, k), self.sol)


def _dx_coeff(c):
    if isinstance(c, Jet):
        return c.map(lambda e: e.derivative("x"))
    return c.derivative("x") if hasattr(c, "derivative") else c * 0


def _value(c, sol):
    return c.c[0] if isinstance(c, Jet) else c


def _value_matrix(m, sol):
    return m.map(lambda c: _value(c, sol))


def _x_descriptor(sol):
    return sol.q[0].c[0].desc.with_variables(["x"]) if isinstance(sol.q[0], Jet) \
        else sol.q[0].desc.with_variables(["x"])


def _pvi_blocks(params, p, q, t):
    t0, t1, tt, ti = (params[n] for n in PARAM_NAMES[Label.PVI])
    z0, z1, zt = pvi_z(params, p, q, t)
    A0 = Mat2([[z0 + t0 / 2, -q / t], [z0 * (z0 + t0) * t / q, -(z0 + t0 / 2)]])
    A1 = Mat2([[z1 + t1 / 2, (q - 1) / (t - 1)], [-(z1 * (z1 + t1) * (t - 1) / (q - 1)), -(z1 + t1 / 2)]])
    At = Mat2([[zt + tt / 2, -((q - t) / (t * (t - 1)))], [zt * (zt + tt) * (t * (t - 1)) / (q - t), -(zt + tt / 2)]])
    return A0, A1, At


def lax_matrices(label, params, p, q, t, h, x):
    """(D_J, R_J) with the given ring values for p, q, t, hbar and x."""
    L = Label.parse(label)
    z = p * 0
    one = z + 1

    def sig3(c):
        return Mat2([[c, z], [z, -c]])

    if L is Label.PI:
        D = Mat2([[-p, q * x + q * q + t / 2 + x * x], [(q * -4) + x * 4, p]])
        R = Mat2([[z, q + x / 2], [one * 2, z]])
    elif L is Label.PII:
        (th,) = (params["theta"],)
        d11 = p + t / 2 + x * x
        D = Mat2([[d11, -q + x], [-((p * x + q * p + th) * 2), -d11]])
        R = Mat2([[(q + x) / 2, one * HALF], [-p, -((q + x) / 2)]])
    elif L is Label.PIII:
        t0, ti = params["theta0"], params["thetainf"]
        c = t * (t0 + ti) / (p * 2)
        N1 = Mat2([[one * (-ti / 2), -(p * q)], [-(q * (p - t)) - ti + c, one * (ti / 2)]])
        N2 = Mat2([[p - t / 2, -p], [p - t, -p + t / 2]])
        D = sig3(one * t / 2) + N1 / x + N2 / (x * x)
        r11 = -ti / 2 + t * q + c
        r12 = -(p * q)
        r21 = -(q * (p - t)) - ti + c
        # only three entries are given; R is traceless, so r22 = -r11
        R = sig3(one * x / 2) - N2 / (t * x) + Mat2([[r11, r12], [r21, -r11]]) / t
    elif L is Label.PIV:
        t0, ti = params["theta0"], params["thetainf"]
        u = p * q
        D = (sig3(one * x) + Mat2([[one * t, one], [-((u + t0 + ti) * 2), -(one * t)]])
             + Mat2([[u + t0, -q], [p * (u + t0 * 2), -(u + t0)]]) / x)
        R = sig3(one * x) + Mat2([[q + t, one], [-((u + t0 + ti) * 2), -(q + t)]])
    elif L is Label.PV:
        t0, t1, ti = params["theta0"], params["theta1"], params["thetainf"]
        u = p * q
        B0 = Mat2([[u + t0 / 2, -(u + t0)], [u, -(u + t0 / 2)]])
        # the (1,1) entry carries (theta0 + thetainf)/2 so that B1 is traceless
        # with eigenvalues +-theta1/2
        B1 = Mat2([[-u - (t0 + ti) / 2, p + (t0 - t1 + ti) / (q * 2)],
                   [-(q * (u + (t0 + t1 + ti) / 2)), u + (t0 + ti) / 2]])
        D = sig3(one * t / 2) + B0 / x + B1 / (x - 1)
        r11 = -(p * (q - 1) ** 2) + t0 - q * (t0 + t1 + ti) / 2 - (t0 - t1 + ti) / (q * 2)
        # off-diagonal entries: the unique choice compatible with D_V and the
        # first-order system (see the decisions ledger for the sign changes)
        r12 = -(p * (q - 1) * 2) - t0 * 2 + (t0 - t1 + ti) / q
        r21 = -(u * (q - 1) * 2) - q * (t0 + t1 + ti)
        R = sig3(one * x / 2) + Mat2([[r11, r12], [r21, -r11]]) / (t * 2)
    else:
        ti = params["thetainf"]
        A0, A1, At = _pvi_blocks(params, p, q, t)
        D = A0 / x + A1 / (x - 1) + At / (x - t)
        R = -(At / (x - t)) - sig3((q - t) * (-h + ti) / (t * (t - 1) * 2))
    return D, R


def build_lax(sol, order=None):
    """The Lax pair of a formal solution, as matrices of hbar-series."""
    if order is not None and order > sol.order:
        sol = extend_solution(sol, order)
    xd = _x_descriptor(sol)
    x = xd.gen("x")
    D, R = lax_matrices(sol.label, sol.params, sol.p, sol.q, sol.D.t, sol.hbar(), x)
    tr = D.trace()
    if not tr.is_zero():
        raise ConsistencyError("Tr D is not zero")
    return LaxPair(sol.label, sol, D, R, xd)


def zero_curvature(lax):
    """hbar dD/dt - hbar dD/dx + [D, R] as a matrix of series."""
    Dt = lax.dt(lax.D).map(lambda s: s.shift(1))
    Rx = lax.dx(lax.R).map(lambda s: s.shift(1))
    return Dt - Rx + commutator(lax.D, lax.R)


def zero_curvature_report(lax, through=4):
    """{'max_order': k, 'ok': bool, 'witness': first nonzero coefficient or None}."""
    Z = zero_curvature(lax)
    prec = min(s.prec for s in Z.entries())
    if prec <= through:
        raise ValueError(f"residual known below hbar^{prec}; extend the solution")
    for k in range(0, through + 1):
        for (i, j), s in zip(itertools.product(range(2), range(2)), Z.entries()):
            c = s[k]
            if not _zero(c):
                return {"max_order": through, "ok": False, "witness": {"order": k, "entry": [i, j], "value": str(c)}}
    return {"max_order": through, "ok": True, "witness": None}


def spectral_determinant(lax):
    """-det D^(0)(x) at the base time."""
    return -lax.D_at_base(0).det()


def check_spectral_curve(lax, curve):
    """-det D^(0) = E_J(x) and E_J(x(z)) = y(z)^2, both exactly."""
    E = spectral_determinant(lax)
    return {
        "-det D0 = E": (E - curve.E).is_zero(),
        "E(x(z)) = y^2": (curve.at_x(curve.E) - curve.y * curve.y).is_zero(),
    }


# ---------------------------------------------------------------------------
# projector tower


def _in_z(m, curve):
    """Substitute x = x(z) into a matrix of rational functions of x."""
    one = curve.zdesc.one()
    return m.map(lambda c: curve.at_x(c) if "x" in c.desc.variables else c * one)


def _dz(f, var="z"):
    return f.derivative(var)


@dataclass
class ProjectorTower:
    """M^(0..K) as matrices of rational functions of z."""

    lax: LaxPair
    curve: SpectralCurve
    method: str
    M: list = field(default_factory=list)
    S: object = None  # sqrt(-det R0) (or D0 for the x-tower) as a function of z

    @property
    def depth(self):
        return len(self.M) - 1

    def renamed(self, var):
        """The tower with z renamed to ``var``."""
        nd = self.curve.desc.with_variables([var])
        w = nd.gen(var)
        return [m.map(lambda c: c.substitute("z", w)) for m in self.M]


def _check_piii_whitelist(lax, curve):
    """All entries of R^(0) vanish at x = 1/q0 (the extra zero of det R^(0))."""
    R0 = lax.R_at_base(0)
    q0 = curve.base.q0
    pt = 1 / q0
    return all(c.substitute("x", pt).is_zero() for c in R0.entries())


def m0(lax, curve, use="R"):
    """M^(0)(z) = I/2 + R0/(2 S), with S = sqrt(-det R0) written through y(z).

    R0 and D0 commute and are traceless, so R0 = lam D0 with lam rational in
    x; S = -lam y fixes the branch so that the leading coefficient of W_1 is
    +y(z).  Returns (M0, S).
    """
    D0 = _in_z(lax.D_at_base(0), curve)
    X0 = D0 if use == "D" else _in_z(lax.R_at_base(0), curve)
    lam = None
    for i, j in ((0, 1), (1, 0), (0, 0)):
        if not D0[i, j].is_zero():
            lam = X0[i, j] / D0[i, j]
            break
    if lam is None:
        raise ConsistencyError("D0 vanishes identically")
    if not (X0 - D0 * lam).is_zero():
        raise ConsistencyError("R0 is not proportional to D0")
    S = -(lam * curve.y)
    if not (S * S + X0.det()).is_zero():
        raise ConsistencyError("S^2 != -det R0")
    if lax.label is Label.PIII and use == "R" and not _check_piii_whitelist(lax, curve):
        raise ConsistencyError("R0 does not vanish at x = 1/q0")
    M0 = X0 / (S * 2) + HALF
    one = curve.zdesc.one()
    if not (M0.trace() - one).is_zero() or not M0.det().is_zero():
        raise ConsistencyError("M0 is not a rank one projector")
    if not commutator(D0, M0).is_zero():
        raise ConsistencyError("[D0, M0] != 0")
    return M0, S


def _solve3(A, b):
    """Cramer's rule for a 3x3 system over a field."""
    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    d = det3(A)
    if d.is_zero():
        raise ConsistencyError("order-k system is singular")
    out = []
    for col in range(3):
        m = [[b[i] if j == col else A[i][j] for j in range(3)] for i in range(3)]
        out.append(det3(m) / d)
    return out, d


def system_matrix(X0, M0):
    """Rows: [X0, M]_11, [X0, M]_12 and the order-k part of det M = 0 (unknowns m11, m12, m21)."""
    return [
        [X0[0, 0] * 0, -X0[1, 0], X0[0, 1]],
        [-(X0[0, 1] * 2), X0[0, 0] * 2, X0[0, 0] * 0],
        [M0[0, 0] * 2 - 1, M0[1, 0], M0[0, 1]],
    ]


def _dt_at_x(f, lax, curve):
    """d/dt at fixed x of a rational function of z (symbolic mode)."""
    D = lax.sol.D
    xdot = _dt_coeff(curve.x, D)
    return _dt_coeff(f, D) - xdot / curve.dx() * f.derivative("z")


def _dt_coeff(f, D):
    out = f.derivative("q0") * D.q0dot if "q0" in f.desc.variables else f * 0
    if D.label is Label.PIV and "t" in f.desc.variables:
        out = out + f.derivative("t")
    return out


def m_tower(lax, K, curve=None, method=None, projector_sign=-1):
    """M^(0), ..., M^(K) solving the order-k systems exactly.

    ``projector_sign`` is the sign of the quadratic sum on the right-hand side
    of the det M = 0 row; -1 is what expanding M^2 = M gives (kept as a
    parameter so the opposite choice can be shown to fail).
    """
    curve = curve or build_curve(lax.label, lax.sol.params, lax.sol.base)
    symbolic = lax.sol.D.mode == "symbolic"
    method = method or ("t" if symbolic else "x")
    if method == "t" and not symbolic:
        raise ValueError("the t-tower needs a symbolic base point")
    if K > lax.order:
        raise ValueError(f"tower depth {K} exceeds the solution order {lax.order}")
    use = "R" if method == "t" else "D"
    M0, S = m0(lax, curve, use=use)
    X = [_in_z(lax.R_at_base(k) if use == "R" else lax.D_at_base(k), curve) for k in range(K + 1)]
    X0 = X[0]
    A = system_matrix(X0, M0)
    M = [M0]
    dx = curve.dx()
    for k in range(1, K + 1):
        prev = M[k - 1]
        if method == "t":
            deriv = prev.map(lambda f: _dt_at_x(f, lax, curve))
        else:
            deriv = prev.map(lambda f: f.derivative("z") / dx)
        rhs = deriv
        for i in range(1, k + 1):
            rhs = rhs - commutator(X[i], M[k - i])
        quad = None
        for i in range(1, k):
            term = M[i][0, 0] * M[k - i][0, 0] + M[i][0, 1] * M[k - i][1, 0]
            quad = term if quad is None else quad + term
        quad = quad if quad is not None else M0[0, 0] * 0
        (m11, m12, m21), _ = _solve3(A, [rhs[0, 0], rhs[0, 1], quad * projector_sign])
        Mk = Mat2([[m11, m12], [m21, -m11]])
        resid = commutator(X0, Mk) - rhs
        if not resid.is_zero():
            raise ConsistencyError(f"order {k}: the (2,1) equation is not implied; residual {resid}")
        M.append(Mk)
    return ProjectorTower(lax, curve, method, M, S)


def projector_residuals(tower):
    """[(M^2 - M) at hbar^k for k = 0..K] and the traces."""
    M = tower.M
    out = []
    for k in range(len(M)):
        acc = None
        for i in range(k + 1):
            term = M[i] * M[k - i]
            acc = term if acc is None else acc + term
        out.append(acc - M[k])
    traces = [m.trace() - (1 if k == 0 else 0) for k, m in enumerate(M)]
    return out, traces


def determinant_identity(tower):
    """det(system) * S = 2 R12^(0) det R^(0) for the t-tower (D for the x-tower)."""
    lax, curve = tower.lax, tower.curve
    X0 = _in_z(lax.R_at_base(0) if tower.method == "t" else lax.D_at_base(0), curve)
    A = system_matrix(X0, tower.M[0])
    _, d = _solve3(A, [X0[0, 0] * 0] * 3)
    return (d * tower.S - X0[0, 1] * X0.det() * 2).is_zero()


# ---------------------------------------------------------------------------
# pole bookkeeping


def _parts(f):
    """The rational parts a, b of f = a + b sqrt(d) as Frac values (or scalars)."""
    return [f.a] + ([f.b] if f.b is not None else [])


def _strip_roots(den, var, roots):
    """Divide out (var - r) for r in roots as often as possible; return (rest, {r: multiplicity})."""
    ctx = den.context()
    v = ctx.gen(ctx.variable_to_index(var))
    mult = {}
    for r in roots:
        lin = v - r
        m = 0
        while True:
            qq, rr = divmod(den, lin)
            if not rr.is_zero():
                break
            den = qq
            m += 1
        mult[r] = m
    return den, mult


def pole_report(f, variables, allowed, at_infinity=None):
    """Where a rational function of ``variables`` has poles.

    ``allowed`` is a list of rational numbers.  Returns (ok, witness): ok iff
    every finite pole in every variable sits at an allowed point and, when
    ``at_infinity`` is an int m, deg(num) - deg(den) <= m in each variable.
    """
    for part in _parts(f):
        if not isinstance(part, Frac):
            continue
        for var in variables:
            if var not in part.ctx.names():
                continue
            rest, _ = _strip_roots(part.den, var, allowed)
            i = part.ctx.variable_to_index(var)
            if rest.degrees()[i] != 0:
                return False, {"variable": var, "denominator": rest.str()}
            if at_infinity is not None:
                dn, dd = part.num.degrees()[i], part.den.degrees()[i]
                if not part.num.is_zero() and dn - dd > at_infinity:
                    return False, {"variable": var, "degree at infinity": int(dn - dd)}
    return True, None


def _rational_points(curve):
    pts = []
    for r in curve.branch_points:
        pts.append(r.to_fmpq())
    return pts


def tower_pole_report(tower):
    """M^(k), k >= 1, has poles in z only over branch points (and over x = infinity)."""
    curve = tower.curve
    allowed = _rational_points(curve)
    if curve.involution == "inv":
        allowed = allowed + [flint.fmpq(0)]  # z = 0 lies over x = infinity
    out = []
    for k, m in enumerate(tower.M[1:], start=1):
        for c in m.entries():
            ok, w = pole_report(c, ["z"], allowed)
            if not ok:
                out.append({"order": k, "witness": w})
                break
    return out


# ---------------------------------------------------------------------------
# correlators


@dataclass
class CorrelatorSeries:
    """W_n: coefficient of hbar^k (k from ``lo``) as rational functions of z1..zn.

    ``forms`` holds W_n times dx(z1)...dx(zn), i.e. the coefficient of
    dz1...dzn, which is what the recursion produces.
    """

    n: int
    lo: int
    coeffs: list
    forms: list
    variables: tuple

    def __getitem__(self, k):
        return self.coeffs[k - self.lo]

    def form(self, k):
        return self.forms[k - self.lo]

    @property
    def prec(self):
        return self.lo + len(self.coeffs)

    def items(self):
        return [(self.lo + i, c) for i, c in enumerate(self.coeffs)]

    @property
    def parity(self):
        s = HbarSeries(self.coeffs, self.lo, self.prec, self.coeffs[0] * 0)
        return s.parity


def _tower_in(tower, var):
    return tower.M if var == "z" else tower.renamed(var)


def _x_in(curve, var):
    if var == "z":
        return curve.x
    return curve.x.substitute("z", curve.desc.with_variables([var]).gen(var))


def _lax_D_in_z(tower, K, var="z"):
    lax, curve = tower.lax, tower.curve
    out = []
    for k in range(K + 1):
        m = _in_z(lax.D_at_base(k), curve)
        if var != "z":
            w = curve.desc.with_variables([var]).gen(var)
            m = m.map(lambda c: c.substitute("z", w))
        out.append(m)
    return out


def correlators(tower, n, order):
    """W_n through hbar^order from the projector tower (n = 1, 2, 3)."""
    curve = tower.curve
    if n == 1:
        K = order + 1
        if tower.depth < K:
            raise ValueError(f"W_1 through hbar^{order} needs M^({K})")
        Dz = _lax_D_in_z(tower, K)
        M = tower.M
        dx = curve.dx()
        coeffs = []
        for k in range(K + 1):
            acc = None
            for i in range(k + 1):
                term = (Dz[i] * M[k - i]).trace()
                acc = term if acc is None else acc + term
            coeffs.append(-acc)
        return CorrelatorSeries(1, -1, coeffs, [c * dx for c in coeffs], ("z",))
    if tower.depth < order:
        raise ValueError(f"W_{n} through hbar^{order} needs M^({order})")
    names = tuple(f"z{i + 1}" for i in range(n))
    Ms = [_tower_in(tower, v) for v in names]
    xs = [_x_in(curve, v) for v in names]
    dxs = [x.derivative(v) for x, v in zip(xs, names)]
    dxprod = dxs[0]
    for d in dxs[1:]:
        dxprod = dxprod * d
    coeffs = []
    if n == 2:
        den = (xs[0] - xs[1]) ** 2
        for k in range(order + 1):
            acc = None
            for i in range(k + 1):
                term = (Ms[0][i] * Ms[1][k - i]).trace()
                acc = term if acc is None else acc + term
            if k == 0:
                acc = acc - 1
            coeffs.append(acc / den)
    elif n == 3:
        den = (xs[0] - xs[1]) * (xs[1] - xs[2]) * (xs[2] - xs[0])
        for k in range(order + 1):
            acc = None
            for i in range(k + 1):
                for j in range(k - i + 1):
                    l = k - i - j
                    term = (Ms[0][i] * Ms[1][j] * Ms[2][l]).trace() - (Ms[0][i] * Ms[2][l] * Ms[1][j]).trace()
                    acc = term if acc is None else acc + term
            coeffs.append(acc / den)
    else:
        raise ValueError("only n <= 3 is supported")
    return CorrelatorSeries(n, 0, coeffs, [c * dxprod for c in coeffs], names)


def w2_diagonal(tower, order):
    """W_2(x, x) = Tr(M M'')/2 (derivatives in x), through hbar^order."""
    curve = tower.curve
    dx = curve.dx()

    def ddx(f):
        return f.derivative("z") / dx

    M = tower.M[: order + 1]
    Mpp = [m.map(lambda f: ddx(ddx(f))) for m in M]
    out = []
    for k in range(order + 1):
        acc = None
        for i in range(k + 1):
            term = (M[i] * Mpp[k - i]).trace()
            acc = term if acc is None else acc + term
        out.append(acc * HALF)
    return out


def first_loop_equation(tower, order, printed=False):
    """[P_1 - W_2(x,x) - W_1^2 at hbar^k] for k = -2..order-2 (should all vanish).

    P_1 = -hbar^-2 det D: with w_1^(-1) = +sqrt(E) the square W_1^2 starts at
    E = -det D^(0).  ``printed=True`` uses +hbar^-2 det D, which leaves the
    even orders nonzero.
    """
    K = order
    W1 = correlators(tower, 1, K - 1)
    W2d = w2_diagonal(tower, K)
    Dz = _lax_D_in_z(tower, K)
    out = []
    for k in range(-2, K - 1):
        # P1 = hbar^-2 det D: the hbar^k part uses det D at hbar^(k+2)
        m = k + 2
        P1 = None
        for i in range(m + 1):
            a, b = Dz[i], Dz[m - i]
            term = a[0, 0] * b[1, 1] - a[0, 1] * b[1, 0]
            P1 = term if P1 is None else P1 + term
        sq = None
        for i in range(-1, k + 2):
            j = k - i
            if j < -1 or j > K - 1:
                continue
            term = W1[i] * W1[j]
            sq = term if sq is None else sq + term
        w2 = W2d[k] if k >= 0 else P1 * 0
        if not printed:
            P1 = -P1
        out.append(P1 - w2 - sq)
    return out


# ---------------------------------------------------------------------------
# loop equations: x-dependence of P_2


P2_FACTORS = {
    Label.PI: lambda x, t: 1,
    Label.PII: lambda x, t: 1,
    Label.PIII: lambda x, t: x * x,
    Label.PIV: lambda x, t: x,
    Label.PV: lambda x, t: x * (x - 1),
    Label.PVI: lambda x, t: x * (x - 1) * (x - t),
}


def p2_series(tower, order):
    """P_2(x; x1) at hbar^k, k = -1..order, as rational functions of (x, z1)."""
    lax, curve = tower.lax, tower.curve
    K = order + 1
    if tower.depth < K:
        raise ValueError(f"P_2 through hbar^{order} needs M^({K})")
    M1 = _tower_in(tower, "z1")
    x1 = _x_in(curve, "z1")
    d = curve.desc.with_variables(["x", "z1"])
    X = d.gen("x")
    out = []
    Dx = [lax.D_at_base(k) for k in range(K + 1)]
    Tay = []
    for k in range(K + 1):
        Dk = Dx[k]
        Dk1 = Dk.map(lambda c: c.substitute("x", x1))
        Dpk1 = Dk.map(lambda c: c.derivative("x").substitute("x", x1))
        Tay.append((Dk.map(lambda c: c * 1) - Dk1 - Dpk1 * (X - x1)) / ((X - x1) ** 2))
    for k in range(-1, order + 1):
        m = k + 1
        acc = None
        for i in range(m + 1):
            term = (Tay[i] * M1[m - i]).trace()
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def _w1_prime_in(tower, order, var="z1"):
    """dW_1/dx at hbar^k, k = -1..order, as functions of ``var``."""
    curve = tower.curve
    W1 = correlators(tower, 1, order)
    w = curve.desc.with_variables([var]).gen(var)
    dxdz = curve.x.derivative("z")
    return [(W1[k].derivative("z") / dxdz).substitute("z", w) for k in range(-1, order + 1)]


def _x_degree_at_most(f, d):
    """True when the rational function f is a polynomial in x of degree <= d."""
    if d < 0:
        return f.is_zero()
    for _ in range(d + 1):
        f = f.derivative("x")
    return f.is_zero()


def loop_equation_check(tower, order=2):
    """x-dependence of P_2(x; x1) order by order, for k = -1..order.

    ``stated``: P_2 times the label's pole factor f_J(x) is independent of x.
    ``corrected``: P_2 f_J - W_1'(x1) x^(deg f_J - 1) is a polynomial in x of
    degree <= deg f_J - 2.  Near x = infinity P_2 ~ -Tr(D'(x1) M(x1))/(hbar x),
    and hbar M' = [D, M] turns that coefficient into W_1'(x1); it is nonzero at
    the odd orders.  This applies when D is bounded at infinity (PIII, PV,
    PVI); for PI, PII and PIV the growing part of D cancels in P_2 and the
    two readings coincide.
    """
    lax = tower.lax
    t = lax.sol.base.t
    fac = P2_FACTORS[lax.label]
    d = tower.curve.desc.with_variables(["x", "z1"])
    X = d.gen("x")
    f = fac(X, t)
    deg = {Label.PIII: 2, Label.PV: 2, Label.PVI: 3}.get(lax.label, 0)
    W1p = _w1_prime_in(tower, order)
    rows = []
    ok_stated = ok_corrected = True
    for k, P, wp in zip(range(-1, order + 1), p2_series(tower, order), W1p):
        g = P * f
        dep = g.derivative("x")
        stated = dep.is_zero()
        if deg == 0:
            corrected = stated
        else:
            corrected = _x_degree_at_most(g - wp * X ** (deg - 1), deg - 2)
        ok_stated = ok_stated and stated
        ok_corrected = ok_corrected and corrected
        rows.append({"order": k, "stated": stated, "corrected": corrected,
                     "witness": None if stated else str(dep)[:400]})
    return {"label": lax.label.value, "ok": ok_stated, "ok_corrected": ok_corrected, "orders": rows}


# ---------------------------------------------------------------------------
# hbar -> -hbar conjugation


def gamma_matrix(label, params, p, q, t, printed=False):
    """Gamma_J(t) built from (p, q).

    For PIII the (1,1) entry is -(p - t)/p; ``printed=True`` gives the
    tabulated -(p - t)/t, which fails the conjugation identity.
    """
    L = Label.parse(label)
    z = p * 0
    one = z + 1
    if L is Label.PI:
        return Mat2([[z, one], [one, z]])
    if L is Label.PII:
        g = -(p * 2)
    elif L is Label.PIII:
        g = -((p - t) / (t if printed else p))
    elif L is Label.PIV:
        g = -((p * q + params["theta0"] + params["thetainf"]) * 2)
    elif L is Label.PV:
        g = -(p * q / (p * q + params["theta0"]))
    else:
        t0, t1 = params["theta0"], params["theta1"]
        z0, z1, _ = pvi_z(params, p, q, t)
        g = -(t * t * z0 * (z0 + t0) / q) + (t - 1) ** 2 * z1 * (z1 + t1) / (q - 1)
    return Mat2([[g, z], [z, one]])


def gamma_parity_check(lax, gamma=None):
    """Gamma^-1 D^T Gamma = D(hbar -> -hbar), exactly as series of rational functions.

    Returns (ok, witness).  ``gamma`` overrides the listed matrix (negative controls).
    """
    sol = lax.sol
    G = gamma if gamma is not None else gamma_matrix(lax.label, sol.params, sol.p, sol.q, sol.D.t)
    lhs = G.inverse() * lax.D.transpose() * G
    rhs = lax.D.map(lambda s: s.flip())
    diff = lhs - rhs
    for (i, j), s in zip(itertools.product(range(2), range(2)), diff.entries()):
        fn = s.first_nonzero()
        if fn is not None:
            return False, {"entry": [i, j], "order": fn[0], "value": str(fn[1])[:400]}
    return True, None


def conjugation_consistency(lax):
    """The dagger map used for Gamma agrees with hbar -> -hbar on (p, q)."""
    sol = lax.sol
    pd, qd = parity_conjugate_pq(sol.label, sol.params, sol.p, sol.q, sol.D.t)
    return (pd - sol.p.flip()).is_zero() and (qd - sol.q.flip()).is_zero()


# ---------------------------------------------------------------------------
# topological-type conditions


def shifted_bergman(curve):
    """dz1 dz2/(z1-z2)^2 - dx1 dx2/(x1-x2)^2, as the coefficient of dz1 dz2."""
    d = curve.desc.with_variables(["z1", "z2"])
    z1, z2 = d.gen("z1"), d.gen("z2")
    x1, x2 = _x_in(curve, "z1"), _x_in(curve, "z2")
    return 1 / (z1 - z2) ** 2 - x1.derivative("z1") * x2.derivative("z2") / (x1 - x2) ** 2


def tt_report(tower, nmax=3, order=4, ns=None):
    """Parity, pole structure and leading order of W_n for n <= nmax through hbar^order."""
    curve = tower.curve
    allowed = _rational_points(curve)
    checks = []
    for n in ns or range(1, nmax + 1):
        W = correlators(tower, n, order)
        expected = ODD if n % 2 else EVEN
        # parity: the coefficients of the wrong parity vanish
        bad = [k for k, c in W.items() if (k - n) % 2 and not c.is_zero()]
        checks.append({"n": n, "condition": "parity", "ok": not bad,
                       "witness": None if not bad else {"order": bad[0]}, "expected": expected})
        # leading order hbar^(n-2)
        low = [k for k, c in W.items() if k < n - 2 and not c.is_zero()]
        checks.append({"n": n, "condition": "leading order", "ok": not low,
                       "witness": None if not low else {"order": low[0]}})
        # pole structure, on the dz-forms
        pole_bad = None
        for k, _ in W.items():
            if (n == 1 and k == -1) or (n == 2 and k == 0):
                continue
            form = W.form(k)
            if form.is_zero():
                continue
            ok, w = pole_report(form, list(W.variables), allowed, at_infinity=-2)
            if not ok:
                pole_bad = {"order": k, **w}
                break
        checks.append({"n": n, "condition": "pole structure", "ok": pole_bad is None, "witness": pole_bad})
        if n == 2:
            # the double pole of w2^(0) sits at x1 = x2 only (z1 = zbar2), as the
            # shifted Bergman kernel
            ok = (W.form(0) - shifted_bergman(curve)).is_zero()
            checks.append({"n": 2, "condition": "w2^(0) = B - dx1 dx2/(x1-x2)^2", "ok": ok, "witness": None})
    return checks


def inject_fault(tower, k=1, entry=(0, 1), point=flint.fmpq(3, 7)):
    """A copy of the tower with 1/(z - point) added to one entry of M^(k) (negative control)."""
    z = tower.curve.z()
    M = list(tower.M)
    rows = [list(r) for r in M[k].rows]
    i, j = entry
    rows[i][j] = rows[i][j] + 1 / (z - point)
    M[k] = Mat2(rows)
    return ProjectorTower(tower.lax, tower.curve, tower.method + "+fault", M, tower.S)

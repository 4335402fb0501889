"""Eynard-Orantin topological recursion on a parametrized genus-0 curve.

Correlators omega_n^(g) with 2g - 2 + n > 0 are stored in the basis

    prod_i dz_i / (z_i - r_i)^k_i,   r_i a branch point, k_i >= 2,

which is closed under the recursion.  A residue at a branch point r is taken
in the local coordinate u = z - r: every term of the recursion bracket is
expanded in u, multiplied by the local kernel data and paired with the
geometric expansion of 1/(z0 - z) and 1/(z0 - sigma(z)), so each residue
lands directly on the coefficients of dz0 / (z0 - r)^(m+1).

All local expansions of basis differentials (at z and at sigma(z)) have
rational coefficients, since the branch points are 0 or +-1; only the kernel
depends on the curve.
"""

from __future__ import annotations

import fcntl
import itertools
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import flint

from .algebra.field import QQ, FieldElement, decode_element, encode_element
from .algebra.laurent import laurent_expand
from .algebra.numeric import LogExpression
from .curves import Label, SpectralCurve

# ---------------------------------------------------------------------------
# dense truncated series: (lo, [c_lo, c_lo+1, ...]) known below exponent prec


@dataclass
class Series:
    lo: int
    c: list
    prec: int

    def __getitem__(self, k):
        if k >= self.prec:
            raise ArithmeticError(f"series coefficient u^{k} beyond truncation u^{self.prec}")
        i = k - self.lo
        if i < 0 or i >= len(self.c):
            return 0
        return self.c[i]

    def valuation(self):
        for i, x in enumerate(self.c):
            if not _zero(x):
                return self.lo + i
        return self.prec


def _zero(x):
    return x == 0 if not isinstance(x, FieldElement) else x.is_zero()


def s_mul(a, b, prec):
    """Product truncated below u^prec.  Needs a.prec - b.lo >= prec etc."""
    lo = a.lo + b.lo
    if prec > min(a.prec + b.lo, b.prec + a.lo):
        raise ArithmeticError("insufficient truncation in series product")
    out = [0] * max(prec - lo, 0)
    for i, x in enumerate(a.c):
        if _zero(x):
            continue
        for j, y in enumerate(b.c):
            k = i + j
            if k >= len(out):
                break
            if _zero(y):
                continue
            out[k] = out[k] + x * y
    return Series(lo, out, prec)


def s_axpy(acc, c, s):
    """acc += c * s (in place on acc, a dict exponent -> value)."""
    for i, x in enumerate(s.c):
        if _zero(x):
            continue
        k = s.lo + i
        v = x * c if not isinstance(x, flint.fmpq) else c * x
        acc[k] = acc[k] + v if k in acc else v


def _series_from_laurent(ls, prec):
    c = [ls[k] for k in range(ls.lo, prec)] if not ls.is_zero() else []
    return Series(ls.lo if not ls.is_zero() else prec, c, prec)


def _qq_series(f, point, prec):
    """Expansion of a rational function over Q with fmpq coefficients."""
    ls = laurent_expand(f, point, prec, "z")
    s = _series_from_laurent(ls, prec)
    s.c = [x.to_fmpq() for x in s.c]
    return s


# ---------------------------------------------------------------------------
# multidifferentials


@dataclass
class MultiDifferential:
    """omega_n^(g) as {((r, k), ...): coefficient} with canonically sorted keys.

    ``r`` indexes the curve's branch points.  :meth:`full` expands to all slot
    orderings.
    """

    g: int
    n: int
    coeffs: dict
    _full: dict = field(default=None, repr=False)

    @classmethod
    def from_full(cls, g, n, full, check_symmetry=False):
        canon = {}
        for key, c in full.items():
            sk = tuple(sorted(key))
            if sk in canon:
                if check_symmetry and canon[sk] != c:
                    raise ArithmeticError(f"omega_{n}^({g}) not symmetric at {key}")
            else:
                canon[sk] = c
        if check_symmetry:
            for sk in canon:
                for perm in set(itertools.permutations(sk)):
                    if full.get(perm, None) is None or full[perm] != canon[sk]:
                        raise ArithmeticError(f"omega_{n}^({g}) not symmetric at {perm}")
        obj = cls(g, n, canon)
        obj._full = dict(full)
        return obj

    def full(self):
        if self._full is None:
            out = {}
            for sk, c in self.coeffs.items():
                for perm in set(itertools.permutations(sk)):
                    out[perm] = c
            self._full = out
        return self._full

    def max_pole_order(self):
        return max((k for key in self.coeffs for _, k in key), default=0)

    def as_rational(self, curve, variables=None):
        """The coefficient of dz_1...dz_n as a rational function of z_1..z_n."""
        names = variables or (["z"] if self.n == 1 else [f"z{i + 1}" for i in range(self.n)])
        desc = curve.desc.with_variables(names)
        gens = [desc.gen(v) for v in names]
        R = [desc.element(r) for r in curve.branch_points]
        total = desc.zero()
        # group by the last slot to share partial products
        for key, c in self.full().items():
            term = desc.element(c)
            for v, (ri, k) in zip(gens, key):
                term = term / (v - R[ri]) ** k
            total = total + term
        return total

    def to_json(self, curve=None):
        return {
            "g": self.g,
            "n": self.n,
            "terms": [[[[int(r), int(k)] for r, k in key], str(c)] for key, c in sorted(self.coeffs.items())],
        }

    def to_data(self, desc):
        """Exact encoding (coefficients as numerator/denominator term lists)."""
        return {
            "g": self.g,
            "n": self.n,
            "terms": [[[[int(r), int(k)] for r, k in key], encode_element(desc.element(c))]
                      for key, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_data(cls, data, desc):
        coeffs = {tuple((r, k) for r, k in key): decode_element(desc, c) for key, c in data["terms"]}
        return cls(data["g"], data["n"], coeffs)


# ---------------------------------------------------------------------------
# the engine


class TopologicalRecursion:
    """Memoized (g, n) table of correlators for one curve."""

    def __init__(self, curve: SpectralCurve, kernel_factor=flint.fmpq(1, 2), cache=None):
        self.curve = curve
        self.store = cache
        self.desc = curve.desc
        self.R = [curve.desc.element(r) for r in curve.branch_points]
        self.Rq = [r.to_fmpq() for r in self.R]
        self.kernel_factor = flint.fmpq(kernel_factor) if not isinstance(kernel_factor, flint.fmpq) else kernel_factor
        self.table = {}
        self._qz = QQ.with_variables(["z"])
        self._cache = {}
        zq = self._qz.gen("z")
        self._zq = zq
        self._sigma_q = -zq if curve.involution == "neg" else 1 / zq
        self._dsigma_q = self._sigma_q.derivative("z")

    # local data ----------------------------------------------------------------

    # kernel K(z0, z) = kernel_factor * int_z^{sigma z} omega_2^(0)(z0, .) / ((y(z) - y(sigma z)) dx(z))

    @staticmethod
    def pole_bound(g, n):
        return 6 * g - 4 + 2 * n

    def _basis_at(self, ri, label, prec, sigma):
        """Local series of dz/(z - r')^k at z (or of its pullback by sigma) near R[ri]."""
        key = ("basis", ri, label, prec, sigma)
        if key not in self._cache:
            rj, k = label
            z = self._zq
            if sigma:
                f = self._dsigma_q / (self._sigma_q - self.Rq[rj]) ** k
            else:
                f = 1 / (z - self.Rq[rj]) ** k
            self._cache[key] = _qq_series(f, self.Rq[ri], prec)
        return self._cache[key]

    def _eta_powers(self, ri, mmax, prec):
        """(sigma(z) - r)^m and d sigma/dz * (sigma(z) - r)^m as series near r."""
        key = ("eta", ri, mmax, prec)
        if key not in self._cache:
            r = self.Rq[ri]
            eta = _qq_series(self._sigma_q - r, r, prec)
            zeta = Series(1, [flint.fmpq(1)], prec)
            ds = _qq_series(self._dsigma_q, r, prec)
            one = Series(0, [flint.fmpq(1)], prec)
            ep, zp = [one], [one]
            for _ in range(mmax):
                ep.append(s_mul(ep[-1], eta, prec))
                zp.append(s_mul(zp[-1], zeta, prec))
            dsep = [s_mul(ds, e, prec) for e in ep]
            self._cache[key] = (ep, zp, dsep)
        return self._cache[key]

    def _omega02_diag(self, ri, prec):
        """dz d(sigma z)/(z - sigma z)^2 as a series near R[ri]."""
        key = ("w02diag", ri, prec)
        if key not in self._cache:
            z = self._zq
            f = self._dsigma_q / (z - self._sigma_q) ** 2
            self._cache[key] = _qq_series(f, self.Rq[ri], prec)
        return self._cache[key]

    def kernel_series(self, ri, prec):
        """Laurent data of 1/((y(z) - y(sigma z)) x'(z)) at R[ri], below u^prec."""
        key = ("kappa", ri)
        have = self._cache.get(key)
        if have is None or have.prec < prec:
            c = self.curve
            kappa = 1 / ((c.y - c.pullback(c.y)) * c.dx())
            ls = laurent_expand(kappa, self.R[ri], prec, "z")
            have = _series_from_laurent(ls, prec)
            self._cache[key] = have
        s = have
        return Series(s.lo, s.c[: max(prec - s.lo, 0)], prec)

    def ydx_series(self, ri, prec):
        key = ("ydx", ri)
        have = self._cache.get(key)
        if have is None or have.prec < prec:
            c = self.curve
            ls = laurent_expand(c.y * c.dx(), self.R[ri], prec, "z")
            have = _series_from_laurent(ls, prec)
            self._cache[key] = have
        return have

    # evaluation maps -------------------------------------------------------------

    def _eval_map(self, g, n, ri, prec, sigma):
        """omega_n^(g)(z or sigma z, rest) near R[ri] as {rest-key: Series}.

        Handles omega_2^(0)(., z_i) specially: its expansion in the working
        variable produces basis labels (ri, m+2) in the other slot.
        """
        if (g, n) == (0, 2):
            ep, zp, dsep = self._eta_powers(ri, prec + 1, prec)
            out = {}
            for m in range(0, prec):
                s = dsep[m] if sigma else zp[m]
                out[((ri, m + 2),)] = Series(s.lo, [x * (m + 1) for x in s.c], prec)
            return out
        w = self.get(g, n)
        acc = {}
        for key, c in w.full().items():
            first, rest = key[0], key[1:]
            s = self._basis_at(ri, first, prec, sigma)
            d = acc.setdefault(rest, {})
            s_axpy(d, c, s)
        out = {}
        for rest, d in acc.items():
            lo = min(d) if d else prec
            out[rest] = Series(lo, [d.get(k, 0) for k in range(lo, prec)], prec)
        return out

    def _eval_pair(self, g, n, ri, prec):
        """omega_n^(g)(z, sigma z, rest) near R[ri] as {rest-key: Series}."""
        if (g, n) == (0, 2):
            return {(): self._omega02_diag(ri, prec)}
        w = self.get(g, n)
        bound = self.pole_bound(g, n)
        # sum over the second slot first
        inner = {}
        for key, c in w.full().items():
            l1, l2, rest = key[0], key[1], key[2:]
            s = self._basis_at(ri, l2, prec + bound, True)
            d = inner.setdefault((l1, rest), {})
            s_axpy(d, c, s)
        out = {}
        for (l1, rest), d in inner.items():
            lo = min(d) if d else prec + bound
            T = Series(lo, [d.get(k, 0) for k in range(lo, prec + bound)], prec + bound)
            E = self._basis_at(ri, l1, prec + bound, False)
            prod = s_mul(E, T, prec)
            o = out.setdefault(rest, {})
            s_axpy(o, flint.fmpq(1), prod)
        res = {}
        for rest, d in out.items():
            lo = min(d) if d else prec
            res[rest] = Series(lo, [d.get(k, 0) for k in range(lo, prec)], prec)
        return res

    # recursion ---------------------------------------------------------------

    def get(self, g, n):
        if (g, n) in ((0, 1), (0, 2)):
            raise ValueError("omega_1^(0) and omega_2^(0) are not stored in basis form")
        if (g, n) not in self.table:
            hit = self.store.load(self.curve, g, n) if self.store is not None else None
            if hit is None:
                hit = self.recursion_step(g, n)
                if self.store is not None:
                    self.store.save(self.curve, hit)
            self.table[(g, n)] = hit
        return self.table[(g, n)]

    def recursion_step(self, g, n):
        """omega_n^(g) from the lower table (computed on demand)."""
        if 2 * g - 2 + n <= 0:
            raise ValueError("stable range only")
        J = n - 1
        bound = self.pole_bound(g, n)
        full = {}
        for ri in range(len(self.R)):
            B = self._bracket(g, J, ri, bound)
            if not B:
                continue
            lo_B = min(s.lo for s in B.values())
            mmax = 1 - lo_B
            if mmax + 1 > bound:
                # contributions can only reach the bound; recompute deeper if not
                pass
            kap = self.kernel_series(ri, -lo_B)
            ep, zp, _ = self._eta_powers(ri, mmax, -lo_B + 2)
            N = []
            for m in range(1, mmax + 1):
                diff = Series(0, [ep[m][k] - zp[m][k] for k in range(0, -lo_B + 2)], -lo_B + 2)
                N.append(s_mul(diff, kap, -lo_B))
            for lJ, S in B.items():
                for m in range(1, mmax + 1):
                    Nm = N[m - 1]
                    acc = None
                    for j in range(S.lo, 1):
                        bj = S[j]
                        if _zero(bj):
                            continue
                        nm = Nm[-1 - j]
                        if _zero(nm):
                            continue
                        t = bj * nm
                        acc = t if acc is None else acc + t
                    if acc is not None and not acc.is_zero():
                        if self.kernel_factor != 1:
                            acc = acc * self.kernel_factor
                        full[((ri, m + 1),) + lJ] = acc
        w = MultiDifferential.from_full(g, n, full)
        if w.max_pole_order() > bound:
            raise ArithmeticError(f"omega_{n}^({g}) exceeds the pole bound {bound}")
        return w

    def _bracket(self, g, J, ri, bound):
        """{lJ: Series in u} for the recursion bracket, known through u^0."""
        prec = 1
        pieces = {}

        def add(key, s):
            d = pieces.setdefault(key, {})
            s_axpy(d, flint.fmpq(1), s)

        if g >= 1:
            for rest, s in self._eval_pair(g - 1, J + 2, ri, prec).items():
                add(rest, s)
        positions = list(range(J))
        for g1 in range(g + 1):
            g2 = g - g1
            for size in range(J + 1):
                for I in itertools.combinations(positions, size):
                    if (g1, size) == (0, 0) or (g2, J - size) == (0, 0):
                        continue
                    K = [p for p in positions if p not in I]
                    b1 = 0 if (g1, size + 1) == (0, 2) else self.pole_bound(g1, size + 1)
                    b2 = 0 if (g2, J - size + 1) == (0, 2) else self.pole_bound(g2, J - size + 1)
                    A = self._eval_map(g1, size + 1, ri, prec + b2, False)
                    Bm = self._eval_map(g2, J - size + 1, ri, prec + b1, True)
                    for kI, sA in A.items():
                        for kK, sB in Bm.items():
                            key = [None] * J
                            for p, l in zip(I, kI):
                                key[p] = l
                            for p, l in zip(K, kK):
                                key[p] = l
                            add(tuple(key), s_mul(sA, sB, prec))
        out = {}
        for key, d in pieces.items():
            d = {k: v for k, v in d.items() if not _zero(v)}
            if not d:
                continue
            lo = min(d)
            out[key] = Series(lo, [d.get(k, 0) for k in range(lo, prec)], prec)
        return out

    # invariants ----------------------------------------------------------------

    def F(self, g):
        """Symplectic invariant F^(g), g >= 2."""
        if g < 2:
            raise ValueError("use f0_closed_form / f1_closed_form for g < 2")
        w = self.get(g, 1)
        total = self.desc.zero()
        kmax = w.max_pole_order()
        for ri in range(len(self.R)):
            ydx = self.ydx_series(ri, kmax)
            for (key, c) in w.coeffs.items():
                (rj, k), = key
                if rj != ri:
                    continue
                # Res u^-k * Phi(u) du = coefficient of u^(k-1) in Phi = [ydx]_{k-2}/(k-1)
                phi = ydx[k - 2] / (k - 1) if not _zero(ydx[k - 2]) else None
                if phi is not None:
                    total = total + c * phi
        return total / (2 - 2 * g)

    def omega01(self):
        c = self.curve
        return c.y * c.dx()


def omega01(curve):
    return curve.y * curve.dx()


def omega02(desc=QQ, v1="z1", v2="z2"):
    """The coefficient 1/(z1 - z2)^2 of the genus-0 Bergman kernel."""
    d = desc.with_variables([v1, v2])
    return 1 / (d.gen(v1) - d.gen(v2)) ** 2


def omega02_integral(desc=QQ, z0="z0", z="z", involution="neg"):
    """int_z^{sigma z} omega_2^(0)(., z0) = 1/(z0 - sigma z) - 1/(z0 - z) as a function.

    ``involution`` is "neg" (z -> -z) or "inv" (z -> 1/z).
    """
    d = desc.with_variables([z0, z])
    Z0, Z = d.gen(z0), d.gen(z)
    zb = -Z if involution == "neg" else 1 / Z
    return 1 / (Z0 - zb) - 1 / (Z0 - Z)


# ---------------------------------------------------------------------------
# on-disk cache


CACHE_VERSION = 1


def table_bytes(curve, omega):
    """Canonical file content for one (g, n) entry."""
    doc = {"version": CACHE_VERSION, "curve": curve.descriptor_hash(), **omega.to_data(curve.desc)}
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


class TableCache:
    """Content-addressed store of omega_n^(g) tables.

    Files live at ``<root>/v<version>/<curve hash>/omega_<g>_<n>.json``; a
    version bump simply starts a fresh subtree.  Writes go through a temporary
    file and an atomic rename under an advisory lock, so concurrent writers of
    identical content are harmless.
    """

    def __init__(self, root):
        self.root = Path(root)

    def path(self, curve, g, n):
        return self.root / f"v{CACHE_VERSION}" / curve.descriptor_hash() / f"omega_{g}_{n}.json"

    def load(self, curve, g, n):
        p = self.path(curve, g, n)
        if not p.exists():
            return None
        doc = json.loads(p.read_bytes())
        if doc.get("version") != CACHE_VERSION or doc.get("curve") != curve.descriptor_hash():
            return None
        return MultiDifferential.from_data(doc, curve.desc)

    def save(self, curve, omega):
        p = self.path(curve, omega.g, omega.n)
        p.parent.mkdir(parents=True, exist_ok=True)
        data = table_bytes(curve, omega)
        with open(p.parent / ".lock", "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, p)
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)
        return p


def compute_F(curve, g, engine=None):
    engine = engine or TopologicalRecursion(curve)
    return engine.F(g)


def recursion_step(curve, g, n, engine=None):
    engine = engine or TopologicalRecursion(curve)
    return engine.get(g, n)


# ---------------------------------------------------------------------------
# closed forms for g = 0, 1


def f1_closed_form(curve):
    """F^(1) = (1/24) log(argument)."""
    c = curve
    if c.label is Label.PI:
        arg = c.y.derivative("z").substitute("z", c.desc.zero())
    else:
        g = c.C
        ga = g.substitute("x", c.a)
        gb = g.substitute("x", c.b)
        arg = -((c.b - c.a) ** 4) * ga * gb
    return LogExpression(c.desc.zero(), [(c.desc.element(flint.fmpq(1, 24)), arg)])


def f1_quoted(curve):
    """The printed F^(1) argument for PI, PII and PIV (used by the golden suite)."""
    c = curve
    q0, t = c.base.q0, c.base.t
    if c.label is Label.PI:
        arg = -(q0 * 6)
    elif c.label is Label.PII:
        th = c.params["theta"]
        arg = -(th * th * 16) * (th / q0 ** 3 + 4)
    elif c.label is Label.PIV:
        t0 = c.params["theta0"]
        arg = (-(((t0 - q0 * q0 - t * q0) ** 2) * (t0 + q0 * q0 + t * q0) ** 2 * 16)
               * (q0 ** 4 * 3 + q0 ** 3 * t * 2 + t0 * t0) / (t0 * t0 * q0 ** 4))
    elif c.label is Label.PIII:
        t0, ti = c.params["theta0"], c.params["thetainf"]
        arg = ((ti * ti - t0 * t0) ** 2 * 4 * (t0 * q0 ** 6 - ti * 3 * q0 ** 4 + t0 * 3 * q0 ** 2 - ti)
               / (ti - t0 * q0 * q0) ** 3)
    else:
        raise ValueError(f"no quoted F^(1) for {c.label.value}")
    return LogExpression(c.desc.zero(), [(c.desc.element(flint.fmpq(1, 24)), arg)])


def f0_closed_form(curve, **kw):
    """F^(0) as rational part plus logs, for PI-PIV."""
    c = curve
    q0, t = c.base.q0, c.base.t
    one = c.desc.one()
    if c.label is Label.PI:
        return LogExpression(q0 ** 5 * flint.fmpq(48, 5), [])
    if c.label is Label.PII:
        th = c.params["theta"]
        rat = th * q0 ** 3 * flint.fmpq(4, 3) - th * th / 4 + th ** 3 / (q0 ** 3 * 24)
        return LogExpression(rat, [(-(th * th) / 2 * one, -th / (q0 * 4))])
    if c.label is Label.PIII:
        return _f0_piii(c, **kw)
    if c.label is Label.PIV:
        return _f0_piv(c, **kw)
    raise ValueError(f"no closed F^(0) for {c.label.value}")


def _f0_piii(c, printed=False):
    q0 = c.base.q0
    t0, ti = c.params["theta0"], c.params["thetainf"]
    q2, q4 = q0 * q0, q0 ** 4
    rat = ((t0 * t0 * 3 - ti * ti * 3 - t0 * ti * q2 * 2 + (ti * ti * 5 - t0 * t0) * q4 - t0 * ti * q0 ** 6 * 2)
           / (q4 - 1) ** 2)
    if not printed:
        # the printed rational part is 4x too large; only this one differentiates to -dtau0/dt
        rat = rat / 4
    w = q2 * t0 - ti
    logs = [
        (t0 * ti / 4, (q2 + 1) / (q2 - 1)),
        (t0 * t0 / 8, q2 * w * w / (q4 - 1)),
        (ti * ti / 8, w * w / (q2 * (q4 - 1))),
    ]
    return LogExpression(rat, logs)


def piv_root(c, branch=1):
    """sqrt(q0^4 + 2 thetainf q0^2 + theta0^2), which is q0 (t + 2 q0) on the leading-order locus."""
    q0, t = c.base.q0, c.base.t
    return q0 * (t + q0 * 2) * branch


def _f0_piv(c, branch=1, printed=False):
    q0 = c.base.q0
    t0, ti = c.params["theta0"], c.params["thetainf"]
    S = piv_root(c, branch)
    q2 = q0 * q0
    rat = ((q0 ** 4 * 3 - (t0 * 8 + ti) * q2 + t0 * t0 * 2) * S / (q2 * 2)
           - q0 ** 4 * flint.fmpq(3, 2) + t0 * q2 * 5 + t0 ** 3 / q2)
    # printed: q0^2 + thetainf^2 + S, which is not homogeneous; q0^2 + thetainf + S is
    first = q2 + ti * ti + S if printed else q2 + ti + S
    logs = [
        ((t0 * t0 + ti * ti) / 2, first),
        (-(t0 * (t0 - ti) * 2), q0),
        (-(t0 * ti), t0 * t0 * 2 + ti * q2 * 2 + t0 * S * 2),
    ]
    return LogExpression(rat, logs)

"""Second, independent transcription of the printed closed forms (sympy), checked
against the exact-arithmetic transcription used by the verification suites."""

import flint
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from painleve_tr import verify as vf

q0, th, T0, Ti, t = sp.symbols("q0 theta theta0 thetainf t")

Q30 = sp.sympify("""thetainf**3*(10*thetainf**2*theta0**2+7*thetainf**4-theta0**4)+(-15*thetainf**2*theta0*(10*thetainf**2*theta0**2+7*thetainf**4-theta0**4))*q0**2+15*thetainf*(-8*theta0**6+46*thetainf**4*theta0**2+9*thetainf**6+65*thetainf**2*theta0**4)*q0**4
+(-5*thetainf**2*theta0*(205*thetainf**4+341*theta0**4+910*thetainf**2*theta0**2))*q0**6+(-15*thetainf*(-195*theta0**6-652*thetainf**2*theta0**4-631*thetainf**4*theta0**2+22*thetainf**6))*q0**8
+(-3*theta0*(5212*thetainf**2*theta0**4+8837*thetainf**4*theta0**2+1494*thetainf**6+473*theta0**6))*q0**10+5*thetainf*(534*thetainf**6+3893*thetainf**4*theta0**2+9884*thetainf**2*theta0**4+1705*theta0**6)*q0**12
+(-15*theta0*(13*theta0**6+3465*thetainf**4*theta0**2+2604*thetainf**2*theta0**4+782*thetainf**6))*q0**14+15*thetainf*(3465*thetainf**2*theta0**4+782*theta0**6+13*thetainf**6+2604*thetainf**4*theta0**2)*q0**16
+(-5*theta0*(1705*thetainf**6+534*theta0**6+3893*thetainf**2*theta0**4+9884*thetainf**4*theta0**2))*q0**18+3*thetainf*(1494*theta0**6+473*thetainf**6+5212*thetainf**4*theta0**2+8837*thetainf**2*theta0**4)*q0**20
+(-15*theta0*(631*thetainf**2*theta0**4+652*thetainf**4*theta0**2-22*theta0**6+195*thetainf**6))*q0**22+5*thetainf*theta0**2*(205*theta0**4+910*thetainf**2*theta0**2+341*thetainf**4)*q0**24
+15*theta0*(8*thetainf**6-65*thetainf**4*theta0**2-9*theta0**6-46*thetainf**2*theta0**4)*q0**26+(-15*thetainf*theta0**2*(-10*thetainf**2*theta0**2+thetainf**4-7*theta0**4))*q0**28
+theta0**3*(-10*thetainf**2*theta0**2+thetainf**4-7*theta0**4)*q0**30""".replace("\n", ""))
Q9 = sp.sympify("""243*q0**24-603*q0**20*theta0**2+353*q0**4*theta0**10-16*theta0**12-3474*q0**16*theta0**4+1962*q0**12*theta0**6-2561*q0**8*theta0**8
+q0**3*(1782*q0**20-1593*q0**16*theta0**2+8406*q0**8*theta0**6-4762*q0**4*theta0**8+91*theta0**10-16212*q0**12*theta0**4)*t
+2*q0**6*(6690*q0**4*theta0**6+582*q0**12*theta0**2-1525*theta0**8+2889*q0**16-16188*q0**8*theta0**4)*t**2
-q0**5*(589*theta0**8-9569*q0**12*theta0**2-10872*q0**16-10299*q0**4*theta0**6+35655*q0**8*theta0**4)*t**3
+3*q0**8*(1289*theta0**6+5303*q0**8*theta0**2+4361*q0**12-7785*q0**4*theta0**4)*t**4
+q0**7*(10442*q0**12-9120*q0**4*theta0**4+545*theta0**6+13365*q0**8*theta0**2)*t**5
+4*q0**10*(1382*q0**8+1573*q0**4*theta0**2-491*theta0**4)*t**6-q0**9*(175*theta0**4-1591*q0**4*theta0**2-1872*q0**8)*t**7
+2*q0**12*(184*q0**4+85*theta0**2)*t**8+32*q0**15*t**9""".replace("\n", ""))
F2_II = sp.Rational(1, 480) * (2048 * q0**12 + 2560 * th * q0**9 + 1280 * th**2 * q0**6 + 1020 * th**3 * q0**3
                               - 45 * th**4) * q0**3 / (th**2 * (4 * q0**3 + th) ** 5)
F3_II = -q0**6 / (4032 * th**4 * (th + 4 * q0**3) ** 10) * (
    4194304 * q0**24 + 10485760 * th * q0**21 + 11796480 * th**2 * q0**18 + 7864320 * th**3 * q0**15
    + 3440640 * th**4 * q0**12 - 5694528 * th**5 * q0**9 + 5232752 * th**6 * q0**6 - 510412 * th**7 * q0**3
    + 3969 * th**8)
F2_III_printed = Q30 / (240 * (T0**2 - Ti**2) * (-T0 * q0**6 + 3 * Ti * q0**4 - 3 * T0 * q0**2 + Ti) ** 5)
F2_IV = -q0**4 * Q9 / (960 * T0**2 * (3 * q0**4 + 2 * t * q0**3 + T0**2) ** 5 * ((t * q0 + q0**2) ** 2 - T0**2) ** 2)

rat = st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(lambda f: f != 0)


def fq(f):
    return flint.fmpq(f.numerator, f.denominator)


def same(ours, theirs):
    return sp.Rational(int(ours.p), int(ours.q)) == theirs


@given(rat, rat)
def test_pii_forms(a, b):
    sub = {q0: sp.Rational(a), th: sp.Rational(b)}
    if 4 * a**3 + b == 0:
        return
    assert same(vf.quoted_F2_PII(fq(a), fq(b)), F2_II.subs(sub))
    assert same(vf.quoted_F3_PII(fq(a), fq(b)), F3_II.subs(sub))


@given(rat, rat, rat)
def test_q30_and_piii_form(a, b, c):
    sub = {q0: sp.Rational(a), T0: sp.Rational(b), Ti: sp.Rational(c)}
    assert same(vf.q30(fq(a), fq(b), fq(c)), Q30.subs(sub))
    w = -b * a**6 + 3 * c * a**4 - 3 * b * a**2 + c
    if b * b != c * c and w != 0:
        assert same(vf.quoted_F2_PIII(fq(a), fq(b), fq(c), printed=True), F2_III_printed.subs(sub))
        assert same(vf.quoted_F2_PIII(fq(a), fq(b), fq(c)), F2_III_printed.subs(sub) / (b * b - c * c))


@given(rat, rat, rat)
def test_q9_and_piv_form(a, b, c):
    sub = {q0: sp.Rational(a), t: sp.Rational(b), T0: sp.Rational(c)}
    assert same(vf.q9(fq(b), fq(a), fq(c)), Q9.subs(sub))
    if (3 * a**4 + 2 * b * a**3 + c * c) != 0 and (b * a + a * a) ** 2 != c * c:
        assert same(vf.quoted_F2_PIV(fq(a), fq(b), fq(c)), F2_IV.subs(sub))

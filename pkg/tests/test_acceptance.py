"""Acceptance criteria 1-10.

Each test records one line in the "acceptance criteria" section of the pytest
terminal summary.  Criteria 7 and 9 contain statements that do not hold as
written; their literal forms are strict xfails, and the corrected relations
(documented in the decisions ledger) are asserted instead.
"""

import pytest

import test_algebra
import test_toprec
from conftest import ACCEPTANCE
from painleve_tr import verify as vf
from painleve_tr.curves import Label, pinned_bases


def record(k, ok, note):
    ACCEPTANCE[k] = ("PASS" if ok else "FAIL", note)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {note}")


def _status(report, names):
    by_name = {c.name: c for c in report.checks}
    missing = [n for n in names if n not in by_name]
    assert not missing, missing
    return {n: by_name[n].status for n in names}


@pytest.fixture(scope="session")
def golden():
    return vf.golden_suite()


@pytest.fixture(scope="session")
def lax_reports():
    return [vf.lax_suite(L, kw) for L in Label for kw in pinned_bases(L)]


@pytest.fixture(scope="session")
def cross_reports():
    return [vf.check_cross_pipeline(L, pinned_bases(L, symbolic=True)[0], order=3) for L in ("PI", "PII")]


def _rows(reports, prefix):
    return [(r.label, r.base, c) for r in reports for c in r.checks if c.name.startswith(prefix)]


def test_criterion_1_pi_golden(golden):
    names = ["F_I^(0) = 48 q0^5/5", "-dF_I^(0)/dt = dtau_I^(0)/dt = 4 q0^3", "F_I^(1) = log(-6 q0)/24",
             "F_I^(2) = -7/(207360 q0^5)", "F_I^(3) and the value labelled F^(6)"]
    st = _status(golden, names)
    ok = all(s == "pass" for s in st.values())
    f6 = next(c for c in golden.checks if c.name == names[-1]).detail["resolution"]
    record(1, ok, f"PI golden invariants exact; F^(6) label: {f6.split(';')[0]}")
    assert ok, st


def test_criterion_2_pii(golden):
    names = ["F_II^(2) at theta = 1", "F_II^(3) at theta = 1", "PII theta=1: dq0/dt"]
    names += [f"PII theta=1: dtau^({g})/dt = -dF^({g})/dt" for g in range(4)]
    st = _status(golden, names)
    ok = all(s == "pass" for s in st.values())
    record(2, ok, "PII F^(2), F^(3) identical at theta = 1; dtau^(g)/dt = -dF^(g)/dt for g <= 3")
    assert ok, st


def test_criterion_3_piii_piv(golden):
    names = [c.name for c in golden.checks if c.name.startswith(("F_III^(2) at", "F_IV^(2) at"))]
    assert len(names) == 4
    names += ["PIII symbolic: dq0/dt"] + [f"PIII symbolic: dtau^({g})/dt = -dF^({g})/dt" for g in range(3)]
    st = _status(golden, names)
    ok = all(s == "pass" for s in st.values())
    record(3, ok, "PIII/PIV F^(2) at two bases each; PIII derivative identity g <= 2 "
                  "(PIII prefactor carries (theta0^2 - thetainf^2)^2, see ledger)")
    assert ok, st


def test_criterion_4_spectral_curve(lax_reports):
    rows = _rows(lax_reports, "-det D^(0) = E(x)")
    ok = len(rows) == sum(len(pinned_bases(L)) for L in Label) and all(c.status == "pass" for *_, c in rows)
    record(4, ok, f"-det D^(0) = E_J and E_J(x(z)) = y^2 at {len(rows)} pinned bases, six labels")
    assert ok


def test_criterion_5_sigma_ode(lax_reports):
    rows = _rows(lax_reports, "sigma-ODE residual")
    ok = all(c.status == "pass" for *_, c in rows)
    sym = sum(c.name.endswith("hbar^8") for *_, c in rows)
    record(5, ok, f"sigma-ODE residuals vanish ({sym} symbolic bases through hbar^8, "
                  f"{len(rows) - sym} numeric through hbar^6)")
    assert ok and sym >= 4


def test_criterion_6_zero_curvature(lax_reports):
    rows = _rows(lax_reports, "zero curvature through hbar^4")
    ok = bool(rows) and all(c.status == "pass" for *_, c in rows)
    record(6, ok, f"zero curvature through hbar^4 at {len(rows)} bases, six labels")
    assert ok


def test_criterion_7_cross_pipeline(cross_reports):
    checks = [c for r in cross_reports for c in r.checks]
    literal = all(c.status == "pass" for c in checks)
    corrected = all(c.status in ("pass", "conflict") for c in checks)
    record(7, literal, "W_n vs omega_n^(g), PI/PII: as stated FAIL; corrected relations "
                       f"(W_n^(g) dx = (-1)^n omega_n^(g), W_2^(0) = B - dx1 dx2/(x1-x2)^2) "
                       f"{'PASS' if corrected else 'FAIL'} (see ledger)")
    assert corrected


@pytest.mark.xfail(strict=True, reason="sign (-1)^n and the x1 = x2 subtraction in W_2^(0); see ledger")
def test_criterion_7_as_stated(cross_reports):
    assert all(c.status == "pass" for r in cross_reports for c in r.checks)


def test_criterion_8_tt_property():
    reports = [vf.check_tt_property(L, pinned_bases(L, symbolic=True)[0], order=4, nmax=3) for L in ("PI", "PII")]
    checks = [c for r in reports for c in r.checks]
    ok = all(c.status == "pass" for c in checks)
    controls = [c for c in checks if c.name.startswith("negative control")]
    ok = ok and len(controls) == 2 and all(c.detail.get("witness") for c in controls)
    record(8, ok, "parity, poles at branch points, leading order for n <= 3 through hbar^4 (PI, PII); "
                  "injected faults caught with witnesses")
    assert ok


def _p2_rows(lax_reports):
    return [(lab, c) for lab, _, c in _rows(lax_reports, "P_2 f(x)")
            if int(c.name.rsplit("^", 1)[1]) in (0, 1, 2)]


def test_criterion_9_loop_equations(lax_reports):
    rows = _p2_rows(lax_reports)
    literal = all(c.status == "pass" for _, c in rows)
    corrected = all(c.status in ("pass", "conflict") for _, c in rows)
    first = all(c.status == "pass" for *_, c in _rows(lax_reports, "P_1 ="))
    labels = sorted({lab for lab, c in rows if c.status == "conflict"})
    record(9, literal and first, "P_2 x-dependence at hbar^0..2: as stated FAIL at hbar^1 for "
                                 f"{', '.join(labels)}; corrected form {'PASS' if corrected else 'FAIL'}; "
                                 f"first loop equation {'PASS' if first else 'FAIL'} (see ledger)")
    assert corrected and first


@pytest.mark.xfail(strict=True, reason="W_1'(x1)/x term of P_2 at odd orders for PIII, PV, PVI; see ledger")
def test_criterion_9_as_stated(lax_reports):
    assert all(c.status == "pass" for _, c in _p2_rows(lax_reports))


def test_criterion_10_property_suites(tmp_path_factory):
    test_algebra.test_field_ring_axioms()
    test_algebra.test_field_inverse_and_norm()
    test_algebra.test_laurent_round_trip()
    test_algebra.test_residue_sum_zero_rational()
    test_toprec.test_residue_sum_zero_and_poles_at_branch_points()
    test_toprec.test_cache_byte_identity(tmp_path_factory)
    record(10, True, "field axioms, residue-sum-zero, Laurent round trip, cache byte identity "
                     "(hypothesis, derandomized)")

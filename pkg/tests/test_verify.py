"""Verification reports: statuses, determinism, conflict semantics."""

import json

from painleve_tr import verify as vf


def test_report_json_is_deterministic():
    a = vf.check_tau_equals_minus_F("PI", {"q0": "symbolic"}, gmax=3)
    b = vf.check_tau_equals_minus_F("PI", {"q0": "symbolic"}, gmax=3)
    assert a.to_json(timestamp="T", runtimes=False) == b.to_json(timestamp="T", runtimes=False)
    assert vf.stable_view(a.to_dict()) == vf.stable_view(b.to_dict())
    doc = json.loads(a.to_json())
    assert set(doc["generated"]) == {"timestamp", "runtimes"}
    assert doc["curves"] and all(len(h) == 64 for h in doc["curves"])


def test_statuses():
    rep = vf.VerificationReport("demo")
    vf._run(rep, "ok", "a", lambda: (True, None, {}))
    vf._run(rep, "bad", "a", lambda: (False, "witness", {}))
    vf._run(rep, "na", "a", vf._skip("reason"))
    vf._run(rep, "crash", "a", lambda: 1 / 0)

    def conflict():
        raise vf.Conflict("stated residual", "corrected statement")

    vf._run(rep, "c", "a", conflict)
    assert [c.status for c in rep.checks] == ["pass", "fail", "skipped", "fail", "conflict"]
    assert rep.checks[3].residual.startswith("ZeroDivisionError")
    assert rep.checks[4].detail == {"corrected form holds": "corrected statement"}
    assert not rep.ok
    rep.checks = [c for c in rep.checks if c.status != "fail"]
    assert rep.ok


def test_numeric_base_skips_derivative_identity():
    rep = vf.check_tau_equals_minus_F("PI", {"q0": "1"}, gmax=3)
    st = {c.name: c.status for c in rep.checks}
    assert st["derivative identity"] == "skipped"
    assert st["F^(2) closed form"] == "pass" and st["F^(3) closed form"] == "pass"


def test_pv_pvi_tau_skipped_with_reason():
    from painleve_tr.curves import pinned_bases
    for L in ("PV", "PVI"):
        rep = vf.check_tau_equals_minus_F(L, pinned_bases(L)[0])
        assert rep.ok and all(c.status == "skipped" and c.residual for c in rep.checks)


def test_run_suite_dispatch():
    rep = vf.run_suite("loop", "PII", {"q0": "1", "params": {"theta": "1"}})
    assert rep.suite == "loop" and rep.ok and rep.counts()["conflict"] == 0

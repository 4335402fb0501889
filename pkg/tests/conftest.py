import pytest
from hypothesis import HealthCheck, settings

# Property tests are randomized but reproducible: derandomize fixes the seed.
settings.register_profile("repo", derandomize=True, deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

#: criterion number -> (status, note), filled by tests/test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PAINLEVE_TR_CACHE", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, note = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {status}  {note}")

import pytest

from stabtopo.catalog import audit_corpus
from stabtopo.conditions import audit_implications

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def corpus():
    return audit_corpus(random_count=20, seed=0)


@pytest.fixture(scope="session")
def corpus_audit(corpus):
    return audit_implications(corpus)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import os

import pytest

from johnson_h2.johnson import JohnsonAlgebra

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run the extended, non-gating computations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow") or os.environ.get("JOHNSON_H2_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="extended run; use --run-slow or JOHNSON_H2_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def alg3():
    return JohnsonAlgebra(3)


@pytest.fixture(scope="session")
def alg4():
    return JohnsonAlgebra(4)


@pytest.fixture(scope="session")
def alg5():
    return JohnsonAlgebra(5)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("JOHNSON_H2_CACHE", str(tmp_path / "cache"))

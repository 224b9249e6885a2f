import numpy as np
import pytest

from gnetdet._backend import HAVE_NUMBA
from gnetdet.kernels import get_impl

_ACCEPTANCE: dict[str, str] = {}

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def impl(request):
    """Kernel module for each available backend."""
    return get_impl(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20210614)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion logged in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    if call.when == "call":
        item.rep_call = outcome.get_result()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0][2:])):
        terminalreporter.write_line(f"{_ACCEPTANCE[key]}  {key}")

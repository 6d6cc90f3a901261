import pytest
from hypothesis import settings

from vdwrelax import kernels
from vdwrelax.equilibrium import maxwell_construction, spinodal_bounds
from vdwrelax.thermo import ThermoParams

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return ThermoParams(0.85)


@pytest.fixture(scope="session")
def spin(params):
    return spinodal_bounds(params)


@pytest.fixture(scope="session")
def sat(params, spin):
    return maxwell_construction(params, spin)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Record one acceptance line; the lines are printed after the test run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def _record(criterion, ok, detail):
        lines.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

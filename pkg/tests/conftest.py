import warnings

import numpy as np
import pytest

from fracfucik.domain import DomainSpec, build_mesh
from fracfucik.eigen import lambda1
from fracfucik.kernel.energy import assemble


def make_energy(p=2.0, alpha=0.4, epsilon=0.25, resolution=33, n=1, omega=(-1.0, 1.0),
                **opts):
    spec = DomainSpec(n=n, omega=omega, epsilon=epsilon, alpha=alpha, p=p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return assemble(build_mesh(spec, resolution), **opts)


@pytest.fixture(scope="session")
def E2():
    return make_energy(2.0, 0.4)


@pytest.fixture(scope="session")
def E3():
    return make_energy(3.0, 0.3)


@pytest.fixture(scope="session")
def phi2(E2):
    return lambda1(E2)


@pytest.fixture(scope="session")
def phi3(E3):
    return lambda1(E3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

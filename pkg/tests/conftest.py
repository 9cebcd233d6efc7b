import numpy as np
import pytest

from gtransfer.orthopoly import FamilySpec


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])


FAMILIES = [
    FamilySpec.jacobi(0.0, 0.0),
    FamilySpec.jacobi(1.0, 0.5),
    FamilySpec.jacobi(-0.5, 0.5),
    FamilySpec.gegenbauer(1.0),
    FamilySpec.gegenbauer(10.0),
    FamilySpec.hermite(),
    FamilySpec.laguerre(0.0),
    FamilySpec.laguerre(1.5),
]


@pytest.fixture(params=FAMILIES, ids=lambda f: f.label())
def family(request):
    return request.param


def interior(family, count=25):
    if family.kind == "hermite":
        return np.linspace(-3.0, 3.0, count)
    if family.kind == "laguerre":
        return np.linspace(0.05, 10.0, count)
    return np.linspace(-0.95, 0.95, count)

import numpy as np
import pytest

from crystalline import _kernels, parse_poly_dsl

# (DSL, window) pairs; every entry has simple, uniformly separated zeros.
CATALOG = {
    "sine": ("sin(pi*z)", (-10.5, 10.5)),
    "sine_half": ("sin(pi*z)+0.5*sin(z)", (-20.5, 20.5)),
    "sine_tenth": ("sin(pi*z)+0.1*sin(z)", (-20.5, 20.5)),
    "two_rates": ("sin(pi*z)+0.25*sin(z)+0.25*sin(1.4142135623730951*z)", (-20.5, 20.5)),
    "cosine": ("cos(pi*z)+0.3*cos(z)", (-10, 10)),
    "strip": ("2+e(1)", (-10, 10)),
    "strip_irrational": ("3+e(1)+(0.5+0.5j)*e(1.4142135623730951)", (-10.25, 10.25)),
    "skew": ("e(-1)+(0.2-0.1j)*e(-0.3)+1.5*e(0.5)", (-8.3, 8.3)),
}


@pytest.fixture(scope="session", autouse=True)
def _jit_warm():
    _kernels.warmup()


@pytest.fixture(params=sorted(CATALOG))
def catalog_entry(request):
    text, window = CATALOG[request.param]
    return request.param, parse_poly_dsl(text), window


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])

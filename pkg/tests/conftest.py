import sys

import numpy as np
import pytest

from loadshare import LinearMap, MoebiusMap, build_objective, koenigs_build


def moebius_sigma(x, a, b):
    """Closed-form Koenigs function of a x / (1 + b x).

    In u = 1/x the map is affine, u -> u/a + b/a, which makes
    h_n(x)/a**n = 1/(1/x + b (1 - a**n)/(1 - a)) and the limit follows.
    """
    x = np.asarray(x, dtype=float)
    return x / (1.0 + b * x / (1.0 - a))


def moebius_sigma_inverse(s, a, b):
    return s / (1.0 - b * s / (1.0 - a))


def brute_quotient(f, a, x, n):
    """h_n(x) / a**n by plain iteration, no acceleration."""
    y = float(x)
    for _ in range(n):
        y = f(y)
    return y / a ** n


ANALYTIC_MAPS = [
    LinearMap(0.5, 2.0),
    LinearMap(0.3, 2.0),
    MoebiusMap(0.5, 1.0, 2.0),
    MoebiusMap(0.7, 0.5, 2.0),
]
RATIOS = [0.25, 0.5, 0.8]


@pytest.fixture(scope="session")
def linear():
    return LinearMap(0.5, 2.0)


@pytest.fixture(scope="session")
def moebius():
    return MoebiusMap(0.5, 1.0, 2.0)


@pytest.fixture(scope="session")
def k_linear(linear):
    return koenigs_build(linear)


@pytest.fixture(scope="session")
def k_moebius(moebius):
    return koenigs_build(moebius, tol=1e-12)


@pytest.fixture(scope="session")
def obj_linear_p2(k_linear):
    return build_objective(k_linear, 1.0, 4.0, 1.0)


@pytest.fixture(scope="session")
def obj_linear_p1(k_linear):
    return build_objective(k_linear, 1.0, 2.0, 1.0)


@pytest.fixture(scope="session")
def obj_moebius(k_moebius):
    return build_objective(k_moebius, 1.0, 4.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in sorted(mod.RESULTS.items()):
        terminalreporter.write_line(f"{name} {'PASS' if ok else 'FAIL'}: {detail}")

import math
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from homoshift.expr import parse_fn, parse_poly
from homoshift.field import hamiltonian, with_multiplier
from homoshift.poly import HomoPoly

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SAMPLE_POLYS = ["x^2+y^2", "x*y", "3*x^2*y-y^3", "x^2-y^2"]
ETA_TEXT = "2+sin(x*y)"


def make_field(poly: str, eta: str | None = None, radius: float = 2.0, escape: float = 1e3):
    f = hamiltonian(parse_poly(poly), escape=escape)
    if eta is not None and eta != "1":
        f = with_multiplier(f, parse_fn(eta), radius)
    return f


@st.composite
def homo_polys(draw, min_degree=2, max_degree=6, bound=5):
    d = draw(st.integers(min_degree, max_degree))
    coeffs = draw(st.lists(st.integers(-bound, bound), min_size=d + 1, max_size=d + 1)
                  .filter(lambda c: any(c)))
    return HomoPoly(coeffs, d)


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@pytest.fixture
def rotation():
    return make_field("x^2+y^2")


@pytest.fixture
def hyperbolic():
    return make_field("x*y")


def close(a, b, tol):
    return all(abs(u - v) <= tol for u, v in zip(a, b))


__all__ = ["ACCEPTANCE_LINES", "ETA_TEXT", "Fraction", "SAMPLE_POLYS", "close", "homo_polys", "make_field", "math",
           "rationals"]

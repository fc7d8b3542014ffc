import random
import sys
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from monoborel import PdeProblem, TruncatedSeries


def random_series(rng, d, T, exact=False, density=0.5, lo=0, N=1):
    """Random series supported on lo <= |beta| <= T."""
    coeffs = {}
    for beta in product(range(T + 1), repeat=d):
        if not lo <= sum(beta) <= T or rng.random() > density:
            continue
        if exact:
            coeffs[beta] = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(N)]
        else:
            coeffs[beta] = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(N)]
    return TruncatedSeries(d, coeffs, T, N, exact)


def euler_problem(exact=False):
    G = {((0,), (0,), (1,)): [1], ((1,), (0,), (0,)): [-1]}
    return PdeProblem(1, 1, 1, (1,), (1,), (1,), G, exact)


def riccati_problem(exact=False):
    """G = y - x + y^2."""
    G = {((0,), (0,), (1,)): [1], ((1,), (0,), (0,)): [-1], ((0,), (0,), (2,)): [1]}
    return PdeProblem(1, 1, 1, (1,), (1,), (1,), G, exact)


def euler_oracle(x, e):
    """Borel sum of the Euler series, y = (x/z) e^{1/z} E1(1/z) with z = -e x and direction pi."""
    from scipy.special import exp1
    z = -e * x
    return x / z * np.exp(1 / z) * exp1(1 / z)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

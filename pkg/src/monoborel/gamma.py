"""Gamma function kernels.

``GammaKernel`` evaluates log Gamma on positive reals with a Lanczos
approximation (g = 7, nine coefficients), scalar or vectorized.
``gamma_exact`` returns Gamma at a positive rational as an exact value:
an integer when the argument is integral, otherwise a ``GammaRational``
of the form q * Gamma(f) with f the fractional part.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

_G = 7.0
_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lgamma_lanczos(z: np.ndarray) -> np.ndarray:
    # valid for z >= 0.5
    zm = z - 1.0
    acc = np.full_like(zm, _COEF[0])
    for i in range(1, 9):
        acc = acc + _COEF[i] / (zm + i)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


class GammaKernel:
    """Stateless evaluator of log Gamma and Gamma on (0, inf)."""

    @staticmethod
    def lgamma(x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr <= 0):
            raise ValueError("GammaKernel is defined on positive reals only")
        out = np.empty_like(arr)
        big = arr >= 0.5
        out[big] = _lgamma_lanczos(arr[big])
        small = ~big
        if np.any(small):
            # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
            xs = arr[small]
            out[small] = math.log(math.pi) - np.log(np.sin(np.pi * xs)) - _lgamma_lanczos(1.0 - xs)
        if np.ndim(x) == 0:
            return float(out)
        return out

    @classmethod
    def gamma(cls, x):
        return np.exp(cls.lgamma(x))


lgamma = GammaKernel.lgamma
gamma = GammaKernel.gamma


@lru_cache(maxsize=4096)
def gamma_exact(x: Fraction):
    from .exact import GammaRational

    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"Gamma pole or negative argument: {x}")
    if x.denominator == 1:
        return math.factorial(int(x) - 1)
    n = math.floor(x)
    f = x - n
    q = Fraction(1)
    for i in range(n):
        q *= f + i
    return GammaRational({((f, 1),): q})

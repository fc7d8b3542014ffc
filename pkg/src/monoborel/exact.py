"""Exact scalars for Borel-plane coefficients.

A ``GammaRational`` is a finite rational combination of monomials in the
symbols Gamma(f), f a rational in (0, 1). Gamma at any positive rational
reduces to such a monomial through Gamma(x + 1) = x Gamma(x), so formal
Borel/Laplace identities can be checked with exact zero discrepancy even
when Gamma arguments are not integers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

_Key = tuple  # sorted tuple of (fraction, exponent)


def _merge(k1: _Key, k2: _Key, sign: int = 1) -> _Key:
    acc = dict(k1)
    for f, e in k2:
        acc[f] = acc.get(f, 0) + sign * e
    return tuple(sorted((f, e) for f, e in acc.items() if e != 0))


class GammaRational:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif isinstance(terms, (int, Fraction)):
            terms = {(): Fraction(terms)}
        self.terms = {k: Fraction(v) for k, v in terms.items() if v != 0}

    @staticmethod
    def _coerce(other):
        if isinstance(other, GammaRational):
            return other
        if isinstance(other, Rational):
            return GammaRational({(): Fraction(other)})
        return None

    def is_rational(self) -> bool:
        return all(k == () for k in self.terms)

    def simplify(self):
        """Return a Fraction when no Gamma symbol survives."""
        if self.is_rational():
            return self.terms.get((), Fraction(0))
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, 0) + v
        return GammaRational(out)

    __radd__ = __add__

    def __neg__(self):
        return GammaRational({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = _merge(k1, k2)
                out[k] = out.get(k, 0) + v1 * v2
        return GammaRational(out)

    __rmul__ = __mul__

    def _inverse(self):
        if len(self.terms) != 1:
            raise ZeroDivisionError("only Gamma monomials are invertible")
        (k, v), = self.terms.items()
        return GammaRational({tuple((f, -e) for f, e in k): 1 / v})

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        return self * o._inverse()

    def __rtruediv__(self, other):
        return self._inverse() * other

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) == other
        return self.terms == o.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __complex__(self):
        return complex(float(self))

    def __float__(self):
        total = 0.0
        for k, v in self.terms.items():
            term = float(v)
            for f, e in k:
                term *= math.gamma(float(f)) ** e
            total += term
        return total

    def __abs__(self):
        return abs(float(self))

    def __repr__(self):
        parts = []
        for k, v in sorted(self.terms.items()):
            sym = "*".join(f"G({f})^{e}" for f, e in k)
            parts.append(f"{v}" + (f"*{sym}" if sym else ""))
        return "GammaRational(" + (" + ".join(parts) or "0") + ")"


def to_exact(value):
    """Interpret a real number as an exact rational (decimal reading for floats)."""
    if isinstance(value, (GammaRational, Fraction, int)):
        return value
    if isinstance(value, complex):
        if value.imag != 0:
            raise ValueError("exact mode supports real rational coefficients only")
        value = value.real
    return Fraction(repr(float(value)))


def is_zero(value) -> bool:
    return value == 0

"""Monomial orders, the T_alpha decomposition, approximants and Gevrey fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Sequence

import numpy as np

from .errors import InputError
from .gamma import lgamma
from .series import TruncatedSeries, leq


def as_fraction(x) -> Fraction:
    """Read a number as an exact rational, snapping floats to short fractions."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    x = float(x)
    f = Fraction(x).limit_denominator(10**6)
    if abs(float(f) - x) <= 1e-15 * max(1.0, abs(x)):
        return f
    return Fraction(x)


class MonomialOrder:
    """The data (alpha, k, s) of a monomial Borel/Laplace transform.

    lambda_j = s_j / (alpha_j k) on J_s = {j : s_j != 0}; variables outside
    J_s are inert. All parameters are held as exact rationals.
    """

    __slots__ = ("alpha", "k", "s", "lam", "lam_float", "J", "k_alpha")

    def __init__(self, alpha: Sequence[int], k=1, s=None):
        alpha = tuple(int(a) for a in alpha)
        if not alpha or min(alpha) < 1:
            raise InputError("alpha must have positive integer entries")
        k = as_fraction(k)
        if k <= 0:
            raise InputError("k must be positive")
        if s is None:
            tot = sum(alpha)
            s = tuple(Fraction(a, tot) for a in alpha)
        s = tuple(as_fraction(v) for v in s)
        if len(s) != len(alpha):
            raise InputError("weights and alpha differ in length")
        if min(s) < 0 or abs(float(sum(s)) - 1.0) > 1e-12:
            raise InputError(f"weights must be non-negative and sum to 1, got {[float(v) for v in s]}")
        self.alpha = alpha
        self.k = k
        self.s = s
        self.J = tuple(j for j, v in enumerate(s) if v != 0)
        if not self.J:
            raise InputError("J_s is empty")
        self.lam = tuple(v / (a * k) for v, a in zip(s, alpha))
        self.lam_float = np.array([float(v) for v in self.lam])
        self.k_alpha = tuple(k * a if j in self.J else Fraction(0) for j, a in enumerate(alpha))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    @property
    def offset(self):
        """Borel-plane exponent offset o = -k alpha_J."""
        return tuple(-v for v in self.k_alpha)

    @property
    def lam_prime(self):
        """lambda'_j = alpha_j k / s_j on J_s (0 elsewhere)."""
        return tuple(a * self.k / v if v else Fraction(0) for a, v in zip(self.alpha, self.s))

    def k_alpha_int(self):
        if any(v.denominator != 1 for v in self.k_alpha):
            raise InputError("k*alpha_j is not an integer; the vector field leaves the exponent grid")
        return tuple(int(v) for v in self.k_alpha)

    def weight(self, beta) -> Fraction:
        """<beta, lambda> as an exact rational."""
        return sum((b * l for b, l in zip(beta, self.lam)), Fraction(0))

    def in_tail(self, beta) -> bool:
        """True when k alpha_J <= beta_J (the Borel-transformable part)."""
        return all(beta[j] >= self.k_alpha[j] for j in self.J)

    def blowup(self, i: int, j: int) -> "MonomialOrder":
        """Parameters after pi_ij: alpha' = alpha + alpha_j e_i, lambda' = lambda - lambda_i e_j."""
        a, s = list(self.alpha), list(self.s)
        if s[j] * a[i] < s[i] * a[j]:
            raise InputError("blow-up admissibility s_j alpha_i >= s_i alpha_j violated")
        new_a = list(a)
        new_a[i] = a[i] + a[j]
        new_s = list(s)
        new_s[i] = s[i] * (1 + Fraction(a[j], a[i]))
        new_s[j] = s[j] - a[j] * s[i] / a[i]
        return MonomialOrder(new_a, self.k, new_s)

    def key(self):
        return (self.alpha, self.k, self.s)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        s = ", ".join(str(v) for v in self.s)
        return f"MonomialOrder(alpha={self.alpha}, k={self.k}, s=({s}))"


def t_decompose(f: TruncatedSeries, alpha: Sequence[int]) -> List[TruncatedSeries]:
    """Components f_{alpha,n} with f = sum_n f_{alpha,n} x^{n alpha}."""
    alpha = tuple(alpha)
    if len(alpha) != f.dim or min(alpha) < 1:
        raise InputError("alpha must be a positive multi-index of the series dimension")
    na = sum(alpha)
    nmax = f.trunc // na
    buckets = [dict() for _ in range(nmax + 1)]
    for beta, v in f.coeffs.items():
        n = min(b // a for b, a in zip(beta, alpha))
        buckets[n][tuple(b - n * a for b, a in zip(beta, alpha))] = v
    return [f._new(buckets[n], trunc=f.trunc - n * na) for n in range(nmax + 1)]


def t_reassemble(parts: Sequence[TruncatedSeries], alpha: Sequence[int], trunc: int) -> TruncatedSeries:
    acc = None
    for n, p in enumerate(parts):
        term = p.shift([n * a for a in alpha], trunc=trunc)
        acc = term if acc is None else acc.add(term)
    return acc.truncate(trunc)


def approximate(f: TruncatedSeries, gamma: Sequence[int]) -> TruncatedSeries:
    """App_gamma: keep the terms x^beta with gamma not <= beta."""
    gamma = tuple(gamma)
    return f.select(lambda beta: not leq(gamma, beta))


@dataclass(frozen=True)
class GevreyFit:
    s_hat: float
    C: float
    A: float
    r2: float

    def to_dict(self):
        return {"s": self.s_hat, "C": self.C, "A": self.A, "r2": self.r2}

    def to_json(self) -> str:
        from .formatting import dumps
        return dumps(self.to_dict())


def _log_min_factorial(beta, alpha) -> float:
    return min(float(lgamma(b + 1.0)) / a for b, a in zip(beta, alpha))


def _log_abs(x) -> float:
    if isinstance(x, Fraction):
        if x == 0:
            return -math.inf
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    m = abs(complex(x))
    return math.log(m) if m > 0 else -math.inf


def _log_norm(v) -> float:
    """log of the Euclidean norm, safe beyond double range."""
    logs = [_log_abs(x) for x in v]
    top = max(logs)
    if top == -math.inf:
        return top
    return top + 0.5 * math.log(sum(math.exp(2 * (l - top)) for l in logs))


def gevrey_fit(f: TruncatedSeries, alpha: Sequence[int], min_degree: int = 8) -> GevreyFit:
    """Regress log of per-shell maxima on [1, D, log min_j beta_j!^{1/alpha_j}, log D].

    The log D column absorbs polynomial prefactors such as the 1/n in
    Gamma(n) = n!/n; it is dropped when fewer than six shells are present.
    """
    alpha = tuple(alpha)
    if len(alpha) != f.dim:
        raise InputError("alpha dimension mismatch")
    shells = {}
    for beta, v in f.coeffs.items():
        m = _log_norm(v)
        if m == -math.inf:
            continue
        D = sum(beta)
        best = shells.get(D)
        if best is None or m > best[0] or (m == best[0] and beta < best[1]):
            shells[D] = (m, beta)
    if len(shells) < 4 or max(shells) < min_degree:
        raise InputError("too few nonzero coefficients to fit a Gevrey order")
    Ds = sorted(shells)
    y = np.array([shells[D][0] for D in Ds])
    cols = [np.ones(len(Ds)), np.array(Ds, dtype=float),
            np.array([_log_min_factorial(shells[D][1], alpha) for D in Ds])]
    if len(Ds) >= 6:
        cols.append(np.log(np.maximum(np.array(Ds, dtype=float), 1.0)))
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else 1.0 - float(resid @ resid) / sst
    return GevreyFit(s_hat=max(float(coef[2]), 0.0), C=float(math.exp(coef[0])),
                     A=float(math.exp(coef[1])), r2=min(max(r2, 0.0), 1.0))


class ShellBounds(NamedTuple):
    N_min: int
    N_max: int
    lower: tuple  # lower bounds for (N_min!, N_max!)
    upper: tuple  # upper bounds for (N_min!, N_max!)


def factorial_shell_bounds(gamma: Sequence[int], alpha: Sequence[int]) -> ShellBounds:
    """Bracketing values of N! for N = min_j floor(gamma_j/alpha_j) and max_j floor(...) + 1."""
    gamma, alpha = tuple(gamma), tuple(alpha)
    if not any(gamma):
        raise InputError("gamma must be nonzero")
    na, ng = sum(alpha), sum(gamma)
    roots = [_factorial_root(g, a) for g, a in zip(gamma, alpha)]
    n_min = min(g // a for g, a in zip(gamma, alpha))
    n_max = max(g // a for g, a in zip(gamma, alpha)) + 1
    lo_min, hi_min = na ** (-ng) * min(roots), min(roots)
    lo_max, hi_max = na ** (-2 * ng) * max(roots), na * 2.0 ** (2 * ng) * max(roots)
    return ShellBounds(n_min, n_max, (lo_min, lo_max), (hi_min, hi_max))


def _factorial_root(g: int, a: int) -> float:
    """g!^{1/a}, exact for a = 1 while g! fits a double."""
    if g <= 170:
        return float(math.factorial(g)) ** (1.0 / a)
    return math.exp(float(lgamma(g + 1.0)) / a)


def factorial_chain(n: int, k: int):
    """(n!^k, (kn)!, k^{kn} n!^k) as exact integers."""
    fn = math.factorial(n) ** k
    return fn, math.factorial(k * n), k ** (k * n) * fn

"""Formal monomial Borel and Laplace transforms and the convolution *_lambda.

A ``BorelSeries`` stores its body at the exponents of the original series:
the body coefficient at beta equals a_beta / Gamma(<beta, lambda>), and the
represented function is xi^o * body(xi) with o = -k alpha_J. Products in the
x-plane become convolutions of bodies:

    (beta1, c1) * (beta2, c2) -> (beta1 + beta2, c1 c2 G(w1) G(w2) / G(w1 + w2))

with w = <beta, lambda>, which is the Beta-function identity for monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .errors import ExactModeError, InputError
from .exact import GammaRational
from .gamma import gamma_exact, lgamma
from .monomial import MonomialOrder, as_fraction
from .series import TruncatedSeries, fmt_float


@dataclass(frozen=True)
class BorelSeries:
    body: TruncatedSeries
    mo: MonomialOrder

    @property
    def offset(self):
        return self.mo.offset

    @property
    def exact(self) -> bool:
        return self.body.exact

    def evaluate(self, xi) -> np.ndarray:
        """Numeric value of xi^o body(xi) (principal branches)."""
        pts = np.asarray(xi, dtype=complex)
        single = pts.ndim == 1
        pts = pts.reshape(-1, self.mo.dim)
        E, V = self.body.to_numeric().arrays()
        if E.shape[0] == 0:
            out = np.zeros((pts.shape[0], self.body.N), dtype=complex)
        else:
            # exponents beta + o termwise, so xi = 0 is fine whenever beta + o >= 0
            E = E + np.array([float(o) for o in self.offset])[None, :]
            mono = np.ones((pts.shape[0], E.shape[0]), dtype=complex)
            for j in range(self.mo.dim):
                mono *= pts[:, j:j + 1] ** E[None, :, j]
            out = mono @ V.astype(complex)
        return out[0] if single else out

    def add(self, other: "BorelSeries") -> "BorelSeries":
        _same_order(self, other)
        return BorelSeries(self.body.add(other.body), self.mo)

    def scale(self, c) -> "BorelSeries":
        return BorelSeries(self.body.scale(c), self.mo)

    def sub(self, other):
        return self.add(other.scale(-1))

    def to_csv(self, names=None) -> str:
        off = ",".join(fmt_float(float(o)) if Fraction(o).denominator != 1 else str(int(o)) for o in self.offset)
        meta = [f"offset={off}",
                "alpha=" + ",".join(str(a) for a in self.mo.alpha),
                f"k={self.mo.k}",
                "s=" + ",".join(str(v) for v in self.mo.s)]
        return self.body.to_csv(names, comments=meta)

    @classmethod
    def from_csv(cls, text: str, mo: MonomialOrder | None = None, exact: bool = False):
        body, names, meta = TruncatedSeries.from_csv(text, exact=exact)
        if mo is None:
            try:
                mo = MonomialOrder([int(a) for a in meta["alpha"].split(",")], as_fraction(meta["k"]),
                                   [as_fraction(v) for v in meta["s"].split(",")])
            except KeyError as exc:
                raise InputError("Borel CSV lacks alpha/k/s metadata; pass a MonomialOrder") from exc
        if "offset" in meta:
            off = [float(v) for v in meta["offset"].split(",")]
            if any(abs(a - float(b)) > 1e-12 for a, b in zip(off, mo.offset)):
                raise InputError("offset line disagrees with the monomial order")
        return cls(body, mo), names


def _same_order(a: BorelSeries, b: BorelSeries):
    if a.mo != b.mo:
        raise InputError("monomial order mismatch")


def _weights(series: TruncatedSeries, mo: MonomialOrder):
    if series.dim != mo.dim:
        raise InputError("series and monomial order differ in dimension")
    E, V = series.arrays()
    return E, V, E @ mo.lam_float


def formal_borel(f: TruncatedSeries, mo: MonomialOrder) -> BorelSeries:
    """Termwise x^beta -> xi^{beta + o} / Gamma(<beta, lambda>)."""
    E, V, w = _weights(f, mo)
    if f.exact:
        out = {}
        for beta, v in f.coeffs.items():
            wt = mo.weight(beta)
            if wt <= 0:
                raise InputError(f"term {beta} has <beta,lambda> = {wt} <= 0; split it off first")
            out[beta] = v / gamma_exact(wt)
        return BorelSeries(f._new(out), mo)
    if np.any(w <= 1e-14):
        bad = tuple(int(e) for e in E[np.argmin(w)])
        raise InputError(f"term {bad} has <beta,lambda> <= 0; split it off first")
    scale = np.exp(-lgamma(w)) if w.size else w
    return BorelSeries(f._new(dict(zip(f.coeffs, V * scale[:, None]))), mo)


def formal_laplace(g: BorelSeries) -> TruncatedSeries:
    """Inverse of formal_borel: multiply the body by Gamma(<beta, lambda>)."""
    body, mo = g.body, g.mo
    E, V, w = _weights(body, mo)
    if body.exact:
        out = {}
        for beta, v in body.coeffs.items():
            wt = mo.weight(beta)
            if wt <= 0:
                raise InputError(f"body term {beta} lies outside the Laplace domain")
            prod = v * gamma_exact(wt)
            out[beta] = np.array([_simplify(x) for x in prod], dtype=object)
        return body._new(out)
    if np.any(w <= 1e-14):
        raise InputError("body term outside the Laplace domain")
    scale = np.exp(lgamma(w)) if w.size else w
    return body._new(dict(zip(body.coeffs, V * scale[:, None])))


def _gx(w):
    g = gamma_exact(w)
    return Fraction(g) if isinstance(g, int) else g


def _simplify(x):
    return x.simplify() if isinstance(x, GammaRational) else x


def convolve(f: BorelSeries, g: BorelSeries) -> BorelSeries:
    """Monomial convolution *_lambda, truncated at min(T_f, T_g)."""
    _same_order(f, g)
    a, b, mo = f.body, g.body, f.mo
    a._check(b)
    if a.N != b.N and 1 not in (a.N, b.N) or (a.N == b.N and a.N > 1):
        raise InputError("convolution needs a scalar factor")
    T = min(a.trunc, b.trunc)
    N = max(a.N, b.N)
    if a.exact:
        out = {}
        for k1, v1 in a.coeffs.items():
            w1 = mo.weight(k1)
            for k2, v2 in b.coeffs.items():
                if sum(k1) + sum(k2) > T:
                    continue
                w2 = mo.weight(k2)
                c = _simplify(_gx(w1) * _gx(w2) / _gx(w1 + w2))
                key = tuple(x + y for x, y in zip(k1, k2))
                term = v1 * v2 * c
                out[key] = out[key] + term if key in out else term
        return BorelSeries(TruncatedSeries(a.dim, out, T, N, True, check=False), mo)
    E1, V1, w1 = _weights(a, mo)
    E2, V2, w2 = _weights(b, mo)
    if E1.shape[0] == 0 or E2.shape[0] == 0:
        return BorelSeries(TruncatedSeries(a.dim, {}, T, N), mo)
    i1, i2 = np.nonzero(E1.sum(1)[:, None] + E2.sum(1)[None, :] <= T)
    E = E1[i1] + E2[i2]
    fac = np.exp(lgamma(w1[i1]) + lgamma(w2[i2]) - lgamma(w1[i1] + w2[i2]))
    V = V1[i1] * V2[i2] * fac[:, None]
    base = T + 1
    codes = np.zeros(E.shape[0], dtype=np.int64)
    for j in range(a.dim):
        codes = codes * base + E[:, j]
    uniq, first, inv = np.unique(codes, return_index=True, return_inverse=True)
    acc = np.zeros((uniq.size, N), dtype=complex)
    np.add.at(acc, inv.reshape(-1), V)
    keys = [tuple(int(e) for e in E[i]) for i in first]
    return BorelSeries(TruncatedSeries(a.dim, dict(zip(keys, acc)), T, N, check=False), mo)


def convolve_monomials(mu, eta, mo: MonomialOrder, trunc: int | None = None):
    """x^mu/G(<mu,l>+1) *_lambda x^eta/G(<eta,l>+1) via the body route.

    Returns (exponent, coefficient) of the resulting Borel-plane monomial.
    mu + k alpha_J and eta + k alpha_J must be integer exponents.
    """
    ka = mo.k_alpha_int()
    b1 = tuple(m + a for m, a in zip(mu, ka))
    b2 = tuple(e + a for e, a in zip(eta, ka))
    if min(b1 + b2) < 0:
        raise InputError("monomial lies below the Borel offset")
    T = trunc if trunc is not None else sum(b1) + sum(b2)
    c1 = float(np.exp(-lgamma(float(mo.weight(mu)) + 1.0)))
    c2 = float(np.exp(-lgamma(float(mo.weight(eta)) + 1.0)))
    f = BorelSeries(TruncatedSeries.monomial(b1, T, c1), mo)
    g = BorelSeries(TruncatedSeries.monomial(b2, T, c2), mo)
    h = convolve(f, g)
    key = tuple(x + y for x, y in zip(b1, b2))
    expo = tuple(k - a for k, a in zip(key, ka))
    return expo, complex(h.body[key][0])


def split_summand(f: TruncatedSeries, mo: MonomialOrder) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """head = terms with k alpha_J not <= beta_J; tail = f - head."""
    if f.dim != mo.dim:
        raise InputError("series and monomial order differ in dimension")
    head = f.select(lambda beta: not mo.in_tail(beta))
    tail = f.select(mo.in_tail)
    return head, tail


def borel_blowup_commute_check(f: TruncatedSeries, mo: MonomialOrder, i: int, j: int) -> float:
    """Largest body discrepancy between B_lambda(f) o pi_ij and B_lambda'(f o pi_ij).

    Indices are 0-based. Bodies are compared; the monomial prefactors agree
    whenever s'_j != 0 (see ``blowup_prefactor_gap``).
    """
    mo2 = mo.blowup(i, j)
    lhs = formal_borel(f, mo).body.substitute_blowup(i, j)
    rhs = formal_borel(f.substitute_blowup(i, j), mo2).body
    return lhs.max_abs_diff(rhs)


def laplace_blowup_commute_check(g: BorelSeries, i: int, j: int) -> float:
    """Largest discrepancy between L_lambda(g) o pi_ij and L_lambda'(g o pi_ij)."""
    mo2 = g.mo.blowup(i, j)
    lhs = formal_laplace(g).substitute_blowup(i, j)
    rhs = formal_laplace(BorelSeries(g.body.substitute_blowup(i, j), mo2))
    return lhs.max_abs_diff(rhs)


def blowup_prefactor_gap(mo: MonomialOrder, i: int, j: int):
    """Exponent of xi by which the two sides' prefactors differ (zero vector if none)."""
    mo2 = mo.blowup(i, j)
    o = list(mo.offset)
    pulled = list(o)
    pulled[i] = o[i] + o[j]
    return tuple(p - q for p, q in zip(pulled, mo2.offset))


def require_exact_gamma(mo: MonomialOrder, f: TruncatedSeries):
    """Exact-mode guard used by the CLI: every Gamma argument must be an integer."""
    for beta in f.coeffs:
        if mo.weight(beta).denominator != 1:
            raise ExactModeError(f"Gamma argument {mo.weight(beta)} at {beta} is not an integer")

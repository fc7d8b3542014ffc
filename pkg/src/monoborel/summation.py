"""Numeric monomial Borel summation and the weighted-norm diagnostics.

Pipeline for a formal series f and a direction theta of x^alpha:
split off the head, Borel transform the tail, restrict to the ray
xi_j = x_j u^{lambda_j}, continue the resulting Puiseux series with a
robust Pade approximant in v = u^{1/D}, and integrate the directional
Laplace transform with adaptive Gauss-Legendre panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Sequence

import numpy as np
from scipy import optimize

from .borel import BorelSeries, formal_borel, split_summand
from .errors import InputError, NonConvergenceError, SingularDirectionError
from .formatting import complex_pairs, dumps
from .monomial import MonomialOrder
from .series import TruncatedSeries

MAX_DENOM = 64


# ---------------------------------------------------------------------------
# ray restriction

@dataclass
class PuiseuxSeries:
    """scale * u^offset * sum_q coeffs[q] u^{q/denom}; coeffs has shape (Q, N)."""

    denom: int
    offset: Fraction
    coeffs: np.ndarray
    scale: complex = 1.0

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        v = u ** (1.0 / self.denom)
        vals = np.stack([np.polyval(self.coeffs[::-1, i], v) for i in range(self.coeffs.shape[1])], axis=-1)
        return self.scale * (u ** float(self.offset))[..., None] * vals


def ray_restrict(g: BorelSeries, x: Sequence[complex]) -> PuiseuxSeries:
    """u -> xi^o body(xi) at xi_j = x_j u^{lambda_j}, as a Puiseux series in u."""
    mo = g.mo
    x = np.asarray(x, dtype=complex)
    if x.shape != (mo.dim,):
        raise InputError("evaluation point has the wrong dimension")
    for lam in mo.lam:
        if Fraction(lam).denominator > MAX_DENOM:
            raise InputError("lambda must be rational with denominator <= 64")
    for j in mo.J:
        if x[j] == 0:
            raise InputError("evaluation point lies on a coordinate axis of J_s")
    body = g.body.to_numeric()
    scale = complex(np.prod([x[j] ** float(o) for j, o in enumerate(mo.offset) if o != 0]))
    if not body.coeffs:
        return PuiseuxSeries(1, Fraction(0), np.zeros((0, body.N), dtype=complex), scale)
    expo = {beta: mo.weight(beta) - 1 for beta in body.coeffs}
    r = min(expo.values())
    D = 1
    for e in expo.values():
        D = math.lcm(D, (e - r).denominator)
    Q = max(int((e - r) * D) for e in expo.values()) + 1
    coeffs = np.zeros((Q, body.N), dtype=complex)
    for beta, v in body.coeffs.items():
        q = int((expo[beta] - r) * D)
        coeffs[q] += v * np.prod(x ** np.array(beta))
    return PuiseuxSeries(D, r, coeffs, scale)


# ---------------------------------------------------------------------------
# Pade continuation

@dataclass
class PadeApproximant:
    num: np.ndarray  # ascending coefficients in w = v / radius
    den: np.ndarray
    radius: float
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    zeros: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __call__(self, v):
        w = np.asarray(v, dtype=complex) / self.radius
        return np.polyval(self.num[::-1], w) / np.polyval(self.den[::-1], w)


def _robust_pade(c: np.ndarray, m: int, n: int, tol: float = 1e-14):
    """Pade [m/n] with SVD-based degree reduction (Gonnet, Guettel, Trefethen 2013)."""
    c = np.concatenate([c, np.zeros(max(0, m + n + 1 - c.size), dtype=complex)])[: m + n + 1]
    ts = tol * np.linalg.norm(c)
    if np.linalg.norm(c[: m + 1], np.inf) <= tol * np.linalg.norm(c, np.inf):
        return np.zeros(1, complex), np.ones(1, complex)
    from scipy.linalg import toeplitz
    row = np.zeros(n + 1, complex)
    row[0] = c[0]
    while True:
        if n == 0:
            return c[: m + 1].copy(), np.ones(1, complex)
        Z = toeplitz(c[: m + n + 1], row[: n + 1])
        C = Z[m + 1: m + n + 1, :]
        rho = int(np.sum(np.linalg.svd(C, compute_uv=False) > ts))
        if rho == n:
            break
        m, n = m - (n - rho), rho
        if m < 0:
            m = 0
    _, _, Vh = np.linalg.svd(C)
    b = Vh.conj().T[:, n]
    Dg = np.diag(np.abs(b) + np.sqrt(np.finfo(float).eps))
    Qm, _ = np.linalg.qr((C @ Dg).T, mode="complete")
    b = Dg @ Qm[:, n].conj()
    b = b / np.linalg.norm(b)
    a = Z[: m + 1, : n + 1] @ b
    lead = np.nonzero(np.abs(b) > tol)[0][0]
    b, a = b[lead:], a[lead:]
    b = b[: np.nonzero(np.abs(b) > tol)[0][-1] + 1]
    nz = np.nonzero(np.abs(a) > ts)[0]
    a = a[: nz[-1] + 1] if nz.size else np.zeros(1, complex)
    return a / b[0], b / b[0]


def _roots(p: np.ndarray) -> np.ndarray:
    p = np.trim_zeros(p, "b")
    if p.size <= 1:
        return np.zeros(0, complex)
    return np.roots(p[::-1])


def _radius_estimate(c: np.ndarray) -> float:
    idx = np.nonzero(np.abs(c) > 0)[0]
    if idx.size < 2:
        return 1.0
    tail = idx[idx.size // 2:] if idx.size >= 4 else idx
    slope = np.polyfit(tail.astype(float), np.log(np.abs(c[tail])), 1)[0]
    return float(np.clip(math.exp(-slope), 1e-8, 1e8))


def pade_continue(coeffs: Sequence[complex], degree_hint: int | None = None,
                  doublet_dist: float = 1e-8, doublet_res: float = 1e-10) -> PadeApproximant:
    """Near-diagonal Pade approximant of sum_q coeffs[q] v^q with doublet filtering."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size < 8:
        raise InputError("Pade continuation needs at least 8 coefficients")
    if not np.any(c):
        raise InputError("degenerate series: all coefficients vanish")
    R = _radius_estimate(c)
    cs = c * R ** np.arange(c.size)
    K = c.size
    n = K // 2 if degree_hint is None else min(int(degree_hint), K - 1)
    m = K - 1 - n
    a, b = _robust_pade(cs, m, n)
    poles, zeros = _roots(b), _roots(a)
    # Froissart doublets: nearly cancelling pole-zero pairs with tiny residue
    if poles.size and zeros.size:
        db = np.polynomial.polynomial.polyder(b)
        keep_p = np.ones(poles.size, bool)
        keep_z = np.ones(zeros.size, bool)
        for i, p in enumerate(poles):
            dist = np.abs(zeros - p) * R
            dist[~keep_z] = np.inf
            k = int(np.argmin(dist))
            if dist[k] < doublet_dist:
                res = np.polyval(a[::-1], p) / np.polyval(db[::-1], p) * R
                if abs(res) < doublet_res:
                    keep_p[i] = False
                    keep_z[k] = False
        if not keep_p.all():
            a = a[-1] * np.poly(zeros[keep_z])[::-1] if keep_z.any() else a[-1:] * 1.0
            b = b[-1] * np.poly(poles[keep_p])[::-1] if keep_p.any() else b[-1:] * 1.0
            scale = b[0]
            a, b = a / scale, b / scale
            poles, zeros = poles[keep_p], zeros[keep_z]
    return PadeApproximant(a, b, R, poles * R, zeros * R)


# ---------------------------------------------------------------------------
# directional Laplace quadrature

@dataclass
class SumResult:
    value: np.ndarray
    direction: float
    quadrature_error_estimate: float
    pade_pole_locations: List[complex]

    def to_dict(self):
        return {"value": complex_pairs(self.value), "direction": float(self.direction),
                "err": float(self.quadrature_error_estimate),
                "poles": complex_pairs(self.pade_pole_locations)}

    def to_json(self) -> str:
        return dumps(self.to_dict())


_GL = {n: np.polynomial.legendre.leggauss(n) for n in (20, 40)}


def _ray_distance(p: complex, angle: float, vmax: float) -> float:
    q = p * np.exp(-1j * angle)
    if q.real <= 0:
        return abs(q)
    if q.real >= vmax:
        return abs(q - vmax)
    return abs(q.imag)


def laplace_quadrature(evaluator: Callable, mo: MonomialOrder, x: Sequence[complex], phi: float,
                       tol: float = 1e-10, offset: Fraction = Fraction(0), denom: int = 1,
                       scale: complex = 1.0, poles: Sequence[complex] = ()) -> SumResult:
    """x_J^{k alpha_J} scale * int_0^{e^{i phi} inf} u^offset evaluator(u^{1/denom}) e^{-u} du."""
    if not abs(phi) < math.pi / 2:
        raise InputError("Laplace direction must satisfy |phi| < pi/2")
    offset = Fraction(offset)
    if offset <= -1:
        raise InputError("integrand is not integrable at the origin")
    x = np.asarray(x, dtype=complex)
    M = math.lcm(int(denom), offset.denominator)
    p_w = int(M * (1 + offset)) - 1
    step_v = M // int(denom)
    rot = np.exp(1j * phi)
    rot_v = np.exp(1j * phi / denom)
    pref = M * np.exp(1j * phi * float(1 + offset))

    def integrand(w):
        vals = np.asarray(evaluator(rot_v * w ** step_v), dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None]
        return (pref * w ** p_w * np.exp(-rot * w ** M))[:, None] * vals

    cphi = math.cos(phi)
    t = (-math.log(tol / 10) + 10) / cphi
    for _ in range(12):
        mag = float(np.max(np.abs(integrand(np.array([t ** (1.0 / M)])))))
        if mag * t < tol / 10:
            break
        t *= 1.5
    else:
        raise NonConvergenceError("Laplace integrand does not decay along the ray")
    wmax = t ** (1.0 / M)
    vmax = wmax ** step_v
    for pl in poles:
        if _ray_distance(complex(pl), phi / denom, vmax) < 10 * tol:
            raise SingularDirectionError(f"singular direction: continuation pole {complex(pl):.6g} on the ray")

    stack = [(wmax * i / 8, wmax * (i + 1) / 8, 0) for i in range(8)]
    total = 0
    err = 0.0
    npanels = 0
    while stack:
        a, b, depth = stack.pop()
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        vals = {}
        for nn, (xs, ws) in _GL.items():
            w = mid + half * xs
            vals[nn] = half * (ws[:, None] * integrand(w)).sum(axis=0)
        diff = float(np.max(np.abs(vals[40] - vals[20])))
        if diff <= tol * (b - a) / wmax or depth >= 40:
            if depth >= 40 and diff > tol:
                raise NonConvergenceError("adaptive quadrature failed to converge (pole near the ray?)")
            total = total + vals[40]
            err += diff
            npanels += 1
        else:
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
        if npanels > 20000:
            raise NonConvergenceError("adaptive quadrature exceeded its panel budget")
    ka = np.prod([x[j] ** float(v) for j, v in enumerate(mo.k_alpha) if v != 0])
    value = ka * scale * np.atleast_1d(total)
    return SumResult(value, float(phi), float(err * abs(ka * scale)), [complex(p) ** denom for p in poles])


# ---------------------------------------------------------------------------
# Borel sum

def choose_direction(mo: MonomialOrder, x: Sequence[complex], theta: float) -> float:
    """phi = k (theta - arg x^alpha) reduced modulo 2 pi k to |phi| < pi/2."""
    x = np.asarray(x, dtype=complex)
    arg = sum(a * float(np.angle(x[j])) for j, a in enumerate(mo.alpha) if x[j] != 0)
    k = float(mo.k)
    phi = k * (theta - arg)
    period = 2 * math.pi * k
    phi -= period * round(phi / period)
    if not abs(phi) < math.pi / 2:
        raise InputError(f"point is outside the sector of direction theta={theta:.6g} (phi={phi:.6g})")
    return phi


def monomial_borel_sum(f: TruncatedSeries, mo: MonomialOrder, x: Sequence[complex], theta: float,
                       tol: float = 1e-10, degree_hint: int | None = None) -> SumResult:
    """x^alpha-k-s Borel sum of f in direction theta, evaluated at x."""
    if f.dim != mo.dim:
        raise InputError("series and monomial order differ in dimension")
    x = np.asarray(x, dtype=complex)
    f = f.to_numeric()
    head, tail = split_summand(f, mo)
    head_val = head.evaluate(x)
    phi = choose_direction(mo, x, theta)
    if not tail.coeffs:
        return SumResult(head_val, phi, 0.0, [])
    ps = ray_restrict(formal_borel(tail, mo), x)
    approximants = []
    poles: List[complex] = []
    for i in range(ps.coeffs.shape[1]):
        c = ps.coeffs[:, i]
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            approximants.append(lambda v: np.zeros_like(v))
        elif nz[-1] < 8:
            approximants.append(lambda v, c=c: np.polyval(c[::-1], v))
        else:
            pa = pade_continue(c, degree_hint)
            approximants.append(pa)
            poles.extend(pa.poles)

    def evaluator(v):
        return np.stack([ap(v) for ap in approximants], axis=-1)

    res = laplace_quadrature(evaluator, mo, x, phi, tol, ps.offset, ps.denom, ps.scale, poles)
    res.value = head_val + res.value
    return res


# ---------------------------------------------------------------------------
# growth fits and the weighted norms

def _R(xi: np.ndarray, c: Sequence) -> np.ndarray:
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    cols = [np.abs(xi[:, j]) ** float(cj) for j, cj in enumerate(c) if cj != 0]
    return np.max(np.stack(cols, axis=1), axis=1)


def exp_growth_fit(samples, c: Sequence):
    """Fit ||f(xi)|| ~ C exp(M R_c(xi)); samples are (xi, norm) pairs."""
    if len(samples) < 10:
        raise InputError("need at least 10 samples")
    xi = np.array([np.atleast_1d(s[0]) for s in samples], dtype=complex)
    vals = np.array([float(s[1]) for s in samples])
    if np.any(vals <= 0):
        raise InputError("sample norms must be positive")
    R = _R(xi, c)
    rmin = R.min()
    if R.max() <= 0 or (rmin > 0 and R.max() < 10 * rmin) or (rmin == 0 and np.count_nonzero(R) < 2):
        raise InputError("samples must span a decade in R_c")
    M, logC = np.polyfit(R, np.log(vals), 1)
    return float(math.exp(logC)), float(M)


def I_of_s(s: float) -> float:
    """int_0^1 dt / ((1 + s^2 t^2)(1 + s^2 (1-t)^2)) in closed form."""
    s = abs(float(s))
    if s < 1e-4:
        return 1.0 - 2.0 * s * s / 3.0
    return 2.0 * (math.log1p(s * s) + s * math.atan(s)) / (s * s * (4.0 + s * s))


_M0_CACHE: List[float] = []


def M0() -> float:
    """sup_{s>0} s (1 + s^2) I(s), by golden-section search."""
    if not _M0_CACHE:
        g = lambda s: -s * (1 + s * s) * I_of_s(s)
        smax = optimize.golden(g, brack=(1.0, 8.0, 30.0), tol=1e-12)
        _M0_CACHE.append(-g(smax))
    return _M0_CACHE[0]


def C_mu_rho(mu: float, rho: float, a: float, n: int) -> float:
    """3((1 - 2/(mu^a rho))^{-n} - 1), valid for mu > max(4 sqrt 2, (2/rho)^{1/a})."""
    if not mu > max(4 * math.sqrt(2), (2 / rho) ** (1 / a)):
        raise InputError("C_mu_rho requires mu > max(4*sqrt(2), (2/rho)^(1/a))")
    return 3.0 * ((1.0 - 2.0 / (mu ** a * rho)) ** (-n) - 1.0)


def norm_mu(values, xi, mu: float, c: Sequence, m0: float | None = None) -> float:
    """Grid supremum of M0 |f| (1 + R^2) exp(-mu R) with R = max_j |xi_j|^{c_j}."""
    if mu <= 0:
        raise InputError("mu must be positive")
    vals = np.asarray(values, dtype=complex)
    if vals.ndim > 1:
        vals = np.linalg.norm(vals, axis=1)
    R = _R(xi, c)
    m0 = M0() if m0 is None else m0
    return float(m0 * np.max(np.abs(vals) * (1 + R * R) * np.exp(-mu * R)))

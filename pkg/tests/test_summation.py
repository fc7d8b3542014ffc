import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate
from scipy.special import exp1

from monoborel import (M0, BorelSeries, C_mu_rho, I_of_s, InputError, MonomialOrder, SingularDirectionError,
                       TruncatedSeries, approximate, convolve, exp_growth_fit, formal_borel, formal_solve,
                       laplace_quadrature, monomial_borel_sum, norm_mu, pade_continue, ray_restrict)
from conftest import euler_oracle, euler_problem

F = Fraction
TS = TruncatedSeries
HALF = MonomialOrder((1, 1), 1, (F(1, 2), F(1, 2)))
ONE = MonomialOrder((1,), 1, (1,))


def euler_1d(T):
    """sum_{n>=1} (n-1)! t^n, whose Borel transform is 1/(1 - xi)."""
    return TS(1, {(n,): [float(math.factorial(n - 1))] for n in range(1, T + 1)}, T)


def test_ray_restrict_examples():
    # xi^o body with o = (-1, -1); (xi1 xi2)^n sits at body exponent (n+1, n+1)
    g = BorelSeries(TS(2, {(n + 1, n + 1): [1.0] for n in range(10)}, 22), HALF)
    ps = ray_restrict(g, [1.0, 1.0])
    assert ps.denom == 1 and ps.offset == 0
    assert np.allclose(ps.coeffs[:, 0], 1.0)
    ps = ray_restrict(g, [2.0, 1.0])
    u = 0.1
    assert ps(u)[0] == pytest.approx(sum((2 * u) ** n for n in range(10)))
    # represented body sum_n n (xi1 xi2)^(n-2): leading exponent -1 is recorded as the offset
    g = BorelSeries(TS(2, {(n - 1, n - 1): [float(n)] for n in range(1, 11)}, 22), HALF)
    ps = ray_restrict(g, [1.0, 1.0])
    assert ps.offset == -1
    assert np.allclose(ps.coeffs[:, 0], np.arange(1, 11))


def test_ray_restrict_fractional_grid():
    mo = MonomialOrder((1, 1), 1, (F(1, 3), F(2, 3)))
    g = formal_borel(TS(2, {(1, 0): [1.0], (0, 1): [1.0], (1, 1): [1.0]}, 3), mo)
    ps = ray_restrict(g, [1.0, 1.0])
    assert ps.denom == 3 and ps.offset == F(-2, 3)


def test_ray_restrict_errors():
    mo = MonomialOrder((1, 1), 1, (F(1, 97), F(96, 97)))
    g = formal_borel(TS.monomial((1, 1), 3), mo)
    with pytest.raises(InputError):
        ray_restrict(g, [1.0, 1.0])
    with pytest.raises(InputError):
        ray_restrict(formal_borel(TS.monomial((1, 1), 3), HALF), [0.0, 1.0])


def test_pade_examples():
    v = np.array([0.3, 2.5, -4.0 + 1j])
    pa = pade_continue(np.ones(21))
    assert np.allclose(pa.poles, [1.0], atol=1e-8)
    assert np.allclose(pa(v), 1 / (1 - v), rtol=1e-10)
    pa = pade_continue(np.arange(1, 22, dtype=float))
    assert len(pa.poles) == 2 and np.allclose(pa.poles, 1.0, atol=1e-6)
    assert np.allclose(pa(v), 1 / (1 - v) ** 2, rtol=1e-8)
    pa = pade_continue((-1.0) ** np.arange(21))
    assert np.allclose(pa.poles, [-1.0], atol=1e-8)
    assert np.allclose(pa(v), 1 / (1 + v), rtol=1e-10)


def test_pade_errors():
    with pytest.raises(InputError):
        pade_continue(np.ones(5))
    with pytest.raises(InputError):
        pade_continue(np.zeros(12))


def test_laplace_quadrature_examples():
    for x in (0.5, 2.0, 1 + 1j):
        r = laplace_quadrature(lambda v: np.ones_like(v), ONE, [x], 0.0)
        assert r.value[0] == pytest.approx(x, abs=1e-12)
        assert r.quadrature_error_estimate >= 0
    r = laplace_quadrature(lambda v: 1 / (1 + 0.1 * v), ONE, [1.0], 0.0, tol=1e-12)
    oracle, _ = integrate.quad(lambda u: math.exp(-u) / (1 + 0.1 * u), 0, np.inf, epsabs=1e-14)
    assert r.value[0].real == pytest.approx(oracle, abs=1e-10)
    assert oracle == pytest.approx(10 * math.exp(10) * exp1(10), abs=1e-12)
    assert abs(r.value[0] - 0.915633) < 1e-6
    with pytest.raises(SingularDirectionError):
        laplace_quadrature(lambda v: 1 / (1 - v), ONE, [1.0], 0.0, poles=[1.0])
    with pytest.raises(InputError):
        laplace_quadrature(lambda v: np.ones_like(v), ONE, [1.0], 2.0)


def test_sum_convergent_series():
    f = TS(2, {(n, n): [1.0] for n in range(16)}, 30)
    for theta in (0.0, 0.7, -1.2):
        r = monomial_borel_sum(f, HALF, [0.3, 0.5], theta)
        assert abs(r.value[0] - 1 / (1 - 0.15)) <= 1e-8


def test_sum_single_monomial():
    f = TS.monomial((1, 1), 4)
    for x in ([0.3, 0.5], [0.2 + 0.4j, -0.7], [2.0, 3.0]):
        arg = float(np.angle(x[0] * x[1]))
        r = monomial_borel_sum(f, HALF, x, arg + 0.3)
        assert r.value[0] == pytest.approx(x[0] * x[1], abs=1e-12)


def test_sum_euler():
    sol = formal_solve(euler_problem(), 41).series
    for e in (-0.1, -0.2):
        r = monomial_borel_sum(sol, HALF, [1.0, e], math.pi)
        assert abs(r.value[0] - euler_oracle(1.0, e)) < 1e-9
    with pytest.raises(SingularDirectionError):
        monomial_borel_sum(sol, HALF, [1.0, 0.1], 0.0)


def test_sum_outside_sector():
    with pytest.raises(InputError):
        monomial_borel_sum(TS.monomial((1, 1), 4), HALF, [1.0, 1.0], math.pi)


def test_product_duality():
    f = euler_1d(40)
    t = [-0.1]
    a = monomial_borel_sum(f, ONE, t, math.pi, tol=1e-13).value[0]
    b = monomial_borel_sum(f.mul(f), ONE, t, math.pi, tol=1e-13).value[0]
    assert abs(b - a * a) < 1e-10
    # same identity in the Borel plane: B(f) * B(f) = B(f^2)
    lhs = convolve(formal_borel(f, ONE), formal_borel(f, ONE))
    assert lhs.body.max_abs_diff(formal_borel(f.mul(f), ONE).body) < 1e-9 * 1e40


def test_sum_respects_asymptotics():
    f = euler_1d(40)
    t = -0.02
    s = monomial_borel_sum(f, ONE, [t], math.pi, tol=1e-14).value[0]
    Ns = np.arange(1, 9)
    rem = [abs(s - approximate(f, (N,)).evaluate([t])[0]) for N in Ns]
    bound = [math.lgamma(N + 1) + N * math.log(abs(t)) for N in Ns]
    slope = np.polyfit(bound, np.log(rem), 1)[0]
    assert abs(slope - 1) <= 0.2


def test_exp_growth_fit_examples():
    # one decade of R; the R e^R case carries a log R bias that shrinks as R grows
    R = np.linspace(10, 100, 40)
    C, M = exp_growth_fit([(r, 3 * math.exp(2 * r)) for r in R], [1])
    assert abs(M - 2) <= 0.05 and C == pytest.approx(3, rel=1e-6)
    _, M = exp_growth_fit([(r, 1 + 0.5 * math.sin(r) ** 2) for r in R], [1])
    assert abs(M) <= 0.05
    _, M = exp_growth_fit([(r, r * math.exp(r)) for r in R], [1])
    assert abs(M - 1) <= 0.1
    # R_c uses max_j |xi_j|^{c_j} over J_c
    xi = [(r ** 2, 0.5) for r in R / 5]
    _, M = exp_growth_fit([(x, math.exp(x[0] ** 0.5)) for x in xi], [0.5, 0])
    assert M == pytest.approx(1, abs=1e-9)


def test_exp_growth_fit_errors():
    with pytest.raises(InputError):
        exp_growth_fit([(1.0, 1.0)] * 5, [1])
    with pytest.raises(InputError):
        exp_growth_fit([(1 + 0.01 * i, 1.0) for i in range(20)], [1])


def test_I_and_M0():
    oracle, _ = integrate.quad(lambda t: 1 / ((1 + t * t) * (1 + (1 - t) ** 2)), 0, 1, epsabs=1e-14)
    assert I_of_s(1.0) == pytest.approx(2 * (math.log(2) + math.pi / 4) / 5, abs=1e-15)
    assert abs(I_of_s(1.0) - oracle) <= 1e-10
    for s in (1e-6, 1e-3, 0.1, 3.0, 40.0):
        ref, _ = integrate.quad(lambda t: 1 / ((1 + s * s * t * t) * (1 + s * s * (1 - t) ** 2)), 0, 1,
                                epsabs=1e-14, limit=200)
        assert I_of_s(s) == pytest.approx(ref, rel=1e-9)
    assert abs(M0() - 3.76) <= 0.01
    grid = np.linspace(0.01, 100, 200001)
    assert M0() >= max(s * (1 + s * s) * I_of_s(s) for s in grid[::50]) - 1e-12


def test_C_mu_rho():
    assert C_mu_rho(8.0, 1.0, 1.0, 2) == pytest.approx(3 * ((1 - 2 / 8) ** -2 - 1))
    with pytest.raises(InputError):
        C_mu_rho(5.0, 1.0, 1.0, 2)
    with pytest.raises(InputError):
        C_mu_rho(8.0, 0.1, 1.0, 2)


def _rand_borel(gen, T, lo=0):
    # represented f(xi) = sum_{lo<=n<=5} c_n xi^n stored at body exponent n + 1
    return BorelSeries(TS(1, {(n + 1,): [complex(*gen.normal(size=2))] for n in range(lo, 6)}, T), ONE)


def test_banach_algebra_inequality():
    gen = np.random.default_rng(5)
    r = np.linspace(0, 60, 6001)
    xi = np.concatenate([r * np.exp(1j * a) for a in (0.0, 0.4, -1.0)])[:, None]
    for mu in (8.0, 16.0, 32.0):
        for _ in range(20):
            f, g = _rand_borel(gen, 16), _rand_borel(gen, 16)
            h = convolve(f, g)
            nf = norm_mu(f.evaluate(xi), xi, mu, [1])
            ng = norm_mu(g.evaluate(xi), xi, mu, [1])
            nh = norm_mu(h.evaluate(xi), xi, mu, [1])
            assert nh <= nf * ng * (1 + 1e-9)


def test_focusing():
    gen = np.random.default_rng(9)
    # log grid resolves the peak of xi e^{-mu xi} at xi = 1/mu
    r = np.concatenate([[0.0], np.logspace(-6, 1.5, 4000)])[:, None]
    for _ in range(10):
        f = _rand_borel(gen, 8, lo=1)
        vals = f.evaluate(r)
        mus = (6, 8, 16, 32, 64, 128, 1024, 8192)
        norms = [norm_mu(vals, r, mu, [1]) for mu in mus]
        assert all(b <= a for a, b in zip(norms, norms[1:]))
        # f(0) = 0 gives ||f||_mu = O(1/mu)
        assert norms[-1] * mus[-1] < 2 * norms[-2] * mus[-2]
        assert norms[-1] < 0.01 * norms[0]
    with pytest.raises(InputError):
        norm_mu(vals, r, 0.0, [1])

"""Acceptance criteria 1-13, one test each.

Every test prints a single ``criterion N PASS|FAIL`` line. Run directly with
``python3 tests/test_acceptance.py`` for the bare report, or through pytest,
where the lines are repeated in the terminal summary.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.special import exp1

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import euler_problem, random_series, riccati_problem  # noqa: E402
from monoborel import (M0, I_of_s, MonomialOrder, PdeProblem, TruncatedSeries,  # noqa: E402
                       borel_blowup_commute_check, ce_residual_formal, formal_borel, formal_laplace,
                       formal_solve, gevrey_fit, monomial_borel_sum, nagumo_checks, singular_directions)
from monoborel.borel import convolve_monomials  # noqa: E402

F = Fraction
TS = TruncatedSeries
RESULTS = []


def report(n, ok, title, detail):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _random_order(rng, d):
    alpha = tuple(rng.randint(1, 3) for _ in range(d))
    w = [rng.randint(0, 3) for _ in range(d)]
    w[rng.randrange(d)] += 1
    return MonomialOrder(alpha, 1, [F(v, sum(w)) for v in w])


def _positive(f, mo):
    return f.select(lambda b: mo.weight(b) > 0)


def test_criterion_01_inverse_pair():
    rng = random.Random(1)
    t0 = time.perf_counter()
    exact_worst, num_worst = 0.0, 0.0
    for _ in range(100):
        d = rng.randint(1, 3)
        mo = _random_order(rng, d)
        f = _positive(random_series(rng, d, 12, exact=True, density=0.15), mo)
        exact_worst = max(exact_worst, formal_laplace(formal_borel(f, mo)).max_abs_diff(f))
        fn = f.to_numeric()
        back = formal_laplace(formal_borel(fn, mo))
        for k, v in fn.coeffs.items():
            num_worst = max(num_worst, float(np.max(np.abs(back[k] - v) / np.abs(v))))
    dt = time.perf_counter() - t0
    ok = exact_worst == 0 and num_worst <= 1e-12 and dt < 5
    report(1, ok, "formal_laplace o formal_borel = id",
           f"exact discrepancy {exact_worst}, numeric rel err {num_worst:.2e}, {dt:.2f} s")


def test_criterion_02_monomial_convolution():
    rng = random.Random(2)
    worst = 0.0
    for _ in range(50):
        d = rng.randint(1, 3)
        mo = _random_order(rng, d)
        mu = tuple(rng.randint(0, 5) for _ in range(d))
        eta = tuple(rng.randint(0, 5) for _ in range(d))
        expo, c = convolve_monomials(mu, eta, mo)
        want_expo = tuple(m + e + a for m, e, a in zip(mu, eta, mo.k_alpha_int()))
        want = 1 / math.gamma(float(mo.weight(mu) + mo.weight(eta)) + 2)
        if expo != want_expo:
            worst = math.inf
        worst = max(worst, abs(c - want) / want)
    report(2, worst <= 1e-12, "monomial convolution formula", f"max rel err {worst:.2e} over 50 pairs")


def test_criterion_03_derivation_identity():
    rng = random.Random(3)
    bad = 0
    for _ in range(50):
        d = rng.randint(1, 3)
        mo = _random_order(rng, d)
        f = _positive(random_series(rng, d, 8, exact=True, density=0.4), mo)
        lhs = formal_borel(f.apply_vector_field(mo), mo).body
        rhs = formal_borel(f, mo).body.shift(mo.k_alpha_int(), trunc=lhs.trunc)
        bad += not lhs.equals(rhs)
    report(3, bad == 0, "B(X f) = xi^{k alpha_J} B(f)", f"{bad} of 50 series disagree")


def test_criterion_04_borel_blowup():
    rng = random.Random(4)
    worst, done = 0.0, 0
    while done < 20:
        d = rng.randint(2, 3)
        mo = _random_order(rng, d)
        i, j = rng.sample(range(d), 2)
        if mo.s[j] * mo.alpha[i] < mo.s[i] * mo.alpha[j]:
            continue
        f = _positive(random_series(rng, d, 8, exact=True, density=0.4), mo)
        worst = max(worst, borel_blowup_commute_check(f, mo, i, j))
        done += 1
    report(4, worst == 0, "Borel blow-up commutation", f"max discrepancy {worst} over 20 series")


def test_criterion_05_euler_coefficients():
    t0 = time.perf_counter()
    sol = formal_solve(euler_problem(exact=True), 39)
    dt = time.perf_counter() - t0
    wrong = [n for n in range(1, 21) if sol.series.coef((n, n - 1)) != math.factorial(n - 1)]
    extra = [k for k in sol.series.coeffs if k[0] != k[1] + 1]
    ok = not wrong and not extra and dt < 1
    report(5, ok, "Euler coefficients (n-1)!", f"n <= 20 exact, mismatches {wrong}, {dt:.3f} s")


def _system(B):
    G = {}
    for k in range(2):
        I = [0, 0]
        I[k] = 1
        G[((0,), (0,), tuple(I))] = [B[0][k], B[1][k]]
    G[((1,), (0,), (0, 0))] = [-1, 0]
    return PdeProblem(1, 1, 2, (1,), (1,), (1,), G)


def test_criterion_06_singular_directions():
    cases = [(euler_problem(), [0.0]),
             (_system([[1, 0], [0, -1]]), [0.0, math.pi]),
             (_system([[0, 1], [-1, 0]]), [math.pi / 2, 3 * math.pi / 2])]
    err = 0.0
    for p, want in cases:
        got = singular_directions(p).directions
        err = max(err, math.inf if len(got) != len(want) else max(abs(a - b) for a, b in zip(got, want)))
    report(6, err <= 1e-10, "singular directions", f"max error {err:.1e} rad")


def _e1_oracle(z):
    """z e^z E1(z) = int_0^inf e^{-u} / (1 + u/z) du by adaptive quadrature."""
    val, _ = integrate.quad(lambda u: math.exp(-u) / (1 + u / z), 0, np.inf, epsabs=1e-13, epsrel=1e-13)
    return val


def test_criterion_07_numeric_resummation():
    sol = formal_solve(euler_problem(), 41).series
    mo = MonomialOrder((1, 1), 1, (F(1, 2), F(1, 2)))
    parts = []
    ok = True
    for e, z in ((-0.1, 10), (-0.2, 5)):
        t0 = time.perf_counter()
        val = monomial_borel_sum(sol, mo, [1.0, e], math.pi).value[0]
        dt = time.perf_counter() - t0
        oracle = _e1_oracle(z)
        assert abs(oracle - z * math.exp(z) * exp1(z)) < 1e-12
        err = abs(val - oracle)
        ok &= err < 1e-6 and dt < 2
        parts.append(f"(1,{e}) -> {val.real:.9f}, err {err:.1e}, {dt * 1e3:.0f} ms")
    report(7, ok, "Euler Borel sum vs z e^z E1(z)", "; ".join(parts))


EULER_POINTS = [(1.0, -0.1), (1.0, -0.2), (0.5, -0.3), (2.0, -0.05),
                (np.exp(0.3j), -0.15 * np.exp(-0.3j))]


def test_criterion_08_weight_independence():
    sol = formal_solve(euler_problem(), 41).series
    a = MonomialOrder((1, 1), 1, (F(1, 2), F(1, 2)))
    b = MonomialOrder((1, 1), 1, (F(1, 3), F(2, 3)))
    worst = 0.0
    for x in EULER_POINTS:
        va = monomial_borel_sum(sol, a, x, math.pi).value[0]
        vb = monomial_borel_sum(sol, b, x, math.pi).value[0]
        worst = max(worst, abs(va - vb))
    report(8, worst <= 1e-8, "weight independence s=(1/2,1/2) vs (1/3,2/3)",
           f"max |difference| {worst:.1e} at 5 points")


def test_criterion_09_norm_constants():
    oracle, _ = integrate.quad(lambda t: 1 / ((1 + t * t) * (1 + (1 - t) ** 2)), 0, 1, epsabs=1e-14, epsrel=1e-14)
    closed = 2 * (math.log(2) + math.pi / 4) / 5
    e1, e2 = abs(I_of_s(1.0) - closed), abs(closed - oracle)
    m0 = M0()
    ok = abs(m0 - 3.76) <= 0.01 and e1 <= 1e-10 and e2 <= 1e-10
    report(9, ok, "M0 and I(1)", f"M0 = {m0:.6f}; |I(1) - closed form| {e1:.1e}; closed vs quadrature {e2:.1e}")


def test_criterion_10_ce_residual():
    r1 = ce_residual_formal(euler_problem(exact=True), 10)
    r2 = ce_residual_formal(riccati_problem(exact=True), 10)
    report(10, r1 == 0 and r2 == 0, "(CE) formal residual, exact, T=10", f"Euler {r1}, y - x + y^2 {r2}")


def test_criterion_11_gevrey_diagnostics():
    euler = formal_solve(euler_problem(exact=True), 20).series
    s1 = gevrey_fit(euler, (1, 1)).s_hat
    s0 = gevrey_fit(TS(2, {(n, n): [1] for n in range(21)}, 40, exact=True), (1, 1)).s_hat
    s2 = gevrey_fit(TS(2, {(n, n): [math.factorial(2 * n)] for n in range(21)}, 40, exact=True), (1, 1)).s_hat
    ok = abs(s1 - 1) <= 0.15 and abs(s0) <= 0.05 and abs(s2 - 2) <= 0.2
    report(11, ok, "Gevrey fits", f"Euler {s1:.4f}, geometric {s0:.4f}, (2n)! {s2:.4f}")


def test_criterion_12_nagumo():
    gen = np.random.default_rng(12)
    failures = 0
    for _ in range(100):
        deg = int(gen.integers(1, 7))
        mk = lambda: TS(1, {(k,): [complex(*gen.normal(size=2))] for k in range(deg + 1)}, deg)
        f, g = mk(), mk()
        l, k, r = int(gen.integers(0, 4)), int(gen.integers(0, 4)), float(gen.uniform(0.25, 2.0))
        checks = nagumo_checks(f, g, l, k, r, n_radial=8, n_angle=8)  # 64-point grid
        failures += any(lhs > rhs * (1 + 1e-12) for lhs, rhs in checks.values())
    report(12, failures == 0, "Nagumo product and derivative inequalities", f"{failures} counterexamples in 100")


def test_criterion_13_pde_residual_of_sum():
    p = riccati_problem()
    sol = formal_solve(p, 61).series
    mo = p.summation_order()
    h = 1e-4

    def y(x, e):
        return monomial_borel_sum(sol, mo, [x, e], math.pi, tol=1e-13).value[0]

    worst = 0.0
    for x, e in ((0.1, -0.5), (0.15, -0.4), (0.1, -1.0)):
        yx = (y(x + h, e) - y(x - h, e)) / (2 * h)
        v = y(x, e)
        res = e * x * x * yx - (v - x + v * v)
        worst = max(worst, abs(res))
    report(13, worst <= 1e-5, "PDE residual of the Borel sum of y - x + y^2",
           f"max |eps x^2 y_x - F| {worst:.1e} at 3 points (h = 1e-4)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)

"""Euler's equation eps x^2 y' = y - x, from divergent coefficients to a number.

The formal solution is sum_n (n-1)! eps^(n-1) x^n. It diverges for every
nonzero x*eps, yet its Borel sum along the negative real axis of x*eps is the
classical z e^z E1(z) with z = -1/(x eps). Run:  python3 demos/euler_resummation.py
"""

import math
from fractions import Fraction
from pathlib import Path

from scipy.special import exp1

from monoborel import (MonomialOrder, PdeProblem, formal_solve, gevrey_fit,
                       monomial_borel_sum, singular_directions)

HERE = Path(__file__).resolve().parent

problem = PdeProblem.from_json((HERE / "problems" / "euler.json").read_text(), exact=True)
sol = formal_solve(problem, 21).series

print("first coefficients of y(x, eps):")
for n in range(1, 8):
    print(f"  x^{n} eps^{n - 1}: {sol.coef((n, n - 1))}")

fit = gevrey_fit(sol, (1, 1))
print(f"\nfitted Gevrey order {fit.s_hat:.3f} (factorial growth, so the series diverges)")
print("singular directions of x*eps:", singular_directions(problem).directions)

# Partial sums drift apart once the terms stop shrinking.
x, eps = 1.0, -0.1
z = -1 / (x * eps)
exact = z * math.exp(z) * exp1(z)
partial, best = 0.0, None
for n in range(1, 21):
    partial += math.factorial(n - 1) * eps ** (n - 1) * x ** n
    err = abs(partial - exact)
    best = min(best or err, err)
print(f"\nbest partial-sum error at (x, eps) = ({x}, {eps}): {best:.1e}")

numeric = formal_solve(problem.with_mode(False), 41).series
mo = MonomialOrder((1, 1), 1, (Fraction(1, 2), Fraction(1, 2)))
res = monomial_borel_sum(numeric, mo, [x, eps], math.pi)
print(f"Borel sum along theta = pi: {res.value[0].real:.15f}")
print(f"closed form z e^z E1(z):    {exact:.15f}")
print(f"difference {abs(res.value[0] - exact):.1e}, quadrature estimate {res.quadrature_error_estimate:.1e}")

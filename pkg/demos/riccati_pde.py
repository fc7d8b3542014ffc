"""A nonlinear example: eps x^2 y' = y - x + y^2.

The sum is checked against the equation itself with a centred finite
difference. No closed form is needed.
"""

import math
from pathlib import Path

from monoborel import PdeProblem, ce_residual_formal, formal_solve, monomial_borel_sum

HERE = Path(__file__).resolve().parent
problem = PdeProblem.from_json((HERE / "problems" / "riccati.json").read_text())

print("exact formal residual at T=10:",
      ce_residual_formal(problem.with_mode(True), 10))

sol = formal_solve(problem, 61).series
mo = problem.summation_order()


def y(x, eps):
    return monomial_borel_sum(sol, mo, [x, eps], math.pi, tol=1e-13).value[0]


h = 1e-4
for x, eps in [(0.1, -0.5), (0.15, -0.4), (0.1, -1.0)]:
    v = y(x, eps)
    dy = (y(x + h, eps) - y(x - h, eps)) / (2 * h)
    res = eps * x * x * dy - (v - x + v * v)
    print(f"(x, eps) = ({x}, {eps}): y = {v.real:.12f}, residual {abs(res):.1e}")

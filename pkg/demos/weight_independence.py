"""The Borel sum does not depend on the weight vector s.

Different weights move the Laplace integral onto different curves in
(xi_1, xi_2)-space. The Borel transforms differ term by term, the sums agree.
"""

import math
from fractions import Fraction as F

import numpy as np

from monoborel import MonomialOrder, formal_borel, monomial_borel_sum, split_summand
from monoborel.pde import PdeProblem, formal_solve

euler = PdeProblem.from_dict({
    "n": 1, "m": 1, "N": 1, "alpha": [1], "alpha_prime": [1], "mu": [1],
    "G": {"terms": [{"x": [0], "eps": [0], "y": [1], "coef": [[1, 0]]},
                    {"x": [1], "eps": [0], "y": [0], "coef": [[-1, 0]]}]}})
sol = formal_solve(euler, 41).series

orders = {s: MonomialOrder((1, 1), 1, s) for s in [(F(1, 2), F(1, 2)), (F(1, 3), F(2, 3)), (F(4, 5), F(1, 5))]}

_, tail = split_summand(sol, next(iter(orders.values())))
print("Borel coefficient of x^3 eps^2 under each weight:")
for s, mo in orders.items():
    print(f"  s = ({s[0]}, {s[1]}): {formal_borel(tail, mo).body.coef((3, 2)).real:.6f}")

points = [(1.0, -0.1), (0.5, -0.3), (np.exp(0.3j), -0.15 * np.exp(-0.3j))]
print("\nsums at theta = pi:")
for x in points:
    vals = [monomial_borel_sum(sol, mo, x, math.pi).value[0] for mo in orders.values()]
    spread = max(abs(v - vals[0]) for v in vals)
    print(f"  x = {np.round(x, 3)}: {np.round(vals[0], 12)}  spread {spread:.1e}")

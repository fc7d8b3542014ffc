"""Monomial Borel-Laplace summation of divergent multivariate power series."""

from .borel import (BorelSeries, borel_blowup_commute_check, convolve, formal_borel,
                    formal_laplace, laplace_blowup_commute_check, split_summand)
from .errors import (ExactModeError, InputError, MonoBorelError, NonConvergenceError,
                     SingularB0Error, SingularDirectionError)
from .exact import GammaRational
from .gamma import GammaKernel, gamma_exact
from .monomial import (GevreyFit, MonomialOrder, approximate, factorial_shell_bounds,
                       gevrey_fit, t_decompose)
from .pde import (FormalSolution, PdeProblem, ce_residual_formal, companion_system, formal_solve,
                  nagumo_checks, nagumo_norm, normalize, pde_residual, singular_directions, solve_y0)
from .series import TruncatedSeries, reassemble
from .summation import (M0, C_mu_rho, I_of_s, PuiseuxSeries, SumResult, exp_growth_fit,
                        laplace_quadrature, monomial_borel_sum, norm_mu, pade_continue, ray_restrict)

__version__ = "0.1.0"

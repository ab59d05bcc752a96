"""Optimal partitions of the unit interval for Sturm-Liouville eigenvalue costs.

Compute first Dirichlet eigenvalues of -(p u')' + q u = lambda w u on
subintervals, minimize the n-interval partition cost
(1/n) sum phi(n / lambda(I_j)^(1/2)), and check the large-n predictions:
the optimal interval density s/int s with s = sqrt(w/p), the limiting
cost phi((1/pi) int s), and recovery-sequence convergence.
"""

from .coefficients import CoefficientSet, coefficients_from_config
from .expressions import CoeffExpr, ParseError, PiecewiseTable, parse_expr
from .gamma import (
    PiecewiseConstMeasure,
    F_infinity,
    f_infinity,
    limit_cost,
    recovery_partition,
    verify_recovery,
)
from .optimizer import Optimum, OptimizerConfig, brute_force, optimize
from .partition import (
    MeasureRepr,
    Partition,
    cost_Fn,
    empirical_measure,
    portion_count,
    wasserstein1,
)
from .phi import ConvexFn, custom, heat, phi_from_config, power, power_inverse, shifted
from .sl_solver import (
    EigenResult,
    Interval,
    SolverError,
    closed_form_eigenvalue,
    first_eigenvalue,
    global_bounds,
    local_lower_bound,
    local_upper_bound,
    shrinkage_limit_check,
)

__version__ = "0.1.0"

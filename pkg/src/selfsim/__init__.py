"""Sign-changing self-similar solutions of the mixed-type equation u u_x = u_yy.

The profile ``f`` solves ``f'' + A f f' eta - B f^2 = 0``; for ``A = 1, B = 0``
and ``f(0) < 0 < f'(0)`` it rises through zero once and levels off at a
positive limit, giving ``u(x, y) = 2 f(y / sqrt(x))``.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (DomainError, IntegrationError, InvariantViolation, ParameterError,
                     PoleError, SelfSimError, StepLimitError, StepUnderflowError)
from .integrator import (AsymptoteEstimate, CrossingEvent, SolveConfig, Trajectory,
                         dense_eval, find_asymptote, find_crossing, integrate)
from .ode_core import (Params, State, closed_form_B1, linear_solution_residual, rhs,
                       rescale_to_unit_A)
from .similarity_field import (ScalingPair, SimilarityProfile, boundary_trace,
                               build_profile, contour_eta, eval_u, eval_u_derivatives,
                               pde_residual, recover_scaling)
from .verification import (EnergyReport, Rectangle, Report, check_asymptote,
                           check_crossing_bounds, energy_balance,
                           second_quadrant_slope_check, verify_all)

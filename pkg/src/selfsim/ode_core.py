"""Similarity ODE  f'' + A f f' eta - B f^2 = 0  as a first-order system.

With ``g = f'`` the system reads ``f' = g``, ``g' = -A f g eta + B f^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError, PoleError


@dataclass(frozen=True)
class Params:
    """Coefficients ``A`` (transport term) and ``B`` (reaction term)."""

    A: float = 1.0
    B: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.B)):
            raise ParameterError(f"coefficients must be finite, got A={self.A}, B={self.B}")


@dataclass(frozen=True)
class State:
    """Point ``(eta, f, g)`` on a trajectory, with ``g = f'``."""

    eta: float
    f: float
    g: float


def rhs(state: State, params: Params) -> tuple[float, float]:
    """Right-hand side ``(f', g')`` of the first-order system."""
    f, g, eta = state.f, state.g, state.eta
    return g, -params.A * f * g * eta + params.B * f * f


def rescale_to_unit_A(state: State, params: Params) -> tuple[State, Params]:
    """Map a state of the ``A > 0, B = 0`` system onto the ``A = 1`` system.

    If ``(f, g)`` solves the system with coefficient ``A``, then ``(A f, A g)``
    solves it with coefficient 1 on the same ``eta`` axis.
    """
    if not params.A > 0:
        raise ParameterError(f"rescaling needs A > 0, got A={params.A}")
    if params.B != 0:
        raise ParameterError(f"rescaling is only valid for B = 0, got B={params.B}")
    A = params.A
    return State(state.eta, A * state.f, A * state.g), Params(1.0, 0.0)


def closed_form_B1(eta: float, C2: float) -> tuple[float, float]:
    """Closed-form solution ``6/(eta - C2)^2`` of ``f'' = f^2`` (``A=0, B=1``).

    Returns the value and the analytic residual ``f'' - f^2``. The branch
    ``eta < C2`` has ``f' > 0``.
    """
    d = eta - C2
    if d == 0:
        raise PoleError(f"closed form has a pole at eta = C2 = {C2}")
    d2 = d * d
    f = 6.0 / d2
    fpp = 36.0 / (d2 * d2)
    return f, fpp - f * f


def linear_solution_residual(eta: float, alpha: float) -> float:
    """Residual of ``f(eta) = eta`` in ``f'' + (alpha^3/3)(f f' eta - f^2) = 0``.

    The coefficient pair ``A = B = alpha^3/3`` comes from ``lambda = delta =
    alpha x^(1/3)``; ``alpha = 0`` is the constant-scaling case ``f'' = 0``.
    """
    f, fp, fpp = eta, 1.0, 0.0
    coef = alpha ** 3 / 3.0
    return fpp + coef * f * fp * eta - coef * f * f

"""Self-similar field ``u(x, y) = lambda * f(y / delta(x))``.

For the solved case ``A = 1, B = 0`` the scaling constraints
``lambda delta delta' = 1`` and ``lambda' delta^2 = 0`` give a constant
``lambda = c1`` and ``delta(x)^2 = (2/c1) x + c2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .integrator import (AsymptoteEstimate, CrossingEvent, SolveConfig, Trajectory,
                         find_asymptote, locate_crossing)
from .ode_core import Params, State


@dataclass(frozen=True)
class ScalingPair:
    """``lambda(x) = c1`` and ``delta(x) = sqrt((2/c1) x + c2)``."""

    c1: float = 2.0
    c2: float = 0.0

    @property
    def lambda_const(self) -> float:
        return self.c1

    def delta_sq(self, x):
        return (2.0 / self.c1) * np.asarray(x, dtype=float) + self.c2

    def delta(self, x):
        return np.sqrt(self.delta_sq(x))

    def ddelta(self, x):
        return (1.0 / self.c1) / self.delta(x)


def recover_scaling(A: float = 1.0, B: float = 0.0, c1: float = 2.0,
                    c2: float = 0.0) -> ScalingPair:
    if A != 1 or B != 0:
        raise ParameterError(f"scaling is only solved for A=1, B=0, got A={A}, B={B}")
    if c1 == 0:
        raise ParameterError("c1 must be nonzero")
    return ScalingPair(c1=float(c1), c2=float(c2))


@dataclass(frozen=True, eq=False)
class SimilarityProfile:
    """Solved profile ``f`` with everything needed to evaluate ``u``.

    Beyond ``asym.eta_stop`` the profile follows the Gaussian tail model
    ``g = g_s exp(-f_s (eta^2 - eta_s^2) / 2)``, ``f = a - g / (f_s eta)``;
    beyond ``eta_max`` it is the constant ``a``.
    """

    traj: Trajectory
    crossing: CrossingEvent
    asym: AsymptoteEstimate
    scaling: ScalingPair
    eta_max: float = 1e3

    @property
    def eta0(self) -> float:
        return self.crossing.T1

    @property
    def a0(self) -> float:
        return float(self.traj.f[0])

    @property
    def a1(self) -> float:
        return float(self.traj.g[0])

    @property
    def A(self) -> float:
        return self.traj.params.A

    def profile(self, eta):
        """``(f, f', f'')`` at ``eta >= 0``; ``f''`` comes from the ODE."""
        eta = np.asarray(eta, dtype=float)
        f = np.empty(eta.shape)
        g = np.empty(eta.shape)
        inside = eta <= self.asym.eta_stop
        if np.any(inside):
            f[inside], g[inside] = self.traj.evaluate(eta[inside])
        outside = ~inside
        if np.any(outside):
            e = eta[outside]
            f_s, g_s, eta_s = self.asym.f_stop, self.asym.residual_g, self.asym.eta_stop
            gt = np.where(e > self.eta_max, 0.0,
                          g_s * np.exp(-self.A * f_s * (e * e - eta_s * eta_s) / 2.0))
            g[outside] = gt
            f[outside] = self.asym.a - gt / (self.A * f_s * e)
        fpp = -self.A * f * g * eta
        return f, g, fpp


def build_profile(a0: float, a1: float,
                  config: SolveConfig | None = None,
                  scaling: ScalingPair | None = None,
                  eta_max: float = 1e3) -> SimilarityProfile:
    """Solve the profile ODE from ``f(0)=a0, f'(0)=a1`` and wrap it for field use."""
    config = config or SolveConfig()
    scaling = scaling or recover_scaling()
    asym, traj = find_asymptote(State(0.0, a0, a1), Params(1.0, 0.0), config)
    crossing = locate_crossing(traj, config.abs_tol)
    return SimilarityProfile(traj, crossing, asym, scaling, eta_max)


def _check_domain(profile, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(x > 0)) or np.any(~(y >= 0)):
        raise DomainError("u is defined on x > 0, y >= 0 only")
    if np.any(~(profile.scaling.delta_sq(x) > 0)):
        raise DomainError("delta(x)^2 = (2/c1) x + c2 must be positive")
    return np.broadcast_arrays(x, y)


def similarity_variable(profile: SimilarityProfile, x, y):
    """``eta = y / delta(x)``."""
    x, y = _check_domain(profile, x, y)
    return y / profile.scaling.delta(x)


def eval_u(profile: SimilarityProfile, x, y):
    x, y = _check_domain(profile, x, y)
    eta = y / profile.scaling.delta(x)
    f, _, _ = profile.profile(eta)
    out = profile.scaling.lambda_const * f
    return float(out) if out.ndim == 0 else out


def eval_u_derivatives(profile: SimilarityProfile, x, y):
    """Return ``(u, u_x, u_y, u_yy)`` from the analytic chain rule.

    ``u_x = -lambda f' eta delta'/delta``, ``u_y = lambda f'/delta`` and
    ``u_yy = lambda f''/delta^2`` with ``f''`` taken from the ODE.
    """
    x, y = _check_domain(profile, x, y)
    lam = profile.scaling.lambda_const
    d = profile.scaling.delta(x)
    dd = profile.scaling.ddelta(x)
    eta = y / d
    f, g, fpp = profile.profile(eta)
    u = lam * f
    u_x = -lam * g * eta * dd / d
    u_y = lam * g / d
    u_yy = lam * fpp / (d * d)
    if u.ndim == 0:
        return float(u), float(u_x), float(u_y), float(u_yy)
    return u, u_x, u_y, u_yy


def pde_residual(profile: SimilarityProfile, x, y):
    """``u u_x - u_yy``; zero for the exact self-similar solution."""
    u, u_x, _, u_yy = eval_u_derivatives(profile, x, y)
    return u * u_x - u_yy


def contour_eta(profile: SimilarityProfile, level: float) -> float:
    """The ``eta_c`` with ``u = level`` along the parabola ``y = eta_c delta(x)``."""
    lam = profile.scaling.lambda_const
    lo_u, hi_u = lam * profile.a0, lam * profile.asym.a
    if not lo_u < level < hi_u:
        raise ParameterError(f"level {level} outside the range ({lo_u}, {hi_u}) of u")
    target = level / lam
    lo, hi = 0.0, profile.asym.eta_stop
    while profile.profile(np.array(hi))[0] < target:
        lo, hi = hi, 2.0 * hi
        if hi > profile.eta_max:
            raise ParameterError(f"level {level} is not reached before eta_max")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if profile.profile(np.array(mid))[0] < target:
            lo = mid
        else:
            hi = mid
    return hi


def interface_curve(profile: SimilarityProfile, x):
    """Ordinate of the zero set ``u = 0`` above ``x``."""
    return profile.eta0 * profile.scaling.delta(x)


def boundary_trace(profile: SimilarityProfile) -> float:
    """Continuous extension of ``u`` to the positive ``y`` axis, ``lambda * a``."""
    return profile.scaling.lambda_const * profile.asym.a

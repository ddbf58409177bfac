"""Adaptive Dormand-Prince integration with dense output and event location."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import (IntegrationError, InvariantViolation, ParameterError,
                     StepLimitError, StepUnderflowError)
from .ode_core import Params, State

BISECTION_ITERS = 60


@dataclass(frozen=True)
class SolveConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    h_init: float = 1e-3
    h_max: float = 0.1
    max_steps: int = 200_000
    tail_g_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_g_tol", "h_init", "h_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value}")
        if self.max_steps < 1:
            raise ParameterError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted integration nodes.

    Step ``k`` spans ``eta[k]..eta[k+1]``. Dense output is quintic Hermite per
    step from the node values ``f, g``, slopes ``g, dg`` and second slopes
    ``dg, d2g``; ``dg`` and ``d2g`` come from the ODE itself.
    """

    eta: np.ndarray
    f: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    params: Params
    config: SolveConfig
    n_rejected: int = 0
    d2g: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A, B = self.params.A, self.params.B
        # d/deta of -A f g eta + B f^2
        d2g = (-A * (self.g * self.g * self.eta + self.f * self.dg * self.eta
                     + self.f * self.g) + 2.0 * B * self.f * self.g)
        object.__setattr__(self, "d2g", d2g)
        for arr in (self.eta, self.f, self.g, self.dg, self.d2g):
            arr.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return len(self.eta) - 1

    @property
    def eta_start(self) -> float:
        return float(self.eta[0])

    @property
    def eta_end(self) -> float:
        return float(self.eta[-1])

    def evaluate(self, eta):
        """Vectorized dense output: ``(f, g)`` arrays at ``eta``."""
        q = np.asarray(eta, dtype=float)
        if q.size and (np.any(q < self.eta[0]) or np.any(q > self.eta[-1])
                       or np.any(np.isnan(q))):
            raise ParameterError(
                f"eta outside trajectory range [{self.eta_start}, {self.eta_end}]")
        return _backend.kernels.hermite_eval(self.eta, self.f, self.g, self.dg,
                                             self.d2g, q)


@dataclass(frozen=True)
class CrossingEvent:
    """First zero ``T1`` of ``f`` and the slope ``g`` there."""

    T1: float
    g_at_T1: float


@dataclass(frozen=True)
class AsymptoteEstimate:
    """Limit ``a`` of ``f`` with the stopping data used to obtain it."""

    a: float
    eta_stop: float
    tail_correction: float
    residual_g: float
    f_stop: float = field(default=math.nan)


def _check_initial(initial: State, params: Params):
    if initial.eta != 0:
        raise ParameterError(f"integration starts at eta = 0, got eta = {initial.eta}")
    if not initial.f < 0:
        raise ParameterError(f"need f(0) = a0 < 0, got a0 = {initial.f}")
    if not initial.g > 0:
        raise ParameterError(f"need f'(0) = a1 > 0, got a1 = {initial.g}")
    if not params.A > 0:
        raise ParameterError(f"need A > 0, got A = {params.A}")
    if params.B != 0:
        raise ParameterError(f"only the B = 0 case is integrated, got B = {params.B}")


def _march(initial, params, config, eta_end, g_stop):
    k = _backend.kernels
    eta, f, g, dg, status, n_rej = k.dopri_adaptive(
        params.A, params.B, initial.eta, initial.f, initial.g, eta_end,
        config.rel_tol, config.abs_tol, config.h_init, config.h_max,
        config.max_steps, g_stop)
    traj = Trajectory(eta, f, g, dg, params, config, n_rej)
    if status == k.STATUS_MAX_STEPS:
        raise StepLimitError(
            f"max_steps={config.max_steps} exhausted at eta={traj.eta_end}", traj)
    if status == k.STATUS_UNDERFLOW:
        raise StepUnderflowError(f"step size underflow at eta={traj.eta_end}", traj)
    return traj, status


def integrate(initial: State, params: Params, config: SolveConfig | None = None,
              eta_end: float = 10.0) -> Trajectory:
    """Integrate from ``initial`` to ``eta_end`` with adaptive DP5(4) steps.

    Raises
    ------
    StepLimitError
        ``config.max_steps`` accepted steps did not reach ``eta_end``.
    StepUnderflowError
        The step size fell below the representable progress in ``eta``.
    """
    config = config or SolveConfig()
    _check_initial(initial, params)
    if eta_end < 0 or not math.isfinite(eta_end):
        raise ParameterError(f"eta_end must be finite and >= 0, got {eta_end}")
    traj, _ = _march(initial, params, config, eta_end, 0.0)
    return traj


def dense_eval(traj: Trajectory, eta: float) -> State:
    f, g = traj.evaluate(np.array([eta]))
    return State(float(eta), float(f[0]), float(g[0]))


def locate_crossing(traj: Trajectory, tol: float) -> CrossingEvent:
    """Bisect the dense output on the first step where ``f`` changes sign.

    Bisection runs until the bracket collapses; a final ``|f(T1)| > tol``
    would mean the interpolant is not monotone there.
    """
    idx = np.flatnonzero(traj.f >= 0)
    if idx.size == 0:
        raise InvariantViolation(
            f"no sign change of f on [0, {traj.eta_end}]: the crossing-time bound "
            "T1 <= |a0|/a1 is violated")
    k = int(idx[0])
    if k == 0:
        raise ParameterError("f(0) must be negative")
    lo, hi = float(traj.eta[k - 1]), float(traj.eta[k])
    f_lo, f_hi = float(traj.f[k - 1]), float(traj.f[k])
    for _ in range(BISECTION_ITERS):
        if f_hi == 0:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fm = float(traj.evaluate(np.array([mid]))[0][0])
        if fm < 0:
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    root = lo if abs(f_lo) < abs(f_hi) else hi
    if min(abs(f_lo), abs(f_hi)) > tol:
        raise InvariantViolation(f"|f(T1)| = {min(abs(f_lo), abs(f_hi))} exceeds {tol}")
    _, g = traj.evaluate(np.array([root]))
    return CrossingEvent(T1=root, g_at_T1=float(g[0]))


def crossing_time_bound(initial: State) -> float:
    return abs(initial.f) / initial.g


def find_crossing(initial: State, params: Params,
                  config: SolveConfig | None = None) -> tuple[CrossingEvent, Trajectory]:
    """Locate ``T1`` where ``f`` first vanishes.

    The exact solution crosses no later than ``|a0|/a1``; integration runs
    slightly past that bound and a missing sign change is reported as an
    :class:`InvariantViolation`.
    """
    config = config or SolveConfig()
    _check_initial(initial, params)
    bound = crossing_time_bound(initial)
    traj = integrate(initial, params, config, bound * (1 + 1e-6) + 10 * config.h_max)
    event = locate_crossing(traj, config.abs_tol)
    return event, traj


def find_asymptote(initial: State, params: Params, config: SolveConfig | None = None,
                   eta_cap: float = 1e4) -> tuple[AsymptoteEstimate, Trajectory]:
    """Integrate past ``T1`` until ``g < tail_g_tol`` and extrapolate ``f(inf)``.

    Once ``f`` has settled, ``g`` decays like ``exp(-A f eta^2 / 2)``, whose
    remaining integral is at most ``g/(A f eta)``. That bound is the tail
    correction added to ``f(eta_stop)``.
    """
    config = config or SolveConfig()
    _check_initial(initial, params)
    traj, status = _march(initial, params, config, eta_cap, config.tail_g_tol)
    k = _backend.kernels
    if status != k.STATUS_G_STOP:
        raise InvariantViolation(
            f"g did not fall below {config.tail_g_tol} by eta={eta_cap}; "
            "expected convergence to a point (a, 0)")
    pos = traj.f > 0
    g_pos = traj.g[pos]
    if g_pos.size > 1 and not np.all(np.diff(g_pos) < 0):
        bad = traj.eta[pos][1:][np.diff(g_pos) >= 0][0]
        raise InvariantViolation(
            f"g stopped decreasing at eta={bad} although g' = -A f g eta < 0 for f > 0")
    eta_s, f_s, g_s = traj.eta_end, float(traj.f[-1]), float(traj.g[-1])
    tail = g_s / (params.A * f_s * eta_s)
    a = f_s + tail
    if not a > 0:
        raise InvariantViolation(f"asymptote a={a} is not positive")
    est = AsymptoteEstimate(a=a, eta_stop=eta_s, tail_correction=tail,
                            residual_g=g_s, f_stop=f_s)
    return est, traj


def fixed_step_dopri(initial: State, params: Params, h: float, n_steps: int) -> State:
    """March the DP5 propagating formula with constant step (for order studies)."""
    f, g = _backend.kernels.dopri_fixed(params.A, params.B, initial.eta, initial.f,
                                        initial.g, h, n_steps)
    return State(initial.eta + n_steps * h, f, g)

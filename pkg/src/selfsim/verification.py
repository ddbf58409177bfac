"""Numerical certificates for the proven properties of the profile and the field.

Every check returns a :class:`Report` carrying the measured value, the bound
and the slack, so regressions show up as shrinking margins before they fail.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvariantViolation, ParameterError
from .integrator import AsymptoteEstimate, CrossingEvent, Trajectory, locate_crossing
from .similarity_field import (SimilarityProfile, eval_u, eval_u_derivatives,
                               pde_residual)

# d/dx (u^3) = 3 u^2 u_x
CUBE_WEIGHT = 1.0 / 3.0
ENERGY_RTOL = 1e-5
RESIDUAL_TOL = 1e-7


@dataclass(frozen=True)
class Check:
    """One inequality ``value <sense> bound`` with its outcome."""

    name: str
    value: float
    bound: float
    passed: bool
    sense: str = "<="

    @property
    def slack(self) -> float:
        if self.sense in ("<=", "<"):
            return self.bound - self.value
        return self.value - self.bound


@dataclass(frozen=True)
class Report:
    name: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            out.append(f"{status} {self.name}: {c.name} value={c.value:.17g} "
                       f"bound={c.bound:.17g} slack={c.slack:.6g}")
        return out


def _le(name, value, bound, floor=0.0):
    value, bound = float(value), float(bound)
    return Check(name, value, bound, value <= bound + floor)


def _gt(name, value, bound=0.0):
    value, bound = float(value), float(bound)
    return Check(name, value, bound, value > bound, ">")


def _ge(name, value, bound=0.0):
    value, bound = float(value), float(bound)
    return Check(name, value, bound, value >= bound, ">=")


def _admissible(a0, a1):
    if not a0 < 0 or not a1 > 0:
        raise ParameterError(f"need a0 < 0 < a1, got a0={a0}, a1={a1}")


def check_crossing_bounds(a0: float, a1: float, event: CrossingEvent,
                          A: float = 1.0, tol: float = 1e-10) -> Report:
    """``T1 <= |a0|/a1`` and ``g(T1) <= a1 + A |a0|^3 / a1``.

    ``tol`` is the event-location tolerance, admitted as slack floor.
    """
    _admissible(a0, a1)
    checks = (
        _gt("T1 > 0", event.T1),
        _le("crossing-time bound T1 <= |a0|/a1", event.T1, abs(a0) / a1, tol),
        _gt("g(T1) > 0", event.g_at_T1),
        _le("derivative bound g(T1) <= a1 + A|a0|^3/a1", event.g_at_T1,
            a1 + A * abs(a0) ** 3 / a1, tol),
    )
    return Report("crossing", checks)


def check_asymptote(a0: float, a1: float, est: AsymptoteEstimate,
                    tail_threshold: float = 1e-12) -> Report:
    """Positive finite limit, vanishing slope, negligible tail correction."""
    _admissible(a0, a1)
    checks = (
        _gt("a > 0", est.a if np.isfinite(est.a) else np.nan),
        _ge("g(eta_stop) >= 0", est.residual_g),
        Check("g(eta_stop) < tail threshold", est.residual_g, tail_threshold,
              bool(est.residual_g < tail_threshold), "<"),
        _le("tail correction <= 1e-10 a", est.tail_correction, 1e-10 * est.a),
    )
    return Report("asymptote", checks)


def second_quadrant_slope_check(traj: Trajectory, a0: float, a1: float,
                                n_samples: int = 2001, T1: float | None = None) -> Report:
    """``g'/f' = -A f eta <= A a0^2/a1`` on ``[0, T1]``."""
    _admissible(a0, a1)
    A = traj.params.A
    if T1 is None:
        T1 = locate_crossing(traj, traj.config.abs_tol).T1
    nodes = traj.eta[traj.eta <= T1]
    eta = np.union1d(np.linspace(0.0, T1, n_samples), nodes)
    f, _ = traj.evaluate(eta)
    slope = -A * f * eta
    return Report("slope", (_le("slope bound -A f eta <= A a0^2/a1 on [0, T1]",
                                slope.max(), A * a0 * a0 / a1),))


def phase_check(traj: Trajectory, n_samples: int = 4001) -> Report:
    """``f`` increasing and ``g > 0`` along the run; ``g'`` sign follows ``-f``."""
    eta = np.linspace(traj.eta_start, traj.eta_end, n_samples)
    f, g = traj.evaluate(eta)
    dg = -traj.params.A * f * g * eta
    wrong = np.where(f < 0, dg < 0, dg > 0)
    checks = (
        _gt("min node increment of f", np.min(np.diff(traj.f))),
        _gt("min g at dense samples", g.min()),
        _le("samples with sign(g') = sign(f)", wrong.sum(), 0),
    )
    return Report("phase", checks)


def field_grid(x_range=(0.1, 10.0), y_range=(0.0, 10.0), nx=100, ny=100):
    x = np.linspace(*x_range, nx)
    y = np.linspace(*y_range, ny)
    return np.meshgrid(x, y, indexing="ij")


def residual_check(profile: SimilarityProfile, tol: float = RESIDUAL_TOL, **grid) -> Report:
    X, Y = field_grid(**grid)
    r = np.abs(pde_residual(profile, X, Y))
    return Report("residual", (_le("max |u u_x - u_yy| on grid", r.max(), tol),))


def monotonicity_check(profile: SimilarityProfile, **grid) -> Report:
    """Monotonicity of ``u`` and its sign split across the interface.

    ``u_x = -lambda f' eta delta'/delta`` and ``u_y = lambda f'/delta``: with
    ``f' > 0`` the field rises in ``y`` and falls in ``x``.
    """
    X, Y = field_grid(**grid)
    u, u_x, u_y, _ = eval_u_derivatives(profile, X, Y)
    Yi = profile.eta0 * profile.scaling.delta(X)
    gap = np.abs(Y - Yi)
    off = gap > 1e-12 * np.maximum(1.0, Yi)
    wrong_sign = off & (np.sign(u) != np.sign(Y - Yi))
    checks = (
        _le("max u_x <= 0", u_x.max(), 0.0),
        _ge("min u_y >= 0", u_y.min()),
        _le("points with sign(u) != sign(y - eta0 delta(x))", wrong_sign.sum(), 0),
    )
    return Report("monotonicity", checks)


@dataclass(frozen=True)
class Rectangle:
    X1: float
    X2: float
    Y1: float
    Y2: float

    def __post_init__(self):
        if not (0 < self.X1 < self.X2 and 0 <= self.Y1 < self.Y2):
            raise ParameterError(f"need 0 < X1 < X2 and 0 <= Y1 < Y2, got {self}")

    def interface_heights(self, profile: SimilarityProfile) -> tuple[float, float]:
        """Heights where ``u = 0`` meets the left and right edges."""
        d = profile.scaling.delta(np.array([self.X1, self.X2]))
        return float(profile.eta0 * d[0]), float(profile.eta0 * d[1])

    def admissible(self, profile: SimilarityProfile) -> bool:
        ya, yb = self.interface_heights(profile)
        return self.Y1 <= ya and yb <= self.Y2


@dataclass(frozen=True)
class EnergyReport:
    """Both sides of the energy balance over a rectangle.

    ``lhs = D + w (R+ + L-)`` and ``rhs = w (R- + L+) + T + S`` with
    ``D = iint u_y^2``, ``R+-``/``L+-`` the integrals of ``|u|^3`` over the
    positive/negative parts of the right/left edges, ``T``/``S`` the
    ``u_y |u|`` integrals on the top/bottom edges and ``w = 1/3``.
    """

    lhs: float
    rhs: float
    raw_I1: float
    raw_I2: float
    quad_points: int
    terms: dict = field(default_factory=dict)

    @property
    def imbalance(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs))

    @property
    def raw_imbalance(self) -> float:
        scale = max(abs(self.raw_I1), abs(self.raw_I2))
        return abs(self.raw_I1 + self.raw_I2) / scale if scale else 0.0

    def report(self, tol: float = ENERGY_RTOL) -> Report:
        return Report("energy", (
            _le("relative imbalance |lhs-rhs|/max", self.imbalance, tol),
            _le("raw |I1+I2|/max", self.raw_imbalance, tol),
            _ge("min lhs term", min(self.terms["D"], self.terms["R+"], self.terms["L-"])),
        ))

    def lines(self) -> list[str]:
        rows = [("lhs", self.lhs), ("rhs", self.rhs), ("imbalance", self.imbalance),
                ("raw_I1", self.raw_I1), ("raw_I2", self.raw_I2),
                ("raw_imbalance", self.raw_imbalance)]
        rows += [(f"term_{k}", v) for k, v in self.terms.items()]
        out = [f"{k}={v:.17g}" for k, v in rows]
        out.append(f"quad_points={self.quad_points}")
        return out


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _nodes(a, b, n):
    """Gauss-Legendre nodes/weights on ``[a, b]``; ``a`` and ``b`` may be arrays."""
    t, w = _gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * t, half * w


def _edge_integral(profile, x, y_lo, y_hi, n, sign, label):
    """``int |u(x, y)|^3 dy`` over a piece where ``u`` has sign ``sign``."""
    y, w = _nodes(y_lo, y_hi, n)
    u = eval_u(profile, np.full(y.shape, x), y)
    if np.any(sign * u < 0):
        raise InvariantViolation(
            f"u has the wrong sign on {label}: interface height is mislocated")
    return float(np.sum(w * np.abs(u) ** 3))


def energy_balance(profile: SimilarityProfile, rect: Rectangle,
                   quad_points: int = 64) -> EnergyReport:
    """Evaluate every term of the energy identity with composite Gauss-Legendre.

    One-dimensional edge integrals are split at the interface heights where
    ``|u|^3`` has a kink; area integrals use one ``x`` panel and, per
    ``x`` node, two ``y`` panels split along the interface curve.
    """
    if quad_points < 8:
        raise ParameterError(f"quad_points must be >= 8, got {quad_points}")
    if not rect.admissible(profile):
        raise ParameterError(
            "the interface u = 0 must cross both vertical edges: need "
            "Y1 <= eta0 delta(X1) and eta0 delta(X2) <= Y2")
    n = quad_points
    ya, yb = rect.interface_heights(profile)
    X1, X2, Y1, Y2 = rect.X1, rect.X2, rect.Y1, rect.Y2

    r_neg = _edge_integral(profile, X2, Y1, yb, n, -1, "[Y1, B] of the right edge")
    r_pos = _edge_integral(profile, X2, yb, Y2, n, +1, "[B, Y2] of the right edge")
    l_neg = _edge_integral(profile, X1, Y1, ya, n, -1, "[Y1, A] of the left edge")
    l_pos = _edge_integral(profile, X1, ya, Y2, n, +1, "[A, Y2] of the left edge")

    x, wx = _nodes(X1, X2, n)
    u, _, u_y, _ = eval_u_derivatives(profile, x, np.full(x.shape, Y2))
    if np.any(u < 0):
        raise InvariantViolation("u < 0 on the top edge: interface height is mislocated")
    top = float(np.sum(wx * u_y * np.abs(u)))
    u, _, u_y, _ = eval_u_derivatives(profile, x, np.full(x.shape, Y1))
    if np.any(u > 0):
        raise InvariantViolation("u > 0 on the bottom edge: interface height is mislocated")
    bottom = float(np.sum(wx * u_y * np.abs(u)))

    yi = profile.eta0 * profile.scaling.delta(x)
    dirichlet = i1 = i2 = 0.0
    for lo, hi in ((np.full(x.shape, Y1), yi), (yi, np.full(x.shape, Y2))):
        y, wy = _nodes(lo, hi, n)
        xx = np.broadcast_to(x[:, None], y.shape)
        u, u_x, u_y, u_yy = eval_u_derivatives(profile, xx, y)
        ww = wx[:, None] * wy
        dirichlet += float(np.sum(ww * u_y * u_y))
        i1 += float(np.sum(ww * u * u * u_x))
        i2 += float(np.sum(ww * (-u_yy * u)))

    w = CUBE_WEIGHT
    lhs = dirichlet + w * (r_pos + l_neg)
    rhs = w * (r_neg + l_pos) + top + bottom
    terms = {"D": dirichlet, "R+": r_pos, "R-": r_neg, "L+": l_pos, "L-": l_neg,
             "T": top, "S": bottom}
    return EnergyReport(lhs=lhs, rhs=rhs, raw_I1=i1, raw_I2=i2,
                        quad_points=n, terms=terms)


def default_rectangle(profile: SimilarityProfile) -> Rectangle:
    """``[1, 4] x [0, 2 B]`` with ``B`` the interface height at ``x = 4``."""
    _, yb = Rectangle(1.0, 4.0, 0.0, 1.0).interface_heights(profile)
    return Rectangle(1.0, 4.0, 0.0, 2.0 * yb)


def verify_all(profile: SimilarityProfile, quad_points: int = 64) -> list[Report]:
    """Run every certificate on one profile."""
    from .integrator import find_crossing
    from .ode_core import Params, State

    a0, a1 = profile.a0, profile.a1
    event, traj = find_crossing(State(0.0, a0, a1), Params(1.0, 0.0), profile.traj.config)
    return [
        check_crossing_bounds(a0, a1, event, tol=profile.traj.config.abs_tol),
        second_quadrant_slope_check(traj, a0, a1, T1=event.T1),
        phase_check(profile.traj),
        check_asymptote(a0, a1, profile.asym, profile.traj.config.tail_g_tol),
        residual_check(profile),
        monotonicity_check(profile),
        energy_balance(profile, default_rectangle(profile), quad_points).report(),
    ]

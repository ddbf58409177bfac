import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selfsim.errors import (InvariantViolation, ParameterError, StepLimitError,
                            StepUnderflowError)
from selfsim.integrator import (SolveConfig, dense_eval, find_asymptote, find_crossing,
                                fixed_step_dopri, integrate)
from selfsim.ode_core import Params, State

from oracles import rk4_crossing, rk4_crossing_py, rk4_samples

UNIT = Params(1.0, 0.0)
admissible_a0 = st.floats(-5.0, -0.1)
admissible_a1 = st.floats(0.1, 5.0)


def test_zero_length_interval():
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=0.0)
    assert traj.n_steps == 0
    assert dense_eval(traj, 0.0) == State(0.0, -1.0, 1.0)


def test_run_to_five_is_monotone_and_matches_oracle(backend):
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=5.0)
    assert traj.eta_end == 5.0
    assert np.all(np.diff(traj.f) > 0) and np.all(traj.g > 0)
    eta, f_ref, _ = rk4_samples(-1.0, 1.0, eta_end=5.0)
    f, g = traj.evaluate(eta)
    assert np.max(np.abs(f - f_ref)) <= 1e-6
    assert np.all(g > 0)


def test_f_at_one_from_minus_two():
    traj = integrate(State(0.0, -2.0, 1.0), UNIT, eta_end=1.0)
    _, f_ref, _ = rk4_samples(-2.0, 1.0, eta_end=1.0)
    assert abs(traj.f[-1] - f_ref[-1]) <= 1e-6
    assert abs(dense_eval(traj, 1.0).f - f_ref[-1]) <= 1e-6


def test_dense_output_exact_at_nodes_and_accurate_at_midpoints():
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=10.0)
    f, g = traj.evaluate(traj.eta)
    assert np.array_equal(f, traj.f) and np.array_equal(g, traj.g)
    mids = 0.5 * (traj.eta[1:] + traj.eta[:-1])
    # RK4 oracle on the same midpoints: integrate to each one exactly is costly,
    # so interpolate a dense oracle with spacing 1e-3 at fifth order instead
    eta_ref, f_ref, g_ref = rk4_samples(-1.0, 1.0, eta_end=10.0, spacing=1e-3)
    j = np.clip(np.searchsorted(eta_ref, mids) - 1, 0, len(eta_ref) - 2)
    t = (mids - eta_ref[j]) / 1e-3
    # cubic Hermite on a 1e-3 grid contributes < 1e-13
    h00, h10 = 2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t
    h01, h11 = -2 * t**3 + 3 * t**2, t**3 - t**2
    f_mid = (h00 * f_ref[j] + h10 * 1e-3 * g_ref[j] + h01 * f_ref[j + 1]
             + h11 * 1e-3 * g_ref[j + 1])
    fm, _ = traj.evaluate(mids)
    assert np.max(np.abs(fm - f_mid)) <= 1e-6


def test_dense_eval_out_of_range():
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=1.0)
    with pytest.raises(ParameterError):
        dense_eval(traj, -1e-3)
    with pytest.raises(ParameterError):
        dense_eval(traj, 1.5)


def test_trajectory_is_immutable():
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=1.0)
    with pytest.raises(ValueError):
        traj.f[0] = 0.0


@pytest.mark.parametrize("state, params", [
    (State(0.0, 0.0, 1.0), UNIT),
    (State(0.0, -1.0, 0.0), UNIT),
    (State(0.0, 1.0, 1.0), UNIT),
    (State(0.5, -1.0, 1.0), UNIT),
    (State(0.0, -1.0, 1.0), Params(0.0, 0.0)),
    (State(0.0, -1.0, 1.0), Params(1.0, 1.0)),
])
def test_preconditions(state, params):
    with pytest.raises(ParameterError):
        integrate(state, params, eta_end=1.0)


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0.0), dict(h_max=-1.0), dict(max_steps=0),
                                    dict(tail_g_tol=float("nan"))])
def test_config_validation(kwargs):
    with pytest.raises(ParameterError):
        SolveConfig(**kwargs)


def test_step_limit_keeps_partial_trajectory():
    with pytest.raises(StepLimitError) as info:
        integrate(State(0.0, -1.0, 1.0), UNIT, SolveConfig(max_steps=5), eta_end=10.0)
    traj = info.value.trajectory
    assert traj.n_steps == 5 and 0 < traj.eta_end < 10.0


def test_step_underflow():
    with pytest.raises(StepUnderflowError) as info:
        integrate(State(0.0, -1.0, 1.0), UNIT, SolveConfig(rel_tol=1e-300, abs_tol=1e-300),
                  eta_end=1.0)
    assert info.value.trajectory.eta_end < 1.0


@pytest.mark.parametrize("a0, a1", [(-1.0, 1.0), (-2.0, 1.0)])
def test_crossing_lemma_bounds(a0, a1):
    event, traj = find_crossing(State(0.0, a0, a1), UNIT)
    assert 0 < event.T1 <= abs(a0) / a1
    assert 0 < event.g_at_T1 <= a1 + abs(a0) ** 3 / a1
    assert traj.eta_end >= event.T1


def test_crossing_matches_oracle(backend):
    event, traj = find_crossing(State(0.0, -1.0, 1.0), UNIT)
    assert abs(event.T1 - rk4_crossing(-1.0, 1.0)) <= 1e-5
    assert abs(event.T1 - rk4_crossing_py(-1.0, 1.0)) <= 1e-6
    assert abs(dense_eval(traj, event.T1).f) <= 1e-10


def test_asymptote(backend):
    est, traj = find_asymptote(State(0.0, -1.0, 1.0), UNIT)
    assert 0 < est.a < np.inf
    assert 0 <= est.residual_g < 1e-12
    assert est.a >= traj.f[-1] and est.tail_correction >= 0
    _, f_ref, _ = rk4_samples(-1.0, 1.0, eta_end=20.0, spacing=20.0)
    assert abs(est.a - f_ref[-1]) <= 1e-6
    event, _ = find_crossing(State(0.0, -1.0, 1.0), UNIT)
    after = traj.eta > event.T1
    assert np.all(np.diff(traj.g[after]) < 0)


def test_asymptote_reports_stall():
    with pytest.raises(InvariantViolation):
        find_asymptote(State(0.0, -1.0, 1.0), UNIT, eta_cap=2.0)


@settings(max_examples=40, deadline=None)
@given(a0=admissible_a0, a1=admissible_a1)
def test_bound_suite(a0, a1):
    event, traj = find_crossing(State(0.0, a0, a1), UNIT)
    assert event.T1 * a1 <= abs(a0) + 1e-10
    pre = traj.eta <= event.T1
    gmax = max(traj.g[pre].max(), event.g_at_T1)
    assert gmax <= a1 + abs(a0) ** 3 / a1
    eta = np.linspace(0, event.T1, 200)
    f, _ = traj.evaluate(eta)
    assert np.max(-f * eta) <= a0 ** 2 / a1


@settings(max_examples=25, deadline=None)
@given(a0=admissible_a0, a1=admissible_a1)
def test_phase_discipline(a0, a1):
    est, traj = find_asymptote(State(0.0, a0, a1), UNIT)
    eta = np.linspace(0, traj.eta_end, 3000)
    f, g = traj.evaluate(eta)
    dg = -f * g * eta
    assert np.all(g > 0)
    assert np.all(dg[f < 0] >= 0) and np.all(dg[f > 0] <= 0)
    assert np.all(np.diff(traj.f) > 0)
    # every step starting in the second quadrant keeps g > 0 inside
    starts = np.flatnonzero((traj.f[:-1] < 0) & (traj.g[:-1] > 0))
    inner = (traj.eta[starts, None]
             + np.linspace(0, 1, 9) * (traj.eta[starts + 1] - traj.eta[starts])[:, None])
    assert np.all(traj.evaluate(inner.ravel())[1] > 0)


@settings(max_examples=15, deadline=None)
@given(a0=admissible_a0, a1=admissible_a1, k=st.sampled_from([0.5, 2.0, 3.0]))
def test_rescaling_invariance(a0, a1, k):
    cfg = SolveConfig()
    t_k = integrate(State(0.0, a0, a1), Params(k, 0.0), cfg, eta_end=6.0)
    t_1 = integrate(State(0.0, k * a0, k * a1), UNIT, cfg, eta_end=6.0)
    eta = np.linspace(0, 6.0, 601)
    f_k, _ = t_k.evaluate(eta)
    f_1, _ = t_1.evaluate(eta)
    scale = max(1.0, np.max(np.abs(f_1)))
    assert np.max(np.abs(k * f_k - f_1)) <= 10 * cfg.rel_tol * scale


@pytest.mark.parametrize("eta_end", [30.0, 80.0])
def test_no_finite_time_blow_up(eta_end):
    traj = integrate(State(0.0, -1.0, 1.0), UNIT, eta_end=eta_end)
    assert traj.eta_end == eta_end
    # g decays like exp(-a eta^2/2) into the subnormal range
    assert np.all(traj.g > -1e-300) and np.all(np.isfinite(traj.f))
    assert np.all(np.diff(traj.f) >= 0)


def test_fixed_step_order_against_oracle():
    _, f_ref, _ = rk4_samples(-1.0, 1.0, eta_end=2.0, spacing=2.0)
    hs = np.array([0.1, 0.05, 0.025])
    errs = [abs(fixed_step_dopri(State(0.0, -1.0, 1.0), UNIT, h, round(2 / h)).f - f_ref[-1])
            for h in hs]
    order = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert abs(order - 5.0) <= 0.5


def test_adaptive_error_tracks_tolerance():
    _, f_ref, _ = rk4_samples(-1.0, 1.0, eta_end=2.0, spacing=2.0)
    errs = []
    for tol in (1e-6, 1e-8, 1e-10):
        traj = integrate(State(0.0, -1.0, 1.0), UNIT,
                         SolveConfig(rel_tol=tol, abs_tol=tol, h_max=1.0), eta_end=2.0)
        errs.append(abs(traj.f[-1] - f_ref[-1]))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-9

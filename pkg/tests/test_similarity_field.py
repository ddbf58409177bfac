import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selfsim.errors import DomainError, ParameterError
from selfsim.integrator import dense_eval
from selfsim.similarity_field import (boundary_trace, build_profile, contour_eta, eval_u,
                                      eval_u_derivatives, interface_curve, pde_residual,
                                      recover_scaling, similarity_variable)

xs = st.floats(0.05, 10.0)
ys = st.floats(0.0, 10.0)


def test_default_scaling():
    s = recover_scaling(1.0, 0.0, 2.0, 0.0)
    assert s.lambda_const == 2.0
    x = np.linspace(0.01, 10, 101)
    np.testing.assert_allclose(s.delta(x), np.sqrt(x), rtol=1e-15)


@pytest.mark.parametrize("c1, c2", [(2.0, 0.0), (2.0, 1.0), (0.5, 3.0), (-1.0, 30.0)])
def test_constraint_identities(c1, c2):
    s = recover_scaling(1.0, 0.0, c1, c2)
    x = np.linspace(0.1, 10.0, 200)
    np.testing.assert_allclose(s.lambda_const * s.delta(x) * s.ddelta(x), 1.0, atol=1e-12)
    # lambda is constant, so lambda' delta^2 = 0 identically


def test_shifted_scaling_example():
    s = recover_scaling(1.0, 0.0, 2.0, 1.0)
    assert s.delta(3.0) == pytest.approx(2.0)


@pytest.mark.parametrize("args", [(1.0, 1.0, 2.0, 0.0), (2.0, 0.0, 2.0, 0.0),
                                  (1.0, 0.0, 0.0, 0.0)])
def test_scaling_rejects(args):
    with pytest.raises(ParameterError):
        recover_scaling(*args)


def test_u_examples(profile):
    assert eval_u(profile, 1.0, 0.0) == -2.0
    for x in (0.5, 1.0, 4.0):
        assert abs(eval_u(profile, x, profile.eta0 * np.sqrt(x))) <= 1e-10
    for y in (0.1, 0.9, 3.3):
        assert eval_u(profile, 4.0, 2 * y) == pytest.approx(eval_u(profile, 1.0, y), abs=1e-15)


def test_scaling_domain():
    p = build_profile(-1.0, 1.0, scaling=recover_scaling(1.0, 0.0, -1.0, 4.0))
    assert np.isfinite(eval_u(p, 1.0, 1.0))
    with pytest.raises(DomainError):
        eval_u(p, 3.0, 1.0)


def test_domain_errors(profile):
    for x, y in ((0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)):
        with pytest.raises(DomainError):
            eval_u(profile, x, y)
        with pytest.raises(DomainError):
            eval_u_derivatives(profile, x, y)
        with pytest.raises(DomainError):
            pde_residual(profile, x, y)


def test_derivatives_match_finite_differences(profile):
    rng = np.random.default_rng(3)
    x = rng.uniform(0.3, 5.0, 200)
    y = rng.uniform(0.05, 4.0, 200)
    h = 1e-5
    u, u_x, u_y, u_yy = eval_u_derivatives(profile, x, y)
    fd_x = (eval_u(profile, x + h, y) - eval_u(profile, x - h, y)) / (2 * h)
    fd_y = (eval_u(profile, x, y + h) - eval_u(profile, x, y - h)) / (2 * h)
    hy = 1e-4
    fd_yy = (eval_u(profile, x, y + hy) - 2 * u + eval_u(profile, x, y - hy)) / hy ** 2
    np.testing.assert_allclose(u_x, fd_x, atol=1e-6)
    np.testing.assert_allclose(u_y, fd_y, atol=1e-6)
    np.testing.assert_allclose(u_yy, fd_yy, atol=1e-4)


def test_derivative_signs(profile):
    # f' > 0: u rises with y and, since eta = y/sqrt(x) falls with x, u_x <= 0
    rng = np.random.default_rng(11)
    x = rng.uniform(1e-3, 10.0, 1000)
    y = rng.uniform(0.0, 10.0, 1000)
    _, u_x, u_y, _ = eval_u_derivatives(profile, x, y)
    assert np.all(u_y >= 0)
    assert np.all(u_x <= 0)


def test_derivatives_on_axis(profile):
    u, u_x, u_y, u_yy = eval_u_derivatives(profile, 1.0, 0.0)
    assert u_x == 0.0 and u_yy == 0.0
    assert u_y == 2.0 * profile.a1
    for x in (0.2, 3.0, 9.0):
        assert pde_residual(profile, x, 0.0) == 0.0


def test_residual(profile):
    assert abs(pde_residual(profile, 1.0, 1.0)) <= 1e-8
    X, Y = np.meshgrid(np.linspace(0.1, 10, 100), np.linspace(0, 10, 100), indexing="ij")
    assert np.max(np.abs(pde_residual(profile, X, Y))) <= 1e-7


@pytest.mark.parametrize("c1, c2", [(2.0, 1.0), (1.0, 0.0)])
def test_residual_for_other_scalings(c1, c2):
    p = build_profile(-1.0, 1.0, scaling=recover_scaling(1.0, 0.0, c1, c2))
    X, Y = np.meshgrid(np.linspace(0.1, 5, 40), np.linspace(0, 5, 40), indexing="ij")
    assert np.max(np.abs(pde_residual(p, X, Y))) <= 1e-7


def test_contours(profile):
    assert contour_eta(profile, 0.0) == pytest.approx(profile.eta0, abs=1e-12)
    assert contour_eta(profile, 2 * profile.a0 + 1e-9) < 1e-6
    f1 = dense_eval(profile.traj, 1.0).f
    assert contour_eta(profile, 2 * f1) == pytest.approx(1.0, abs=1e-10)
    # level in the Gaussian tail beyond the integrated range
    level = 2 * profile.asym.a - 1e-14
    assert contour_eta(profile, level) > 3.0
    for bad in (2 * profile.a0, 2 * profile.asym.a, 10.0):
        with pytest.raises(ParameterError):
            contour_eta(profile, bad)


def test_level_sets_are_parabolas(profile):
    eta_c = contour_eta(profile, 0.7)
    x = np.linspace(0.1, 4.0, 30)
    np.testing.assert_allclose(eval_u(profile, x, eta_c * np.sqrt(x)), 0.7, atol=1e-10)


def test_boundary_trace(profile):
    trace = boundary_trace(profile)
    assert trace == 2 * profile.asym.a and trace > 0
    values = [eval_u(profile, x, 1.0) for x in (1e-2, 1e-4, 1e-6)]
    gaps = [trace - v for v in values]
    assert all(g >= 0 for g in gaps)
    assert values[0] <= values[1] <= values[2]
    assert gaps[-1] <= 1e-6


def test_tail_model_is_continuous(profile):
    s = profile.asym.eta_stop
    f_in, g_in, _ = profile.profile(np.array([s]))
    f_out, g_out, _ = profile.profile(np.array([s * (1 + 1e-12)]))
    assert abs(f_out[0] - f_in[0]) < 1e-13 and abs(g_out[0] - g_in[0]) < 1e-13
    f_far, g_far, _ = profile.profile(np.array([2 * profile.eta_max]))
    assert f_far[0] == profile.asym.a and g_far[0] == 0.0


@settings(max_examples=100, deadline=None)
@given(x=xs, y=ys, k=st.floats(0.2, 5.0))
def test_self_similarity(profile, x, y, k):
    assert eval_u(profile, k * k * x, k * y) == pytest.approx(eval_u(profile, x, y),
                                                              abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(x=xs, y=ys)
def test_sign_structure(profile, x, y):
    yi = float(interface_curve(profile, x))
    u = eval_u(profile, x, y)
    if y < yi * (1 - 1e-9):
        assert u < 0
    elif y > yi * (1 + 1e-9):
        assert u > 0


def test_similarity_variable(profile):
    assert similarity_variable(profile, 4.0, 2.0) == 1.0

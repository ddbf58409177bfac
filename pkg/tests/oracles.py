"""Independent reference solutions used as test oracles.

The fixed-step classical RK4 march shares no code with the adaptive
Dormand-Prince path; only its inner loop is compiled for speed.
"""
from functools import lru_cache

import numpy as np

from selfsim import _backend

H_ORACLE = 1e-5


def _k():
    # always the fastest available kernel; RK4 is not the path under test
    return _backend.load(_backend.available()[0])


@lru_cache(maxsize=None)
def rk4_samples(a0, a1, A=1.0, eta_end=10.0, spacing=0.01, h=H_ORACLE):
    """RK4 samples ``(eta, f, g)`` every ``spacing`` on ``[0, eta_end]``."""
    stride = round(spacing / h)
    n = round(eta_end / h)
    eta, f, g = _k().rk4_samples(A, 0.0, 0.0, a0, a1, h, n, stride)
    for arr in (eta, f, g):
        arr.setflags(write=False)
    return eta, f, g


@lru_cache(maxsize=None)
def rk4_crossing(a0, a1, A=1.0, h=H_ORACLE):
    """``T1`` by RK4 bracketing at step ``h``, refined by bisecting a sub-step."""
    k = _k()
    n, f, g = k.rk4_sign_change(A, 0.0, 0.0, a0, a1, h, 10 ** 9)
    assert n >= 0
    eta = n * h
    lo, hi = 0.0, h
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm, _ = k.rk4_step(A, 0.0, eta, f, g, mid)
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return eta + 0.5 * (lo + hi)


def rk4_crossing_py(a0, a1, h=1e-3):
    """Plain-Python RK4 crossing time for a quick cross-check at coarse ``h``."""
    def dg(eta, f, g):
        return -f * g * eta

    eta, f, g = 0.0, a0, a1
    while True:
        k1 = (g, dg(eta, f, g))
        k2 = (g + h / 2 * k1[1], dg(eta + h / 2, f + h / 2 * k1[0], g + h / 2 * k1[1]))
        k3 = (g + h / 2 * k2[1], dg(eta + h / 2, f + h / 2 * k2[0], g + h / 2 * k2[1]))
        k4 = (g + h * k3[1], dg(eta + h, f + h * k3[0], g + h * k3[1]))
        fn = f + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        gn = g + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if fn >= 0:
            # linear interpolation is enough at this resolution
            return eta + h * (-f) / (fn - f)
        eta, f, g = eta + h, fn, gn


def closed_form_B1_solution(eta, C2):
    """Exact ``(f, f')`` of ``f'' = f^2`` on the branch ``eta < C2``."""
    d = np.asarray(eta, dtype=float) - C2
    return 6.0 / d ** 2, -12.0 / d ** 3

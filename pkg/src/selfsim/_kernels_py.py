"""Pure-Python numerical kernels.

Reference fallback for the compiled ``_kernels`` extension. Both modules expose
the same functions with the same signatures and arithmetic order, so either
can back the integrator.
"""
import math

import numpy as np

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

SAFETY = 0.9
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA
FAC_MIN = 0.2
FAC_MAX = 10.0
# DP5 real-axis stability reaches about -3.3; keep h*A*|f|*eta below this
STAB_LIMIT = 2.5

STATUS_DONE = 0
STATUS_MAX_STEPS = 1
STATUS_UNDERFLOW = 2
STATUS_G_STOP = 3


def _dg(A, B, eta, f, g):
    return -A * f * g * eta + B * f * f


def dopri_step(A, B, eta, f, g, dg0, h):
    """One Dormand-Prince step. Returns (f5, g5, dg_new, err_f, err_g)."""
    k1f = g
    k1g = dg0
    f2 = f + h * (A21 * k1f)
    g2 = g + h * (A21 * k1g)
    k2f = g2
    k2g = _dg(A, B, eta + C2 * h, f2, g2)
    f3 = f + h * (A31 * k1f + A32 * k2f)
    g3 = g + h * (A31 * k1g + A32 * k2g)
    k3f = g3
    k3g = _dg(A, B, eta + C3 * h, f3, g3)
    f4 = f + h * (A41 * k1f + A42 * k2f + A43 * k3f)
    g4 = g + h * (A41 * k1g + A42 * k2g + A43 * k3g)
    k4f = g4
    k4g = _dg(A, B, eta + C4 * h, f4, g4)
    f5 = f + h * (A51 * k1f + A52 * k2f + A53 * k3f + A54 * k4f)
    g5 = g + h * (A51 * k1g + A52 * k2g + A53 * k3g + A54 * k4g)
    k5f = g5
    k5g = _dg(A, B, eta + C5 * h, f5, g5)
    f6 = f + h * (A61 * k1f + A62 * k2f + A63 * k3f + A64 * k4f + A65 * k5f)
    g6 = g + h * (A61 * k1g + A62 * k2g + A63 * k3g + A64 * k4g + A65 * k5g)
    k6f = g6
    k6g = _dg(A, B, eta + h, f6, g6)
    fn = f + h * (B1 * k1f + B3 * k3f + B4 * k4f + B5 * k5f + B6 * k6f)
    gn = g + h * (B1 * k1g + B3 * k3g + B4 * k4g + B5 * k5g + B6 * k6g)
    k7f = gn
    k7g = _dg(A, B, eta + h, fn, gn)
    ef = h * (E1 * k1f + E3 * k3f + E4 * k4f + E5 * k5f + E6 * k6f + E7 * k7f)
    eg = h * (E1 * k1g + E3 * k3g + E4 * k4g + E5 * k5g + E6 * k6g + E7 * k7g)
    return fn, gn, k7g, ef, eg


def dopri_adaptive(A, B, eta0, f0, g0, eta_end, rtol, atol, h_init, h_max,
                   max_steps, g_stop):
    """Adaptive DP5(4) march with PI step control.

    Integration ends at ``eta_end``, after ``max_steps`` accepted steps, on
    step underflow, or (when ``g_stop > 0``) at the first accepted node with
    ``f > 0`` and ``0 <= g < g_stop``.

    Returns ``(eta, f, g, dg, status, n_rejected)`` where the first four are
    float arrays of accepted nodes including the initial one.
    """
    etas = [eta0]
    fs = [f0]
    gs = [g0]
    dgs = [_dg(A, B, eta0, f0, g0)]
    status = STATUS_DONE
    n_rej = 0
    if eta_end <= eta0:
        return (np.array(etas), np.array(fs), np.array(gs), np.array(dgs),
                status, n_rej)
    eta, f, g, dg0 = eta0, f0, g0, dgs[0]
    h = min(h_init, h_max)
    fac_old = 1e-4
    n_acc = 0
    while True:
        if n_acc >= max_steps:
            status = STATUS_MAX_STEPS
            break
        stiff = A * abs(f) * (eta + h)
        if stiff * h > STAB_LIMIT:
            h = STAB_LIMIT / stiff
        last = False
        if eta + h >= eta_end:
            h = eta_end - eta
            last = True
        if h <= 16.0 * 2.220446049250313e-16 * max(abs(eta), 1.0):
            status = STATUS_UNDERFLOW
            break
        fn, gn, dgn, ef, eg = dopri_step(A, B, eta, f, g, dg0, h)
        sf = atol + rtol * max(abs(f), abs(fn))
        sg = atol + rtol * max(abs(g), abs(gn))
        err = math.sqrt(0.5 * ((ef / sf) ** 2 + (eg / sg) ** 2))
        fac11 = err ** EXPO if err > 0.0 else 0.0
        if err <= 1.0:
            fac = fac11 / fac_old ** BETA
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFETY))
            fac_old = max(err, 1e-4)
            eta = eta_end if last else eta + h
            f, g, dg0 = fn, gn, dgn
            etas.append(eta)
            fs.append(f)
            gs.append(g)
            dgs.append(dg0)
            n_acc += 1
            if last:
                break
            if g_stop > 0.0 and f > 0.0 and 0.0 <= g < g_stop:
                status = STATUS_G_STOP
                break
            h = min(h / fac, h_max)
        else:
            n_rej += 1
            h = h / min(1.0 / FAC_MIN, fac11 / SAFETY)
    return (np.array(etas), np.array(fs), np.array(gs), np.array(dgs),
            status, n_rej)


def dopri_fixed(A, B, eta0, f0, g0, h, n_steps):
    """Fixed-step DP5 march (propagating solution only). Returns final (f, g)."""
    f, g = f0, g0
    dg0 = _dg(A, B, eta0, f, g)
    for k in range(n_steps):
        eta = eta0 + k * h
        f, g, dg0, _, _ = dopri_step(A, B, eta, f, g, dg0, h)
    return f, g


def rk4_step(A, B, eta, f, g, h):
    k1f = g
    k1g = _dg(A, B, eta, f, g)
    hh = 0.5 * h
    k2f = g + hh * k1g
    k2g = _dg(A, B, eta + hh, f + hh * k1f, g + hh * k1g)
    k3f = g + hh * k2g
    k3g = _dg(A, B, eta + hh, f + hh * k2f, g + hh * k2g)
    k4f = g + h * k3g
    k4g = _dg(A, B, eta + h, f + h * k3f, g + h * k3g)
    fn = f + h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
    gn = g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
    return fn, gn


def rk4_samples(A, B, eta0, f0, g0, h, n_steps, stride):
    """Classical RK4 with fixed step ``h``; records every ``stride`` steps.

    Returns ``(eta, f, g)`` arrays; sample ``j`` sits at ``eta0 + j*stride*h``.
    """
    n_out = n_steps // stride + 1
    out_eta = np.empty(n_out)
    out_f = np.empty(n_out)
    out_g = np.empty(n_out)
    out_eta[0], out_f[0], out_g[0] = eta0, f0, g0
    f, g = f0, g0
    j = 1
    for k in range(n_steps):
        f, g = rk4_step(A, B, eta0 + k * h, f, g, h)
        if (k + 1) % stride == 0:
            out_eta[j] = eta0 + (k + 1) * h
            out_f[j] = f
            out_g[j] = g
            j += 1
    return out_eta[:j], out_f[:j], out_g[:j]


def rk4_sign_change(A, B, eta0, f0, g0, h, max_steps):
    """March RK4 until ``f`` turns nonnegative.

    Returns ``(k, f, g)``: the state after ``k`` steps, the last one with
    ``f < 0``. ``k == -1`` means no sign change within ``max_steps``.
    """
    f, g = f0, g0
    for k in range(max_steps):
        fn, gn = rk4_step(A, B, eta0 + k * h, f, g, h)
        if fn >= 0.0:
            return k, f, g
        f, g = fn, gn
    return -1, f, g


def hermite_eval(eta_nodes, f_nodes, g_nodes, dg_nodes, d2g_nodes, query):
    """Piecewise quintic Hermite interpolation of (f, g) at ``query``.

    ``f`` uses first/second slopes ``(g, dg)``; ``g`` uses ``(dg, d2g)``. Query
    points must lie in ``[eta_nodes[0], eta_nodes[-1]]``.
    """
    q = np.asarray(query, dtype=float)
    n = eta_nodes.shape[0]
    if n == 1:
        return np.full(q.shape, f_nodes[0]), np.full(q.shape, g_nodes[0])
    i = np.searchsorted(eta_nodes, q, side="right") - 1
    i = np.clip(i, 0, n - 2)
    j = i + 1
    e0 = eta_nodes[i]
    h = eta_nodes[j] - e0
    t = (q - e0) / h
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    b1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    b2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
    b3 = 0.5 * (t3 - 2.0 * t4 + t5)
    b4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    b5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    hh = h * h
    # increment form (b0 + b5 = 1) keeps rounding monotone where f saturates
    f = f_nodes[i] + (b5 * (f_nodes[j] - f_nodes[i]) + b1 * h * g_nodes[i]
                      + b2 * hh * dg_nodes[i] + b3 * hh * dg_nodes[j] + b4 * h * g_nodes[j])
    g = g_nodes[i] + (b5 * (g_nodes[j] - g_nodes[i]) + b1 * h * dg_nodes[i]
                      + b2 * hh * d2g_nodes[i] + b3 * hh * d2g_nodes[j] + b4 * h * dg_nodes[j])
    return f, g

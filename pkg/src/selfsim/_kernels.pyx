# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Mirror of ``_kernels_py`` with C-typed scalars. Arithmetic order matches the
pure-Python module so the two backends agree to rounding.
"""
import numpy as np

from libc.math cimport fabs, sqrt, pow

cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double BETA = 0.04
cdef double EXPO = 0.2 - 0.75 * 0.04
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0
cdef double STAB_LIMIT = 2.5
cdef double EPS = 2.220446049250313e-16

STATUS_DONE = 0
STATUS_MAX_STEPS = 1
STATUS_UNDERFLOW = 2
STATUS_G_STOP = 3


cdef inline double _dg(double A, double B, double eta, double f, double g) nogil:
    return -A * f * g * eta + B * f * f


cdef void _dopri_step(double A, double B, double eta, double f, double g,
                      double dg0, double h, double* out) noexcept nogil:
    cdef double k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g, k5f, k5g, k6f, k6g
    cdef double k7f, k7g, f2, g2, f3, g3, f4, g4, f5, g5, f6, g6, fn, gn
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
    out[0] = fn
    out[1] = gn
    out[2] = k7g
    out[3] = h * (E1 * k1f + E3 * k3f + E4 * k4f + E5 * k5f + E6 * k6f + E7 * k7f)
    out[4] = h * (E1 * k1g + E3 * k3g + E4 * k4g + E5 * k5g + E6 * k6g + E7 * k7g)


def dopri_step(double A, double B, double eta, double f, double g, double dg0,
               double h):
    """One Dormand-Prince step. Returns (f5, g5, dg_new, err_f, err_g)."""
    cdef double out[5]
    _dopri_step(A, B, eta, f, g, dg0, h, out)
    return out[0], out[1], out[2], out[3], out[4]


def dopri_adaptive(double A, double B, double eta0, double f0, double g0,
                   double eta_end, double rtol, double atol, double h_init,
                   double h_max, long max_steps, double g_stop):
    """Adaptive DP5(4) march with PI step control; see ``_kernels_py``."""
    cdef Py_ssize_t cap = 1024, n = 1
    cdef double[:, ::1] buf = np.empty((cap, 4))
    cdef double[:, ::1] grown
    cdef double out[5]
    cdef double eta = eta0, f = f0, g = g0, dg0 = _dg(A, B, eta0, f0, g0)
    cdef double h, fac_old = 1e-4, stiff, sf, sg, err, fac11, fac
    cdef double fn, gn, dgn
    cdef long n_acc = 0, n_rej = 0
    cdef int status = 0
    cdef bint last
    buf[0, 0] = eta0
    buf[0, 1] = f0
    buf[0, 2] = g0
    buf[0, 3] = dg0
    if eta_end > eta0:
        h = min(h_init, h_max)
        while True:
            if n_acc >= max_steps:
                status = 1
                break
            stiff = A * fabs(f) * (eta + h)
            if stiff * h > STAB_LIMIT:
                h = STAB_LIMIT / stiff
            last = False
            if eta + h >= eta_end:
                h = eta_end - eta
                last = True
            if h <= 16.0 * EPS * max(fabs(eta), 1.0):
                status = 2
                break
            _dopri_step(A, B, eta, f, g, dg0, h, out)
            fn = out[0]
            gn = out[1]
            dgn = out[2]
            sf = atol + rtol * max(fabs(f), fabs(fn))
            sg = atol + rtol * max(fabs(g), fabs(gn))
            err = sqrt(0.5 * ((out[3] / sf) ** 2 + (out[4] / sg) ** 2))
            fac11 = pow(err, EXPO) if err > 0.0 else 0.0
            if err <= 1.0:
                fac = fac11 / pow(fac_old, BETA)
                fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFETY))
                fac_old = max(err, 1e-4)
                eta = eta_end if last else eta + h
                f = fn
                g = gn
                dg0 = dgn
                if n == cap:
                    grown = np.empty((2 * cap, 4))
                    grown[:cap, :] = buf
                    buf = grown
                    cap *= 2
                buf[n, 0] = eta
                buf[n, 1] = f
                buf[n, 2] = g
                buf[n, 3] = dg0
                n += 1
                n_acc += 1
                if last:
                    break
                if g_stop > 0.0 and f > 0.0 and 0.0 <= g < g_stop:
                    status = 3
                    break
                h = min(h / fac, h_max)
            else:
                n_rej += 1
                h = h / min(1.0 / FAC_MIN, fac11 / SAFETY)
    arr = np.asarray(buf[:n, :]).copy()
    return (np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]),
            np.ascontiguousarray(arr[:, 2]), np.ascontiguousarray(arr[:, 3]),
            status, n_rej)


def dopri_fixed(double A, double B, double eta0, double f0, double g0,
                double h, long n_steps):
    """Fixed-step DP5 march (propagating solution only). Returns final (f, g)."""
    cdef double out[5]
    cdef double f = f0, g = g0, dg0 = _dg(A, B, eta0, f0, g0)
    cdef long k
    for k in range(n_steps):
        _dopri_step(A, B, eta0 + k * h, f, g, dg0, h, out)
        f = out[0]
        g = out[1]
        dg0 = out[2]
    return f, g


cdef inline void _rk4_step(double A, double B, double eta, double f, double g,
                           double h, double* out) noexcept nogil:
    cdef double k1f, k1g, k2f, k2g, k3f, k3g, k4f, k4g
    cdef double hh = 0.5 * h
    k1f = g
    k1g = _dg(A, B, eta, f, g)
    k2f = g + hh * k1g
    k2g = _dg(A, B, eta + hh, f + hh * k1f, g + hh * k1g)
    k3f = g + hh * k2g
    k3g = _dg(A, B, eta + hh, f + hh * k2f, g + hh * k2g)
    k4f = g + h * k3g
    k4g = _dg(A, B, eta + h, f + h * k3f, g + h * k3g)
    out[0] = f + h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
    out[1] = g + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)


def rk4_step(double A, double B, double eta, double f, double g, double h):
    cdef double out[2]
    _rk4_step(A, B, eta, f, g, h, out)
    return out[0], out[1]


def rk4_samples(double A, double B, double eta0, double f0, double g0,
                double h, long n_steps, long stride):
    """Classical RK4 with fixed step; records every ``stride`` steps."""
    cdef Py_ssize_t n_out = n_steps // stride + 1
    out_eta_a = np.empty(n_out)
    out_f_a = np.empty(n_out)
    out_g_a = np.empty(n_out)
    cdef double[::1] out_eta = out_eta_a, out_f = out_f_a, out_g = out_g_a
    cdef double out[2]
    cdef double f = f0, g = g0
    cdef long k
    cdef Py_ssize_t j = 1
    out_eta[0] = eta0
    out_f[0] = f0
    out_g[0] = g0
    with nogil:
        for k in range(n_steps):
            _rk4_step(A, B, eta0 + k * h, f, g, h, out)
            f = out[0]
            g = out[1]
            if (k + 1) % stride == 0:
                out_eta[j] = eta0 + (k + 1) * h
                out_f[j] = f
                out_g[j] = g
                j += 1
    return out_eta_a[:j], out_f_a[:j], out_g_a[:j]


def rk4_sign_change(double A, double B, double eta0, double f0, double g0,
                    double h, long max_steps):
    """March RK4 until ``f`` turns nonnegative; see ``_kernels_py``."""
    cdef double out[2]
    cdef double f = f0, g = g0
    cdef long k
    for k in range(max_steps):
        _rk4_step(A, B, eta0 + k * h, f, g, h, out)
        if out[0] >= 0.0:
            return k, f, g
        f = out[0]
        g = out[1]
    return -1, f, g


def hermite_eval(eta_nodes, f_nodes, g_nodes, dg_nodes, d2g_nodes, query):
    """Piecewise quintic Hermite interpolation of (f, g); see ``_kernels_py``."""
    q_arr = np.asarray(query, dtype=float)
    shape = q_arr.shape
    cdef const double[::1] q = np.ascontiguousarray(q_arr).ravel()
    cdef const double[::1] e = np.ascontiguousarray(eta_nodes, dtype=float)
    cdef const double[::1] fv = np.ascontiguousarray(f_nodes, dtype=float)
    cdef const double[::1] gv = np.ascontiguousarray(g_nodes, dtype=float)
    cdef const double[::1] dv = np.ascontiguousarray(dg_nodes, dtype=float)
    cdef const double[::1] d2v = np.ascontiguousarray(d2g_nodes, dtype=float)
    cdef Py_ssize_t m = q.shape[0], n = e.shape[0], k, lo, hi, mid, j
    res_f_a = np.empty(m)
    res_g_a = np.empty(m)
    cdef double[::1] res_f = res_f_a, res_g = res_g_a
    cdef double x, h, hh, t, t2, t3, t4, t5, b1, b2, b3, b4, b5
    if n == 1:
        return np.full(shape, fv[0]), np.full(shape, gv[0])
    with nogil:
        for k in range(m):
            x = q[k]
            # rightmost node <= x, clipped to [0, n-2]
            lo = 0
            hi = n - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if e[mid] <= x:
                    lo = mid
                else:
                    hi = mid
            j = lo + 1
            h = e[j] - e[lo]
            t = (x - e[lo]) / h
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
            # increment form (b0 + b5 = 1)
            res_f[k] = fv[lo] + (b5 * (fv[j] - fv[lo]) + b1 * h * gv[lo]
                                 + b2 * hh * dv[lo] + b3 * hh * dv[j] + b4 * h * gv[j])
            res_g[k] = gv[lo] + (b5 * (gv[j] - gv[lo]) + b1 * h * dv[lo]
                                 + b2 * hh * d2v[lo] + b3 * hh * d2v[j] + b4 * h * dv[j])
    return res_f_a.reshape(shape), res_g_a.reshape(shape)

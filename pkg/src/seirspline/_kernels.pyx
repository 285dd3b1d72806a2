# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: spline rate evaluation, SEIR stepping, objective.

Keep in lockstep with _kernels_py.py -- same formula layout and evaluation
order, so both backends produce bit-identical numbers.
"""

from libc.math cimport exp

import numpy as np

BACKEND_NAME = "compiled"

NEG_TOL = 1e-9

cdef double _NEG_TOL = 1e-9


def rate_curve(int n_points, int k2, int k3, double v2, double v3, double v4,
               double lam):
    """Per-day rate values over day offsets 0..n_points-1.

    Constant at v2 through offset k2, blends to v3 on (k2, k3], blends to
    v4 on (k3, n_points-1]. Node offsets carry the node levels exactly.
    """
    if not (0 <= k2 <= k3 < n_points - 1):
        raise ValueError(f"node offsets out of range: k2={k2}, k3={k3}, n={n_points}")
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    out = np.empty(n_points, dtype=np.float64)
    cdef double[::1] o = out
    cdef int last = n_points - 1
    cdef int d
    cdef double ef, den, dec
    for d in range(0, k2 + 1):
        o[d] = v2
    if k3 > k2:
        ef = exp(-lam * (k3 - k2))
        den = 1.0 - ef
        for d in range(k2 + 1, k3 + 1):
            dec = exp(-lam * (d - k2))
            o[d] = v3 + (v2 - v3) * (dec - ef) / den
    ef = exp(-lam * (last - k3))
    den = 1.0 - ef
    for d in range(k3 + 1, last + 1):
        dec = exp(-lam * (d - k3))
        o[d] = v4 + (v3 - v4) * (dec - ef) / den
    return out


def simulate(double s0, double e0, double i0, double r0,
             double[::1] beta, double[::1] gamma,
             double sigma, double n_pop, int n_steps):
    """Forward-Euler SEIR recursion with daily rates.

    Returns five items: the four per-day compartment arrays (length
    n_steps + 1) and a list of (day, compartment, value) diagnostics for
    steps that drove a compartment below -NEG_TOL * N.
    """
    if beta.shape[0] < n_steps or gamma.shape[0] < n_steps:
        raise ValueError(f"rate series shorter than {n_steps} steps")
    S_arr = np.empty(n_steps + 1, dtype=np.float64)
    E_arr = np.empty(n_steps + 1, dtype=np.float64)
    I_arr = np.empty(n_steps + 1, dtype=np.float64)
    R_arr = np.empty(n_steps + 1, dtype=np.float64)
    cdef double[::1] S = S_arr
    cdef double[::1] E = E_arr
    cdef double[::1] I = I_arr
    cdef double[::1] R = R_arr
    warnings = []
    cdef double thresh = -_NEG_TOL * n_pop
    cdef double s = s0, e = e0, i = i0, r = r0
    cdef double flow, sig_e, gam_i
    cdef int n
    S[0] = s
    E[0] = e
    I[0] = i
    R[0] = r
    for n in range(n_steps):
        flow = beta[n] * s * i / n_pop
        sig_e = sigma * e
        gam_i = gamma[n] * i
        s = s - flow
        e = e + flow - sig_e
        i = i + sig_e - gam_i
        r = r + gam_i
        if s < thresh:
            warnings.append((n + 1, "s", s))
        if e < thresh:
            warnings.append((n + 1, "e", e))
        if i < thresh:
            warnings.append((n + 1, "i", i))
        if r < thresh:
            warnings.append((n + 1, "r", r))
        S[n + 1] = s
        E[n + 1] = e
        I[n + 1] = i
        R[n + 1] = r
    return S_arr, E_arr, I_arr, R_arr, warnings


def sse_objective(int k2, int k3, double b2, double b3, double b4,
                  double g2, double g3, double g4,
                  double lam, double sigma, double n_pop,
                  double i0, double r0,
                  double[::1] idata, double[::1] rcum,
                  double[::1] w1, double[::1] w2):
    """Weighted sum of squared residuals of the model against the data.

    Fuses curve evaluation, the Euler recursion and residual accumulation;
    equals simulating with rate_curve outputs and summing
    w1*(I - idata)^2 + w2*(R - rcum)^2 over the whole window.
    """
    cdef int n_last = idata.shape[0] - 1
    if not (0 <= k2 <= k3 < n_last):
        raise ValueError(f"node offsets out of range: k2={k2}, k3={k3}, n_last={n_last}")
    if (rcum.shape[0] != n_last + 1 or w1.shape[0] != n_last + 1
            or w2.shape[0] != n_last + 1):
        raise ValueError("idata, rcum, w1, w2 must have equal length")
    cdef double ef1, den1, ef2, den2
    if k3 > k2:
        ef1 = exp(-lam * (k3 - k2))
        den1 = 1.0 - ef1
    else:
        ef1 = den1 = 1.0  # middle segment empty, never evaluated
    ef2 = exp(-lam * (n_last - k3))
    den2 = 1.0 - ef2
    cdef double s = n_pop - i0 - r0
    cdef double e = 0.0
    cdef double i = i0
    cdef double r = r0
    cdef double acc = 0.0
    cdef double di, dr, bn, gn, dec, flow, sig_e, gam_i
    cdef int d
    for d in range(n_last + 1):
        di = i - idata[d]
        dr = r - rcum[d]
        acc += w1[d] * di * di + w2[d] * dr * dr
        if d == n_last:
            break
        if d <= k2:
            bn = b2
            gn = g2
        elif d <= k3:
            dec = exp(-lam * (d - k2))
            bn = b3 + (b2 - b3) * (dec - ef1) / den1
            gn = g3 + (g2 - g3) * (dec - ef1) / den1
        else:
            dec = exp(-lam * (d - k3))
            bn = b4 + (b3 - b4) * (dec - ef2) / den2
            gn = g4 + (g3 - g4) * (dec - ef2) / den2
        flow = bn * s * i / n_pop
        sig_e = sigma * e
        gam_i = gn * i
        s = s - flow
        e = e + flow - sig_e
        i = i + sig_e - gam_i
        r = r + gam_i
    return acc

"""Pure-Python kernels, the fallback twin of the compiled extension.

Every function mirrors `_kernels.pyx` operation for operation (same formula
layout, same evaluation order) so both backends produce bit-identical
numbers; only the speed differs.
"""

from math import exp

import numpy as np

BACKEND_NAME = "python"

# a step driving a compartment below -NEG_TOL * N is reported as a diagnostic
NEG_TOL = 1e-9


def rate_curve(n_points, k2, k3, v2, v3, v4, lam):
    """Per-day rate values over day offsets 0..n_points-1.

    Constant at v2 through offset k2, blends to v3 on (k2, k3], blends to
    v4 on (k3, n_points-1]. Node offsets carry the node levels exactly.
    """
    if not (0 <= k2 <= k3 < n_points - 1):
        raise ValueError(f"node offsets out of range: k2={k2}, k3={k3}, n={n_points}")
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    out = np.empty(n_points, dtype=np.float64)
    last = n_points - 1
    for d in range(0, k2 + 1):
        out[d] = v2
    if k3 > k2:
        ef = exp(-lam * (k3 - k2))
        den = 1.0 - ef
        for d in range(k2 + 1, k3 + 1):
            dec = exp(-lam * (d - k2))
            out[d] = v3 + (v2 - v3) * (dec - ef) / den
    ef = exp(-lam * (last - k3))
    den = 1.0 - ef
    for d in range(k3 + 1, last + 1):
        dec = exp(-lam * (d - k3))
        out[d] = v4 + (v3 - v4) * (dec - ef) / den
    return out


def simulate(s0, e0, i0, r0, beta, gamma, sigma, n_pop, n_steps):
    """Forward-Euler SEIR recursion with daily rates.

    Returns five items: the four per-day compartment arrays (length
    n_steps + 1) and a list of (day, compartment, value) diagnostics for
    steps that drove a compartment below -NEG_TOL * N.
    """
    if len(beta) < n_steps or len(gamma) < n_steps:
        raise ValueError(f"rate series shorter than {n_steps} steps")
    S = np.empty(n_steps + 1, dtype=np.float64)
    E = np.empty(n_steps + 1, dtype=np.float64)
    I = np.empty(n_steps + 1, dtype=np.float64)
    R = np.empty(n_steps + 1, dtype=np.float64)
    warnings = []
    thresh = -NEG_TOL * n_pop
    s, e, i, r = s0, e0, i0, r0
    S[0], E[0], I[0], R[0] = s, e, i, r
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
        S[n + 1], E[n + 1], I[n + 1], R[n + 1] = s, e, i, r
    return S, E, I, R, warnings


def sse_objective(k2, k3, b2, b3, b4, g2, g3, g4, lam, sigma, n_pop,
                  i0, r0, idata, rcum, w1, w2):
    """Weighted sum of squared residuals of the model against the data.

    Fuses curve evaluation, the Euler recursion and residual accumulation;
    equals simulating with rate_curve outputs and summing
    w1*(I - idata)^2 + w2*(R - rcum)^2 over the whole window.
    """
    n_last = len(idata) - 1
    if not (0 <= k2 <= k3 < n_last):
        raise ValueError(f"node offsets out of range: k2={k2}, k3={k3}, n_last={n_last}")
    if len(rcum) != n_last + 1 or len(w1) != n_last + 1 or len(w2) != n_last + 1:
        raise ValueError("idata, rcum, w1, w2 must have equal length")
    if k3 > k2:
        ef1 = exp(-lam * (k3 - k2))
        den1 = 1.0 - ef1
    else:
        ef1 = den1 = 1.0  # middle segment empty, never evaluated
    ef2 = exp(-lam * (n_last - k3))
    den2 = 1.0 - ef2
    s = n_pop - i0 - r0
    e = 0.0
    i = i0
    r = r0
    acc = 0.0
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

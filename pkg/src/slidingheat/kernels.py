"""Time-stepping kernels.

Everything here sticks to scalars, flat float arrays and the numba-supported
numpy subset so the same source runs compiled or as plain Python (see
``_jit``). Disturbances come in as ``(kind, a, omega, phase, tab_t, tab_d)``
with kind codes 0 zero, 1 constant, 2 sinusoid, 3 table.
"""
import math

import numpy as np

from ._jit import jit

LAW_OPEN = 0
LAW_SMC = 1
LAW_ST = 2


@jit
def disturbance_value(kind, a, omega, phase, tab_t, tab_d, t):
    if kind == 0:
        return 0.0
    if kind == 1:
        return a
    if kind == 2:
        return a * math.sin(omega * t + phase)
    return np.interp(t, tab_t, tab_d)


@jit
def disturbance_rate(kind, a, omega, phase, t):
    if kind == 2:
        return a * omega * math.cos(omega * t + phase)
    return 0.0


@jit
def sign_of(x):
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@jit
def sign_step(sigma, drift, gain, dt):
    """Implicit (projection) step of ``sigma' = drift - gain * s``, ``s in sign(sigma)``.

    Returns ``(s, sigma_next)``. When the unforced prediction lies within
    ``dt * gain`` of zero the selection is the one that lands exactly on zero.
    """
    pred = sigma + dt * drift
    reach = dt * gain
    if abs(pred) > reach:
        s = sign_of(pred)
        return s, pred - reach * s
    if reach > 0.0:
        return pred / reach, 0.0
    return 0.0, 0.0


@jit
def explicit_heat_step(z, out, h, dt, c0, flux):
    """Forward Euler on the ghost-node central-difference Laplacian.

    Ghosts: ``z[-1] = z[1] - 2 h c0 z[0]`` and ``z[n] = z[n-2] + 2 h flux``.
    """
    n = z.shape[0]
    r = dt / (h * h)
    out[0] = z[0] + r * (2.0 * z[1] - 2.0 * z[0] - 2.0 * h * c0 * z[0])
    for i in range(1, n - 1):
        out[i] = z[i] + r * (z[i - 1] - 2.0 * z[i] + z[i + 1])
    out[n - 1] = z[n - 1] + r * (2.0 * z[n - 2] - 2.0 * z[n - 1] + 2.0 * h * flux)


@jit
def implicit_heat_step(z, out, M, q, flux):
    """``out = M z + q flux`` with ``M = (I - dt A)^-1`` precomputed."""
    n = z.shape[0]
    for i in range(n):
        acc = q[i] * flux
        for j in range(n):
            acc += M[i, j] * z[j]
        out[i] = acc


@jit
def _dot(a, b):
    acc = 0.0
    for i in range(a.shape[0]):
        acc += a[i] * b[i]
    return acc


@jit
def closed_loop(z0, h, dt, c0, n_steps, implicit, M, q,
                w, wphi, waphi, lam, bphi,
                law, K, alpha, beta, v0, explicit_sign,
                dkind, da, domega, dphase, tab_t, tab_d,
                stride, t_out, sigma_out, u_out, aux_out, norm_out, snaps):
    """Run the heat equation under boundary feedback for ``n_steps`` steps.

    ``w`` are trapezoid weights, ``wphi = w * phi`` (so sigma = wphi . z) and
    ``waphi = w * (A_h phi)`` (so <A_h phi, z> = waphi . z). Output arrays have
    ``n_steps + 1`` rows; ``snaps`` has one row per ``stride`` steps.

    Returns -1 on success, otherwise the index of the first non-finite state.
    """
    n = z0.shape[0]
    z = z0.copy()
    z_next = np.empty(n)
    v = v0
    snap = 0
    for k in range(n_steps + 1):
        t = k * dt
        sigma = _dot(wphi, z)
        d = disturbance_value(dkind, da, domega, dphase, tab_t, tab_d, t)
        s = 0.0
        u = 0.0
        aux = 0.0
        if law == 1:
            if explicit_sign:
                s = sign_of(sigma)
            else:
                # controller-side prediction, the disturbance is unknown to it
                drift = _dot(waphi, z) - lam * sigma
                s, _ = sign_step(sigma, drift, K, dt)
            u = -(lam * sigma + K * s) / bphi
            aux = s
        elif law == 2:
            if sigma != 0.0:
                s = sign_of(sigma)
            else:
                s, _ = sign_step(v, 0.0, beta, dt)
            u = (-lam * sigma - alpha * math.sqrt(abs(sigma)) * s + v) / bphi
            aux = v
        t_out[k] = t
        sigma_out[k] = sigma
        u_out[k] = u
        aux_out[k] = aux
        acc = 0.0
        for i in range(n):
            acc += w[i] * z[i] * z[i]
        norm_out[k] = math.sqrt(acc)
        if stride > 0 and k % stride == 0:
            snaps[snap, :] = z
            snap += 1
        if k == n_steps:
            break
        if implicit:
            implicit_heat_step(z, z_next, M, q, u + d)
        else:
            explicit_heat_step(z, z_next, h, dt, c0, u + d)
        if law == 2:
            v = v - dt * beta * s
        for i in range(n):
            if not math.isfinite(z_next[i]):
                return k + 1
        z, z_next = z_next, z
    return -1


@jit
def reduced_smc(sigma0, K, bphi, dkind, da, domega, dphase, tab_t, tab_d,
                dt, n_steps, explicit_sign, t_out, sigma_out, s_out):
    """Integrate ``sigma' in bphi * d(t) - K sign(sigma)``."""
    sigma = sigma0
    for k in range(n_steps + 1):
        t = k * dt
        t_out[k] = t
        sigma_out[k] = sigma
        d = disturbance_value(dkind, da, domega, dphase, tab_t, tab_d, t)
        if explicit_sign:
            s = sign_of(sigma)
            sigma_next = sigma + dt * (bphi * d - K * s)
        else:
            s, sigma_next = sign_step(sigma, bphi * d, K, dt)
        s_out[k] = s
        sigma = sigma_next


@jit
def reduced_st(sigma0, w0, alpha, beta, bphi, dkind, da, domega, dphase,
               dt, n_steps, t_out, sigma_out, w_out, s_out):
    """Integrate the super-twisting pair

        sigma' = -alpha |sigma|^(1/2) sign(sigma) + w
        w'    in bphi * d'(t) - beta sign(sigma)

    Off the surface the selection is sign(sigma); exactly on it, the w
    inclusion takes the projection selection.
    """
    sigma = sigma0
    w = w0
    for k in range(n_steps + 1):
        t = k * dt
        t_out[k] = t
        sigma_out[k] = sigma
        w_out[k] = w
        dd = disturbance_rate(dkind, da, domega, dphase, t)
        if sigma != 0.0:
            s = sign_of(sigma)
            sigma_next = sigma + dt * (-alpha * math.sqrt(abs(sigma)) * s + w)
            w_next = w + dt * (bphi * dd - beta * s)
        else:
            s, w_next = sign_step(w, bphi * dd, beta, dt)
            sigma_next = sigma + dt * w
        s_out[k] = s
        sigma = sigma_next
        w = w_next

"""Pure-numpy RK4 kernel; reference implementation and import-time fallback.

Must stay algorithmically identical to the compiled kernel in
``_rk4_cy.pyx`` -- the parity tests compare the two step by step.
"""

from __future__ import annotations

import numpy as np


def rk4_run(a0, ga, gb, drive, g, v0, dt, n_steps, check_every=1024):
    """March ``dv/dt = (a0 + g(t) ga + conj(g(t)) gb) v + drive(t)``.

    Parameters
    ----------
    a0, ga, gb : (n, n) complex arrays
        Constant drift and the two pump-coupling matrices.
    drive : (2*n_steps + 1, n) complex array
        Pre-assembled B @ u(t) on the half-step grid t_k = k*dt/2.
    g : (2*n_steps + 1,) complex array
        Pump-enhanced coupling on the same half-step grid.
    v0 : (n,) complex array
        Initial state.

    Returns
    -------
    out : (n_steps + 1, n) complex array
    bad_step : int
        Index of the first step at which a non-finite amplitude was
        detected (checked every ``check_every`` steps), or -1.
    """
    n = a0.shape[0]
    out = np.empty((n_steps + 1, n), dtype=complex)
    out[0] = v0
    v = np.array(v0, dtype=complex)

    half = 0.5 * dt
    sixth = dt / 6.0

    # a diverging state overflows to inf/nan before the finiteness check
    # catches it; that path is expected, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        return _march(a0, ga, gb, drive, g, v, out, half, sixth, dt,
                      n_steps, check_every)


def _march(a0, ga, gb, drive, g, v, out, half, sixth, dt, n_steps, check_every):

    coupled = ga.any() or gb.any()
    g_constant = (not coupled) or bool(np.all(g == g[0]))

    if g_constant:
        m = a0 if not coupled else a0 + g[0] * ga + np.conj(g[0]) * gb
        for step in range(n_steps):
            i0 = 2 * step
            d0 = drive[i0]
            d1 = drive[i0 + 1]
            d2 = drive[i0 + 2]
            k1 = m @ v + d0
            k2 = m @ (v + half * k1) + d1
            k3 = m @ (v + half * k2) + d1
            k4 = m @ (v + dt * k3) + d2
            v = v + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            out[step + 1] = v
            if (step + 1) % check_every == 0 and not np.all(np.isfinite(v.view(float))):
                return out, step + 1
    else:
        for step in range(n_steps):
            i0 = 2 * step
            m0 = a0 + g[i0] * ga + np.conj(g[i0]) * gb
            m1 = a0 + g[i0 + 1] * ga + np.conj(g[i0 + 1]) * gb
            m2 = a0 + g[i0 + 2] * ga + np.conj(g[i0 + 2]) * gb
            k1 = m0 @ v + drive[i0]
            k2 = m1 @ (v + half * k1) + drive[i0 + 1]
            k3 = m1 @ (v + half * k2) + drive[i0 + 1]
            k4 = m2 @ (v + dt * k3) + drive[i0 + 2]
            v = v + sixth * (k1 + 2.0 * (k2 + k3) + k4)
            out[step + 1] = v
            if (step + 1) % check_every == 0 and not np.all(np.isfinite(v.view(float))):
                return out, step + 1

    if not np.all(np.isfinite(v.view(float))):
        return out, n_steps
    return out, -1

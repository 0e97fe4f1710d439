# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled RK4 kernel for the complex linear mean-field system.

Algorithmically identical to ``_rk4_py.rk4_run``; the fused
matrix-assembly/matvec inner loop is where the compiled version wins.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isfinite

ctypedef double complex cplx


cdef inline void _rhs(const cplx[:, ::1] a0, const cplx[:, ::1] ga,
                      const cplx[:, ::1] gb, cplx g,
                      const cplx[:, ::1] drive, Py_ssize_t row,
                      const cplx* v, cplx* out, Py_ssize_t n,
                      bint coupled) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef cplx acc, cg
    if coupled:
        cg = g.conjugate()
        for i in range(n):
            acc = drive[row, i]
            for j in range(n):
                acc = acc + (a0[i, j] + g * ga[i, j] + cg * gb[i, j]) * v[j]
            out[i] = acc
    else:
        for i in range(n):
            acc = drive[row, i]
            for j in range(n):
                acc = acc + a0[i, j] * v[j]
            out[i] = acc


def rk4_run(const cplx[:, ::1] a0, const cplx[:, ::1] ga, const cplx[:, ::1] gb,
            const cplx[:, ::1] drive, const cplx[::1] g, const cplx[::1] v0,
            double dt, Py_ssize_t n_steps, Py_ssize_t check_every=1024):
    """Same contract as the pure-Python kernel (see ``_rk4_py.rk4_run``)."""
    cdef Py_ssize_t n = a0.shape[0]
    if n > 16:
        raise ValueError("kernel scratch space supports at most 16 modes")

    out_arr = np.empty((n_steps + 1, n), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef cplx[16] v, vt, k1, k2, k3, k4
    cdef Py_ssize_t step, i, i0, bad = -1
    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef bint coupled = False
    cdef bint ok

    for i in range(n):
        v[i] = v0[i]
        out[0, i] = v0[i]
    for i in range(n):
        for step in range(n):
            if ga[i, step] != 0 or gb[i, step] != 0:
                coupled = True

    with nogil:
        for step in range(n_steps):
            i0 = 2 * step
            _rhs(a0, ga, gb, g[i0], drive, i0, v, k1, n, coupled)
            for i in range(n):
                vt[i] = v[i] + half * k1[i]
            _rhs(a0, ga, gb, g[i0 + 1], drive, i0 + 1, vt, k2, n, coupled)
            for i in range(n):
                vt[i] = v[i] + half * k2[i]
            _rhs(a0, ga, gb, g[i0 + 1], drive, i0 + 1, vt, k3, n, coupled)
            for i in range(n):
                vt[i] = v[i] + dt * k3[i]
            _rhs(a0, ga, gb, g[i0 + 2], drive, i0 + 2, vt, k4, n, coupled)
            for i in range(n):
                v[i] = v[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                out[step + 1, i] = v[i]
            if (step + 1) % check_every == 0:
                ok = True
                for i in range(n):
                    if not (isfinite(v[i].real) and isfinite(v[i].imag)):
                        ok = False
                if not ok:
                    bad = step + 1
                    break

    if bad == -1:
        for i in range(n):
            if not (isfinite(v[i].real) and isfinite(v[i].imag)):
                bad = n_steps
    return out_arr, bad

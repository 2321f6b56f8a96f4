# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the piecewise-constant 2-level propagation
kernels.  Semantics match ``robustpulse.kernels.pure`` exactly; see that
module for the closed-form segment propagator used here."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

BACKEND = "fast"

cdef double _SMALL = 1e-8


cdef inline void _mat2_mul(double complex *out, double complex *a, double complex *b) noexcept nogil:
    # out = a @ b, 2x2 row-major
    out[0] = a[0] * b[0] + a[1] * b[2]
    out[1] = a[0] * b[1] + a[1] * b[3]
    out[2] = a[2] * b[0] + a[3] * b[2]
    out[3] = a[2] * b[1] + a[3] * b[3]


cdef inline double complex _trace_abc(double complex *a, double complex *b, double complex *c) noexcept nogil:
    # tr(a @ b @ c) for 2x2 matrices
    cdef double complex t[4]
    _mat2_mul(t, b, c)
    return a[0] * t[0] + a[1] * t[2] + a[2] * t[1] + a[3] * t[3]


cdef void _segment(double cx, double cy, double cz, double c0, double dt,
                   double complex *u, double complex *dux, double complex *duy,
                   bint want_grad) noexcept nogil:
    cdef double r = sqrt(cx * cx + cy * cy + cz * cz)
    cdef double phi = r * dt
    cdef double cp = cos(phi)
    cdef double f, g
    if r < _SMALL:
        f = dt * (1.0 - phi * phi / 6.0 + phi * phi * phi * phi / 120.0)
        g = dt * dt * dt * (-1.0 / 3.0 + phi * phi / 30.0 - phi * phi * phi * phi / 840.0)
    else:
        f = sin(phi) / r
        g = (cp * dt - f) / (r * r)
    cdef double complex phase = cos(c0 * dt) - 1j * sin(c0 * dt)
    u[0] = phase * (cp - 1j * f * cz)
    u[1] = phase * (-1j * f * (cx - 1j * cy))
    u[2] = phase * (-1j * f * (cx + 1j * cy))
    u[3] = phase * (cp + 1j * f * cz)
    if not want_grad:
        return
    cdef double dcos = -dt * f
    dux[0] = phase * (dcos * cx - 1j * (cx * g * cz))
    dux[1] = phase * (-1j * (cx * g * (cx - 1j * cy) + f))
    dux[2] = phase * (-1j * (cx * g * (cx + 1j * cy) + f))
    dux[3] = phase * (dcos * cx + 1j * (cx * g * cz))
    duy[0] = phase * (dcos * cy - 1j * (cy * g * cz))
    duy[1] = phase * (-1j * (cy * g * (cx - 1j * cy) - 1j * f))
    duy[2] = phase * (-1j * (cy * g * (cx + 1j * cy) + 1j * f))
    duy[3] = phase * (dcos * cy + 1j * (cy * g * cz))


def propagate_pwc2(cx, cy, cz, c0, dts):
    """Total propagator U_N ... U_1 of a piecewise-constant 2-level system."""
    cdef double[::1] vx = np.ascontiguousarray(cx, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(cy, dtype=np.float64)
    cdef double[::1] vz = np.ascontiguousarray(cz, dtype=np.float64)
    cdef double[::1] v0 = np.ascontiguousarray(c0, dtype=np.float64)
    cdef double[::1] vdt = np.ascontiguousarray(dts, dtype=np.float64)
    cdef Py_ssize_t n = vdt.shape[0]
    cdef double complex u[4]
    cdef double complex tot[4]
    cdef double complex tmp[4]
    cdef Py_ssize_t k
    tot[0] = 1.0; tot[1] = 0.0; tot[2] = 0.0; tot[3] = 1.0
    with nogil:
        for k in range(n):
            _segment(vx[k], vy[k], vz[k], v0[k], vdt[k], u, NULL, NULL, False)
            _mat2_mul(tmp, u, tot)
            tot[0] = tmp[0]; tot[1] = tmp[1]; tot[2] = tmp[2]; tot[3] = tmp[3]
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = tot[0]; out[0, 1] = tot[1]; out[1, 0] = tot[2]; out[1, 1] = tot[3]
    return out


def overlap_grad_pwc2(cx, cy, cz, c0, dts, a):
    """Overlap z = tr(A U_N ... U_1) and its gradient w.r.t. cx, cy.

    Returns (z, dz_dcx, dz_dcy, U).
    """
    cdef double[::1] vx = np.ascontiguousarray(cx, dtype=np.float64)
    cdef double[::1] vy = np.ascontiguousarray(cy, dtype=np.float64)
    cdef double[::1] vz = np.ascontiguousarray(cz, dtype=np.float64)
    cdef double[::1] v0 = np.ascontiguousarray(c0, dtype=np.float64)
    cdef double[::1] vdt = np.ascontiguousarray(dts, dtype=np.float64)
    cdef Py_ssize_t n = vdt.shape[0]

    amat = np.ascontiguousarray(a, dtype=np.complex128)
    cdef double complex[:, ::1] av = amat
    cdef double complex aflat[4]
    aflat[0] = av[0, 0]; aflat[1] = av[0, 1]; aflat[2] = av[1, 0]; aflat[3] = av[1, 1]

    useg_arr = np.empty((n, 4), dtype=np.complex128)
    dux_arr = np.empty((n, 4), dtype=np.complex128)
    duy_arr = np.empty((n, 4), dtype=np.complex128)
    fwd_arr = np.empty((n + 1, 4), dtype=np.complex128)
    gx_arr = np.empty(n, dtype=np.complex128)
    gy_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[:, ::1] useg = useg_arr
    cdef double complex[:, ::1] dux = dux_arr
    cdef double complex[:, ::1] duy = duy_arr
    cdef double complex[:, ::1] fwd = fwd_arr
    cdef double complex[::1] gx = gx_arr
    cdef double complex[::1] gy = gy_arr

    cdef double complex back[4]
    cdef double complex tmp[4]
    cdef double complex z
    cdef Py_ssize_t k
    with nogil:
        fwd[0, 0] = 1.0; fwd[0, 1] = 0.0; fwd[0, 2] = 0.0; fwd[0, 3] = 1.0
        for k in range(n):
            _segment(vx[k], vy[k], vz[k], v0[k], vdt[k],
                     &useg[k, 0], &dux[k, 0], &duy[k, 0], True)
            _mat2_mul(&fwd[k + 1, 0], &useg[k, 0], &fwd[k, 0])
        z = (aflat[0] * fwd[n, 0] + aflat[1] * fwd[n, 2]
             + aflat[2] * fwd[n, 1] + aflat[3] * fwd[n, 3])
        back[0] = aflat[0]; back[1] = aflat[1]; back[2] = aflat[2]; back[3] = aflat[3]
        for k in range(n - 1, -1, -1):
            gx[k] = _trace_abc(back, &dux[k, 0], &fwd[k, 0])
            gy[k] = _trace_abc(back, &duy[k, 0], &fwd[k, 0])
            _mat2_mul(tmp, back, &useg[k, 0])
            back[0] = tmp[0]; back[1] = tmp[1]; back[2] = tmp[2]; back[3] = tmp[3]

    utot = np.empty((2, 2), dtype=np.complex128)
    utot[0, 0] = fwd_arr[n, 0]; utot[0, 1] = fwd_arr[n, 1]
    utot[1, 0] = fwd_arr[n, 2]; utot[1, 1] = fwd_arr[n, 3]
    return complex(z), gx_arr, gy_arr, utot

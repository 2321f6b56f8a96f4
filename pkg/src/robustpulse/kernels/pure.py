"""Pure-numpy reference implementation of the hot propagation kernels.

The compiled extension in ``_fast.pyx`` implements the same functions with
identical semantics; either backend may be selected at import time (see
``robustpulse.kernels``).  Segment Hamiltonians are two-level and written in
the Pauli basis,

    H_k = c0[k] * I + cx[k] * sx + cy[k] * sy + cz[k] * sz,

and each segment propagator is the exact exponential

    U_k = exp(-i H_k dt_k)
        = e^{-i c0 dt} (cos(r dt) I - i sin(r dt)/r (c . sigma)),

with r = |c|.  Products are ordered right-to-left in time: U = U_N ... U_1.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_SMALL = 1e-8


def _segment_propagators(cx, cy, cz, c0, dts):
    """Per-segment 2x2 propagators, shape (N, 2, 2)."""
    r = np.sqrt(cx * cx + cy * cy + cz * cz)
    phi = r * dts
    cosphi = np.cos(phi)
    small = r < _SMALL
    # f = sin(r dt)/r, smooth at r -> 0
    f = np.where(small, dts * (1.0 - phi**2 / 6.0 + phi**4 / 120.0),
                 np.sin(phi) / np.where(small, 1.0, r))
    phase = np.exp(-1j * c0 * dts)
    u = np.empty((len(dts), 2, 2), dtype=np.complex128)
    u[:, 0, 0] = phase * (cosphi - 1j * f * cz)
    u[:, 0, 1] = phase * (-1j * f * (cx - 1j * cy))
    u[:, 1, 0] = phase * (-1j * f * (cx + 1j * cy))
    u[:, 1, 1] = phase * (cosphi + 1j * f * cz)
    return u, cosphi, f, r, phase


def propagate_pwc2(cx, cy, cz, c0, dts):
    """Total propagator U_N ... U_1 of a piecewise-constant 2-level system."""
    u, _, _, _, _ = _segment_propagators(
        np.asarray(cx, float), np.asarray(cy, float),
        np.asarray(cz, float), np.asarray(c0, float), np.asarray(dts, float))
    total = np.eye(2, dtype=np.complex128)
    for k in range(u.shape[0]):
        total = u[k] @ total
    return total


def overlap_grad_pwc2(cx, cy, cz, c0, dts, a):
    """Overlap z = tr(A U_N ... U_1) and its gradient w.r.t. cx, cy.

    Returns (z, dz_dcx, dz_dcy, U) where the gradient arrays have one complex
    entry per segment and U is the total propagator.
    """
    cx = np.asarray(cx, float)
    cy = np.asarray(cy, float)
    cz = np.asarray(cz, float)
    c0 = np.asarray(c0, float)
    dts = np.asarray(dts, float)
    n = len(dts)
    u, cosphi, f, r, phase = _segment_propagators(cx, cy, cz, c0, dts)

    phi = r * dts
    small = r < _SMALL
    # g = (cos(phi) dt - f)/r^2, smooth at r -> 0
    g = np.where(
        small,
        dts**3 * (-1.0 / 3.0 + phi**2 / 30.0 - phi**4 / 840.0),
        (cosphi * dts - f) / np.where(small, 1.0, r * r),
    )
    dcos = -dts * f  # d cos(r dt)/dc_j = dcos * c_j

    # dU/dcx = phase [ dcos*cx I - i (cx g (c.sigma) + f sx) ]
    dux = np.empty_like(u)
    dux[:, 0, 0] = phase * (dcos * cx - 1j * (cx * g * cz))
    dux[:, 0, 1] = phase * (-1j * (cx * g * (cx - 1j * cy) + f))
    dux[:, 1, 0] = phase * (-1j * (cx * g * (cx + 1j * cy) + f))
    dux[:, 1, 1] = phase * (dcos * cx + 1j * (cx * g * cz))

    duy = np.empty_like(u)
    duy[:, 0, 0] = phase * (dcos * cy - 1j * (cy * g * cz))
    duy[:, 0, 1] = phase * (-1j * (cy * g * (cx - 1j * cy) - 1j * f))
    duy[:, 1, 0] = phase * (-1j * (cy * g * (cx + 1j * cy) + 1j * f))
    duy[:, 1, 1] = phase * (dcos * cy + 1j * (cy * g * cz))

    # forward partial products P[k] = U_k ... U_1, P[0] = I
    fwd = np.empty((n + 1, 2, 2), dtype=np.complex128)
    fwd[0] = np.eye(2)
    for k in range(n):
        fwd[k + 1] = u[k] @ fwd[k]

    a = np.asarray(a, dtype=np.complex128)
    z = np.trace(a @ fwd[n])

    dz_dcx = np.empty(n, dtype=np.complex128)
    dz_dcy = np.empty(n, dtype=np.complex128)
    back = a.copy()  # back = A U_N ... U_{k+1}
    for k in range(n - 1, -1, -1):
        left = back
        right = fwd[k]
        dz_dcx[k] = np.trace(left @ dux[k] @ right)
        dz_dcy[k] = np.trace(left @ duy[k] @ right)
        back = back @ u[k]
    return z, dz_dcx, dz_dcy, fwd[n]

"""Piecewise-constant transmon dynamics.

Builds the control/leakage/noise Hamiltonians in the frame rotating at the
drive LO, propagates exact segment exponentials, forms the error action
operator U_tot U_ctrl^dag, and evaluates operational and robustness
fidelities.  Incoherent T1 decay is integrated as piecewise-constant
Lindblad evolution of the density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .device import DeviceModel, NoiseRealization
from .errors import ModelError, RobustPulseError
from .pulses import Waveform


def lowering_operator(d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=np.complex128)
    for i in range(1, d):
        a[i - 1, i] = np.sqrt(i)
    return a


def quadrature_operators(d: int) -> tuple[np.ndarray, np.ndarray]:
    """a_I = a + a^dag and a_Q = -i(a - a^dag)."""
    a = lowering_operator(d)
    return a + a.conj().T, -1j * (a - a.conj().T)


def _effective_drive(i_val: float, q_val: float,
                     noise: NoiseRealization) -> tuple[float, float]:
    if noise.amp_mode == "common":
        scale = 1.0 + noise.eps_common
        return scale * i_val, scale * q_val
    return (1.0 + noise.eps_i) * i_val, (1.0 + noise.eps_q) * q_val


def build_hamiltonian(w: Waveform, noise: NoiseRealization,
                      device: DeviceModel, qubit: int, t_segment: int,
                      extra_i: float = 0.0,
                      extra_delta: float = 0.0) -> np.ndarray:
    """Segment Hamiltonian H_ctrl + H_leakage + H_noise (d x d Hermitian)."""
    d = device.hilbert_levels
    if d not in (2, 3):
        raise ModelError("hilbert_levels must be 2 or 3")
    if not 0 <= t_segment < len(w.segments):
        raise ModelError(f"segment index {t_segment} out of range")
    gamma = w.segments[t_segment]
    i_eff, q_eff = _effective_drive(gamma.real, gamma.imag, noise)
    i_eff += extra_i
    a_i, a_q = quadrature_operators(d)
    a = lowering_operator(d)
    number = a.conj().T @ a
    h = 0.5 * i_eff * a_i + 0.5 * q_eff * a_q
    # Detuning convention: Delta multiplies the Pauli-Z operator directly on
    # the 0-1 subspace (H_deph restricted to two levels is Delta*I - Delta*Z),
    # realized here as 2*Delta*n.
    h = h + 2.0 * (noise.delta + extra_delta) * number
    if d == 3:
        a2 = a @ a
        h = h + 0.5 * device.anharmonicity[qubit] * (a2.conj().T @ a2)
    return h


@dataclass(frozen=True)
class UnitaryResult:
    """Noiseless, noisy, and error-action propagators of one pulse."""

    u_ctrl: np.ndarray
    u_tot: np.ndarray
    u_noise: np.ndarray


def _coeffs_2level(w: Waveform, noise: NoiseRealization,
                   extra_i=None, extra_delta=None):
    """Pauli coefficients of the 2-level Hamiltonian per segment."""
    n = len(w.segments)
    i_vals = w.i_values.copy()
    q_vals = w.q_values.copy()
    if noise.amp_mode == "common":
        i_vals *= (1.0 + noise.eps_common)
        q_vals *= (1.0 + noise.eps_common)
    else:
        i_vals *= (1.0 + noise.eps_i)
        q_vals *= (1.0 + noise.eps_q)
    if extra_i is not None:
        i_vals = i_vals + extra_i
    delta = np.full(n, noise.delta)
    if extra_delta is not None:
        delta = delta + extra_delta
    cx = 0.5 * i_vals
    cy = 0.5 * q_vals
    # Delta is the coefficient of the Pauli-Z term (2*Delta*n = Delta*I
    # - Delta*Z), so cz carries the full detuning.
    c0 = delta
    cz = -delta
    return cx, cy, cz, c0


def _propagate_matrices(w: Waveform, noise: NoiseRealization,
                        device: DeviceModel, qubit: int,
                        extra_i=None, extra_delta=None) -> np.ndarray:
    """Total propagator via the fast kernel (d=2) or eigendecomposition (d=3)."""
    if not np.all(np.isfinite(w.segments)):
        raise RobustPulseError("waveform contains non-finite amplitudes")
    n = len(w.segments)
    dts = np.full(n, w.grid.segment_duration)
    if device.hilbert_levels == 2:
        cx, cy, cz, c0 = _coeffs_2level(w, noise, extra_i, extra_delta)
        return kernels.propagate_pwc2(cx, cy, cz, c0, dts)
    u = np.eye(3, dtype=np.complex128)
    for k in range(n):
        h = build_hamiltonian(
            w, noise, device, qubit, k,
            extra_i=0.0 if extra_i is None else float(extra_i[k]),
            extra_delta=0.0 if extra_delta is None else float(extra_delta[k]))
        evals, evecs = np.linalg.eigh(h)
        u = (evecs * np.exp(-1j * evals * dts[k])) @ evecs.conj().T @ u
    return u


def propagate(w: Waveform, noise: NoiseRealization, device: DeviceModel,
              qubit: int = 0, extra_i=None,
              extra_delta=None) -> UnitaryResult:
    """Propagate the noiseless and noisy Hamiltonians over the full pulse.

    ``extra_i``/``extra_delta`` are optional per-segment additive crosstalk
    terms; they belong to H_noise and therefore only affect u_tot.
    """
    u_ctrl = _propagate_matrices(w, NoiseRealization.none(), device, qubit)
    if noise.is_zero() and extra_i is None and extra_delta is None:
        u_tot = u_ctrl
    else:
        u_tot = _propagate_matrices(w, noise, device, qubit,
                                    extra_i=extra_i, extra_delta=extra_delta)
    u_noise = u_tot @ u_ctrl.conj().T
    return UnitaryResult(u_ctrl=u_ctrl, u_tot=u_tot, u_noise=u_noise)


def operational_infidelity(u_ctrl: np.ndarray, u_target: np.ndarray,
                           dim: int | None = None) -> float:
    """1 - |<U_target, U_ctrl>_F / D|^2, global-phase invariant."""
    d = dim if dim is not None else u_ctrl.shape[0]
    overlap = np.trace(u_target.conj().T @ u_ctrl) / d
    return float(max(0.0, 1.0 - abs(overlap) ** 2))


def robustness_fidelity(w: Waveform, ensemble, device: DeviceModel,
                        qubit: int = 0) -> float:
    """Ensemble average of |<U_noise, I>_F / D|^2."""
    ensemble = list(ensemble)
    if not ensemble:
        raise ValueError("noise ensemble must be nonempty")
    d = device.hilbert_levels
    total = 0.0
    for noise in ensemble:
        res = propagate(w, noise, device, qubit)
        total += abs(np.trace(res.u_noise) / d) ** 2
    return total / len(ensemble)


# ---------------------------------------------------------------------------
# Open-system (T1) evolution
# ---------------------------------------------------------------------------

def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    """Column-stacking superoperator of rho -> U rho U^dag."""
    return np.kron(u.conj(), u)


def _dissipator(c: np.ndarray) -> np.ndarray:
    d = c.shape[0]
    eye = np.eye(d)
    cdc = c.conj().T @ c
    return (np.kron(c.conj(), c)
            - 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye)))


def _liouvillian(h: np.ndarray, decay_rate: float,
                 dephasing_rate: float = 0.0) -> np.ndarray:
    d = h.shape[0]
    eye = np.eye(d)
    lio = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    if decay_rate > 0.0:
        lio = lio + _dissipator(np.sqrt(decay_rate) * lowering_operator(d))
    if dephasing_rate > 0.0:
        a = lowering_operator(d)
        number = a.conj().T @ a
        lio = lio + _dissipator(np.sqrt(2.0 * dephasing_rate) * number)
    return lio


def pulse_superoperator(w: Waveform, noise: NoiseRealization,
                        device: DeviceModel, qubit: int = 0,
                        extra_i=None, extra_delta=None) -> np.ndarray:
    """Lindblad propagator of the whole pulse as a d^2 x d^2 superoperator.

    The relaxation rate is 1/T1 (plus pure dephasing 1/T_phi when the device
    defines it) when the noise realization requests incoherent channels.
    Identical consecutive segments reuse the cached segment exponential.
    """
    d = device.hilbert_levels
    rate = 1.0 / device.t1[qubit] if noise.include_t1 else 0.0
    deph = (1.0 / device.t_phi[qubit]
            if noise.include_t1 and device.t_phi is not None else 0.0)
    dt = w.grid.segment_duration
    total = np.eye(d * d, dtype=np.complex128)
    prev_key = None
    seg_exp = None
    for k in range(len(w.segments)):
        key = (w.segments[k],
               None if extra_i is None else extra_i[k],
               None if extra_delta is None else extra_delta[k])
        if key != prev_key:
            h = build_hamiltonian(
                w, noise, device, qubit, k,
                extra_i=0.0 if extra_i is None else float(extra_i[k]),
                extra_delta=0.0 if extra_delta is None else float(extra_delta[k]))
            seg_exp = scipy.linalg.expm(_liouvillian(h, rate, deph) * dt)
            prev_key = key
        total = seg_exp @ total
    return total


def evolve_density(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    return _unvec(superop @ _vec(rho), d)


def simulate_with_t1(w: Waveform, noise: NoiseRealization,
                     device: DeviceModel, qubit: int = 0,
                     shots: int | None = None, initial_state: int = 0,
                     rng: np.random.Generator | None = None) -> float:
    """Excited-state probability after the pulse under Lindblad T1 decay.

    With finite ``shots``, binomial sampling noise is added (requires rng).
    """
    d = device.hilbert_levels
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[initial_state, initial_state] = 1.0
    sup = pulse_superoperator(w, noise, device, qubit)
    rho = evolve_density(sup, rho)
    p1 = float(rho[1, 1].real)
    p1 = min(1.0, max(0.0, p1))
    if shots is None:
        return p1
    if rng is None:
        raise ValueError("finite shots require an rng")
    return rng.binomial(shots, p1) / shots


def crosstalk_noise(drive_on_neighbors: list[Waveform], device: DeviceModel,
                    victim_qubit: int) -> tuple[np.ndarray, np.ndarray]:
    """Additive per-segment (I drive, detuning) terms induced on the victim.

    Each simultaneously driven neighbor leaks a fraction of its drive
    amplitude into the victim's I quadrature and Stark-shifts the victim in
    proportion to its drive power.
    """
    if not drive_on_neighbors:
        return np.zeros(0), np.zeros(0)
    n = len(drive_on_neighbors[0].segments)
    extra_i = np.zeros(n)
    extra_delta = np.zeros(n)
    ct = device.crosstalk
    for wf in drive_on_neighbors:
        if len(wf.segments) != n:
            raise ModelError("neighbor waveforms must share a grid")
        mag = np.abs(wf.segments)
        extra_i += ct.x_coupling * mag
        extra_delta += ct.stark_coefficient * mag**2
    return extra_i, extra_delta

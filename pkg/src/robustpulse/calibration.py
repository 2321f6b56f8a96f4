"""Simulated front-end miscalibration and its two-stage correction.

The hardware front end maps dimensionless programmed amplitudes A in [-1, 1]
to physical Rabi rates through a saturating odd nonlinearity plus hidden
channel scale factors.  Calibration proceeds in two stages:

* coarse: Rabi-rate mapping per channel (square single-quadrature pulses of
  varying duration, cosine fits, monotone interpolation), giving a
  predistortion map;
* fine: repetition-amplified scans of the scale parameters, picking the
  value that maximizes the state-transfer fidelity averaged over two or
  more odd repetition counts.

Scoring a calibration is only possible because the front end's true
parameters are known to the simulation and hidden from the routines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.interpolate
import scipy.optimize

from .device import NoiseRealization, valencia_like
from .errors import CalibrationError
from .pulses import Waveform
from .sim import propagate


@dataclass(frozen=True)
class FrontEndModel:
    """Hidden-truth model of the programmable drive chain.

    Per-channel rate = g1*A + g3*A^3 (odd, saturating for g3 < 0), scaled by
    the hidden factors s_amp (both channels) and s_rel (I channel only),
    with small additive offsets on the programmed amplitudes.
    """

    g1: float = 1.0
    g3: float = -0.2
    true_s_amp: float = 1.0
    true_s_rel: float = 1.0
    offset_i: float = 0.0
    offset_q: float = 0.0

    def __post_init__(self):
        if self.g1 <= 0:
            raise CalibrationError("g1 must be positive")
        # monotone on [-1, 1]: derivative g1 + 3 g3 A^2 > 0
        if self.g1 + 3.0 * self.g3 > 0 and self.g3 <= 0:
            return
        if self.g3 > 0:
            return
        raise CalibrationError("nonlinearity must be monotone on [-1, 1]")

    def nonlinearity(self, a: np.ndarray) -> np.ndarray:
        return self.g1 * a + self.g3 * np.asarray(a) ** 3

    def channel_rate(self, channel: str, a, s_amp: float = 1.0,
                     s_rel: float = 1.0):
        """Physical Rabi rate for programmed amplitude a on one channel."""
        if channel == "I":
            scaled = (s_amp * s_rel * self.true_s_amp * self.true_s_rel
                      * np.asarray(a) + self.offset_i)
        elif channel == "Q":
            scaled = s_amp * self.true_s_amp * np.asarray(a) + self.offset_q
        else:
            raise CalibrationError(f"unknown channel {channel!r}")
        return self.nonlinearity(scaled)

    def max_rate(self, channel: str = "I") -> float:
        return float(self.channel_rate(channel, 1.0))


def rabi_experiment(front_end: FrontEndModel, channel: str, amplitude: float,
                    durations, shots: int | None = None,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """P(1) of resonant square-pulse Rabi flopping at fixed amplitude."""
    rate = float(front_end.channel_rate(channel, amplitude))
    durations = np.asarray(durations, float)
    p1 = 0.5 * (1.0 - np.cos(rate * durations))
    if shots is None:
        return p1
    if rng is None:
        raise ValueError("finite shots require an rng")
    return rng.binomial(shots, np.clip(p1, 0.0, 1.0)) / shots


def fit_rabi_rate(durations, p1_values) -> float:
    """Cosine fit P(1) = v/2 (1 - cos(w t)); returns |w|."""
    durations = np.asarray(durations, float)
    p1_values = np.asarray(p1_values, float)
    # FFT-based frequency initialization on the mean-subtracted signal
    dt = durations[1] - durations[0]
    sig = p1_values - p1_values.mean()
    freqs = np.fft.rfftfreq(len(sig) * 4, d=dt)
    spectrum_mag = np.abs(np.fft.rfft(sig, n=len(sig) * 4))
    w0 = 2.0 * np.pi * freqs[np.argmax(spectrum_mag[1:]) + 1]

    def model(t, v, w):
        return 0.5 * v * (1.0 - np.cos(w * t))

    try:
        popt, _ = scipy.optimize.curve_fit(
            model, durations, p1_values, p0=[1.0, w0],
            bounds=([0.0, 0.0], [1.2, np.inf]), maxfev=20000)
    except RuntimeError as exc:
        raise CalibrationError(f"Rabi cosine fit failed: {exc}") from exc
    return float(abs(popt[1]))


@dataclass(frozen=True)
class AmpMap:
    """Monotone interpolated map A <-> rate for both channels."""

    amplitudes: np.ndarray
    rates_i: np.ndarray
    rates_q: np.ndarray
    _fwd: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name, rates in (("I", self.rates_i), ("Q", self.rates_q)):
            diffs = np.diff(rates)
            if np.any(diffs <= 0):
                bad = [f"A={self.amplitudes[i + 1]:.3g}"
                       for i in np.nonzero(diffs <= 0)[0]]
                raise CalibrationError(
                    f"non-monotone fitted Rabi rates on channel {name} "
                    f"at {', '.join(bad)}")
            interp = scipy.interpolate.PchipInterpolator(
                self.amplitudes, rates)
            inv = scipy.interpolate.PchipInterpolator(rates, self.amplitudes)
            self._fwd[name] = (interp, inv, float(rates[-1]))

    def rate(self, channel: str, amplitude):
        """Forward map, extended oddly to negative amplitudes."""
        interp = self._fwd[channel][0]
        a = np.asarray(amplitude, float)
        return np.sign(a) * interp(np.abs(a))

    def predistort(self, channel: str, rate):
        """Programmed amplitude realizing the requested physical rate."""
        _, inv, max_rate = self._fwd[channel]
        r = np.asarray(rate, float)
        if np.any(np.abs(r) > max_rate):
            raise CalibrationError(
                f"requested rate beyond the calibrated range "
                f"(max {max_rate:.4g} rad/ns on channel {channel})")
        return np.sign(r) * inv(np.abs(r))


@dataclass(frozen=True)
class CalibrationResult:
    amp_map: AmpMap
    s_amp: float
    s_rel: float
    residual_infidelity_estimate: float


def coarse_calibrate(front_end: FrontEndModel, amplitudes=None,
                     shots: int = 4096, seed: int = 0,
                     durations=None) -> AmpMap:
    """Rabi-rate map per channel from cosine fits at each amplitude."""
    if amplitudes is None:
        amplitudes = np.linspace(0.1, 0.9, 9)
    amplitudes = np.asarray(amplitudes, float)
    if durations is None:
        # a few oscillation periods at the slowest probed rate
        slowest = max(1e-3, front_end.g1 * amplitudes[0] * 0.5)
        t_max = 3.0 * 2.0 * np.pi / slowest
        durations = np.linspace(0.0, t_max, 96)
    seq = np.random.SeedSequence([seed, 0x0CA1])
    rates = {"I": [], "Q": []}
    for ch_idx, channel in enumerate(("I", "Q")):
        for a_idx, amp in enumerate(amplitudes):
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, 0x0CA1, ch_idx, a_idx]))
            p1 = rabi_experiment(front_end, channel, amp, durations,
                                 shots=shots, rng=rng)
            rates[channel].append(fit_rabi_rate(durations, p1))
    _ = seq
    return AmpMap(amplitudes=amplitudes,
                  rates_i=np.asarray(rates["I"]),
                  rates_q=np.asarray(rates["Q"]))


def _scan_fidelity(front_end: FrontEndModel, probe_pulse: Waveform,
                   reps: int, s_value: float, param: str,
                   s_amp_fixed: float) -> float:
    """State-transfer fidelity of `reps` scaled probe pulses vs the ideal."""
    if param == "amp":
        # Q-channel probe senses s_amp alone: rotate the pulse onto Q.
        desired = probe_pulse.scaled(1j)
        executed = desired.scaled(s_value * front_end.true_s_amp)
    else:
        desired = probe_pulse
        executed = desired.scaled(
            s_amp_fixed * front_end.true_s_amp
            * s_value * front_end.true_s_rel)
    device = valencia_like()
    u_ideal = propagate(desired, NoiseRealization.none(), device).u_ctrl
    u_real = propagate(executed, NoiseRealization.none(), device).u_ctrl
    psi_ideal = np.linalg.matrix_power(u_ideal, reps)[:, 0]
    psi_real = np.linalg.matrix_power(u_real, reps)[:, 0]
    return float(abs(np.vdot(psi_ideal, psi_real)) ** 2)


def scan_scale(front_end, probe_pulse, repetition_counts, s_grid,
               param: str, s_amp_fixed: float = 1.0) -> np.ndarray:
    """Fidelity grid (repetition counts x scale values) for one parameter."""
    s_grid = np.asarray(s_grid, float)
    fid = np.zeros((len(repetition_counts), len(s_grid)))
    for i, reps in enumerate(repetition_counts):
        for j, s in enumerate(s_grid):
            fid[i, j] = _scan_fidelity(front_end, probe_pulse, reps, s,
                                       param, s_amp_fixed)
    return fid


def _argmax_scan(front_end, probe_pulse, repetition_counts, s_grid,
                 param: str, s_amp_fixed: float = 1.0) -> float:
    s_grid = np.asarray(s_grid, float)
    fid = scan_scale(front_end, probe_pulse, repetition_counts, s_grid,
                     param, s_amp_fixed)
    avg = fid.mean(axis=0)
    best = int(np.argmax(avg))
    if avg.max() - avg.min() < 1e-12:
        raise CalibrationError(f"flat {param} scan: no maximum found")
    if best in (0, len(s_grid) - 1):
        raise CalibrationError(
            f"{param} scan maximum at the grid boundary; widen the grid")
    return float(s_grid[best])


def fine_calibrate(front_end: FrontEndModel, probe_pulse: Waveform,
                   repetition_counts, s_grid) -> tuple[float, float]:
    """Repetition-amplified scans of s_amp then s_rel.

    Each scale is chosen as the argmax of the state-transfer fidelity
    averaged over the given odd repetition counts; at least two distinct
    counts are required to exclude whole-2*pi rotation aliases.
    """
    reps = sorted(set(int(n) for n in repetition_counts))
    if len(reps) < 2:
        raise CalibrationError(
            "need at least two distinct repetition counts")
    if any(n % 2 == 0 for n in reps):
        raise CalibrationError("repetition counts must be odd")
    s_amp = _argmax_scan(front_end, probe_pulse, reps, s_grid, "amp")
    s_rel = _argmax_scan(front_end, probe_pulse, reps, s_grid, "rel",
                         s_amp_fixed=s_amp)
    return s_amp, s_rel


def calibrate(front_end: FrontEndModel, probe_pulse: Waveform,
              repetition_counts=(5, 9), s_grid=None,
              shots: int = 4096, seed: int = 0) -> CalibrationResult:
    """Full coarse + fine calibration with a residual estimate."""
    if s_grid is None:
        s_grid = np.arange(0.90, 1.1001, 0.005)
    amp_map = coarse_calibrate(front_end, shots=shots, seed=seed)
    s_amp, s_rel = fine_calibrate(front_end, probe_pulse,
                                  repetition_counts, s_grid)
    residual = 1.0 - _scan_fidelity(front_end, probe_pulse, 1, s_amp,
                                    "amp", 1.0)
    return CalibrationResult(amp_map=amp_map, s_amp=s_amp, s_rel=s_rel,
                             residual_infidelity_estimate=max(0.0, residual))

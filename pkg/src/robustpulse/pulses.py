"""Pulse waveforms on the hardware time grid.

Waveforms are complex piecewise-constant envelopes gamma(t) = I(t) + i Q(t)
in angular Rabi-rate units (rad/ns).  MHz appears only at I/O boundaries.
The hardware grid has a fixed sample time of 0.22 ns and emitted waveforms
always contain a total sample count that is a multiple of 16.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConstraintError

#: Minimum backend sample time in ns.
DT_NS = 0.22

#: Emitted waveforms must have n1*n2 samples with this divisor.
SAMPLE_MULTIPLE = 16


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid of ``segment_count`` segments, each made of
    ``samples_per_segment`` hardware samples of duration ``dt`` ns."""

    dt: float = DT_NS
    segment_count: int = 16
    samples_per_segment: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ConstraintError(f"dt must be positive, got {self.dt}")
        if self.segment_count <= 0 or self.samples_per_segment <= 0:
            raise ConstraintError("grid dimensions must be positive")

    @property
    def segment_duration(self) -> float:
        return self.samples_per_segment * self.dt

    @property
    def duration(self) -> float:
        return self.segment_count * self.segment_duration

    @property
    def total_samples(self) -> int:
        return self.segment_count * self.samples_per_segment

    @property
    def aligned(self) -> bool:
        """True when n1*n2 is a multiple of 16, as required for execution."""
        return self.total_samples % SAMPLE_MULTIPLE == 0


@dataclass(frozen=True)
class Waveform:
    """Piecewise-constant complex envelope on a time grid."""

    grid: TimeGrid
    segments: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        seg = np.asarray(self.segments, dtype=np.complex128)
        object.__setattr__(self, "segments", seg)
        seg.setflags(write=False)
        if seg.ndim != 1 or len(seg) != self.grid.segment_count:
            raise ConstraintError(
                f"waveform has {len(seg)} segments, grid expects "
                f"{self.grid.segment_count}")

    @property
    def i_values(self) -> np.ndarray:
        return self.segments.real

    @property
    def q_values(self) -> np.ndarray:
        return self.segments.imag

    @property
    def duration(self) -> float:
        return self.grid.duration

    def scaled(self, factor: complex) -> "Waveform":
        return replace(self, segments=self.segments * factor)

    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.segments))) if len(self.segments) else 0.0


@dataclass(frozen=True)
class PulseConstraints:
    """Amplitude and bandwidth constraints applied during optimization."""

    omega_max: float
    f_cutoff: float = 30.0  # MHz, 3 dB low-pass cutoff of the sinc filter
    filter_kind: str = "sinc"  # sinc | bound-slew | none
    slew_max: float | None = None

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ConstraintError("omega_max must be positive")
        if self.filter_kind not in ("sinc", "bound-slew", "none"):
            raise ConstraintError(f"unknown filter kind {self.filter_kind!r}")
        if self.filter_kind == "sinc" and self.f_cutoff <= 0:
            raise ConstraintError("sinc filter requires a positive cutoff")
        if self.filter_kind == "bound-slew" and (
                self.slew_max is None or self.slew_max <= 0):
            raise ConstraintError("bound-slew filter requires slew_max > 0")


@dataclass(frozen=True)
class Spectrum:
    """DFT magnitudes of the I/Q sequences with leakage-frequency markers."""

    frequencies: np.ndarray  # MHz
    magnitudes_i: np.ndarray
    magnitudes_q: np.ndarray
    leakage_markers: tuple  # of (label, freq_mhz)

    def __post_init__(self):
        if not np.all(np.diff(self.frequencies) > 0):
            raise ConstraintError("frequencies must be strictly increasing")
        if len(self.magnitudes_i) != len(self.frequencies) or \
                len(self.magnitudes_q) != len(self.frequencies):
            raise ConstraintError("magnitude arrays must match frequencies")


def sinc_kernel(f_cutoff_mhz: float, sample_period_ns: float) -> np.ndarray:
    """Truncated, DC-normalized sinc low-pass kernel.

    The ideal brick-wall response with cutoff f_c has impulse response
    2 f_c sinc(2 f_c t); we truncate at 6 zero crossings on each side and
    renormalize so the kernel sums to 1 (exact DC invariance).
    """
    if f_cutoff_mhz <= 0:
        raise ConstraintError("cutoff must be positive")
    fn = f_cutoff_mhz * 1e-3 * sample_period_ns  # cycles per sample
    if fn >= 0.5:
        # Cutoff at or above Nyquist of the segment rate: nothing to remove.
        return np.ones(1)
    half = int(math.ceil(3.0 / fn))
    j = np.arange(-half, half + 1)
    kernel = 2.0 * fn * np.sinc(2.0 * fn * j)
    return kernel / kernel.sum()


def apply_sinc_filter(raw: Waveform, constraints: PulseConstraints) -> Waveform:
    """Convolve the segment sequence with the band-limiting sinc kernel.

    Zero amplitude is assumed outside the pulse window; the output grid
    equals the input grid and a constant waveform is unchanged (DC gain 1).
    """
    if constraints.filter_kind != "sinc":
        raise ConstraintError("apply_sinc_filter requires filter_kind == 'sinc'")
    kernel = sinc_kernel(constraints.f_cutoff, raw.grid.segment_duration)
    # full convolution sliced to the input window (np.convolve's "same" mode
    # follows the longer array, which may be the kernel)
    full = np.convolve(raw.segments, kernel.astype(np.complex128))
    start = (len(kernel) - 1) // 2
    filtered = full[start:start + len(raw.segments)]
    return replace(raw, segments=filtered)


def sinc_filter_matrix(n_segments: int, f_cutoff_mhz: float,
                       sample_period_ns: float) -> np.ndarray:
    """Dense matrix form of :func:`apply_sinc_filter` on n segments.

    Used by the optimizer to backpropagate through the (linear) filter.
    """
    kernel = sinc_kernel(f_cutoff_mhz, sample_period_ns)
    half = (len(kernel) - 1) // 2
    mat = np.zeros((n_segments, n_segments))
    for row in range(n_segments):
        for off, h in enumerate(kernel):
            col = row + off - half
            if 0 <= col < n_segments:
                mat[row, col] += h
    return mat


def resample_to_hardware_grid(w: Waveform, dt: float = DT_NS) -> Waveform:
    """Piecewise-constant resampling onto the dt grid.

    The total sample count is padded with trailing zeros up to the next
    multiple of 16; padding is flagged in the label.
    """
    if w.grid.duration <= 0 or len(w.segments) == 0:
        raise ConstraintError("cannot resample a zero-duration waveform")
    seg_dur = w.grid.segment_duration
    rep = seg_dur / dt
    rep_int = round(rep)
    if rep_int < 1 or abs(rep - rep_int) > 1e-9 * max(1.0, rep):
        raise ConstraintError(
            f"dt = {dt} ns does not divide the segment duration {seg_dur} ns")
    samples = np.repeat(w.segments, rep_int)
    pad = (-len(samples)) % SAMPLE_MULTIPLE
    label = w.label
    if pad:
        samples = np.concatenate([samples, np.zeros(pad, dtype=np.complex128)])
        label = f"{label}+padded{pad}" if label else f"padded{pad}"
    grid = TimeGrid(dt=dt, segment_count=len(samples), samples_per_segment=1)
    return Waveform(grid=grid, segments=samples, label=label)


def square_waveform(theta: float, tau_g: float, grid: TimeGrid,
                    label: str = "square") -> Waveform:
    """Constant-amplitude single-quadrature pulse with area theta."""
    if tau_g <= 0:
        raise ConstraintError("tau_g must be positive")
    if abs(grid.duration - tau_g) > 0.5 * grid.dt:
        raise ConstraintError(
            f"grid duration {grid.duration} ns does not match tau_g {tau_g} ns")
    amp = theta / grid.duration
    return Waveform(grid=grid,
                    segments=np.full(grid.segment_count, amp, dtype=np.complex128),
                    label=label)


def drag_waveform(theta: float, tau_g: float, beta_drag: float,
                  grid: TimeGrid, anharmonicity: float = -2.0 * math.pi * 0.33,
                  label: str = "drag") -> Waveform:
    """Analytic DRAG pulse: offset-corrected Gaussian on I, scaled Gaussian
    derivative on Q.

    sigma = tau_g/4 with truncation at +-2 sigma, the Gaussian is offset so
    the envelope starts and ends at zero, and I is normalized so its time
    integral equals theta.  Q = -beta_drag * (dI/dt) / anharmonicity
    (antisymmetric), the first-order leakage-cancelling quadrature.
    """
    if not (0.0 < theta <= 2.0 * math.pi):
        raise ConstraintError("theta must lie in (0, 2*pi]")
    if tau_g <= 0:
        raise ConstraintError("tau_g must be positive")
    if abs(grid.duration - tau_g) > 0.5 * grid.dt:
        raise ConstraintError(
            f"grid duration {grid.duration} ns does not match tau_g {tau_g} ns")
    sigma = tau_g / 4.0
    center = tau_g / 2.0
    ts = grid.segment_duration
    t = (np.arange(grid.segment_count) + 0.5) * ts
    gauss = np.exp(-((t - center) ** 2) / (2.0 * sigma**2))
    envelope = gauss - math.exp(-2.0)  # zero at +-2 sigma
    norm = theta / (envelope.sum() * ts)
    i_vals = norm * envelope
    if anharmonicity == 0.0:
        raise ConstraintError("anharmonicity must be nonzero")
    di_dt = norm * gauss * (-(t - center) / sigma**2)
    q_vals = -beta_drag * di_dt / anharmonicity
    return Waveform(grid=grid, segments=i_vals + 1j * q_vals, label=label)


def spectrum(w: Waveform, device=None, reference_qubit: int = 0,
             zero_pad_factor: int = 8) -> Spectrum:
    """Zero-padded DFT magnitudes of the I and Q sequences.

    Leakage markers are computed from the device qubit frequencies relative
    to ``reference_qubit``: the neighbor-qubit transition (omega_i - omega_ref)
    and the two-photon transition to the second excited state,
    2(omega_i - omega_ref) - chi_i, both reported in MHz.
    """
    if len(w.segments) == 0:
        raise ConstraintError("cannot analyze an empty waveform")
    ts = w.grid.segment_duration
    nfft = max(64, zero_pad_factor * len(w.segments))
    freqs_ghz = np.fft.rfftfreq(nfft, d=ts)
    mag_i = np.abs(np.fft.rfft(w.i_values, n=nfft)) / len(w.segments)
    mag_q = np.abs(np.fft.rfft(w.q_values, n=nfft)) / len(w.segments)
    markers = []
    if device is not None:
        omega_ref = device.omega[reference_qubit]
        for i in range(device.qubit_count):
            d1 = (device.omega[i] - omega_ref) / (2.0 * math.pi) * 1e3
            d2 = (2.0 * (device.omega[i] - omega_ref)
                  - device.anharmonicity[i]) / (2.0 * math.pi) * 1e3
            markers.append((f"delta1_q{i}", d1))
            markers.append((f"delta2_q{i}", d2))
    return Spectrum(frequencies=freqs_ghz * 1e3, magnitudes_i=mag_i,
                    magnitudes_q=mag_q, leakage_markers=tuple(markers))


def save_waveform(w: Waveform, path) -> None:
    """Write a waveform as JSON on the hardware dt grid."""
    if w.grid.samples_per_segment != 1:
        w = resample_to_hardware_grid(w, w.grid.dt)
    payload = {
        "label": w.label,
        "dt_ns": w.grid.dt,
        "samples": [{"i": float(s.real), "q": float(s.imag)}
                    for s in w.segments],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_waveform(path) -> Waveform:
    """Read a waveform JSON file written by :func:`save_waveform`."""
    with open(path) as fh:
        payload = json.load(fh)
    samples = np.array([s["i"] + 1j * s["q"] for s in payload["samples"]],
                       dtype=np.complex128)
    grid = TimeGrid(dt=float(payload["dt_ns"]), segment_count=len(samples),
                    samples_per_segment=1)
    return Waveform(grid=grid, segments=samples, label=payload.get("label", ""))


def save_spectrum_csv(spec: Spectrum, path) -> None:
    """Spectrum CSV: header, marker comment lines, then freq/magnitude rows."""
    with open(path, "w") as fh:
        fh.write("freq_mhz,mag_i,mag_q\n")
        for label, freq in spec.leakage_markers:
            fh.write(f"# marker,{label},{freq:.9g}\n")
        for f, mi, mq in zip(spec.frequencies, spec.magnitudes_i,
                             spec.magnitudes_q):
            fh.write(f"{f:.9g},{mi:.9g},{mq:.9g}\n")

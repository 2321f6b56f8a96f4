"""Repeated-pulse error amplification, decay-model fits, and statistics.

A gate is applied an odd number of times so that coherent rotation errors
accumulate linearly and rise above the SPAM floor.  The excited-state
probability versus repetition count is fitted with a damped-cosine model
whose envelope is either exponential (relaxation-dominated) or Gaussian
(quasi-static dephasing-dominated); the per-gate error splits into a
coherent rotation part eps_r and an incoherent decay part beta, combined
in quadrature.  Aggregating fits over qubits and days yields the
device-variability statistics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .device import DeviceModel, NoiseRealization
from .errors import FitError, ModelError
from .pulses import Waveform
from .sim import evolve_density, pulse_superoperator

DEFAULT_REPETITIONS = tuple(range(1, 42, 2))
DEFAULT_VISIBILITY = 0.95


@dataclass(frozen=True)
class QuasiStaticConfig:
    """Magnitudes of the slow noise sampled around each amplification run.

    ``*_static`` terms are drawn once per record (a fixed miscalibration for
    that qubit/day); ``*_spread`` terms are redrawn for every averaging pass,
    modeling drift between shots.  Detunings are in rad/ns.
    """

    delta_static: float = 2.0 * np.pi * 0.05e-3
    delta_spread: float = 2.0 * np.pi * 0.015e-3
    eps_static: float = 1.6e-3
    eps_spread: float = 0.5e-3
    draws: int = 16
    visibility: float = DEFAULT_VISIBILITY
    include_t1: bool = True


@dataclass(frozen=True)
class AmplificationRecord:
    """P(1) versus odd repetition count for one pulse on one qubit."""

    qubit: int
    pulse_label: str
    repetition_counts: np.ndarray
    probabilities: np.ndarray
    shots: int | None
    mode: str
    pulse_duration_ns: float = 0.0

    def __post_init__(self):
        reps = np.asarray(self.repetition_counts, dtype=int)
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "repetition_counts", reps)
        object.__setattr__(self, "probabilities", probs)
        if self.mode not in ("serial", "parallel"):
            raise ModelError(f"unknown mode {self.mode!r}")
        if len(reps) != len(probs):
            raise ModelError("repetition counts and probabilities differ in length")
        if np.any(np.diff(reps) <= 0):
            raise ModelError("repetition counts must be strictly increasing")
        if np.any(reps % 2 == 0):
            raise ModelError("repetition counts must be odd")
        if np.any((probs < 0) | (probs > 1)):
            raise ModelError("probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class FitResult:
    """Damped-cosine fit of an amplification record."""

    p1: float
    eps_r: float
    beta: float
    model: str
    covariance: np.ndarray
    pulse_duration_ns: float = 0.0
    rss: float = 0.0
    n_points: int = 0

    @property
    def eps(self) -> float:
        """Total per-gate error: quadrature sum of rotation and decay parts."""
        return float(np.hypot(self.eps_r, self.beta))

    @property
    def t1_estimate(self) -> float:
        """Relaxation time implied by the decay per gate, tau_g / beta."""
        if self.beta <= 0:
            return float("inf")
        return self.pulse_duration_ns / self.beta

    def aicc(self) -> float:
        n, k = self.n_points, 3
        if n <= k + 1:
            return float("inf")
        rss = max(self.rss, 1e-300)
        return n * np.log(rss / n) + 2 * k + 2 * k * (k + 1) / (n - k - 1)


@dataclass(frozen=True)
class VariabilityReport:
    """Qubit-by-day error statistics with population standard deviations."""

    eps_matrix: np.ndarray            # (qubits, days)
    mean_per_qubit: np.ndarray        # averaged over days
    std_per_qubit: np.ndarray
    mean_per_day: np.ndarray          # averaged over qubits
    std_per_day: np.ndarray
    grand_mean: float
    reduction_ratios: np.ndarray | None = None


def _draw_noise(rng: np.random.Generator, config: QuasiStaticConfig,
                static_delta: float, static_eps: float) -> NoiseRealization:
    delta = static_delta + rng.normal(0.0, config.delta_spread)
    eps = static_eps + rng.normal(0.0, config.eps_spread)
    return NoiseRealization(delta=delta, eps_common=eps,
                            include_t1=config.include_t1)


def run_amplification(w: Waveform, device: DeviceModel, qubit: int,
                      n_list=DEFAULT_REPETITIONS, shots: int | None = 1024,
                      mode: str = "serial", seed: int = 0,
                      config: QuasiStaticConfig | None = None,
                      ) -> AmplificationRecord:
    """Simulate P(1) after n repetitions of w for each odd n in n_list.

    A static miscalibration (detuning + amplitude) is drawn once for the
    record; each of ``config.draws`` averaging passes adds a fresh slow-drift
    component.  In parallel mode every nearest neighbor drives the same
    pulse shape simultaneously; a fraction x_coupling of its drive leaks
    into the victim with a quasi-static RF phase (uniform per draw), which
    for identical waveforms is exactly a complex scale factor on the victim
    drive, and the neighbor power Stark-shifts the victim.  The measured
    probability is the SPAM-scaled Lindblad population, binomially sampled.
    """
    if config is None:
        config = QuasiStaticConfig()
    n_list = np.asarray(sorted(n_list), dtype=int)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xA3F, qubit]))
    static_delta = rng.normal(0.0, config.delta_static)
    static_eps = rng.normal(0.0, config.eps_static)

    d = device.hilbert_levels
    rho0 = np.zeros((d, d), dtype=np.complex128)
    rho0[0, 0] = 1.0
    neighbors = device.neighbors(qubit) if mode == "parallel" else []

    # one single-pulse superoperator per slow-drift draw, reused for all n
    ct = device.crosstalk
    superops = []
    for _ in range(config.draws):
        noise = _draw_noise(rng, config, static_delta, static_eps)
        w_draw = w
        extra_delta = None
        if neighbors:
            leak = sum(ct.x_coupling
                       * (1.0 + rng.normal(0.0, config.eps_static))
                       * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
                       for _ in neighbors)
            w_draw = w.scaled(1.0 + leak)
            extra_delta = (ct.stark_coefficient * len(neighbors)
                           * np.abs(w.segments) ** 2)
        superops.append(pulse_superoperator(
            w_draw, noise, device, qubit, extra_delta=extra_delta))

    probs = []
    powers = [np.eye(d * d, dtype=np.complex128) for _ in superops]
    prev_n = 0
    for n in n_list:
        for i, sup in enumerate(superops):
            powers[i] = np.linalg.matrix_power(sup, int(n) - prev_n) @ powers[i]
        prev_n = int(n)
        p_mean = float(np.mean([evolve_density(pw, rho0)[1, 1].real
                                for pw in powers]))
        p1 = config.visibility * min(1.0, max(0.0, p_mean))
        if shots is not None:
            p1 = rng.binomial(shots, p1) / shots
        probs.append(p1)
    return AmplificationRecord(
        qubit=qubit, pulse_label=w.label, repetition_counts=n_list,
        probabilities=np.array(probs), shots=shots, mode=mode,
        pulse_duration_ns=w.duration)


# ---------------------------------------------------------------------------
# Damped-cosine fits
# ---------------------------------------------------------------------------

def _envelope(n, beta, model):
    if model == "exp_cos":
        return np.exp(-beta * n)
    return np.exp(-((beta * n) ** 2))


def _model_p1(n, v, eps_r, beta, model):
    return 0.5 * v * (1.0 - np.cos(np.pi + n * eps_r) * _envelope(n, beta, model))


def _initial_guess(record: AmplificationRecord) -> tuple[float, float, float]:
    n = record.repetition_counts.astype(float)
    p = record.probabilities
    v0 = float(np.clip(p[0], 0.3, 1.0))
    # signal s = cos(pi + n eps_r) * envelope = 1 - 2 p / v
    s = np.clip(1.0 - 2.0 * p / v0, -1.0, 1.0)
    # envelope from |s|: log-linear slope where |s| is usable
    mask = np.abs(s) > 0.05
    if mask.sum() >= 2:
        slope = np.polyfit(n[mask], np.log(np.abs(s[mask])), 1)[0]
        beta0 = max(1e-6, -slope)
    else:
        beta0 = 1e-3
    # residual oscillation frequency via zero-padded FFT of s - mean
    if len(n) >= 4 and n[1] - n[0] > 0:
        dn = n[1] - n[0]
        mag = np.abs(np.fft.rfft(s - s.mean(), n=8 * len(s)))
        freqs = np.fft.rfftfreq(8 * len(s), d=dn)
        eps0 = 2.0 * np.pi * freqs[int(np.argmax(mag[1:])) + 1]
    else:
        eps0 = 1e-3
    return v0, max(eps0, 1e-5), beta0


def _fit(record: AmplificationRecord, model: str,
         fix_p1: bool = False) -> FitResult:
    if len(record.repetition_counts) < 6:
        raise FitError("need at least 6 repetition points")
    n = record.repetition_counts.astype(float)
    p = record.probabilities
    if record.shots is not None:
        sigma = np.sqrt(np.clip(p * (1 - p), 1e-4, None) / record.shots)
    else:
        sigma = np.full_like(p, 1.0)

    v0, eps0, beta0 = _initial_guess(record)
    if fix_p1:
        v_fixed = float(p[0])

        def f(nn, eps_r, beta):
            return _model_p1(nn, v_fixed, eps_r, beta, model)

        starts = [(eps0, beta0), (eps0 * 0.5, beta0 * 2.0),
                  (eps0 * 2.0, beta0 * 0.5), (1e-4, 1e-4)]
        lower, upper = [0.0, 0.0], [np.pi, 1.0]
    else:
        def f(nn, v, eps_r, beta):
            return _model_p1(nn, v, eps_r, beta, model)

        starts = [(v0, eps0, beta0),
                  (v0, eps0 * 0.5, beta0 * 2.0),
                  (v0, eps0 * 2.0, beta0 * 0.5),
                  (0.95, 1e-4, 1e-4)]
        lower, upper = [0.0, 0.0, 0.0], [1.2, np.pi, 1.0]
    last_exc = None
    for p0 in starts:
        try:
            popt, pcov = scipy.optimize.curve_fit(
                f, n, p, p0=p0, sigma=sigma, absolute_sigma=record.shots is not None,
                bounds=(lower, upper), maxfev=40000)
        except RuntimeError as exc:
            last_exc = exc
            continue
        resid = p - f(n, *popt)
        if fix_p1:
            v, eps_r, beta = v_fixed, popt[0], popt[1]
        else:
            v, eps_r, beta = popt
        if beta < 1e-12:
            warnings.warn("decay rate pinned at the beta >= 0 boundary",
                          stacklevel=2)
        return FitResult(p1=float(v), eps_r=float(eps_r),
                         beta=float(beta), model=model,
                         covariance=pcov,
                         pulse_duration_ns=record.pulse_duration_ns,
                         rss=float(np.sum(resid**2)), n_points=len(n))
    raise FitError(
        f"{model} fit failed to converge after {len(starts)} starts "
        f"(qubit {record.qubit}, pulse {record.pulse_label!r}): {last_exc}")


def fit_exp_cos(record: AmplificationRecord, fix_p1: bool = False) -> FitResult:
    """Fit P(1) = v/2 (1 - cos(pi + n*eps_r) exp(-beta n))."""
    return _fit(record, "exp_cos", fix_p1)


def fit_gauss_cos(record: AmplificationRecord, fix_p1: bool = False) -> FitResult:
    """Fit P(1) = v/2 (1 - cos(pi + n*eps_r) exp(-(beta n)^2))."""
    return _fit(record, "gauss_cos", fix_p1)


def select_model(record: AmplificationRecord, fix_p1: bool = False):
    """Fit both envelope forms; pick the lower AICc (ties go to exp_cos)."""
    exp_fit = fit_exp_cos(record, fix_p1)
    gauss_fit = fit_gauss_cos(record, fix_p1)
    chosen = exp_fit if exp_fit.aicc() <= gauss_fit.aicc() else gauss_fit
    return chosen, exp_fit, gauss_fit


def variability_report(fits, baseline=None) -> VariabilityReport:
    """Statistics of a (qubits x days) grid of fits or eps values.

    Standard deviations are population (divide by N) over the stated axis.
    ``baseline`` (same shape) yields per-cell ratios baseline/fits.
    """
    eps = np.array([[f.eps if isinstance(f, FitResult) else float(f)
                     for f in row] for row in fits], dtype=float)
    ratios = None
    if baseline is not None:
        base = np.array([[b.eps if isinstance(b, FitResult) else float(b)
                          for b in row] for row in baseline], dtype=float)
        if base.shape != eps.shape:
            raise ModelError("baseline grid shape mismatch")
        ratios = base / eps
    return VariabilityReport(
        eps_matrix=eps,
        mean_per_qubit=eps.mean(axis=1),
        std_per_qubit=eps.std(axis=1),
        mean_per_day=eps.mean(axis=0),
        std_per_day=eps.std(axis=0),
        grand_mean=float(eps.mean()),
        reduction_ratios=ratios)

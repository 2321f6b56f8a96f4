"""Error amplification records, damped-cosine fits, variability statistics."""

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustpulse.errors import ModelError
from robustpulse.metrology import (AmplificationRecord, FitResult,
                                   QuasiStaticConfig, fit_exp_cos,
                                   fit_gauss_cos, run_amplification,
                                   select_model, variability_report)

N_DEFAULT = np.arange(1, 42, 2)


def synthetic_record(eps_r, beta, model="exp_cos", v=0.95, shots=None,
                     rng=None, n=N_DEFAULT):
    env = np.exp(-beta * n) if model == "exp_cos" else np.exp(-(beta * n) ** 2)
    p = 0.5 * v * (1.0 - np.cos(np.pi + n * eps_r) * env)
    if shots is not None:
        p = rng.binomial(shots, p) / shots
    return AmplificationRecord(qubit=0, pulse_label="syn",
                               repetition_counts=n, probabilities=p,
                               shots=shots, mode="serial",
                               pulse_duration_ns=71.0)


def test_record_validation():
    with pytest.raises(ModelError):
        AmplificationRecord(0, "x", np.array([1, 2, 3]),
                            np.zeros(3), None, "serial")  # even count
    with pytest.raises(ModelError):
        AmplificationRecord(0, "x", np.array([3, 1]),
                            np.zeros(2), None, "serial")  # not increasing
    with pytest.raises(ModelError):
        AmplificationRecord(0, "x", np.array([1, 3]),
                            np.array([0.5, 1.5]), None, "serial")
    with pytest.raises(ModelError):
        AmplificationRecord(0, "x", np.array([1, 3]),
                            np.zeros(2), None, "sideways")


def test_exp_fit_recovers_exactly():
    rec = synthetic_record(5.47e-3, 1.05e-3)
    fit = fit_exp_cos(rec)
    assert fit.eps_r == pytest.approx(5.47e-3, abs=1e-9)
    assert fit.beta == pytest.approx(1.05e-3, abs=1e-9)
    assert fit.p1 == pytest.approx(0.95, abs=1e-9)
    assert fit.eps == pytest.approx(np.hypot(5.47e-3, 1.05e-3), abs=1e-9)
    assert fit.t1_estimate == pytest.approx(71.0 / 1.05e-3, rel=1e-6)


def test_gauss_fit_recovers_exactly():
    rec = synthetic_record(8e-3, 4e-3, model="gauss_cos")
    fit = fit_gauss_cos(rec)
    assert fit.eps_r == pytest.approx(8e-3, abs=1e-6)
    assert fit.beta == pytest.approx(4e-3, abs=1e-6)


@given(eps_r=st.floats(1e-3, 0.05), beta=st.floats(1e-4, 5e-3))
@settings(max_examples=30, deadline=None)
def test_quadrature_sum_identity(eps_r, beta):
    fit = FitResult(p1=0.95, eps_r=eps_r, beta=beta, model="exp_cos",
                    covariance=np.eye(3))
    assert fit.eps == pytest.approx(np.sqrt(eps_r**2 + beta**2), rel=1e-12)


def test_model_selection_prefers_true_envelope():
    rec_exp = synthetic_record(2e-2, 2e-3, model="exp_cos")
    chosen, _, _ = select_model(rec_exp)
    assert chosen.model == "exp_cos"
    rec_gauss = synthetic_record(2e-2, 6e-3, model="gauss_cos")
    chosen, _, _ = select_model(rec_gauss)
    assert chosen.model == "gauss_cos"


def test_fix_p1_pins_visibility():
    rng = np.random.default_rng(0)
    rec = synthetic_record(3e-2, 1e-3, shots=4096, rng=rng)
    fit = fit_exp_cos(rec, fix_p1=True)
    assert fit.p1 == rec.probabilities[0]
    assert fit.covariance.shape == (2, 2)


def test_variability_report_reference_row():
    # Frozen five-qubit epsilon row and its aggregate statistics.
    row = np.array([5.57, 12.5, 5.20, 6.22, 6.52]) * 1e-3
    report = variability_report(row[:, None])
    assert report.mean_per_day[0] == pytest.approx(7.20e-3, abs=5e-6)
    assert report.std_per_day[0] == pytest.approx(2.69e-3, abs=5e-6)


def test_variability_report_population_std_and_ratios():
    eps = np.array([[1.0, 3.0], [2.0, 4.0]])
    base = 2.0 * eps
    report = variability_report(eps, baseline=base)
    assert report.grand_mean == pytest.approx(2.5)
    # population std over days for qubit 0: std([1, 3]) with N in the
    # denominator equals 1.0
    assert report.std_per_qubit[0] == pytest.approx(1.0)
    assert np.allclose(report.reduction_ratios, 2.0)


def test_variability_report_shape_mismatch():
    with pytest.raises(ModelError):
        variability_report(np.ones((2, 2)), baseline=np.ones((3, 2)))


def test_run_amplification_is_deterministic(drag_pi, device):
    r1 = run_amplification(drag_pi, device, 0, shots=512, seed=5)
    r2 = run_amplification(drag_pi, device, 0, shots=512, seed=5)
    assert np.array_equal(r1.probabilities, r2.probabilities)
    r3 = run_amplification(drag_pi, device, 0, shots=512, seed=6)
    assert not np.array_equal(r1.probabilities, r3.probabilities)


def test_run_amplification_record_fields(drag_pi, device):
    rec = run_amplification(drag_pi, device, 2, shots=None, seed=1)
    assert rec.qubit == 2
    assert rec.mode == "serial"
    assert rec.pulse_duration_ns == pytest.approx(drag_pi.duration)
    assert np.all(rec.repetition_counts % 2 == 1)
    assert np.all((rec.probabilities >= 0) & (rec.probabilities <= 1))
    # SPAM visibility caps P(1) below 1
    assert rec.probabilities.max() <= QuasiStaticConfig().visibility + 1e-12


def test_parallel_mode_increases_default_pulse_error(drag_pi, device):
    serial = run_amplification(drag_pi, device, 2, shots=None, seed=11,
                               mode="serial")
    parallel = run_amplification(drag_pi, device, 2, shots=None, seed=11,
                                 mode="parallel")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit_s, _, _ = select_model(serial)
        fit_p, _, _ = select_model(parallel)
    assert fit_p.eps > fit_s.eps

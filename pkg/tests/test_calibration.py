"""Front-end model, Rabi-rate mapping, predistortion, fine scale scans."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustpulse.calibration import (AmpMap, CalibrationResult, FrontEndModel,
                                     calibrate, coarse_calibrate,
                                     fine_calibrate, fit_rabi_rate,
                                     rabi_experiment, scan_scale)
from robustpulse.errors import CalibrationError
from robustpulse.pulses import TimeGrid, square_waveform


@pytest.fixture(scope="module")
def probe():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    return square_waveform(np.pi, grid.duration, grid, label="probe")


def test_front_end_rejects_non_monotone():
    with pytest.raises(CalibrationError):
        FrontEndModel(g1=1.0, g3=-0.4)  # derivative 1 - 1.2 A^2 < 0 at A=1


def test_cubic_predistortion_root():
    # Frozen oracle: the amplitude solving A - 0.2 A^3 = 0.5 via bisection
    # on the default cubic front end.
    front_end = FrontEndModel()
    amp_map = coarse_calibrate(front_end, shots=None)
    a = float(amp_map.predistort("I", 0.5))
    assert a == pytest.approx(0.5297299006510505, abs=2e-4)
    # and the forward model maps it back
    assert front_end.channel_rate("I", a) == pytest.approx(0.5, abs=2e-4)


def test_coarse_map_accuracy():
    front_end = FrontEndModel()
    amp_map = coarse_calibrate(front_end, shots=4096, seed=0)
    amps = np.linspace(0.15, 0.85, 15)
    fitted = amp_map.rate("I", amps)
    true = front_end.channel_rate("I", amps)
    rms = np.sqrt(np.mean((fitted / true - 1.0) ** 2))
    assert rms < 0.02


def test_predistort_round_trip_within_range():
    front_end = FrontEndModel()
    amp_map = coarse_calibrate(front_end, shots=None)
    rates = np.linspace(0.12, 0.7, 9)
    amps = amp_map.predistort("I", rates)
    back = amp_map.rate("I", amps)
    # forward and inverse maps are independent monotone interpolants of the
    # same samples, so the round trip is interpolation-accurate, not exact
    assert np.allclose(back, rates, rtol=2e-4)


def test_predistort_rejects_out_of_range():
    amp_map = coarse_calibrate(FrontEndModel(), shots=None)
    with pytest.raises(CalibrationError):
        amp_map.predistort("I", 5.0)


def test_amp_map_lists_non_monotone_points():
    with pytest.raises(CalibrationError, match="A=0.3"):
        AmpMap(amplitudes=np.array([0.1, 0.2, 0.3]),
               rates_i=np.array([0.1, 0.3, 0.2]),
               rates_q=np.array([0.1, 0.2, 0.3]))


def test_rabi_fit_recovers_rate():
    front_end = FrontEndModel()
    t = np.linspace(0.0, 120.0, 96)
    p1 = rabi_experiment(front_end, "I", 0.5, t)
    rate = fit_rabi_rate(t, p1)
    assert rate == pytest.approx(front_end.channel_rate("I", 0.5), rel=1e-6)


@given(amp=st.floats(0.2, 0.8))
@settings(max_examples=15, deadline=None)
def test_rabi_fit_property(amp):
    front_end = FrontEndModel()
    true_rate = float(front_end.channel_rate("I", amp))
    t = np.linspace(0.0, 6.0 * np.pi / true_rate, 96)
    rate = fit_rabi_rate(t, rabi_experiment(front_end, "I", amp, t))
    assert rate == pytest.approx(true_rate, rel=1e-5)


def test_fine_calibration_recovers_hidden_scales(probe):
    front_end = FrontEndModel(true_s_amp=1.05, true_s_rel=0.98)
    s_grid = np.arange(0.90, 1.1001, 0.005)
    s_amp, s_rel = fine_calibrate(front_end, probe, (5, 9), s_grid)
    # recovered correction inverts the hidden scale to within one grid step
    assert abs(1.0 / s_amp - 1.05) <= 0.005 + 1e-12
    assert abs(1.0 / s_rel - 0.98) <= 0.005 + 1e-12


def test_fine_calibration_curvature_grows_quadratically(probe):
    # The fidelity dip sharpens as n^2 with the repetition count.
    front_end = FrontEndModel()
    s = np.array([0.99, 1.00, 1.01])

    def curvature(reps):
        fid = scan_scale(front_end, probe, [reps], s, "amp")[0]
        return (fid[0] + fid[2] - 2.0 * fid[1]) / 0.01**2

    ratio = curvature(9) / curvature(5)
    assert ratio == pytest.approx(81.0 / 25.0, rel=0.05)


def test_fine_calibration_requires_two_odd_counts(probe):
    front_end = FrontEndModel()
    s_grid = np.arange(0.95, 1.051, 0.005)
    with pytest.raises(CalibrationError):
        fine_calibrate(front_end, probe, (5,), s_grid)
    with pytest.raises(CalibrationError):
        fine_calibrate(front_end, probe, (4, 8), s_grid)


def test_fine_calibration_boundary_maximum_rejected(probe):
    front_end = FrontEndModel(true_s_amp=1.06)  # optimum outside the grid
    s_grid = np.arange(0.95, 1.051, 0.005)
    with pytest.raises(CalibrationError, match="boundary"):
        fine_calibrate(front_end, probe, (5, 9), s_grid)


def test_full_calibration_residual_is_small(probe):
    front_end = FrontEndModel(true_s_amp=1.03, true_s_rel=0.99)
    result = calibrate(front_end, probe, shots=4096, seed=1)
    assert isinstance(result, CalibrationResult)
    assert result.residual_infidelity_estimate < 1e-3


def test_calibration_is_deterministic(probe):
    front_end = FrontEndModel(true_s_amp=1.02)
    r1 = calibrate(front_end, probe, shots=2048, seed=9)
    r2 = calibrate(front_end, probe, shots=2048, seed=9)
    assert r1.s_amp == r2.s_amp
    assert r1.s_rel == r2.s_rel
    assert np.array_equal(r1.amp_map.rates_i, r2.amp_map.rates_i)

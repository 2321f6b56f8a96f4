"""Time grids, analytic waveforms, the band-limiting filter, and file I/O."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustpulse.device import valencia_like
from robustpulse.errors import ConstraintError
from robustpulse.io import read_csv
from robustpulse.pulses import (DT_NS, SAMPLE_MULTIPLE, PulseConstraints,
                                TimeGrid, Waveform, apply_sinc_filter,
                                drag_waveform, load_waveform,
                                resample_to_hardware_grid, save_spectrum_csv,
                                save_waveform, sinc_filter_matrix,
                                sinc_kernel, spectrum, square_waveform)


def test_grid_duration_arithmetic():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    assert grid.segment_duration == pytest.approx(3.52)
    assert grid.duration == pytest.approx(70.4)
    assert grid.total_samples == 320
    assert grid.aligned


def test_grid_alignment_flag():
    assert not TimeGrid(dt=0.22, segment_count=5,
                        samples_per_segment=3).aligned
    assert TimeGrid(dt=0.22, segment_count=16,
                    samples_per_segment=1).aligned


def test_grid_rejects_nonpositive():
    with pytest.raises(ConstraintError):
        TimeGrid(dt=0.0)
    with pytest.raises(ConstraintError):
        TimeGrid(segment_count=0)


def test_waveform_segment_count_must_match_grid():
    grid = TimeGrid(segment_count=4)
    with pytest.raises(ConstraintError):
        Waveform(grid=grid, segments=np.zeros(3))


def test_square_waveform_area():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    w = square_waveform(np.pi, grid.duration, grid)
    assert np.allclose(w.q_values, 0.0)
    area = np.sum(w.i_values) * grid.segment_duration
    assert area == pytest.approx(np.pi, rel=1e-12)


def test_square_waveform_duration_mismatch():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    with pytest.raises(ConstraintError):
        square_waveform(np.pi, grid.duration + 1.0, grid)


def test_drag_waveform_shape():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    w = drag_waveform(np.pi, grid.duration, 0.5, grid)
    # I integrates to theta; envelope is symmetric and near zero at the edges
    area = np.sum(w.i_values) * grid.segment_duration
    assert area == pytest.approx(np.pi, rel=1e-12)
    assert np.allclose(w.i_values, w.i_values[::-1], atol=1e-12)
    assert abs(w.i_values[0]) < 0.05 * w.i_values.max()
    # Q is the antisymmetric derivative quadrature with zero net area
    assert np.allclose(w.q_values, -w.q_values[::-1], atol=1e-12)
    assert abs(np.sum(w.q_values)) < 1e-10


def test_drag_waveform_zero_anharmonicity_rejected():
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    with pytest.raises(ConstraintError):
        drag_waveform(np.pi, grid.duration, 0.5, grid, anharmonicity=0.0)


def test_sinc_kernel_dc_gain_is_one():
    kernel = sinc_kernel(30.0, 3.52)
    assert kernel.sum() == pytest.approx(1.0, abs=1e-14)


def test_sinc_filter_preserves_constant():
    # The grid must be longer than the filter kernel (59 taps at this cutoff
    # and segment length) so that some segments are genuinely interior.
    grid = TimeGrid(dt=0.22, segment_count=128, samples_per_segment=16)
    w = Waveform(grid=grid, segments=np.full(128, 0.2 + 0.1j))
    out = apply_sinc_filter(w, PulseConstraints(omega_max=1.0, f_cutoff=30.0))
    # interior segments (away from the zero boundary) keep the DC value
    assert np.allclose(out.segments[40:88], 0.2 + 0.1j, atol=1e-9)


def test_sinc_filter_attenuates_above_cutoff():
    grid = TimeGrid(dt=0.22, segment_count=64, samples_per_segment=4)
    ts = grid.segment_duration
    t = np.arange(64) * ts
    f_hi = 100.0 * 1e-3  # 100 MHz in GHz
    w = Waveform(grid=grid, segments=np.sin(2 * np.pi * f_hi * t))
    out = apply_sinc_filter(w, PulseConstraints(omega_max=1.0, f_cutoff=30.0))
    assert np.max(np.abs(out.segments)) < 0.1 * np.max(np.abs(w.segments))


def test_sinc_filter_matrix_matches_convolution():
    grid = TimeGrid(dt=0.22, segment_count=24, samples_per_segment=8)
    rng = np.random.default_rng(0)
    w = Waveform(grid=grid, segments=rng.normal(size=24))
    out = apply_sinc_filter(w, PulseConstraints(omega_max=1.0, f_cutoff=30.0))
    mat = sinc_filter_matrix(24, 30.0, grid.segment_duration)
    assert np.allclose(mat @ w.segments.real, out.segments.real, atol=1e-12)


def test_resample_pads_to_sample_multiple():
    grid = TimeGrid(dt=0.22, segment_count=5, samples_per_segment=3)
    w = Waveform(grid=grid, segments=np.arange(5, dtype=float), label="p")
    out = resample_to_hardware_grid(w)
    assert out.grid.total_samples % SAMPLE_MULTIPLE == 0
    assert "padded" in out.label
    assert np.allclose(out.segments[:15], np.repeat(np.arange(5), 3))
    assert np.allclose(out.segments[15:], 0.0)


def test_waveform_json_round_trip(tmp_path):
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    w = drag_waveform(np.pi, grid.duration, 0.5, grid, label="rt")
    path = tmp_path / "w.json"
    save_waveform(w, path)
    payload = json.loads(path.read_text())
    assert set(payload) == {"label", "dt_ns", "samples"}
    assert payload["dt_ns"] == 0.22
    assert all(set(s) == {"i", "q"} for s in payload["samples"])
    back = load_waveform(path)
    assert back.grid.dt == 0.22
    # same piecewise-constant values on the hardware grid
    assert np.allclose(back.segments, np.repeat(w.segments, 16))


def test_spectrum_markers_and_csv(tmp_path):
    device = valencia_like()
    grid = TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)
    w = drag_waveform(np.pi, grid.duration, 0.5, grid)
    spec = spectrum(w, device=device, reference_qubit=0)
    labels = dict(spec.leakage_markers)
    assert labels["delta1_q1"] == pytest.approx(100.0)
    assert labels["delta2_q1"] == pytest.approx(530.0)
    path = tmp_path / "spec.csv"
    save_spectrum_csv(spec, path)
    text = path.read_text().splitlines()
    assert text[0] == "freq_mhz,mag_i,mag_q"
    assert any(line.startswith("# marker,delta1_q1") for line in text)


@given(factor=st.floats(min_value=-3.0, max_value=3.0,
                        allow_nan=False, allow_infinity=False))
@settings(max_examples=50, deadline=None)
def test_scaling_is_linear(factor):
    grid = TimeGrid(dt=0.22, segment_count=8, samples_per_segment=2)
    w = Waveform(grid=grid, segments=np.linspace(0.1, 0.4, 8) + 0.05j)
    out = w.scaled(factor)
    assert np.allclose(out.segments, factor * w.segments)
    assert out.duration == w.duration


@given(n1=st.integers(min_value=1, max_value=50),
       n2=st.integers(min_value=1, max_value=32))
@settings(max_examples=50, deadline=None)
def test_grid_duration_consistency(n1, n2):
    grid = TimeGrid(dt=DT_NS, segment_count=n1, samples_per_segment=n2)
    assert grid.duration == pytest.approx(grid.total_samples * DT_NS)
    assert grid.aligned == (n1 * n2 % 16 == 0)

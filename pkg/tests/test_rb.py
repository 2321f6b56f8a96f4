"""Clifford randomized benchmarking: decompositions, sequences, decay."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustpulse.device import valencia_like
from robustpulse.errors import ModelError
from robustpulse.rb import (RBNoiseConfig, _phase_distance, build_clifford_table,
                            clifford_inverse_index, gamma_analysis,
                            make_sequence, run_rb, rx_matrix, rz_matrix,
                            schedule_unitary, u3_decompose, u3_matrix)


@given(theta=st.floats(-np.pi, np.pi), phi=st.floats(-np.pi, np.pi),
       lam=st.floats(-np.pi, np.pi))
@settings(max_examples=200, deadline=None)
def test_u3_decomposition_property(theta, phi, lam):
    sched = u3_decompose(theta, phi, lam)
    assert _phase_distance(schedule_unitary(sched),
                           u3_matrix(theta, phi, lam)) < 1e-10
    # exactly two driven pulses, both +pi/2
    driven = [(k, a) for k, a in sched if k == "x"]
    assert driven == [("x", np.pi / 2.0)] * 2


def test_u3_special_cases():
    # U3(pi, -pi/2, pi/2) is the X gate
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert _phase_distance(u3_matrix(np.pi, -np.pi / 2.0, np.pi / 2.0),
                           x) < 1e-12
    # Hadamard as Z(pi/2) X(pi/2) Z(pi/2)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    sched = [("z", np.pi / 2.0), ("x", np.pi / 2.0), ("z", np.pi / 2.0)]
    assert _phase_distance(schedule_unitary(sched), h) < 1e-12


def test_negative_x90_frame_trick():
    lhs = rx_matrix(-np.pi / 2.0)
    rhs = rz_matrix(np.pi) @ rx_matrix(np.pi / 2.0) @ rz_matrix(-np.pi)
    assert _phase_distance(lhs, rhs) < 1e-12


def test_clifford_group_properties():
    elements, table = build_clifford_table()
    assert len(elements) == 24
    # every decomposition reconstructs its unitary with at most 1 driven pulse
    for e in elements:
        assert e.driven_count <= 1
        assert _phase_distance(schedule_unitary(e.decomposition),
                               e.unitary) < 1e-8
    # closure: each row and column of the composition table is a permutation
    for i in range(24):
        assert sorted(table[i]) == list(range(24))
        assert sorted(table[:, i]) == list(range(24))
    # inverses compose to the identity element (index 0)
    for i in range(24):
        inv = clifford_inverse_index(i, table)
        assert table[inv, i] == 0


def test_sequences_compose_to_identity():
    elements, table = build_clifford_table()
    rng = np.random.default_rng(0)
    eye = np.eye(2)
    for _ in range(200):
        seq = make_sequence(int(rng.integers(1, 40)), rng, elements, table)
        assert _phase_distance(seq.unitary(), eye) < 1e-10


def test_virtual_z_is_exact():
    # A schedule of only Z rotations reproduces the product of rz matrices
    # to machine precision (no pulse error at all).
    angles = [0.3, -1.2, 2.7]
    sched = [("z", a) for a in angles]
    expected = np.eye(2, dtype=complex)
    for a in angles:
        expected = rz_matrix(a) @ expected
    assert np.linalg.norm(schedule_unitary(sched) - expected) < 1e-12


@pytest.fixture(scope="module")
def rb_setup(request):
    device = valencia_like()
    drag_x90 = request.getfixturevalue("drag_x90")
    drag_pi = request.getfixturevalue("drag_pi")
    return device, {"x90": drag_x90, "x180": drag_pi}


def test_noiseless_rb_survival_is_near_one(rb_setup):
    # The analytic pulse pair has a small intrinsic infidelity (~3e-4), so
    # noise-free survival stays near unity but is not exactly 1.
    device, pset = rb_setup
    noise = RBNoiseConfig(include_t1=False)
    report = run_rb(pset, device, lengths=(1, 4, 16), sequences_per_length=10,
                    shots=None, noise_config=noise, seed=0)
    for j in report.lengths:
        assert np.all(report.survivals[int(j)] > 0.99)


def test_depolarizing_epc_recovery_exact_shots(rb_setup):
    device, pset = rb_setup
    noise = RBNoiseConfig(include_t1=False, depolarizing_rate=2e-3)
    report = run_rb(pset, device, lengths=(1, 4, 16, 64, 128),
                    sequences_per_length=20, shots=None,
                    noise_config=noise, seed=1)
    # The fitted value sits slightly above the injected rate because the
    # driven pulses carry ~1.5e-4 of intrinsic error per Clifford.
    assert report.epc == pytest.approx(2e-3, rel=0.10)
    assert report.epc > 2e-3


def test_rb_is_deterministic(rb_setup):
    device, pset = rb_setup
    kw = dict(lengths=(1, 8), sequences_per_length=10, shots=256,
              noise_config=RBNoiseConfig(), seed=4)
    r1 = run_rb(pset, device, **kw)
    r2 = run_rb(pset, device, **kw)
    for j in (1, 8):
        assert np.array_equal(r1.survivals[j], r2.survivals[j])


def test_rb_requires_both_pulses(rb_setup):
    device, pset = rb_setup
    with pytest.raises(ModelError):
        run_rb({"x90": pset["x90"]}, device)


def test_rb_warns_on_few_sequences(rb_setup):
    device, pset = rb_setup
    with pytest.warns(UserWarning, match="fewer than 10"):
        run_rb(pset, device, lengths=(1,), sequences_per_length=2, shots=None)


def test_gamma_analysis_recovers_moments():
    rng = np.random.default_rng(7)
    samples = rng.gamma(shape=3.0, scale=2e-3, size=4000)
    k, theta, skew = gamma_analysis(samples)
    assert k == pytest.approx(3.0, rel=0.1)
    assert theta == pytest.approx(2e-3, rel=0.1)
    # gamma skewness is 2/sqrt(k)
    assert skew == pytest.approx(2.0 / np.sqrt(3.0), rel=0.2)


def test_gamma_analysis_degenerate_returns_none():
    assert gamma_analysis(np.full(20, 0.01)) is None

"""Shared fixtures: device presets, time grids, and optimized pulses.

Pulse optimizations run once per session with pinned seeds so every test
sees identical waveforms.
"""

import numpy as np
import pytest

from robustpulse.device import valencia_like
from robustpulse.optimizer import (OptimizationSpec, optimize,
                                   target_rotation)
from robustpulse.pulses import (PulseConstraints, TimeGrid, drag_waveform,
                                square_waveform)


@pytest.fixture(scope="session")
def device():
    return valencia_like()


@pytest.fixture(scope="session")
def primitive_grid():
    # 70.4 ns on the hardware sample clock, primitive pi-pulse scale
    return TimeGrid(dt=0.22, segment_count=20, samples_per_segment=16)


@pytest.fixture(scope="session")
def robust_grid():
    # 140.8 ns: twice the primitive duration, within the 2.5x budget
    return TimeGrid(dt=0.22, segment_count=40, samples_per_segment=16)


@pytest.fixture(scope="session")
def constraints():
    return PulseConstraints(omega_max=0.3)


def _optimize_pi(mode, grid, constraints, seed=7, restarts=4):
    spec = OptimizationSpec(target=target_rotation(np.pi, 0.0, 2),
                            robustness_mode=mode, constraints=constraints,
                            grid=grid, restarts=restarts, seed=seed)
    return optimize(spec, label=f"{mode}-pi").waveform


@pytest.fixture(scope="session")
def dephasing_pi(robust_grid, constraints):
    return _optimize_pi("dephasing", robust_grid, constraints)


@pytest.fixture(scope="session")
def amplitude_pi(robust_grid, constraints):
    return _optimize_pi("amplitude", robust_grid, constraints)


@pytest.fixture(scope="session")
def drag_pi(primitive_grid):
    return drag_waveform(np.pi, primitive_grid.duration, 0.5, primitive_grid,
                         label="drag")


@pytest.fixture(scope="session")
def drag_x90(primitive_grid):
    return drag_waveform(np.pi / 2.0, primitive_grid.duration, 0.5,
                         primitive_grid, label="drag-x90")


@pytest.fixture(scope="session")
def square_pi(robust_grid):
    return square_waveform(np.pi, robust_grid.duration, robust_grid,
                           label="square-pi")

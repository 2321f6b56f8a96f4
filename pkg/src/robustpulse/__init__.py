"""Error-robust single-qubit pulse design, simulation, and metrology.

Subpackages and modules:

* :mod:`robustpulse.pulses`      - time grids, waveforms, analytic pulses, I/O
* :mod:`robustpulse.device`      - multi-qubit device models and presets
* :mod:`robustpulse.sim`         - unitary/open-system propagation kernels
* :mod:`robustpulse.optimizer`   - robust pulse optimization and scans
* :mod:`robustpulse.calibration` - simulated front end and its calibration
* :mod:`robustpulse.metrology`   - error amplification, fits, variability
* :mod:`robustpulse.rb`          - Clifford randomized benchmarking
* :mod:`robustpulse.cli`         - command-line interface
"""

from .device import (DeviceModel, NoiseRealization, armonk_like,
                     device_preset, load_device, save_device, valencia_like)
from .errors import (CalibrationError, ConstraintError, FitError, ModelError,
                     RobustPulseError)
from .kernels import BACKEND
from .optimizer import (OptimizationResult, OptimizationSpec, ScanResult,
                        default_ensemble, optimize, scan_robustness,
                        target_rotation)
from .pulses import (DT_NS, PulseConstraints, TimeGrid, Waveform,
                     drag_waveform, load_waveform, save_spectrum_csv,
                     save_waveform, spectrum, square_waveform)
from .sim import (operational_infidelity, propagate, pulse_superoperator,
                  robustness_fidelity)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DT_NS", "CalibrationError", "ConstraintError", "DeviceModel",
    "FitError", "ModelError", "NoiseRealization", "OptimizationResult",
    "OptimizationSpec", "PulseConstraints", "RobustPulseError", "ScanResult",
    "TimeGrid", "Waveform", "armonk_like", "default_ensemble",
    "device_preset", "drag_waveform", "load_device", "load_waveform",
    "operational_infidelity", "optimize", "propagate", "pulse_superoperator",
    "robustness_fidelity", "save_device", "save_spectrum_csv",
    "save_waveform", "scan_robustness", "spectrum", "square_waveform",
    "target_rotation", "valencia_like", "__version__",
]

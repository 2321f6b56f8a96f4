"""Transmon device and quasi-static noise models.

All frequencies are angular and in rad/ns.  The dynamics modules work in the
frame rotating at the drive LO, so only frequency *differences* (detunings,
qubit spacings, anharmonicities) matter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CrosstalkModel:
    """Nearest-neighbor crosstalk under parallel driving.

    ``x_coupling`` is the fraction of a neighbor's drive amplitude leaking
    into the victim's I quadrature; ``stark_coefficient`` converts neighbor
    drive power |gamma|^2 into an effective victim detuning (rad/ns per
    (rad/ns)^2, an AC-Stark-like shift).
    """

    x_coupling: float = 0.02
    stark_coefficient: float = 0.014

    def __post_init__(self):
        if not 0.0 <= self.x_coupling < 1.0:
            raise ModelError("x_coupling must lie in [0, 1)")


@dataclass(frozen=True)
class DeviceModel:
    """Per-qubit frequencies, anharmonicities, T1 times and couplings."""

    omega: np.ndarray          # rad/ns per qubit
    anharmonicity: np.ndarray  # rad/ns per qubit (chi, typically negative)
    t1: np.ndarray             # ns per qubit
    t_phi: np.ndarray | None = None  # pure-dephasing time, ns per qubit
    hilbert_levels: int = 2
    rabi_nonlinearity: tuple = (1.0, 0.0)  # (g1, g3): rate = g1*A + g3*A^3
    crosstalk: CrosstalkModel = field(default_factory=CrosstalkModel)
    pi_duration_ns: float = 71.0  # scale of the primitive Rx(pi) gate
    name: str = "custom"

    def __post_init__(self):
        for attr in ("omega", "anharmonicity", "t1"):
            arr = np.asarray(getattr(self, attr), dtype=float)
            object.__setattr__(self, attr, arr)
        if self.t_phi is not None:
            arr = np.asarray(self.t_phi, dtype=float)
            if len(arr) != len(self.omega):
                raise ModelError("t_phi must have one entry per qubit")
            if np.any(arr <= 0):
                raise ModelError("t_phi must be positive")
            object.__setattr__(self, "t_phi", arr)
        if not (len(self.omega) == len(self.anharmonicity) == len(self.t1)):
            raise ModelError("per-qubit arrays must have equal length")
        if len(self.omega) == 0:
            raise ModelError("device needs at least one qubit")
        if np.any(self.t1 <= 0):
            raise ModelError("T1 must be positive")
        if self.hilbert_levels not in (2, 3):
            raise ModelError("hilbert_levels must be 2 or 3")
        if len(np.unique(self.omega)) != len(self.omega):
            raise ModelError("qubit frequencies must be distinct")

    @property
    def qubit_count(self) -> int:
        return len(self.omega)

    def neighbors(self, qubit: int) -> list[int]:
        """Nearest neighbors by index (linear chain)."""
        out = []
        if qubit > 0:
            out.append(qubit - 1)
        if qubit < self.qubit_count - 1:
            out.append(qubit + 1)
        return out


def valencia_like(hilbert_levels: int = 2,
                  crosstalk: CrosstalkModel | None = None) -> DeviceModel:
    """Five-qubit preset at the scale of a 71 ns primitive pi pulse."""
    omega = TWO_PI * (4.70 + 0.10 * np.arange(5))
    chi = np.full(5, -TWO_PI * 0.330)
    t1 = np.full(5, 70_000.0)
    return DeviceModel(omega=omega, anharmonicity=chi, t1=t1,
                       t_phi=np.full(5, 120_000.0),
                       hilbert_levels=hilbert_levels,
                       crosstalk=crosstalk or CrosstalkModel(),
                       pi_duration_ns=71.0, name="valencia-like")


def armonk_like(hilbert_levels: int = 2) -> DeviceModel:
    """Single-qubit preset with a slow 284 ns primitive pi pulse."""
    return DeviceModel(omega=np.array([TWO_PI * 4.97]),
                       anharmonicity=np.array([-TWO_PI * 0.347]),
                       t1=np.array([140_000.0]),
                       t_phi=np.array([240_000.0]),
                       hilbert_levels=hilbert_levels,
                       pi_duration_ns=284.0, name="armonk-like")


_PRESETS = {"valencia-like": valencia_like, "armonk-like": armonk_like}


def device_preset(name: str, **kwargs) -> DeviceModel:
    try:
        return _PRESETS[name](**kwargs)
    except KeyError:
        raise ModelError(
            f"unknown preset {name!r}; available: {sorted(_PRESETS)}") from None


def save_device(device: DeviceModel, path) -> None:
    payload = {
        "name": device.name,
        "omega_rad_per_ns": device.omega.tolist(),
        "anharmonicity_rad_per_ns": device.anharmonicity.tolist(),
        "t1_ns": device.t1.tolist(),
        "t_phi_ns": None if device.t_phi is None else device.t_phi.tolist(),
        "hilbert_levels": device.hilbert_levels,
        "rabi_nonlinearity": list(device.rabi_nonlinearity),
        "x_coupling": device.crosstalk.x_coupling,
        "stark_coefficient": device.crosstalk.stark_coefficient,
        "pi_duration_ns": device.pi_duration_ns,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_device(path) -> DeviceModel:
    with open(path) as fh:
        payload = json.load(fh)
    return DeviceModel(
        omega=np.array(payload["omega_rad_per_ns"]),
        anharmonicity=np.array(payload["anharmonicity_rad_per_ns"]),
        t1=np.array(payload["t1_ns"]),
        t_phi=(None if payload.get("t_phi_ns") is None
               else np.array(payload["t_phi_ns"])),
        hilbert_levels=int(payload.get("hilbert_levels", 2)),
        rabi_nonlinearity=tuple(payload.get("rabi_nonlinearity", (1.0, 0.0))),
        crosstalk=CrosstalkModel(
            x_coupling=float(payload.get("x_coupling", 0.02)),
            stark_coefficient=float(payload.get("stark_coefficient", 0.014))),
        pi_duration_ns=float(payload.get("pi_duration_ns", 71.0)),
        name=payload.get("name", "custom"))


@dataclass(frozen=True)
class NoiseRealization:
    """A quasi-static noise draw: detuning plus one amplitude-error mode."""

    delta: float = 0.0          # rad/ns detuning (LO minus qubit)
    amp_mode: str = "common"    # common | differential
    eps_common: float = 0.0     # dimensionless multiplicative amplitude error
    eps_i: float = 0.0
    eps_q: float = 0.0
    include_t1: bool = False

    def __post_init__(self):
        if self.amp_mode not in ("common", "differential"):
            raise ModelError(f"unknown amp_mode {self.amp_mode!r}")
        if self.amp_mode == "common" and (self.eps_i or self.eps_q):
            raise ModelError("common mode must not set eps_i/eps_q")
        if self.amp_mode == "differential" and self.eps_common:
            raise ModelError("differential mode must not set eps_common")

    @classmethod
    def none(cls) -> "NoiseRealization":
        return cls()

    @classmethod
    def detuning(cls, delta: float, include_t1: bool = False) -> "NoiseRealization":
        return cls(delta=delta, include_t1=include_t1)

    @classmethod
    def amplitude(cls, eps: float, include_t1: bool = False) -> "NoiseRealization":
        return cls(eps_common=eps, include_t1=include_t1)

    @classmethod
    def differential(cls, eps_i: float, eps_q: float) -> "NoiseRealization":
        return cls(amp_mode="differential", eps_i=eps_i, eps_q=eps_q)

    def is_zero(self) -> bool:
        return (self.delta == 0.0 and self.eps_common == 0.0
                and self.eps_i == 0.0 and self.eps_q == 0.0)

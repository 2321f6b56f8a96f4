"""Single-qubit Clifford randomized benchmarking.

The 24 Clifford gates are transpiled into at most two driven X rotations
(pi/2 or pi pulses) interleaved with virtual Z frame rotations, which cost
no time and introduce no error.  Random sequences of uniform Cliffords plus
a group-inverse recovery compose to identity; their survival probability
decays as A p^J + B, from which the error per Clifford follows.  The
distribution of per-sequence outcomes at fixed length is summarized by a
gamma fit and its skewness, separating coherent from incoherent error
signatures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.stats

from .device import DeviceModel, NoiseRealization
from .errors import FitError, ModelError
from .pulses import Waveform
from .sim import pulse_superoperator, unitary_superoperator

ATOL = 1e-10


def rz_matrix(xi: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * xi), 0.0], [0.0, np.exp(0.5j * xi)]])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    return np.array([
        [np.cos(theta / 2.0), -np.exp(1j * lam) * np.sin(theta / 2.0)],
        [np.exp(1j * phi) * np.sin(theta / 2.0),
         np.exp(1j * (phi + lam)) * np.cos(theta / 2.0)]])


def u3_decompose(theta: float, phi: float, lam: float) -> list:
    """Five-element schedule (temporal order) realizing U3(theta, phi, lam).

    Structure: Rz(phi) . Rx(-pi/2) . Rz(theta) . Rx(pi/2) . Rz(lam), with
    the -pi/2 rotation realized by the frame trick
    Rx(-pi/2) = Rz(pi) . Rx(pi/2) . Rz(-pi) so only +pi/2 driven pulses are
    needed; the surrounding virtual Z's are merged into the schedule.
    """
    return [("z", lam), ("x", np.pi / 2.0), ("z", theta - np.pi),
            ("x", np.pi / 2.0), ("z", phi + np.pi)]


def schedule_unitary(schedule) -> np.ndarray:
    """Matrix of a temporal schedule of ("z", xi) / ("x", theta) items."""
    u = np.eye(2, dtype=np.complex128)
    for kind, angle in schedule:
        gate = rz_matrix(angle) if kind == "z" else rx_matrix(angle)
        u = gate @ u
    return u


def _phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance between unitaries modulo global phase."""
    inner = np.trace(a.conj().T @ b)
    if abs(inner) < 1e-12:
        return 2.0
    phase = inner / abs(inner)
    return float(np.linalg.norm(a * phase - b))


@dataclass(frozen=True)
class CliffordElement:
    index: int
    unitary: np.ndarray
    decomposition: list  # temporal ("z", xi) / ("x", theta) items

    @property
    def driven_count(self) -> int:
        return sum(1 for kind, _ in self.decomposition if kind == "x")


def _clifford_unitaries() -> list[np.ndarray]:
    """The 24 single-qubit Cliffords, generated from H and S mod phase."""
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
    s = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    found = [np.eye(2, dtype=np.complex128)]
    frontier = [np.eye(2, dtype=np.complex128)]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (h, s):
                cand = g @ u
                if all(_phase_distance(cand, v) > 1e-6 for v in found):
                    found.append(cand)
                    nxt.append(cand)
        frontier = nxt
    if len(found) != 24:
        raise ModelError(f"Clifford generation found {len(found)} elements")
    return found


def _decompose_clifford(u: np.ndarray) -> list:
    """Cheapest Z/X schedule (<=2 driven pulses) matching u up to phase."""
    z_angles = [0.0, np.pi / 2.0, np.pi, 1.5 * np.pi]
    x_angles = [np.pi / 2.0, np.pi]
    candidates = []
    for a in z_angles:
        candidates.append([("z", a)])
    for a, t1, b in itertools.product(z_angles, x_angles, z_angles):
        candidates.append([("z", a), ("x", t1), ("z", b)])
    for a, t1, b, t2, c in itertools.product(z_angles, x_angles, z_angles,
                                             x_angles, z_angles):
        candidates.append([("z", a), ("x", t1), ("z", b), ("x", t2), ("z", c)])
    best = None
    for sched in candidates:
        if _phase_distance(schedule_unitary(sched), u) < 1e-8:
            sched = [(k, ang) for k, ang in sched
                     if not (k == "z" and ang == 0.0)]
            cost = (sum(1 for k, _ in sched if k == "x"), len(sched))
            if best is None or cost < best[0]:
                best = (cost, sched)
    if best is None:
        raise ModelError("no Z/X schedule found for a Clifford element")
    return best[1]


_TABLE_CACHE = None


def build_clifford_table():
    """24 CliffordElements plus the 24x24 group composition table.

    compose_table[i, j] is the index of unitary(i) @ unitary(j); the inverse
    of each element is recovered from the identity row.
    """
    global _TABLE_CACHE
    if _TABLE_CACHE is not None:
        return _TABLE_CACHE
    unitaries = _clifford_unitaries()
    elements = [CliffordElement(index=i, unitary=u,
                                decomposition=_decompose_clifford(u))
                for i, u in enumerate(unitaries)]
    n = len(unitaries)
    table = np.zeros((n, n), dtype=int)
    for i, j in itertools.product(range(n), range(n)):
        prod = unitaries[i] @ unitaries[j]
        matches = [k for k in range(n)
                   if _phase_distance(prod, unitaries[k]) < 1e-6]
        if len(matches) != 1:
            raise ModelError("group composition is not closed/unique")
        table[i, j] = matches[0]
    _TABLE_CACHE = (elements, table)
    return _TABLE_CACHE


def clifford_inverse_index(index: int, table: np.ndarray) -> int:
    row = np.nonzero(table[index] == 0)[0]
    return int(row[0])


@dataclass(frozen=True)
class RBSequence:
    length: int
    clifford_indices: np.ndarray
    recovery_index: int
    schedule: list

    def unitary(self) -> np.ndarray:
        return schedule_unitary(self.schedule)


def make_sequence(length: int, rng: np.random.Generator,
                  elements=None, table=None) -> RBSequence:
    """Uniform random Clifford sequence plus its group-inverse recovery."""
    if elements is None or table is None:
        elements, table = build_clifford_table()
    idx = rng.integers(0, 24, size=length)
    composed = 0
    schedule = []
    for i in idx:
        schedule.extend(elements[int(i)].decomposition)
        composed = int(table[int(i), composed])
    recovery = clifford_inverse_index(composed, table)
    schedule.extend(elements[recovery].decomposition)
    return RBSequence(length=length, clifford_indices=idx,
                      recovery_index=recovery, schedule=schedule)


@dataclass(frozen=True)
class RBNoiseConfig:
    """Noise applied while executing RB schedules."""

    include_t1: bool = True
    detuning: float = 0.0           # rad/ns quasi-static offset
    eps_amp: float = 0.0            # common-mode amplitude error
    depolarizing_rate: float = 0.0  # injected error per Clifford

    def realization(self) -> NoiseRealization:
        return NoiseRealization(delta=self.detuning, eps_common=self.eps_amp,
                                include_t1=self.include_t1)


@dataclass(frozen=True)
class RBReport:
    lengths: np.ndarray
    survivals: dict          # length -> array of per-sequence survivals
    decay_a: float
    decay_b: float
    decay_p: float
    epc: float
    gamma_params: dict       # length -> (k, theta) or None if degenerate
    skewness: dict           # length -> float


def _depolarizing_superop(rate: float) -> np.ndarray:
    """Column-stacking superop of the single-qubit depolarizing channel.

    The channel mixes toward the maximally mixed state with weight 1-lam,
    lam = 1 - 2*rate, so the RB decay parameter drops by exactly lam per
    application and EPC = (1 - lam)/2 = rate.
    """
    lam = 1.0 - 2.0 * rate
    sup = lam * np.eye(4, dtype=np.complex128)
    # |I/2)(tr(.)| in column stacking: rho -> tr(rho) * I/2
    for i in (0, 3):
        for j in (0, 3):
            sup[i, j] += (1.0 - lam) * 0.5
    return sup


def _schedule_superop(schedule, sup_x90: np.ndarray, sup_x180: np.ndarray,
                      dep: np.ndarray | None) -> np.ndarray:
    total = np.eye(4, dtype=np.complex128)
    for kind, angle in schedule:
        if kind == "z":
            total = unitary_superoperator(rz_matrix(angle)) @ total
        elif abs(angle - np.pi) < 1e-12:
            total = sup_x180 @ total
        elif abs(angle - np.pi / 2.0) < 1e-12:
            total = sup_x90 @ total
        else:
            raise ModelError(f"no pulse available for X({angle})")
    if dep is not None:
        total = dep @ total
    return total


def _clifford_superops(elements, sup_x90, sup_x180, dep):
    return [_schedule_superop(e.decomposition, sup_x90, sup_x180, dep)
            for e in elements]


def fit_rb_decay(lengths, means) -> tuple[float, float, float]:
    """Least-squares A p^J + B fit of the mean survival curve."""
    lengths = np.asarray(lengths, float)
    means = np.asarray(means, float)

    def model(j, a, b, p):
        return a * p**j + b

    try:
        popt, _ = scipy.optimize.curve_fit(
            model, lengths, means, p0=[0.5, 0.5, 0.99],
            bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]), maxfev=40000)
    except RuntimeError as exc:
        raise FitError(f"RB decay fit failed: {exc}") from exc
    return float(popt[0]), float(popt[1]), float(popt[2])


def gamma_analysis(samples) -> tuple[float, float, float] | None:
    """(shape k, scale theta, sample skewness) of infidelity samples.

    Method-of-moments start, maximum-likelihood refinement.  Returns None
    for degenerate (constant) samples.
    """
    x = np.asarray(samples, float)
    x = np.clip(x, 1e-9, None)
    if np.var(x) < 1e-18:
        return None
    k0 = np.mean(x) ** 2 / np.var(x)
    theta0 = np.var(x) / np.mean(x)
    try:
        k, _, theta = scipy.stats.gamma.fit(x, k0, floc=0.0, scale=theta0)
    except Exception:
        k, theta = k0, theta0
    return float(k), float(theta), float(scipy.stats.skew(x))


def run_rb(pulse_set: dict, device: DeviceModel, qubit: int = 0,
           lengths=(1, 2, 4, 8, 16, 32, 64), sequences_per_length: int = 30,
           shots: int | None = 1024,
           noise_config: RBNoiseConfig | None = None,
           seed: int = 0) -> RBReport:
    """Randomized benchmarking with a driven x90/x180 pulse pair.

    Virtual Z rotations are exact zero-duration superoperators; driven
    pulses are simulated once per noise configuration and reused.  Each
    sequence's RNG stream derives from (seed, length, sequence index) so
    results are identical under any execution order.
    """
    if noise_config is None:
        noise_config = RBNoiseConfig()
    if sequences_per_length < 10:
        import warnings
        warnings.warn("fewer than 10 sequences per length: "
                      "distribution statistics will be unstable",
                      stacklevel=2)
    if "x90" not in pulse_set or "x180" not in pulse_set:
        raise ModelError("pulse_set must provide 'x90' and 'x180'")
    elements, table = build_clifford_table()
    noise = noise_config.realization()
    sup_x90 = pulse_superoperator(pulse_set["x90"], noise, device, qubit)
    sup_x180 = pulse_superoperator(pulse_set["x180"], noise, device, qubit)
    dep = (None if noise_config.depolarizing_rate == 0.0
           else _depolarizing_superop(noise_config.depolarizing_rate))
    cliff_sups = _clifford_superops(elements, sup_x90, sup_x180, dep)

    rho0 = np.zeros(4, dtype=np.complex128)
    rho0[0] = 1.0  # vec of |0><0|
    lengths = np.asarray(sorted(lengths), dtype=int)
    survivals = {}
    for j in lengths:
        vals = np.zeros(sequences_per_length)
        for k in range(sequences_per_length):
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, 0x5B, int(j), k]))
            idx = rng.integers(0, 24, size=int(j))
            composed = 0
            state = rho0
            for i in idx:
                state = cliff_sups[int(i)] @ state
                composed = int(table[int(i), composed])
            recovery = clifford_inverse_index(composed, table)
            state = cliff_sups[recovery] @ state
            p0 = float(np.clip(state[0].real, 0.0, 1.0))
            if shots is not None:
                p0 = rng.binomial(shots, p0) / shots
            vals[k] = p0
        survivals[int(j)] = vals

    means = [survivals[int(j)].mean() for j in lengths]
    if len(lengths) >= 3:
        a, b, p = fit_rb_decay(lengths, means)
    else:
        a = b = p = float("nan")
    gamma_params = {}
    skewness = {}
    for j in lengths:
        res = gamma_analysis(1.0 - survivals[int(j)])
        gamma_params[int(j)] = None if res is None else (res[0], res[1])
        skewness[int(j)] = None if res is None else res[2]
    return RBReport(lengths=lengths, survivals=survivals, decay_a=a,
                    decay_b=b, decay_p=p,
                    epc=(1.0 - p) / 2.0 if np.isfinite(p) else float("nan"),
                    gamma_params=gamma_params, skewness=skewness)

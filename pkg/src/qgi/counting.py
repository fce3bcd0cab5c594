"""Quantum counting: Grover iterate, phase estimation, count decoding.

The amount of overlap between the two private sets shows up as the
rotation angle of the Grover iterate built around the joint preparation.
Phase estimation reads that angle into a counting register; decoding maps
the measured integer y to a count via t = K * sin^2(pi * y / 2^p).

Two exact engines compute the outcome distribution:

* ``circuit`` materializes the counting register next to the data
  registers, applies the controlled iterate powers by repeated
  application, and applies the inverse Fourier transform on the counting
  register.  It is the literal textbook circuit and is capped by the
  qubit budget.
* ``reduced`` runs the same dynamics inside the two-dimensional subspace
  spanned by the marked and unmarked components of the prepared state.
  That subspace is invariant under the iterate and contains the honest
  preparation, so the resulting distribution is identical, at any size.

``auto`` picks ``circuit`` when it comfortably fits and ``reduced``
otherwise.  Both engines agree to machine precision wherever both run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .oracles import DATA_B, COUNT, PreparationSpec, prepare_joint
from .state import QuantumState, reflect_about, apply_phase_flip

EIGHT_OVER_PI_SQ = 8.0 / math.pi ** 2
CIRCUIT_AUTO_LIMIT = 20
_BRANCH_FLOOR = 1e-14


class Verdict(str, enum.Enum):
    INTERSECT = "INTERSECT"
    DISJOINT = "DISJOINT"
    ABORT = "ABORT"

    def __str__(self) -> str:
        return self.value


def default_counting_bits(search_space: int) -> int:
    """Counting-register width giving sub-unit count error: ceil(log2 K) + 3."""
    if search_space < 1:
        raise ValueError(f"search space must be >= 1, got {search_space}")
    return max(0, math.ceil(math.log2(search_space))) + 3


@dataclass(frozen=True)
class CountingConfig:
    """Phase-estimation settings.

    ``bits`` defaults to ceil(log2 K) + 3 for the instance at hand.  In
    ``exact`` mode the estimate is the maximum-probability outcome of the
    exactly computed distribution; ``sample`` mode draws one outcome with
    the seeded generator instead.
    """

    bits: int | None = None
    mode: str = "exact"
    seed: int | None = None
    engine: str = "auto"

    def __post_init__(self):
        if self.bits is not None and self.bits < 1:
            raise ValueError(f"counting register needs >= 1 qubit, got {self.bits}")
        if self.mode not in ("exact", "sample"):
            raise ValueError(f"mode must be 'exact' or 'sample', got {self.mode!r}")
        if self.engine not in ("auto", "circuit", "reduced"):
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass(frozen=True)
class CountEstimate:
    """Decoded phase-estimation outcome."""

    y: int
    bits: int
    search_space: int
    theta_hat: float
    t_hat: float
    t_rounded: int
    success_prob: float | None
    engine: str
    distribution: np.ndarray | None = None

    def to_dict(self, include_distribution: bool = False) -> dict:
        doc = {
            "y": self.y,
            "bits": self.bits,
            "search_space": self.search_space,
            "theta_hat": self.theta_hat,
            "t_hat": self.t_hat,
            "t_rounded": self.t_rounded,
            "success_prob": self.success_prob,
            "engine": self.engine,
        }
        if include_distribution and self.distribution is not None:
            doc["distribution"] = [float(p) for p in self.distribution]
        return doc


def decode_count(y: int, search_space: int, bits: int) -> float:
    """Count encoded by outcome y: K * sin^2(pi * y / 2^bits)."""
    return search_space * math.sin(math.pi * y / (1 << bits)) ** 2


class GroverIterate:
    """Unitary G = (2|psi><psi| - I) * S, with S flipping marked branches.

    |psi> is the joint preparation and a branch is marked when its second
    data register is zero.  The reflection about |psi> equals conjugating
    the all-zero-state reflection by the preparation pipeline, for any
    unitary completion of that pipeline, so it is applied directly.
    """

    def __init__(self, spec: PreparationSpec):
        self.spec = spec
        self.prepared = prepare_joint(spec)
        layout = self.prepared.layout
        self._axis = self.prepared.amplitudes
        self._signs = np.where(layout.index_values(DATA_B) == 0, -1.0, 1.0)

    @property
    def marked_mass(self) -> float:
        """Probability mass of the prepared state on marked branches."""
        probs = self.prepared.probabilities()
        return float(probs[self._signs < 0].sum())

    @property
    def rotation_angle(self) -> float:
        """Angle theta with sin^2(theta / 2) equal to the marked mass."""
        return 2.0 * math.asin(math.sqrt(min(1.0, max(0.0, self.marked_mass))))

    def apply_amplitudes(self, amps: np.ndarray) -> np.ndarray:
        flipped = amps * self._signs
        return 2.0 * np.vdot(self._axis, flipped) * self._axis - flipped

    def apply(self, state: QuantumState) -> QuantumState:
        if state.layout != self.prepared.layout:
            raise ValueError("state layout does not match the preparation")
        flipped = apply_phase_flip(state, [DATA_B], lambda v: v[0] == 0)
        return reflect_about(flipped, self.prepared)

    def apply_inverse(self, state: QuantumState) -> QuantumState:
        if state.layout != self.prepared.layout:
            raise ValueError("state layout does not match the preparation")
        reflected = reflect_about(state, self.prepared)
        return apply_phase_flip(reflected, [DATA_B], lambda v: v[0] == 0)


def grover_iterate(spec: PreparationSpec) -> GroverIterate:
    return GroverIterate(spec)


def exact_count(state: QuantumState) -> int:
    """Marked-branch count read directly off an honest joint preparation.

    Rejects states whose nonzero branches are not all of equal magnitude,
    since those cannot come from the honest pipeline.
    """
    probs = state.probabilities()
    nonzero = probs > _BRANCH_FLOOR
    branches = int(nonzero.sum())
    if branches == 0:
        raise ValueError("state has no nonzero branches")
    magnitudes = np.sqrt(probs[nonzero])
    if np.max(np.abs(magnitudes - 1.0 / math.sqrt(branches))) > 1e-9:
        raise ValueError("branch magnitudes are not uniform; "
                         "state is not an honest preparation")
    marked = state.layout.index_values(DATA_B) == 0
    return int(np.count_nonzero(nonzero & marked))


def _distribution_reduced(iterate: GroverIterate, bits: int) -> np.ndarray:
    """Phase-estimation outcome distribution, computed in the invariant plane.

    Rows hold the (marked, unmarked) coefficients of G^z applied to the
    prepared state; the inverse Fourier transform then acts on the row
    index exactly as it would on the counting register.
    """
    size = 1 << bits
    theta = iterate.rotation_angle
    mass = min(1.0, max(0.0, iterate.marked_mass))
    rotation = np.array([[math.cos(theta), math.sin(theta)],
                         [-math.sin(theta), math.cos(theta)]])
    rows = np.empty((size, 2))
    v = np.array([math.sqrt(mass), math.sqrt(1.0 - mass)])
    for z in range(size):
        rows[z] = v
        v = rotation @ v
    transformed = np.fft.fft(rows, axis=0) / size
    probs = np.abs(transformed[:, 0]) ** 2 + np.abs(transformed[:, 1]) ** 2
    return probs


def _distribution_circuit(iterate: GroverIterate, bits: int,
                          initial: QuantumState) -> np.ndarray:
    """Phase-estimation outcome distribution from the materialized circuit.

    The joint state after the controlled iterate powers is sum_z |z> (x)
    G^z |initial> / sqrt(2^bits); rows are filled by repeated application
    of the iterate and the inverse Fourier transform acts on the counting
    index.
    """
    size = 1 << bits
    dim = initial.layout.dim
    rows = np.empty((size, dim), dtype=np.complex128)
    current = initial.amplitudes.copy()
    for z in range(size):
        rows[z] = current
        if z + 1 < size:
            current = iterate.apply_amplitudes(current)
    transformed = np.fft.fft(rows, axis=0) / size
    return np.sum(np.abs(transformed) ** 2, axis=1)


def counting_layout(spec: PreparationSpec, bits: int):
    """Layout of the circuit engine: data registers plus the counting register."""
    return spec.layout().extend(COUNT, bits)


def phase_estimate(spec: PreparationSpec, cfg: CountingConfig | None = None,
                   initial_state: QuantumState | None = None,
                   rng: np.random.Generator | None = None) -> CountEstimate:
    """Estimate the marked count of the joint preparation.

    ``initial_state`` overrides the honest preparation (used to study runs
    where the in-flight state was disturbed); it forces the circuit engine
    and disables the success-probability report, since the true count is
    then undefined.
    """
    cfg = cfg or CountingConfig()
    search_space = spec.size_k
    bits = cfg.bits if cfg.bits is not None else default_counting_bits(search_space)
    size = 1 << bits
    iterate = GroverIterate(spec)

    data_qubits = spec.layout().total_qubits
    engine = cfg.engine
    if initial_state is not None:
        if initial_state.layout != spec.layout():
            raise ValueError("initial state layout does not match the preparation")
        if engine == "reduced":
            raise ValueError("the reduced engine only handles the honest preparation")
        engine = "circuit"
    if engine == "auto":
        engine = ("circuit"
                  if data_qubits + bits <= min(CIRCUIT_AUTO_LIMIT, spec.max_qubits)
                  else "reduced")
    if engine == "circuit":
        if data_qubits + bits > spec.max_qubits:
            raise ValueError(
                f"circuit engine needs {data_qubits + bits} qubits "
                f"({data_qubits} data + {bits} counting), cap is {spec.max_qubits}")
        probs = _distribution_circuit(iterate, bits,
                                      initial_state or iterate.prepared)
    else:
        probs = _distribution_reduced(iterate, bits)

    if cfg.mode == "sample":
        gen = rng if rng is not None else np.random.default_rng(cfg.seed)
        y = int(gen.choice(size, p=probs / probs.sum()))
        success = None
    else:
        y = int(np.argmax(probs))
        if initial_state is None:
            true_t = exact_count(iterate.prepared)
            decoded = np.round(np.clip(
                search_space * np.sin(np.pi * np.arange(size) / size) ** 2,
                0, search_space)).astype(int)
            success = float(probs[decoded == true_t].sum())
        else:
            success = None

    t_hat = decode_count(y, search_space, bits)
    t_rounded = int(min(search_space, max(0, round(t_hat))))
    return CountEstimate(
        y=y, bits=bits, search_space=search_space,
        theta_hat=2.0 * math.pi * y / size,
        t_hat=t_hat, t_rounded=t_rounded,
        success_prob=success, engine=engine, distribution=probs)


def decide_intersection(estimate: CountEstimate) -> Verdict:
    """INTERSECT when at least one matching pair was counted."""
    return Verdict.INTERSECT if estimate.t_rounded >= 1 else Verdict.DISJOINT

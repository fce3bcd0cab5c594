"""Two-party protocol driver: honest runs, adversary runs, analytics.

The five steps: Alice prepares and sends her encoded registers; Bob
tensors on his own encoded registers, XORs his data register with hers,
and sends everything back; Alice uncomputes her table and measures her
data register (a nonzero outcome aborts the run); Alice counts matching
pairs with phase estimation; Alice announces the verdict.

Party objects hold only their own table.  The counting step consumes the
joint preparation description, modeling the shared oracle access the
counting algorithm assumes; everything a party computes before the final
count touches its own table alone.

A protocol run resolves adversarial measurements by drawing once from
the seeded generator, even in exact mode, because a cheater's projective
measurement happens once per execution.  ``detection_probability``
instead enumerates every measurement branch and is sampling-free.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .counting import (CountEstimate, CountingConfig, Verdict,
                       decide_intersection, phase_estimate)
from .geometry import GridSet, Scene, rasterize
from .oracles import (ADDR_A, ADDR_B, DATA_A, DATA_B, DataTable,
                      PreparationSpec, cheat_check, oracle_xor,
                      prepare_encoded)
from .registers import DEFAULT_MAX_QUBITS, RegisterLayout
from .state import (DENSITY_DIM_CAP, DensityMatrix, QuantumState,
                    apply_permutation, basis_state, measure_distribution,
                    measure_register, tensor, von_neumann_entropy)


class Attack(str, enum.Enum):
    HONEST = "honest"
    BOB_MEASURE_ALL = "bob-measure-all"
    BOB_MEASURE_DATA = "bob-measure-data"
    BOB_TAMPER = "bob-tamper"
    ALICE_MEASURE_RESULT = "alice-measure-result"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AdversaryStrategy:
    attack: Attack = Attack.HONEST
    tamper_mask: int = 0

    def __post_init__(self):
        if self.attack is Attack.BOB_TAMPER:
            if self.tamper_mask == 0:
                raise ValueError("bob-tamper needs a nonzero mask")
        elif self.tamper_mask != 0:
            raise ValueError(f"{self.attack} does not take a mask")

    @classmethod
    def parse(cls, text: str) -> "AdversaryStrategy":
        name, _, arg = text.partition(":")
        try:
            attack = Attack(name)
        except ValueError:
            raise ValueError(
                f"unknown adversary {name!r}; choose from "
                f"{[a.value for a in Attack]}") from None
        if attack is Attack.BOB_TAMPER:
            if not arg:
                raise ValueError("bob-tamper needs a mask, e.g. bob-tamper:1")
            return cls(attack, int(arg))
        if arg:
            raise ValueError(f"{name} does not take an argument")
        return cls(attack)

    @property
    def label(self) -> str:
        if self.attack is Attack.BOB_TAMPER:
            return f"{self.attack.value}:{self.tamper_mask}"
        return self.attack.value


HONEST = AdversaryStrategy()


@dataclass(frozen=True)
class CostSummary:
    """Qubit counts of both messages plus classical baselines in bits.

    ``total_qubits`` adds up the two transferred layouts (2m + n + 3r).
    ``nominal_total_qubits`` is the protocol's commonly quoted total
    (2m + n + 4r); the two differ by r, which the analyzer flags.
    """

    set_size_a: int
    set_size_b: int
    total_cells: int
    address_bits_a: int
    address_bits_b: int
    value_bits: int
    alice_to_bob_qubits: int
    bob_to_alice_qubits: int
    total_qubits: int
    nominal_total_qubits: int
    baseline_bits: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "set_size_a": self.set_size_a,
            "set_size_b": self.set_size_b,
            "total_cells": self.total_cells,
            "address_bits_a": self.address_bits_a,
            "address_bits_b": self.address_bits_b,
            "value_bits": self.value_bits,
            "alice_to_bob_qubits": self.alice_to_bob_qubits,
            "bob_to_alice_qubits": self.bob_to_alice_qubits,
            "total_qubits": self.total_qubits,
            "nominal_total_qubits": self.nominal_total_qubits,
            "baseline_bits": dict(self.baseline_bits),
        }


def comm_cost(set_size_a: int, set_size_b: int, total_cells: int) -> CostSummary:
    """Message sizes for given set sizes and grid size; widths are 1 minimum."""
    if min(set_size_a, set_size_b, total_cells) < 1:
        raise ValueError("set sizes and cell count must be >= 1")
    m = max(1, math.ceil(math.log2(set_size_a)))
    n = max(1, math.ceil(math.log2(set_size_b)))
    r = max(1, math.ceil(math.log2(total_cells)))
    return CostSummary(
        set_size_a=set_size_a, set_size_b=set_size_b, total_cells=total_cells,
        address_bits_a=m, address_bits_b=n, value_bits=r,
        alice_to_bob_qubits=m + r,
        bob_to_alice_qubits=m + n + 2 * r,
        total_qubits=2 * m + n + 3 * r,
        nominal_total_qubits=2 * m + n + 4 * r,
        baseline_bits={
            "atallah": 4 * set_size_a ** 2 * total_cells,
            "qin": 2 * (set_size_a ** 2 + set_size_b ** 2) * total_cells,
        })


@dataclass(frozen=True)
class LeakageReport:
    """Entropy accounting for the ensemble an eavesdropper on the first
    message would hold."""

    set_size: int
    total_cells: int
    ensemble_entropy_bits: float
    mean_state_entropy_bits: float
    holevo_bound_bits: float
    nominal_bound_bits: float

    def to_dict(self) -> dict:
        return {
            "set_size": self.set_size,
            "total_cells": self.total_cells,
            "ensemble_entropy_bits": self.ensemble_entropy_bits,
            "mean_state_entropy_bits": self.mean_state_entropy_bits,
            "holevo_bound_bits": self.holevo_bound_bits,
            "nominal_bound_bits": self.nominal_bound_bits,
        }


def leakage_report(table: DataTable, total_cells: int) -> LeakageReport:
    """Holevo accounting for the equal-weight ensemble of encoded rows.

    Each row i contributes the pure state |i>|table[i]>.  The ensemble
    average has one 1/M eigenvalue per row, so its entropy is log2(M);
    the nominal bound log2(M * total_cells) is reported alongside.
    """
    layout = RegisterLayout([(ADDR_A, table.address_bits),
                             (DATA_A, table.value_bits)])
    if layout.dim > DENSITY_DIM_CAP:
        raise ValueError(
            f"ensemble dimension {layout.dim} exceeds the cap of {DENSITY_DIM_CAP}")
    acc = np.zeros((layout.dim, layout.dim), dtype=np.complex128)
    per_state = []
    for i, entry in enumerate(table.entries):
        vec = basis_state(layout, {ADDR_A: i, DATA_A: entry}).amplitudes
        projector = np.outer(vec, vec.conj())
        per_state.append(von_neumann_entropy(DensityMatrix(projector)))
        acc += projector
    ensemble = von_neumann_entropy(DensityMatrix(acc / table.size))
    mean_state = float(np.mean(per_state))
    return LeakageReport(
        set_size=table.size, total_cells=total_cells,
        ensemble_entropy_bits=ensemble,
        mean_state_entropy_bits=mean_state,
        holevo_bound_bits=ensemble - mean_state,
        nominal_bound_bits=math.log2(table.size * total_cells))


@dataclass
class StepRecord:
    step: int
    actor: str
    action: str
    qubits_sent: int | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"step": self.step, "actor": self.actor,
                               "action": self.action}
        if self.qubits_sent is not None:
            doc["qubits_sent"] = self.qubits_sent
        if self.detail:
            doc["detail"] = self.detail
        return doc


@dataclass
class ProtocolTranscript:
    steps: list[StepRecord]
    verdict: Verdict
    estimate: CountEstimate | None
    cost: CostSummary
    adversary: str
    seed: int | None
    mode: str
    complete: bool = True

    def validate(self):
        ids = [rec.step for rec in self.steps]
        if ids != sorted(ids) or any(not 1 <= i <= 5 for i in ids):
            raise ValueError(f"step records out of protocol order: {ids}")
        checks = [rec for rec in self.steps if rec.action == "uncompute_and_check"]
        if self.verdict is Verdict.ABORT:
            if not checks or checks[-1].detail.get("passed"):
                raise ValueError("aborted transcript lacks a failed check record")
            if any(rec.step > 3 for rec in self.steps):
                raise ValueError("abort must end the run at step 3")
            if self.estimate is not None:
                raise ValueError("aborted run must not carry a count estimate")
        else:
            if {1, 2, 3, 4, 5} - set(ids):
                raise ValueError(f"completed run is missing steps: {ids}")

    def to_dict(self, verbose: bool = False) -> dict:
        return {
            "steps": [rec.to_dict() for rec in self.steps],
            "verdict": self.verdict.value,
            "estimate": (self.estimate.to_dict(include_distribution=verbose)
                         if self.estimate is not None else None),
            "cost": self.cost.to_dict(),
            "adversary": self.adversary,
            "seed": self.seed,
            "mode": self.mode,
            "complete": self.complete,
        }


class AliceParty:
    """Holds only Alice's table; prepares, checks, and counts."""

    def __init__(self, table: DataTable, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.table = table
        self.max_qubits = max_qubits

    def prepare_message(self) -> QuantumState:
        return prepare_encoded(self.table, ADDR_A, DATA_A, self.max_qubits)

    def verify_exact(self, joint: QuantumState):
        return cheat_check(joint, self.table)

    def verify_sampled(self, joint: QuantumState, rng: np.random.Generator):
        return cheat_check(joint, self.table, rng)


class BobParty:
    """Holds only Bob's table; entangles his registers onto the message."""

    def __init__(self, table: DataTable, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.table = table
        self.max_qubits = max_qubits

    def respond(self, incoming: QuantumState) -> QuantumState:
        own = prepare_encoded(self.table, ADDR_B, DATA_B, self.max_qubits)
        joint = tensor(incoming, own)
        return oracle_xor(joint, DATA_A, DATA_B)


def build_preparation(scene_a: Scene, scene_b: Scene
                      ) -> tuple[PreparationSpec, GridSet, GridSet]:
    """Rasterize both scenes on their shared grid into a preparation spec."""
    if scene_a.grid != scene_b.grid:
        raise ValueError(
            f"parties must share one grid partition, got "
            f"{scene_a.grid.rows}x{scene_a.grid.cols} vs "
            f"{scene_b.grid.rows}x{scene_b.grid.cols}")
    set_a = rasterize(scene_a)
    set_b = rasterize(scene_b)
    bits = scene_a.grid.value_bits
    spec = PreparationSpec(DataTable.from_serials(set_a.serials, bits),
                           DataTable.from_serials(set_b.serials, bits))
    return spec, set_a, set_b


def _tamper(state: QuantumState, mask: int) -> QuantumState:
    return apply_permutation(state, [DATA_A], lambda v: (v[0] ^ mask,))


def _check_mask(mask: int, value_bits: int):
    if not 1 <= mask < (1 << value_bits):
        raise ValueError(
            f"tamper mask {mask} does not fit in {value_bits} data bits")


def run_protocol(scene_a: Scene, scene_b: Scene,
                 cfg: CountingConfig | None = None,
                 adversary: AdversaryStrategy = HONEST,
                 seed: int | None = None) -> ProtocolTranscript:
    """Execute one protocol run and return its transcript.

    ``seed`` drives every sampled choice (adversarial measurements, and
    the check and counting measurements in sample mode); identical inputs
    give identical transcripts.
    """
    cfg = cfg or CountingConfig()
    rng = np.random.default_rng(0 if seed is None else seed)
    spec, set_a, set_b = build_preparation(scene_a, scene_b)
    cost = comm_cost(len(set_a), len(set_b), scene_a.grid.total_cells)
    alice = AliceParty(spec.table_a)
    bob = BobParty(spec.table_b)
    steps: list[StepRecord] = []
    disturbed = False

    message = alice.prepare_message()
    steps.append(StepRecord(1, "alice", "prepare_and_send",
                            qubits_sent=message.layout.total_qubits))

    if adversary.attack in (Attack.BOB_MEASURE_ALL, Attack.BOB_MEASURE_DATA):
        detail: dict[str, Any] = {}
        if adversary.attack is Attack.BOB_MEASURE_ALL:
            outcome, message = measure_register(message, ADDR_A, rng)
            detail["address_outcome"] = outcome
        outcome, message = measure_register(message, DATA_A, rng)
        detail["data_outcome"] = outcome
        steps.append(StepRecord(2, "bob", f"attack:{adversary.attack.value}",
                                detail=detail))
        disturbed = True

    joint = bob.respond(message)
    if adversary.attack is Attack.BOB_TAMPER:
        _check_mask(adversary.tamper_mask, spec.value_bits)
        joint = _tamper(joint, adversary.tamper_mask)
        steps.append(StepRecord(2, "bob", "attack:bob-tamper",
                                detail={"mask": adversary.tamper_mask}))
        disturbed = True
    steps.append(StepRecord(2, "bob", "entangle_and_send",
                            qubits_sent=joint.layout.total_qubits))

    if cfg.mode == "exact":
        pass_prob, post = alice.verify_exact(joint)
        passed = pass_prob >= 0.5
        check_detail: dict[str, Any] = {"pass_probability": float(pass_prob),
                                        "passed": passed}
    else:
        passed, post = alice.verify_sampled(joint, rng)
        check_detail = {"passed": passed}
    steps.append(StepRecord(3, "alice", "uncompute_and_check",
                            detail=check_detail))
    if not passed:
        transcript = ProtocolTranscript(
            steps=steps, verdict=Verdict.ABORT, estimate=None, cost=cost,
            adversary=adversary.label, seed=seed, mode=cfg.mode)
        transcript.validate()
        return transcript

    alice_state = post
    if adversary.attack is Attack.ALICE_MEASURE_RESULT:
        learned, alice_state = measure_register(alice_state, DATA_B, rng)
        steps.append(StepRecord(
            4, "alice", "attack:alice-measure-result",
            detail={"measured_xor_value": learned,
                    "note": "one address-pair xor; the raw serial stays hidden"}))
        disturbed = True

    estimate = phase_estimate(spec, cfg,
                              initial_state=alice_state if disturbed else None,
                              rng=rng)
    verdict = decide_intersection(estimate)
    steps.append(StepRecord(
        4, "alice", "quantum_count",
        detail=dict(estimate.to_dict(),
                    note="counting runs on alice's side; she learns the count")))
    steps.append(StepRecord(5, "alice", "announce_verdict",
                            detail={"verdict": verdict.value}))

    transcript = ProtocolTranscript(
        steps=steps, verdict=verdict, estimate=estimate, cost=cost,
        adversary=adversary.label, seed=seed, mode=cfg.mode)
    transcript.validate()
    return transcript


def detection_probability(scene_a: Scene, scene_b: Scene,
                          adversary: AdversaryStrategy = HONEST) -> float:
    """Exact probability that the data check catches the strategy.

    Adversarial measurements are expanded into all their outcome branches
    with their exact Born weights; nothing is sampled.
    """
    spec, _, _ = build_preparation(scene_a, scene_b)
    alice = AliceParty(spec.table_a)
    bob = BobParty(spec.table_b)
    message = alice.prepare_message()

    branches: list[tuple[float, QuantumState]] = [(1.0, message)]
    if adversary.attack in (Attack.BOB_MEASURE_ALL, Attack.BOB_MEASURE_DATA):
        regs = ([ADDR_A, DATA_A] if adversary.attack is Attack.BOB_MEASURE_ALL
                else [DATA_A])
        for reg in regs:
            expanded = []
            for prob, st in branches:
                dist, collapsed = measure_distribution(st, reg)
                for outcome, sub in collapsed.items():
                    expanded.append((prob * float(dist[outcome]), sub))
            branches = expanded
    if adversary.attack is Attack.BOB_TAMPER:
        _check_mask(adversary.tamper_mask, spec.value_bits)

    failure = 0.0
    for prob, st in branches:
        joint = bob.respond(st)
        if adversary.attack is Attack.BOB_TAMPER:
            joint = _tamper(joint, adversary.tamper_mask)
        pass_prob, _ = cheat_check(joint, spec.table_a)
        failure += prob * (1.0 - pass_prob)
    return failure

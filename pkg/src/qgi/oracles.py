"""Reversible data-loading and XOR oracles, and the joint-state pipeline.

A party's private set is a table of distinct grid serials.  Loading XORs
``table[i]`` into a data register addressed by ``i``; a second load
uncomputes it.  The pipeline below entangles both parties' tables into
one state whose last data register holds the XOR of every pair, so a
zero there marks a matching pair of serials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .registers import DEFAULT_MAX_QUBITS, RegisterLayout
from .state import (QuantumState, apply_permutation, basis_state,
                    measure_distribution, measure_register)

ADDR_A = "addr_a"
DATA_A = "data_a"
ADDR_B = "addr_b"
DATA_B = "data_b"
COUNT = "count"


def address_bits(count: int) -> int:
    """Qubits needed to address ``count`` table rows; one qubit minimum."""
    if count < 1:
        raise ValueError(f"need at least one table entry, got {count}")
    return max(1, math.ceil(math.log2(count)))


@dataclass(frozen=True)
class DataTable:
    """Distinct grid serials, each representable in ``value_bits`` bits.

    Value 0 is reserved as the cleared marker, so entries live in
    [1, 2**value_bits - 1].
    """

    entries: tuple[int, ...]
    value_bits: int

    def __post_init__(self):
        if self.value_bits < 1:
            raise ValueError(f"value_bits must be >= 1, got {self.value_bits}")
        if len(self.entries) < 1:
            raise ValueError("a data table needs at least one entry")
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("table entries must be pairwise distinct")
        top = (1 << self.value_bits) - 1
        for e in self.entries:
            if not 1 <= e <= top:
                raise ValueError(
                    f"entry {e} does not fit in {self.value_bits} value bits "
                    f"(0 is reserved, max {top})")

    @classmethod
    def from_serials(cls, serials, value_bits: int) -> "DataTable":
        return cls(tuple(int(s) for s in serials), value_bits)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def address_bits(self) -> int:
        return address_bits(self.size)


@dataclass(frozen=True)
class PreparationSpec:
    """Both parties' tables plus the register layout they load into."""

    table_a: DataTable
    table_b: DataTable
    max_qubits: int = DEFAULT_MAX_QUBITS

    def __post_init__(self):
        if self.table_a.value_bits != self.table_b.value_bits:
            raise ValueError(
                f"tables disagree on value bits: {self.table_a.value_bits} "
                f"vs {self.table_b.value_bits}")

    @property
    def value_bits(self) -> int:
        return self.table_a.value_bits

    @property
    def size_k(self) -> int:
        """Search-space size: number of (i, j) table-row pairs."""
        return self.table_a.size * self.table_b.size

    def layout(self) -> RegisterLayout:
        r = self.value_bits
        return RegisterLayout(
            [(ADDR_A, self.table_a.address_bits), (DATA_A, r),
             (ADDR_B, self.table_b.address_bits), (DATA_B, r)],
            max_qubits=self.max_qubits)

    def alice_layout(self) -> RegisterLayout:
        return RegisterLayout(
            [(ADDR_A, self.table_a.address_bits), (DATA_A, self.value_bits)],
            max_qubits=self.max_qubits)

    def bob_layout(self) -> RegisterLayout:
        return RegisterLayout(
            [(ADDR_B, self.table_b.address_bits), (DATA_B, self.value_bits)],
            max_qubits=self.max_qubits)


def prepare_uniform(state: QuantumState, reg: str, count: int) -> QuantumState:
    """Spread a cleared register uniformly over its first ``count`` values."""
    layout = state.layout
    register = layout.register(reg)
    if count < 1:
        raise ValueError(f"cannot prepare a superposition over {count} values")
    if count > (1 << register.width):
        raise ValueError(
            f"count {count} exceeds the {1 << register.width} values of "
            f"register {reg}")
    width_dim = 1 << register.width
    low = 1 << register.offset
    high = layout.dim // (width_dim * low)
    view = state.amplitudes.reshape(high, width_dim, low)
    residual = np.sum(np.abs(view[:, 1:, :]) ** 2)
    if residual > 1e-12:
        raise ValueError(
            f"register {reg} must be 0 in every branch before preparation "
            f"(found probability mass {residual!r} elsewhere)")
    out = np.zeros_like(view)
    out[:, :count, :] = view[:, :1, :] / math.sqrt(count)
    return QuantumState(layout, out.reshape(-1), copy=False)


def oracle_load(state: QuantumState, addr: str, data: str,
                table: DataTable) -> QuantumState:
    """XOR ``table[i]`` into the data register on every branch with address i.

    Addresses beyond the table pass through unchanged.  Self-inverse, so the
    same call also uncomputes a previously loaded table.
    """
    layout = state.layout
    if layout.width(addr) != table.address_bits:
        raise ValueError(
            f"register {addr} has width {layout.width(addr)}, table with "
            f"{table.size} entries needs {table.address_bits}")
    if layout.width(data) != table.value_bits:
        raise ValueError(
            f"register {data} has width {layout.width(data)}, table values "
            f"need {table.value_bits}")
    entries = table.entries

    def load(values: tuple[int, ...]) -> tuple[int, ...]:
        i, x = values
        if i < len(entries):
            return i, x ^ entries[i]
        return i, x

    return apply_permutation(state, [addr, data], load)


def oracle_xor(state: QuantumState, src: str, dst: str) -> QuantumState:
    """XOR the source register into the destination on every branch."""
    layout = state.layout
    if layout.width(src) != layout.width(dst):
        raise ValueError(
            f"register widths differ: {src} is {layout.width(src)}, "
            f"{dst} is {layout.width(dst)}")

    def xor(values: tuple[int, ...]) -> tuple[int, ...]:
        u, v = values
        return u, u ^ v

    return apply_permutation(state, [src, dst], xor)


def prepare_encoded(table: DataTable, addr: str, data: str,
                    max_qubits: int = DEFAULT_MAX_QUBITS) -> QuantumState:
    """Uniform superposition of addresses with the table loaded alongside."""
    layout = RegisterLayout([(addr, table.address_bits), (data, table.value_bits)],
                            max_qubits=max_qubits)
    state = basis_state(layout)
    state = prepare_uniform(state, addr, table.size)
    return oracle_load(state, addr, data, table)


def prepare_joint(spec: PreparationSpec) -> QuantumState:
    """Run the full preparation pipeline from the all-zero state.

    The result superposes every address pair (i, j) with the first data
    register cleared and the second holding table_a[i] ^ table_b[j]; all
    nonzero amplitudes have magnitude 1/sqrt(size_k).
    """
    state = basis_state(spec.layout())
    state = prepare_uniform(state, ADDR_A, spec.table_a.size)
    state = oracle_load(state, ADDR_A, DATA_A, spec.table_a)
    state = prepare_uniform(state, ADDR_B, spec.table_b.size)
    state = oracle_load(state, ADDR_B, DATA_B, spec.table_b)
    state = oracle_xor(state, DATA_A, DATA_B)
    return oracle_load(state, ADDR_A, DATA_A, spec.table_a)


def cheat_check(state: QuantumState, table_a: DataTable,
                rng: np.random.Generator | None = None):
    """Uncompute the first data register and measure it; 0 means clean.

    Without an rng the exact pass probability is returned together with the
    state collapsed onto the passing outcome (``None`` if passing is
    impossible).  With an rng one outcome is sampled and a boolean verdict
    is returned with the collapsed state.
    """
    uncomputed = oracle_load(state, ADDR_A, DATA_A, table_a)
    if rng is None:
        probs, collapsed = measure_distribution(uncomputed, DATA_A)
        pass_prob = float(probs[0]) / float(probs.sum())
        return pass_prob, collapsed.get(0)
    outcome, post = measure_register(uncomputed, DATA_A, rng)
    return outcome == 0, post


__all__ = [
    "ADDR_A", "DATA_A", "ADDR_B", "DATA_B", "COUNT",
    "DataTable", "PreparationSpec", "address_bits",
    "prepare_uniform", "oracle_load", "oracle_xor",
    "prepare_encoded", "prepare_joint", "cheat_check",
]

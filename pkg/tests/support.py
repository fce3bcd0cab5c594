"""Shared helpers for the test suite."""

import numpy as np

from qgi import DataTable, PreparationSpec, QuantumState


def random_state(layout, rng) -> QuantumState:
    vec = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return QuantumState(layout, vec / np.linalg.norm(vec))


def random_spec(rng, value_bits=4, max_size=4) -> PreparationSpec:
    top = (1 << value_bits) - 1
    size_a = int(rng.integers(1, max_size + 1))
    size_b = int(rng.integers(1, max_size + 1))
    entries_a = rng.choice(np.arange(1, top + 1), size=size_a, replace=False)
    entries_b = rng.choice(np.arange(1, top + 1), size=size_b, replace=False)
    return PreparationSpec(DataTable.from_serials(entries_a, value_bits),
                           DataTable.from_serials(entries_b, value_bits))


def xor_pairs(entries_a, entries_b) -> dict[tuple[int, int], int]:
    """Brute-force table of a[i] ^ b[j] over every address pair."""
    return {(i, j): a ^ b
            for i, a in enumerate(entries_a)
            for j, b in enumerate(entries_b)}

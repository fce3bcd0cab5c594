"""Dense state-vector engine over named registers.

States are immutable from the caller's point of view: every operation
returns a fresh ``QuantumState``.  Oracles are classical reversible maps,
so the workhorse here is ``apply_permutation``; diagonal sign flips and
reflections cover the remaining unitaries the protocol needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .registers import RegisterLayout

NORM_TOL = 1e-12
COLLAPSE_FLOOR = 1e-15
DENSITY_DIM_CAP = 1 << 12
ENTROPY_EIG_FLOOR = 1e-12


class QuantumState:
    """Normalized complex amplitude vector over a register layout."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes: np.ndarray,
                 copy: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amps.shape != (layout.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, layout needs ({layout.dim},)")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state norm^2 = {norm_sq!r} is not 1 within {NORM_TOL}")
        self.layout = layout
        self.amplitudes = amps

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def nonzero_branches(self, floor: float = 1e-14) -> np.ndarray:
        """Basis indices carrying more probability mass than ``floor``."""
        return np.nonzero(self.probabilities() > floor)[0]

    def branch_table(self, floor: float = 1e-14) -> list[tuple[dict[str, int], complex]]:
        """(register assignment, amplitude) for every non-negligible branch."""
        return [(self.layout.unpack(int(i)), complex(self.amplitudes[i]))
                for i in self.nonzero_branches(floor)]

    def __repr__(self) -> str:
        n = len(self.nonzero_branches())
        return f"QuantumState({self.layout!r}, {n} nonzero branches)"


def basis_state(layout: RegisterLayout,
                assignment: Mapping[str, int] | None = None) -> QuantumState:
    """Computational basis state; unassigned registers default to 0."""
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.pack(assignment or {})] = 1.0
    return QuantumState(layout, amps, copy=False)


def _local_widths(layout: RegisterLayout, regs: Sequence[str]) -> list[int]:
    if not regs:
        raise ValueError("need at least one register name")
    if len(set(regs)) != len(regs):
        raise ValueError(f"register names repeat in {list(regs)}")
    return [layout.width(r) for r in regs]


def _permutation_table(layout: RegisterLayout, regs: Sequence[str],
                       f: Callable[[tuple[int, ...]], Sequence[int]],
                       verify: bool) -> np.ndarray:
    """Tabulate f over all joint values of the listed registers.

    Local packing follows the layout convention: regs[0] occupies the
    least-significant bits of the local value.
    """
    widths = _local_widths(layout, regs)
    size = 1 << sum(widths)
    table = np.empty(size, dtype=np.int64)
    for local in range(size):
        values = []
        shift = 0
        for w in widths:
            values.append((local >> shift) & ((1 << w) - 1))
            shift += w
        out = tuple(f(tuple(values)))
        if len(out) != len(widths):
            raise ValueError(
                f"permutation returned {len(out)} values for {len(widths)} registers")
        packed = 0
        shift = 0
        for v, w, name in zip(out, widths, regs):
            if not 0 <= v < (1 << w):
                raise ValueError(
                    f"permutation output {v} exceeds register {name} width {w}")
            packed |= v << shift
            shift += w
        table[local] = packed
    if verify and len(np.unique(table)) != size:
        raise ValueError("map is not a bijection on the listed registers")
    return table


def _gather_local(layout: RegisterLayout, regs: Sequence[str]) -> np.ndarray:
    """Packed joint value of the listed registers at every basis index."""
    idx = np.arange(layout.dim, dtype=np.int64)
    local = np.zeros(layout.dim, dtype=np.int64)
    shift = 0
    for name in regs:
        local |= layout.extract(idx, name) << shift
        shift += layout.width(name)
    return local


def apply_permutation(state: QuantumState, regs: Sequence[str],
                      f: Callable[[tuple[int, ...]], Sequence[int]],
                      verify: bool = False) -> QuantumState:
    """Route amplitudes along a classical bijection of the listed registers.

    ``f`` maps a tuple of register values (ordered as ``regs``) to a tuple
    of new values; all other registers pass through untouched.  The output
    amplitude at f(x) equals the input amplitude at x.  Bijectivity is
    checked only when ``verify`` is set, since the check enumerates all
    joint values of the listed registers.
    """
    layout = state.layout
    table = _permutation_table(layout, regs, f, verify)
    mapped = table[_gather_local(layout, regs)]
    new_idx = np.arange(layout.dim, dtype=np.int64)
    shift = 0
    for name in regs:
        reg = layout.register(name)
        values = (mapped >> shift) & reg.mask
        new_idx = (new_idx & ~(reg.mask << reg.offset)) | (values << reg.offset)
        shift += reg.width
    out = np.zeros_like(state.amplitudes)
    out[new_idx] = state.amplitudes
    return QuantumState(layout, out, copy=False)


def apply_phase_flip(state: QuantumState, regs: Sequence[str],
                     predicate: Callable[[tuple[int, ...]], bool]) -> QuantumState:
    """Flip the sign of every branch whose listed-register values satisfy the predicate."""
    layout = state.layout
    widths = _local_widths(layout, regs)
    size = 1 << sum(widths)
    signs = np.ones(size)
    for local in range(size):
        values = []
        shift = 0
        for w in widths:
            values.append((local >> shift) & ((1 << w) - 1))
            shift += w
        if predicate(tuple(values)):
            signs[local] = -1.0
    out = state.amplitudes * signs[_gather_local(layout, regs)]
    return QuantumState(layout, out, copy=False)


def reflect_about(state: QuantumState, axis: QuantumState) -> QuantumState:
    """Apply 2|axis><axis| - I."""
    if state.layout != axis.layout:
        raise ValueError("states live on different layouts")
    overlap = np.vdot(axis.amplitudes, state.amplitudes)
    out = 2.0 * overlap * axis.amplitudes - state.amplitudes
    return QuantumState(state.layout, out, copy=False)


def tensor(low: QuantumState, high: QuantumState) -> QuantumState:
    """Compose two states; ``low``'s registers take the less significant bits."""
    layout = low.layout.concat(high.layout)
    amps = np.kron(high.amplitudes, low.amplitudes)
    return QuantumState(layout, amps, copy=False)


def register_distribution(state: QuantumState, reg: str) -> np.ndarray:
    """Marginal probability of each value of one register."""
    values = state.layout.index_values(reg)
    width = state.layout.width(reg)
    return np.bincount(values, weights=state.probabilities(), minlength=1 << width)


def _collapse(state: QuantumState, reg: str, outcome: int,
              prob: float) -> QuantumState:
    if prob < COLLAPSE_FLOOR:
        raise ValueError(
            f"cannot renormalize onto {reg}={outcome}: probability {prob!r} underflows")
    keep = state.layout.index_values(reg) == outcome
    out = np.where(keep, state.amplitudes, 0.0) / np.sqrt(prob)
    return QuantumState(state.layout, out, copy=False)


def measure_register(state: QuantumState, reg: str,
                     rng: np.random.Generator) -> tuple[int, QuantumState]:
    """Sample one computational-basis outcome for a register and collapse."""
    probs = register_distribution(state, reg)
    outcome = int(rng.choice(len(probs), p=probs / probs.sum()))
    return outcome, _collapse(state, reg, outcome, float(probs[outcome]))


def measure_distribution(state: QuantumState, reg: str
                         ) -> tuple[np.ndarray, dict[int, QuantumState]]:
    """Exact outcome distribution plus the collapsed state per reachable outcome."""
    probs = register_distribution(state, reg)
    collapsed = {
        int(v): _collapse(state, reg, int(v), float(p))
        for v, p in enumerate(probs) if p >= COLLAPSE_FLOOR
    }
    return probs, collapsed


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace matrix over a packed register subspace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {trace!r} is not 1 within 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        eig = np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2.0)
        if eig.min() < -1e-10:
            raise ValueError(f"density matrix has eigenvalue {eig.min()!r} < -1e-10")
        return eig


def reduced_density(state: QuantumState, regs: Sequence[str]) -> DensityMatrix:
    """Partial trace keeping the listed registers.

    Row/column indices of the result pack the kept registers with the same
    convention as layouts: regs[0] in the least-significant bits.
    """
    layout = state.layout
    _local_widths(layout, regs)
    keep_dim = 1 << sum(layout.width(r) for r in regs)
    if keep_dim > DENSITY_DIM_CAP:
        raise ValueError(
            f"reduced density dimension {keep_dim} exceeds the cap of {DENSITY_DIM_CAP}")
    registers = layout.registers
    n = len(registers)
    # Axis i of the reshaped tensor is register n-1-i (row-major puts the
    # last register, the most significant bits, on axis 0).
    tensor_view = state.amplitudes.reshape([1 << r.width for r in reversed(registers)])
    axis_of = {r.name: n - 1 - i for i, r in enumerate(registers)}
    keep_axes = [axis_of[name] for name in reversed(regs)]
    rest_axes = [axis_of[r.name] for r in registers if r.name not in set(regs)]
    flat = tensor_view.transpose(keep_axes + rest_axes).reshape(keep_dim, -1)
    return DensityMatrix(flat @ flat.conj().T)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits: -sum(lam * log2 lam) over eigenvalues above 1e-12."""
    eig = rho.eigenvalues()
    eig = eig[eig > ENTROPY_EIG_FLOOR]
    return float(-np.sum(eig * np.log2(eig)))

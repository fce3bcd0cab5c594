"""Named qubit registers packed into one basis-index space.

Packing convention (used by every module in this package): the first
register in a layout occupies the least-significant bits of a basis
index, and each subsequent register the next ``width`` bits up.  A
register of width w holding value v contributes ``v << offset`` to the
index, with ``offset`` the sum of the widths of all earlier registers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

DEFAULT_MAX_QUBITS = 24


@dataclass(frozen=True)
class Register:
    name: str
    width: int
    offset: int

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1


class RegisterLayout:
    """Ordered, non-overlapping named registers with fixed bit offsets."""

    def __init__(self, registers: Iterable[tuple[str, int]],
                 max_qubits: int = DEFAULT_MAX_QUBITS):
        regs = []
        offset = 0
        seen = set()
        for name, width in registers:
            if not isinstance(width, int) or width < 1:
                raise ValueError(f"register {name!r} needs a width >= 1, got {width}")
            if name in seen:
                raise ValueError(f"duplicate register name {name!r}")
            seen.add(name)
            regs.append(Register(name, width, offset))
            offset += width
        if not regs:
            raise ValueError("a layout needs at least one register")
        if offset > max_qubits:
            raise ValueError(
                f"layout requires {offset} qubits, exceeding the cap of {max_qubits}")
        self._registers: tuple[Register, ...] = tuple(regs)
        self._by_name = {r.name: r for r in regs}
        self.max_qubits = max_qubits
        self.total_qubits = offset
        self.dim = 1 << offset

    @property
    def registers(self) -> tuple[Register, ...]:
        return self._registers

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self._registers)

    def register(self, name: str) -> Register:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no register named {name!r}; have {list(self.names)}") from None

    def width(self, name: str) -> int:
        return self.register(name).width

    def offset(self, name: str) -> int:
        return self.register(name).offset

    def extract(self, index, name: str):
        """Value of a register inside a basis index (scalar or ndarray)."""
        reg = self.register(name)
        return (index >> reg.offset) & reg.mask

    def pack(self, assignment: Mapping[str, int]) -> int:
        """Basis index for the given register values; omitted registers are 0."""
        index = 0
        for name, value in assignment.items():
            reg = self.register(name)
            if not 0 <= value <= reg.mask:
                raise ValueError(
                    f"value {value} exceeds register {name} width {reg.width}")
            index |= value << reg.offset
        return index

    def unpack(self, index: int) -> dict[str, int]:
        return {r.name: (index >> r.offset) & r.mask for r in self._registers}

    def extend(self, name: str, width: int) -> "RegisterLayout":
        """New layout with an extra register appended above the existing ones."""
        return RegisterLayout(
            [(r.name, r.width) for r in self._registers] + [(name, width)],
            max_qubits=self.max_qubits)

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        """New layout with ``other``'s registers above this layout's."""
        return RegisterLayout(
            [(r.name, r.width) for r in self._registers]
            + [(r.name, r.width) for r in other.registers],
            max_qubits=max(self.max_qubits, other.max_qubits))

    def index_values(self, name: str) -> np.ndarray:
        """Register value at every basis index, as an int64 array of length dim."""
        return self.extract(np.arange(self.dim, dtype=np.int64), name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegisterLayout):
            return NotImplemented
        return self._registers == other._registers

    def __hash__(self):
        return hash(self._registers)

    def __repr__(self) -> str:
        inner = ", ".join(f"{r.name}:{r.width}" for r in self._registers)
        return f"RegisterLayout({inner})"

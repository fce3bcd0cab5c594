"""Plane partitioning, scene rasterization, and the classical oracle.

The plane is an rows x cols grid of cells numbered row-major from 1 at
the top-left.  A party's private graph is whatever set of cell serials
its shapes cover.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class GridConfig:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid needs rows, cols >= 1, got {self.rows}x{self.cols}")

    @property
    def total_cells(self) -> int:
        return self.rows * self.cols

    @property
    def value_bits(self) -> int:
        """Data-register width for serials on this grid; one bit minimum.

        Serial 0 stays reserved, so on a power-of-two grid the single
        highest serial does not fit and scenes covering it are rejected
        at table-building time.
        """
        return max(1, math.ceil(math.log2(self.total_cells)))


@dataclass(frozen=True)
class Rect:
    """Axis-aligned cell-aligned rectangle, inclusive corners, 0-based."""

    r0: int
    c0: int
    r1: int
    c1: int

    def __post_init__(self):
        if self.r0 > self.r1 or self.c0 > self.c1:
            raise ValueError(f"rectangle corners out of order: {self}")
        if self.r0 < 0 or self.c0 < 0:
            raise ValueError(f"rectangle extends outside the grid: {self}")


@dataclass(frozen=True)
class Scene:
    """A grid plus the shapes (rectangles and/or explicit cells) on it."""

    grid: GridConfig
    rects: tuple[Rect, ...] = ()
    cells: tuple[int, ...] = ()

    def __post_init__(self):
        for rect in self.rects:
            if rect.r1 >= self.grid.rows or rect.c1 >= self.grid.cols:
                raise ValueError(
                    f"rectangle {rect} extends outside the "
                    f"{self.grid.rows}x{self.grid.cols} grid")
        for cell in self.cells:
            if not 1 <= cell <= self.grid.total_cells:
                raise ValueError(
                    f"cell serial {cell} outside [1, {self.grid.total_cells}]")


@dataclass(frozen=True)
class GridSet:
    """Sorted unique cell serials; may be empty only as an intersection result."""

    serials: tuple[int, ...] = field(default=())

    def __post_init__(self):
        serials = self.serials
        if list(serials) != sorted(set(serials)):
            raise ValueError("serials must be sorted and unique")
        if serials and serials[0] < 1:
            raise ValueError(f"serials start at 1, got {serials[0]}")

    def __len__(self) -> int:
        return len(self.serials)


def grid_serial(row: int, col: int, grid: GridConfig) -> int:
    """Row-major serial of a cell, starting at 1 in the top-left corner."""
    if not (0 <= row < grid.rows and 0 <= col < grid.cols):
        raise ValueError(
            f"cell ({row}, {col}) outside the {grid.rows}x{grid.cols} grid")
    return row * grid.cols + col + 1


def serial_cell(serial: int, grid: GridConfig) -> tuple[int, int]:
    """Inverse of grid_serial."""
    if not 1 <= serial <= grid.total_cells:
        raise ValueError(f"serial {serial} outside [1, {grid.total_cells}]")
    return (serial - 1) // grid.cols, (serial - 1) % grid.cols


def rasterize(scene: Scene) -> GridSet:
    """Union of all shape cells as sorted serials; empty scenes are rejected."""
    covered: set[int] = set(scene.cells)
    for rect in scene.rects:
        for row in range(rect.r0, rect.r1 + 1):
            for col in range(rect.c0, rect.c1 + 1):
                covered.add(grid_serial(row, col, scene.grid))
    if not covered:
        raise ValueError("scene covers no cells; the protocol needs a nonempty set")
    return GridSet(tuple(sorted(covered)))


def classical_intersect(a: GridSet, b: GridSet) -> tuple[bool, GridSet]:
    """Exact set intersection by merging the two sorted serial lists."""
    common = []
    i = j = 0
    sa, sb = a.serials, b.serials
    while i < len(sa) and j < len(sb):
        if sa[i] == sb[j]:
            common.append(sa[i])
            i += 1
            j += 1
        elif sa[i] < sb[j]:
            i += 1
        else:
            j += 1
    return bool(common), GridSet(tuple(common))


class SceneFormatError(ValueError):
    """Scene file or document does not match the expected structure."""


def _require(condition: bool, message: str):
    if not condition:
        raise SceneFormatError(message)


def scene_from_dict(doc: dict) -> Scene:
    """Build a scene from its JSON document form.

    Expected shape::

        {"grid": {"rows": 4, "cols": 4},
         "shapes": [{"rect": [0, 0, 1, 1]}, {"cells": [7, 12]}],
         "cells": [3]}

    ``grid`` is mandatory; at least one of ``shapes`` / ``cells`` must
    produce a cell.
    """
    _require(isinstance(doc, dict), "scene document must be a JSON object")
    _require("grid" in doc, 'scene is missing the "grid" field')
    grid_doc = doc["grid"]
    _require(isinstance(grid_doc, dict) and {"rows", "cols"} <= set(grid_doc),
             '"grid" must be an object with "rows" and "cols"')
    try:
        grid = GridConfig(int(grid_doc["rows"]), int(grid_doc["cols"]))
    except (TypeError, ValueError) as exc:
        raise SceneFormatError(f'bad "grid": {exc}') from None

    rects: list[Rect] = []
    cells: list[int] = []
    for k, shape in enumerate(doc.get("shapes", [])):
        _require(isinstance(shape, dict), f"shapes[{k}] must be an object")
        if "rect" in shape:
            corners = shape["rect"]
            _require(isinstance(corners, list) and len(corners) == 4,
                     f'shapes[{k}].rect must be [r0, c0, r1, c1]')
            try:
                rects.append(Rect(*(int(v) for v in corners)))
            except (TypeError, ValueError) as exc:
                raise SceneFormatError(f"shapes[{k}].rect: {exc}") from None
        elif "cells" in shape:
            _require(isinstance(shape["cells"], list),
                     f"shapes[{k}].cells must be a list of serials")
            cells.extend(int(v) for v in shape["cells"])
        else:
            raise SceneFormatError(
                f'shapes[{k}] needs a "rect" or a "cells" field')
    if "cells" in doc:
        _require(isinstance(doc["cells"], list), '"cells" must be a list of serials')
        cells.extend(int(v) for v in doc["cells"])
    try:
        return Scene(grid, tuple(rects), tuple(sorted(set(cells))))
    except ValueError as exc:
        raise SceneFormatError(str(exc)) from None


def load_scene(path: str) -> Scene:
    """Parse a scene file, reporting the offending line or field on failure."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneFormatError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from None
    try:
        return scene_from_dict(doc)
    except SceneFormatError as exc:
        raise SceneFormatError(f"{path}: {exc}") from None

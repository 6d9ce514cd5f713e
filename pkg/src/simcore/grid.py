"""
Spatial Grid Module
===================

Uniform hash grid over the cubic environment. Every molecule is indexed in the
cell containing its centre; a 27-cell neighbourhood query returns a superset of
all overlap candidates as long as ``cell_size`` is at least the largest
possible sum of two radii.
"""

import math
from typing import Dict, Iterable, List, Tuple

import numpy as np

Cell = Tuple[int, int, int]


class SpatialGrid:
    """Sparse cell -> molecule-id index."""

    def __init__(self, cell_size: float):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell_size = float(cell_size)
        # dicts keep insertion order, so queries are deterministic
        self._cells: Dict[Cell, Dict[int, None]] = {}
        self._where: Dict[int, Cell] = {}

    def cell_of(self, position: Iterable[float]) -> Cell:
        x, y, z = position
        c = self.cell_size
        return (math.floor(x / c), math.floor(y / c), math.floor(z / c))

    def insert(self, mol_id: int, position: np.ndarray) -> None:
        if mol_id in self._where:
            raise KeyError(f"Molecule {mol_id} already indexed")
        cell = self.cell_of(position)
        self._cells.setdefault(cell, {})[mol_id] = None
        self._where[mol_id] = cell

    def remove(self, mol_id: int) -> None:
        cell = self._where.pop(mol_id)
        members = self._cells[cell]
        del members[mol_id]
        if not members:
            del self._cells[cell]

    def move(self, mol_id: int, position: np.ndarray) -> None:
        cell = self.cell_of(position)
        if self._where[mol_id] != cell:
            self.remove(mol_id)
            self._cells.setdefault(cell, {})[mol_id] = None
            self._where[mol_id] = cell

    def neighbors(self, position: np.ndarray) -> List[int]:
        """Ids indexed in the 27 cells around ``position``."""
        cx, cy, cz = self.cell_of(position)
        found: List[int] = []
        cells = self._cells
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    members = cells.get((cx + dx, cy + dy, cz + dz))
                    if members:
                        found.extend(members)
        return found

    def cell_members(self, cell: Cell) -> List[int]:
        return list(self._cells.get(cell, ()))

    def __contains__(self, mol_id: int) -> bool:
        return mol_id in self._where

    def __len__(self) -> int:
        return len(self._where)

"""Uniform space-time mesh on [0, T] x [0, L] with a ghost node at x = L + h.

Fields are stored as ``(rows, N_L + 2)`` arrays.  Node-aligned fields (U, M)
have ``N_T + 1`` rows, one per time level.  Transition-aligned fields and
series (Q, Q-bar, P, psi) have ``N_T`` rows: row ``tau`` lives on the step
``t_tau -> t_{tau+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cournot_mfg.errors import ConfigurationError

NODE = "node"
TRANSITION = "transition"

FIELD_KINDS = ("value-function", "density", "policy", "generic")


@dataclass(frozen=True)
class GridSpec:
    L: float
    T: float
    N_L: int
    N_T: int

    def __post_init__(self):
        if not (self.L > 0 and self.T > 0):
            raise ConfigurationError(f"L and T must be positive, got L={self.L}, T={self.T}")
        if int(self.N_L) != self.N_L or int(self.N_T) != self.N_T:
            raise ConfigurationError("N_L and N_T must be integers")
        if self.N_L < 2 or self.N_T < 1:
            raise ConfigurationError(f"need N_L >= 2 and N_T >= 1, got N_L={self.N_L}, N_T={self.N_T}")

    @property
    def h(self) -> float:
        return self.L / self.N_L

    @property
    def dt(self) -> float:
        return self.T / self.N_T

    @property
    def x(self) -> np.ndarray:
        """Space nodes x_i = i h, i = 0..N_L+1 (last one is the ghost)."""
        return np.arange(self.N_L + 2) * self.h

    @property
    def t(self) -> np.ndarray:
        """Time levels t_tau = tau dt, tau = 0..N_T."""
        return np.arange(self.N_T + 1) * self.dt

    def rows(self, alignment: str) -> int:
        if alignment == NODE:
            return self.N_T + 1
        if alignment == TRANSITION:
            return self.N_T
        raise ValueError(f"unknown alignment {alignment!r}")

    def zeros(self, alignment: str = NODE) -> np.ndarray:
        return np.zeros((self.rows(alignment), self.N_L + 2))


def build_grid(L, T, N_L, N_T) -> GridSpec:
    if not (N_L > 0 and N_T > 0):
        raise ConfigurationError("cell counts must be positive")
    return GridSpec(float(L), float(T), int(N_L), int(N_T))


@dataclass
class SpaceTimeField:
    grid: GridSpec
    values: np.ndarray
    kind: str = "generic"
    alignment: str = NODE

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.grid.rows(self.alignment), self.grid.N_L + 2)
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} does not match grid {expected}")

    def interior(self) -> np.ndarray:
        """Values without the ghost column."""
        return self.values[:, : self.grid.N_L + 1]


@dataclass
class TimeSeries:
    grid: GridSpec
    values: np.ndarray
    alignment: str = TRANSITION
    times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.grid.rows(self.alignment)
        if self.values.shape != (n,):
            raise ValueError(f"series length {self.values.shape} does not match alignment {self.alignment} ({n})")
        self.times = self.grid.t[:n]


def l2_norm(f) -> float:
    """Grid-weighted l2 norm (sum |f|^2 h dt)^(1/2) over all stored rows, ghost excluded.

    Accepts a SpaceTimeField; the number of rows summed follows its alignment.
    """
    grid = f.grid
    vals = f.values[:, : grid.N_L + 1]
    return float(np.sqrt(np.sum(vals * vals) * grid.h * grid.dt))


def space_integral(row, grid: GridSpec) -> float:
    """Rectangle rule h * sum_{i=0}^{N_L} row_i (ghost excluded)."""
    row = np.asarray(row, dtype=float)
    if row.shape[-1] < grid.N_L + 1:
        raise ValueError("row shorter than N_L + 1")
    return float(grid.h * np.sum(row[: grid.N_L + 1]))


def row_integrals(values, grid: GridSpec) -> np.ndarray:
    """space_integral applied to every row of a 2-D array."""
    return grid.h * np.sum(np.asarray(values)[:, : grid.N_L + 1], axis=1)

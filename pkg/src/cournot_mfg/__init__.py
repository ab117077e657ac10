"""Smoothed policy iteration solver for Cournot mean field games of controls."""

from cournot_mfg.grid import GridSpec, SpaceTimeField, TimeSeries, build_grid, l2_norm, space_integral
from cournot_mfg.model import (
    CESPrice,
    DiffusionProfile,
    LinearPrice,
    ModelParams,
    evaluate_J,
    hamiltonian_argmax,
    hamiltonian_value,
)
from cournot_mfg.spi import EquilibriumSolution, IterationDiagnostics, LearningSchedule, SpiConfig, spi_solve

__all__ = [
    "GridSpec",
    "SpaceTimeField",
    "TimeSeries",
    "build_grid",
    "l2_norm",
    "space_integral",
    "CESPrice",
    "LinearPrice",
    "DiffusionProfile",
    "ModelParams",
    "evaluate_J",
    "hamiltonian_argmax",
    "hamiltonian_value",
    "EquilibriumSolution",
    "IterationDiagnostics",
    "LearningSchedule",
    "SpiConfig",
    "spi_solve",
]

__version__ = "0.1.0"

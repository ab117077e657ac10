"""Forward Fokker-Planck march under a fixed (smoothed) policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cournot_mfg import _kernels
from cournot_mfg.errors import ConfigurationError, NumericalError
from cournot_mfg.grid import NODE, GridSpec, SpaceTimeField, TimeSeries, row_integrals
from cournot_mfg.model import ModelParams
from cournot_mfg.operators import DENSITY_CLOSURE, assemble_fpk_system, thomas_solve


@dataclass
class DensityEvolution:
    M: SpaceTimeField
    mass: TimeSeries


@dataclass(frozen=True)
class BumpSpec:
    """Truncated Gaussian (exp(-rate (x - center)^2) - floor)_+."""

    center: float
    rate: float
    floor: float


TEST1_BUMP = BumpSpec(center=3.0, rate=0.2, floor=0.7)
OIL_BUMP = BumpSpec(center=30.0, rate=0.0008, floor=0.7)


def initial_density(spec: BumpSpec, grid: GridSpec) -> np.ndarray:
    if spec.floor >= 1.0:
        raise ConfigurationError("bump floor >= 1 leaves an empty support")
    x = grid.x
    row = np.maximum(np.exp(-spec.rate * (x - spec.center) ** 2) - spec.floor, 0.0)
    row[0] = 0.0
    row[grid.N_L + 1] = 0.0
    mass = grid.h * row[: grid.N_L + 1].sum()
    if mass <= 0.0:
        raise ConfigurationError("initial bump has no mass on the grid")
    row /= mass
    # ghost is written by the flux closure once the march starts
    return row


def fpk_step(M_row, Qbar_row, params: ModelParams, grid: GridSpec, step=None) -> np.ndarray:
    system = assemble_fpk_system(M_row, Qbar_row, params, grid)
    try:
        sol = thomas_solve(system)
    except NumericalError as exc:
        raise NumericalError(f"FPK solve failed at step {step}", step=step) from exc
    out = np.empty(grid.N_L + 2)
    out[1 : grid.N_L + 1] = sol
    return DENSITY_CLOSURE.apply(out, params.diffusion.sigma2(grid.x))


def solve_forward(M_0, Qbar, params: ModelParams, grid: GridSpec) -> DensityEvolution:
    """March M from M_0 through every transition of the transition-aligned policy Qbar."""
    q = np.ascontiguousarray(getattr(Qbar, "values", Qbar), dtype=float)
    s2 = params.diffusion.sigma2(grid.x)
    M, status = _kernels.fpk_march(np.asarray(M_0, dtype=float), q, s2, grid.h, grid.dt)
    if status >= 0:
        raise NumericalError(f"FPK solve failed at step {status}", step=int(status))
    mass = TimeSeries(grid, row_integrals(M, grid), alignment=NODE)
    return DensityEvolution(SpaceTimeField(grid, M, kind="density"), mass)

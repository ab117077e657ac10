"""Backward HJB marches: policy evaluation and best response."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from cournot_mfg import _kernels
from cournot_mfg.errors import NumericalError
from cournot_mfg.grid import TRANSITION, GridSpec, SpaceTimeField
from cournot_mfg.model import ModelParams
from cournot_mfg.operators import VALUE_CLOSURE, assemble_hjb_system, thomas_solve

log = logging.getLogger(__name__)


@dataclass
class ValueEvolution:
    U: SpaceTimeField


@dataclass
class BestResponse:
    V: ValueEvolution
    Q: SpaceTimeField
    converged: bool
    iterations: int
    defects: list = field(default_factory=list)


def zero_terminal(grid: GridSpec) -> np.ndarray:
    return np.zeros(grid.N_L + 2)


def policy_eval_step(U_next, Qbar_row, P, params: ModelParams, grid: GridSpec, step=None) -> np.ndarray:
    system = assemble_hjb_system(U_next, Qbar_row, P, params, grid)
    try:
        sol = thomas_solve(system)
    except NumericalError as exc:
        raise NumericalError(f"HJB solve failed at step {step}", step=step) from exc
    out = np.empty(grid.N_L + 2)
    out[1 : grid.N_L + 1] = sol
    return VALUE_CLOSURE.apply(out, None)


def _march(u_T, q, P, params, grid):
    s2 = params.diffusion.sigma2(grid.x)
    U, status = _kernels.hjb_march(
        np.asarray(u_T, dtype=float),
        np.ascontiguousarray(q, dtype=float),
        np.ascontiguousarray(P, dtype=float),
        s2,
        grid.h,
        grid.dt,
        params.lam,
        params.gamma,
        params.kappa,
    )
    if status >= 0:
        raise NumericalError(f"HJB solve failed at step {status}", step=int(status))
    return U


def policy_evaluation(Qbar, P, u_T, params: ModelParams, grid: GridSpec) -> ValueEvolution:
    """Solve the linear HJB backward from u_T with policy Qbar and price series P."""
    q = getattr(Qbar, "values", Qbar)
    P = getattr(P, "values", P)
    U = _march(u_T, q, P, params, grid)
    return ValueEvolution(SpaceTimeField(grid, U, kind="value-function"))


def greedy_policy(U, P, params: ModelParams, grid: GridSpec) -> np.ndarray:
    U = getattr(U, "values", U)
    P = getattr(P, "values", P)
    return _kernels.greedy_policy(
        np.ascontiguousarray(U), np.ascontiguousarray(P, dtype=float), params.gamma, params.kappa, params.q_max, grid.h
    )


def best_response_solve(
    P, u_T, params: ModelParams, grid: GridSpec, tol=None, max_inner=200, Q_init=None
) -> BestResponse:
    """Policy iteration on the whole space-time field for the nonlinear HJB at fixed price.

    Alternates a full policy evaluation with a greedy update until successive
    value fields differ by at most ``tol`` in sup norm.  Non-convergence is
    reported through ``converged=False`` and a logged warning.
    """
    P = np.asarray(getattr(P, "values", P), dtype=float)
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(u_T))))
    if Q_init is None:
        q = np.zeros((grid.N_T, grid.N_L + 2))
    else:
        q = np.asarray(getattr(Q_init, "values", Q_init), dtype=float)
    V_prev = _march(u_T, q, P, params, grid)
    defects = []
    converged = False
    k = 0
    for k in range(1, max_inner + 1):
        q = greedy_policy(V_prev, P, params, grid)
        V = _march(u_T, q, P, params, grid)
        defect = float(np.max(np.abs(V - V_prev)))
        defects.append(defect)
        V_prev = V
        if defect <= tol:
            converged = True
            break
    if not converged:
        log.warning("best response did not converge in %d iterations (last defect %.3e)", max_inner, defects[-1])
    q = greedy_policy(V_prev, P, params, grid)
    return BestResponse(
        ValueEvolution(SpaceTimeField(grid, V_prev, kind="value-function")),
        SpaceTimeField(grid, q, kind="policy", alignment=TRANSITION),
        converged,
        k,
        defects,
    )

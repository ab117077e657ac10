"""Discrete smoothed policy iteration (SPI) for the Cournot MFG of controls.

Each iteration n runs, in order:

1. mean-field update   M^(n)   <- FPK march under Qbar^(n)
2. price update        P^(n)_tau = P(t_tau, h sum_i M^(n)_{tau+1,i} Qbar^(n)_{tau,i})
3. policy evaluation   U^(n)   <- linear HJB under Qbar^(n), P^(n)
4. policy update       Q^(n+1) <- greedy clamp from D#U^(n)
5. policy smoothing    Qbar^(n+1) = (1 - zeta_n) Qbar^(n) + zeta_n Q^(n+1)

and stops once ||Q^(n+1) - Qbar^(n)||_l2 <= epsilon.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from cournot_mfg import _kernels
from cournot_mfg.errors import ConfigurationError, NumericalError
from cournot_mfg.fpk import solve_forward
from cournot_mfg.grid import TRANSITION, GridSpec, SpaceTimeField, TimeSeries
from cournot_mfg.hjb import best_response_solve, greedy_policy, policy_evaluation
from cournot_mfg.model import ModelParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LearningSchedule:
    """zeta_n = beta / (n + beta); zeta_0 = 1 so the first greedy policy replaces Q^(0)."""

    beta: int = 2

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 1:
            raise ConfigurationError("beta must be a positive integer")

    def zeta(self, n: int) -> float:
        return self.beta / (n + self.beta)


@dataclass(frozen=True)
class SpiConfig:
    epsilon: float = 1e-4
    max_iters: int = 2000
    exploitability_every: int = 10
    schedule: LearningSchedule = field(default_factory=LearningSchedule)
    br_tol: float | None = None
    br_max_inner: int = 200

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be at least 1")
        if self.exploitability_every < 0:
            raise ConfigurationError("exploitability_every must be >= 0")


@dataclass
class IterationDiagnostics:
    n: int
    residual: float
    weighted_an: float
    exploitability: float | None
    J_value: float
    terminal_mass: float
    # max of the density M^(n+1) that weights a_n
    density_max: float = math.nan


@dataclass
class EquilibriumSolution:
    """Final SPI state.

    U, M, P, psi come from the last iteration n and were produced by Qbar
    (= Qbar^(n)); Q is the greedy policy Q^(n+1) computed from them.
    """

    grid: GridSpec
    params: ModelParams
    U: SpaceTimeField
    M: SpaceTimeField
    Q: SpaceTimeField
    Qbar: SpaceTimeField
    P: TimeSeries
    psi: TimeSeries
    history: list[IterationDiagnostics]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.history)

    @property
    def final_residual(self) -> float:
        return self.history[-1].residual if self.history else math.nan


def price_update(M, Qbar, pm, grid: GridSpec):
    """Price and aggregate production per transition, pairing M_{tau+1} with Qbar_tau."""
    M = getattr(M, "values", M)
    Qbar = getattr(Qbar, "values", Qbar)
    psi, _ = _kernels.coupling_sums(np.ascontiguousarray(M), np.ascontiguousarray(Qbar), grid.h, 0.0, 0.0)
    P = pm.price(grid.t[: grid.N_T], psi)
    return TimeSeries(grid, P), TimeSeries(grid, psi)


def policy_update(U, P, params: ModelParams, grid: GridSpec) -> SpaceTimeField:
    return SpaceTimeField(grid, greedy_policy(U, P, params, grid), kind="policy", alignment=TRANSITION)


def policy_smoothing(Qbar, Q_next, n: int, schedule: LearningSchedule) -> SpaceTimeField:
    z = schedule.zeta(n)
    out = (1.0 - z) * Qbar.values + z * Q_next.values
    return SpaceTimeField(Qbar.grid, out, kind="policy", alignment=TRANSITION)


def compute_an(M_next, Q_next, Qbar, grid: GridSpec) -> float:
    """sum_{tau,i} M_{tau+1,i} (Q_{tau,i} - Qbar_{tau,i})^2 h dt."""
    M_next = np.ascontiguousarray(getattr(M_next, "values", M_next))
    Q_next = np.ascontiguousarray(getattr(Q_next, "values", Q_next))
    Qbar = np.ascontiguousarray(getattr(Qbar, "values", Qbar))
    return float(_kernels.weighted_sq_diff(M_next, Q_next, Qbar) * grid.h * grid.dt)


def compute_exploitability(U, V, M_0, grid: GridSpec) -> float:
    U = getattr(U, "values", U)
    V = getattr(V, "values", V)
    n = grid.N_L + 1
    return float(grid.h * np.sum((V[0, :n] - U[0, :n]) * np.asarray(M_0)[:n]))


def constant_policy(grid: GridSpec, value: float) -> SpaceTimeField:
    return SpaceTimeField(grid, np.full((grid.N_T, grid.N_L + 2), float(value)), kind="policy", alignment=TRANSITION)


def _close_an(diag, M_next, pending, hdt, callback):
    diag.weighted_an = math.sqrt(_kernels.weighted_sq_diff(M_next, *pending) * hdt)
    diag.density_max = float(M_next.max())
    if callback is not None:
        callback(diag)


def spi_solve(params: ModelParams, grid: GridSpec, m0, u_T, Q0, cfg: SpiConfig, callback=None) -> EquilibriumSolution:
    """Run discrete SPI from the initial policy Q0 until the residual drops below cfg.epsilon.

    Non-convergence within cfg.max_iters is reported through ``converged``.
    ``callback(diag)`` is invoked with each completed IterationDiagnostics.
    """
    if not isinstance(Q0, SpaceTimeField):
        Q0 = SpaceTimeField(grid, Q0, kind="policy", alignment=TRANSITION)
    q_max = params.q_max
    if Q0.values.min() < 0 or Q0.values.max() > q_max * (1 + 1e-12):
        raise ConfigurationError("initial policy must lie in [0, q_max]")
    m0 = np.asarray(m0, dtype=float)
    qbar = Q0
    history: list[IterationDiagnostics] = []
    pending = None
    converged = False
    n = 0
    t = grid.t[: grid.N_T]
    discount = np.exp(-params.lam * t)
    hdt = grid.h * grid.dt
    while True:
        try:
            dens = solve_forward(m0, qbar, params, grid)
            if pending is not None:
                _close_an(history[-1], dens.M.values, pending, hdt, callback)
            psi, cost = _kernels.coupling_sums(dens.M.values, qbar.values, grid.h, params.gamma, params.kappa)
            P = TimeSeries(grid, params.price.price(t, psi))
            U = policy_evaluation(qbar, P, u_T, params, grid).U
            Q_next = policy_update(U, P, params, grid)
        except NumericalError as exc:
            raise NumericalError(f"iteration {n}: {exc}", step=exc.step, iteration=n) from exc
        residual = math.sqrt(_kernels.sq_diff(Q_next.values, qbar.values) * hdt)
        converged = residual <= cfg.epsilon
        last = converged or n + 1 >= cfg.max_iters
        expl = None
        if cfg.exploitability_every and (n % cfg.exploitability_every == 0 or last):
            br = best_response_solve(
                P, u_T, params, grid, tol=cfg.br_tol, max_inner=cfg.br_max_inner, Q_init=Q_next.values
            )
            expl = compute_exploitability(U, br.V.U, m0, grid)
        history.append(
            IterationDiagnostics(
                n=n,
                residual=residual,
                weighted_an=math.nan,
                exploitability=expl,
                J_value=float(grid.dt * np.sum(discount * (params.price.phi(t, psi) - cost))),
                terminal_mass=float(dens.mass.values[-1]),
            )
        )
        log.debug("iter %d residual %.3e", n, residual)
        qbar_next = policy_smoothing(qbar, Q_next, n, cfg.schedule)
        pending = (Q_next.values, qbar.values)
        if last:
            break
        qbar = qbar_next
        n += 1

    # density under Qbar^(n+1) closes the last a_n entry
    dens_next = solve_forward(m0, qbar_next, params, grid)
    _close_an(history[-1], dens_next.M.values, pending, hdt, callback)

    return EquilibriumSolution(
        grid=grid,
        params=params,
        U=U,
        M=dens.M,
        Q=Q_next,
        Qbar=qbar,
        P=P,
        psi=TimeSeries(grid, psi),
        history=history,
        converged=converged,
    )

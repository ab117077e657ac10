"""Finite-difference stencils, boundary closures and the implicit systems.

The HJB generator  A phi = sigma^2 Lap# phi - Q D# phi  acts on rows with
phi_0 = 0 and phi_{N_L+1} = phi_{N_L}; its adjoint
A* m = Lap#(sigma^2 m) + div#(Q m)  acts on rows with m_0 = 0 and
sigma^2_{N_L} m_{N_L} = sigma^2_{N_L+1} m_{N_L+1}.  With those closures the
backward-Euler FPK matrix is exactly the transpose of the HJB matrix taken
at lambda = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cournot_mfg import _kernels
from cournot_mfg.errors import NumericalError
from cournot_mfg.grid import GridSpec
from cournot_mfg.model import ModelParams


def laplacian_sharp(row, i, h):
    return (row[i - 1] - 2.0 * row[i] + row[i + 1]) / (h * h)


def gradient_sharp(row, i, h):
    return (row[i] - row[i - 1]) / h


def divergence_sharp(product_row, i, h, N_L):
    if i == N_L:
        return -product_row[N_L] / h
    return (product_row[i + 1] - product_row[i]) / h


@dataclass
class BoundaryClosure:
    right: str  # "neumann-equal" | "flux-weighted"

    def apply(self, row, sigma2):
        n_l = row.shape[0] - 2
        row[0] = 0.0
        if self.right == "neumann-equal":
            row[n_l + 1] = row[n_l]
        elif self.right == "flux-weighted":
            s2 = np.asarray(sigma2, dtype=float)
            row[n_l + 1] = s2[n_l] * row[n_l] / s2[n_l + 1] if s2[n_l + 1] > 0 else row[n_l]
        else:
            raise ValueError(f"unknown closure {self.right!r}")
        return row


VALUE_CLOSURE = BoundaryClosure("neumann-equal")
DENSITY_CLOSURE = BoundaryClosure("flux-weighted")


@dataclass
class TridiagonalSystem:
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        A = np.diag(self.diag)
        if self.n > 1:
            A += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return A

    def matvec(self, x) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub * x[:-1]
        y[:-1] += self.sup * x[1:]
        return y


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    out = np.empty(system.n)
    ok = _kernels.thomas(
        np.ascontiguousarray(system.sub, dtype=float),
        np.ascontiguousarray(system.diag, dtype=float),
        np.ascontiguousarray(system.sup, dtype=float),
        np.ascontiguousarray(system.rhs, dtype=float),
        out,
    )
    if not ok:
        raise NumericalError("zero pivot in tridiagonal elimination")
    return out


def _coefficient_buffers(n_l):
    return np.empty(n_l - 1), np.empty(n_l), np.empty(n_l - 1)


def assemble_hjb_system(U_next, Qbar_row, P, params: ModelParams, grid: GridSpec) -> TridiagonalSystem:
    """Backward-Euler step for the value function at fixed policy and price.

    Unknowns are U_{tau,1..N_L}.
    """
    s2 = params.diffusion.sigma2(grid.x)
    q = np.asarray(Qbar_row, dtype=float)
    sub, diag, sup = _coefficient_buffers(grid.N_L)
    _kernels.hjb_coefficients(q, s2, grid.h, grid.dt, params.lam, sub, diag, sup)
    qi = q[1 : grid.N_L + 1]
    rhs = np.asarray(U_next, dtype=float)[1 : grid.N_L + 1] / grid.dt + qi * (P - params.gamma) - params.kappa * qi * qi
    return TridiagonalSystem(sub, diag, sup, rhs)


def assemble_fpk_system(M_prev, Qbar_row, params: ModelParams, grid: GridSpec) -> TridiagonalSystem:
    """Backward-Euler step for the density; unknowns are M_{tau+1,1..N_L}."""
    s2 = params.diffusion.sigma2(grid.x)
    sub, diag, sup = _coefficient_buffers(grid.N_L)
    _kernels.fpk_coefficients(np.asarray(Qbar_row, dtype=float), s2, grid.h, grid.dt, sub, diag, sup)
    rhs = np.asarray(M_prev, dtype=float)[1 : grid.N_L + 1] / grid.dt
    return TridiagonalSystem(sub, diag, sup, rhs)


def apply_generator(phi, Q_row, sigma2, h):
    """(A phi)_i for i = 1..N_L; phi must already carry its closures."""
    phi = np.asarray(phi, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    lap = (phi[:-2] - 2.0 * phi[1:-1] + phi[2:]) / (h * h)
    grad = (phi[1:-1] - phi[:-2]) / h
    return s2[1:-1] * lap - np.asarray(Q_row)[1:-1] * grad


def apply_adjoint(m, Q_row, sigma2, h):
    """(A* m)_i for i = 1..N_L; m must already carry its closures."""
    w = np.asarray(sigma2, dtype=float) * np.asarray(m, dtype=float)
    lap = (w[:-2] - 2.0 * w[1:-1] + w[2:]) / (h * h)
    flux = np.asarray(Q_row, dtype=float) * np.asarray(m, dtype=float)
    div = np.empty_like(lap)
    div[:-1] = (flux[2:-1] - flux[1:-2]) / h
    div[-1] = -flux[-2] / h
    return lap + div


def adjointness_defect(Q_row, params: ModelParams, grid: GridSpec, phi, m) -> float:
    """|h sum (A phi)_i m_i - h sum phi_i (A* m)_i| over i = 1..N_L."""
    s2 = params.diffusion.sigma2(grid.x)
    n = grid.N_L + 1
    lhs = grid.h * np.dot(apply_generator(phi, Q_row, s2, grid.h), np.asarray(m)[1:n])
    rhs = grid.h * np.dot(np.asarray(phi)[1:n], apply_adjoint(m, Q_row, s2, grid.h))
    return float(abs(lhs - rhs))

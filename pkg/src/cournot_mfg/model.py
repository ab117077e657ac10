"""Economic model: price/demand pairs, diffusion profiles, Hamiltonian and the
potential functional J.

All price-model methods accept scalars or numpy arrays for ``t`` and ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cournot_mfg.errors import ConfigurationError, DomainError
from cournot_mfg.grid import GridSpec


def _check_nonneg(a):
    if np.any(np.asarray(a) < 0):
        raise DomainError("aggregate production must be nonnegative")


@dataclass(frozen=True)
class LinearPrice:
    """P(t, a) = pi_sub - exp(-rho t) a / E,  D(t, P) = E exp(rho t) (pi_sub - P)."""

    E: float
    rho: float
    pi_sub: float
    T: float

    variant = "linear"

    def __post_init__(self):
        if self.E <= 0:
            raise ConfigurationError("wealth factor E must be positive")
        if self.pi_sub <= 0:
            raise ConfigurationError("substitute price pi_sub must be positive")

    def price(self, t, a):
        _check_nonneg(a)
        return self.pi_sub - np.exp(-self.rho * np.asarray(t)) * np.asarray(a) / self.E

    def demand(self, t, P):
        if np.any(np.asarray(P) > self.pi_sub):
            raise DomainError("linear demand is only invertible for P <= pi_sub")
        return self.E * np.exp(self.rho * np.asarray(t)) * (self.pi_sub - np.asarray(P))

    def phi(self, t, a):
        _check_nonneg(a)
        a = np.asarray(a)
        return self.pi_sub * a - np.exp(-self.rho * np.asarray(t)) * a * a / (2.0 * self.E)

    def max_price_at_zero(self):
        return self.pi_sub


@dataclass(frozen=True)
class CESPrice:
    """Constant-elasticity demand D(t, P) = E exp(rho t) P^(-eta) - delta."""

    E: float
    rho: float
    eta: float
    delta: float
    T: float

    variant = "ces"

    def __post_init__(self):
        if self.E <= 0 or self.eta <= 0 or self.delta <= 0:
            raise ConfigurationError("CES price needs E > 0, eta > 0, delta > 0")

    def price(self, t, a):
        _check_nonneg(a)
        t = np.asarray(t)
        a = np.asarray(a)
        return (self.E * np.exp(self.rho * t) / (self.delta + a)) ** (1.0 / self.eta)

    def demand(self, t, P):
        P = np.asarray(P)
        if np.any(P <= 0):
            raise DomainError("CES demand needs a positive price")
        return self.E * np.exp(self.rho * np.asarray(t)) * P ** (-self.eta) - self.delta

    def phi(self, t, a):
        _check_nonneg(a)
        t = np.asarray(t)
        a = np.asarray(a)
        if self.eta == 1.0:
            return self.E * np.exp(self.rho * t) * np.log((self.delta + a) / self.delta)
        s = 1.0 - 1.0 / self.eta
        scale = self.E ** (1.0 / self.eta) * np.exp(self.rho * t / self.eta)
        return scale * ((self.delta + a) ** s - self.delta**s) / s

    def max_price_at_zero(self):
        # P(t, 0) is monotone in t, so the max over [0, T] sits at an endpoint
        return max(float(self.price(0.0, 0.0)), float(self.price(self.T, 0.0)))


PriceModel = LinearPrice | CESPrice


def price(pm, t, a):
    return pm.price(t, a)


def demand(pm, t, P):
    return pm.demand(t, P)


def potential_phi(pm, t, a):
    """Antiderivative of the price in a, normalized so that phi(t, 0) = 0."""
    return pm.phi(t, a)


def compute_CP(pm, gamma: float) -> float:
    """Price margin C_P = max_{t in [0, T]} P(t, 0) - gamma."""
    cp = pm.max_price_at_zero() - gamma
    if cp <= 0:
        raise ConfigurationError(
            f"price at zero production never exceeds the linear cost gamma={gamma} (C_P={cp:.6g})"
        )
    return float(cp)


@dataclass(frozen=True)
class DiffusionProfile:
    """sigma^2(x) = sigma^2 ('constant') or (sigma x)^2 ('geometric')."""

    variant: str
    sigma: float

    def __post_init__(self):
        if self.variant not in ("constant", "geometric"):
            raise ConfigurationError(f"unknown diffusion variant {self.variant!r}")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be nonnegative")

    def sigma2(self, x):
        x = np.asarray(x, dtype=float)
        if self.variant == "constant":
            return np.full_like(x, self.sigma**2)
        return (self.sigma * x) ** 2

    @property
    def nondegenerate(self) -> bool:
        return self.variant == "constant" and self.sigma > 0


@dataclass(frozen=True)
class ModelParams:
    lam: float
    gamma: float
    kappa: float
    diffusion: DiffusionProfile
    price: LinearPrice | CESPrice

    def __post_init__(self):
        if self.gamma <= 0 or self.kappa <= 0:
            raise ConfigurationError("gamma and kappa must be positive")
        if self.lam < 0:
            raise ConfigurationError("discount rate lambda must be nonnegative")
        compute_CP(self.price, self.gamma)

    @property
    def C_P(self) -> float:
        return compute_CP(self.price, self.gamma)

    @property
    def q_max(self) -> float:
        return self.C_P / (2.0 * self.kappa)


def hamiltonian_argmax(Lam, kappa, q_max):
    """argmax over 0 <= q <= q_max of -q Lam - kappa q^2."""
    return np.clip(-np.asarray(Lam, dtype=float) / (2.0 * kappa), 0.0, q_max)


def hamiltonian_value(Lam, kappa, q_max):
    q = hamiltonian_argmax(Lam, kappa, q_max)
    return -q * np.asarray(Lam, dtype=float) - kappa * q * q


def evaluate_J(Q, M, params: ModelParams, grid: GridSpec) -> float:
    """Discrete potential J(Q, M).

    Q is transition-aligned (N_T rows) and is paired with the density at the
    end of each step, M[tau + 1], as in the price coupling.
    """
    Q = getattr(Q, "values", Q)
    M = getattr(M, "values", M)
    n = grid.N_L + 1
    q = Q[: grid.N_T, :n]
    m_next = M[1 : grid.N_T + 1, :n]
    t = grid.t[: grid.N_T]
    psi = grid.h * np.sum(m_next * q, axis=1)
    cost = grid.h * np.sum((params.gamma * q + params.kappa * q * q) * m_next, axis=1)
    disc = np.exp(-params.lam * t)
    return float(grid.dt * np.sum(disc * (params.price.phi(t, psi) - cost)))

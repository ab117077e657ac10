import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cournot_mfg.errors import ConfigurationError, DomainError
from cournot_mfg.grid import build_grid
from cournot_mfg.model import (
    CESPrice,
    DiffusionProfile,
    LinearPrice,
    ModelParams,
    compute_CP,
    demand,
    evaluate_J,
    hamiltonian_argmax,
    hamiltonian_value,
    potential_phi,
    price,
)

CES = CESPrice(E=3.0, rho=0.01, eta=1.2, delta=0.2, T=15.0)
CES0 = CESPrice(E=3.0, rho=0.0, eta=1.2, delta=0.2, T=15.0)
LIN = LinearPrice(E=1.0, rho=0.0, pi_sub=10.0, T=5.0)

price_models = st.one_of(
    st.builds(
        CESPrice,
        E=st.floats(0.1, 50),
        rho=st.floats(-0.05, 0.05),
        eta=st.floats(0.3, 3.0),
        delta=st.floats(0.05, 2.0),
        T=st.floats(0.1, 20.0),
    ),
    st.builds(
        LinearPrice,
        E=st.floats(0.1, 50),
        rho=st.floats(-0.05, 0.05),
        pi_sub=st.floats(1.0, 100.0),
        T=st.floats(0.1, 20.0),
    ),
)


# -- price / demand examples

def test_linear_price_at_origin():
    assert price(LIN, 0.0, 0.0) == 10.0


def test_ces_price_at_origin():
    # (3 / 0.2)^(1 / 1.2) evaluated independently of the implementation
    expected = math.exp(math.log(15.0) / 1.2)
    assert expected == pytest.approx(9.551598, abs=1e-6)
    assert price(CES, 0.0, 0.0) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("eta", [0.5, 1.0, 1.2, 3.0])
def test_ces_price_unit_ratio(eta):
    pm = CESPrice(E=3.0, rho=0.01, eta=eta, delta=0.2, T=1.0)
    assert price(pm, 0.0, 2.8) == pytest.approx(1.0, rel=1e-14)


def test_price_rejects_negative_production():
    with pytest.raises(DomainError):
        price(CES, 0.0, -1e-3)
    with pytest.raises(DomainError):
        price(LIN, 0.0, np.array([1.0, -1.0]))


def test_demand_examples():
    assert demand(LIN, 3.0, 10.0) == 0.0
    assert demand(CES0, 0.0, 1.0) == pytest.approx(2.8, rel=1e-14)


def test_demand_domain_errors():
    with pytest.raises(DomainError):
        demand(LIN, 0.0, 10.5)
    with pytest.raises(DomainError):
        demand(CES, 0.0, 0.0)


def test_round_trip_random(rng):
    t = rng.uniform(0, 15, 100)
    a = rng.uniform(0, 20, 100)
    for pm in (CES, LIN):
        np.testing.assert_allclose(demand(pm, t, price(pm, t, a)), a, rtol=1e-10, atol=1e-12)


@given(pm=price_models, t=st.floats(0, 1), a=st.floats(0, 100))
def test_inverse_pair_property(pm, t, a):
    t = t * pm.T
    p = price(pm, t, a)
    if isinstance(pm, LinearPrice):
        assume(p >= 0)
    assert demand(pm, t, p) == pytest.approx(a, rel=1e-10, abs=1e-10 * (1 + pm.E))


@given(pm=price_models, t=st.floats(0, 1), a1=st.floats(0, 100), a2=st.floats(0, 100))
def test_price_monotone_in_production(pm, t, a1, a2):
    lo, hi = sorted((a1, a2))
    assert price(pm, t * pm.T, lo) >= price(pm, t * pm.T, hi)


def test_price_monotone_1000_samples(rng):
    t = rng.uniform(0, 15, 1000)
    a = np.sort(rng.uniform(0, 50, (1000, 2)), axis=1)
    for pm in (CES, LIN):
        assert np.all(price(pm, t, a[:, 0]) >= price(pm, t, a[:, 1]))


# -- price margin

def test_cp_examples():
    assert compute_CP(LIN, 2.0) == 8.0
    assert compute_CP(CES0, 2.0) == pytest.approx(math.exp(math.log(15.0) / 1.2) - 2.0, rel=1e-14)
    assert compute_CP(CES0, 2.0) == pytest.approx(7.551598, abs=1e-6)


def test_cp_uses_horizon_maximum():
    expected = (3.0 * math.exp(0.01 * 15.0) / 0.2) ** (1 / 1.2) - 2.0
    assert compute_CP(CES, 2.0) == pytest.approx(expected, rel=1e-14)
    assert compute_CP(CES, 2.0) > compute_CP(CES0, 2.0)


def test_cp_negative_growth_uses_start():
    pm = CESPrice(E=3.0, rho=-0.01, eta=1.2, delta=0.2, T=15.0)
    assert compute_CP(pm, 2.0) == pytest.approx(15.0 ** (1 / 1.2) - 2.0, rel=1e-14)


def test_cp_violation():
    with pytest.raises(ConfigurationError):
        compute_CP(CES0, 15.0 ** (1 / 1.2))
    with pytest.raises(ConfigurationError):
        compute_CP(LIN, 10.0)


@given(pm=price_models, gamma=st.floats(0.01, 0.99), s=st.floats(0, 1))
def test_cap_consistency(pm, gamma, s):
    gamma = gamma * pm.max_price_at_zero()
    t = s * pm.T
    assert price(pm, t, 0.0) - gamma <= compute_CP(pm, gamma) + 1e-12 * (1 + abs(gamma))


# -- potential

def test_phi_examples():
    assert potential_phi(LIN, 0.0, 2.0) == pytest.approx(18.0, rel=1e-15)
    for pm in (CES, LIN, CESPrice(3.0, 0.01, 1.0, 0.2, 1.0)):
        assert potential_phi(pm, 0.7, 0.0) == 0.0


def test_phi_log_branch():
    pm = CESPrice(E=3.0, rho=0.02, eta=1.0, delta=0.2, T=5.0)
    t, a = 1.5, 0.8
    assert potential_phi(pm, t, a) == pytest.approx(3.0 * math.exp(0.03) * math.log(5.0), rel=1e-14)
    near = CESPrice(E=3.0, rho=0.02, eta=1.0 + 1e-7, delta=0.2, T=5.0)
    assert potential_phi(near, t, a) == pytest.approx(potential_phi(pm, t, a), rel=1e-5)


def test_phi_finite_difference_random(rng):
    eps = 1e-5
    for pm in (CES, LIN, CESPrice(3.0, 0.01, 1.0, 0.2, 15.0)):
        t = rng.uniform(0, pm.T, 200)
        a = rng.uniform(eps, 5.0, 200)
        fd = (potential_phi(pm, t, a + eps) - potential_phi(pm, t, a - eps)) / (2 * eps)
        np.testing.assert_allclose(fd, price(pm, t, a), atol=1e-6)


# -- Hamiltonian

@pytest.mark.parametrize("lam, kappa, qmax, q", [(0.0, 5.0, 1.0, 0.0), (-6.0, 5.0, 1.0, 0.6), (-20.0, 5.0, 1.0, 1.0), (4.0, 5.0, 1.0, 0.0)])
def test_argmax_examples(lam, kappa, qmax, q):
    assert hamiltonian_argmax(lam, kappa, qmax) == pytest.approx(q, rel=1e-15)


@pytest.mark.parametrize("lam, kappa, qmax, v", [(3.0, 5.0, 1.0, 0.0), (-10.0, 5.0, 1e6, 5.0), (-20.0, 5.0, 1.0, 15.0)])
def test_hamiltonian_value_examples(lam, kappa, qmax, v):
    assert hamiltonian_value(lam, kappa, qmax) == pytest.approx(v, rel=1e-15)


def test_gap_inequality_1000(rng):
    kappa, qmax = 5.0, 0.9
    Lam = rng.uniform(-30, 10, 1000)
    q = rng.uniform(0, qmax, 1000)
    qs = hamiltonian_argmax(Lam, kappa, qmax)
    gap = hamiltonian_value(Lam, kappa, qmax) - (-q * Lam - kappa * q * q)
    assert np.all(gap >= kappa * (qs - q) ** 2 - 1e-12)


@given(
    Lam=st.floats(-1e3, 1e3),
    kappa=st.floats(1e-2, 1e2),
    qmax=st.floats(1e-3, 1e2),
    s=st.floats(0, 1),
)
def test_gap_inequality_property(Lam, kappa, qmax, s):
    q = s * qmax
    qs = hamiltonian_argmax(Lam, kappa, qmax)
    gap = hamiltonian_value(Lam, kappa, qmax) - (-q * Lam - kappa * q * q)
    scale = 1 + abs(Lam) * qmax + kappa * qmax**2
    assert gap >= kappa * (qs - q) ** 2 - 1e-12 * scale


@given(Lam=st.floats(-1e3, 1e3), kappa=st.floats(1e-2, 1e2), qmax=st.floats(1e-3, 1e2), c=st.floats(1e-3, 1e3))
def test_argmax_scale_invariance(Lam, kappa, qmax, c):
    a = hamiltonian_argmax(Lam, kappa, qmax)
    b = hamiltonian_argmax(c * Lam, c * kappa, qmax)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


@given(Lam=st.floats(-1e3, 1e3), kappa=st.floats(1e-2, 1e2), qmax=st.floats(1e-3, 1e2))
def test_argmax_in_bounds_and_optimal(Lam, kappa, qmax):
    qs = hamiltonian_argmax(Lam, kappa, qmax)
    assert 0.0 <= qs <= qmax
    grid = np.linspace(0, qmax, 101)
    best = np.max(-grid * Lam - kappa * grid**2)
    assert hamiltonian_value(Lam, kappa, qmax) >= best - 1e-12 * (1 + abs(Lam) * qmax + kappa * qmax**2)


# -- diffusion and params

def test_diffusion_profiles():
    x = np.array([0.0, 1.0, 2.0])
    np.testing.assert_array_equal(DiffusionProfile("constant", 0.1).sigma2(x), np.full(3, 0.1**2))
    np.testing.assert_allclose(DiffusionProfile("geometric", 0.1).sigma2(x), [0.0, 0.01, 0.04])
    assert DiffusionProfile("constant", 0.1).nondegenerate
    assert not DiffusionProfile("geometric", 0.1).nondegenerate
    with pytest.raises(ConfigurationError):
        DiffusionProfile("levy", 0.1)
    with pytest.raises(ConfigurationError):
        DiffusionProfile("constant", -0.1)


def test_params_validation(params):
    assert params.q_max == pytest.approx(params.C_P / 10.0)
    d = DiffusionProfile("constant", 0.1)
    with pytest.raises(ConfigurationError):
        ModelParams(0.0, 0.0, 5.0, d, CES)
    with pytest.raises(ConfigurationError):
        ModelParams(0.0, 2.0, -1.0, d, CES)
    with pytest.raises(ConfigurationError):
        ModelParams(-0.1, 2.0, 5.0, d, CES)
    with pytest.raises(ConfigurationError):
        ModelParams(0.0, 20.0, 5.0, d, CES)
    with pytest.raises(ConfigurationError):
        CESPrice(E=-1.0, rho=0.0, eta=1.2, delta=0.2, T=1.0)
    with pytest.raises(ConfigurationError):
        LinearPrice(E=1.0, rho=0.0, pi_sub=0.0, T=1.0)


# -- potential functional

def test_J_zero_policy(params, small_grid, rng):
    M = np.abs(rng.normal(size=(small_grid.N_T + 1, small_grid.N_L + 2)))
    assert evaluate_J(np.zeros((small_grid.N_T, small_grid.N_L + 2)), M, params, small_grid) == 0.0


def test_J_hand_single_step():
    # N_T = 1, N_L = 2, h = 0.5, dt = 2, lambda = 0.3: one transition paired with M[1]
    g = build_grid(1.0, 2.0, 2, 1)
    pm = LinearPrice(E=2.0, rho=0.1, pi_sub=10.0, T=2.0)
    p = ModelParams(0.3, 2.0, 5.0, DiffusionProfile("constant", 0.1), pm)
    Q = np.full((1, 4), 0.4)
    M = np.array([[9.0, 9.0, 9.0, 9.0], [0.0, 1.0, 1.0, 1.0]])
    psi = 0.5 * (0.0 + 0.4 + 0.4)  # = 0.4; ghost excluded
    phi = 10.0 * psi - psi**2 / 4.0  # t = 0
    cost = 0.5 * (2.0 * 0.4 + 5.0 * 0.16) * 2.0
    assert evaluate_J(Q, M, p, g) == pytest.approx(2.0 * (phi - cost), rel=1e-12)

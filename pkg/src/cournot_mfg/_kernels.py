"""Compiled inner loops: tridiagonal elimination and the implicit time marches.

Row layout for every march: unknowns are nodes 1..N_L; node 0 is Dirichlet
zero and the ghost node N_L+1 is folded into the last row.  Arrays have
N_L+2 columns.  A returned status of -1 means success, otherwise it is the
first time index whose solve hit a zero pivot.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def thomas(sub, diag, sup, rhs, out):
    """Solve a tridiagonal system into ``out``; returns False on a zero pivot."""
    n = diag.shape[0]
    return thomas_ws(sub, diag, sup, rhs, out, np.empty(n), np.empty(n))


@njit(cache=True)
def thomas_ws(sub, diag, sup, rhs, out, cp, dp):
    """Thomas elimination with caller-provided workspace ``cp``, ``dp``."""
    n = diag.shape[0]
    piv = diag[0]
    if piv == 0.0:
        return False
    cp[0] = sup[0] / piv if n > 1 else 0.0
    dp[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - sub[k - 1] * cp[k - 1]
        if piv == 0.0:
            return False
        cp[k] = sup[k] / piv if k < n - 1 else 0.0
        dp[k] = (rhs[k] - sub[k - 1] * dp[k - 1]) / piv
    out[n - 1] = dp[n - 1]
    for k in range(n - 2, -1, -1):
        out[k] = dp[k] - cp[k] * out[k + 1]
    return True


@njit(cache=True)
def fpk_coefficients(q, s2, h, dt, sub, diag, sup):
    n_l = s2.shape[0] - 2
    ih2 = 1.0 / (h * h)
    ih = 1.0 / h
    for r in range(n_l):
        i = r + 1
        if i < n_l:
            diag[r] = 1.0 / dt + 2.0 * s2[i] * ih2 + q[i] * ih
            sup[r] = -s2[i + 1] * ih2 - q[i + 1] * ih
        else:
            diag[r] = 1.0 / dt + s2[i] * ih2 + q[i] * ih
        if r > 0:
            sub[r - 1] = -s2[i - 1] * ih2


@njit(cache=True)
def hjb_coefficients(q, s2, h, dt, lam, sub, diag, sup):
    n_l = s2.shape[0] - 2
    ih2 = 1.0 / (h * h)
    ih = 1.0 / h
    for r in range(n_l):
        i = r + 1
        if i < n_l:
            diag[r] = 1.0 / dt + 2.0 * s2[i] * ih2 + lam + q[i] * ih
            sup[r] = -s2[i] * ih2
        else:
            diag[r] = 1.0 / dt + s2[i] * ih2 + lam + q[i] * ih
        if r > 0:
            sub[r - 1] = -s2[i] * ih2 - q[i] * ih


@njit(cache=True)
def fill_density_ghost(row, s2):
    n_l = s2.shape[0] - 2
    row[0] = 0.0
    if s2[n_l + 1] > 0.0:
        row[n_l + 1] = s2[n_l] * row[n_l] / s2[n_l + 1]
    else:
        row[n_l + 1] = row[n_l]


@njit(cache=True)
def fpk_march(m0, qbar, s2, h, dt):
    n_t = qbar.shape[0]
    n_l = s2.shape[0] - 2
    M = np.zeros((n_t + 1, n_l + 2))
    M[0, :] = m0
    fill_density_ghost(M[0], s2)
    sub = np.empty(max(n_l - 1, 1))
    diag = np.empty(n_l)
    sup = np.empty(max(n_l - 1, 1))
    rhs = np.empty(n_l)
    sol = np.empty(n_l)
    cp = np.empty(n_l)
    dp = np.empty(n_l)
    for tau in range(n_t):
        fpk_coefficients(qbar[tau], s2, h, dt, sub, diag, sup)
        for r in range(n_l):
            rhs[r] = M[tau, r + 1] / dt
        if not thomas_ws(sub, diag, sup, rhs, sol, cp, dp):
            return M, tau
        for r in range(n_l):
            M[tau + 1, r + 1] = sol[r]
        fill_density_ghost(M[tau + 1], s2)
    return M, -1


@njit(cache=True)
def hjb_march(u_T, qbar, P, s2, h, dt, lam, gamma, kappa):
    """Backward march of the linear HJB under the fixed policy ``qbar``."""
    n_t = qbar.shape[0]
    n_l = s2.shape[0] - 2
    U = np.zeros((n_t + 1, n_l + 2))
    U[n_t, :] = u_T
    U[n_t, 0] = 0.0
    U[n_t, n_l + 1] = U[n_t, n_l]
    sub = np.empty(max(n_l - 1, 1))
    diag = np.empty(n_l)
    sup = np.empty(max(n_l - 1, 1))
    rhs = np.empty(n_l)
    sol = np.empty(n_l)
    cp = np.empty(n_l)
    dp = np.empty(n_l)
    for tau in range(n_t - 1, -1, -1):
        q = qbar[tau]
        hjb_coefficients(q, s2, h, dt, lam, sub, diag, sup)
        for r in range(n_l):
            i = r + 1
            rhs[r] = U[tau + 1, i] / dt + q[i] * (P[tau] - gamma) - kappa * q[i] * q[i]
        if not thomas_ws(sub, diag, sup, rhs, sol, cp, dp):
            return U, tau
        for r in range(n_l):
            U[tau, r + 1] = sol[r]
        U[tau, 0] = 0.0
        U[tau, n_l + 1] = U[tau, n_l]
    return U, -1


@njit(cache=True)
def greedy_policy(U, P, gamma, kappa, q_max, h):
    """Pointwise clamp((P - gamma - D#U) / 2 kappa, 0, q_max) on rows 0..N_T-1."""
    n_t = P.shape[0]
    n_l = U.shape[1] - 2
    Q = np.zeros((n_t, n_l + 2))
    for tau in range(n_t):
        for i in range(1, n_l + 1):
            grad = (U[tau, i] - U[tau, i - 1]) / h
            v = (P[tau] - gamma - grad) / (2.0 * kappa)
            if v < 0.0:
                v = 0.0
            elif v > q_max:
                v = q_max
            Q[tau, i] = v
        Q[tau, 0] = Q[tau, 1]
        Q[tau, n_l + 1] = Q[tau, n_l]
    return Q


@njit(cache=True)
def coupling_sums(M, Q, h, gamma, kappa):
    """Per transition: h sum_i M_{tau+1,i} Q_{tau,i} and h sum_i (gamma Q + kappa Q^2) M_{tau+1,i}."""
    n_t = Q.shape[0]
    n = M.shape[1] - 1
    psi = np.zeros(n_t)
    cost = np.zeros(n_t)
    for tau in range(n_t):
        s = 0.0
        c = 0.0
        for i in range(n):
            w = M[tau + 1, i] * Q[tau, i]
            s += w
            c += (gamma + kappa * Q[tau, i]) * w
        psi[tau] = h * s
        cost[tau] = h * c
    return psi, cost


@njit(cache=True)
def weighted_sq_diff(M, A, B):
    """sum over tau and i <= N_L of M_{tau+1,i} (A - B)^2."""
    n_t = A.shape[0]
    n = A.shape[1] - 1
    s = 0.0
    for tau in range(n_t):
        for i in range(n):
            d = A[tau, i] - B[tau, i]
            s += M[tau + 1, i] * d * d
    return s


@njit(cache=True)
def sq_diff(A, B):
    n_t = A.shape[0]
    n = A.shape[1] - 1
    s = 0.0
    for tau in range(n_t):
        for i in range(n):
            d = A[tau, i] - B[tau, i]
            s += d * d
    return s

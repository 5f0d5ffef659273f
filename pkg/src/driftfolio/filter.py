"""Kalman-Bucy filtering of the hidden drift from observed excess returns.

The conditional covariance gamma(t) solves a deterministic matrix Riccati
equation and is precomputed once per model (it never depends on the observed
returns), then shared across every simulated path.  The observer state is

    ahat(t)  — conditional mean of the hidden drift,
    y_extra  — log of the conditional density Zbar(t) of the physical measure
               relative to the risk-neutral one on the return filtration,

updated in innovation form directly from return increments:

    dahat = [A ahat - b sigma^T Q ahat + alpha delta] dt + (b sigma^T + gamma) Q dR
    dy    = -(1/2) ahat^T Q ahat dt + ahat^T Q dR,

with A = -(alpha - b) - gamma Q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RiccatiStepError
from .model import MarketModel, _interp

# min eigenvalue below which a Riccati step is rejected as under-resolved
_PSD_REJECT = -1e-8


@dataclass(frozen=True)
class FilterState:
    """Observer sufficient statistics at one time point."""

    t: float
    a_hat: np.ndarray      # (n,) conditional mean of the hidden drift
    gamma: np.ndarray      # (n, n) conditional covariance
    y_extra: float = 0.0   # log conditional density, ln Zbar(t)

    @classmethod
    def initial(cls, model: MarketModel) -> "FilterState":
        return cls(t=0.0, a_hat=model.m0.copy(), gamma=model.gamma0.copy(),
                   y_extra=0.0)


@dataclass(frozen=True)
class RiccatiSolution:
    """gamma(t), A(t) = -(alpha - b) - gamma Q, and alpha - b on a time grid."""

    times: np.ndarray             # (K,)
    gamma_path: np.ndarray        # (K, n, n)
    A_path: np.ndarray            # (K, n, n)
    alpha_tilde_path: np.ndarray  # (K, n, n)

    def __post_init__(self):
        for name in ("times", "gamma_path", "A_path", "alpha_tilde_path"):
            getattr(self, name).setflags(write=False)

    def gamma_at(self, t: float) -> np.ndarray:
        return _interp(self.times, self.gamma_path, t)

    def A_at(self, t: float) -> np.ndarray:
        return _interp(self.times, self.A_path, t)


def _riccati_rhs(model: MarketModel, t: float, g: np.ndarray) -> np.ndarray:
    Q = model.Q_at(t)
    bs = model.b_at(t) @ model.sigma_at(t).T
    at = model.alpha_at(t) - model.b_at(t)
    bb = model.beta_at(t) @ model.beta_at(t).T
    core = bs + g
    return -core @ Q @ core.T - at @ g - g @ at.T + bb


def solve_riccati(model: MarketModel, grid: np.ndarray = None) -> RiccatiSolution:
    """Integrate the covariance Riccati equation from gamma(0) = gamma0.

    Classical fourth-order stepping with symmetrization after every step.
    ``grid`` must refine the coefficient partition; the default refines it to
    a step of at most 1e-3.
    """
    if grid is None:
        step = min(model.grid_step(), 1e-3)
        K = int(np.ceil(model.T / step)) + 1
        grid = np.linspace(0.0, model.T, K)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid[0] != 0.0 or abs(grid[-1] - model.T) > 1e-12:
            raise DomainError("riccati grid must span [0, T]")
        if np.diff(grid).max() > model.grid_step() + 1e-12:
            raise DomainError("riccati grid must refine the coefficient grid")

    n = model.n
    K = len(grid)
    gp = np.empty((K, n, n))
    gp[0] = 0.5 * (model.gamma0 + model.gamma0.T)
    for k in range(K - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        g = gp[k]
        k1 = _riccati_rhs(model, t, g)
        k2 = _riccati_rhs(model, t + 0.5 * h, g + 0.5 * h * k1)
        k3 = _riccati_rhs(model, t + 0.5 * h, g + 0.5 * h * k2)
        k4 = _riccati_rhs(model, t + h, g + h * k3)
        g = g + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        g = 0.5 * (g + g.T)
        if np.linalg.eigvalsh(g).min() < _PSD_REJECT:
            raise RiccatiStepError(
                f"gamma lost positive semidefiniteness at t={grid[k+1]:.6g}; "
                "refine the integration grid")
        gp[k + 1] = g

    A = np.empty_like(gp)
    at = np.empty_like(gp)
    for k, t in enumerate(grid):
        at[k] = model.alpha_at(t) - model.b_at(t)
        A[k] = -at[k] - gp[k] @ model.Q_at(t)
    return RiccatiSolution(times=grid, gamma_path=gp, A_path=A,
                           alpha_tilde_path=at)


def filter_step(state: FilterState, dR: np.ndarray, dt: float,
                model: MarketModel, riccati: RiccatiSolution) -> FilterState:
    """One Euler-Maruyama update of (ahat, y_extra) from a return increment.

    Coefficients are evaluated at ``state.t``; the new covariance is read off
    the precomputed Riccati solution at ``state.t + dt``.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    if state.t + dt > model.T + 1e-12:
        raise DomainError("step leaves the horizon")
    dR = np.asarray(dR, dtype=float).reshape(-1)
    if dR.shape != (model.n,):
        raise DomainError(f"return increment must have dimension {model.n}")

    t = state.t
    Q = model.Q_at(t)
    bsT = model.b_at(t) @ model.sigma_at(t).T
    gain = (bsT + state.gamma) @ Q
    A = riccati.A_at(t)
    drift = A @ state.a_hat - bsT @ Q @ state.a_hat \
        + model.alpha_at(t) @ model.delta_at(t)
    a_new = state.a_hat + drift * dt + gain @ dR

    qa = Q @ state.a_hat
    y_new = state.y_extra - 0.5 * float(state.a_hat @ qa) * dt + float(qa @ dR)
    return FilterState(t=t + dt, a_hat=a_new,
                       gamma=riccati.gamma_at(t + dt), y_extra=y_new)


def conditional_density(state: FilterState) -> float:
    """Zbar(t) = exp(y_extra): conditional density on the return filtration."""
    return float(np.exp(state.y_extra))


def filter_path_batch(model: MarketModel, riccati: RiccatiSolution,
                      times: np.ndarray, dR: np.ndarray):
    """Vectorized filter sweep along many paths at once.

    ``dR`` has shape (N, M, n) of return increments over ``times`` (length
    M+1).  Returns ``(a_hat, y_extra)`` with shapes (N, M+1, n) and (N, M+1).
    Identical arithmetic to :func:`filter_step`, applied across the batch.
    """
    N, M, n = dR.shape
    a = np.empty((N, M + 1, n))
    y = np.zeros((N, M + 1))
    a[:, 0, :] = model.m0
    for k in range(M):
        t = times[k]
        dt = times[k + 1] - times[k]
        Q = model.Q_at(t)
        bsT = model.b_at(t) @ model.sigma_at(t).T
        gain = (bsT + riccati.gamma_at(t)) @ Q
        drift_mat = riccati.A_at(t) - bsT @ Q
        ad = model.alpha_at(t) @ model.delta_at(t)
        ak = a[:, k, :]
        a[:, k + 1, :] = ak + (ak @ drift_mat.T + ad) * dt + dR[:, k, :] @ gain.T
        qa = ak @ Q.T
        y[:, k + 1] = y[:, k] - 0.5 * np.einsum("ij,ij->i", ak, qa) * dt \
            + np.einsum("ij,ij->i", qa, dR[:, k, :])
    return a, y

"""Market model with a hidden Gaussian drift.

Prices follow dS_i = S_i (a_i dt + sum_j sigma_ij dw_j) with an unobservable
excess appreciation rate atilde = a - r*1 driven by

    datilde = alpha (delta - atilde) dt + b dRtilde + beta dW,

where Rtilde is the vector of excess returns the investor actually sees.
All coefficients are deterministic functions of time, stored as
piecewise-linear grids on a shared partition of [0, T].  The module also
carries the structural diagnostics needed before anything downstream runs:
the fundamental matrices of the drift ODE, the feedback covariance integrals
K_m, the smallness condition on b, and the exponential-moment check for the
conditional density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ModelValidationError

# Floor for the smallest eigenvalue of sigma sigma^T over the grid; the model
# only needs *some* positive ellipticity constant, this pins the tolerance.
C_SIGMA_MIN = 1e-8

ArrayLike = "float | Sequence | np.ndarray | Callable[[float], np.ndarray]"


def _sample_grid(value, times: np.ndarray, shape: tuple) -> np.ndarray:
    """Sample a constant, array, callable, or (times, values) pair onto a grid."""
    K = len(times)
    if callable(value):
        out = np.empty((K,) + shape)
        for i, t in enumerate(times):
            out[i] = np.broadcast_to(np.asarray(value(t), dtype=float), shape)
        return out
    if isinstance(value, dict) or (isinstance(value, tuple) and len(value) == 2):
        vt, vv = (value["times"], value["values"]) if isinstance(value, dict) else value
        vt = np.asarray(vt, dtype=float)
        vv = np.asarray(vv, dtype=float).reshape((len(vt),) + shape)
        if vt[0] > times[0] + 1e-12 or vt[-1] < times[-1] - 1e-12:
            raise ModelValidationError("coefficient grid does not span [0, T]")
        flat = vv.reshape(len(vt), -1)
        out = np.empty((K, flat.shape[1]))
        for j in range(flat.shape[1]):
            out[:, j] = np.interp(times, vt, flat[:, j])
        return out.reshape((K,) + shape)
    arr = np.asarray(value, dtype=float)
    return np.broadcast_to(arr, (K,) + shape).copy()


def _interp(times: np.ndarray, values: np.ndarray, t: float) -> np.ndarray:
    """Linear interpolation of a stacked grid at a scalar time."""
    if t <= times[0]:
        return values[0]
    if t >= times[-1]:
        return values[-1]
    i = int(np.searchsorted(times, t, side="right")) - 1
    h = times[i + 1] - times[i]
    w = (t - times[i]) / h
    return (1.0 - w) * values[i] + w * values[i + 1]


@dataclass(frozen=True)
class MarketModel:
    """Immutable container for every exogenous quantity of the market.

    Coefficient grids all live on the shared partition ``times``; use
    :meth:`build` to construct one from constants, callables, or
    ``{times, values}`` tables.
    """

    n: int
    T: float
    times: np.ndarray          # (K,) shared coefficient partition of [0, T]
    sigma: np.ndarray          # (K, n, n) volatility
    alpha: np.ndarray          # (K, n, n) mean-reversion rate of the drift
    beta: np.ndarray           # (K, n, n) drift noise loading
    b: np.ndarray              # (K, n, n) return-feedback loading
    delta: np.ndarray          # (K, n) mean-reversion level
    r: np.ndarray              # (K,) deterministic short rate
    m0: np.ndarray             # (n,) mean of the initial drift
    gamma0: np.ndarray         # (n, n) covariance of the initial drift
    S0: np.ndarray             # (n,) initial stock prices
    B0: float = 1.0

    def __post_init__(self):
        for name in ("times", "sigma", "alpha", "beta", "b", "delta", "r",
                     "m0", "gamma0", "S0"):
            getattr(self, name).setflags(write=False)
        self._validate()

    @classmethod
    def build(cls, n: int, T: float, *, sigma, r, alpha, beta, b, delta,
              m0, gamma0, S0=None, grid_step: float = 1e-3) -> "MarketModel":
        if n < 1 or T <= 0:
            raise ModelValidationError("need n >= 1 and T > 0")
        K = max(2, int(np.ceil(T / grid_step)) + 1)
        times = np.linspace(0.0, T, K)
        mat, vec = (n, n), (n,)
        S0 = np.ones(n) if S0 is None else np.asarray(S0, dtype=float).reshape(n)
        return cls(
            n=n, T=float(T), times=times,
            sigma=_sample_grid(sigma, times, mat),
            alpha=_sample_grid(alpha, times, mat),
            beta=_sample_grid(beta, times, mat),
            b=_sample_grid(b, times, mat),
            delta=_sample_grid(delta, times, vec),
            r=_sample_grid(r, times, ()).reshape(K),
            m0=np.asarray(m0, dtype=float).reshape(n),
            gamma0=np.asarray(gamma0, dtype=float).reshape(n, n),
            S0=S0,
        )

    def _validate(self):
        n, K = self.n, len(self.times)
        if self.sigma.shape != (K, n, n):
            raise ModelValidationError("sigma grid has wrong shape")
        if np.any(self.S0 <= 0):
            raise ModelValidationError("initial prices must be positive")
        g = self.gamma0
        if not np.allclose(g, g.T, atol=1e-12):
            raise ModelValidationError("gamma0 must be symmetric")
        if np.linalg.eigvalsh(g).min() < -1e-12:
            raise ModelValidationError("gamma0 must be positive semidefinite")
        if self.c_sigma() < C_SIGMA_MIN:
            raise ModelValidationError(
                f"sigma*sigma^T must stay uniformly elliptic "
                f"(min eigenvalue {self.c_sigma():.3e} < {C_SIGMA_MIN:.0e})")

    # -- time-dependent accessors ------------------------------------------

    def _check_time(self, t: float):
        if t < -1e-12 or t > self.T + 1e-12:
            raise DomainError(f"time {t} outside [0, {self.T}]")

    def sigma_at(self, t: float) -> np.ndarray:
        self._check_time(t)
        return _interp(self.times, self.sigma, t)

    def sst_at(self, t: float) -> np.ndarray:
        s = self.sigma_at(t)
        return s @ s.T

    def Q_at(self, t: float) -> np.ndarray:
        """Inverse instantaneous return covariance (sigma sigma^T)^{-1}."""
        return np.linalg.inv(self.sst_at(t))

    def alpha_at(self, t): self._check_time(t); return _interp(self.times, self.alpha, t)
    def beta_at(self, t): self._check_time(t); return _interp(self.times, self.beta, t)
    def b_at(self, t): self._check_time(t); return _interp(self.times, self.b, t)
    def delta_at(self, t): self._check_time(t); return _interp(self.times, self.delta, t)
    def r_at(self, t): self._check_time(t); return float(_interp(self.times, self.r, t))

    def bond(self, t: float) -> float:
        """Bond price B(t) = B0 exp(int_0^t r)."""
        self._check_time(t)
        ts = self.times
        i = int(np.searchsorted(ts, t, side="right")) - 1
        i = min(max(i, 0), len(ts) - 2)
        full = np.trapz(self.r[: i + 1], ts[: i + 1]) if i > 0 else 0.0
        # partial trapezoid over [ts[i], t]
        rt = _interp(ts, self.r, t)
        full += 0.5 * (self.r[i] + rt) * (t - ts[i])
        return self.B0 * float(np.exp(full))

    def c_sigma(self) -> float:
        """Smallest eigenvalue of sigma sigma^T over the grid."""
        vals = [np.linalg.eigvalsh(s @ s.T).min() for s in self.sigma]
        return float(min(vals))

    def beta_inverse_bound(self) -> float:
        """sup over the grid of |beta(t)^{-1}|; inf if beta is singular."""
        worst = 0.0
        for m in self.beta:
            sv = np.linalg.svd(m, compute_uv=False)
            if sv.min() <= 0.0:
                return float("inf")
            worst = max(worst, 1.0 / sv.min())
        return worst

    def grid_step(self) -> float:
        return float(np.diff(self.times).max())


# ---------------------------------------------------------------------------
# Fundamental matrices and feedback covariance integrals
# ---------------------------------------------------------------------------

def _rk4_matrix(rhs, y0: np.ndarray, t0: float, t1: float, max_step: float) -> np.ndarray:
    """Classical fourth-order one-step integration of dY/dt = rhs(t) @ Y."""
    if t1 == t0:
        return y0.copy()
    m = max(1, int(np.ceil((t1 - t0) / max_step - 1e-12)))
    h = (t1 - t0) / m
    y = y0.copy()
    t = t0
    for _ in range(m):
        k1 = rhs(t) @ y
        k2 = rhs(t + 0.5 * h) @ (y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h) @ (y + 0.5 * h * k2)
        k4 = rhs(t + h) @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return y


def fundamental_matrix(model: MarketModel, mode: int, t: float, s: float) -> np.ndarray:
    """Flow map phi_m(t, s) of d(phi)/dt = [m*b(t) - alpha(t)] phi, phi(s,s)=I."""
    if mode not in (0, 1):
        raise DomainError("mode must be 0 or 1")
    model._check_time(t)
    model._check_time(s)
    if s > t:
        raise DomainError("need s <= t")
    n = model.n
    if t == s:
        return np.eye(n)

    def rhs(u):
        return mode * model.b_at(u) - model.alpha_at(u)

    return _rk4_matrix(rhs, np.eye(n), s, t, model.grid_step())


def _psi_sweep(model: MarketModel, mode: int) -> np.ndarray:
    """phi_m(t_k, 0) at every grid node, one RK4 sweep."""
    ts = model.times
    n = model.n
    out = np.empty((len(ts), n, n))
    out[0] = np.eye(n)

    def rhs(u):
        return mode * model.b_at(u) - model.alpha_at(u)

    step = model.grid_step()
    for k in range(len(ts) - 1):
        out[k + 1] = _rk4_matrix(rhs, out[k], ts[k], ts[k + 1], step)
    return out


def _km_sweep(model: MarketModel, mode: int, psi: np.ndarray = None) -> np.ndarray:
    """K_m(t_k) at every grid node via trapezoid quadrature.

    Uses phi(t,s) = psi(t) psi(s)^{-1}, so the conjugated integrand
    psi(s)^{-1} b ss^T b^T psi(s)^{-T} accumulates once.
    """
    ts = model.times
    n = model.n
    if psi is None:
        psi = _psi_sweep(model, mode)
    integrand = np.empty((len(ts), n, n))
    for k, s in enumerate(ts):
        pinv = np.linalg.inv(psi[k])
        core = model.b_at(s) @ model.sst_at(s) @ model.b_at(s).T
        integrand[k] = pinv @ core @ pinv.T
    out = np.empty_like(integrand)
    out[0] = 0.0
    acc = np.zeros((n, n))
    for k in range(len(ts) - 1):
        acc = acc + 0.5 * (ts[k + 1] - ts[k]) * (integrand[k] + integrand[k + 1])
        km = psi[k + 1] @ acc @ psi[k + 1].T
        out[k + 1] = 0.5 * (km + km.T)
    return out


def covariance_Km(model: MarketModel, mode: int, t: float) -> np.ndarray:
    """Covariance integral K_m(t) = int_0^t phi_m(t,s) b ss^T b^T phi_m(t,s)^T ds."""
    if mode not in (0, 1):
        raise DomainError("mode must be 0 or 1")
    model._check_time(t)
    ts = model.times
    km_grid = _km_sweep(model, mode)
    if t in ts:
        return km_grid[int(np.searchsorted(ts, t))]
    out = _interp(ts, km_grid, t)
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# Diagnostics and feasibility checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelDiagnostics:
    """Derived matrices shared by the feasibility checks.

    ``Khat``/``Ktilde`` are the covariances of the filtered and hidden drifts
    under the risk-neutral measure (returns driftless), obtained from the
    associated Lyapunov ODEs.
    """

    times: np.ndarray
    phi0: np.ndarray     # (K, n, n) fundamental matrices phi_0(t_k, 0)
    phi1: np.ndarray
    K0: np.ndarray       # (K, n, n) feedback covariance integrals
    K1: np.ndarray
    Khat: np.ndarray     # (K, n, n) risk-neutral covariance of the filter mean
    Ktilde: np.ndarray   # (K, n, n) risk-neutral covariance of the hidden drift

    def phi(self, mode: int, k: int, j: int = 0) -> np.ndarray:
        """phi_m(t_k, t_j) reconstructed from the stored (t, 0) family."""
        psi = self.phi0 if mode == 0 else self.phi1
        return psi[k] @ np.linalg.inv(psi[j])

    @staticmethod
    def kappa(mu: float, p: float, T: float) -> float:
        """Exponent constant kappa(p) = [p/(p-1)] * T * (mu^2 p - mu)."""
        if p <= 1.0:
            raise DomainError("need p > 1")
        return p / (p - 1.0) * T * (mu * mu * p - mu)


def compute_diagnostics(model: MarketModel) -> ModelDiagnostics:
    from .filter import solve_riccati  # local import: filter depends on model

    ts = model.times
    n = model.n
    psi0 = _psi_sweep(model, 0)
    psi1 = _psi_sweep(model, 1)
    k0 = _km_sweep(model, 0, psi0)
    k1 = _km_sweep(model, 1, psi1)

    ric = solve_riccati(model)

    # Ktilde: hidden drift under driftless returns, datilde = (alpha delta
    # - alpha atilde) dt + b sigma dw + beta dW  ->  Lyapunov with drift -alpha.
    def rhs_kt(t, K):
        al = model.alpha_at(t)
        bs = model.b_at(t) @ model.sigma_at(t)
        noise = bs @ bs.T + model.beta_at(t) @ model.beta_at(t).T
        return -al @ K - K @ al.T + noise

    # Khat: filter mean under driftless returns, gain (b sigma^T + gamma) Q.
    def rhs_kh(t, K):
        M = ric.A_at(t) - model.b_at(t) @ model.sigma_at(t).T @ model.Q_at(t)
        G = (model.b_at(t) @ model.sigma_at(t).T + ric.gamma_at(t)) @ model.Q_at(t)
        noise = G @ model.sst_at(t) @ G.T
        return M @ K + K @ M.T + noise

    def integrate(rhs, K0_):
        out = np.empty((len(ts), n, n))
        out[0] = K0_
        for k in range(len(ts) - 1):
            h = ts[k + 1] - ts[k]
            y = out[k]
            t = ts[k]
            a1 = rhs(t, y)
            a2 = rhs(t + 0.5 * h, y + 0.5 * h * a1)
            a3 = rhs(t + 0.5 * h, y + 0.5 * h * a2)
            a4 = rhs(t + h, y + h * a3)
            y = y + (h / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
            out[k + 1] = 0.5 * (y + y.T)
        return out

    ktilde = integrate(rhs_kt, model.gamma0.copy())
    khat = integrate(rhs_kh, np.zeros((n, n)))
    return ModelDiagnostics(times=ts, phi0=psi0, phi1=psi1, K0=k0, K1=k1,
                            Khat=khat, Ktilde=ktilde)


@dataclass(frozen=True)
class CheckRow:
    t: float
    mode: str
    min_eig: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    worst_margin: float
    rows: tuple = field(default_factory=tuple)
    note: str = ""

    def failures(self):
        return [r for r in self.rows if not r.passed]


def default_eps(model: MarketModel) -> float:
    """Probe value for the existential epsilon: 1% of the ellipticity floor."""
    return 0.01 * model.c_sigma()


def check_cov1(model: MarketModel, eps: float) -> CheckReport:
    """Feedback-smallness condition: T*K_m(t) + eps*I < sigma sigma^T, m = 0, 1."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    ts = model.times
    n = model.n
    rows = []
    worst = np.inf
    for mode in (0, 1):
        km = _km_sweep(model, mode)
        for k, t in enumerate(ts):
            gap = model.sst_at(t) - model.T * km[k] - eps * np.eye(n)
            margin = float(np.linalg.eigvalsh(gap).min())
            worst = min(worst, margin)
            rows.append(CheckRow(t=float(t), mode=f"m{mode}",
                                 min_eig=margin, margin=margin,
                                 passed=margin > 0.0))
    return CheckReport(name="cov_smallness", passed=all(r.passed for r in rows),
                       worst_margin=float(worst), rows=tuple(rows))


def check_moment_condition(model: MarketModel, mu: float, p: float,
                           cov: str, eps: float,
                           diagnostics: ModelDiagnostics = None) -> CheckReport:
    """Sufficient condition for E_*[Zbar^mu] < oo.

    For mu in [0, 1] the moment is finite unconditionally.  Otherwise checks
    kappa(p) K(t) < sigma sigma^T - eps I with K the risk-neutral covariance
    of either the filtered drift (``cov="ahat"``) or the hidden drift
    (``cov="atilde"``).
    """
    if p <= 1.0:
        raise DomainError("need p > 1")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if 0.0 <= mu <= 1.0:
        return CheckReport(name=f"moment(mu={mu})", passed=True,
                           worst_margin=np.inf,
                           note="mu in [0,1]: finite unconditionally")
    if cov not in ("ahat", "atilde"):
        raise DomainError("cov must be 'ahat' or 'atilde'")
    if diagnostics is None:
        diagnostics = compute_diagnostics(model)
    kpath = diagnostics.Khat if cov == "ahat" else diagnostics.Ktilde
    kap = ModelDiagnostics.kappa(mu, p, model.T)
    n = model.n
    rows = []
    worst = np.inf
    for k, t in enumerate(diagnostics.times):
        gap = model.sst_at(t) - eps * np.eye(n) - kap * kpath[k]
        margin = float(np.linalg.eigvalsh(gap).min())
        worst = min(worst, margin)
        rows.append(CheckRow(t=float(t), mode=cov, min_eig=margin,
                             margin=margin, passed=margin > 0.0))
    return CheckReport(name=f"moment(mu={mu},p={p},kappa={kap:.6g})",
                       passed=all(r.passed for r in rows),
                       worst_margin=float(worst), rows=tuple(rows))

"""Path simulation under the physical and risk-neutral measures.

Under the physical measure P the pair (hidden drift, excess return) is
co-simulated by Euler-Maruyama; prices use exact exponentiation of the
log-price increments so positivity is structural.  Under the risk-neutral
measure P* the excess returns are driftless, dR* = sigma dw, and expectations
of return functionals reduce to plain averages over driftless paths — that
identity is the entire P*-expectation engine.

All randomness flows through counter-based streams (see :mod:`.rng`), so a
path's numbers depend only on (seed, label, path index) and results are
independent of batch partitioning.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional

import numpy as np

from . import rng
from .errors import DomainError
from .filter import RiccatiSolution, filter_path_batch, solve_riccati
from .model import MarketModel

P_MEASURE = "P"
PSTAR_MEASURE = "P*"

_LABELS = {P_MEASURE: "paths-P", PSTAR_MEASURE: "paths-P*"}
_DRIFT_LABEL = "pstar-drift"


def _steps(model: MarketModel, dt: float) -> int:
    M = int(round(model.T / dt))
    if M < 1 or abs(M * dt - model.T) > 1e-9 * max(1.0, model.T):
        raise DomainError(f"dt={dt} does not divide the horizon T={model.T}")
    return M


def _matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.T


@dataclass
class PathBatch:
    """Struct-of-arrays bundle for a contiguous block of simulated paths.

    Shapes: increments (N, M, n), levels (N, M+1, n); ``gamma`` is shared
    across paths because the filter covariance is observation-free.
    Under the risk-neutral tag, ``a_tilde``/``dW``/``Z`` stay ``None`` unless
    the drift was explicitly requested for density work.
    """

    model: MarketModel
    riccati: RiccatiSolution
    times: np.ndarray
    dt: float
    measure: str
    seed: int
    path_offset: int
    dw: np.ndarray
    R_tilde: np.ndarray
    S: np.ndarray
    a_hat: np.ndarray
    gamma: np.ndarray
    y_extra: np.ndarray
    Zbar: np.ndarray
    dW: Optional[np.ndarray] = None
    a_tilde: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None

    def __len__(self):
        return self.R_tilde.shape[0]

    @property
    def n_steps(self) -> int:
        return self.R_tilde.shape[1] - 1

    def path(self, i: int) -> "PathBundle":
        return PathBundle(self, i)


class PathBundle:
    """Single-path view into a :class:`PathBatch` (zero-copy slices)."""

    def __init__(self, batch: PathBatch, i: int):
        self._b = batch
        self._i = i

    @property
    def times(self): return self._b.times
    @property
    def measure(self): return self._b.measure
    @property
    def seed(self): return self._b.seed
    @property
    def index(self): return self._b.path_offset + self._i
    @property
    def dw(self): return self._b.dw[self._i]
    @property
    def dW(self):
        return None if self._b.dW is None else self._b.dW[self._i]
    @property
    def a_tilde(self):
        return None if self._b.a_tilde is None else self._b.a_tilde[self._i]
    @property
    def R_tilde(self): return self._b.R_tilde[self._i]
    @property
    def S(self): return self._b.S[self._i]
    @property
    def a_hat(self): return self._b.a_hat[self._i]
    @property
    def gamma(self): return self._b.gamma
    @property
    def y_extra(self): return self._b.y_extra[self._i]
    @property
    def Z(self):
        return None if self._b.Z is None else float(self._b.Z[self._i])
    @property
    def Zbar(self): return float(self._b.Zbar[self._i])


def _coeff_tables(model: MarketModel, times: np.ndarray):
    """Coefficients interpolated once per step time (shared across a batch)."""
    M = len(times) - 1
    n = model.n
    tab = {
        "sigma": np.empty((M, n, n)), "Q": np.empty((M, n, n)),
        "alpha": np.empty((M, n, n)), "beta": np.empty((M, n, n)),
        "b": np.empty((M, n, n)), "delta": np.empty((M, n)),
        "r": np.empty(M), "sst_diag": np.empty((M, n)),
    }
    for k in range(M):
        t = times[k]
        s = model.sigma_at(t)
        tab["sigma"][k] = s
        tab["Q"][k] = np.linalg.inv(s @ s.T)
        tab["alpha"][k] = model.alpha_at(t)
        tab["beta"][k] = model.beta_at(t)
        tab["b"][k] = model.b_at(t)
        tab["delta"][k] = model.delta_at(t)
        tab["r"][k] = model.r_at(t)
        tab["sst_diag"][k] = np.diag(s @ s.T)
    return tab


def simulate_paths(model: MarketModel, count: int, dt: float, measure: str,
                   seed: int, *, path_offset: int = 0,
                   with_drift: bool = False,
                   riccati: RiccatiSolution = None) -> PathBatch:
    """Simulate ``count`` paths with indices starting at ``path_offset``.

    Physical measure: hidden drift and returns co-evolve by Euler-Maruyama
    with the initial drift drawn from N(m0, gamma0).  Risk-neutral measure:
    returns are sigma(t) dw with no hidden drift; pass ``with_drift=True`` to
    also evolve the auxiliary drift needed for the change-of-measure density.
    The filter runs along every path either way.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    if measure not in (P_MEASURE, PSTAR_MEASURE):
        raise DomainError(f"unknown measure tag {measure!r}")
    M = _steps(model, dt)
    n = model.n
    N = count
    times = np.linspace(0.0, model.T, M + 1)
    if riccati is None:
        riccati = solve_riccati(model)
    tab = _coeff_tables(model, times)

    need_drift = measure == P_MEASURE or with_drift
    if measure == P_MEASURE:
        # layout per path: [a0 seed (n)] + per step [dw (n), dW (n)]
        z = rng.normals(seed, _LABELS[measure], path_offset, N, n + 2 * M * n)
        z0 = z[:, :n]
        zw = z[:, n:].reshape(N, M, 2 * n)
        dw = zw[:, :, :n] * np.sqrt(dt)
        dWn = zw[:, :, n:] * np.sqrt(dt)
        a0 = model.m0 + z0 @ _matrix_sqrt_psd(model.gamma0).T
    else:
        z = rng.normals(seed, _LABELS[measure], path_offset, N, M * n)
        dw = z.reshape(N, M, n) * np.sqrt(dt)
        dWn = None
        a0 = None
        if with_drift:
            zd = rng.normals(seed, _DRIFT_LABEL, path_offset, N, n + M * n)
            a0 = model.m0 + zd[:, :n] @ _matrix_sqrt_psd(model.gamma0).T
            dWn = zd[:, n:].reshape(N, M, n) * np.sqrt(dt)

    R = np.zeros((N, M + 1, n))
    a_t = np.empty((N, M + 1, n)) if need_drift else None
    if need_drift:
        a_t[:, 0, :] = a0
    logZ = np.zeros(N) if need_drift else None

    for k in range(M):
        sig = tab["sigma"][k]
        noise_w = dw[:, k, :] @ sig.T          # sigma dw
        if measure == P_MEASURE:
            ak = a_t[:, k, :]
            dR = ak * dt + noise_w
            drift = (tab["alpha"][k] @ tab["delta"][k]
                     + ak @ (tab["b"][k] - tab["alpha"][k]).T)
            a_t[:, k + 1, :] = ak + drift * dt \
                + dw[:, k, :] @ (tab["b"][k] @ sig).T + dWn[:, k, :] @ tab["beta"][k].T
        else:
            dR = noise_w
            if with_drift:
                ak = a_t[:, k, :]
                drift = (tab["alpha"][k] @ tab["delta"][k]
                         - ak @ tab["alpha"][k].T)
                a_t[:, k + 1, :] = ak + drift * dt \
                    + dR @ tab["b"][k].T + dWn[:, k, :] @ tab["beta"][k].T
        R[:, k + 1, :] = R[:, k, :] + dR
        if need_drift:
            ak = a_t[:, k, :]
            qa = ak @ tab["Q"][k].T
            logZ += np.einsum("ij,ij->i", qa, dR) \
                - 0.5 * np.einsum("ij,ij->i", qa, ak) * dt

    # prices by exact exponentiation of the log-price increments
    S = np.empty((N, M + 1, n))
    S[:, 0, :] = model.S0
    if measure == P_MEASURE:
        logS = np.cumsum(
            (tab["r"][None, :, None] + a_t[:, :-1, :] - 0.5 * tab["sst_diag"][None, :, :]) * dt
            + np.einsum("kij,nkj->nki", tab["sigma"], dw), axis=1)
        S[:, 1:, :] = model.S0 * np.exp(logS)
    else:
        # driftless excess returns: log S = log S0 + cum[(r - diag/2) dt + sigma dw]
        logS = np.cumsum(
            (tab["r"][None, :, None] - 0.5 * tab["sst_diag"][None, :, :]) * dt
            + np.einsum("kij,nkj->nki", tab["sigma"], dw), axis=1)
        S[:, 1:, :] = model.S0 * np.exp(logS)

    dR_all = np.diff(R, axis=1)
    a_hat, y = filter_path_batch(model, riccati, times, dR_all)

    return PathBatch(
        model=model, riccati=riccati, times=times, dt=dt, measure=measure,
        seed=seed, path_offset=path_offset, dw=dw, dW=dWn,
        a_tilde=a_t if measure == P_MEASURE or with_drift else None,
        R_tilde=R, S=S, a_hat=a_hat, gamma=_gamma_on(riccati, times),
        y_extra=y, Zbar=np.exp(y[:, -1]),
        Z=np.exp(logZ) if need_drift else None)


def _gamma_on(riccati: RiccatiSolution, times: np.ndarray) -> np.ndarray:
    return np.stack([riccati.gamma_at(t) for t in times])


def iterate_path_batches(model: MarketModel, count: int, dt: float,
                         measure: str, seed: int, *, batch_size: int = 4096,
                         with_drift: bool = False,
                         riccati: RiccatiSolution = None) -> Iterator[PathBatch]:
    """Yield the global path set [0, count) in batches (memory-bounded)."""
    if riccati is None:
        riccati = solve_riccati(model)
    done = 0
    while done < count:
        take = min(batch_size, count - done)
        yield simulate_paths(model, take, dt, measure, seed,
                             path_offset=done, with_drift=with_drift,
                             riccati=riccati)
        done += take


def density_Z(path, model: MarketModel = None) -> "float | np.ndarray":
    """Change-of-measure density exp(int a^T Q (dR - a dt / 2)) along a path.

    Works on a :class:`PathBundle` (returns a float) or a :class:`PathBatch`
    (returns the vector of densities), using the path's own drift — the
    hidden drift under P, the auxiliary starred drift under P*.
    """
    batch = path._b if isinstance(path, PathBundle) else path
    if model is None:
        model = batch.model
    if batch.a_tilde is None:
        raise DomainError("path carries no drift trajectory; simulate with "
                          "with_drift=True under the risk-neutral measure")
    a = batch.a_tilde
    dR = np.diff(batch.R_tilde, axis=1)
    times = batch.times
    N, M, n = dR.shape
    logZ = np.zeros(N)
    for k in range(M):
        dt = times[k + 1] - times[k]
        Q = model.Q_at(times[k])
        ak = a[:, k, :]
        qa = ak @ Q.T
        logZ += np.einsum("ij,ij->i", qa, dR[:, k, :]) \
            - 0.5 * np.einsum("ij,ij->i", qa, ak) * dt
    out = np.exp(logZ)
    if isinstance(path, PathBundle):
        return float(out[path._i])
    return out


@dataclass(frozen=True)
class EstimateResult:
    """Monte Carlo estimate with its standard error and provenance."""

    estimate: float
    stderr: float
    n_paths: int
    dt: float
    seed: int
    bad_paths: int = 0

    @property
    def ok(self) -> bool:
        return self.bad_paths == 0

    def to_record(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr,
                "N": self.n_paths, "dt": self.dt, "seed": self.seed,
                "bad_paths": self.bad_paths}


def expectation_under_pstar(functional: Callable, model: MarketModel,
                            N: int, dt: float, seed: int, *,
                            batch_size: int = 4096,
                            with_drift: bool = False,
                            vectorized: bool = True,
                            riccati: RiccatiSolution = None) -> EstimateResult:
    """Risk-neutral expectation of an observable path functional.

    Driftless returns make E_* phi(R, r, filter, Zbar) a plain average over
    risk-neutral paths, so the estimator is the sample mean with its standard
    error.  ``functional`` receives a :class:`PathBatch` and returns one value
    per path when ``vectorized`` (default); otherwise it is called per
    :class:`PathBundle` and must return a scalar.  Non-finite values are
    excluded and counted — any such path marks the estimate as failed.
    """
    total = 0.0
    total2 = 0.0
    good = 0
    bad = 0
    for batch in iterate_path_batches(model, N, dt, PSTAR_MEASURE, seed,
                                      batch_size=batch_size,
                                      with_drift=with_drift, riccati=riccati):
        if vectorized:
            vals = np.asarray(functional(batch), dtype=float).reshape(len(batch))
        else:
            vals = np.array([functional(batch.path(i)) for i in range(len(batch))],
                            dtype=float)
        finite = np.isfinite(vals)
        bad += int((~finite).sum())
        v = vals[finite]
        good += v.size
        total += v.sum()
        total2 += (v * v).sum()
    if good == 0:
        return EstimateResult(estimate=float("nan"), stderr=float("nan"),
                              n_paths=N, dt=dt, seed=seed, bad_paths=bad)
    mean = total / good
    var = max(total2 / good - mean * mean, 0.0)
    stderr = float(np.sqrt(var / good))
    return EstimateResult(estimate=float(mean), stderr=stderr, n_paths=N,
                          dt=dt, seed=seed, bad_paths=bad)

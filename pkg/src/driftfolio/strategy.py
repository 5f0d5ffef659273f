"""Trading strategies from the value-function gradient, and benchmarks.

The optimal stock holding is read off the value function along the filtered
state: pi(t)^T = B(t) (dV/dx)(y(t), t) g(y(t), t).  Normalized wealth then
evolves by the self-financing identity d(X/B) = B^{-1} pi^T dR, which is also
the exact discrete update used here, so the self-financing property holds to
rounding by construction.  Replication quality is judged against the
calibrated claim F(Zbar(T), lambda_hat).

The certainty-equivalence baseline plugs the filtered drift into the
full-information allocation wealth * Q ahat / (1 - d); it shares the same
filter so comparisons isolate the strategy, not the estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .claim import UtilitySpec, claim_map
from .errors import DomainError
from .filter import FilterState, RiccatiSolution, solve_riccati
from .model import MarketModel
from .simulate import PathBatch, iterate_path_batches


def bond_path(model: MarketModel, times: np.ndarray) -> np.ndarray:
    """B(t) on a grid: exact exponential of the trapezoid rate integral."""
    r = np.array([model.r_at(t) for t in times])
    out = np.empty(len(times))
    out[0] = model.B0
    integ = np.concatenate([[0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(times))])
    return model.B0 * np.exp(integ)


def optimal_strategy(solution, state: FilterState, model: MarketModel,
                     t: Optional[float] = None) -> np.ndarray:
    """Stock holdings pi(t) from the value-function gradient at one state."""
    if t is None:
        t = state.t
    if t >= model.T:
        raise DomainError("strategy is defined for t < T")
    n = model.n
    point = np.concatenate([state.a_hat, [state.y_extra]])
    grad = np.asarray(solution.gradient_at(point, t)).reshape(n + 1)
    Q = model.Q_at(t)
    G = (model.b_at(t) @ model.sigma_at(t).T + state.gamma) @ Q
    # pi^T = B [grad_head^T G + grad_tail * ahat^T Q]
    pi = grad[:n] @ G + grad[n] * (state.a_hat @ Q.T)
    return model.bond(t) * pi


def baseline_certainty_equivalence(model: MarketModel, utility: UtilitySpec,
                                   state: FilterState, wealth: float) -> np.ndarray:
    """Plug-in allocation wealth * Q ahat / (1 - d); d = 0 for log utility."""
    if utility.variant == "log":
        d = 0.0
    elif utility.variant == "power":
        d = utility.d
    else:
        raise DomainError("certainty-equivalence baseline needs log or power "
                          "utility")
    frac = 1.0 / (1.0 - d)
    return wealth * frac * (model.Q_at(state.t) @ state.a_hat)


# ---------------------------------------------------------------------------
# Batched policies for path-parallel evaluation
# ---------------------------------------------------------------------------

def optimal_policy(solution, model: MarketModel,
                   riccati: RiccatiSolution) -> Callable:
    """Batched closure of the gradient strategy (one risky asset)."""
    def policy(t, a_hat, y_extra, wealth):
        N = a_hat.shape[0]
        pts = np.stack([a_hat[:, 0], y_extra], axis=-1)
        grad = solution.gradient_at(pts, t)            # (N, 2)
        Q = model.Q_at(t)[0, 0]
        G = ((model.b_at(t) @ model.sigma_at(t).T)[0, 0]
             + riccati.gamma_at(t)[0, 0]) * Q
        pi = grad[:, 0] * G + grad[:, 1] * a_hat[:, 0] * Q
        return (model.bond(t) * pi)[:, None]
    policy.batched = True
    return policy


def ce_policy(model: MarketModel, utility: UtilitySpec) -> Callable:
    if utility.variant == "log":
        d = 0.0
    elif utility.variant == "power":
        d = utility.d
    else:
        raise DomainError("certainty-equivalence baseline needs log or power "
                          "utility")
    frac = 1.0 / (1.0 - d)

    def policy(t, a_hat, y_extra, wealth):
        return (wealth * frac)[:, None] * (a_hat @ model.Q_at(t).T)
    policy.batched = True
    return policy


def zero_policy() -> Callable:
    def policy(t, a_hat, y_extra, wealth):
        return np.zeros((a_hat.shape[0], a_hat.shape[1]))
    policy.batched = True
    return policy


def _as_batched(policy, model: MarketModel, riccati: RiccatiSolution):
    if getattr(policy, "batched", False):
        return policy

    def wrapped(t, a_hat, y_extra, wealth):
        out = np.empty_like(a_hat)
        for i in range(a_hat.shape[0]):
            st = FilterState(t=t, a_hat=a_hat[i], gamma=riccati.gamma_at(t),
                             y_extra=float(y_extra[i]))
            out[i] = policy(st, float(wealth[i]), t)
        return out
    return wrapped


# ---------------------------------------------------------------------------
# Replication
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WealthPath:
    """One self-financing wealth trajectory and its replication error."""

    times: np.ndarray
    X: np.ndarray               # (M+1,) wealth
    X_tilde: np.ndarray         # (M+1,) normalized wealth
    pi: np.ndarray              # (M, n) stock holdings
    pi0: np.ndarray             # (M,) bond holding X - sum(pi)
    terminal_claim: float
    replication_error: float
    q_pi: float                 # realized floor of X_tilde - X0


@dataclass
class ReplicationResult:
    times: np.ndarray
    bond: np.ndarray
    X_tilde: np.ndarray         # (N, M+1)
    pi: np.ndarray              # (N, M, n)
    targets: np.ndarray         # (N,)
    X0: float
    cap_events: int
    clamp_events: int

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.X_tilde[:, -1] - self.targets)

    @property
    def mean_abs_error(self) -> float:
        return float(self.errors.mean())

    def path(self, i: int) -> WealthPath:
        X = self.X_tilde[i] * self.bond
        pi0 = X[:-1] - self.pi[i].sum(axis=1)
        return WealthPath(
            times=self.times, X=X, X_tilde=self.X_tilde[i], pi=self.pi[i],
            pi0=pi0, terminal_claim=float(self.targets[i]),
            replication_error=float(abs(self.X_tilde[i, -1] - self.targets[i])),
            q_pi=float((self.X_tilde[i] - self.X0).min()))

    def summary(self) -> dict:
        return {"paths": int(self.X_tilde.shape[0]),
                "mean_abs_error": self.mean_abs_error,
                "mean_rel_error": self.mean_abs_error / abs(self.X0),
                "max_abs_error": float(self.errors.max()),
                "cap_events": self.cap_events,
                "clamp_events": self.clamp_events,
                "q_pi_min": float((self.X_tilde - self.X0).min())}


def run_replication(model: MarketModel, utility: UtilitySpec,
                    lambda_hat: float, solution, paths: PathBatch, *,
                    pi_cap: Optional[float] = None) -> ReplicationResult:
    """Trade the gradient strategy along simulated physical-measure paths.

    Wealth follows the exact discrete self-financing identity; the terminal
    value is compared with the claim F(Zbar(T), lambda_hat) computed from the
    path's own filter.  Positions are capped at ``pi_cap`` (default 1e3 X0,
    events counted) because discontinuous claims make the continuous-time
    optimum unbounded near the kink.
    """
    if paths.measure != "P":
        raise DomainError("replication runs on physical-measure paths")
    if pi_cap is None:
        pi_cap = 1e3 * abs(utility.X0)
    times = paths.times
    N, Mp1, n = paths.R_tilde.shape
    M = Mp1 - 1
    B = bond_path(model, times)
    dR = np.diff(paths.R_tilde, axis=1)
    riccati = paths.riccati

    clamp_before = getattr(solution, "clamp_events", 0)
    Xt = np.full(N, float(utility.X0))
    X_tilde = np.empty((N, M + 1)); X_tilde[:, 0] = Xt
    pi_all = np.empty((N, M, n))
    pol = optimal_policy(solution, model, riccati)
    cap_events = 0
    for k in range(M):
        t = times[k]
        pi = pol(t, paths.a_hat[:, k, :], paths.y_extra[:, k], Xt * B[k])
        over = np.abs(pi) > pi_cap
        if over.any():
            cap_events += int(over.sum())
            pi = np.clip(pi, -pi_cap, pi_cap)
        pi_all[:, k, :] = pi
        Xt = Xt + (pi * dR[:, k, :]).sum(axis=1) / B[k]
        X_tilde[:, k + 1] = Xt

    targets = claim_map(utility, paths.Zbar, lambda_hat)
    return ReplicationResult(
        times=times, bond=B, X_tilde=X_tilde, pi=pi_all, targets=targets,
        X0=float(utility.X0), cap_events=cap_events,
        clamp_events=getattr(solution, "clamp_events", 0) - clamp_before)


# ---------------------------------------------------------------------------
# Expected utility of a policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UtilityEstimate:
    estimate: float
    stderr: float
    n_paths: int
    breach_count: int
    flagged: bool

    def to_record(self) -> dict:
        return {"E_utility": self.estimate, "stderr": self.stderr,
                "N": self.n_paths, "breach_count": self.breach_count,
                "flagged": self.flagged}


def evaluate_expected_utility(policy, model: MarketModel,
                              utility: UtilitySpec, mc, *,
                              riccati: RiccatiSolution = None,
                              pi_cap: Optional[float] = None,
                              batch_size: int = 4096) -> UtilityEstimate:
    """Forward-simulate wealth under the policy and average U(X_tilde(T)).

    Paths whose terminal normalized wealth leaves the utility domain score
    -inf and are excluded from the average but counted; a breach rate above
    1% flags the whole evaluation as invalid.
    """
    if riccati is None:
        riccati = solve_riccati(model)
    pol = _as_batched(policy, model, riccati)
    if pi_cap is None:
        pi_cap = 1e6 * max(abs(utility.X0), 1.0)
    tot = tot2 = 0.0
    good = breach = 0
    for batch in iterate_path_batches(model, mc.N, mc.dt, "P", mc.seed,
                                      batch_size=batch_size, riccati=riccati):
        times = batch.times
        B = bond_path(model, times)
        dR = np.diff(batch.R_tilde, axis=1)
        Xt = np.full(len(batch), float(utility.X0))
        for k in range(batch.n_steps):
            pi = pol(times[k], batch.a_hat[:, k, :], batch.y_extra[:, k],
                     Xt * B[k])
            pi = np.clip(pi, -pi_cap, pi_cap)
            Xt = Xt + (pi * dR[:, k, :]).sum(axis=1) / B[k]
        ok = utility.in_domain(Xt)
        u = utility.U(Xt[ok])
        finite = np.isfinite(u)
        breach += int((~ok).sum() + (~finite).sum())
        u = u[finite]
        good += u.size
        tot += u.sum(); tot2 += (u * u).sum()
    if good == 0:
        return UtilityEstimate(float("-inf"), float("nan"), mc.N, breach, True)
    mean = tot / good
    var = max(tot2 / good - mean * mean, 0.0)
    return UtilityEstimate(
        estimate=float(mean), stderr=float(np.sqrt(var / good)),
        n_paths=mc.N, breach_count=breach,
        flagged=breach > 0.01 * mc.N)


def claim_utility_under_p(model: MarketModel, utility: UtilitySpec,
                          lambda_hat: float, mc, *,
                          riccati: RiccatiSolution = None,
                          batch_size: int = 4096) -> UtilityEstimate:
    """E U(F(Zbar(T), lambda_hat)) under the physical measure.

    This is the attainable upper bound for the expected utility of any
    admissible strategy; estimated on physical-measure paths through the
    same filter the strategies use.
    """
    tot = tot2 = 0.0
    good = bad = 0
    for batch in iterate_path_batches(model, mc.N, mc.dt, "P", mc.seed,
                                      batch_size=batch_size, riccati=riccati):
        xi = claim_map(utility, batch.Zbar, lambda_hat)
        u = utility.U(xi)
        finite = np.isfinite(u)
        bad += int((~finite).sum())
        u = u[finite]
        good += u.size
        tot += u.sum(); tot2 += (u * u).sum()
    mean = tot / good
    var = max(tot2 / good - mean * mean, 0.0)
    return UtilityEstimate(
        estimate=float(mean), stderr=float(np.sqrt(var / good)),
        n_paths=mc.N, breach_count=bad, flagged=bad > 0.01 * mc.N)

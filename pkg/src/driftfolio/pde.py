"""Value function of the observer state: linear parabolic solve.

The filtered state y = (ahat, y_extra) is a Markov diffusion driven by the
excess returns,

    dy = f(y, t) dt + g(y, t) dR,      f = ([A - b s^T Q] xhat + alpha delta,
                                            -xhat^T Q xhat / 2),
                                       g = ((b s^T + gamma) Q,  xhat^T Q),

and the normalized wealth that replicates a terminal claim Phi(y(T)) is
V(y(t), t) where V solves the backward equation

    V_t + (dV/dx) f + (1/2) tr{ (d2V/dx2) g ss^T g^T } = 0,   V(., T) = Phi.

The diffusion matrix g ss^T g^T has rank one (a single return shock drives
both coordinates), so the finite-difference scheme must not assume
ellipticity.  The solver marches backward with an IMEX split: both axis
operators (second derivative plus hybrid central/upwind convection) are
implicit banded solves, the mixed derivative is explicit on a sign-adapted
seven-point stencil.  For positive-semidefinite diffusion this combination
is unconditionally von Neumann stable; the convection discretization stays
central wherever the cell Peclet number allows (keeping the stencil monotone
and second-order) and falls back to upwinding elsewhere.

A Feynman-Kac Monte Carlo estimator of V(x, t) = E_* Phi(y^{x,t}(T)) serves
as the any-dimension solver and as the cross-validation oracle for the grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded
from scipy.ndimage import gaussian_filter

from . import rng
from .claim import UtilitySpec, claim_map
from .errors import CFLError, DomainError, SolverError, UnsupportedDimensionError
from .filter import RiccatiSolution
from .model import MarketModel

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Coefficients of the state equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PDECoefficients:
    """Closures for drift, diffusion loading, and diffusion matrix."""

    model: MarketModel
    riccati: RiccatiSolution

    def _parts(self, t: float):
        m = self.model
        m._check_time(t)
        Q = m.Q_at(t)
        bsT = m.b_at(t) @ m.sigma_at(t).T
        G = (bsT + self.riccati.gamma_at(t)) @ Q
        drift_mat = self.riccati.A_at(t) - bsT @ Q
        ad = m.alpha_at(t) @ m.delta_at(t)
        return Q, G, drift_mat, ad

    def f(self, x: np.ndarray, t: float) -> np.ndarray:
        """Drift of the observer state; affine head, quadratic tail."""
        x = np.asarray(x, dtype=float)
        n = self.model.n
        Q, _, drift_mat, ad = self._parts(t)
        xhat = x[..., :n]
        head = xhat @ drift_mat.T + ad
        tail = -0.5 * np.einsum("...i,...i->...", xhat @ Q.T, xhat)
        return np.concatenate([head, tail[..., None]], axis=-1)

    def g(self, x: np.ndarray, t: float) -> np.ndarray:
        """Diffusion loading: x-independent gain block over xhat^T Q row."""
        x = np.asarray(x, dtype=float)
        n = self.model.n
        Q, G, _, _ = self._parts(t)
        xhat = x[..., :n]
        top = np.broadcast_to(G, xhat.shape[:-1] + (n, n))
        bottom = (xhat @ Q.T)[..., None, :]
        return np.concatenate([top, bottom], axis=-2)

    def diffusion(self, x: np.ndarray, t: float) -> np.ndarray:
        gg = self.g(x, t)
        sst = self.model.sst_at(t)
        return np.einsum("...ij,jk,...lk->...il", gg, sst, gg)


def coefficients(model: MarketModel, riccati: RiccatiSolution) -> PDECoefficients:
    return PDECoefficients(model=model, riccati=riccati)


def claim_terminal(utility: UtilitySpec, lam: float) -> Callable:
    """Terminal condition Phi(x) = F(exp(x_last), lambda) for a claim."""
    def phi(x):
        x = np.asarray(x, dtype=float)
        return claim_map(utility, np.exp(x[..., -1]), lam)
    phi.discontinuous = utility.variant == "goal"
    return phi


# ---------------------------------------------------------------------------
# Feynman-Kac Monte Carlo estimator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VProbe:
    """Monte Carlo value and common-random-number gradient at one point."""

    x: np.ndarray
    t: float
    value: float
    stderr: float
    gradient: np.ndarray
    gradient_stderr: np.ndarray
    n_paths: int
    bad_paths: int = 0


def _evolve_y(model: MarketModel, riccati: RiccatiSolution, y0: np.ndarray,
              t0: float, dt_target: float, seed: int, label: str,
              first_path: int, n_paths: int):
    """Euler evolution of stacked observer states to the horizon under P*.

    ``y0`` has shape (B, n+1); every start shares one increment stream of
    ``n_paths`` driftless return paths (common random numbers across B).
    Returns terminal states with shape (B, n_paths, n+1).
    """
    n = model.n
    span = model.T - t0
    B = y0.shape[0]
    if span <= 1e-14:
        return np.broadcast_to(y0[:, None, :], (B, n_paths, n + 1)).copy()
    M = max(1, int(np.ceil(span / dt_target - 1e-12)))
    dt = span / M
    z = rng.normals(seed, label, first_path, n_paths, M * n)
    dw = z.reshape(n_paths, M, n) * np.sqrt(dt)
    y = np.broadcast_to(y0[:, None, :], (B, n_paths, n + 1)).copy()
    for k in range(M):
        t = t0 + k * dt
        Q = model.Q_at(t)
        sig = model.sigma_at(t)
        bsT = model.b_at(t) @ sig.T
        G = (bsT + riccati.gamma_at(t)) @ Q
        drift_mat = riccati.A_at(t) - bsT @ Q
        ad = model.alpha_at(t) @ model.delta_at(t)
        dR = dw[:, k, :] @ sig.T                     # (N, n) shared across B
        xhat = y[..., :n]
        qx = xhat @ Q.T                              # (B, N, n)
        y[..., :n] += (xhat @ drift_mat.T + ad) * dt + dR[None, :, :] @ G.T
        y[..., n] += -0.5 * np.einsum("bni,bni->bn", qx, xhat) * dt \
            + np.einsum("bni,ni->bn", qx, dR)
    return y


def estimate_V_mc(model: MarketModel, riccati: RiccatiSolution,
                  terminal: Callable, probe: tuple, mc, *,
                  bump: Optional[np.ndarray] = None,
                  batch_size: int = 16384) -> VProbe:
    """V(x, t) = E_* Phi(y^{x,t}(T)) with finite-difference gradients.

    The 2(n+1) bumped starts ride the same return increments as the center
    (common random numbers), so gradient noise reflects only the claim's
    curvature.  Default bump per coordinate: 1e-3 times the coordinate's
    terminal dispersion (with a floor at 1e-3).
    """
    x, t0 = np.asarray(probe[0], dtype=float).reshape(-1), float(probe[1])
    model._check_time(t0)
    n = model.n
    if x.shape != (n + 1,):
        raise DomainError(f"probe state must have dimension {n + 1}")
    if bump is None:
        scale = _pilot_scale(model, riccati, mc.seed)
        bump = 1e-3 * np.maximum(scale, 1.0)
    bump = np.asarray(bump, dtype=float).reshape(n + 1)

    starts = [x]
    for i in range(n + 1):
        e = np.zeros(n + 1); e[i] = bump[i]
        starts += [x + e, x - e]
    y0 = np.stack(starts)                            # (2(n+1)+1, n+1)

    sums = np.zeros(y0.shape[0]); sums2 = np.zeros(y0.shape[0])
    good = 0; bad = 0
    dsum = np.zeros(n + 1); dsum2 = np.zeros(n + 1)
    done = 0
    while done < mc.N:
        take = min(batch_size, mc.N - done)
        yT = _evolve_y(model, riccati, y0, t0, mc.dt, mc.seed, "fkmc",
                       done, take)
        vals = np.asarray(terminal(yT), dtype=float)  # (B, N)
        finite = np.all(np.isfinite(vals), axis=0)
        bad += int((~finite).sum())
        v = vals[:, finite]
        good += v.shape[1]
        sums += v.sum(axis=1)
        sums2 += (v * v).sum(axis=1)
        for i in range(n + 1):
            diff = (v[1 + 2 * i] - v[2 + 2 * i]) / (2.0 * bump[i])
            dsum[i] += diff.sum()
            dsum2[i] += (diff * diff).sum()
        done += take
    if good == 0:
        raise SolverError("no finite terminal samples at the probe point")
    mean = sums / good
    var = np.maximum(sums2 / good - mean * mean, 0.0)
    gmean = dsum / good
    gvar = np.maximum(dsum2 / good - gmean * gmean, 0.0)
    return VProbe(x=x, t=t0, value=float(mean[0]),
                  stderr=float(np.sqrt(var[0] / good)),
                  gradient=gmean,
                  gradient_stderr=np.sqrt(gvar / good),
                  n_paths=good, bad_paths=bad)


def _pilot_scale(model: MarketModel, riccati: RiccatiSolution,
                 seed: int, n_paths: int = 1000) -> np.ndarray:
    """Terminal standard deviation of each observer coordinate under P*."""
    y0 = np.concatenate([model.m0, [0.0]])[None, :]
    yT = _evolve_y(model, riccati, y0, 0.0, model.T / 200.0, seed,
                   "pde-pilot", 0, n_paths)[0]
    return yT.std(axis=0)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Rectangular space-time grid for the finite-difference solver."""

    x1_nodes: int = 201
    x2_nodes: int = 201
    time_steps: int = 1000
    bounds: Optional[tuple] = None   # ((x1lo, x1hi), (x2lo, x2hi)); auto if None
    k_dom: float = 6.0               # half-width in terminal standard deviations
    store_stride: int = 8            # keep every k-th time level
    mollify: bool = False            # smooth terminal data over ~2 cells


def _auto_bounds(model: MarketModel, riccati: RiccatiSolution,
                 k_dom: float, seed: int) -> tuple:
    """Domain sized to ±k_dom terminal standard deviations of the state.

    Keeping the box tied to the terminal dispersion matters for accuracy,
    not just cost: the extrapolation closure degrades on strips where the
    local diffusion is strong, and the tail coordinate's diffusion grows
    quadratically with the drift coordinate.
    """
    y0 = np.concatenate([model.m0, [0.0]])
    yT = _evolve_y(model, riccati, y0[None, :], 0.0, model.T / 200.0, seed,
                   "pde-pilot-bounds", 0, 1000)[0]
    mu = yT.mean(axis=0); sd = yT.std(axis=0)
    lo = np.minimum(y0, mu - k_dom * sd)
    hi = np.maximum(y0, mu + k_dom * sd)
    pad = 1e-6 + 0.01 * (hi - lo)
    return tuple((float(l - p), float(h + p)) for l, h, p in zip(lo, hi, pad))


def _pad_extrapolate(V: np.ndarray) -> np.ndarray:
    """Ghost ring by linear extrapolation (zero second difference at faces)."""
    N1, N2 = V.shape
    Vg = np.empty((N1 + 2, N2 + 2))
    Vg[1:-1, 1:-1] = V
    Vg[0, 1:-1] = 2.0 * V[0] - V[1]
    Vg[-1, 1:-1] = 2.0 * V[-1] - V[-2]
    Vg[:, 0] = 2.0 * Vg[:, 1] - Vg[:, 2]
    Vg[:, -1] = 2.0 * Vg[:, -2] - Vg[:, -3]
    return Vg


def _cross_term(V: np.ndarray, D12: np.ndarray, h1: float, h2: float) -> np.ndarray:
    """D12 * V_x1x2 on a sign-adapted seven-point stencil (ghost-padded)."""
    Vg = _pad_extrapolate(V)
    c = Vg[1:-1, 1:-1]
    pp = Vg[2:, 2:]; mm = Vg[:-2, :-2]; pm = Vg[2:, :-2]; mp = Vg[:-2, 2:]
    p0 = Vg[2:, 1:-1]; m0 = Vg[:-2, 1:-1]; zp = Vg[1:-1, 2:]; zm = Vg[1:-1, :-2]
    plus = (2.0 * c + pp + mm - p0 - m0 - zp - zm) / (2.0 * h1 * h2)
    minus = -(2.0 * c + pm + mp - p0 - m0 - zp - zm) / (2.0 * h1 * h2)
    d = D12.reshape(-1, 1)
    return d * np.where(d >= 0.0, plus, minus)


def _implicit_sweep(rhs: np.ndarray, D, f, h: float, dt: float) -> np.ndarray:
    """Solve (I - dt A) x = rhs independently along the last axis.

    Interior rows carry the axis operator (1/2) D d_xx + f d_x with central
    convection wherever the cell Peclet number keeps the row monotone and
    upwinding otherwise.  Face rows impose the linear boundary condition
    (vanishing second difference): x_0 - 2 x_1 + x_2 = 0.  All B systems are
    packed into one banded matrix (bandwidths 2/2; blocks never couple
    because the connecting bands are zeroed).
    """
    B, K = rhs.shape
    f = np.broadcast_to(np.asarray(f, dtype=float), (B, K))
    D = np.broadcast_to(np.asarray(D, dtype=float), (B, K)) \
        if np.ndim(D) else np.full((B, K), float(D))
    central = np.abs(f) * h <= D + 1e-300
    low = np.where(central, 0.5 * D / h**2 - f / (2 * h),
                   0.5 * D / h**2 + np.maximum(-f, 0.0) / h)
    up = np.where(central, 0.5 * D / h**2 + f / (2 * h),
                  0.5 * D / h**2 + np.maximum(f, 0.0) / h)
    diag = np.where(central, -D / h**2, -D / h**2 - np.abs(f) / h)

    main = 1.0 - dt * diag
    sup1 = np.zeros((B, K)); sup1[:, 1:-1] = -dt * up[:, 1:-1]
    sub1 = np.zeros((B, K)); sub1[:, 1:-1] = -dt * low[:, 1:-1]
    sup2 = np.zeros((B, K)); sub2 = np.zeros((B, K))
    # face rows: x0 - 2 x1 + x2 = 0 and its mirror, right-hand side zero
    main[:, 0] = 1.0; sup1[:, 0] = -2.0; sup2[:, 0] = 1.0
    main[:, -1] = 1.0; sub1[:, -1] = -2.0; sub2[:, -1] = 1.0
    b = rhs.copy()
    b[:, 0] = 0.0
    b[:, -1] = 0.0

    N = B * K
    ab = np.zeros((5, N))
    ab[2] = main.ravel()
    # band packing: entry (r, r+1) sits at ab[1, r+1], (r, r+2) at ab[0, r+2]
    s1 = np.zeros((B, K)); s1[:, :-1] = sup1[:, :-1]
    s2 = np.zeros((B, K)); s2[:, :-2] = sup2[:, :-2]
    l1 = np.zeros((B, K)); l1[:, 1:] = sub1[:, 1:]
    l2 = np.zeros((B, K)); l2[:, 2:] = sub2[:, 2:]
    ab[1, 1:] = s1.ravel()[:-1]
    ab[0, 2:] = s2.ravel()[:-2]
    ab[3, :-1] = l1.ravel()[1:]
    ab[4, :-2] = l2.ravel()[2:]
    out = solve_banded((2, 2), ab, b.ravel(), overwrite_ab=True,
                       overwrite_b=True, check_finite=False)
    return out.reshape(B, K)


@dataclass
class PDESolution:
    """Value function on a space-time grid with interpolable gradients."""

    solver: str
    model: MarketModel
    riccati: RiccatiSolution
    x1: np.ndarray
    x2: np.ndarray
    times_stored: np.ndarray        # ascending, includes 0 and T
    V_stored: np.ndarray            # (Kt, N1, N2)
    gridspec: GridSpec
    terminal_desc: str = ""
    clamp_events: int = 0
    _grad_cache: dict = field(default_factory=dict, repr=False)

    @property
    def h1(self): return float(self.x1[1] - self.x1[0])

    @property
    def h2(self): return float(self.x2[1] - self.x2[0])

    def _slice_gradient(self, k: int):
        if k not in self._grad_cache:
            V = self.V_stored[k]
            g1 = np.empty_like(V); g2 = np.empty_like(V)
            g1[1:-1] = (V[2:] - V[:-2]) / (2 * self.h1)
            g1[0] = (-3 * V[0] + 4 * V[1] - V[2]) / (2 * self.h1)
            g1[-1] = (3 * V[-1] - 4 * V[-2] + V[-3]) / (2 * self.h1)
            g2[:, 1:-1] = (V[:, 2:] - V[:, :-2]) / (2 * self.h2)
            g2[:, 0] = (-3 * V[:, 0] + 4 * V[:, 1] - V[:, 2]) / (2 * self.h2)
            g2[:, -1] = (3 * V[:, -1] - 4 * V[:, -2] + V[:, -3]) / (2 * self.h2)
            self._grad_cache[k] = (g1, g2)
        return self._grad_cache[k]

    def _clamp(self, p: np.ndarray, grid: np.ndarray, h: float) -> np.ndarray:
        out = np.clip(p, grid[0], grid[-1])
        far = np.abs(out - p) > h
        nfar = int(np.count_nonzero(far))
        if nfar:
            if self.clamp_events == 0:
                log.warning("state left the value grid by more than one cell; "
                            "gradient extrapolated from the boundary")
            self.clamp_events += nfar
        return out

    def _bilinear(self, F: np.ndarray, p1: np.ndarray, p2: np.ndarray):
        i = np.clip(np.searchsorted(self.x1, p1, side="right") - 1, 0,
                    len(self.x1) - 2)
        j = np.clip(np.searchsorted(self.x2, p2, side="right") - 1, 0,
                    len(self.x2) - 2)
        w1 = (p1 - self.x1[i]) / self.h1
        w2 = (p2 - self.x2[j]) / self.h2
        return ((1 - w1) * (1 - w2) * F[i, j] + w1 * (1 - w2) * F[i + 1, j]
                + (1 - w1) * w2 * F[i, j + 1] + w1 * w2 * F[i + 1, j + 1])

    def _time_bracket(self, t: float):
        ts = self.times_stored
        if t <= ts[0]:
            return 0, 0, 0.0
        if t >= ts[-1]:
            return len(ts) - 1, len(ts) - 1, 0.0
        k = int(np.searchsorted(ts, t, side="right")) - 1
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return k, k + 1, float(w)

    def value_at(self, points: np.ndarray, t: float) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        p1 = self._clamp(p[:, 0], self.x1, self.h1)
        p2 = self._clamp(p[:, 1], self.x2, self.h2)
        k0, k1, w = self._time_bracket(t)
        v0 = self._bilinear(self.V_stored[k0], p1, p2)
        v1 = self._bilinear(self.V_stored[k1], p1, p2) if k1 != k0 else v0
        out = (1 - w) * v0 + w * v1
        return out if np.asarray(points).ndim > 1 else float(out[0])

    def gradient_at(self, points: np.ndarray, t: float) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        p1 = self._clamp(p[:, 0], self.x1, self.h1)
        p2 = self._clamp(p[:, 1], self.x2, self.h2)
        k0, k1, w = self._time_bracket(t)
        g10, g20 = self._slice_gradient(k0)
        out0 = np.stack([self._bilinear(g10, p1, p2),
                         self._bilinear(g20, p1, p2)], axis=-1)
        if k1 != k0:
            g11, g21 = self._slice_gradient(k1)
            out1 = np.stack([self._bilinear(g11, p1, p2),
                             self._bilinear(g21, p1, p2)], axis=-1)
            out0 = (1 - w) * out0 + w * out1
        return out0 if np.asarray(points).ndim > 1 else out0[0]


def solve_pde_fd(model: MarketModel, riccati: RiccatiSolution,
                 terminal: Callable, gridspec: GridSpec = GridSpec(), *,
                 pilot_seed: int = 0) -> PDESolution:
    """Backward IMEX march of the value-function equation (one risky asset).

    Raises :class:`UnsupportedDimensionError` for n > 1 (use the Monte Carlo
    estimator) and :class:`CFLError` when the diffusion matrix read off the
    model is not positive semidefinite on the grid, naming the admissible
    time step for the residual explicit piece.
    """
    if model.n != 1:
        raise UnsupportedDimensionError(
            "finite differences cover one risky asset; "
            "use estimate_V_mc for higher dimensions")
    gs = gridspec
    bounds = gs.bounds or _auto_bounds(model, riccati, gs.k_dom, pilot_seed)
    (x1lo, x1hi), (x2lo, x2hi) = bounds
    N1, N2, M = gs.x1_nodes, gs.x2_nodes, gs.time_steps
    if N1 < 5 or N2 < 5 or M < 1:
        raise DomainError("grid too small")
    x1 = np.linspace(x1lo, x1hi, N1)
    x2 = np.linspace(x2lo, x2hi, N2)
    h1 = x1[1] - x1[0]; h2 = x2[1] - x2[0]
    tgrid = np.linspace(0.0, model.T, M + 1)
    dt = model.T / M

    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    pts = np.stack([X1, X2], axis=-1)
    V = np.asarray(terminal(pts), dtype=float)
    if V.shape != (N1, N2):
        raise DomainError("terminal condition must map the grid to scalars")
    if not np.all(np.isfinite(V)):
        raise DomainError("terminal condition must be finite on the grid")
    if gs.mollify or getattr(terminal, "discontinuous", False):
        V = gaussian_filter(V, sigma=1.0, mode="nearest")

    _cfl_guard(model, riccati, x1, h1, h2, dt)

    stride = max(1, gs.store_stride)
    store_ks = sorted({k for k in range(M, -1, -stride)} | {0, M})
    slices = {M: V.copy()}

    for k in range(M - 1, -1, -1):
        t_new = tgrid[k]
        Q = model.Q_at(t_new)[0, 0]
        sig2 = model.sst_at(t_new)[0, 0]
        bsT = (model.b_at(t_new) @ model.sigma_at(t_new).T)[0, 0]
        gam = riccati.gamma_at(t_new)[0, 0]
        G = (bsT + gam) * Q
        A = riccati.A_at(t_new)[0, 0]
        ad = (model.alpha_at(t_new) @ model.delta_at(t_new))[0]
        D11 = G * G * sig2
        D12 = G * x1 * (sig2 * Q)
        D22 = x1 * x1 * Q * (sig2 * Q)
        f1 = (A - bsT * Q) * x1 + ad
        f2 = -0.5 * x1 * x1 * Q

        W = V + dt * _cross_term(V, D12, h1, h2)
        # x1 sweep: systems along x1 for each fixed x2 (transpose layout)
        Wt = _implicit_sweep(W.T, D11, f1[None, :], h1, dt).T
        # x2 sweep: systems along x2 for each fixed x1
        V = _implicit_sweep(Wt, D22[:, None], f2[:, None], h2, dt)
        if k in store_ks:
            slices[k] = V.copy()

    ks = sorted(slices)
    return PDESolution(solver="fd", model=model, riccati=riccati, x1=x1,
                       x2=x2, times_stored=tgrid[ks],
                       V_stored=np.stack([slices[k] for k in ks]),
                       gridspec=gs,
                       terminal_desc=getattr(terminal, "__name__", "terminal"))


def _cfl_guard(model, riccati, x1, h1, h2, dt):
    """Reject grids where the explicit mixed term outruns the axis damping.

    For the rank-one diffusion of this state equation the margin is
    nonnegative by the AM-GM inequality, so the guard can only trip when the
    covariance data is corrupted; the message names the admissible step.
    """
    worst = 0.0
    for t in np.linspace(0.0, model.T, 9):
        Q = model.Q_at(t)[0, 0]
        sig2 = model.sst_at(t)[0, 0]
        bsT = (model.b_at(t) @ model.sigma_at(t).T)[0, 0]
        G = (bsT + riccati.gamma_at(t)[0, 0]) * Q
        D11 = G * G * sig2
        D12 = np.abs(G * x1) * (sig2 * Q)
        D22 = x1 * x1 * Q * (sig2 * Q)
        excess = D12 / (h1 * h2) - 0.5 * D11 / h1**2 - 0.5 * D22 / h2**2
        worst = max(worst, float(excess.max()))
    if worst > 1e-9 and dt * worst > 1.0:
        raise CFLError(
            f"mixed-derivative stability violated: need dt <= {1.0 / worst:.3e}"
            f" (got {dt:.3e})")

import numpy as np
import pytest

from driftfolio.claim import McConfig, UtilitySpec
from driftfolio.errors import DomainError, UnsupportedDimensionError
from driftfolio.model import MarketModel
from driftfolio.pde import (GridSpec, VProbe, claim_terminal, coefficients,
                            estimate_V_mc, solve_pde_fd)

from conftest import scalar_model


@pytest.fixture(scope="module")
def small_grid():
    return GridSpec(x1_nodes=61, x2_nodes=61, time_steps=160, store_stride=4)


# ------------------------------------------------------------ coefficients --

def test_coefficients_vanish_with_state(benchmark_model, benchmark_riccati):
    co = coefficients(benchmark_model, benchmark_riccati)
    x = np.array([0.0, 0.7])
    assert co.f(x, 0.3)[-1] == pytest.approx(0.0)
    assert np.allclose(co.g(x, 0.3)[-1], 0.0)


def test_coefficients_top_block_without_feedback(benchmark_model,
                                                 benchmark_riccati):
    co = coefficients(benchmark_model, benchmark_riccati)
    t = 0.4
    g = co.g(np.array([0.1, 0.0]), t)
    expect = benchmark_riccati.gamma_at(t) @ benchmark_model.Q_at(t)
    assert np.allclose(g[0], expect[0])


def test_coefficients_hand_substitution():
    # sigma=1, gamma stationary 0.5 (beta^2=0.25), b=0, alpha=0, delta=0:
    # A = -0.5, f = (-0.5*2, -0.5*4) = (-1, -2), g = (0.5, 2)
    m = scalar_model(sigma=1.0, alpha=0.0, b=0.0, beta=0.5, gamma0=0.5,
                     delta=0.0)
    from driftfolio.filter import solve_riccati
    ric = solve_riccati(m)
    co = coefficients(m, ric)
    x = np.array([2.0, 0.0])
    assert np.allclose(co.f(x, 0.0), [-1.0, -2.0], atol=1e-10)
    assert np.allclose(co.g(x, 0.0).ravel(), [0.5, 2.0], atol=1e-10)
    d = co.diffusion(x, 0.0)
    assert np.allclose(d, [[0.25, 1.0], [1.0, 4.0]], atol=1e-10)
    # rank-one structure
    assert np.linalg.det(d) == pytest.approx(0.0, abs=1e-12)


def test_coefficients_time_domain_error(benchmark_model, benchmark_riccati):
    co = coefficients(benchmark_model, benchmark_riccati)
    with pytest.raises(DomainError):
        co.f(np.array([0.0, 0.0]), 1.5)


# ------------------------------------------------------------- FD solver ---

def test_fd_constant_terminal_is_constant(benchmark_model, benchmark_riccati,
                                          small_grid):
    sol = solve_pde_fd(benchmark_model, benchmark_riccati,
                       lambda x: np.full(x.shape[:-1], 3.7), small_grid)
    assert np.abs(sol.V_stored - 3.7).max() < 1e-11
    assert sol.value_at(np.array([[0.05, 0.0]]), 0.0)[0] == pytest.approx(3.7)


def test_fd_martingale_terminal_reproduced(benchmark_model, benchmark_riccati,
                                           small_grid):
    # exp(x2) is invariant under the state flow, so V(x, t) = exp(x2)
    sol = solve_pde_fd(benchmark_model, benchmark_riccati,
                       lambda x: np.exp(x[..., 1]), small_grid)
    X2 = np.broadcast_to(sol.x2, (len(sol.x1), len(sol.x2)))
    rel = np.abs(sol.V_stored[0] / np.exp(X2) - 1.0)
    assert rel[1:-1, 1:-1].max() < 2e-3   # coarse grid; acceptance pins 1e-3


def test_fd_terminal_condition_exact(benchmark_model, benchmark_riccati,
                                     small_grid):
    phi = lambda x: np.cos(x[..., 0]) + x[..., 1] ** 2
    sol = solve_pde_fd(benchmark_model, benchmark_riccati, phi, small_grid)
    X1, X2 = np.meshgrid(sol.x1, sol.x2, indexing="ij")
    grid_phi = np.cos(X1) + X2 ** 2
    assert np.array_equal(sol.V_stored[-1], grid_phi)
    assert sol.times_stored[-1] == pytest.approx(benchmark_model.T)


def test_fd_linearity(benchmark_model, benchmark_riccati, small_grid):
    p1 = lambda x: np.exp(x[..., 1])
    p2 = lambda x: np.cos(2.0 * x[..., 0]) + 0.3 * x[..., 1]
    combo = lambda x: 2.0 * p1(x) - 0.5 * p2(x)
    s1 = solve_pde_fd(benchmark_model, benchmark_riccati, p1, small_grid)
    s2 = solve_pde_fd(benchmark_model, benchmark_riccati, p2, small_grid)
    sc = solve_pde_fd(benchmark_model, benchmark_riccati, combo, small_grid)
    gap = np.abs(sc.V_stored - (2.0 * s1.V_stored - 0.5 * s2.V_stored)).max()
    assert gap < 1e-10


def test_fd_comparison_principle(benchmark_model, benchmark_riccati,
                                 small_grid):
    lo = lambda x: np.minimum(np.exp(x[..., 1]), 1.1)
    hi = lambda x: np.exp(x[..., 1])
    s_lo = solve_pde_fd(benchmark_model, benchmark_riccati, lo, small_grid)
    s_hi = solve_pde_fd(benchmark_model, benchmark_riccati, hi, small_grid)
    gap = s_hi.V_stored - s_lo.V_stored
    assert gap.min() > -1e-9


def test_fd_unsupported_dimension():
    m = MarketModel.build(2, 1.0, sigma=np.eye(2) * 0.3, r=0.0,
                          alpha=np.eye(2), beta=np.eye(2) * 0.1,
                          b=np.zeros((2, 2)), delta=[0.0, 0.0],
                          m0=[0.0, 0.0], gamma0=np.eye(2) * 0.01,
                          grid_step=0.01)
    from driftfolio.filter import solve_riccati
    ric = solve_riccati(m)
    with pytest.raises(UnsupportedDimensionError):
        solve_pde_fd(m, ric, lambda x: x[..., 1], GridSpec(x1_nodes=11,
                                                           x2_nodes=11,
                                                           time_steps=10))


def test_fd_nonfinite_terminal_rejected(benchmark_model, benchmark_riccati,
                                        small_grid):
    with pytest.raises(DomainError):
        solve_pde_fd(benchmark_model, benchmark_riccati,
                     lambda x: np.log(x[..., 0]), small_grid)  # -inf/nan nodes


# --------------------------------------------------------- MC estimator ----

def test_mc_trivial_cases(benchmark_model, benchmark_riccati):
    mc = McConfig(N=2000, dt=5e-3, seed=3)
    # constant claim
    p = estimate_V_mc(benchmark_model, benchmark_riccati,
                      lambda y: np.full(y.shape[:-1], 2.5),
                      (np.array([0.05, 0.0]), 0.2), mc)
    assert p.value == pytest.approx(2.5) and p.stderr == 0.0
    assert np.allclose(p.gradient, 0.0)
    # probe at the horizon: no evolution
    phi = lambda y: y[..., 0] ** 2 + y[..., 1]
    pT = estimate_V_mc(benchmark_model, benchmark_riccati, phi,
                       (np.array([0.3, -0.2]), benchmark_model.T), mc)
    assert pT.value == pytest.approx(0.3 ** 2 - 0.2, rel=1e-12)
    assert pT.stderr == 0.0
    assert pT.gradient[0] == pytest.approx(0.6, rel=1e-4)
    assert pT.gradient[1] == pytest.approx(1.0, rel=1e-6)


def test_mc_martingale_self_consistency(benchmark_model, benchmark_riccati):
    mc = McConfig(N=20000, dt=2e-3, seed=9)
    phi = lambda y: np.exp(y[..., 1])
    p = estimate_V_mc(benchmark_model, benchmark_riccati, phi,
                      (np.array([0.02, 0.3]), 0.25), mc)
    assert abs(p.value - np.exp(0.3)) < 3 * p.stderr
    # gradient in x2 equals the value (d/dx2 exp = exp); x1 direction flat
    assert abs(p.gradient[1] - p.value) < 3 * p.gradient_stderr[1] + 1e-4


def test_fd_against_mc_on_goal_claim(benchmark_model, benchmark_riccati):
    u = UtilitySpec.goal(0.5, 0.25)
    lam = 1.0
    phi = claim_terminal(u, lam)
    gs = GridSpec(x1_nodes=81, x2_nodes=81, time_steps=240, store_stride=8)
    sol = solve_pde_fd(benchmark_model, benchmark_riccati, phi, gs)
    mc = McConfig(N=30000, dt=2e-3, seed=13)
    probe_x = np.array([0.05, 0.0])
    p = estimate_V_mc(benchmark_model, benchmark_riccati, phi, (probe_x, 0.0),
                      mc)
    v_fd = sol.value_at(probe_x[None, :], 0.0)[0]
    # coarse-grid agreement: 3 se plus a generous grid budget
    assert abs(v_fd - p.value) < 3 * p.stderr + 0.02


def test_mc_gradient_matches_fd(benchmark_model, benchmark_riccati):
    phi = lambda y: np.exp(y[..., 1])
    gs = GridSpec(x1_nodes=81, x2_nodes=81, time_steps=240, store_stride=8)
    sol = solve_pde_fd(benchmark_model, benchmark_riccati, phi, gs)
    mc = McConfig(N=20000, dt=2e-3, seed=17)
    x = np.array([0.05, 0.1])
    p = estimate_V_mc(benchmark_model, benchmark_riccati, phi, (x, 0.5), mc)
    g_fd = sol.gradient_at(x[None, :], 0.5)[0]
    tol = 3 * p.gradient_stderr + np.array([2e-3, 2e-3])
    assert np.all(np.abs(g_fd - p.gradient) <= tol)


def test_probe_state_dimension_error(benchmark_model, benchmark_riccati):
    with pytest.raises(DomainError):
        estimate_V_mc(benchmark_model, benchmark_riccati,
                      lambda y: y[..., 0], (np.array([0.1]), 0.2),
                      McConfig(N=10, dt=0.01, seed=1))

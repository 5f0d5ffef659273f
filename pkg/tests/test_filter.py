import numpy as np
import pytest

from driftfolio.errors import DomainError
from driftfolio.filter import (FilterState, conditional_density, filter_step,
                               filter_path_batch, solve_riccati)
from driftfolio.model import MarketModel
from driftfolio.simulate import iterate_path_batches, simulate_paths

from conftest import scalar_model


# -------------------------------------------------------------- riccati ----

def test_riccati_pure_decay_closed_form():
    # b=0, alpha=0, beta=0, sigma=1, gamma0=1: dgamma/dt = -gamma^2
    m = scalar_model(b=0.0, alpha=0.0, beta=0.0, sigma=1.0, gamma0=1.0)
    sol = solve_riccati(m)
    expected = 1.0 / (1.0 + sol.times)
    rel = np.abs(sol.gamma_path[:, 0, 0] / expected - 1.0)
    assert rel.max() < 1e-6


def test_riccati_zero_fixed_point():
    m = scalar_model(b=0.0, beta=0.0, gamma0=0.0)
    sol = solve_riccati(m)
    assert np.abs(sol.gamma_path).max() == 0.0


def test_riccati_stationary_point():
    # -gamma^2 + 1 has fixed point gamma = 1
    m = scalar_model(b=0.0, alpha=0.0, beta=1.0, sigma=1.0, gamma0=1.0)
    sol = solve_riccati(m)
    assert np.abs(sol.gamma_path[:, 0, 0] - 1.0).max() < 1e-12


def test_riccati_information_form_identity():
    # b = beta = 0 and no mean reversion: information form gives
    # gamma(t) = (gamma0^{-1} + t Q)^{-1} for constant Q
    m = scalar_model(b=0.0, beta=0.0, alpha=0.0, sigma=0.5, gamma0=0.09)
    sol = solve_riccati(m)
    Q = 1.0 / 0.25
    expected = 1.0 / (1.0 / 0.09 + sol.times * Q)
    rel = np.abs(sol.gamma_path[:, 0, 0] / expected - 1.0)
    assert rel.max() < 1e-6


def test_riccati_A_path_definition(benchmark_model, benchmark_riccati):
    t = 0.5
    g = benchmark_riccati.gamma_at(t)
    A = benchmark_riccati.A_at(t)
    expect = -(benchmark_model.alpha_at(t) - benchmark_model.b_at(t)) \
        - g @ benchmark_model.Q_at(t)
    assert np.allclose(A, expect, atol=1e-12)


def test_riccati_grid_must_refine_coefficients():
    m = scalar_model(grid_step=1e-2)
    with pytest.raises(DomainError):
        solve_riccati(m, grid=np.linspace(0.0, 1.0, 5))


# --------------------------------------------------------- filter_step ----

def test_filter_step_frozen_when_no_uncertainty():
    # b=0, beta=0, alpha=0, gamma0=0: no gain, no drift: a_hat stays at m0
    m = scalar_model(b=0.0, beta=0.0, alpha=0.0, gamma0=0.0, m0=0.07)
    ric = solve_riccati(m)
    st = FilterState.initial(m)
    st2 = filter_step(st, np.array([0.5]), 0.01, m, ric)
    assert st2.a_hat[0] == pytest.approx(0.07, abs=1e-15)


def test_filter_step_zero_mean_gives_zero_density_increment():
    m = scalar_model()
    ric = solve_riccati(m)
    st = FilterState(t=0.2, a_hat=np.zeros(1), gamma=ric.gamma_at(0.2),
                     y_extra=0.3)
    st2 = filter_step(st, np.array([0.4]), 0.01, m, ric)
    assert st2.y_extra == pytest.approx(0.3, abs=1e-15)


def test_filter_step_hand_computed_update():
    # sigma=1, gamma=0.5 stationary (beta^2 = 0.25), alpha=b=0:
    # a+ = 1 + (-0.5*1)*0.01 + 0.5*0.02 = 1.005
    m = scalar_model(sigma=1.0, alpha=0.0, b=0.0, beta=0.5, gamma0=0.5)
    ric = solve_riccati(m)
    assert ric.gamma_at(0.0)[0, 0] == pytest.approx(0.5, abs=1e-12)
    st = FilterState(t=0.0, a_hat=np.array([1.0]), gamma=np.array([[0.5]]))
    st2 = filter_step(st, np.array([0.02]), 0.01, m, ric)
    assert st2.a_hat[0] == pytest.approx(1.005, abs=1e-12)
    # density exponent: -0.5*1*1*0.01 + 1*0.02 = 0.015
    assert st2.y_extra == pytest.approx(0.015, abs=1e-14)


def test_filter_step_dimension_error():
    m = scalar_model()
    ric = solve_riccati(m)
    st = FilterState.initial(m)
    with pytest.raises(DomainError):
        filter_step(st, np.array([0.1, 0.2]), 0.01, m, ric)


def test_batch_filter_matches_stepwise(benchmark_model, benchmark_riccati):
    rngen = np.random.default_rng(3)
    M = 50
    times = np.linspace(0.0, 1.0, M + 1)
    dR = rngen.normal(0.0, 0.02, size=(2, M, 1))
    a, y = filter_path_batch(benchmark_model, benchmark_riccati, times, dR)
    st = FilterState.initial(benchmark_model)
    for k in range(M):
        st = filter_step(st, dR[0, k], times[k + 1] - times[k],
                         benchmark_model, benchmark_riccati)
    assert np.allclose(a[0, -1], st.a_hat, atol=1e-12)
    assert y[0, -1] == pytest.approx(st.y_extra, abs=1e-12)


# -------------------------------------------------- conditional density ----

def test_conditional_density_initial_and_log_inverse():
    m = scalar_model()
    assert conditional_density(FilterState.initial(m)) == 1.0
    st = FilterState(t=0.1, a_hat=np.zeros(1), gamma=np.zeros((1, 1)),
                     y_extra=np.log(2.0))
    assert conditional_density(st) == pytest.approx(2.0, rel=1e-15)


def test_density_matches_direct_sde_integration(benchmark_model):
    # independent oracle: Euler-integrate dZbar = Zbar ahat^T Q dR along the
    # same path; the gap to exp(y_extra) is the O(sqrt(dt)) Euler residual
    def gap(dt, seed):
        batch = simulate_paths(benchmark_model, 4, dt, "P", seed=seed)
        dR = np.diff(batch.R_tilde, axis=1)
        Q = benchmark_model.Q_at(0.0)[0, 0]  # constant sigma
        z = np.ones(4)
        for k in range(batch.n_steps):
            z *= 1.0 + batch.a_hat[:, k, 0] * Q * dR[:, k, 0]
        return np.abs(np.exp(batch.y_extra[:, -1]) - z).max()

    assert gap(1e-4, 21) < 0.5 * np.sqrt(1e-4)
    assert gap(1e-3, 21) < 0.5 * np.sqrt(1e-3)


# ------------------------------------------------- statistical optimality --

def test_filter_beats_baselines_and_matches_riccati_trace(benchmark_model,
                                                          benchmark_riccati):
    # small-scale version of the optimality check (full run in acceptance)
    N, dt = 4000, 2e-3
    sq_f = sq_p = sq_r = 0.0
    n = 0
    m_prior = _prior_mean_path(benchmark_model, dt)
    for batch in iterate_path_batches(benchmark_model, N, dt, "P", seed=5,
                                      batch_size=2000,
                                      riccati=benchmark_riccati):
        err_f = batch.a_tilde[:, -1, 0] - batch.a_hat[:, -1, 0]
        err_p = batch.a_tilde[:, -1, 0] - m_prior[-1]
        window = int(round(0.5 / dt))
        roll = (batch.R_tilde[:, -1, 0] - batch.R_tilde[:, -window - 1, 0]) / (window * dt)
        err_r = batch.a_tilde[:, -1, 0] - roll
        sq_f += (err_f ** 2).sum(); sq_p += (err_p ** 2).sum()
        sq_r += (err_r ** 2).sum(); n += len(batch)
    mse_f, mse_p, mse_r = sq_f / n, sq_p / n, sq_r / n
    tr = np.trace(benchmark_riccati.gamma_at(1.0))
    se = np.sqrt(2.0 / n) * tr  # chi-square-scale standard error
    assert abs(mse_f - tr) < 3.5 * se
    assert mse_f < mse_p and mse_f < mse_r


def _prior_mean_path(model, dt):
    # observation-free estimate: dm = alpha(delta - m) dt + b m dt
    M = int(round(model.T / dt))
    m = np.empty(M + 1)
    m[0] = model.m0[0]
    for k in range(M):
        t = k * dt
        al = model.alpha_at(t)[0, 0]
        de = model.delta_at(t)[0]
        bb = model.b_at(t)[0, 0]
        m[k + 1] = m[k] + (al * (de - m[k]) + bb * m[k]) * dt
    return m


# ------------------------------------------------- particle filter oracle --

def test_particle_filter_agrees_on_mean_and_density(benchmark_model,
                                                    benchmark_riccati):
    """Bootstrap particle filter as an independent nonlinear-filtering oracle.

    For this linear-Gaussian model the particle estimates of the conditional
    mean and of the conditional density must agree with the closed filter up
    to particle noise.
    """
    path = simulate_paths(benchmark_model, 1, 5e-3, "P", seed=99).path(0)
    dR = np.diff(path.R_tilde, axis=0)[:, 0]
    times = path.times
    Np = 40000
    prng = np.random.default_rng(12345)
    m = benchmark_model
    part = m.m0[0] + np.sqrt(m.gamma0[0, 0]) * prng.normal(size=Np)
    logw_total = 0.0
    for k in range(len(dR)):
        t = times[k]
        dt = times[k + 1] - times[k]
        Q = m.Q_at(t)[0, 0]
        w = np.exp(part * Q * dR[k] - 0.5 * part**2 * Q * dt)
        logw_total += np.log(w.mean())
        w /= w.sum()
        # systematic resampling
        pos = (prng.random() + np.arange(Np)) / Np
        idx = np.searchsorted(np.cumsum(w), pos)
        part = part[np.minimum(idx, Np - 1)]
        al = m.alpha_at(t)[0, 0]; de = m.delta_at(t)[0]
        be = m.beta_at(t)[0, 0]
        part = part + al * (de - part) * dt + be * np.sqrt(dt) * prng.normal(size=Np)
    assert part.mean() == pytest.approx(path.a_hat[-1, 0], abs=4e-3)
    assert logw_total == pytest.approx(path.y_extra[-1], abs=2e-2)

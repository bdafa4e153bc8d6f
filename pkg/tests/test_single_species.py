import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from nlcompete import (
    BoundaryRegime,
    ConfigError,
    NumericsError,
    SingleSpeciesProblem,
    assemble_dispersal,
    build_grid,
    lambda_star,
    solve_steady_state,
    time_march,
    tophat,
)
from nlcompete.classifier import semitrivial_problem


@pytest.fixture(scope="module")
def prob60():
    grid = build_grid(0.0, 1.0, 60)
    op = assemble_dispersal(tophat(0.3), grid, BoundaryRegime.no_flux(), 1.0)
    m = 1.0 + 0.5 * np.cos(2.0 * np.pi * grid.nodes)
    return SingleSpeciesProblem(op, m)


# --- dichotomy in the spectral bound ------------------------------------------

def test_constant_growth_gives_constant_steady(op40):
    prob = SingleSpeciesProblem(op40, np.full(40, 1.3))
    res = solve_steady_state(prob)
    assert res.exists and not res.degenerate
    assert res.lambda_star == pytest.approx(1.3, abs=1e-12)
    np.testing.assert_allclose(res.state, 1.3, rtol=0, atol=1e-8)
    assert res.residual < 1e-9
    assert res.bracket_gap < 1e-6 * 2.3


def test_negative_bound_means_extinction(op40):
    res = solve_steady_state(SingleSpeciesProblem(op40, np.full(40, -1.0)))
    assert not res.exists and not res.degenerate
    assert res.state is None
    assert res.lambda_star == pytest.approx(-1.0, abs=1e-12)


def test_zero_growth_is_degenerate(op40):
    res = solve_steady_state(SingleSpeciesProblem(op40, np.zeros(40)))
    assert res.degenerate and not res.exists
    assert abs(res.lambda_star) <= 1e-8


def test_heterogeneous_steady_matches_time_integration(prob60):
    res = solve_steady_state(prob60)
    assert res.exists
    assert res.residual < 1e-9 * (1.0 + np.max(res.state))

    gen = prob60.op.generator
    sol = solve_ivp(
        lambda _t, u: gen @ u + prob60.f(u),
        (0.0, 200.0),
        np.full(60, 0.5),
        method="RK45",
        rtol=1e-10,
        atol=1e-12,
    )
    assert sol.success
    assert np.max(np.abs(sol.y[:, -1] - res.state)) < 1e-6


def test_slow_marginal_growth_raises(op40):
    # bound 1e-6 sits above the neutral band but drives convergence too
    # slowly for any reasonable horizon
    prob = SingleSpeciesProblem(op40, np.full(40, 1e-6))
    with pytest.raises(NumericsError, match="settle"):
        solve_steady_state(prob, march_horizon=50.0)


# --- reaction hook ------------------------------------------------------------

def test_self_limit_hook_scales_the_steady_state(op40):
    prob = semitrivial_problem(op40, np.full(40, 1.0), np.full(40, 2.0))
    res = solve_steady_state(prob)
    np.testing.assert_allclose(res.state, 0.5, rtol=0, atol=1e-8)
    # linearization at zero is unchanged by the self-limitation strength
    assert lambda_star(prob) == pytest.approx(1.0, abs=1e-6)


def test_f_prime_difference_matches_analytic(op40):
    prob = semitrivial_problem(op40, np.full(40, 1.0), np.full(40, 2.0))
    u = np.linspace(0.1, 0.9, 40)
    np.testing.assert_allclose(prob.f_prime(u), 1.0 - 4.0 * u, rtol=0, atol=1e-7)


# --- marching mechanics -------------------------------------------------------

def test_march_records_unit_times_and_minima(op40):
    prob = SingleSpeciesProblem(op40, np.full(40, 1.0))
    out = time_march(prob, np.full(40, 0.2), 3.5, keep_snapshots=True)
    np.testing.assert_allclose(out.times, [0.0, 1.0, 2.0, 3.0, 3.5], atol=1e-9)
    assert len(out.snapshots) == len(out.times)
    assert out.min_history.shape == out.times.shape
    assert np.all(out.min_history >= 0.0)
    np.testing.assert_array_equal(out.snapshots[-1], out.final)


def test_march_distance_to_supplied_steady(op40):
    prob = SingleSpeciesProblem(op40, np.full(40, 1.0))
    steady = solve_steady_state(prob)
    out = time_march(prob, np.full(40, 0.1), 60.0, steady=steady)
    assert out.converged
    assert out.dist_to_steady < 1e-6


def test_march_validation(op40):
    prob = SingleSpeciesProblem(op40, np.full(40, 1.0))
    with pytest.raises(ConfigError, match="length"):
        time_march(prob, np.zeros(41), 1.0)
    with pytest.raises(ConfigError, match="nonnegative"):
        time_march(prob, np.full(40, -0.1), 1.0)
    bad = np.full(40, 0.3)
    bad[0] = np.inf
    with pytest.raises(ConfigError, match="finite"):
        time_march(prob, bad, 1.0)
    with pytest.raises(ConfigError, match="horizon"):
        time_march(prob, np.full(40, 0.3), 0.0)


def test_problem_validation(op40):
    with pytest.raises(ConfigError, match="length"):
        SingleSpeciesProblem(op40, np.ones(41))
    bad = np.ones(40)
    bad[5] = np.nan
    with pytest.raises(ConfigError, match="finite"):
        SingleSpeciesProblem(op40, bad)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nonnegativity_is_preserved(seed):
    grid = build_grid(0.0, 1.0, 40)
    op = assemble_dispersal(tophat(0.3), grid, BoundaryRegime.no_flux(), 1.0)
    m = 1.0 + 0.5 * np.sin(2.0 * np.pi * grid.nodes)
    u0 = np.random.default_rng(seed).uniform(0.0, 2.0, size=40)
    out = time_march(SingleSpeciesProblem(op, m), u0, 3.0)
    assert np.all(out.min_history >= 0.0)
    assert np.all(out.final >= 0.0)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from nlcompete import (
    AttractorRefs,
    BoundaryRegime,
    ConfigError,
    ModelParams,
    MonotonicityError,
    assemble_dispersal,
    build_grid,
    comparison_check,
    energy_residual,
    gaussian,
    monotone_bracket,
    order_fractions,
    simulate,
    symmetrization_gap,
    tophat,
)
from nlcompete.competition import euler_dt


# --- constant-coefficient attractors ------------------------------------------

def test_weak_constant_case_reaches_coexistence(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5)
    out = simulate(params, np.full(40, 0.2), np.full(40, 0.5), horizon=200.0)
    assert out.converged
    np.testing.assert_allclose(out.u, 2.0 / 3.0, rtol=0, atol=1e-6)
    np.testing.assert_allclose(out.v, 2.0 / 3.0, rtol=0, atol=1e-6)


def test_degenerate_constant_limit_matches_planar_integration(op40, const_params):
    # with b = c = 1 and constant data the spatial system collapses to a
    # planar ODE whose limit on the line u + v = 1 fixes the split point
    params = const_params(op40, b=1.0, c=1.0)
    ones = np.ones(40)
    refs = AttractorRefs(u_d=ones, v_D=ones, degenerate=True, predicted="continuum_point")
    out = simulate(params, np.full(40, 0.3), np.full(40, 0.4), horizon=400.0, refs=refs)
    assert out.converged
    assert out.limit_type == "continuum_point"

    sol = solve_ivp(
        lambda _t, y: [y[0] * (1.0 - y[0] - y[1]), y[1] * (1.0 - y[0] - y[1])],
        (0.0, 200.0),
        [0.3, 0.4],
        rtol=1e-12,
        atol=1e-14,
    )
    assert sol.success
    s_oracle = float(sol.y[0, -1])
    assert out.s_estimate == pytest.approx(s_oracle, abs=1e-6)
    assert out.s_estimate == pytest.approx(3.0 / 7.0, abs=1e-6)


def test_both_species_decay_flags_anomaly(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5, m=-1.0, M=-1.0)
    out = simulate(params, np.full(40, 0.1), np.full(40, 0.1), horizon=60.0)
    assert out.diagnostics.anomaly_both_masses_decayed
    assert np.max(out.u) < 1e-8 and np.max(out.v) < 1e-8


# --- order fractions ----------------------------------------------------------

def test_order_fractions_against_plain_loops():
    rng = np.random.default_rng(11)
    u = rng.uniform(0.1, 1.5, 30)
    v = rng.uniform(0.1, 1.5, 30)
    u_ref = rng.uniform(0.5, 2.0, 30)
    v_ref = rng.uniform(0.5, 2.0, 30)
    fr = order_fractions(u, v, u_ref, v_ref)
    theta = min(min(u[i] / u_ref[i] for i in range(30)),
                1.0 - max(v[i] / v_ref[i] for i in range(30)))
    eta = max(max(u[i] / u_ref[i] for i in range(30)),
              1.0 - min(v[i] / v_ref[i] for i in range(30)))
    assert fr.theta == pytest.approx(theta, abs=1e-15)
    assert fr.eta == pytest.approx(eta, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_theta_never_exceeds_eta(seed):
    rng = np.random.default_rng(seed)
    fr = order_fractions(
        rng.uniform(0.01, 2.0, 15),
        rng.uniform(0.01, 2.0, 15),
        rng.uniform(0.1, 2.0, 15),
        rng.uniform(0.1, 2.0, 15),
    )
    assert fr.theta <= fr.eta


def test_order_fractions_need_positive_references():
    ones = np.ones(5)
    with pytest.raises(ConfigError, match="positive"):
        order_fractions(ones, ones, np.zeros(5), ones)


# --- energy -------------------------------------------------------------------

def test_energy_is_s_independent_under_the_certificate(op40, const_params):
    params = const_params(op40, b=1.0, c=1.0)
    rng = np.random.default_rng(4)
    u = rng.uniform(0.1, 1.0, 40)
    v = rng.uniform(0.1, 1.0, 40)
    ones = np.ones(40)
    values = [energy_residual(params, u, v, ones, ones, s) for s in (0.0, 0.3, 0.7, 1.0)]
    assert max(values) - min(values) < 1e-12


def test_energy_vanishes_on_the_line(op40, const_params):
    params = const_params(op40, b=1.0, c=1.0)
    ones = np.ones(40)
    s = 0.4
    assert energy_residual(params, s * ones, (1 - s) * ones, ones, ones, s) < 1e-28


# --- step-size policy ---------------------------------------------------------

def test_euler_dt_matches_documented_formula(grid40, const_params):
    op_pure = assemble_dispersal(tophat(0.3), grid40, BoundaryRegime.no_flux(), 0.7)
    op_mixed = assemble_dispersal(
        tophat(0.3), grid40, BoundaryRegime.no_flux(), 1.2, mix=0.25
    )
    params = ModelParams(op_pure, op_mixed, m=1.5, M=0.5, b=0.3, c=0.2, b1=1.0, c1=2.0)
    cap = 1.5 + 1.0
    stiff = (
        0.7 * np.max(op_pure.adiag)
        + 1.2 * np.max(op_mixed.adiag)
        + 1.2 * 0.75 * 4.0 / grid40.weight**2
        + 1.5
        + 0.5
        + 2.0 * (0.3 + 0.2 + 1.0 + 2.0) * cap
    )
    assert euler_dt(params) == pytest.approx(0.4 / stiff, rel=1e-14)


# --- symmetrization identity --------------------------------------------------

def test_symmetrization_two_routes_agree():
    grid = build_grid(0.0, 1.0, 80)
    op = assemble_dispersal(gaussian(0.1), grid, BoundaryRegime.no_flux(), 0.7)
    rng = np.random.default_rng(21)
    u = rng.uniform(0.2, 2.0, 80)
    u_star = rng.uniform(0.2, 2.0, 80)
    lhs, rhs = symmetrization_gap(op, u, u_star)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)


def test_symmetrization_sign_on_ordered_fields():
    grid = build_grid(0.0, 1.0, 80)
    op = assemble_dispersal(gaussian(0.1), grid, BoundaryRegime.no_flux(), 0.7)
    rng = np.random.default_rng(22)
    u_star = rng.uniform(0.5, 1.0, 80)
    u = u_star + rng.uniform(0.1, 0.5, 80)
    lhs, _ = symmetrization_gap(op, u, u_star)
    assert lhs <= 1e-14


def test_symmetrization_validation(grid40):
    op_mixed = assemble_dispersal(
        tophat(0.3), grid40, BoundaryRegime.no_flux(), 1.0, mix=0.5
    )
    ones = np.ones(40)
    with pytest.raises(ConfigError, match="nonlocal"):
        symmetrization_gap(op_mixed, ones, ones)
    op = assemble_dispersal(tophat(0.3), grid40, BoundaryRegime.no_flux(), 1.0)
    with pytest.raises(ConfigError, match="length"):
        symmetrization_gap(op, np.ones(41), ones)
    with pytest.raises(ConfigError, match="positive"):
        symmetrization_gap(op, 0.0 * ones, ones)


# --- bracketing and comparison ------------------------------------------------

def test_bracket_certifies_constant_coexistence(op40, const_params):
    params = const_params(op40, b=0.4, c=0.4)
    ones = np.ones(40)
    rep = monotone_bracket(params, ones, ones, ones, ones)
    assert rep.certified
    assert rep.sup_distance <= 1e-6
    # (1-c)/(1-bc) = 0.6/0.84 = 5/7 for both species
    np.testing.assert_allclose(rep.upper[0], 5.0 / 7.0, rtol=0, atol=1e-5)
    np.testing.assert_allclose(rep.lower[1], 5.0 / 7.0, rtol=0, atol=1e-5)


def test_bracket_detects_bogus_references(op40, const_params):
    # half the true semi-trivial state is not an upper solution, so the
    # "upper" trajectory rises and trips the order diagnostic
    params = const_params(op40, b=0.4, c=0.4)
    ones = np.ones(40)
    with pytest.raises(MonotonicityError):
        monotone_bracket(params, 0.5 * ones, 0.5 * ones, ones, ones, horizon=50.0)


def test_bracket_validation(op40, const_params):
    params = const_params(op40, b=0.4, c=0.4)
    ones = np.ones(40)
    with pytest.raises(ConfigError, match="delta"):
        monotone_bracket(params, ones, ones, ones, ones, delta=0.0)
    with pytest.raises(ConfigError, match="positive"):
        monotone_bracket(params, ones, ones, 0.0 * ones, ones)


def test_comparison_preserves_order(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5)
    rng = np.random.default_rng(9)
    u0 = rng.uniform(0.3, 0.8, 40)
    v0 = rng.uniform(0.3, 0.8, 40)
    assert comparison_check(params, (0.5 * u0, 1.5 * v0), (u0, v0))


def test_comparison_rejects_unordered_inits(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5)
    ones = np.ones(40)
    with pytest.raises(ConfigError, match="ordered"):
        comparison_check(params, (2.0 * ones, ones), (ones, 2.0 * ones))


# --- validation and diagnostics -----------------------------------------------

def test_params_validation(op40, grid40):
    other = assemble_dispersal(
        tophat(0.3), build_grid(0.0, 1.0, 41), BoundaryRegime.no_flux(), 1.0
    )
    with pytest.raises(ConfigError, match="grids"):
        ModelParams(op40, other, m=1.0, M=1.0, b=0.5, c=0.5)
    with pytest.raises(ConfigError):
        ModelParams(op40, op40, m=1.0, M=1.0, b=-0.5, c=0.5)
    params = ModelParams(op40, op40, m=1.0, M=1.0, b=0.5, c=0.5)
    assert params.b.shape == (40,)
    assert params.weak_competition
    strong = ModelParams(op40, op40, m=1.0, M=1.0, b=2.0, c=2.0)
    assert not strong.weak_competition


def test_simulate_validates_inits(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5)
    ones = np.ones(40)
    with pytest.raises(ConfigError, match="length"):
        simulate(params, np.ones(41), ones)
    with pytest.raises(ConfigError, match="nonnegative"):
        simulate(params, -ones, ones)
    bad = ones.copy()
    bad[0] = np.nan
    with pytest.raises(ConfigError, match="finite"):
        simulate(params, bad, ones)


def test_simulate_diagnostics_shape_and_refs(op40, const_params):
    params = const_params(op40, b=0.5, c=0.5)
    ones = np.ones(40)
    target = 2.0 / 3.0 * ones
    refs = AttractorRefs(
        u_d=ones, v_D=ones, coexistence=(target, target), predicted="coexist"
    )
    out = simulate(params, 0.2 * ones, 0.5 * ones, horizon=200.0, refs=refs)
    d = out.diagnostics
    n_rec = d.times.size
    for arr in (d.theta, d.eta, d.energy, d.l2_u, d.l2_v, d.sup_dist, d.below_refs):
        assert arr.shape == (n_rec,)
    assert d.below_refs.dtype == np.bool_
    assert d.dt_final > 0 and d.steps > 0
    assert out.limit_type == "coexist"
    # final recorded distance agrees with a direct computation
    direct = max(np.max(np.abs(out.u - target)), np.max(np.abs(out.v - target)))
    assert d.sup_dist[-1] == pytest.approx(direct, abs=1e-14)
    assert not d.anomaly_both_masses_decayed

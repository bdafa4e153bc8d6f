"""Global-dynamics classification by semi-trivial stability exponents.

With both single-species steady states u_d and v_D in hand, the exponents

    mu = spectral bound of L_v + diag(M - b u_d)   (invasion of v at (u_d, 0))
    nu = spectral bound of L_u + diag(m - c v_D)   (invasion of u at (0, v_D))

decide the weak-competition dynamics: both positive means a unique
coexistence state attracts everything positive, exactly one positive means
the corresponding invader takes over, and both numerically neutral is the
degenerate regime whose attractor is a line segment of steady states,
admissible only when the coefficient certificate (constant coefficients,
b c = b1 c1, b u_d = c1 v_D) holds.  Sign patterns outside these
alternatives cannot occur in exact arithmetic, so they are surfaced as
inconsistencies instead of being forced into a branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .competition import (
    AttractorRefs,
    BracketReport,
    ModelParams,
    SimulationOutcome,
    monotone_bracket,
    simulate,
)
from .errors import ConfigError, HypothesisViolation, UnsupportedRegime
from .profiles import init_rng, random_positive_profile
from .single_species import (
    SingleSpeciesProblem,
    SteadyStateResult,
    _positivized,
    solve_steady_state,
)
from .spectral import SpectralReport, spectral_bound

NEUTRAL_BAND_BASE = 1e-8  # scaled by 1 + sup|m| + sup|M|
STEADY_RESIDUAL_TOL = 1e-8
CERT_PRODUCT_TOL = 1e-8
CERT_STATE_TOL = 1e-6
CERT_CONST_SPREAD = 1e-10
PROBE_SIGN_TOL = 1e-10

CASES = (
    "both_unstable",
    "u_semitrivial_unstable",
    "v_semitrivial_unstable",
    "degenerate",
    "inconsistent_degenerate",
    "boundary_undetermined",
)
PREDICTIONS = {
    "both_unstable": "unique_coexistence_GAS",
    "u_semitrivial_unstable": "v_wins_GAS",
    "v_semitrivial_unstable": "u_wins_GAS",
    "degenerate": "continuum_convergence",
}
PREDICTED_LIMIT = {
    "unique_coexistence_GAS": "coexist",
    "v_wins_GAS": "v_wins",
    "u_wins_GAS": "u_wins",
    "continuum_convergence": "continuum_point",
}


@dataclass(frozen=True)
class StabilityExponents:
    mu: float
    nu: float
    mu_report: SpectralReport = field(repr=False)
    nu_report: SpectralReport = field(repr=False)


@dataclass(frozen=True)
class CertificateReport:
    constants_ok: bool
    product_gap: float  # |mean(b) mean(c) - mean(b1) mean(c1)|
    state_gap: float  # sup |b u_d - c1 v_D|
    state_scale: float  # sup |c1 v_D|
    holds: bool


@dataclass(frozen=True)
class ClassificationOutcome:
    case: str
    prediction: str | None
    exponents: StabilityExponents
    steady_u: SteadyStateResult
    steady_v: SteadyStateResult
    neutral_band: float
    certificate: CertificateReport | None


@dataclass
class VerificationReport:
    n_runs: int
    n_matched: int
    all_match: bool
    max_residual: float
    limit_types: list
    s_estimates: list
    final_dists: list
    bracket: BracketReport | None
    outcomes: list


@dataclass(frozen=True)
class ContinuumReport:
    s_values: np.ndarray
    residuals: np.ndarray
    max_residual: float
    certified: bool


@dataclass(frozen=True)
class ProbeReport:
    """Integral certificates tied to the exponent signs.

    i1 = integral of (c1 v_D^3 - b u_d v_D^2): nonpositive whenever mu <= 0.
    i2 = integral of (b1 u_d^3 - c v_D u_d^2): nonpositive whenever nu <= 0.
    combined = integral of (b u_d - c1 v_D)^2 (b u_d + c1 v_D): nonnegative
    always, and forced to zero in the degenerate alternative.
    """

    i1: float
    i2: float
    combined: float


def semitrivial_problem(op, growth, self_limit) -> SingleSpeciesProblem:
    """Single-species problem for one species with the other absent."""
    if np.all(self_limit == 1.0):
        return SingleSpeciesProblem(op, growth)

    def reaction(x, u, g=growth, s=self_limit):
        return u * (g - s * u)

    return SingleSpeciesProblem(op, growth, reaction=reaction)


def solve_semitrivials(params: ModelParams):
    """Both semi-trivial steady states; raises when either is missing."""
    su = solve_steady_state(semitrivial_problem(params.op_u, params.m, params.b1))
    sv = solve_steady_state(semitrivial_problem(params.op_v, params.M, params.c1))
    for name, res in (("u", su), ("v", sv)):
        if not res.exists:
            kind = "neutral" if res.degenerate else "negative"
            raise HypothesisViolation(
                f"semi-trivial state for species {name} is missing: growth "
                f"spectral bound lambda* = {res.lambda_star:.6e} is {kind}; "
                "the classification hypotheses require both single-species "
                "states to exist"
            )
    return su, sv


def neutral_band(params: ModelParams) -> float:
    return NEUTRAL_BAND_BASE * (
        1.0 + float(np.max(np.abs(params.M))) + float(np.max(np.abs(params.m)))
    )


def stability_exponents(
    params: ModelParams, steady_u: SteadyStateResult, steady_v: SteadyStateResult
) -> StabilityExponents:
    """Spectral exponents of the two semi-trivial linearizations."""
    for name, res, op, growth, self_limit in (
        ("u", steady_u, params.op_u, params.m, params.b1),
        ("v", steady_v, params.op_v, params.M, params.c1),
    ):
        if not res.exists:
            raise ConfigError(f"steady state for species {name} does not exist")
        check = float(
            np.max(np.abs(op.generator @ res.state + res.state * (growth - self_limit * res.state)))
        )
        if check > STEADY_RESIDUAL_TOL * (1.0 + float(np.max(res.state))):
            raise ConfigError(
                f"species {name} steady state residual {check:.3e} exceeds "
                f"{STEADY_RESIDUAL_TOL}; refusing to linearize there"
            )
    mu_rep = spectral_bound(params.op_v, params.M - params.b * steady_u.state)
    nu_rep = spectral_bound(params.op_u, params.m - params.c * steady_v.state)
    return StabilityExponents(
        mu=mu_rep.bound, nu=nu_rep.bound, mu_report=mu_rep, nu_report=nu_rep
    )


def _degenerate_certificate(params: ModelParams, u_d, v_D) -> CertificateReport:
    spreads_ok = True
    for f in (params.b, params.c, params.b1, params.c1):
        if float(np.max(f) - np.min(f)) > CERT_CONST_SPREAD * (1.0 + float(np.max(np.abs(f)))):
            spreads_ok = False
    product_gap = abs(
        float(np.mean(params.b)) * float(np.mean(params.c))
        - float(np.mean(params.b1)) * float(np.mean(params.c1))
    )
    target = params.c1 * v_D
    state_gap = float(np.max(np.abs(params.b * u_d - target)))
    state_scale = float(np.max(np.abs(target)))
    holds = (
        spreads_ok
        and product_gap <= CERT_PRODUCT_TOL
        and state_gap <= CERT_STATE_TOL * state_scale
    )
    return CertificateReport(
        constants_ok=spreads_ok,
        product_gap=product_gap,
        state_gap=state_gap,
        state_scale=state_scale,
        holds=holds,
    )


def classify(params: ModelParams) -> ClassificationOutcome:
    """Full classification pipeline for one parameter set."""
    if not (params.op_u.is_symmetric and params.op_v.is_symmetric):
        raise UnsupportedRegime(
            "classification requires symmetric kernel matrices; an "
            "asymmetric dispersal operator was supplied"
        )
    if not params.weak_competition:
        raise UnsupportedRegime(
            "strong competition (max b * max c > min b1 * min c1) is outside "
            "the supported classification regime"
        )
    steady_u, steady_v = solve_semitrivials(params)
    exps = stability_exponents(params, steady_u, steady_v)
    band = neutral_band(params)
    mu, nu = exps.mu, exps.nu

    certificate = None
    if mu > band and nu > band:
        case = "both_unstable"
    elif abs(mu) <= band and abs(nu) <= band:
        certificate = _degenerate_certificate(params, steady_u.state, steady_v.state)
        case = "degenerate" if certificate.holds else "inconsistent_degenerate"
    elif mu > band:
        case = "u_semitrivial_unstable"
    elif nu > band:
        case = "v_semitrivial_unstable"
    else:
        # both nonpositive with at least one strictly negative: impossible
        # for the exact operator under weak competition, so the discrete
        # signs are contradictory and no prediction is made
        case = "boundary_undetermined"
    return ClassificationOutcome(
        case=case,
        prediction=PREDICTIONS.get(case),
        exponents=exps,
        steady_u=steady_u,
        steady_v=steady_v,
        neutral_band=band,
        certificate=certificate,
    )


def attractor_refs(
    params: ModelParams,
    outcome: ClassificationOutcome,
    bracket_delta: float = 0.01,
    bracket_eps: float = 0.01,
    bracket_horizon: float = 400.0,
):
    """Reference attractors for the predicted regime.

    For the coexistence prediction the monotone bracket is run first and
    its midpoint becomes the coexistence candidate.
    """
    if outcome.prediction is None:
        raise ConfigError(f"case {outcome.case!r} carries no prediction to verify")
    bracket = None
    coexistence = None
    if outcome.prediction == "unique_coexistence_GAS":
        psi_plus = _positivized(outcome.exponents.mu_report.eigvec, params.grid.n)
        phi_plus = _positivized(outcome.exponents.nu_report.eigvec, params.grid.n)
        bracket = monotone_bracket(
            params,
            outcome.steady_u.state,
            outcome.steady_v.state,
            psi_plus,
            phi_plus,
            delta=bracket_delta,
            eps=bracket_eps,
            horizon=bracket_horizon,
        )
        coexistence = (
            0.5 * (bracket.upper[0] + bracket.lower[0]),
            0.5 * (bracket.upper[1] + bracket.lower[1]),
        )
    refs = AttractorRefs(
        u_d=outcome.steady_u.state,
        v_D=outcome.steady_v.state,
        coexistence=coexistence,
        degenerate=outcome.case == "degenerate",
        predicted=PREDICTED_LIMIT[outcome.prediction],
    )
    return refs, bracket


def verify_prediction(
    params: ModelParams,
    outcome: ClassificationOutcome,
    n_inits: int = 8,
    seed: int = 0,
    init_lo: float = 0.1,
    init_hi: float = 1.0,
    modes: int = 4,
    horizon: float = 200.0,
    bracket_delta: float = 0.01,
    bracket_eps: float = 0.01,
) -> VerificationReport:
    """Simulate a batch of random positive initial data and count how many
    runs reach the predicted attractor."""
    refs, bracket = attractor_refs(
        params, outcome, bracket_delta=bracket_delta, bracket_eps=bracket_eps
    )
    outcomes: list[SimulationOutcome] = []
    for k in range(n_inits):
        rng = init_rng(seed, k)
        u0 = random_positive_profile(rng, params.grid, init_lo, init_hi, modes)
        v0 = random_positive_profile(rng, params.grid, init_lo, init_hi, modes)
        outcomes.append(simulate(params, u0, v0, horizon=horizon, refs=refs))
    predicted = refs.predicted
    matched = sum(1 for o in outcomes if o.limit_type == predicted)
    return VerificationReport(
        n_runs=n_inits,
        n_matched=matched,
        all_match=matched == n_inits,
        max_residual=max((o.residual for o in outcomes), default=float("nan")),
        limit_types=[o.limit_type for o in outcomes],
        s_estimates=[o.s_estimate for o in outcomes],
        final_dists=[float(o.diagnostics.sup_dist[-1]) for o in outcomes],
        bracket=bracket,
        outcomes=outcomes,
    )


def continuum_check(
    params: ModelParams, u_d, v_D, s_values, certified: bool = True
) -> ContinuumReport:
    """Residuals of the full system at (s u_d, (1-s) v_D) for each s.

    Outside the degenerate certificate these points are not steady states;
    the report then carries certified=False and is advisory.
    """
    u_d = np.asarray(u_d, dtype=float)
    v_D = np.asarray(v_D, dtype=float)
    s_arr = np.asarray(list(s_values), dtype=float)
    if s_arr.size == 0 or np.any(s_arr < 0) or np.any(s_arr > 1):
        raise ConfigError("continuum check needs s values inside [0, 1]")
    res = np.empty(s_arr.size)
    for i, s in enumerate(s_arr):
        ru, rv = params.residuals(s * u_d, (1.0 - s) * v_D)
        res[i] = max(ru, rv)
    return ContinuumReport(
        s_values=s_arr,
        residuals=res,
        max_residual=float(np.max(res)),
        certified=certified,
    )


def nonexistence_probe(params: ModelParams, u_d, v_D) -> ProbeReport:
    """Integral sign certificates derived from the semi-trivial states."""
    u_d = np.asarray(u_d, dtype=float)
    v_D = np.asarray(v_D, dtype=float)
    g = params.grid
    bu = params.b * u_d
    c1v = params.c1 * v_D
    i1 = g.integrate(c1v * v_D**2 - bu * v_D**2)
    i2 = g.integrate(params.b1 * u_d**3 - params.c * v_D * u_d**2)
    combined = g.integrate((bu - c1v) ** 2 * (bu + c1v))
    return ProbeReport(i1=i1, i2=i2, combined=combined)

"""Single-species nonlocal logistic equation.

    u_t = (L u)(x) + f(x, u),    f(x, u) = u (growth(x) - u) by default,

with L an assembled dispersal operator.  The dynamics obey a dichotomy
driven by the spectral bound of L + diag(growth): positive bound means a
unique positive steady state attracting all nontrivial nonnegative data,
nonpositive bound means extinction.

The steady state is computed by explicit-Euler marching from a constant
upper solution and from a small multiple of the (positivized) top
eigenvector; the two monotone limits must agree, which doubles as a
consistency check on the discretization, and the common limit is then
polished by a few Newton steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericsError
from .operators import DispersalOperator
from .spectral import SpectralReport, spectral_bound

NEUTRAL_BAND = 1e-8  # spectral bounds inside +-band are reported degenerate
DT_SAFETY = 0.4
DT_MIN = 1e-7
DRIFT_TOL = 1e-10  # unit-window sup drift, relative to 1 + sup|u|
DRIFT_STREAK = 5
RESIDUAL_TOL = 1e-9  # marching also waits for this steady residual
LOWER_SEED_SCALE = 1e-3
LIMIT_AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class SingleSpeciesProblem:
    """Dispersal operator plus growth profile and reaction hook.

    reaction(x_nodes, u) must vanish at u = 0 and have strictly decreasing
    per-capita rate; the default logistic u * (growth - u) does.
    """

    op: DispersalOperator
    growth: np.ndarray
    reaction: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        g = np.asarray(self.growth, dtype=float)
        if g.shape != (self.op.grid.n,):
            raise ConfigError(
                f"growth length {g.shape} does not match grid n={self.op.grid.n}"
            )
        if not np.all(np.isfinite(g)):
            raise ConfigError("growth profile contains non-finite entries")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "growth", g)

    def f(self, u: np.ndarray) -> np.ndarray:
        if self.reaction is None:
            return u * (self.growth - u)
        return self.reaction(self.op.grid.nodes, u)

    def f_prime(self, u: np.ndarray) -> np.ndarray:
        """d f / d u at each node; central difference for custom hooks."""
        if self.reaction is None:
            return self.growth - 2.0 * u
        eps = 1e-6 * (1.0 + np.abs(u))
        return (self.f(u + eps) - self.f(u - eps)) / (2.0 * eps)

    def linearization_at_zero(self) -> np.ndarray:
        """Per-capita growth at vanishing density, the potential whose
        spectral bound decides persistence."""
        if self.reaction is None:
            return self.growth
        eps = 1e-8
        u = np.full(self.op.grid.n, eps)
        return self.f(u) / eps


@dataclass(frozen=True)
class SteadyStateResult:
    exists: bool
    state: np.ndarray | None
    lambda_star: float
    residual: float
    iterations: int
    degenerate: bool = False
    bracket_gap: float = float("nan")  # distance between the two monotone limits


@dataclass(frozen=True)
class MarchResult:
    times: np.ndarray
    final: np.ndarray
    min_history: np.ndarray  # min over the grid at each recorded time
    snapshots: list | None
    converged: bool
    steps: int
    dt_final: float
    dist_to_steady: float = float("nan")


def lambda_star(prob: SingleSpeciesProblem) -> float:
    """Spectral bound of the linearization at zero."""
    return growth_spectral_report(prob).bound


def growth_spectral_report(prob: SingleSpeciesProblem) -> SpectralReport:
    return spectral_bound(prob.op, prob.linearization_at_zero())


def _euler_dt(prob: SingleSpeciesProblem) -> float:
    op = prob.op
    cap = float(np.max(np.abs(prob.growth))) + 1.0
    local_bound = 0.0
    if op.mix < 1.0:
        local_bound = op.rate * (1.0 - op.mix) * 4.0 / op.grid.weight**2
    stiff = (
        op.rate * float(np.max(op.adiag))
        + local_bound
        + float(np.max(np.abs(prob.growth)))
        + 2.0 * cap
    )
    return DT_SAFETY / stiff


def _residual(prob: SingleSpeciesProblem, u: np.ndarray) -> float:
    return float(np.max(np.abs(prob.op.generator @ u + prob.f(u))))


def time_march(
    prob: SingleSpeciesProblem,
    u0: np.ndarray,
    horizon: float,
    keep_snapshots: bool = False,
    steady: SteadyStateResult | None = None,
) -> MarchResult:
    """Explicit Euler march with unit-time recording.

    Nonnegative data stay nonnegative; a negativity event halves the step,
    and a step below DT_MIN aborts.  Stops early once the unit-window sup
    drift stays below DRIFT_TOL * (1 + sup|u|) for DRIFT_STREAK windows and
    the steady residual is below RESIDUAL_TOL * (1 + sup|u|).
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (prob.op.grid.n,):
        raise ConfigError(f"initial data length {u0.shape} does not match grid")
    if not np.all(np.isfinite(u0)) or np.any(u0 < 0):
        raise ConfigError("initial data must be finite and nonnegative")
    if horizon <= 0:
        raise ConfigError(f"horizon must be positive, got {horizon}")

    gen = prob.op.generator
    u = u0.copy()
    dt = _euler_dt(prob)
    t = 0.0
    steps = 0
    times = [0.0]
    mins = [float(np.min(u))]
    snaps = [u.copy()] if keep_snapshots else None
    streak = 0
    converged = False

    while t < horizon - 1e-12:
        t_next = min(round(t) + 1.0, horizon)
        u_prev = u
        while t < t_next - 1e-12:
            step = min(dt, t_next - t)
            u_new = u + step * (gen @ u + prob.f(u))
            if np.any(u_new < 0):
                dt = dt / 2.0
                if dt < DT_MIN:
                    raise NumericsError(
                        f"time step collapsed below {DT_MIN} at t={t:.6g}"
                    )
                continue
            u = u_new
            t += step
            steps += 1
        times.append(t)
        mins.append(float(np.min(u)))
        if keep_snapshots:
            snaps.append(u.copy())
        scale = 1.0 + float(np.max(np.abs(u)))
        drift = float(np.max(np.abs(u - u_prev)))
        streak = streak + 1 if drift < DRIFT_TOL * scale else 0
        if streak >= DRIFT_STREAK and _residual(prob, u) < RESIDUAL_TOL * scale:
            converged = True
            break

    dist = float("nan")
    if steady is not None and steady.exists:
        dist = float(np.max(np.abs(u - steady.state)))
    return MarchResult(
        times=np.asarray(times),
        final=u,
        min_history=np.asarray(mins),
        snapshots=snaps,
        converged=converged,
        steps=steps,
        dt_final=dt,
        dist_to_steady=dist,
    )


def _positivized(vec: np.ndarray, n: int) -> np.ndarray:
    """Strictly positive surrogate for a principal eigenvector, sup-norm 1."""
    if vec is None:
        return np.ones(n)
    if np.all(vec > 0):
        return vec / np.max(vec)
    w = vec - np.min(vec)
    m = np.max(w)
    if m == 0.0:
        return np.ones(n)
    return (w + 0.05 * m) / (1.05 * m)


def _newton_polish(prob: SingleSpeciesProblem, u: np.ndarray, max_iters: int = 12):
    """Sharpen a near-steady state; falls back to the input on any trouble."""
    gen = prob.op.generator
    idx = np.arange(u.size)
    best = u
    best_res = _residual(prob, u)
    iters = 0
    for _ in range(max_iters):
        res_vec = gen @ best + prob.f(best)
        jac = gen.copy()
        jac[idx, idx] += prob.f_prime(best)
        try:
            delta = scipy.linalg.solve(jac, -res_vec)
        except scipy.linalg.LinAlgError:
            break
        trial = best + delta
        if np.any(trial <= 0) or not np.all(np.isfinite(trial)):
            break
        trial_res = _residual(prob, trial)
        iters += 1
        if trial_res >= best_res:
            break
        best, best_res = trial, trial_res
        if best_res < 1e-13 * (1.0 + float(np.max(best))):
            break
    return best, best_res, iters


def solve_steady_state(
    prob: SingleSpeciesProblem, march_horizon: float = 2000.0
) -> SteadyStateResult:
    """Unique positive steady state, or the extinction verdict.

    Positive spectral bound: marches from the constant upper solution
    max(growth) + 1 and from a small positive multiple of the top
    eigenvector; the monotone limits must agree within
    LIMIT_AGREEMENT_TOL * (1 + sup u) or a uniqueness diagnostic is raised.
    Bound inside the neutral band: reported degenerate, no branch forced.
    """
    report = growth_spectral_report(prob)
    lam = report.bound
    if abs(lam) <= NEUTRAL_BAND:
        return SteadyStateResult(
            exists=False,
            state=None,
            lambda_star=lam,
            residual=float("nan"),
            iterations=0,
            degenerate=True,
        )
    if lam < 0:
        return SteadyStateResult(
            exists=False,
            state=None,
            lambda_star=lam,
            residual=float("nan"),
            iterations=0,
        )

    n = prob.op.grid.n
    upper0 = np.full(n, float(np.max(np.abs(prob.growth))) + 1.0)
    lower0 = LOWER_SEED_SCALE * _positivized(report.eigvec, n)
    above = time_march(prob, upper0, march_horizon)
    below = time_march(prob, lower0, march_horizon)
    if not (above.converged and below.converged):
        raise NumericsError(
            f"steady-state marching did not settle within horizon {march_horizon}"
        )
    gap = float(np.max(np.abs(above.final - below.final)))
    scale = 1.0 + float(np.max(np.abs(above.final)))
    if gap > LIMIT_AGREEMENT_TOL * scale:
        raise NumericsError(
            "monotone limits from above and below disagree "
            f"(sup distance {gap:.3e}); uniqueness of the discrete steady "
            "state is in doubt"
        )
    common = 0.5 * (above.final + below.final)
    state, residual, polish_iters = _newton_polish(prob, common)
    state = state.copy()
    state.flags.writeable = False
    return SteadyStateResult(
        exists=True,
        state=state,
        lambda_star=lam,
        residual=residual,
        iterations=above.steps + below.steps + polish_iters,
        bracket_gap=gap,
    )

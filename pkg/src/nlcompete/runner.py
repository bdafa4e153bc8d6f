"""Subcommand orchestration: reports, delimited output, figures.

Every run writes a plain-text report plus CSV time series into the output
directory; figure rendering sits alongside and can be switched off in the
config.  All emitted bytes are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import figures
from .classifier import (
    classify,
    continuum_check,
    nonexistence_probe,
    solve_semitrivials,
    verify_prediction,
)
from .competition import AttractorRefs, simulate
from .config import ScenarioConfig
from .errors import HypothesisViolation, NumericsError, UnsupportedRegime
from .single_species import lambda_star, solve_steady_state
from .classifier import semitrivial_problem

RUN_SCHEMA = "# nlcompete run schema 1"
RUN_COLUMNS = "t,theta,eta,energy_E,l2_u,l2_v,sup_dist_to_attractor"
SWEEP_SCHEMA = "# nlcompete sweep schema 1"


def _fmt(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    return format(x, ".17g")


def _sig(x) -> str:
    x = float(x)
    if np.isnan(x):
        return "nan"
    return format(x, ".12g")


def write_run_csv(path: Path, diag) -> None:
    lines = [RUN_SCHEMA, RUN_COLUMNS]
    for i in range(diag.times.size):
        lines.append(
            ",".join(
                _fmt(col[i])
                for col in (
                    diag.times,
                    diag.theta,
                    diag.eta,
                    diag.energy,
                    diag.l2_u,
                    diag.l2_v,
                    diag.sup_dist,
                )
            )
        )
    path.write_text("\n".join(lines) + "\n")


class Reporter:
    def __init__(self, out_dir, quiet: bool):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.quiet = quiet
        self.lines: list[str] = []

    def say(self, line: str = ""):
        self.lines.append(line)
        if not self.quiet:
            print(line)

    def finish(self, name: str = "report.txt") -> Path:
        path = self.out / name
        path.write_text("\n".join(self.lines) + "\n")
        return path


def _describe(cfg: ScenarioConfig, rep: Reporter, seed: int):
    rep.say(f"config: {cfg.path}")
    rep.say(f"grid: n={cfg.grid_n} on ({_sig(cfg.grid_lo)}, {_sig(cfg.grid_hi)})")
    rep.say(
        f"regime: {cfg.regime}  kernels: u={cfg.kernel_u.family} {_sig(cfg.kernel_u.width)}"
        f", v={cfg.kernel_v.family} {_sig(cfg.kernel_v.width)}"
    )
    rep.say(
        f"rates: d={_sig(cfg.rate_d)} D={_sig(cfg.rate_D)}"
        f"  mix: alpha={_sig(cfg.alpha)} beta={_sig(cfg.beta)}"
    )
    rep.say(f"seed: {seed}")
    rep.say("")


def _steady_block(cfg: ScenarioConfig, rep: Reporter):
    grid = cfg.build_grid()
    params = cfg.build_params(grid)
    results = {}
    for name, op, growth, self_limit in (
        ("u", params.op_u, params.m, params.b1),
        ("v", params.op_v, params.M, params.c1),
    ):
        prob = semitrivial_problem(op, growth, self_limit)
        res = solve_steady_state(prob)
        results[name] = res
        if res.exists:
            rep.say(
                f"species {name}: lambda* = {_sig(res.lambda_star)}  steady state in "
                f"[{_sig(np.min(res.state))}, {_sig(np.max(res.state))}]  "
                f"residual {_sig(res.residual)}"
            )
        elif res.degenerate:
            rep.say(
                f"species {name}: lambda* = {_sig(res.lambda_star)} inside the "
                "neutral band; degenerate, no steady state reported"
            )
        else:
            rep.say(
                f"species {name}: lambda* = {_sig(res.lambda_star)} negative; "
                "extinction, no positive steady state"
            )
    return grid, params, results


def _write_steady_csv(path, grid, ud, vd):
    rows = ["x,u_d,v_D"]
    for i in range(grid.n):
        rows.append(f"{_fmt(grid.nodes[i])},{_fmt(ud[i])},{_fmt(vd[i])}")
    path.write_text("\n".join(rows) + "\n")


def run_steady(cfg: ScenarioConfig, out_dir, seed: int, quiet: bool) -> int:
    rep = Reporter(out_dir, quiet)
    rep.say("nlcompete steady")
    _describe(cfg, rep, seed)
    grid, params, results = _steady_block(cfg, rep)
    su, sv = results["u"], results["v"]
    ud = su.state if su.exists else np.full(grid.n, np.nan)
    vd = sv.state if sv.exists else np.full(grid.n, np.nan)
    _write_steady_csv(rep.out / "steady_states.csv", grid, ud, vd)
    if cfg.figures:
        figures.save_steady_states(
            rep.out / "steady_states.png",
            grid,
            ud if su.exists else None,
            vd if sv.exists else None,
        )
    rep.finish()
    return 0


def run_stability(cfg: ScenarioConfig, out_dir, seed: int, quiet: bool) -> int:
    from .classifier import stability_exponents

    rep = Reporter(out_dir, quiet)
    rep.say("nlcompete stability")
    _describe(cfg, rep, seed)
    params = cfg.build_params()
    su, sv = solve_semitrivials(params)
    rep.say(f"species u: lambda* = {_sig(su.lambda_star)}  residual {_sig(su.residual)}")
    rep.say(f"species v: lambda* = {_sig(sv.lambda_star)}  residual {_sig(sv.residual)}")
    exps = stability_exponents(params, su, sv)
    rep.say(f"mu = {_sig(exps.mu)}  (invasion exponent of v at (u_d, 0))")
    rep.say(f"nu = {_sig(exps.nu)}  (invasion exponent of u at (0, v_D))")
    if cfg.figures:
        figures.save_steady_states(
            rep.out / "steady_states.png", params.grid, su.state, sv.state
        )
    rep.finish()
    return 0


def run_simulate(cfg: ScenarioConfig, out_dir, seed: int, quiet: bool) -> int:
    rep = Reporter(out_dir, quiet)
    rep.say("nlcompete simulate")
    _describe(cfg, rep, seed)
    grid = cfg.build_grid()
    params = cfg.build_params(grid)

    refs = None
    try:
        su, sv = solve_semitrivials(params)
        refs = AttractorRefs(u_d=su.state, v_D=sv.state)
    except (HypothesisViolation, NumericsError, UnsupportedRegime) as exc:
        rep.say(f"note: no reference steady states ({exc}); raw simulation only")

    randomized = cfg.init_u.kind == "random" or cfg.init_v.kind == "random"
    n_runs = cfg.n_inits if randomized else 1
    finals = []
    diags = []
    for k in range(n_runs):
        u0, v0 = cfg.initial_pair(grid, stream=k)
        out = simulate(params, u0, v0, horizon=cfg.horizon, refs=refs)
        write_run_csv(rep.out / f"run_{k}.csv", out.diagnostics)
        rep.say(
            f"run {k}: t_final={_sig(out.t_final)} converged={out.converged} "
            f"residual={_sig(out.residual)} limit={out.limit_type}"
        )
        finals.append((out.u, out.v))
        diags.append(out.diagnostics)
    if cfg.figures:
        figures.save_diagnostics(rep.out / "diagnostics.png", diags)
        figures.save_final_states(rep.out / "final_states.png", grid, finals)
    rep.finish()
    return 0


def run_classify(cfg: ScenarioConfig, out_dir, seed: int, quiet: bool) -> int:
    """The full report path: classification, certificates, verification."""
    rep = Reporter(out_dir, quiet)
    rep.say("nlcompete classify")
    _describe(cfg, rep, seed)
    grid = cfg.build_grid()
    params = cfg.build_params(grid)
    outcome = classify(params)
    su, sv = outcome.steady_u, outcome.steady_v

    rep.say(f"lambda*_u = {_sig(su.lambda_star)}  lambda*_v = {_sig(sv.lambda_star)}")
    rep.say(f"mu = {_sig(outcome.exponents.mu)}  nu = {_sig(outcome.exponents.nu)}")
    rep.say(f"neutral band = {_sig(outcome.neutral_band)}")
    rep.say(f"case = {outcome.case}")
    rep.say(f"prediction = {outcome.prediction}")
    cert = outcome.certificate
    if cert is not None:
        rep.say(
            f"degenerate certificate: constants_ok={cert.constants_ok} "
            f"product_gap={_sig(cert.product_gap)} "
            f"state_gap={_sig(cert.state_gap)} (scale {_sig(cert.state_scale)}) "
            f"holds={cert.holds}"
        )
    probe = nonexistence_probe(params, su.state, sv.state)
    rep.say(
        f"probe: i1={_sig(probe.i1)} i2={_sig(probe.i2)} combined={_sig(probe.combined)}"
    )

    if outcome.case == "degenerate":
        cont = continuum_check(
            params,
            su.state,
            sv.state,
            np.linspace(0.0, 1.0, cfg.s_samples),
            certified=True,
        )
        rep.say(
            f"continuum residuals over {cfg.s_samples} s-samples: "
            f"max {_sig(cont.max_residual)}"
        )

    diags = []
    finals = []
    if cfg.verify and outcome.prediction is not None:
        ver = verify_prediction(
            params,
            outcome,
            n_inits=cfg.n_inits,
            seed=seed,
            init_lo=cfg.init_lo,
            init_hi=cfg.init_hi,
            modes=cfg.modes,
            horizon=cfg.horizon,
            bracket_delta=cfg.bracket_delta,
            bracket_eps=cfg.bracket_eps,
        )
        rep.say(
            f"verification: {ver.n_matched}/{ver.n_runs} runs reached the "
            f"predicted attractor; max residual {_sig(ver.max_residual)}"
        )
        if ver.bracket is not None:
            rep.say(
                f"bracket: sup distance {_sig(ver.bracket.sup_distance)} "
                f"certified={ver.bracket.certified} "
                f"(horizon used {_sig(ver.bracket.horizon_used)})"
            )
        if outcome.case == "degenerate":
            s_vals = ", ".join(_sig(s) for s in ver.s_estimates)
            rep.say(f"s estimates: [{s_vals}]")
        for k, o in enumerate(ver.outcomes):
            write_run_csv(rep.out / f"run_{k}.csv", o.diagnostics)
            diags.append(o.diagnostics)
            finals.append((o.u, o.v))

    _write_steady_csv(rep.out / "steady_states.csv", grid, su.state, sv.state)
    if cfg.figures:
        figures.save_steady_states(rep.out / "steady_states.png", grid, su.state, sv.state)
        if diags:
            figures.save_diagnostics(rep.out / "diagnostics.png", diags)
            figures.save_final_states(rep.out / "final_states.png", grid, finals)
    rep.finish()
    return 0


def run_sweep(cfg: ScenarioConfig, out_dir, seed: int, quiet: bool) -> int:
    """Classify (and optionally verify) every sweep cell; one CSV row each.

    Row errors are recorded in the 'error' column and do not stop the sweep.
    """
    rep = Reporter(out_dir, quiet)
    rep.say("nlcompete sweep")
    _describe(cfg, rep, seed)
    grid = cfg.build_grid()
    names, rows = cfg.sweep_rows()
    rep.say(f"axes: {', '.join(names)}  cells: {len(rows)}")

    results = []
    for row in rows:
        record = {"mu": np.nan, "nu": np.nan, "case": "", "prediction": "", "match_rate": np.nan, "error": ""}
        try:
            params = cfg.build_params(grid, overrides=row)
            outcome = classify(params)
            record["mu"] = outcome.exponents.mu
            record["nu"] = outcome.exponents.nu
            record["case"] = outcome.case
            record["prediction"] = outcome.prediction or ""
            if cfg.verify and outcome.prediction is not None:
                ver = verify_prediction(
                    params,
                    outcome,
                    n_inits=cfg.n_inits,
                    seed=seed,
                    init_lo=cfg.init_lo,
                    init_hi=cfg.init_hi,
                    modes=cfg.modes,
                    horizon=cfg.horizon,
                )
                record["match_rate"] = ver.n_matched / ver.n_runs
        except (HypothesisViolation, UnsupportedRegime, NumericsError) as exc:
            record["error"] = str(exc)
        results.append((row, record))

    csv_path = rep.out / "sweep.csv"
    with csv_path.open("w", newline="") as fh:
        fh.write(SWEEP_SCHEMA + "\n")
        writer = csv.writer(fh)
        writer.writerow(list(names) + ["mu", "nu", "case", "prediction", "match_rate", "error"])
        for row, record in results:
            writer.writerow(
                [_fmt(row[n]) for n in names]
                + [
                    _fmt(record["mu"]),
                    _fmt(record["nu"]),
                    record["case"],
                    record["prediction"],
                    _fmt(record["match_rate"]),
                    record["error"],
                ]
            )
    rep.say(f"wrote {csv_path.name} with {len(results)} rows")

    if cfg.figures and len(names) == 2:
        from .classifier import CASES

        case_names = list(CASES) + ["error"]
        code = {name: i for i, name in enumerate(case_names)}
        xs, ys = cfg.sweep[names[0]], cfg.sweep[names[1]]
        xi = {v: i for i, v in enumerate(xs)}
        yi = {v: i for i, v in enumerate(ys)}
        case_grid = np.full((len(ys), len(xs)), np.nan)
        for row, record in results:
            label = record["case"] if record["case"] else "error"
            case_grid[yi[row[names[1]]], xi[row[names[0]]]] = code[label]
        figures.save_sweep_map(
            rep.out / "sweep_map.png", names[0], xs, names[1], ys, case_grid, case_names
        )
    rep.finish()
    return 0

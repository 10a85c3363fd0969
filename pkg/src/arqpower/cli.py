"""Command-line front end.

Single-point evaluations and simulation results are emitted as JSON,
sweeps as annotated CSV. SNR values cross the CLI boundary in dB and are
converted to linear power exactly once, here; the plain --power flag of
``epsilon`` is linear. Exit codes: 0 success, 2 usage error, 3 numerical
failure (non-convergence or infeasibility).
"""

from __future__ import annotations

import json
import math
import sys

import click

from . import __version__
from .arq import PowerPolicy, evaluate
from .blocklength import CodeSpec, error_probability_result
from .fading import QuadratureConvergenceError, QuadratureSpec
from .optimize import InfeasibleProblemError, OptimizationProblem, optimize
from .simulate import SimConfig
from .simulate import run as run_simulation
from .sweeps import POLICY_MODES, SWEEP_KINDS, run_sweep

_EXIT_NUMERIC = 3


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _emit_json(payload: dict, output: str | None) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", output)


def _numeric_failure(payload: dict, output: str | None) -> None:
    _emit_json({"error": payload}, output)
    sys.exit(_EXIT_NUMERIC)


def _quad_spec(rel_tol: float, abs_tol: float, max_subdivisions: int) -> QuadratureSpec:
    try:
        return QuadratureSpec(rel_tol=rel_tol, abs_tol=abs_tol,
                              max_subdivisions=max_subdivisions)
    except ValueError as exc:
        raise click.UsageError(str(exc))


_QUAD_OPTIONS = [
    click.option("--rel-tol", type=float, default=1e-9, show_default=True,
                 help="Quadrature relative tolerance."),
    click.option("--abs-tol", type=float, default=1e-12, show_default=True,
                 help="Quadrature absolute tolerance."),
    click.option("--max-subdivisions", type=click.IntRange(min=1), default=2000,
                 show_default=True, help="Quadrature subdivision budget."),
]


def _add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@click.group()
@click.version_option(version=__version__, prog_name="arqpower")
def main():
    """Finite-blocklength outage and power allocation for Type-I ARQ.

    \b
    Examples:
      arqpower epsilon --length 50 --rate 1 --power 10
      arqpower optimize -M 2 --snr-db 20 --length 50 --rate 1
      arqpower sweep --kind outage-vs-snr -M 2 --snr-stop 40 -o sweep.csv
      arqpower simulate --power-db 10 --power-db 10 --trials 100000 --seed 7
    """


@main.command()
@click.option("--length", type=click.IntRange(min=1), required=True,
              help="Codeword length L in channel uses.")
@click.option("--rate", type=click.FloatRange(min=0, min_open=True), required=True,
              help="Code rate in npcu.")
@click.option("--power", type=click.FloatRange(min=0, min_open=True), required=True,
              help="Transmit power (linear SNR, unit noise).")
@_add_options(_QUAD_OPTIONS)
@click.option("--text", "as_text", is_flag=True, help="Plain-text output instead of JSON.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write to file instead of stdout.")
def epsilon(length, rate, power, rel_tol, abs_tol, max_subdivisions, as_text, output):
    """Per-round decoding error probability for one (L, R, P) point."""
    quad = _quad_spec(rel_tol, abs_tol, max_subdivisions)
    code = CodeSpec(length=length, rate=rate)
    try:
        res = error_probability_result(code, power, spec=quad)
    except QuadratureConvergenceError as exc:
        _numeric_failure({
            "kind": "quadrature-non-convergence",
            "message": str(exc),
            "estimate": exc.estimate,
            "error_bound": exc.error_bound,
        }, output)
        return
    if as_text:
        _emit(f"epsilon = {res.value!r} (quadrature error ~ {res.error:.3e})\n", output)
    else:
        _emit_json({
            "length": length,
            "rate": rate,
            "power": power,
            "epsilon": res.value,
            "quad_error": res.error,
            "subdivisions": res.subdivisions,
        }, output)


_SOLVER_OPTIONS = [
    click.option("--multistarts", type=click.IntRange(min=0), default=16,
                 show_default=True, help="Number of random solver starts."),
    click.option("--xtol", type=float, default=1e-6, show_default=True,
                 help="Simplex convergence tolerance (log-power coordinates)."),
    click.option("--max-evals", type=click.IntRange(min=1), default=10_000,
                 show_default=True, help="Objective evaluation budget per start."),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="Seed for the random solver starts."),
]


@main.command("optimize")
@click.option("--max-rounds", "-M", type=click.IntRange(min=1), required=True,
              help="Maximum number of transmissions M.")
@click.option("--snr-db", type=float, required=True,
              help="Average-power constraint in dB (10 log10 of linear power).")
@click.option("--length", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--rate", type=click.FloatRange(min=0, min_open=True), default=1.0,
              show_default=True)
@click.option("--asymptotic", is_flag=True,
              help="Use the long-codeword error model (length is ignored).")
@_add_options(_SOLVER_OPTIONS)
@_add_options(_QUAD_OPTIONS)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def optimize_cmd(max_rounds, snr_db, length, rate, asymptotic,
                 multistarts, xtol, max_evals, seed,
                 rel_tol, abs_tol, max_subdivisions, output):
    """Optimal per-round powers at a fixed average power."""
    quad = _quad_spec(rel_tol, abs_tol, max_subdivisions)
    problem = OptimizationProblem(
        max_rounds=max_rounds,
        avg_power=10.0 ** (snr_db / 10.0),
        code=CodeSpec(length=length, rate=rate),
        quad=quad,
        asymptotic=asymptotic,
        multistarts=multistarts,
        xtol=xtol,
        max_evals_per_start=max_evals,
        seed=seed,
    )
    try:
        result = optimize(problem)
    except (InfeasibleProblemError, QuadratureConvergenceError) as exc:
        _numeric_failure({"kind": type(exc).__name__, "message": str(exc)}, output)
        return
    payload = {
        "max_rounds": max_rounds,
        "snr_db": snr_db,
        "length": "asymptotic" if asymptotic else length,
        "rate": rate,
        "powers": list(result.policy.powers),
        "powers_db": list(result.policy.snr_db),
        "outage": result.outage,
        "avg_power_residual": result.residual,
        "evaluations": result.evaluations,
        "converged": result.converged,
    }
    if not result.converged:
        _numeric_failure({
            "kind": "unconverged",
            "message": "solver did not converge; best-effort result attached",
            "result": payload,
        }, output)
        return
    _emit_json(payload, output)


@main.command()
@click.option("--kind", type=click.Choice(SWEEP_KINDS), required=True)
@click.option("--mode", type=click.Choice(POLICY_MODES), default="optimal",
              show_default=True)
@click.option("--max-rounds", "-M", type=click.IntRange(min=1), default=2,
              show_default=True)
@click.option("--length", type=click.IntRange(min=1), default=50, show_default=True,
              help="Codeword length for SNR sweeps.")
@click.option("--rate", type=click.FloatRange(min=0, min_open=True), default=1.0,
              show_default=True)
@click.option("--asymptotic", is_flag=True,
              help="Long-codeword model for SNR sweeps (length column reads 'asymptotic').")
@click.option("--snr-start", type=float, default=0.0, show_default=True)
@click.option("--snr-stop", type=float, default=40.0, show_default=True)
@click.option("--snr-step", type=float, default=1.0, show_default=True)
@click.option("--length-start", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--length-stop", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--length-step", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--snr-db", type=float, default=10.0, show_default=True,
              help="Fixed average power (dB) for length sweeps.")
@_add_options(_SOLVER_OPTIONS)
@_add_options(_QUAD_OPTIONS)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="CSV destination; stdout when omitted.")
def sweep(kind, mode, max_rounds, length, rate, asymptotic,
          snr_start, snr_stop, snr_step, length_start, length_stop, length_step,
          snr_db, multistarts, xtol, max_evals, seed,
          rel_tol, abs_tol, max_subdivisions, output):
    """Sweep a grid and emit a CSV table (one M/L/mode configuration per file)."""
    quad = _quad_spec(rel_tol, abs_tol, max_subdivisions)
    if snr_step <= 0 or length_step <= 0:
        raise click.UsageError("grid steps must be positive")
    if snr_stop < snr_start or length_stop < length_start:
        raise click.UsageError("grid stop must not precede start")

    if kind.endswith("-vs-snr"):
        n = int(math.floor((snr_stop - snr_start) / snr_step + 1e-9)) + 1
        grid_kwargs = {"snr_grid_db": [snr_start + i * snr_step for i in range(n)]}
    else:
        grid_kwargs = {
            "length_grid": list(range(length_start, length_stop + 1, length_step)),
            "snr_db": snr_db,
        }

    try:
        table = run_sweep(
            kind, mode, max_rounds=max_rounds, rate=rate, length=length,
            asymptotic=asymptotic, quad=quad, multistarts=multistarts,
            xtol=xtol, max_evals=max_evals, seed=seed, **grid_kwargs,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if output:
        table.write_csv_path(output)
    else:
        table.write_csv(sys.stdout)


@main.command()
@click.option("--power-db", "powers_db", type=float, multiple=True, required=True,
              help="Per-round transmit power in dB; repeat once per round.")
@click.option("--length", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--rate", type=click.FloatRange(min=0, min_open=True), default=1.0,
              show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=1_000_000,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--asymptotic", is_flag=True,
              help="Round failure is the long-codeword threshold indicator.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker threads (capped by ARQPOWER_MAX_WORKERS).")
@click.option("--check", "check", is_flag=True,
              help="Also compute analytic values and z-scores.")
@_add_options(_QUAD_OPTIONS)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def simulate(powers_db, length, rate, trials, seed, asymptotic, workers, check,
             rel_tol, abs_tol, max_subdivisions, output):
    """Monte Carlo packet simulation; deterministic for a given seed."""
    quad = _quad_spec(rel_tol, abs_tol, max_subdivisions)
    config = SimConfig(
        policy=PowerPolicy.from_db(powers_db),
        code=CodeSpec(length=length, rate=rate),
        trials=trials,
        seed=seed,
        asymptotic=asymptotic,
    )
    stats = run_simulation(config, workers=workers)
    payload = {
        "config": {
            "powers_db": list(powers_db),
            "powers": list(config.policy.powers),
            "length": length,
            "rate": rate,
            "trials": trials,
            "seed": seed,
            "asymptotic": asymptotic,
        },
        "stats": stats.to_dict(),
    }
    if check:
        try:
            outcome = evaluate(config.policy, config.code, spec=quad,
                               asymptotic=asymptotic)
        except QuadratureConvergenceError as exc:
            _numeric_failure({"kind": "quadrature-non-convergence",
                              "message": str(exc)}, output)
            return
        n = trials

        def z_score(estimate, truth, se):
            if se is None or se == 0.0:
                return 0.0 if estimate == truth else math.inf
            return (estimate - truth) / se

        analytic = {
            "outage": outcome.outage,
            "phi": list(outcome.chain),
            "energy": outcome.energy,
            "channel_uses": outcome.channel_uses,
            "avg_power": outcome.avg_power,
        }
        z = {
            "outage": z_score(
                stats.outage, outcome.outage,
                math.sqrt(outcome.outage * (1 - outcome.outage) / n) or None),
            "phi": [
                z_score(stats.phi_hat[m], outcome.chain[m],
                        math.sqrt(outcome.chain[m] * (1 - outcome.chain[m]) / n) or None)
                for m in range(len(outcome.chain))
            ],
            "energy": z_score(stats.energy, outcome.energy, stats.energy_se),
            "channel_uses": z_score(stats.channel_uses, outcome.channel_uses,
                                    stats.channel_uses_se),
            "avg_power": z_score(stats.avg_power, outcome.avg_power,
                                 stats.avg_power_se),
        }
        payload["analytic"] = analytic
        payload["z_scores"] = z
    _emit_json(payload, output)


if __name__ == "__main__":
    main()

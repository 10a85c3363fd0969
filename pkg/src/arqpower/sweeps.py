"""Grid sweeps over SNR or codeword length, emitted as annotated CSV.

Each table carries a '#'-prefixed metadata block sufficient to reproduce
every row, then an RFC-4180-style header and data rows. One file holds
one (kind, max_rounds, length, mode) configuration; figure tooling
overlays several files.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .arq import PowerPolicy, average_power_from_chain, failure_chain
from .blocklength import CodeSpec
from .fading import (
    DEFAULT_QUADRATURE,
    RAYLEIGH,
    FadingModel,
    QuadratureConvergenceError,
    QuadratureSpec,
)
from .optimize import (
    InfeasibleProblemError,
    OptimizationProblem,
    high_snr_policy_m2,
    optimize,
    uniform_policy,
)

__all__ = ["SWEEP_KINDS", "POLICY_MODES", "SweepTable", "run_sweep", "read_sweep_csv"]

SWEEP_KINDS = (
    "outage-vs-snr",
    "powers-vs-snr",
    "outage-vs-length",
    "powers-vs-length",
)
POLICY_MODES = ("optimal", "uniform", "closed-form")


@dataclass
class SweepTable:
    meta: dict
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def write_csv(self, stream) -> None:
        for key, value in self.meta.items():
            stream.write(f"# {key}: {value}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_format_cell(c) for c in row])

    def write_csv_path(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)


def _format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


def _parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        return text


def read_sweep_csv(path) -> SweepTable:
    """Parse a sweep CSV back into meta, columns and typed rows."""
    meta = {}
    with open(path, newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.reader(io.StringIO("".join(data_lines)))
    rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no header row found")
    columns = rows[0]
    return SweepTable(
        meta=meta,
        columns=columns,
        rows=[[_parse_cell(c) for c in row] for row in rows[1:]],
    )


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _columns(kind: str, max_rounds: int, with_closed_form: bool) -> list[str]:
    x_col = "snr_db" if kind.endswith("-vs-snr") else "length"
    cols = [x_col, "outage"]
    cols += [f"p{m}_db" for m in range(1, max_rounds + 1)]
    if with_closed_form:
        cols += ["cf_p1_db", "cf_p2_db"]
    cols += ["avg_power_residual", "converged"]
    return cols


def _policy_row(mode: str, avg_power: float, code: CodeSpec,
                model: FadingModel, quad: QuadratureSpec, asymptotic: bool,
                max_rounds: int, solver: dict, warm_start):
    """(policy, outage, residual, converged, next_warm_start) for one point."""
    if mode == "optimal":
        problem = OptimizationProblem(
            max_rounds=max_rounds, avg_power=avg_power, code=code,
            model=model, quad=quad, asymptotic=asymptotic, **solver,
        )
        extra = (warm_start,) if warm_start is not None else ()
        result = optimize(problem, extra_starts=extra)
        return (result.policy, result.outage, result.residual,
                result.converged, result.policy.powers[:-1])
    if mode == "uniform":
        policy = uniform_policy(avg_power, max_rounds)
    else:  # closed-form
        policy = PowerPolicy(high_snr_policy_m2(avg_power, code.rate))
    chain = failure_chain(policy, code, model, quad, asymptotic)
    residual = abs(average_power_from_chain(policy, chain) - avg_power) / avg_power
    return policy, chain[-1], residual, True, None


def run_sweep(kind: str, mode: str = "optimal", *,
              max_rounds: int = 2,
              rate: float = 1.0,
              length: int = 50,
              asymptotic: bool = False,
              snr_grid_db=None,
              length_grid=None,
              snr_db: float = 10.0,
              model: FadingModel = RAYLEIGH,
              quad: QuadratureSpec = DEFAULT_QUADRATURE,
              multistarts: int = 16,
              xtol: float = 1e-6,
              max_evals: int = 10_000,
              seed: int = 0,
              log=None) -> SweepTable:
    """Run one sweep; failed points become nan rows and the run continues.

    SNR sweeps iterate ``snr_grid_db``; length sweeps iterate
    ``length_grid`` at fixed ``snr_db``. In optimal mode each point warm
    starts from the previous solution in addition to the usual starts.
    """
    if kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {kind!r}")
    if mode not in POLICY_MODES:
        raise ValueError(f"unknown policy mode {mode!r}")
    if mode == "closed-form" and max_rounds != 2:
        raise ValueError("closed-form mode is defined for max_rounds=2 only")
    over_snr = kind.endswith("-vs-snr")
    if over_snr and snr_grid_db is None:
        raise ValueError("snr sweep needs snr_grid_db")
    if not over_snr:
        if length_grid is None:
            raise ValueError("length sweep needs length_grid")
        if asymptotic:
            raise ValueError("length sweeps are incompatible with asymptotic mode")

    solver = dict(multistarts=multistarts, xtol=xtol,
                  max_evals_per_start=max_evals, seed=seed)
    with_cf = kind == "powers-vs-snr" and max_rounds == 2
    columns = _columns(kind, max_rounds, with_cf)

    meta = {
        "tool": f"arqpower {__version__}",
        "kind": kind,
        "mode": mode,
        "max_rounds": max_rounds,
        "rate": repr(float(rate)),
        "length": "asymptotic" if asymptotic else length,
        "model": model.name,
        "multistarts": multistarts,
        "xtol": repr(xtol),
        "max_evals_per_start": max_evals,
        "solver_seed": seed,
        "quad_rel_tol": repr(quad.rel_tol),
        "quad_abs_tol": repr(quad.abs_tol),
        "quad_max_subdivisions": quad.max_subdivisions,
    }
    if over_snr:
        grid = [float(v) for v in snr_grid_db]
        meta["snr_grid_db"] = " ".join(repr(v) for v in grid)
    else:
        grid = [int(v) for v in length_grid]
        meta["length_grid"] = " ".join(str(v) for v in grid)
        meta["snr_db"] = repr(float(snr_db))

    table = SweepTable(meta=meta, columns=columns)
    warm_start = None
    for x in grid:
        if over_snr:
            point_db = x
            code = CodeSpec(length=length, rate=rate)
        else:
            point_db = snr_db
            code = CodeSpec(length=x, rate=rate)
        avg_power = _db_to_linear(point_db)
        try:
            policy, outage_val, residual, converged, warm_start = _policy_row(
                mode, avg_power, code, model, quad, asymptotic,
                max_rounds, solver, warm_start,
            )
            row = [x, outage_val]
            row += [10.0 * math.log10(p) for p in policy.powers]
            if with_cf:
                cf = high_snr_policy_m2(avg_power, rate)
                row += [10.0 * math.log10(p) for p in cf]
            row += [residual, converged]
        except (InfeasibleProblemError, QuadratureConvergenceError) as exc:
            print(f"sweep point {x}: {exc}", file=log or sys.stderr)
            row = [x, math.nan]
            row += [math.nan] * max_rounds
            if with_cf:
                row += [math.nan, math.nan]
            row += [math.nan, False]
            warm_start = None
        table.rows.append(row)
    return table

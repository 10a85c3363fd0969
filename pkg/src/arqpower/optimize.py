"""Outage-minimizing power allocation under an average-power constraint.

The constraint fixes the last round's power once the earlier ones are
chosen (it enters the average linearly), so the search runs over the
first M-1 powers only, in log coordinates, with a multistart simplex
local search. Warm starts come from the uniform policy and, for M = 2,
from the high-SNR closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .arq import PowerPolicy, average_power_from_chain, failure_chain
from .blocklength import CodeSpec, asymptotic_error, error_probability
from .fading import DEFAULT_QUADRATURE, RAYLEIGH, FadingModel, QuadratureSpec

__all__ = [
    "OptimizationProblem",
    "OptimizationResult",
    "InfeasibleProblemError",
    "solve_last_power",
    "optimize",
    "uniform_policy",
    "high_snr_policy_m2",
    "high_snr_outage_m2",
    "diversity_estimate",
]

# Floor for per-round error probabilities inside the log-domain objective,
# so an underflowed quadrature result cannot produce log(0).
_EPS_FLOOR = 1e-320

# Infeasible points get a large finite penalty instead of +inf: an all-inf
# simplex makes the Nelder-Mead termination test (inf - inf) undecidable
# and burns the whole evaluation budget. Any feasible log-outage is far
# below _PENALTY, so infeasible points still never win; the overshoot term
# gives the simplex a slope back toward the feasible region.
_PENALTY = 1e5

_RESIDUAL_TOL = 1e-6


class InfeasibleProblemError(RuntimeError):
    """No feasible policy was found from any start."""


@dataclass(frozen=True)
class OptimizationProblem:
    """Outage minimization at fixed average power.

    ``start_bounds`` gives the random-start range as multiples of the
    average power; starts are drawn log-uniformly per coordinate.
    """

    max_rounds: int
    avg_power: float
    code: CodeSpec
    model: FadingModel = RAYLEIGH
    quad: QuadratureSpec = DEFAULT_QUADRATURE
    asymptotic: bool = False
    multistarts: int = 16
    xtol: float = 1e-6
    max_evals_per_start: int = 10_000
    start_bounds: tuple[float, float] = (1e-2, 10.0)
    seed: int = 0

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if not (self.avg_power > 0 and math.isfinite(self.avg_power)):
            raise ValueError("avg_power must be positive and finite")
        if self.multistarts < 0:
            raise ValueError("multistarts must be non-negative")
        lo, hi = self.start_bounds
        if not (0 < lo < hi):
            raise ValueError("start_bounds must satisfy 0 < lo < hi")


@dataclass(frozen=True)
class OptimizationResult:
    policy: PowerPolicy
    outage: float
    residual: float
    evaluations: int
    converged: bool


def _round_error(power: float, problem: OptimizationProblem) -> float:
    if problem.asymptotic:
        return asymptotic_error(problem.code.rate, power, problem.model)
    return error_probability(problem.code, power, problem.model, problem.quad)


def solve_last_power(first_powers, avg_power: float, code: CodeSpec,
                     model: FadingModel = RAYLEIGH,
                     spec: QuadratureSpec | None = None,
                     asymptotic: bool = False) -> float | None:
    """Last-round power that meets the average-power constraint exactly.

    The failure chain through round M-1 depends only on the first M-1
    powers, and the last power enters the constraint linearly, so it can
    be eliminated in closed form. Returns None when the required power is
    non-positive or when the chain has already collapsed to zero (earlier
    rounds always succeed, so no last-round power can move the average).
    """
    if not (avg_power > 0 and math.isfinite(avg_power)):
        raise ValueError("avg_power must be positive and finite")
    first_powers = tuple(float(p) for p in first_powers)
    if any(not (p > 0 and math.isfinite(p)) for p in first_powers):
        raise ValueError("powers must be positive and finite")
    spec = spec or DEFAULT_QUADRATURE

    chain = [1.0]
    for p in first_powers:
        if asymptotic:
            e = asymptotic_error(code.rate, p, model)
        else:
            e = error_probability(code, p, model, spec)
        chain.append(chain[-1] * e)
    # chain now holds Phi_0 .. Phi_{M-1}
    phi_last = chain[-1]
    if phi_last <= 0.0:
        return None
    numerator = avg_power * math.fsum(chain) - math.fsum(
        p * phi for p, phi in zip(first_powers, chain[:-1])
    )
    last = numerator / phi_last
    if not (last > 0 and math.isfinite(last)):
        return None
    return last


def uniform_policy(avg_power: float, max_rounds: int) -> PowerPolicy:
    """Every round at the average power; meets the constraint identically."""
    if not (avg_power > 0 and math.isfinite(avg_power)):
        raise ValueError("avg_power must be positive and finite")
    return PowerPolicy((avg_power,) * max_rounds)


def high_snr_policy_m2(avg_power: float, rate: float) -> tuple[float, float]:
    """High-SNR optimal two-round allocation: (2*pi/3, 2*pi^2/(9*theta))."""
    if not (avg_power > 0 and rate > 0):
        raise ValueError("avg_power and rate must be positive")
    threshold = math.expm1(rate)
    return (2.0 * avg_power / 3.0,
            2.0 * avg_power * avg_power / (9.0 * threshold))


def high_snr_outage_m2(avg_power: float, rate: float) -> float:
    """High-SNR two-round outage under the optimal allocation: 27*theta^3/(4*pi^3)."""
    if not (avg_power > 0 and rate > 0):
        raise ValueError("avg_power and rate must be positive")
    threshold = math.expm1(rate)
    return 27.0 * threshold ** 3 / (4.0 * avg_power ** 3)


def _policy_from_free(z, problem: OptimizationProblem) -> PowerPolicy | None:
    """Full feasible policy from log-space free powers, or None."""
    first = tuple(float(p) for p in np.exp(z))
    if any(not (p > 0 and math.isfinite(p)) for p in first):
        return None
    last = solve_last_power(first, problem.avg_power, problem.code,
                            problem.model, problem.quad, problem.asymptotic)
    if last is None:
        return None
    return PowerPolicy(first + (last,))


def optimize(problem: OptimizationProblem, extra_starts=()) -> OptimizationResult:
    """Minimize the packet outage subject to the average-power constraint.

    ``extra_starts`` may hold additional first-(M-1)-power warm starts,
    e.g. the previous solution when sweeping over a grid. Raises
    InfeasibleProblemError if every start is infeasible.
    """
    pi = problem.avg_power
    m = problem.max_rounds

    if m == 1:
        policy = PowerPolicy((pi,))
        chain = failure_chain(policy, problem.code, problem.model,
                              problem.quad, problem.asymptotic)
        return OptimizationResult(
            policy=policy,
            outage=chain[-1],
            residual=abs(average_power_from_chain(policy, chain) - pi) / pi,
            evaluations=1,
            converged=True,
        )

    dim = m - 1
    evals = [0]

    def objective(z):
        evals[0] += 1
        first = np.exp(z)
        if not np.all(np.isfinite(first)) or np.any(first <= 0):
            return 2.0 * _PENALTY
        log_outage = 0.0
        phi = 1.0
        sum_phi = 0.0
        sum_p_phi = 0.0
        for p in first:
            sum_phi += phi
            sum_p_phi += p * phi
            e = _round_error(float(p), problem)
            log_outage += math.log(max(e, _EPS_FLOOR))
            phi *= e
        sum_phi += phi
        if phi <= 0.0:
            return 2.0 * _PENALTY
        last = (pi * sum_phi - sum_p_phi) / phi
        if not math.isfinite(last):
            return 2.0 * _PENALTY
        if last <= 0.0:
            return _PENALTY * (1.0 + min(-last / pi, 1e3))
        e_last = _round_error(last, problem)
        return log_outage + math.log(max(e_last, _EPS_FLOOR))

    starts = [np.full(dim, math.log(pi))]
    if m == 2:
        starts.append(np.array([math.log(high_snr_policy_m2(pi, problem.code.rate)[0])]))
    for ws in extra_starts:
        ws = np.asarray(ws, dtype=float)
        if ws.shape == (dim,) and np.all(ws > 0):
            starts.append(np.log(ws))
    rng = np.random.default_rng(problem.seed)
    lo, hi = problem.start_bounds
    for _ in range(problem.multistarts):
        starts.append(math.log(pi) + rng.uniform(math.log(lo), math.log(hi), size=dim))

    # The log-outage objective carries quadrature jitter of order
    # max_rounds * rel_tol; fatol must clear it or the simplex never
    # registers convergence. The diameter criterion (xatol) binds last.
    fatol = max(1e-7, 100.0 * m * problem.quad.rel_tol)

    candidates = []
    for z0 in starts:
        with np.errstate(invalid="ignore"):
            res = minimize(
                objective, z0, method="Nelder-Mead",
                options={
                    "xatol": problem.xtol,
                    "fatol": fatol,
                    "maxfev": problem.max_evals_per_start,
                },
            )
        if not math.isfinite(res.fun) or res.fun >= _PENALTY:
            continue
        policy = _policy_from_free(res.x, problem)
        if policy is None:
            continue
        candidates.append((res.fun, policy.powers, policy, bool(res.success)))

    if not candidates:
        raise InfeasibleProblemError(
            f"no feasible policy found for M={m} at average power {pi!r}"
        )
    fun, _, policy, success = min(candidates, key=lambda c: (c[0], c[1]))

    chain = failure_chain(policy, problem.code, problem.model,
                          problem.quad, problem.asymptotic)
    residual = abs(average_power_from_chain(policy, chain) - pi) / pi
    return OptimizationResult(
        policy=policy,
        outage=chain[-1],
        residual=residual,
        evaluations=evals[0],
        converged=success and residual <= _RESIDUAL_TOL,
    )


def diversity_estimate(curve) -> float:
    """High-SNR slope of -log(outage) against log(avg power).

    Fits the top (highest-power) half of the curve by least squares, since
    the slope is an asymptotic quantity and low-power points bias it.
    Points with zero outage (underflow) are dropped with a warning.
    """
    points = [(float(p), float(o)) for p, o in curve]
    if len(points) < 3:
        raise ValueError("diversity fit needs at least 3 points")
    powers = [p for p, _ in points]
    if any(b <= a for a, b in zip(powers, powers[1:])):
        raise ValueError("power values must be strictly increasing")
    if any(o < 0 for _, o in points):
        raise ValueError("outage values must be non-negative")
    surviving = [(p, o) for p, o in points if o > 0]
    if len(surviving) < len(points):
        warnings.warn(
            f"dropped {len(points) - len(surviving)} zero-outage point(s) "
            "from the diversity fit",
            UserWarning,
            stacklevel=2,
        )
    if len(surviving) < 3:
        raise ValueError("fewer than 3 positive-outage points survive")
    top = surviving[-math.ceil(len(surviving) / 2):]
    x = np.log([p for p, _ in top])
    y = np.log([o for _, o in top])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)

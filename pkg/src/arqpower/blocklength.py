"""Per-round decoding error probability for finite-length codewords.

The working model: a codeword of length L channel uses carrying b = R*L
nats fails to decode at gain g with probability

    Q( sqrt(L) * (log(1+gP) + log(L)/(2L) - R) / sqrt(1 - (1+gP)^-2) )

and the round error probability is the expectation of that quantity over
the gain distribution. As L grows this converges to the classic outage
indicator Pr(log(1+gP) < R).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .fading import (
    DEFAULT_QUADRATURE,
    RAYLEIGH,
    FadingModel,
    QuadratureResult,
    QuadratureSpec,
    expect_result,
)

__all__ = [
    "CodeSpec",
    "RELIABLE_MIN_LENGTH",
    "q_function",
    "conditional_error",
    "error_probability",
    "error_probability_result",
    "asymptotic_error",
]

# Below this codeword length the normal-approximation error model is not
# considered trustworthy; CodeSpec flags such codes.
RELIABLE_MIN_LENGTH = 50


@dataclass(frozen=True)
class CodeSpec:
    """Codeword description: length L in channel uses, rate in npcu."""

    length: int
    rate: float

    def __post_init__(self):
        if not (isinstance(self.length, int) and self.length >= 1):
            raise ValueError("length must be an integer >= 1")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError("rate must be positive and finite")
        if self.length < RELIABLE_MIN_LENGTH:
            warnings.warn(
                f"codeword length {self.length} < {RELIABLE_MIN_LENGTH}: "
                "error model reliability degrades for short codewords",
                UserWarning,
                stacklevel=2,
            )

    @property
    def info_nats(self) -> float:
        """Information content b = R*L in nats."""
        return self.rate * self.length

    @property
    def short_block(self) -> bool:
        return self.length < RELIABLE_MIN_LENGTH


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).

    Evaluated through erfc so the deep tail keeps full relative accuracy;
    accepts scalars or arrays.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def conditional_error(g, code: CodeSpec, power: float):
    """Decoding error probability at fixed gain g.

    At g = 0 the dispersion vanishes; the continuous limit is 1 when the
    rate exceeds log(L)/(2L), 0 when it is below, 0.5 at equality.
    Accepts scalar or array g.
    """
    if not (power > 0 and math.isfinite(power)):
        raise ValueError("power must be positive and finite")
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("gain must be non-negative")

    length = float(code.length)
    offset = math.log(length) / (2.0 * length)
    s = g * power
    num = math.sqrt(length) * (np.log1p(s) + (offset - code.rate))
    # 1 - (1+s)^-2 rewritten as s(2+s)/(1+s)^2 to avoid cancellation at
    # small s; the transition region of the integrand lives there. Past
    # s ~ 1e8 the dispersion is 1.0 to double precision, and clipping there
    # keeps s*(2+s) from overflowing.
    s_clip = np.minimum(s, 1e8)
    den = np.sqrt(s_clip * (2.0 + s_clip)) / (1.0 + s_clip)
    if code.rate > offset:
        limit = 1.0
    elif code.rate < offset:
        limit = 0.0
    else:
        limit = 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.where(s > 0, num / np.where(den > 0, den, 1.0), 0.0)
    out = np.where(s > 0, 0.5 * erfc(arg / math.sqrt(2.0)), limit)
    return float(out) if out.ndim == 0 else out


def _transition_breakpoints(code: CodeSpec, power: float):
    """Gain values bracketing the sharp transition of the conditional error."""
    crossover = code.rate - math.log(code.length) / (2.0 * code.length)
    if crossover <= 0:
        return ()
    g_star = math.expm1(crossover) / power
    s = g_star * power
    disp = math.sqrt(s * (2.0 + s)) / (1.0 + s)
    width = (1.0 + s) * disp / (math.sqrt(code.length) * power)
    candidates = [
        0.5 * g_star,
        g_star - 10.0 * width, g_star - 3.0 * width, g_star - width,
        g_star,
        g_star + width, g_star + 3.0 * width, g_star + 10.0 * width,
        2.0 * g_star,
    ]
    return tuple(c for c in candidates if c > 0)


def error_probability_result(code: CodeSpec, power: float,
                             model: FadingModel = RAYLEIGH,
                             spec: QuadratureSpec | None = None) -> QuadratureResult:
    """Round error probability E[conditional_error(g)] with error estimate."""
    if not (power > 0 and math.isfinite(power)):
        raise ValueError("power must be positive and finite")
    spec = spec or DEFAULT_QUADRATURE
    res = expect_result(
        model,
        lambda g: conditional_error(g, code, power),
        spec,
        breakpoints=_transition_breakpoints(code, power),
    )
    return QuadratureResult(
        value=min(1.0, max(0.0, res.value)),
        error=res.error,
        subdivisions=res.subdivisions,
    )


def error_probability(code: CodeSpec, power: float,
                      model: FadingModel = RAYLEIGH,
                      spec: QuadratureSpec | None = None) -> float:
    """Round error probability for a finite-length codeword, in [0, 1]."""
    return error_probability_result(code, power, model, spec).value


def asymptotic_error(rate: float, power: float,
                     model: FadingModel = RAYLEIGH) -> float:
    """Round error probability in the long-codeword limit.

    The round fails iff the gain falls below the decoding threshold
    (e^R - 1)/P, so this is the gain cdf at that point; for Rayleigh
    fading, 1 - exp(-(e^R - 1)/P).
    """
    if not (rate > 0 and math.isfinite(rate)):
        raise ValueError("rate must be positive and finite")
    if not (power > 0 and math.isfinite(power)):
        raise ValueError("power must be positive and finite")
    return float(model.cdf(math.expm1(rate) / power))

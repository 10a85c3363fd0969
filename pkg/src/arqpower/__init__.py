"""Outage analysis and power allocation for Type-I ARQ with finite-length codewords.

Per-round decoding error probabilities follow the normal-approximation
model for finite-length codes over Rayleigh block fading; packet outage
chains them across independent retransmission rounds. Per-round powers
can be optimized under an average-power constraint, and a seeded Monte
Carlo simulator cross-validates every analytic quantity.
"""

__version__ = "0.1.0"

from .arq import (
    ArqOutcome,
    PowerPolicy,
    average_power,
    evaluate,
    expected_channel_uses,
    expected_energy,
    failure_chain,
    outage,
)
from .blocklength import (
    CodeSpec,
    asymptotic_error,
    conditional_error,
    error_probability,
    error_probability_result,
    q_function,
)
from .fading import (
    DEFAULT_QUADRATURE,
    RAYLEIGH,
    FadingModel,
    QuadratureConvergenceError,
    QuadratureResult,
    QuadratureSpec,
    Rayleigh,
    expect,
    expect_result,
)
from .optimize import (
    InfeasibleProblemError,
    OptimizationProblem,
    OptimizationResult,
    diversity_estimate,
    high_snr_outage_m2,
    high_snr_policy_m2,
    optimize,
    solve_last_power,
    uniform_policy,
)
from .simulate import (
    SimConfig,
    SimStats,
    PacketRecord,
    simulate_packet,
)
from .simulate import run as run_simulation

__all__ = [
    "__version__",
    "ArqOutcome",
    "PowerPolicy",
    "average_power",
    "evaluate",
    "expected_channel_uses",
    "expected_energy",
    "failure_chain",
    "outage",
    "CodeSpec",
    "asymptotic_error",
    "conditional_error",
    "error_probability",
    "error_probability_result",
    "q_function",
    "DEFAULT_QUADRATURE",
    "RAYLEIGH",
    "FadingModel",
    "QuadratureConvergenceError",
    "QuadratureResult",
    "QuadratureSpec",
    "Rayleigh",
    "expect",
    "expect_result",
    "InfeasibleProblemError",
    "OptimizationProblem",
    "OptimizationResult",
    "diversity_estimate",
    "high_snr_outage_m2",
    "high_snr_policy_m2",
    "optimize",
    "solve_last_power",
    "uniform_policy",
    "SimConfig",
    "SimStats",
    "PacketRecord",
    "simulate_packet",
    "run_simulation",
]

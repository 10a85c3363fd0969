"""Packet-level metrics for Type-I ARQ.

Each round is decoded on its own; with independent fading per round the
probability that rounds 1..m all fail is the product of the per-round
error probabilities. Energy, channel-use and average-power metrics follow
from that chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .blocklength import CodeSpec, asymptotic_error, error_probability
from .fading import DEFAULT_QUADRATURE, RAYLEIGH, FadingModel, QuadratureSpec

__all__ = [
    "PowerPolicy",
    "ArqOutcome",
    "failure_chain",
    "expected_energy",
    "expected_channel_uses",
    "average_power",
    "average_power_from_chain",
    "outage",
    "evaluate",
]


@dataclass(frozen=True)
class PowerPolicy:
    """Ordered per-round transmit powers (linear SNR, unit noise variance)."""

    powers: tuple[float, ...]

    def __post_init__(self):
        powers = tuple(float(p) for p in self.powers)
        object.__setattr__(self, "powers", powers)
        if len(powers) < 1:
            raise ValueError("policy needs at least one round")
        if any(not (p > 0 and math.isfinite(p)) for p in powers):
            raise ValueError("every round power must be positive and finite")

    @classmethod
    def from_db(cls, powers_db) -> "PowerPolicy":
        return cls(tuple(10.0 ** (p / 10.0) for p in powers_db))

    @property
    def max_rounds(self) -> int:
        return len(self.powers)

    @property
    def snr_db(self) -> tuple[float, ...]:
        return tuple(10.0 * math.log10(p) for p in self.powers)


@dataclass(frozen=True)
class ArqOutcome:
    """Chained failure probabilities plus the derived packet metrics."""

    chain: tuple[float, ...]
    energy: float
    channel_uses: float
    avg_power: float
    outage: float


def failure_chain(policy: PowerPolicy, code: CodeSpec,
                  model: FadingModel = RAYLEIGH,
                  spec: QuadratureSpec | None = None,
                  asymptotic: bool = False) -> tuple[float, ...]:
    """Probabilities that rounds 1..m all fail, for m = 0..M (index 0 is 1).

    With ``asymptotic`` set, per-round errors use the long-codeword limit
    instead of the finite-length model.
    """
    spec = spec or DEFAULT_QUADRATURE
    chain = [1.0]
    for p in policy.powers:
        if asymptotic:
            e = asymptotic_error(code.rate, p, model)
        else:
            e = error_probability(code, p, model, spec)
        chain.append(chain[-1] * e)
    return tuple(chain)


def _check_chain(policy: PowerPolicy, chain) -> None:
    if len(chain) != policy.max_rounds + 1:
        raise ValueError(
            f"chain length {len(chain)} does not match policy with "
            f"{policy.max_rounds} rounds (expected {policy.max_rounds + 1})"
        )


def expected_energy(policy: PowerPolicy, code: CodeSpec, chain) -> float:
    """Expected energy per packet: L * sum_m P_m * Pr(rounds < m all failed)."""
    _check_chain(policy, chain)
    return code.length * math.fsum(
        p * phi for p, phi in zip(policy.powers, chain[:-1])
    )


def expected_channel_uses(policy: PowerPolicy, code: CodeSpec, chain) -> float:
    """Expected channel uses per packet: L * sum_m Pr(rounds < m all failed)."""
    _check_chain(policy, chain)
    return code.length * math.fsum(chain[:-1])


def average_power_from_chain(policy: PowerPolicy, chain) -> float:
    """Ratio of expected energy to expected channel uses (L cancels)."""
    _check_chain(policy, chain)
    num = math.fsum(p * phi for p, phi in zip(policy.powers, chain[:-1]))
    den = math.fsum(chain[:-1])
    return num / den


def average_power(policy: PowerPolicy, code: CodeSpec,
                  model: FadingModel = RAYLEIGH,
                  spec: QuadratureSpec | None = None,
                  asymptotic: bool = False) -> float:
    chain = failure_chain(policy, code, model, spec, asymptotic)
    return average_power_from_chain(policy, chain)


def outage(policy: PowerPolicy, code: CodeSpec,
           model: FadingModel = RAYLEIGH,
           spec: QuadratureSpec | None = None,
           asymptotic: bool = False) -> float:
    """Probability the packet is still undecoded after all M rounds."""
    return failure_chain(policy, code, model, spec, asymptotic)[-1]


def evaluate(policy: PowerPolicy, code: CodeSpec,
             model: FadingModel = RAYLEIGH,
             spec: QuadratureSpec | None = None,
             asymptotic: bool = False) -> ArqOutcome:
    """All packet metrics from a single shared failure chain.

    Sharing one chain keeps the energy/channel-use ratio internally
    consistent: numerator and denominator see identical quadrature noise.
    """
    chain = failure_chain(policy, code, model, spec, asymptotic)
    return ArqOutcome(
        chain=chain,
        energy=expected_energy(policy, code, chain),
        channel_uses=expected_channel_uses(policy, code, chain),
        avg_power=average_power_from_chain(policy, chain),
        outage=chain[-1],
    )

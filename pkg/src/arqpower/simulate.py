"""Seeded Monte Carlo packet simulator for Type-I ARQ.

Acts as the independent oracle for the analytic pipeline: per packet it
draws one gain per round, decides decoding by a Bernoulli draw with the
conditional error probability (or the long-codeword threshold indicator),
and stops on success or after the last round.

Randomness is counter-based: trials are grouped into fixed-size blocks
and block k of seed s reads from Philox stream key (s, k), each trial
consuming exactly 2M uniforms (gain + decode draw per round). A trial's
randomness is therefore a pure function of (seed, trial index), so any
worker count or evaluation order yields bit-identical statistics.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .arq import PowerPolicy
from .blocklength import CodeSpec, conditional_error
from .fading import RAYLEIGH, FadingModel

__all__ = [
    "SimConfig",
    "SimStats",
    "PacketRecord",
    "simulate_packet",
    "run",
    "trial_block_rng",
    "TRIALS_PER_BLOCK",
    "WORKERS_ENV_VAR",
]

TRIALS_PER_BLOCK = 1 << 16
WORKERS_ENV_VAR = "ARQPOWER_MAX_WORKERS"
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    """One simulation campaign; identical configs give bit-identical stats.

    With ``asymptotic`` set, a round fails iff the gain falls below the
    decoding threshold (e^R - 1)/P instead of the finite-length Bernoulli.
    """

    policy: PowerPolicy
    code: CodeSpec
    trials: int
    seed: int
    model: FadingModel = RAYLEIGH
    asymptotic: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass(frozen=True)
class PacketRecord:
    rounds: int
    success: bool
    energy: float
    channel_uses: int


@dataclass(frozen=True)
class SimStats:
    """Aggregated packet statistics with standard errors.

    ``phi_hat[m]`` is the fraction of trials still undecoded after round m
    (index 0 is 1 by construction). SE fields are None when trials < 2.
    ``decoded_at[k]`` counts trials first decoded in round k+1;
    ``undecoded`` counts trials that failed every round.
    """

    trials: int
    outage: float
    outage_se: float | None
    phi_hat: tuple[float, ...]
    phi_se: tuple[float | None, ...]
    energy: float
    energy_se: float | None
    channel_uses: float
    channel_uses_se: float | None
    avg_power: float
    avg_power_se: float | None
    decoded_at: tuple[int, ...]
    undecoded: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "outage": self.outage,
            "outage_se": self.outage_se,
            "phi_hat": list(self.phi_hat),
            "phi_se": list(self.phi_se),
            "energy": self.energy,
            "energy_se": self.energy_se,
            "channel_uses": self.channel_uses,
            "channel_uses_se": self.channel_uses_se,
            "avg_power": self.avg_power,
            "avg_power_se": self.avg_power_se,
            "decoded_at": list(self.decoded_at),
            "undecoded": self.undecoded,
        }


def trial_block_rng(seed: int, block: int) -> Generator:
    """Philox generator for one block of trials, keyed by (seed, block)."""
    key = np.array([seed & _MASK64, block & _MASK64], dtype=np.uint64)
    return Generator(Philox(key=key))


def _fail_probabilities(gains, power: float, config: SimConfig):
    if config.asymptotic:
        threshold = math.expm1(config.code.rate)
        return np.where(np.asarray(gains) * power < threshold, 1.0, 0.0)
    return conditional_error(gains, config.code, power)


def _run_block(config: SimConfig, block: int):
    """Integer outcome counts for one block of trials."""
    lo = block * TRIALS_PER_BLOCK
    hi = min(config.trials, lo + TRIALS_PER_BLOCK)
    rows = hi - lo
    m = config.policy.max_rounds
    u = trial_block_rng(config.seed, block).random((rows, m, 2))
    gains = config.model.ppf(u[:, :, 0])
    fail = np.empty((rows, m), dtype=bool)
    for j, power in enumerate(config.policy.powers):
        fail[:, j] = u[:, j, 1] < _fail_probabilities(gains[:, j], power, config)
    decoded = ~fail
    any_decoded = decoded.any(axis=1)
    first = np.argmax(decoded, axis=1)
    decoded_at = np.bincount(first[any_decoded], minlength=m)
    return decoded_at.astype(np.int64), int((~any_decoded).sum())


def simulate_packet(config: SimConfig, rng: Generator) -> PacketRecord:
    """One packet through the ARQ loop, consuming exactly 2M uniforms.

    Consumption order matches the block kernel: round j reads the gain
    uniform then the decode uniform, and unused rounds' draws are still
    consumed, so a block generator replayed trial by trial reproduces
    the vectorized run.
    """
    m = config.policy.max_rounds
    u = rng.random(2 * m).reshape(m, 2)
    rounds = m
    success = False
    for j, power in enumerate(config.policy.powers):
        gain = config.model.ppf(u[j, 0])
        p_fail = float(_fail_probabilities(gain, power, config))
        if not (u[j, 1] < p_fail):
            rounds = j + 1
            success = True
            break
    length = config.code.length
    return PacketRecord(
        rounds=rounds,
        success=success,
        energy=length * math.fsum(config.policy.powers[:rounds]),
        channel_uses=length * rounds,
    )


def _resolve_workers(workers: int | None) -> int:
    cap = os.environ.get(WORKERS_ENV_VAR)
    requested = 1 if workers is None else max(1, workers)
    if cap is not None:
        requested = min(requested, max(1, int(cap)))
    return requested


def _stats_from_counts(config: SimConfig, decoded_at: np.ndarray,
                       undecoded: int) -> SimStats:
    n = config.trials
    m = config.policy.max_rounds
    length = config.code.length

    # Per-trial energy/channel-use values depend only on the stop round.
    cum_power = np.cumsum(config.policy.powers)
    energy_at = length * cum_power                     # stop after round k+1
    uses_at = length * np.arange(1, m + 1, dtype=float)
    stop_counts = decoded_at.astype(float).copy()
    stop_counts[m - 1] += undecoded

    phi_hat = [1.0]
    remaining = n
    for k in range(m):
        remaining -= int(decoded_at[k])
        phi_hat.append(remaining / n)
    outage = undecoded / n

    def binom_se(p: float) -> float | None:
        if n < 2:
            return None
        return math.sqrt(p * (1.0 - p) / n)

    total_energy = float(stop_counts @ energy_at)
    total_uses = float(stop_counts @ uses_at)
    mean_energy = total_energy / n
    mean_uses = total_uses / n
    avg_power = total_energy / total_uses

    if n < 2:
        energy_se = uses_se = power_se = None
    else:
        var_energy = max(
            (float(stop_counts @ energy_at ** 2) - n * mean_energy ** 2) / (n - 1), 0.0
        )
        var_uses = max(
            (float(stop_counts @ uses_at ** 2) - n * mean_uses ** 2) / (n - 1), 0.0
        )
        cov = (float(stop_counts @ (energy_at * uses_at))
               - n * mean_energy * mean_uses) / (n - 1)
        energy_se = math.sqrt(var_energy / n)
        uses_se = math.sqrt(var_uses / n)
        # Delta method for the energy/uses ratio.
        var_ratio = max(
            var_energy - 2.0 * avg_power * cov + avg_power ** 2 * var_uses, 0.0
        )
        power_se = math.sqrt(var_ratio / n) / mean_uses

    return SimStats(
        trials=n,
        outage=outage,
        outage_se=binom_se(outage),
        phi_hat=tuple(phi_hat),
        phi_se=tuple([0.0 if n >= 2 else None]
                     + [binom_se(p) for p in phi_hat[1:]]),
        energy=mean_energy,
        energy_se=energy_se,
        channel_uses=mean_uses,
        channel_uses_se=uses_se,
        avg_power=avg_power,
        avg_power_se=power_se,
        decoded_at=tuple(int(c) for c in decoded_at),
        undecoded=undecoded,
    )


def run(config: SimConfig, workers: int | None = None) -> SimStats:
    """Simulate all trials and aggregate; deterministic for any worker count.

    Blocks are reduced in index order and all aggregation happens on
    integer outcome counts, so the result is bit-identical no matter how
    the blocks are scheduled.
    """
    n_blocks = (config.trials + TRIALS_PER_BLOCK - 1) // TRIALS_PER_BLOCK
    workers = _resolve_workers(workers)

    if workers == 1 or n_blocks == 1:
        parts = [_run_block(config, b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(config, b),
                                  range(n_blocks)))

    decoded_at = np.zeros(config.policy.max_rounds, dtype=np.int64)
    undecoded = 0
    for block_decoded, block_undecoded in parts:
        decoded_at += block_decoded
        undecoded += block_undecoded
    return _stats_from_counts(config, decoded_at, undecoded)

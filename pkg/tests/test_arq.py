import math

import pytest

from arqpower import (
    CodeSpec,
    PowerPolicy,
    average_power,
    error_probability,
    evaluate,
    expected_channel_uses,
    expected_energy,
    failure_chain,
    outage,
)
from arqpower.arq import average_power_from_chain

CODE = CodeSpec(length=50, rate=1.0)


class TestPowerPolicy:
    def test_validation(self):
        with pytest.raises(ValueError):
            PowerPolicy(())
        with pytest.raises(ValueError):
            PowerPolicy((1.0, 0.0))
        with pytest.raises(ValueError):
            PowerPolicy((1.0, math.inf))

    def test_db_round_trip(self):
        policy = PowerPolicy.from_db((10.0, 20.0))
        assert policy.powers == pytest.approx((10.0, 100.0), rel=1e-14)
        assert policy.snr_db == pytest.approx((10.0, 20.0), rel=1e-14)

    def test_max_rounds(self):
        assert PowerPolicy((5.0, 5.0, 5.0)).max_rounds == 3


class TestFailureChain:
    def test_single_round(self):
        chain = failure_chain(PowerPolicy((10.0,)), CODE)
        assert chain[0] == 1.0
        assert chain[1] == pytest.approx(error_probability(CODE, 10.0), rel=1e-12)

    def test_uniform_powers_give_powers_of_epsilon(self):
        eps = error_probability(CODE, 10.0)
        chain = failure_chain(PowerPolicy((10.0,) * 3), CODE)
        for m in range(4):
            assert chain[m] == pytest.approx(eps**m, rel=1e-12)

    def test_non_increasing(self):
        chain = failure_chain(PowerPolicy((5.0, 20.0, 2.0)), CODE)
        assert all(b <= a for a, b in zip(chain, chain[1:]))

    def test_asymptotic_mode(self):
        theta = math.e - 1
        chain = failure_chain(PowerPolicy((10.0, 20.0)), CODE, asymptotic=True)
        assert chain[1] == pytest.approx(-math.expm1(-theta / 10.0), rel=1e-14)
        assert chain[2] == pytest.approx(
            math.expm1(-theta / 10.0) * math.expm1(-theta / 20.0), rel=1e-13)


class TestPacketMetrics:
    def test_energy_single_round(self):
        policy = PowerPolicy((7.0,))
        assert expected_energy(policy, CODE, (1.0, 0.3)) == pytest.approx(50 * 7.0)

    def test_energy_degenerate_chain(self):
        # second round never used when round 1 always decodes
        policy = PowerPolicy((4.0, 9.0))
        assert expected_energy(policy, CODE, (1.0, 0.0, 0.0)) == pytest.approx(50 * 4.0)

    def test_energy_direct_arithmetic(self):
        policy = PowerPolicy((10.0, 10.0))
        assert expected_energy(policy, CODE, (1.0, 0.2, 0.1)) == pytest.approx(600.0)

    def test_channel_uses(self):
        assert expected_channel_uses(PowerPolicy((3.0,)), CODE, (1.0, 0.5)) == 50.0
        assert expected_channel_uses(
            PowerPolicy((3.0, 3.0)), CODE, (1.0, 0.2, 0.1)) == pytest.approx(60.0)
        assert expected_channel_uses(
            PowerPolicy((3.0, 3.0, 3.0)), CODE, (1.0, 1.0, 1.0, 1.0)) == pytest.approx(150.0)

    def test_chain_length_mismatch(self):
        with pytest.raises(ValueError):
            expected_energy(PowerPolicy((1.0, 2.0)), CODE, (1.0, 0.5))
        with pytest.raises(ValueError):
            expected_channel_uses(PowerPolicy((1.0,)), CODE, (1.0, 0.5, 0.2))

    def test_average_power_uniform_cancels(self):
        assert average_power(PowerPolicy((10.0,) * 3), CODE) == pytest.approx(10.0, rel=1e-14)

    def test_average_power_single_round(self):
        assert average_power(PowerPolicy((3.5,)), CODE) == pytest.approx(3.5, rel=1e-14)

    def test_average_power_two_rounds_formula(self):
        p1, p2 = 6.0, 18.0
        eps1 = error_probability(CODE, p1)
        expected = (p1 + p2 * eps1) / (1 + eps1)
        assert average_power(PowerPolicy((p1, p2)), CODE) == pytest.approx(expected, rel=1e-12)

    def test_sandwich(self):
        policy = PowerPolicy((2.0, 30.0, 7.0))
        avg = average_power(policy, CODE)
        assert min(policy.powers) <= avg <= max(policy.powers)


class TestOutage:
    def test_vanishes_at_high_power(self):
        assert outage(PowerPolicy((1e8,)), CODE) < 1e-6

    def test_uniform_square(self):
        eps = error_probability(CODE, 10.0)
        assert outage(PowerPolicy((10.0, 10.0)), CODE) == pytest.approx(eps**2, rel=1e-12)

    def test_permutation_invariance_vs_average_power(self):
        # swapping round powers keeps the outage but not the average power:
        # the smaller-first ordering costs less average power
        a = PowerPolicy((5.0, 25.0))
        b = PowerPolicy((25.0, 5.0))
        assert outage(a, CODE) == pytest.approx(outage(b, CODE), rel=1e-10)
        assert average_power(a, CODE) < average_power(b, CODE)

    def test_extra_round_never_hurts(self):
        base = PowerPolicy((8.0, 12.0))
        for added in (0.5, 8.0, 100.0):
            extended = PowerPolicy(base.powers + (added,))
            assert outage(extended, CODE) <= outage(base, CODE)


class TestEvaluate:
    def test_consistency_with_parts(self):
        policy = PowerPolicy((4.0, 16.0))
        out = evaluate(policy, CODE)
        chain = failure_chain(policy, CODE)
        assert out.chain == pytest.approx(chain, rel=1e-14)
        assert out.energy == pytest.approx(expected_energy(policy, CODE, chain))
        assert out.channel_uses == pytest.approx(expected_channel_uses(policy, CODE, chain))
        assert out.avg_power == pytest.approx(average_power_from_chain(policy, chain))
        assert out.outage == chain[-1]
        assert out.avg_power == pytest.approx(out.energy / out.channel_uses, rel=1e-12)

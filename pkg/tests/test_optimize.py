import math

import numpy as np
import pytest

from arqpower import (
    CodeSpec,
    OptimizationProblem,
    PowerPolicy,
    average_power,
    diversity_estimate,
    error_probability,
    high_snr_outage_m2,
    high_snr_policy_m2,
    optimize,
    outage,
    solve_last_power,
    uniform_policy,
)

CODE = CodeSpec(length=50, rate=1.0)
THETA = math.e - 1


class TestSolveLastPower:
    def test_single_round_collapses_to_constraint(self):
        assert solve_last_power((), 10.0, CODE) == pytest.approx(10.0, rel=1e-14)

    def test_two_round_rearrangement(self):
        p1, pi = 6.0, 10.0
        eps1 = error_probability(CODE, p1)
        expected = (pi * (1 + eps1) - p1) / eps1
        assert solve_last_power((p1,), pi, CODE) == pytest.approx(expected, rel=1e-12)

    def test_round_trip_constraint(self):
        pi = 10.0
        p1 = 2 * pi / 3
        p2 = solve_last_power((p1,), pi, CODE)
        assert p2 > 0
        assert average_power(PowerPolicy((p1, p2)), CODE) == pytest.approx(pi, rel=1e-9)

    def test_infeasible_when_first_power_too_large(self):
        # P1 far above any attainable average makes the solved power negative
        assert solve_last_power((50.0,), 10.0, CODE) is None

    def test_degenerate_chain(self):
        # a first round that always decodes leaves nothing for the last power
        assert solve_last_power((1e300,), 10.0, CODE) is None


class TestClosedForms:
    def test_policy_values(self):
        p1, p2 = high_snr_policy_m2(9.0, 1.0)
        assert p1 == pytest.approx(6.0, rel=1e-14)
        assert p2 == pytest.approx(10.475580723647876, rel=1e-14)

    def test_policy_crossover_at_three_theta(self):
        p1, p2 = high_snr_policy_m2(3 * THETA, 1.0)
        assert p1 == pytest.approx(p2, rel=1e-14)

    def test_policy_ratio_grows(self):
        r = [high_snr_policy_m2(pi, 1.0)[1] / high_snr_policy_m2(pi, 1.0)[0]
             for pi in (10.0, 100.0, 1000.0)]
        assert r[0] < r[1] < r[2]

    def test_outage_at_three_theta(self):
        assert high_snr_outage_m2(3 * THETA, 1.0) == pytest.approx(0.25, rel=1e-14)

    def test_outage_cubic_law(self):
        assert high_snr_outage_m2(20.0, 1.0) / high_snr_outage_m2(40.0, 1.0) == pytest.approx(8.0)

    def test_outage_frozen_value(self):
        assert high_snr_outage_m2(100.0, 1.0) == pytest.approx(3.4244195254466756e-05, rel=1e-13)


class TestUniformPolicy:
    def test_constraint_is_exact(self):
        policy = uniform_policy(10.0, 3)
        assert policy.powers == (10.0, 10.0, 10.0)
        assert average_power(policy, CODE) == pytest.approx(10.0, rel=1e-15)

    def test_uniform_outage_square(self):
        eps = error_probability(CODE, 10.0)
        assert outage(uniform_policy(10.0, 2), CODE) == pytest.approx(eps**2, rel=1e-12)


class TestOptimize:
    def test_single_round_has_no_freedom(self):
        res = optimize(OptimizationProblem(max_rounds=1, avg_power=10.0, code=CODE))
        assert res.policy.powers == (10.0,)
        assert res.outage == pytest.approx(error_probability(CODE, 10.0), rel=1e-12)
        assert res.converged

    def test_two_rounds_at_10_db(self):
        pi = 10.0
        res = optimize(OptimizationProblem(max_rounds=2, avg_power=pi, code=CODE))
        assert res.converged
        assert res.residual <= 1e-6
        p1, p2 = res.policy.powers
        assert p1 <= p2
        assert res.outage <= outage(uniform_policy(pi, 2), CODE)

    def test_warm_start_reproduces_solution(self):
        pi = 10.0
        problem = OptimizationProblem(max_rounds=2, avg_power=pi, code=CODE)
        base = optimize(problem)
        warmed = optimize(problem, extra_starts=(base.policy.powers[:-1],))
        assert warmed.policy.powers == pytest.approx(base.policy.powers, rel=1e-3)

    def test_asymptotic_model(self):
        pi = 10 ** 3.5
        res = optimize(OptimizationProblem(
            max_rounds=2, avg_power=pi, code=CODE, asymptotic=True))
        cf = high_snr_policy_m2(pi, 1.0)
        assert res.policy.powers[0] == pytest.approx(cf[0], rel=0.01)
        assert res.policy.powers[1] == pytest.approx(cf[1], rel=0.01)

    def test_swap_lemma(self):
        # equal outage, lower average power with the larger power second
        rng = np.random.default_rng(5)
        for _ in range(5):
            p = float(rng.uniform(1.0, 30.0))
            delta = float(rng.uniform(0.1, 20.0))
            up = PowerPolicy((p, p + delta))
            down = PowerPolicy((p + delta, p))
            assert outage(up, CODE) == pytest.approx(outage(down, CODE), rel=1e-9)
            assert average_power(up, CODE) <= average_power(down, CODE)

    def test_problem_validation(self):
        with pytest.raises(ValueError):
            OptimizationProblem(max_rounds=0, avg_power=10.0, code=CODE)
        with pytest.raises(ValueError):
            OptimizationProblem(max_rounds=2, avg_power=-1.0, code=CODE)
        with pytest.raises(ValueError):
            OptimizationProblem(max_rounds=2, avg_power=10.0, code=CODE,
                                start_bounds=(1.0, 0.5))


class TestDiversityEstimate:
    def test_exact_cubic(self):
        curve = [(pi, 4.2 / pi**3) for pi in np.logspace(1, 4, 12)]
        assert diversity_estimate(curve) == pytest.approx(3.0, abs=1e-6)

    def test_exact_quadratic(self):
        curve = [(pi, 0.9 / pi**2) for pi in np.logspace(1, 4, 12)]
        assert diversity_estimate(curve) == pytest.approx(2.0, abs=1e-6)

    def test_uses_top_half_only(self):
        # slope 1 in the low half, slope 3 in the top half
        low = [(pi, 1.0 / pi) for pi in np.logspace(0, 1, 5)]
        scale = 10.0 ** 2  # continuity at pi = 10
        high = [(pi, scale / pi**3) for pi in np.logspace(1.25, 3, 5)]
        assert diversity_estimate(low + high) == pytest.approx(3.0, abs=1e-6)

    def test_zero_outage_excluded_with_warning(self):
        curve = [(10.0, 1e-3), (20.0, 1e-4), (40.0, 1e-5), (80.0, 0.0)]
        with pytest.warns(UserWarning, match="zero-outage"):
            d = diversity_estimate(curve)
        assert d == pytest.approx(
            diversity_estimate(curve[:3]), rel=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            diversity_estimate([(1.0, 0.1), (2.0, 0.01)])
        with pytest.warns(UserWarning), pytest.raises(ValueError):
            diversity_estimate([(1.0, 0.1), (2.0, 0.0), (4.0, 0.0), (8.0, 0.0)])

    def test_non_increasing_powers_rejected(self):
        with pytest.raises(ValueError):
            diversity_estimate([(1.0, 0.1), (1.0, 0.01), (2.0, 0.001)])

"""Closed forms, lemma suites, distributions, Monte Carlo."""

import random
from fractions import Fraction as F

import pytest

from linematch.adversary import build_randomized
from linematch.algorithms import ChoiceAlgorithm, GreedyChoice, HarmonicChoice, run_online
from linematch.analysis import (
    check_doubling_condition,
    check_symmetric_distribution,
    fast_growth_upper_bound,
    FreeServerDistribution,
    geometric_index_mean,
    harmonic_free_server_distribution,
    harmonic_outcome_enumeration,
    monte_carlo_ratio,
    online_cost_alt_form,
    online_cost_formula,
    opt_cost_formula,
    prefix_mass_ratio,
    ratio_bound_deterministic,
    ratio_bound_randomized,
    run_doubling_bound_suite,
    run_harmonic_symmetry_suite,
    run_offline_oracle_suite,
    run_prefix_mass_suite,
    run_sum_lemma_suite,
    symmetric_ratio,
    symmetric_ratio_quoted_bound,
    trial_seed,
    weighted_index_mean,
    BoundReport,
)
from linematch.core import Instance


class TestRatioBoundDeterministic:
    def test_uniform_ledger(self):
        assert ratio_bound_deterministic([2, 2, 2]) == F(10, 7)

    def test_single_term(self):
        assert ratio_bound_deterministic([1, 0, 0]) == 2

    def test_constant_ledger_approaches_k_minus_two(self):
        k = 40
        value = ratio_bound_deterministic([F(1)] * k)
        assert abs(value - (k - 2)) < F(1, 10**9)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            ratio_bound_deterministic([0, 0])


class TestSymmetricRatio:
    def test_small_values(self):
        assert symmetric_ratio(1) == 1
        assert symmetric_ratio(2) == F(5, 3)
        assert symmetric_ratio(10) == F(9217, 1023)

    def test_exact_form(self):
        for k in range(1, 31):
            assert symmetric_ratio(k) == k - 1 + F(k, 2**k - 1)
            assert symmetric_ratio(k) >= k - 1

    def test_quoted_bound_documented_discrepancy(self):
        # the quoted k - 2**-k figure exceeds the exact ratio for every k >= 2
        assert symmetric_ratio(1) >= symmetric_ratio_quoted_bound(1)
        for k in range(2, 31):
            assert symmetric_ratio(k) < symmetric_ratio_quoted_bound(k)


class TestCostFormulas:
    def test_double_sum_small_cases(self):
        x1, x2 = F(3), F(5)
        assert online_cost_formula([x1]) == x1
        assert online_cost_formula([x1, x2]) == 4 * x1 + x2

    def test_alt_form_disagrees_at_depth_two(self):
        x1, x2 = F(3), F(5)
        assert online_cost_alt_form([x1, x2]) == 6 * x1 + x2
        assert online_cost_alt_form([x1, x2]) != online_cost_formula([x1, x2])

    def test_opt_formula(self):
        assert opt_cost_formula([F(2)]) == 2
        assert opt_cost_formula([F(2), F(2)]) == 6


class TestDoublingCondition:
    def test_examples(self):
        assert check_doubling_condition([1, 2, 4, 8])
        assert not check_doubling_condition([1, 3])
        assert check_doubling_condition([1, 2, 1, 4])  # max over prefix, not predecessor

    def test_first_gap_must_be_positive(self):
        with pytest.raises(ValueError):
            check_doubling_condition([0, 1])


class TestPrefixMass:
    def test_tight_at_maximal_growth(self):
        assert prefix_mass_ratio([1, 2, 4], 1) == F(1, 3)

    def test_intermediate(self):
        assert prefix_mass_ratio([1, 2, 4], 2) == F(2, 3)

    def test_full_prefix(self):
        assert prefix_mass_ratio([5, 5, 5], 3) == 1

    def test_zero_mass_rejected(self):
        with pytest.raises(ValueError):
            prefix_mass_ratio([0, 0], 1)


class TestIndexMeans:
    def test_geometric_small(self):
        assert geometric_index_mean(2, 2) == F(5, 3)

    def test_geometric_sequence_is_tight(self):
        assert weighted_index_mean([1, 2, 4]) == geometric_index_mean(2, 3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            weighted_index_mean([])

    def test_limit_at_ratio_two(self):
        # mean of c^i weights approaches k - 1/(c-1)
        assert abs(geometric_index_mean(2, 60) - 59) < F(1, 100)


class TestFastGrowthBound:
    def test_triple_growth_converges_to_six(self):
        xs = [F(3) ** i for i in range(1, 41)]
        value = fast_growth_upper_bound(xs, eps=F(1))
        assert value <= 2 + 4  # cap 2 + 4/eps
        assert abs(value - 6) < F(1, 1000)

    def test_constant_regime(self):
        b40 = fast_growth_upper_bound([F(3) ** i for i in range(1, 41)], eps=F(1))
        b20 = fast_growth_upper_bound([F(3) ** i for i in range(1, 21)], eps=F(1))
        assert abs(b40 - b20) < F(1, 10)

    def test_growth_condition_enforced(self):
        with pytest.raises(ValueError):
            fast_growth_upper_bound([1, 2, 4], eps=F(1))  # doubling is too slow here


class TestRatioBoundRandomized:
    def test_three_levels(self):
        assert ratio_bound_randomized([2, 2, 0]) == F(5, 24)

    def test_two_levels(self):
        assert ratio_bound_randomized([2, 0]) == F(1, 8)

    def test_grows_linearly_for_constant_gaps(self):
        v20 = ratio_bound_randomized([2] * 19 + [0])
        v10 = ratio_bound_randomized([2] * 9 + [0])
        assert v20 - v10 > F(9, 8) - F(1, 10)  # slope about 1/8 per level

    def test_requires_zero_top_gap(self):
        with pytest.raises(ValueError):
            ratio_bound_randomized([2, 2])


class TestHarmonicDistribution:
    def test_depth_one(self):
        dist = harmonic_free_server_distribution(1)
        assert dist.probs == {2: F(1, 2), 4: F(1, 2)}

    def test_depth_two_oracle(self):
        dist = harmonic_free_server_distribution(2)
        assert dist.probs == {2: F(5, 16), 4: F(3, 16), 6: F(3, 16), 8: F(5, 16)}

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_mass_and_symmetry(self, k):
        dist = harmonic_free_server_distribution(k)
        assert dist.total_mass() == 1
        verdict = check_symmetric_distribution(dist)
        assert verdict.exactly_symmetric
        assert dist.center == 2**k + 1

    def test_budget(self):
        with pytest.raises(ValueError):
            harmonic_free_server_distribution(11)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_recursion_equals_branch_enumeration(self, k):
        build = build_randomized([(F(1), F(1))] * k, k)
        enumerated, _ = harmonic_outcome_enumeration(build.instance)
        assert enumerated == harmonic_free_server_distribution(k).probs


class TestSymmetryVerdict:
    def test_single_point_off_center(self):
        dist = FreeServerDistribution({F(3): F(1)}, center=F(5))
        verdict = check_symmetric_distribution(dist)
        assert not verdict.exactly_symmetric
        assert verdict.tv_distance == 1

    def test_empirical_distribution_close_to_symmetric(self):
        # estimate the free-server distribution at k=4 from seeded runs
        build = build_randomized([(F(1), F(1))] * 4, 4)
        inst = build.instance
        counts: dict = {}
        trials = 4000
        for i in range(trials):
            trace = run_online(ChoiceAlgorithm(HarmonicChoice()), inst, seed=trial_seed(99, i))
            free = set(s for s, _ in inst.servers) - {sid for _, sid, _ in trace.steps}
            pos = inst.server_position(free.pop())
            counts[pos] = counts.get(pos, 0) + 1
        empirical = FreeServerDistribution({p: c / trials for p, c in counts.items()}, center=F(2**4 + 1))
        verdict = check_symmetric_distribution(empirical)
        assert verdict.tv_distance < 0.05


class TestMonteCarlo:
    def test_deterministic_algorithm_has_zero_stderr(self):
        inst = Instance.from_positions([0, 10], [6, 4])
        mc = monte_carlo_ratio(lambda: ChoiceAlgorithm(GreedyChoice()), inst, 5, 0)
        assert mc.stderr == 0.0
        assert mc.mean == F(8, 6)

    def test_depth_one_tree_ratio_is_one(self):
        build = build_randomized([(F(1), F(1))], 1)
        mc = monte_carlo_ratio(lambda: ChoiceAlgorithm(HarmonicChoice()), build.instance, 50, 3)
        assert mc.mean == 1  # both outcomes cost 1, optimum is 1

    def test_reproducible(self):
        build = build_randomized([(F(1), F(1))] * 3, 3)
        a = monte_carlo_ratio(lambda: ChoiceAlgorithm(HarmonicChoice()), build.instance, 40, 5)
        b = monte_carlo_ratio(lambda: ChoiceAlgorithm(HarmonicChoice()), build.instance, 40, 5)
        assert a.ratios == b.ratios and a.stderr == b.stderr

    def test_mean_matches_exact_expectation_within_three_sigma(self):
        k = 3
        build = build_randomized([(F(1), F(1))] * k, k)
        _, exact_cost = harmonic_outcome_enumeration(build.instance)
        opt = F(2**k - 1)
        mc = monte_carlo_ratio(lambda: ChoiceAlgorithm(HarmonicChoice()), build.instance, 3000, 17)
        assert abs(float(mc.mean) - float(exact_cost / opt)) <= 3 * mc.stderr


class TestSuites:
    def test_prefix_mass(self):
        assert run_prefix_mass_suite(cases=400, seed=1).passed

    def test_sum_lemma(self):
        assert run_sum_lemma_suite(cases=400, seed=2).passed

    def test_doubling_bound(self):
        assert run_doubling_bound_suite(cases=300, seed=3).passed

    def test_harmonic_symmetry(self):
        assert run_harmonic_symmetry_suite(k_max=6).passed

    def test_offline_oracle(self):
        assert run_offline_oracle_suite(cases=80, seed=4).passed


def test_bound_report_serializes():
    report = BoundReport("ratio_bound_deterministic", 3, (F(2), F(2), F(2)), F(10, 7))
    blob = report.to_jsonable()
    assert blob["value"] == "10/7"
    assert blob["k"] == 3

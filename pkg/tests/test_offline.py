"""Offline optimum: sorted pairing, DP, and the brute-force oracle."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linematch.algorithms import ChoiceAlgorithm, GreedyChoice, run_online
from linematch.analysis import random_line_instance
from linematch.offline import (
    optimal_balanced,
    optimal_bruteforce,
    optimal_cost,
    optimal_dp,
)

positions = st.fractions(min_value=-30, max_value=30, max_denominator=8)


class TestBalanced:
    def test_two_points(self):
        res = optimal_balanced([0, 10], [1, 2])
        assert res.cost == F(9)
        # request ids in arrival order (1 then 2); sorted pairing sends 1 to 0, 2 to 10
        assert res.matching == ((0, 0), (1, 1))

    def test_collocated_singleton(self):
        assert optimal_balanced([5], [5]).cost == 0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            optimal_balanced([2, 4, 6, 8], [3, 7, 5])


class TestDp:
    def test_unbalanced_example(self):
        res = optimal_dp([2, 4, 6, 8], [3, 5, 7])
        assert res.cost == F(3)

    def test_single_request_picks_near_server(self):
        assert optimal_dp([0, 100], [1]).cost == F(1)

    def test_requires_enough_servers(self):
        with pytest.raises(ValueError):
            optimal_dp([0], [1, 2])

    def test_matching_is_feasible_and_costed(self):
        res = optimal_dp([2, 4, 6, 8], [3, 5, 7])
        assert len({sid for _, sid in res.matching}) == 3
        spos = dict(enumerate([F(2), F(4), F(6), F(8)]))
        rpos = {0: F(3), 1: F(5), 2: F(7)}
        assert sum(abs(rpos[r] - spos[s]) for r, s in res.matching) == res.cost

    def test_tie_break_prefers_small_indices(self):
        # both servers are optimal for the lone request; the smaller one wins
        res = optimal_dp([0, 10], [5])
        assert res.matching == ((0, 0),)

    def test_huge_denominators_use_exact_fallback(self):
        big = 2**80 + 1
        servers = [F(1, big), F(7, 3)]
        requests = [F(2, big)]
        assert optimal_dp(servers, requests).cost == F(1, big)
        assert optimal_dp(servers, requests).cost == optimal_bruteforce(servers, requests)


class TestBruteforce:
    def test_two_points(self):
        assert optimal_bruteforce([0, 10], [1, 2]) == F(9)

    def test_single_request(self):
        assert optimal_bruteforce([3, 9], [5]) == F(2)

    def test_unbalanced_example(self):
        assert optimal_bruteforce([2, 4, 6, 8], [3, 5, 7]) == F(3)

    def test_budget(self):
        with pytest.raises(ValueError):
            optimal_bruteforce(list(range(12)), list(range(11)))


@given(st.lists(positions, min_size=1, max_size=6), st.data())
@settings(max_examples=120, deadline=None)
def test_dp_equals_bruteforce(servers, data):
    requests = data.draw(st.lists(positions, min_size=1, max_size=len(servers)))
    assert optimal_dp(servers, requests).cost == optimal_bruteforce(servers, requests)


@given(st.lists(positions, min_size=1, max_size=6), st.data())
@settings(max_examples=120, deadline=None)
def test_balanced_equals_dp(servers, data):
    requests = data.draw(st.lists(positions, min_size=len(servers), max_size=len(servers)))
    assert optimal_balanced(servers, requests).cost == optimal_dp(servers, requests).cost


def test_opt_never_exceeds_an_online_run():
    rng = random.Random(3)
    for _ in range(80):
        inst = random_line_instance(rng, max_servers=7, max_requests=6)
        trace = run_online(ChoiceAlgorithm(GreedyChoice()), inst)
        assert optimal_cost(inst.servers, inst.requests) <= trace.total_cost

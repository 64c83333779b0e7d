from __future__ import annotations

import math
import random

import pytest

from dynpred.adversary import perturb
from dynpred.predictions import ListPrediction, delay_to_list
from dynpred.requests import query
from dynpred.simulation import (
    GeneratorAlgorithm,
    ListGuidedSolver,
    ProtocolError,
    delay_levels,
    parallel_simulation,
    run_single,
)
from dynpred.workloads import StepOracle, generate


class Echo(GeneratorAlgorithm):
    """One unit per request; answers a query with its position."""

    def run(self):
        while True:
            r = yield from self.next_request()
            yield None
            self.finish(self.completed() + 1)


class Stuck(GeneratorAlgorithm):
    """Never finishes a request."""

    def run(self):
        yield from self.next_request()


def oracle_factory(w, miss_cost):
    def factory(lp: ListPrediction):
        return ListGuidedSolver(lp, StepOracle(w.problem, w.instance).apply, miss_cost)

    return factory


def ordered(answers: dict) -> list:
    return [answers[t] for t in sorted(answers)]


class TestLevels:
    def test_delay_levels(self):
        assert delay_levels(1) == [0, 1]
        assert delay_levels(5) == [0, 1, 2, 4, 8]


class TestScheduler:
    def test_empty_stream(self):
        res = parallel_simulation(lambda lp: Echo(), [], [])
        assert res.answers == {}

    def test_cheap_perfect_copy_never_spawns_large_guesses(self):
        w = generate("striangle", 10, 100, 0, 0, 0)
        res = parallel_simulation(lambda lp: Echo(), w.rhohat, w.rho)
        assert set(res.copy_work) <= {0, 1}
        assert set(res.answered_by.values()) == {0}
        assert res.copy_work[0] == len(w.rho)

    def test_stuck_copies_raise(self):
        with pytest.raises(ProtocolError):
            parallel_simulation(lambda lp: Stuck(), [query()], [query()])

    def test_shuffled_stream_with_delay_three(self):
        w = generate("striangle", 12, 150, 0, 0, 2)
        rho, cert = perturb(w.rhohat, 3, 0, random.Random(9))
        assert cert.verify(rho, w.rhohat)
        res = parallel_simulation(oracle_factory(w, 144), w.rhohat, rho)
        truth = StepOracle("striangle", w.instance)
        expected = [a for a in (truth.apply(r) for r in rho) if a is not None]
        assert ordered(res.answers) == expected

    @pytest.mark.parametrize("d", [0, 2, 8])
    def test_work_within_log_factor_of_best_copy(self, d):
        for seed in range(3):
            w = generate("striangle", 16, 200, d, 0, seed)
            f = oracle_factory(w, 16 * 16)
            res = parallel_simulation(f, w.rhohat, w.rho)
            T = len(w.rho)
            best = min(run_single(f, w.rhohat, w.rho, g)[1] for g in delay_levels(T))
            assert res.total_work <= 4 * math.ceil(math.log2(T)) * best
            assert ordered(res.answers) == list(w.answers)

    def test_copy_at_true_delay_never_misses(self):
        w = generate("striangle", 12, 120, 4, 0, 1)
        alg = ListGuidedSolver(delay_to_list(w.rhohat, w.certificate.d), StepOracle("striangle", w.instance).apply, 100)
        answers, _ = run_single(lambda lp: alg, w.rhohat, w.rho, w.certificate.d)
        assert alg.misses == 0
        assert ordered(answers) == list(w.answers)

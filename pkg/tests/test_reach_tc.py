from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynpred.base import replay
from dynpred.reach_tc import (
    AgnosticTC,
    BaselineTC,
    TCTimeline,
    dedge_flip,
    predicted_edge_sets,
    reach_query,
    reachable,
    tc_preprocess,
)
from dynpred.requests import RequestSequence
from dynpred.workloads import generate


def _check(w):
    n, E0 = w.instance.n, w.instance.edges
    alg = AgnosticTC(n, E0, w.rhohat)
    truth = iter(w.answers)
    c = w.certificate
    for r in w.rho:
        before = alg.work["scanned"]
        ans = alg.process(r)
        if c.k == 0:
            for lv in alg.levels:
                if lv.tl.d >= c.d:
                    assert lv.missing == 0
                    assert len(lv.F) <= 2 * lv.tl.d + 1
        if r.is_query:
            assert ans == next(truth)
            scanned = alg.work["scanned"] - before
            if alg.dstar is not None:
                lv = next(lv for lv in alg.levels if lv.tl.d == alg.dstar)
                assert len(lv.F) <= 2 * alg.dstar + 1
                assert scanned <= 2 * len(lv.F) + 2
            if c.k == 0 and c.d <= alg.levels[-1].tl.d:
                assert alg.dstar is not None and alg.dstar <= 2 * c.d
                assert scanned <= 2 * (2 * 2 * c.d + 1) + 2
    return alg


class TestTimeline:
    def test_no_updates_keeps_initial_edges(self):
        E0 = [(0, 1), (1, 2)]
        rhohat = [reach_query(0, 2)] * 4
        (tl,) = tc_preprocess(3, E0, rhohat, [1])
        assert all(P == frozenset(E0) for P in tl.perm)
        assert all(tl.reaches(0, 2, t) for t in range(1, 5))

    def test_single_flip_leaves_window(self):
        E0 = [(0, 1), (1, 2)]
        rhohat = [reach_query(0, 2)] * 3 + [dedge_flip(1, 2)] + [reach_query(0, 2)] * 3
        for d in (0, 1, 2):
            (tl,) = tc_preprocess(3, E0, rhohat, [d])
            for t in range(len(rhohat) + 1):
                # (1, 2) is permanent only before the window reaches position 4
                assert ((1, 2) in tl.perm[t]) == (t + d < 4)

    @pytest.mark.parametrize("d", [0, 1, 4])
    def test_tables_match_fresh_search(self, d):
        for seed in range(4):
            w = generate("tc", 12, 80, d, 0, seed)
            pred = predicted_edge_sets(w.instance.edges, list(w.rhohat))
            tl = TCTimeline(w.instance.n, pred, list(w.rhohat), d)
            for t in range(len(w.rhohat) + 1):
                for a in tl.active[t]:
                    for b in tl.active[t]:
                        assert tl.reaches(a, b, t) == reachable(w.instance.n, tl.perm[t], a, b)

    def test_inactive_lookup_raises(self):
        (tl,) = tc_preprocess(3, [], [reach_query(0, 1)], [0])
        with pytest.raises(KeyError):
            tl.reaches(0, 2, 1)


class TestAgnostic:
    def test_flip_twice_restores(self):
        alg = AgnosticTC(3, [(0, 1)], [dedge_flip(1, 2), dedge_flip(1, 2)])
        replay(alg, [dedge_flip(1, 2), dedge_flip(1, 2)])
        assert alg.E == {(0, 1)}

    def test_perfect_prediction_has_empty_residual(self):
        w = generate("tc", 20, 150, 0, 0, 3)
        alg = AgnosticTC(w.instance.n, w.instance.edges, w.rhohat)
        for r in w.rho:
            alg.process(r)
            assert not alg.levels[0].F and alg.levels[0].missing == 0

    def test_reflexive(self):
        alg = AgnosticTC(3, [], [reach_query(1, 1)])
        assert alg.process(reach_query(1, 1)) is True

    def test_directed(self):
        alg = AgnosticTC(2, [(0, 1)], [reach_query(1, 0)])
        assert alg.process(reach_query(1, 0)) is False

    @pytest.mark.parametrize("d", [0, 1, 2, 4, 8])
    def test_certified(self, d):
        for seed in range(4):
            _check(generate("tc", 20, 200, d, 0, seed))

    @pytest.mark.parametrize("d,k", [(1, 1), (4, 4), (8, 1)])
    def test_with_outliers(self, d, k):
        for seed in range(4):
            _check(generate("tc", 20, 200, d, k, seed))

    @given(st.integers(2, 40), st.integers(1, 300), st.sampled_from([0, 1, 2, 4, 8]), st.integers(0, 10**6))
    def test_fuzzed(self, n, T, d, seed):
        _check(generate("tc", n, T, d, 0, seed))

    def test_garbage_prediction_falls_back(self):
        w = generate("tc", 15, 150, 2, 0, 5)
        rng = random.Random(3)
        n = w.instance.n
        garbage = RequestSequence(
            [dedge_flip(*rng.sample(range(n), 2)) if rng.random() < 0.5 else reach_query(0, 1) for _ in w.rho]
        )
        alg = AgnosticTC(n, w.instance.edges, garbage)
        got = []
        fallbacks = 0
        for r in w.rho:
            a = alg.process(r)
            if r.is_query:
                got.append(a)
                fallbacks += alg.dstar is None
        assert got == list(w.answers)
        assert fallbacks > 0

    def test_baseline(self):
        w = generate("tc", 15, 100, 2, 1, 0)
        assert replay(BaselineTC(w.instance.n, w.instance.edges), w.rho) == list(w.answers)

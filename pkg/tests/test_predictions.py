from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynpred.predictions import (
    DelayCertificate,
    ListPrediction,
    SymDiffTracker,
    containment_check,
    delay_to_list,
    eh_blocks,
    extended_hamming,
    hamming,
    list_to_point_sample,
    min_delay,
    min_delay_bruteforce,
    symdiff_step,
    total_delay,
    total_delay_bruteforce,
)
from dynpred.requests import RequestSequence, query, update
from dynpred.workloads import PROBLEMS, generate

bitstrings = st.integers(0, 24).flatmap(
    lambda n: st.tuples(st.text("01", min_size=n, max_size=n), st.text("01", min_size=n, max_size=n))
)


class TestExtendedHamming:
    def test_identical(self):
        assert extended_hamming("0000", "0000") == 0

    def test_alternating(self):
        assert extended_hamming("0101", "1010") == 4

    def test_single_block(self):
        assert hamming("0011", "0111") == 1
        assert extended_hamming("0011", "0111") == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            extended_hamming("01", "011")
        with pytest.raises(ValueError):
            eh_blocks("0", "")

    def test_blocks(self):
        assert eh_blocks("0000", "0000") == []
        assert eh_blocks("0011", "0000") == [(3, 4, -1)]
        assert eh_blocks("10", "01") == [(1, 1, -1), (2, 2, 1)]

    @given(bitstrings)
    def test_blocks_are_maximal_and_cover_differences(self, pair):
        s, t = pair
        blocks = eh_blocks(s, t)
        assert len(blocks) == extended_hamming(s, t) <= hamming(s, t)
        covered = set()
        for lo, hi, sign in blocks:
            seg_s, seg_t = s[lo - 1 : hi], t[lo - 1 : hi]
            assert len(set(seg_s)) == len(set(seg_t)) == 1
            assert seg_s[0] != seg_t[0]
            assert sign == int(t[hi - 1]) - int(s[hi - 1])
            # maximal: neighbours break a constant run
            for j in (lo - 2, hi):
                if 0 <= j < len(s):
                    assert s[j] != seg_s[0] or t[j] != seg_t[0]
            covered.update(range(lo - 1, hi))
        assert covered == {i for i in range(len(s)) if s[i] != t[i]}

    @given(bitstrings)
    def test_applying_blocks_turns_s_into_t(self, pair):
        s, t = pair
        x = [int(c) for c in s]
        for lo, hi, sign in eh_blocks(s, t):
            for i in range(lo - 1, hi):
                x[i] += sign
        assert "".join(map(str, x)) == t


def _swap(seq, i):
    seq = list(seq)
    seq[i], seq[i + 1] = seq[i + 1], seq[i]
    return seq


class TestDelay:
    def test_identity(self):
        rho = list("abcab")
        assert min_delay(rho, rho) == 0
        assert total_delay(rho, rho) == 0
        assert min_delay_bruteforce(rho, rho) == 0

    def test_adjacent_swap(self):
        rho = list("abcd")
        assert min_delay(_swap(rho, 1), rho) == 1
        assert min_delay_bruteforce(_swap(rho, 1), rho) == 1
        assert total_delay(_swap(rho, 1), rho) == 2
        assert total_delay_bruteforce(_swap(rho, 1), rho) == 2

    def test_not_multiset_equal(self):
        assert min_delay(list("abca"), list("abcb")) is None
        assert min_delay(list("abca"), list("abc")) is None
        assert min_delay_bruteforce(list("ab"), list("aa")) is None
        assert total_delay(list("ab"), list("ba")) == 2

    def test_bruteforce_refuses_long_input(self):
        with pytest.raises(ValueError):
            min_delay_bruteforce(list(range(9)), list(range(9)))

    @given(st.lists(st.sampled_from("abc"), min_size=0, max_size=7), st.randoms(use_true_random=False))
    def test_matches_bruteforce(self, rho, r):
        rhohat = list(rho)
        r.shuffle(rhohat)
        assert min_delay(rho, rhohat) == min_delay_bruteforce(rho, rhohat)
        assert total_delay(rho, rhohat) == total_delay_bruteforce(rho, rhohat)


class TestListPrediction:
    def test_delay_zero_gives_singletons(self):
        lp = delay_to_list("abc", 0)
        assert lp.slots == (frozenset("a"), frozenset("b"), frozenset("c"))

    def test_delay_one(self):
        lp = delay_to_list("abc", 1)
        assert [set(s) for s in lp.slots] == [{"a", "b"}, {"a", "b", "c"}, {"b", "c"}]
        assert lp.bound == 3

    def test_full_window(self):
        rhohat = "abcab"
        lp = delay_to_list(rhohat, len(rhohat))
        assert all(s == frozenset("abc") for s in lp.slots)

    def test_negative_delay(self):
        with pytest.raises(ValueError):
            delay_to_list("ab", -1)

    def test_empty_slot_rejected(self):
        with pytest.raises(ValueError):
            ListPrediction((frozenset("a"), frozenset()), 1)

    def test_sample_singletons(self):
        lp = delay_to_list([update("edge", 1, 2), query()], 0)
        assert list(list_to_point_sample(lp, random.Random(1))) == [update("edge", 1, 2), query()]

    def test_sample_is_deterministic(self):
        lp = delay_to_list("abcdefg", 2)
        a = list_to_point_sample(lp, random.Random(7))
        b = list_to_point_sample(lp, random.Random(7))
        assert list(a) == list(b)

    def test_sample_is_uniform(self):
        lp = ListPrediction((frozenset("ab"),), 2)
        hits = sum(list_to_point_sample(lp, random.Random(s))[1] == "a" for s in range(10000))
        assert abs(hits / 10000 - 0.5) <= 0.02

    @pytest.mark.parametrize("problem", PROBLEMS)
    def test_slots_contain_realized_request(self, problem):
        for seed in range(5):
            w = generate(problem, 10, 60, 3, 0, seed)
            assert delay_to_list(w.rhohat, w.certificate.d).contains(w.rho)


class TestSymDiff:
    def test_equal_requests_leave_tracker_unchanged(self):
        tr = SymDiffTracker()
        a = update("edge", 1, 2)
        assert symdiff_step(tr, a, a).size == 0
        assert not tr.counts

    def test_first_step(self):
        a, b = update("edge", 1, 2), update("edge", 1, 3)
        tr = symdiff_step(SymDiffTracker(), a, b)
        assert tr.size == 2
        assert tr.counts == {a: 1, b: -1}

    @pytest.mark.parametrize("problem", PROBLEMS)
    @pytest.mark.parametrize("d,k", [(0, 0), (2, 1), (4, 4), (8, 1)])
    def test_size_bound_on_certified_workloads(self, problem, d, k):
        w = generate(problem, 12, 120, d, k, 3)
        tr = SymDiffTracker()
        for a, b in zip(w.rho, w.rhohat):
            changes = tr.step(a, b)
            assert len(changes) <= 2
            assert tr.size <= 4 * k + 2 * d


class TestContainment:
    def test_identity(self):
        assert containment_check("abc", "abc", 0)

    def test_missing_first_request(self):
        assert not containment_check("abc", "bbc", 0)

    @given(st.lists(st.sampled_from("abcd"), max_size=12), st.randoms(use_true_random=False))
    def test_holds_at_min_delay(self, rho, r):
        rhohat = list(rho)
        r.shuffle(rhohat)
        d = min_delay(rho, rhohat)
        assert containment_check(rho, rhohat, d)
        assert containment_check(rho, rhohat, d + 3)

    def test_fails_beyond_delay(self):
        assert not containment_check("bcda", "abcd", 2)
        assert containment_check("bcda", "abcd", 3)


class TestCertificate:
    def test_identity(self):
        c = DelayCertificate.identity(3)
        assert c.verify("abc", "abc")
        assert not c.verify("abc", "acb")

    def test_from_matching(self):
        c = DelayCertificate.from_matching("bac", "abc")
        assert c.d == 1 and c.k == 0
        assert c.verify("bac", "abc")

    def test_roundtrip(self):
        c = DelayCertificate.from_matching("bcad", "abcd")
        assert DelayCertificate.from_json(c.to_json()) == c

    def test_detects_problems(self):
        c = DelayCertificate.from_matching("bac", "abc")
        assert not DelayCertificate(c.pi, c.I, c.Ihat, 0, 0).verify("bac", "abc")
        assert not DelayCertificate([0, 0, 1], c.I, c.Ihat, 1, 0).verify("bac", "abc")
        assert not DelayCertificate([0, 1], [1, 2], [1, 2], 1, 0).verify("bac", "abc")
        assert DelayCertificate([0, 1], [2, 3], [2, 3], 0, 1).verify("xbc", "abc")

    @pytest.mark.parametrize("problem", PROBLEMS)
    def test_generated_certificates_verify(self, problem):
        for seed, (d, k) in enumerate(itertools.product([0, 1, 4], [0, 1, 4])):
            w = generate(problem, 10, 50, d, k, seed)
            c = w.certificate
            assert c.d <= d and c.k <= k
            assert c.verify(w.rho, w.rhohat)


class TestRequests:
    def test_text_roundtrip(self):
        rho = RequestSequence([update("edge", 3, 7), query("query", 3, 7), update("wedge", 1, 2, 5)])
        assert RequestSequence.loads(rho.dumps()) == rho
        assert rho[1] == update("edge", 3, 7)
        assert len(rho.prefix(2)) == 2

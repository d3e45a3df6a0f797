import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relutest import distfree as D
from relutest.ksets import KSetDistribution, check_k


def conditional(dist, done):
    sub = {rows: p for (d, rows), p in dist.items() if d == done}
    total = sum(sub.values())
    return {rows: p / total for rows, p in sub.items()}


class TestKSets:
    def test_check_k(self):
        check_k(12, 6)
        for n, k in [(12, 4), (10, 6), (6, 3), (4, 0)]:
            with pytest.raises(ValueError):
                check_k(n, k)

    @given(st.sampled_from([2, 6, 10]), st.integers(1, 6), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_random_partition(self, k, blocks, seed):
        d = KSetDistribution.random(k * blocks, k, np.random.default_rng(seed))
        assert sorted(v for s in d.sets for v in s) == list(range(k * blocks))
        bo = d.block_of()
        for b, s in enumerate(d.sets):
            assert all(bo[v] == b for v in s)
            assert d.indicator(b).sum() == k

    def test_invalid_sets(self):
        with pytest.raises(ValueError):
            KSetDistribution(4, 2, ((0, 1), (1, 2)))


class TestSampleOracle:
    def test_reads_single_bits(self, rng):
        dist = KSetDistribution(4, 2, ((0, 1), (2, 3)))
        o = D.InputSampleOracle(dist, rng)
        a, b = D.query(o, 0, 0), D.query(o, 0, 1)
        assert a == b
        assert len(o.log) == 2 and len(o.samples) == 1
        with pytest.raises(IndexError):
            o.query(0, 4)


class TestProcess:
    def test_budget(self):
        p = D.lazy_process("N1", 8, 2, seed=1, budget=2)
        p.reveal(0)
        p.reveal(0)
        p.reveal(1)
        assert p.queries == 2
        with pytest.raises(D.BudgetExceeded):
            p.reveal(2)

    def test_n2_last_member_forced(self):
        for seed in range(20):
            p = D.lazy_process("N2", 12, 6, seed=seed)
            for v in range(12):
                p.reveal(v)
            for s in p.dist.sets:
                ones = sum((p.p_rows[v] == 1).astype(int) for v in s)
                assert np.all(ones % 2 == 0)
            assert p.completed_sets() == 2

    def test_second_layer(self):
        p = D.lazy_process("N1", 6, 2, seed=0)
        np.testing.assert_array_equal(p.second_layer(), [1, 1, 1, -1, -1, -1])

    def test_inputs_reveal_nodes(self):
        p = D.lazy_process("N1", 6, 2, seed=0)
        p.inputs.query(0, 3)
        assert p.order == [3]


class TestTranscripts:
    @pytest.mark.parametrize("n,queried", [(2, (0,)), (4, (0,)), (4, (0, 2))])
    def test_worlds_agree_until_completion(self, n, queried):
        n1 = D.transcript_distribution("N1", n, 2, queried)
        n2 = D.transcript_distribution("N2", n, 2, queried)
        assert sum(n1.values()) == 1 == sum(n2.values())
        assert conditional(n1, False) == conditional(n2, False)
        p_done = lambda d: sum(p for (done, _), p in d.items() if done)  # noqa: E731
        assert p_done(n1) == p_done(n2)

    def test_completed_transcripts_differ(self):
        n1 = D.transcript_distribution("N1", 2, 2, (0, 1))
        n2 = D.transcript_distribution("N2", 2, 2, (0, 1))
        assert conditional(n1, True) != conditional(n2, True)
        # in N2 the two rows into the single P node agree
        assert all(rows[0] == rows[1] for rows in conditional(n2, True))

    def test_lazy_process_matches_exact_law(self):
        exact = D.transcript_distribution("N2", 4, 2, (0, 1))
        counts = Counter()
        trials = 6000
        for seed in range(trials):
            p = D.lazy_process("N2", 4, 2, seed=seed)
            rows = tuple(tuple(p.reveal(v)[0].tolist()) for v in (0, 1))
            counts[(p.completed_sets() == 1, rows)] += 1
        for key, prob in exact.items():
            assert abs(counts[key] / trials - float(prob)) < 0.02


class TestCompletion:
    def test_expected_count_formula(self):
        # brute force: average number of blocks inside a q-subset, over all subsets
        n, k, q = 6, 2, 3
        sets = ((0, 1), (2, 3), (4, 5))
        total = Fraction(0)
        subsets = list(itertools.combinations(range(n), q))
        for sub in subsets:
            total += sum(all(v in sub for v in s) for s in sets)
        assert total / len(subsets) == D.expected_completions(n, k, q)

    def test_probability_close_to_exact(self):
        # n = 6, q = 3: P(some pair inside) = 3 * C(4,1) / C(6,3) = 12/20
        est = D.completion_probability(6, 2, 3, 2000, seed=0)
        assert est.ci_low <= 0.6 <= est.ci_high

    def test_small_q(self):
        assert D.expected_completions(100, 2, 1) == 0
        assert D.completion_probability(100, 2, 1, 50, seed=0).probability == 0


class TestGame:
    def test_random_guess_has_no_advantage(self):
        res = D.distinguishing_game(D.random_guess_tester, 64, 2, budget=8, trials=400, seed=3)
        assert res.advantage < 0.15 and res.ci_low <= 0 <= res.ci_high

    def test_full_budget_distinguishes(self):
        res = D.distinguishing_game(D.pair_hunting_tester, 64, 2, budget=64, trials=50, seed=3)
        assert res.advantage > 0.9

    def test_workers_do_not_change_result(self):
        a = D.distinguishing_game(D.pair_hunting_tester, 100, 2, budget=20, trials=30, seed=5, workers=1)
        b = D.distinguishing_game(D.pair_hunting_tester, 100, 2, budget=20, trials=30, seed=5, workers=4)
        assert a == b

    def test_over_budget_tester(self):
        def greedy(process, inputs, rng):
            for v in range(process.n):
                process.reveal(v)
            return "N1"
        with pytest.raises(D.BudgetExceeded):
            D.distinguishing_game(greedy, 16, 2, budget=4, trials=1, seed=0)

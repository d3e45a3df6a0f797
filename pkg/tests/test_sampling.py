import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relutest.network import DeepNetwork, ShlNetwork, WeightOracle, batch_values
from relutest.sampling import (
    ConfigError, EnumerationTooLarge, SampledChain, TesterConfig as Config, chain_deep, chain_shl,
    deep_base_sizes, draw_plan_deep, draw_plan_shl, find_witness, full_plan, paper_sizes_deep,
    paper_sizes_shl, partial_fisher_yates, scaled_value_shl, search_chain, value_bounds,
)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(epsilon=0), dict(epsilon=1), dict(epsilon=0.1, lam=0),
                                    dict(epsilon=0.1, delta=0), dict(epsilon=0.1, constant_scale=-1),
                                    dict(epsilon=0.1, enum_cap=0)])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(ConfigError):
            Config(**kw)


class TestFisherYates:
    @given(st.integers(1, 50), st.data())
    @settings(max_examples=60, deadline=None)
    def test_distinct_sorted(self, n, data):
        k = data.draw(st.integers(0, n))
        idx = partial_fisher_yates(n, k, np.random.default_rng(data.draw(st.integers(0, 2**32))))
        assert len(set(idx.tolist())) == k
        assert list(idx) == sorted(idx)
        assert all(0 <= v < n for v in idx)

    def test_roughly_uniform(self):
        rng = np.random.default_rng(1)
        counts = np.zeros(10)
        for _ in range(5000):
            counts[partial_fisher_yates(10, 3, rng)] += 1
        # each element appears with probability 3/10
        assert np.all(np.abs(counts / 5000 - 0.3) < 0.03)

    def test_clamping(self, rng):
        plan = draw_plan_shl(5, 4, 9, 2, rng)
        assert plan.sizes == (5, 2)
        assert plan.clamped == (True, False) and plan.any_clamped

    def test_zero_size_rejected(self, rng):
        with pytest.raises(ConfigError):
            draw_plan_shl(5, 4, 0, 2, rng)


class TestSizes:
    def test_frozen_shl_sizes(self):
        # eps = lam = 1/2: ln 4 times 2^22 and 2^34
        assert paper_sizes_shl(Config(epsilon=0.5, lam=0.5)) == (5814540, 23816355775)

    def test_scale(self):
        s, t = paper_sizes_shl(Config(epsilon=0.5, lam=0.5, constant_scale=1e-3))
        assert s == math.ceil(1e-3 * 2**22 * math.log(4))
        assert t == math.ceil(1e-3 * 2**34 * math.log(4))

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_deep_fixed_point(self, ell):
        eps, lam = 0.5, 1 / 3
        s = deep_base_sizes(eps, lam, ell)
        a = 512 * (ell + 1) ** 2 * (2 / eps) ** (2 * ell)
        b = 512 * ell ** 2 * (2 / eps) ** (2 * ell)
        for k in range(ell + 1):
            P = math.prod(s[k + 1:])
            assert s[k] >= a * math.log(2 * P / (lam * (ell + 1))) - 1e-6
            if k >= 1:
                assert s[k] >= b * ((s[0] + 1) * math.log(2) + math.log(ell * P / lam)) - 1e-6

    def test_deep_scaled(self):
        cfg = Config(epsilon=0.5, constant_scale=0.01)
        base = deep_base_sizes(0.5, 1 / 3, 2)
        assert paper_sizes_deep(cfg, 2) == tuple(math.ceil(0.01 * v) for v in base)


class TestScaledValue:
    def test_full_plan_is_exact(self, rng):
        net = ShlNetwork(rng.uniform(-1, 1, (7, 5)), rng.uniform(-1, 1, 7))
        plan = full_plan((5, 7))
        X = ((np.arange(32)[:, None] >> np.arange(5)) & 1).astype(np.int8)
        chain = chain_shl(net, plan, WeightOracle(net))
        np.testing.assert_array_equal(chain.values(X), batch_values(net, X))

    def test_full_plan_deep(self, rng):
        net = DeepNetwork((rng.uniform(-1, 1, (4, 3)), rng.uniform(-1, 1, (5, 4)), rng.uniform(-1, 1, (1, 5))))
        X = ((np.arange(8)[:, None] >> np.arange(3)) & 1).astype(np.int8)
        chain = chain_deep(net, full_plan((3, 4, 5)), WeightOracle(net))
        np.testing.assert_array_equal(chain.values(X), batch_values(net, X)[:, 0])

    def test_scale_factor(self, rng):
        net = ShlNetwork(np.ones((6, 4)), np.ones(6))
        plan = draw_plan_shl(4, 6, 2, 3, rng)
        # all-ones: sampled value on x=1 is 3 nodes * 2 inputs, times nm/st = 4
        assert scaled_value_shl(net, plan, np.ones(4)) == pytest.approx(24.0)

    def test_unbiased_on_average(self):
        rng = np.random.default_rng(3)
        A = rng.choice([0.0, 1.0], size=(20, 10))
        net = ShlNetwork(A, np.ones(20))
        x = np.ones(10)
        vals = [scaled_value_shl(net, draw_plan_shl(10, 20, 10, 5, rng), x) for _ in range(4000)]
        # with S = all inputs the estimator averages row sums over T
        assert np.mean(vals) == pytest.approx(float(batch_values(net, x[None, :])[0]), rel=0.02)

    def test_queries_recorded(self, rng):
        net = ShlNetwork(rng.uniform(-1, 1, (8, 6)), rng.uniform(-1, 1, 8))
        plan = draw_plan_shl(6, 8, 3, 4, rng)
        o = WeightOracle(net)
        chain_shl(net, plan, o)
        assert o.count == (3 + 1) * 4


@st.composite
def chains(draw):
    s = draw(st.integers(1, 7))
    t = draw(st.integers(1, 5))
    pool = st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0])
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    # small alphabet so equal columns and zero columns appear often
    M0 = np.array([[draw(pool) for _ in range(s)] for _ in range(t)])
    if draw(st.booleans()):
        M0[:, rng.integers(0, s)] = 0.0
    mats = [M0]
    if draw(st.booleans()):
        u = draw(st.integers(1, 4))
        mats.append(rng.choice([-1.0, 0.0, 0.5, 1.0], size=(u, t)))
        t = u
    mats.append(rng.uniform(-1, 1, (1, t)))
    return SampledChain(tuple(mats), draw(st.sampled_from([0.5, 1.0, 3.0])))


class TestWitnessSearch:
    @given(chains(), st.floats(-2, 2), st.sampled_from([">", ">=", "<", "<="]), st.booleans())
    @settings(max_examples=300, deadline=None)
    def test_structured_equals_naive(self, chain, thr, direction, exclude_zero):
        s = chain.mats[0].shape[1]
        naive = find_witness(lambda X: chain.values(X), range(s), thr, direction, n=s,
                             vectorized=True, exclude_zero=exclude_zero)
        fast = search_chain(chain, thr, direction, exclude_zero=exclude_zero)
        if naive is None:
            assert fast is None
        else:
            np.testing.assert_array_equal(fast, naive)

    @given(chains())
    @settings(max_examples=100, deadline=None)
    def test_bounds_enclose(self, chain):
        s = chain.mats[0].shape[1]
        X = ((np.arange(1 << s)[:, None] >> np.arange(s)) & 1)
        vals = chain.values(X)
        lo, hi = value_bounds(chain)
        assert lo - 1e-9 <= vals.min() and vals.max() <= hi + 1e-9

    def test_first_in_counter_order(self):
        f = lambda x: float(x[0] + 2 * x[2])  # noqa: E731
        w = find_witness(f, [0, 2], 1.5, ">", n=3)
        np.testing.assert_array_equal(w, [0, 0, 1])

    def test_cap_raises(self):
        with pytest.raises(EnumerationTooLarge):
            find_witness(lambda x: 0.0, range(30), 0, ">", enum_cap=24)
        rng = np.random.default_rng(0)
        chain = SampledChain((rng.uniform(-1, 1, (3, 30)), np.ones((1, 3))), 1.0)
        with pytest.raises(EnumerationTooLarge):
            search_chain(chain, -100.0, ">", enum_cap=10)

    def test_identical_columns_are_cheap(self):
        # 400 equal columns give 401 count vectors, far below the cap
        chain = SampledChain((np.ones((2, 400)), np.array([[1.0, -0.5]])), 1.0)
        w = search_chain(chain, 2.0, ">", enum_cap=12)
        assert w.sum() == 5 and list(w[:5]) == [1] * 5

    def test_exclude_zero(self):
        chain = SampledChain((np.zeros((1, 3)), np.ones((1, 1))), 1.0)
        assert list(search_chain(chain, 0.0, "<=")) == [0, 0, 0]
        assert list(search_chain(chain, 0.0, "<=", exclude_zero=True)) == [1, 0, 0]

    def test_deep_plan_sizes(self, rng):
        with pytest.raises(ConfigError):
            draw_plan_deep((4, 3, 1), (2,), rng)
        plan = draw_plan_deep((4, 3, 2, 1), (2, 2, 5), rng)
        assert plan.sizes == (2, 2, 2)

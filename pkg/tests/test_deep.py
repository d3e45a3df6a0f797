import math

import numpy as np
import pytest

from relutest.deep import (
    NearConstantTarget, all_zero_tester_mhl, deep_bias, deep_query_bound, near_constant_tester,
    or_tester_mhl, reduced_epsilon,
)
from relutest.network import DeepNetwork, MoNetwork, ShlNetwork, eval_deep
from relutest.sampling import TesterConfig as Config


def deep_net(rng, dims, last_sign=None):
    layers = [rng.uniform(-1, 1, (dims[k + 1], dims[k])) for k in range(len(dims) - 1)]
    if last_sign is not None:
        layers[-1] = last_sign * np.abs(layers[-1])
    return DeepNetwork(tuple(layers))


class TestConstants:
    def test_frozen_or_bias(self):
        # (1/4) (1/4)^2 * 8*8*8 with eps = 1/2, l = 2
        assert deep_bias(Config(epsilon=0.5), (8, 8, 8, 1), "or") == 8.0
        assert deep_bias(Config(epsilon=0.5), (8, 8, 8, 1), "zero") == 2.0

    def test_query_bound(self):
        assert deep_query_bound((3, 4, 5)) == 5 + 12 + 20

    def test_reduced_epsilon(self):
        assert reduced_epsilon(MoNetwork(np.zeros((1, 1)), np.zeros((1, 2))), 0.5) == 0.25 / 1025
        net = DeepNetwork.from_dims((2, 2, 2, 2))
        assert reduced_epsilon(net, 0.5) == pytest.approx((0.5 / 1.5) ** 2 / 51)


class TestDeepTesters:
    def test_accepts_nonpositive_final_layer(self, rng):
        for _ in range(10):
            net = deep_net(rng, (12, 10, 8, 1), last_sign=-1)
            assert all_zero_tester_mhl(net, Config(epsilon=0.25), rng, sizes=(6, 5, 4)).accepted

    def test_rejects_all_ones(self, rng):
        net = DeepNetwork.from_dims((16, 16, 16, 1), fill=1.0)
        v = all_zero_tester_mhl(net, Config(epsilon=0.25), rng, sizes=(8, 8, 8))
        assert v.rejected
        assert eval_deep(net, v.witness)[1][0] == 1

    def test_or_on_all_ones(self, rng):
        net = DeepNetwork.from_dims((16, 16, 1), fill=1.0)
        assert or_tester_mhl(net, Config(epsilon=0.25), rng, sizes=(4, 4)).accepted
        neg = DeepNetwork.from_dims((16, 16, 1), fill=1.0)
        neg = DeepNetwork((neg.layers[0], -neg.layers[1]))
        assert or_tester_mhl(neg, Config(epsilon=0.25), rng, sizes=(4, 4)).rejected

    def test_default_sizes_clamp(self, rng):
        net = deep_net(rng, (5, 4, 1), last_sign=-1)
        v = all_zero_tester_mhl(net, Config(epsilon=0.5), rng)
        assert v.sizes == (5, 4) and "clamped" in v.notes
        assert v.queries <= deep_query_bound(v.sizes)

    def test_needs_single_output(self, rng):
        with pytest.raises(ValueError):
            all_zero_tester_mhl(deep_net(rng, (3, 3, 2)), Config(epsilon=0.5), rng)

    def test_matches_shl_tester_on_one_layer(self):
        from relutest.testers import all_zero_tester
        cfg = Config(epsilon=0.25)
        for seed in range(30):
            rng = np.random.default_rng(seed)
            A, w = rng.uniform(-1, 1, (10, 10)), rng.uniform(-1, 1, 10)
            a = all_zero_tester(ShlNetwork(A, w), cfg, np.random.default_rng(seed), sizes=(5, 5), bias=1.0)
            b = all_zero_tester_mhl(DeepNetwork((A, w[None, :])), cfg, np.random.default_rng(seed),
                                    sizes=(5, 5), bias=1.0)
            assert a.decision == b.decision and a.queries == b.queries


class TestNearConstant:
    def test_target_validation(self):
        with pytest.raises(ValueError):
            NearConstantTarget((0, 2))
        with pytest.raises(ValueError):
            NearConstantTarget(())

    def test_accepts_matching_outputs(self, rng):
        # output 0 is always 0, output 1 is OR
        net = MoNetwork(np.ones((4, 5)), np.stack([-np.ones(4), np.ones(4)], axis=1))
        v = near_constant_tester(net, [0, 1], Config(epsilon=0.5), rng, sizes=(3, 3))
        assert v.accepted and v.details["failing_output"] == -1
        assert len(v.details["sampled_outputs"]) <= 2

    def test_rejects_wrong_output(self, rng):
        net = MoNetwork(np.ones((4, 5)), np.stack([np.ones(4), np.ones(4)], axis=1))
        v = near_constant_tester(net, [0, 0], Config(epsilon=0.5), rng, sizes=(3, 3))
        assert v.rejected and v.details["failing_output"] in (0, 1)

    def test_draw_count_and_sub_epsilon(self, rng):
        net = MoNetwork(np.ones((2, 2)), -np.ones((2, 40)))
        v = near_constant_tester(net, [0] * 40, Config(epsilon=0.5), rng, sizes=(2, 2))
        assert v.details["sub_epsilon"] == pytest.approx(0.25 / 1025)
        assert len(v.details["sampled_outputs"]) <= math.ceil(8 / 0.5)

    def test_deep_multi_output(self, rng):
        layers = (np.ones((4, 4)), np.ones((4, 4)), np.stack([np.ones(4), -np.ones(4)]))
        net = DeepNetwork(layers)
        assert near_constant_tester(net, [1, 0], Config(epsilon=0.5), rng, sizes=(2, 2, 2)).accepted
        assert near_constant_tester(net, [1, 1], Config(epsilon=0.5), rng, sizes=(2, 2, 2)).rejected

    def test_length_mismatch(self, rng):
        with pytest.raises(ValueError):
            near_constant_tester(MoNetwork(np.ones((1, 1)), np.ones((1, 2))), [1], Config(epsilon=0.5), rng)

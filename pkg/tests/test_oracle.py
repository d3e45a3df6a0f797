from fractions import Fraction

import numpy as np
import pytest

from relutest.constructions import complete_to_or, complete_to_zero
from relutest.network import DeepNetwork, MoNetwork, ShlNetwork, eval_shl
from relutest.oracle import (
    TooLargeError, computes_exactly, counterexample, delta_distance, far_certificate_tiny,
)

OR3 = ShlNetwork(np.ones((1, 3)), np.ones(1))
ZERO2 = ShlNetwork(np.ones((1, 2)), -np.ones(1))


class TestExactness:
    def test_frozen_distances(self):
        assert delta_distance(OR3, "zero") == Fraction(7, 8)
        assert delta_distance(ZERO2, "or") == Fraction(3, 4)
        assert delta_distance(OR3, "or") == 0

    def test_counterexample(self):
        x = counterexample(OR3, "zero")
        assert x.tolist() == [1, 0, 0] and eval_shl(OR3, x)[1] == 1
        assert counterexample(OR3, "or") is None

    def test_multi_output_target(self):
        net = MoNetwork(np.ones((1, 2)), np.array([[1.0, -1.0]]))
        assert computes_exactly(net, [1, 0])
        assert not computes_exactly(net, [1, 1])
        with pytest.raises(ValueError):
            computes_exactly(net, [1])

    def test_deep(self):
        net = DeepNetwork.from_dims((3, 2, 1), fill=1.0)
        assert computes_exactly(net, "or")

    def test_limit(self):
        with pytest.raises(TooLargeError):
            delta_distance(ShlNetwork(np.zeros((1, 25)), np.zeros(1)), "zero")

    def test_completions(self):
        assert computes_exactly(complete_to_zero(3, 4, {(1, 0, 0): 1.0}), "zero")
        assert computes_exactly(complete_to_or(3, 4, {(0, 2, 1): 1.0}), "or")


class TestCertificates:
    def test_close_with_edit(self):
        # flipping the output weight fixes the network
        net = ShlNetwork(np.ones((2, 2)), np.array([1.0, 1.0]))
        res = far_certificate_tiny(net, "zero", epsilon=1.0, delta=0.0)
        assert res.status == "close-with-edit" and res.distance == 0

    def test_exhausted(self):
        res = far_certificate_tiny(ShlNetwork(np.ones((2, 2)), np.ones(2)), "zero", epsilon=0.1, delta=0.1)
        assert res.status == "exhausted" and res.edits == ()

    def test_already_close(self):
        res = far_certificate_tiny(ZERO2, "zero", epsilon=0.1, delta=0.0)
        assert res.status == "close-with-edit" and res.edits == ()

    def test_size_limit(self):
        with pytest.raises(TooLargeError):
            far_certificate_tiny(ShlNetwork(np.zeros((4, 4)), np.zeros(4)), "zero", 0.1, 0.1)

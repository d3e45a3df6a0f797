"""Every small network is close to computing 0 or OR.

Repair a few random networks and report the exact fraction of inputs on
which the repaired network still disagrees with its target.
"""

import math

import numpy as np

from relutest import ShlNetwork
from relutest.constructions import repair_to_closest
from relutest.oracle import delta_distance

n, m, delta = 12, 8, 0.5
eps = max(1 / m, 2 * math.sqrt(math.log(2 / delta) / n))
rng = np.random.default_rng(0)
for i in range(8):
    net = ShlNetwork(rng.uniform(-1, 1, (m, n)), rng.uniform(-1, 1, m))
    rep = repair_to_closest(net, eps, rng)
    d = delta_distance(rep.network, rep.target)
    print(f"net {i}: mean {rep.expectation:+.3f} -> target {rep.target:4s} "
          f"edits {rep.first_layer_edits:2d}/{rep.second_layer_edits}  distance {float(d):.4f}")

"""Weight sampling versus input sampling on the block hard instance.

The network is positive only when the first block of inputs outweighs the
second, which a random input almost never does. Reading weights finds the
positive region quickly; drawing inputs does not.
"""

import numpy as np

from relutest import TesterConfig, all_zero_tester, vanilla_tester
from relutest.constructions import vanilla_hardness_network

net = vanilla_hardness_network(1000, 1e-4)
cfg = TesterConfig(epsilon=1e-4)

rejects, queries = 0, []
for trial in range(20):
    v = all_zero_tester(net, cfg, np.random.default_rng(trial), sizes=(500, 500))
    rejects += v.rejected
    queries.append(v.queries)
print(f"weight sampling: rejected {rejects}/20, mean queries {np.mean(queries):.0f} of {1000 * 1001}")

accepts = sum(vanilla_tester(net, 1000, np.random.default_rng(t)).accepted for t in range(20))
print(f"input sampling, 1000 inputs: accepted {accepts}/20")

"""Testers for networks with several hidden layers, and the multi-output
near-constant tester that reduces to single-output calls."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .network import DeepNetwork, MoNetwork, ShlNetwork, WeightOracle, output_count, restrict_output
from .sampling import ConfigError, TesterConfig, chain_deep, draw_plan_deep, paper_sizes_deep, search_chain
from .testers import Verdict, expand_witness, all_zero_tester, check_queries, or_tester, size_notes


@dataclass(frozen=True)
class NearConstantTarget:
    b: tuple

    def __post_init__(self):
        bits = tuple(int(v) for v in self.b)
        if not bits or any(v not in (0, 1) for v in bits):
            raise ValueError("target must be a non-empty 0/1 sequence")
        object.__setattr__(self, "b", bits)

    def __len__(self):
        return len(self.b)


def deep_bias(cfg: TesterConfig, dims: Sequence[int], target: str) -> float:
    """(1/16 or 1/4) * (eps/2)^l * m_0 * ... * m_l."""
    ell = len(dims) - 2
    front = 1 / 16 if target == "zero" else 1 / 4
    return front * (cfg.epsilon / 2) ** ell * math.prod(dims[:-1])


def deep_query_bound(sizes: Sequence[int]) -> int:
    return sizes[-1] + sum(a * b for a, b in zip(sizes[:-1], sizes[1:]))


def _deep(net: DeepNetwork, cfg, rng, sizes, bias, oracle, target: str) -> Verdict:
    if net.outputs != 1:
        raise ValueError("restrict the network to one output first")
    if net.ell < 1:
        raise ConfigError("need at least one hidden layer")
    rng = rng if rng is not None else cfg.rng()
    want = tuple(sizes) if sizes is not None else paper_sizes_deep(cfg, net.ell)
    plan = draw_plan_deep(net.dims, want, rng)
    oracle = oracle if oracle is not None else WeightOracle(net)
    before = oracle.count
    chain = chain_deep(net, plan, oracle)
    b = deep_bias(cfg, net.dims, target) if bias is None else float(bias)
    if target == "zero":
        local = search_chain(chain, b, ">", cfg.enum_cap)
    else:
        local = search_chain(chain, -b, "<", cfg.enum_cap)
    used = oracle.count - before
    check_queries(used, deep_query_bound(plan.sizes), f"deep {target} tester")
    witness = None if local is None else expand_witness(local, plan.indices[0], net.n)
    return Verdict("accept" if local is None else "reject", used, witness, plan.sizes,
                   size_notes(plan, cfg, sizes is not None), {"bias": b})


def all_zero_tester_mhl(net: DeepNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
                        sizes: Sequence[int] | None = None, bias: float | None = None,
                        oracle: WeightOracle | None = None) -> Verdict:
    """Reject iff some sampled-support input has prod(m_i/s_i) h(x) above the zero bias."""
    return _deep(net, cfg, rng, sizes, bias, oracle, "zero")


def or_tester_mhl(net: DeepNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
                  sizes: Sequence[int] | None = None, bias: float | None = None,
                  oracle: WeightOracle | None = None) -> Verdict:
    return _deep(net, cfg, rng, sizes, bias, oracle, "or")


class _OutputView:
    """Oracle facade that presents one output of a multi-output network as output 0."""

    def __init__(self, oracle: WeightOracle, j: int, last: int, deep: bool):
        self._oracle, self._j, self._last, self._deep = oracle, j, last, deep

    @property
    def count(self) -> int:
        return self._oracle.count

    def block(self, layer, rows, cols):
        if layer == self._last:
            if self._deep:
                rows = [self._j for _ in rows]
            else:
                cols = [self._j for _ in cols]
        return self._oracle.block(layer, rows, cols)


def reduced_epsilon(net, epsilon: float) -> float:
    if isinstance(net, DeepNetwork):
        ell = net.ell
        return (epsilon / (2 - epsilon)) ** ell / (17 * (ell + 1))
    return epsilon ** 2 / 1025


def near_constant_tester(net: MoNetwork | DeepNetwork | ShlNetwork, b, cfg: TesterConfig,
                         rng: np.random.Generator | None = None, *, sizes: Sequence[int] | None = None,
                         spread: int = 8, repeats: int = 3) -> Verdict:
    """Test closeness to the function that outputs ``b`` on every nonzero input.

    Draws ceil(spread/eps) output indices with replacement. Each one runs the
    zero tester (b_j = 0) or the OR tester (b_j = 1) on that output with the
    reduced farness parameter, ``repeats`` times, and keeps the majority.
    """
    target = b if isinstance(b, NearConstantTarget) else NearConstantTarget(tuple(b))
    r = output_count(net)
    if len(target) != r:
        raise ValueError(f"target has {len(target)} bits, network has {r} outputs")
    rng = rng if rng is not None else cfg.rng()
    sub_cfg = replace(cfg, epsilon=reduced_epsilon(net, cfg.epsilon))
    draws = rng.integers(0, r, size=math.ceil(spread / cfg.epsilon)).tolist()
    oracle = WeightOracle(net)
    deep = isinstance(net, DeepNetwork)
    last = net.ell if deep else 1
    failing = []
    for j in draws:
        sub = restrict_output(net, j)
        view = _OutputView(oracle, j, last, deep)
        if deep:
            run = all_zero_tester_mhl if target.b[j] == 0 else or_tester_mhl
        else:
            run = all_zero_tester if target.b[j] == 0 else or_tester
        rejects = sum(run(sub, sub_cfg, rng, sizes=sizes, oracle=view).rejected for _ in range(repeats))
        if 2 * rejects > repeats:
            failing.append(j)
            break
    decision = "reject" if failing else "accept"
    return Verdict(decision, oracle.count, None, tuple(sizes) if sizes is not None else (),
                   ("sizes-override",) if sizes is not None else (),
                   {"sampled_outputs": sorted(set(draws)), "failing_output": failing[0] if failing else -1,
                    "sub_epsilon": sub_cfg.epsilon})

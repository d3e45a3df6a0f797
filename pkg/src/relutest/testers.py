"""Sampling testers for one-hidden-layer networks and the input-sampling baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .network import ShlNetwork, WeightOracle, batch_values
from .sampling import (
    SampledChain, SamplePlan, TesterConfig, chain_shl, draw_plan_shl,
    paper_sizes_shl, search_chain,
)


class QueryAccountingError(AssertionError):
    """A tester read more weight coordinates than its query bound allows."""


@dataclass(frozen=True)
class Verdict:
    decision: str
    queries: int
    witness: Optional[np.ndarray] = None
    sizes: tuple = ()
    notes: tuple = ()
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.decision not in ("accept", "reject"):
            raise ValueError(f"unknown decision {self.decision!r}")
        if self.witness is not None and self.decision != "reject":
            raise ValueError("only a rejection carries a witness")
        if self.queries < 0:
            raise ValueError("negative query count")

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"

    def to_record(self) -> dict:
        rec = {"decision": self.decision, "queries": int(self.queries),
               "sizes": [int(v) for v in self.sizes], "notes": list(self.notes),
               "witness": None if self.witness is None else "".join(map(str, self.witness.tolist()))}
        rec.update({k: v for k, v in self.details.items() if isinstance(v, (int, float, str, list))})
        return rec


def check_queries(used: int, bound: int, label: str) -> None:
    if used > bound:
        raise QueryAccountingError(f"{label} read {used} weights, bound is {bound}")


def size_notes(plan: SamplePlan, cfg: TesterConfig, overridden: bool) -> tuple:
    notes = []
    if plan.any_clamped:
        notes.append("clamped")
    if overridden:
        notes.append("sizes-override")
    elif cfg.constant_scale != 1.0:
        notes.append("scaled")
    return tuple(notes)


def expand_witness(local: np.ndarray, support: np.ndarray, n: int) -> np.ndarray:
    x = np.zeros(n, dtype=np.int8)
    x[support] = local
    return x


def zero_bias(cfg: TesterConfig, n: int, m: int) -> float:
    return cfg.epsilon * n * m / 16


def _two_sided(net: ShlNetwork, cfg: TesterConfig, rng, sizes, bias, oracle, target: str) -> Verdict:
    rng = rng if rng is not None else cfg.rng()
    s, t = sizes if sizes is not None else paper_sizes_shl(cfg)
    plan = draw_plan_shl(net.n, net.m, int(s), int(t), rng)
    oracle = oracle if oracle is not None else WeightOracle(net)
    before = oracle.count
    chain = chain_shl(net, plan, oracle)
    b = zero_bias(cfg, net.n, net.m) if bias is None else float(bias)
    if target == "zero":
        local = search_chain(chain, b, ">", cfg.enum_cap)
    else:
        local = search_chain(chain, -b, "<", cfg.enum_cap)
    s_used, t_used = plan.sizes
    used = oracle.count - before
    check_queries(used, (s_used + 1) * t_used, f"{target} tester")
    witness = None if local is None else expand_witness(local, plan.indices[0], net.n)
    return Verdict("accept" if local is None else "reject", used, witness, plan.sizes,
                   size_notes(plan, cfg, sizes is not None), {"bias": b})


def all_zero_tester(net: ShlNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
                    sizes: Sequence[int] | None = None, bias: float | None = None,
                    oracle: WeightOracle | None = None) -> Verdict:
    """Reject iff some input supported on the sampled inputs has
    scaled value - eps*n*m/16 > 0."""
    return _two_sided(net, cfg, rng, sizes, bias, oracle, "zero")


def or_tester(net: ShlNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
              sizes: Sequence[int] | None = None, bias: float | None = None,
              oracle: WeightOracle | None = None) -> Verdict:
    """Reject iff some sampled-support input has scaled value + eps*n*m/16 < 0."""
    return _two_sided(net, cfg, rng, sizes, bias, oracle, "or")


def one_sided_size(cfg: TesterConfig, m: int) -> int:
    return max(1, math.ceil(cfg.constant_scale * 128 * math.log(2 * m / cfg.lam) / cfg.epsilon**2))


def _one_sided(net: ShlNetwork, cfg: TesterConfig, rng, size, oracle, target: str) -> Verdict:
    rng = rng if rng is not None else cfg.rng()
    s = int(size) if size is not None else one_sided_size(cfg, net.m)
    plan = draw_plan_shl(net.n, net.m, s, net.m, rng)
    S = plan.indices[0]
    oracle = oracle if oracle is not None else WeightOracle(net)
    before = oracle.count
    rows = np.arange(net.m)
    chain = SampledChain((oracle.block(0, rows, S), oracle.block(1, rows, [0]).T), 1.0)
    if target == "zero":
        local = search_chain(chain, 0.0, ">", cfg.enum_cap)
    else:
        local = search_chain(chain, 0.0, "<=", cfg.enum_cap, exclude_zero=True)
    used = oracle.count - before
    check_queries(used, (len(S) + 1) * net.m, f"one-sided {target} tester")
    witness = None if local is None else expand_witness(local, S, net.n)
    return Verdict("accept" if local is None else "reject", used, witness, (len(S), net.m),
                   size_notes(plan, cfg, size is not None))


def one_sided_zero_tester(net: ShlNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
                          size: int | None = None, oracle: WeightOracle | None = None) -> Verdict:
    """Never rejects a network computing 0; a rejection's witness is a real counterexample."""
    return _one_sided(net, cfg, rng, size, oracle, "zero")


def one_sided_or_tester(net: ShlNetwork, cfg: TesterConfig, rng: np.random.Generator | None = None, *,
                        size: int | None = None, oracle: WeightOracle | None = None) -> Verdict:
    """Never rejects a network computing OR; witnesses are nonzero inputs with value <= 0."""
    return _one_sided(net, cfg, rng, size, oracle, "or")


def vanilla_tester(net: ShlNetwork, num_samples: int, rng: np.random.Generator,
                   target: str = "zero") -> Verdict:
    """Evaluate the whole network on uniform random inputs.

    ``queries`` counts network evaluations, since this tester reads outputs
    rather than weights.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    done = 0
    chunk = max(1, min(num_samples, (1 << 22) // max(net.n, 1)))
    while done < num_samples:
        b = min(chunk, num_samples - done)
        X = rng.integers(0, 2, size=(b, net.n), dtype=np.int8)
        bits = batch_values(net, X) > 0
        if target == "zero":
            bad = bits
        else:
            bad = ~bits & X.any(axis=1)
        hits = np.flatnonzero(bad)
        if hits.size:
            return Verdict("reject", done + int(hits[0]) + 1, X[hits[0]].copy(),
                           (num_samples,), ("evaluations",))
        done += b
    return Verdict("accept", done, None, (num_samples,), ("evaluations",))


__all__ = [
    "Verdict", "QueryAccountingError", "all_zero_tester", "or_tester",
    "one_sided_zero_tester", "one_sided_or_tester", "vanilla_tester",
    "one_sided_size", "zero_bias",
]

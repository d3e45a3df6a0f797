"""Generators of monotone properties and the two sampling testers for them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .network import ShlNetwork, WeightOracle, as_bits
from .sampling import TesterConfig, chain_shl, draw_plan_shl
from .testers import Verdict, check_queries, size_notes

MAX_TABLE_BITS = 20


def input_codes(X: np.ndarray) -> np.ndarray:
    """Integer code of each row, bit i of the code = x_i."""
    X = np.asarray(X, dtype=np.int64)
    return X @ (np.int64(1) << np.arange(X.shape[1], dtype=np.int64))


def all_inputs(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class GeneratorFn:
    """A Boolean function on {0,1}^n given as a callable or a truth table."""

    n: int
    fn: Optional[Callable] = None
    table: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        if (self.fn is None) == (self.table is None):
            raise ValueError("give exactly one of fn or table")
        if self.table is not None:
            if self.n > MAX_TABLE_BITS:
                raise ValueError(f"truth tables are limited to n <= {MAX_TABLE_BITS}")
            tab = np.asarray(self.table, dtype=np.int8)
            if tab.shape != (1 << self.n,) or not np.all((tab == 0) | (tab == 1)):
                raise ValueError(f"truth table must hold 2^{self.n} zero/one entries")
            tab.setflags(write=False)
            object.__setattr__(self, "table", tab)

    def __call__(self, x) -> int:
        x = as_bits(x, self.n)
        if self.table is not None:
            return int(self.table[int(input_codes(x[None, :])[0])])
        return int(bool(self.fn(x)))

    def batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int8)
        if self.table is not None:
            return self.table[input_codes(X)]
        return np.fromiter((int(bool(self.fn(x))) for x in X), dtype=np.int8, count=len(X))

    def to_table(self) -> np.ndarray:
        if self.table is not None:
            return self.table
        if self.n > MAX_TABLE_BITS:
            raise ValueError(f"truth tables are limited to n <= {MAX_TABLE_BITS}")
        return self.batch(all_inputs(self.n))


def constant_generator(n: int, value: int) -> GeneratorFn:
    return GeneratorFn(n, fn=lambda x, v=int(value): v, name=f"const{value}")


def or_generator(n: int) -> GeneratorFn:
    return GeneratorFn(n, fn=lambda x: x.any(), name="or")


def load_truth_table(path) -> GeneratorFn:
    text = Path(path).read_text(encoding="utf-8").strip()
    size = len(text)
    if size == 0 or size & (size - 1) or set(text) - {"0", "1"}:
        raise ValueError("truth table file must be one line of 2^n characters in {0,1}")
    return GeneratorFn(size.bit_length() - 1, table=np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"),
                       name=Path(path).stem)


def save_truth_table(g: GeneratorFn, path) -> None:
    Path(path).write_text("".join(map(str, g.to_table().tolist())) + "\n", encoding="utf-8")


def in_closure(f_table: np.ndarray, G: Sequence[GeneratorFn]) -> bool:
    """f lies in the upward closure of G iff some g in G is pointwise below f."""
    f = np.asarray(f_table, dtype=np.int8)
    return any(bool(np.all(g.to_table() <= f)) for g in G)


def monotone_sizes(cfg: TesterConfig, num_generators: int = 1) -> tuple[int, int, int]:
    """(r, t, s): sampled inputs, hidden rows, input nodes."""
    c, eps, lam = cfg.constant_scale, cfg.epsilon, cfg.lam
    r = max(1, math.ceil(c * 2 * math.log(2 * num_generators / lam) / cfg.delta))
    t = max(1, math.ceil(c * 512 * math.log(4 * r / lam) / eps**2))
    s = max(1, math.ceil(c * 512 * math.log(4 * t * r / lam) / eps**2))
    return r, t, s


def _firing(net: ShlNetwork, cfg: TesterConfig, rng, num_generators: int, sizes, draws):
    r, t, s = monotone_sizes(cfg, num_generators)
    if draws is not None:
        r = int(draws)
    if sizes is not None:
        s, t = (int(v) for v in sizes)
    plan = draw_plan_shl(net.n, net.m, s, t, rng)
    X = rng.integers(0, 2, size=(r, net.n), dtype=np.int8)
    oracle = WeightOracle(net)
    chain = chain_shl(net, plan, oracle)
    vals = chain.values(X[:, plan.indices[0]])
    fire = vals + cfg.epsilon * net.n * net.m / 8 < 0
    s_used, t_used = plan.sizes
    check_queries(oracle.count, (s_used + 1) * t_used, "monotone tester")
    return plan, X, fire, oracle.count


def monotone_property_tester(net: ShlNetwork, g: GeneratorFn, cfg: TesterConfig,
                             rng: np.random.Generator | None = None, *,
                             sizes: Sequence[int] | None = None, draws: int | None = None) -> Verdict:
    """Reject if g(0)=1, else reject iff a sampled x with g(x)=1 has a clearly
    negative scaled value."""
    if g.n != net.n:
        raise ValueError(f"generator has n={g.n}, network has n={net.n}")
    if g(np.zeros(net.n, dtype=np.int8)) == 1:
        return Verdict("reject", 0, None, (), ("generator-at-zero",))
    rng = rng if rng is not None else cfg.rng()
    plan, X, fire, used = _firing(net, cfg, rng, 1, sizes, draws)
    hits = np.flatnonzero(fire & (g.batch(X) == 1))
    witness = X[hits[0]].copy() if hits.size else None
    return Verdict("reject" if hits.size else "accept", used, witness, plan.sizes + (len(X),),
                   size_notes(plan, cfg, sizes is not None))


def full_monotone_property_tester(net: ShlNetwork, G: Sequence[GeneratorFn], cfg: TesterConfig,
                                  rng: np.random.Generator | None = None, *,
                                  sizes: Sequence[int] | None = None, draws: int | None = None) -> Verdict:
    """One shared sample; reject iff every generator is refuted by some sampled x.

    A generator with g(0)=1 counts as refuted outright, so the tester rejects
    without reading weights only when all generators are of that kind.
    """
    G = list(G)
    if not G:
        raise ValueError("the generator set must be non-empty")
    if any(g.n != net.n for g in G):
        raise ValueError("all generators must share the network's input length")
    zero = np.zeros(net.n, dtype=np.int8)
    live = [g for g in G if g(zero) == 0]
    if not live:
        return Verdict("reject", 0, None, (), ("generator-at-zero",))
    rng = rng if rng is not None else cfg.rng()
    plan, X, fire, used = _firing(net, cfg, rng, len(G), sizes, draws)
    refuted = [bool(np.any(fire & (g.batch(X) == 1))) for g in live]
    decision = "reject" if all(refuted) else "accept"
    return Verdict(decision, used, None, plan.sizes + (len(X),), size_notes(plan, cfg, sizes is not None),
                   {"refuted": int(sum(refuted))})

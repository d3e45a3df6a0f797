"""Query protocol for the distribution-free setting and the N1-versus-N2
distinguishing game."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .constructions import gamma_for
from .ksets import KSetDistribution, check_k
from .seeds import derive_seed, run_trials
from .stats import newcombe_interval, wilson_interval

__all__ = [
    "KSetDistribution", "InputSampleOracle", "query", "BudgetExceeded", "AnswerProcess",
    "lazy_process", "completion_probability", "CompletionEstimate", "distinguishing_game",
    "GameResult", "pair_hunting_tester", "random_guess_tester", "transcript_distribution",
]


class BudgetExceeded(RuntimeError):
    pass


class InputSampleOracle:
    """Samples y_1, y_2, ... from a k-set distribution, each drawn on first touch."""

    def __init__(self, dist: KSetDistribution, rng: np.random.Generator):
        self.dist = dist
        self._rng = rng
        self.samples: dict[int, np.ndarray] = {}
        self.log: list[tuple[int, int]] = []

    def query(self, i: int, j: int) -> int:
        if i < 0:
            raise IndexError(f"sample index {i} is negative")
        if not 0 <= j < self.dist.n:
            raise IndexError(f"bit index {j} out of range for n={self.dist.n}")
        if i not in self.samples:
            self.samples[i] = self.dist.sample(self._rng)
        self.log.append((i, j))
        return int(self.samples[i][j])


def query(oracle: InputSampleOracle, i: int, j: int) -> int:
    return oracle.query(i, j)


class AnswerProcess:
    """Answers node queries for a network drawn from N1 or N2, generating it on the fly.

    Revealing input node v returns its weights into P and into N (the whole
    column of the first layer) and costs one query; repeats are free. Within
    a k-set, the N2 rows into P are uniform until the last member is
    revealed, which is then forced so the set has an even number of +1 per
    P node. Second-layer weights are known in advance and cost nothing.
    """

    def __init__(self, world: str, n: int, k: int, rng: np.random.Generator, budget: int | None = None):
        if world not in ("N1", "N2"):
            raise ValueError(f"world must be N1 or N2, got {world!r}")
        check_k(n, k)
        self.world, self.n, self.k, self.budget = world, n, k, budget
        self._rng = rng
        self.dist = KSetDistribution.random(n, k, rng)
        self._block = self.dist.block_of()
        self._gamma = float(gamma_for(k))
        self.half = n // 2
        self.p_rows: dict[int, np.ndarray] = {}
        self.n_rows: dict[int, np.ndarray] = {}
        self.order: list[int] = []
        self.inputs = _ProcessInputs(self)

    @property
    def queries(self) -> int:
        return len(self.order)

    def second_layer(self) -> np.ndarray:
        return np.concatenate([np.ones(self.half), -np.ones(self.n - self.half)])

    def reveal(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range")
        if v not in self.p_rows:
            if self.budget is not None and len(self.order) >= self.budget:
                raise BudgetExceeded(f"query budget {self.budget} exhausted")
            self.p_rows[v] = self._draw_p_row(v)
            self.n_rows[v] = np.where(self._rng.random(self.n - self.half) < 0.5 + self._gamma, 1, -1).astype(np.int8)
            self.order.append(v)
        return self.p_rows[v], self.n_rows[v]

    def _draw_p_row(self, v: int) -> np.ndarray:
        row = np.where(self._rng.random(self.half) < 0.5, 1, -1).astype(np.int8)
        if self.world == "N2":
            mates = [u for u in self.dist.sets[self._block[v]] if u != v]
            if all(u in self.p_rows for u in mates):
                ones = sum((self.p_rows[u] == 1).astype(np.int64) for u in mates)
                row = np.where(ones % 2 == 1, 1, -1).astype(np.int8)
        return row

    def completed_sets(self) -> int:
        counts = np.bincount(self._block[self.order], minlength=len(self.dist.sets)) if self.order else []
        return int(np.sum(np.asarray(counts) == self.k))


class _ProcessInputs:
    """Sample-bit access; touching bit j also reveals node j."""

    def __init__(self, process: AnswerProcess):
        self._process = process
        self._oracle = InputSampleOracle(process.dist, process._rng)

    def query(self, i: int, j: int) -> int:
        self._process.reveal(j)
        return self._oracle.query(i, j)


def lazy_process(world: str, n: int, k: int, seed: int, budget: int | None = None) -> AnswerProcess:
    return AnswerProcess(world, n, k, np.random.default_rng(seed), budget)


# --- completion counting ---------------------------------------------------

@dataclass(frozen=True)
class CompletionEstimate:
    probability: float
    expected_count: float
    trials: int
    ci_low: float
    ci_high: float


def expected_completions(n: int, k: int, q: int) -> Fraction:
    """(n/k) C(n-k, q-k) / C(n, q): mean number of k-sets inside a uniform q-subset."""
    if q < k:
        return Fraction(0)
    return Fraction(n // k * math.comb(n - k, q - k), math.comb(n, q))


def completion_probability(n: int, k: int, q: int, trials: int, seed: int) -> CompletionEstimate:
    """Fraction of trials where a uniform q-subset contains a whole k-set."""
    if not 0 <= q <= n:
        raise ValueError("need 0 <= q <= n")
    if n % k:
        raise ValueError("n must be a multiple of k")
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng(derive_seed(seed, t, "completion"))
        dist = KSetDistribution.random(n, k, rng)
        chosen = rng.choice(n, size=q, replace=False)
        counts = np.bincount(dist.block_of()[chosen], minlength=n // k)
        hits += bool(np.any(counts == k))
    lo, hi = wilson_interval(hits, trials)
    return CompletionEstimate(hits / trials, float(expected_completions(n, k, q)), trials, lo, hi)


# --- the game --------------------------------------------------------------

@dataclass(frozen=True)
class GameResult:
    advantage: float
    n2_guess_rate_in_n2: float
    n2_guess_rate_in_n1: float
    trials: int
    budget: int
    ci_low: float
    ci_high: float
    n2_interval: tuple
    n1_interval: tuple


Tester = Callable[[AnswerProcess, object, np.random.Generator], str]


def distinguishing_game(tester: Tester, n: int, k: int, budget: int, trials: int, seed: int,
                        workers: int = 1) -> GameResult:
    """Run ``tester(process, inputs, rng)`` in each world ``trials`` times.

    The tester returns "N1" or "N2". Advantage is
    |P(guess N2 | N2) - P(guess N2 | N1)|, with a Newcombe interval for the
    signed difference.
    """
    check_k(n, k)

    def play(world: str, t: int) -> bool:
        proc = AnswerProcess(world, n, k, np.random.default_rng(derive_seed(seed, t, f"world-{world}")), budget)
        guess = tester(proc, proc.inputs, np.random.default_rng(derive_seed(seed, t, f"tester-{world}")))
        if proc.queries > budget:
            raise BudgetExceeded("tester exceeded its budget")
        return guess == "N2"

    in_n2 = sum(run_trials(lambda t: play("N2", t), trials, workers))
    in_n1 = sum(run_trials(lambda t: play("N1", t), trials, workers))
    lo, hi = newcombe_interval(in_n2, trials, in_n1, trials)
    diff = (in_n2 - in_n1) / trials
    if diff < 0:
        lo, hi = -hi, -lo
    return GameResult(abs(diff), in_n2 / trials, in_n1 / trials, trials, budget, lo, hi,
                      wilson_interval(in_n2, trials), wilson_interval(in_n1, trials))


def random_guess_tester(process: AnswerProcess, inputs, rng: np.random.Generator) -> str:
    return "N2" if rng.random() < 0.5 else "N1"


def pair_hunting_tester(process: AnswerProcess, inputs, rng: np.random.Generator) -> str:
    """Reveal distinct random nodes until the budget runs out and guess N2 iff
    some k of them have P-rows whose entrywise product is all +1 (for k=2:
    two identical rows)."""
    budget = process.budget if process.budget is not None else process.n
    nodes = rng.permutation(process.n)[:budget]
    rows = [process.reveal(int(v))[0] for v in nodes]
    if process.k == 2:
        return "N2" if len({r.tobytes() for r in rows}) < len(rows) else "N1"
    for combo in itertools.combinations(rows, process.k):
        if np.all(np.prod(np.stack(combo), axis=0) == 1):
            return "N2"
    return "N1"


# --- exact transcript check for tiny worlds --------------------------------

def _partitions(nodes: tuple, k: int):
    if not nodes:
        yield ()
        return
    head, rest = nodes[0], nodes[1:]
    for mates in itertools.combinations(rest, k - 1):
        left = tuple(v for v in rest if v not in mates)
        for tail in _partitions(left, k):
            yield ((head,) + mates,) + tail


def transcript_distribution(world: str, n: int, k: int, queried: tuple) -> dict:
    """Exact law of (some k-set fully queried?, P-rows of the queried nodes).

    Enumerates every partition and every admissible sign assignment of the
    edges into P. Rows into N have the same law in both worlds and are left out.
    """
    check_k(n, k)
    half = n // 2
    parts = list(_partitions(tuple(range(n)), k))
    out: dict = {}
    p_part = Fraction(1, len(parts))
    for part in parts:
        done = any(all(v in queried for v in s) for s in part)
        if world == "N1":
            choices = list(itertools.product((-1, 1), repeat=n * half))
            weight = p_part / len(choices)
            for flat in choices:
                cols = np.array(flat).reshape(n, half)
                key = (done, tuple(tuple(cols[v].tolist()) for v in queried))
                out[key] = out.get(key, 0) + weight
        else:
            # each (k-set, P node) pair takes one of the even-parity sign patterns
            even = [p for p in itertools.product((-1, 1), repeat=k) if p.count(1) % 2 == 0]
            slots = [(s, c) for s in part for c in range(half)]
            weight = p_part / len(even) ** len(slots)
            for pick in itertools.product(even, repeat=len(slots)):
                cols = np.zeros((n, half), dtype=int)
                for (s, c), pat in zip(slots, pick):
                    cols[list(s), c] = pat
                key = (done, tuple(tuple(cols[v].tolist()) for v in queried))
                out[key] = out.get(key, 0) + weight
    return out

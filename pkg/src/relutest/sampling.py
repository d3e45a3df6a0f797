"""Sample plans, scaled sub-network values, and exhaustive witness search."""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .network import DeepNetwork, ShlNetwork, WeightOracle, as_bits, relu


class EnumerationTooLarge(RuntimeError):
    """Raised instead of silently truncating an exhaustive search."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"search space of {size} candidates exceeds 2^{cap}")
        self.size = size
        self.cap = cap


class ConfigError(ValueError):
    pass


_COMPARE = {">": operator.gt, ">=": operator.ge, "<": operator.lt, "<=": operator.le}


@dataclass(frozen=True)
class TesterConfig:
    epsilon: float
    delta: float = 0.5
    lam: float = 1 / 3
    constant_scale: float = 1.0
    enum_cap: int = 24
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if not 0 < self.delta <= 1:
            raise ConfigError(f"delta must lie in (0,1], got {self.delta}")
        if not 0 < self.lam < 1:
            raise ConfigError(f"lambda must lie in (0,1), got {self.lam}")
        if not self.constant_scale > 0 or not math.isfinite(self.constant_scale):
            raise ConfigError(f"constant_scale must be positive, got {self.constant_scale}")
        if int(self.enum_cap) != self.enum_cap or self.enum_cap < 1:
            raise ConfigError(f"enum_cap must be a positive integer, got {self.enum_cap}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class SamplePlan:
    """Sorted index arrays, one per sampled layer, plus the layer widths they index."""

    dims: tuple
    indices: tuple
    clamped: tuple = field(default=())

    @property
    def sizes(self) -> tuple:
        return tuple(len(ix) for ix in self.indices)

    @property
    def any_clamped(self) -> bool:
        return any(self.clamped)


def partial_fisher_yates(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform k-subset of range(n) via the first k steps of a Fisher-Yates shuffle."""
    pool = np.arange(n)
    offsets = rng.integers(0, n - np.arange(k))
    for i, off in enumerate(offsets.tolist()):
        j = i + off
        pool[i], pool[j] = pool[j], pool[i]
    return np.sort(pool[:k])


def _draw(widths: Sequence[int], sizes: Sequence[int], rng) -> SamplePlan:
    idx, clamped = [], []
    for width, size in zip(widths, sizes):
        if size < 1:
            raise ConfigError(f"sample size must be at least 1, got {size}")
        clamped.append(size > width)
        idx.append(partial_fisher_yates(width, min(size, width), rng))
    return SamplePlan(tuple(widths), tuple(idx), tuple(clamped))


def draw_plan_shl(n: int, m: int, s: int, t: int, rng: np.random.Generator) -> SamplePlan:
    """Input sample S (size s) and hidden sample T (size t); oversize requests read the whole layer."""
    return _draw((n, m), (s, t), rng)


def draw_plan_deep(dims: Sequence[int], sizes: Sequence[int], rng: np.random.Generator) -> SamplePlan:
    """One sample per layer 0..l (the output layer is never sampled)."""
    if len(sizes) != len(dims) - 1:
        raise ConfigError(f"need {len(dims) - 1} sample sizes, got {len(sizes)}")
    return _draw(tuple(dims[:-1]), sizes, rng)


def full_plan(widths: Sequence[int]) -> SamplePlan:
    return SamplePlan(tuple(widths), tuple(np.arange(w) for w in widths),
                      tuple(False for _ in widths))


# --- sample sizes ----------------------------------------------------------

def _log_term(cfg: TesterConfig) -> float:
    return math.log(1.0 / (cfg.epsilon * cfg.lam))


def paper_sizes_shl(cfg: TesterConfig) -> tuple[int, int]:
    eps, L = cfg.epsilon, _log_term(cfg)
    s = math.ceil(cfg.constant_scale * 2**20 / eps**2 * L)
    t = math.ceil(cfg.constant_scale * 2**30 / eps**4 * L)
    return max(s, 1), max(t, 1)


def deep_base_sizes(epsilon: float, lam: float, ell: int) -> tuple[int, ...]:
    """Least s_0..s_l meeting both families of sampling inequalities.

    s_k >= 512 (l+1)^2 (2/eps)^{2l} ln(2 P_k / (lam (l+1)))        for 0 <= k <= l
    s_k >= 512 l^2 (2/eps)^{2l} ln(2^{s_0+1} l P_k / lam)           for 1 <= k <= l
    where P_k is the product of s_{k+1}..s_l. Solved by monotone iteration.
    """
    if ell < 1:
        raise ConfigError("deep testers need at least one hidden layer")
    a = 512 * (ell + 1) ** 2 * (2 / epsilon) ** (2 * ell)
    b = 512 * ell ** 2 * (2 / epsilon) ** (2 * ell)
    s = [1] * (ell + 1)
    for _ in range(10_000):
        new = []
        for k in range(ell + 1):
            log_p = sum(math.log(v) for v in s[k + 1:])
            need = a * (math.log(2 / (lam * (ell + 1))) + log_p)
            if k >= 1:
                need = max(need, b * ((s[0] + 1) * math.log(2) + math.log(ell / lam) + log_p))
            new.append(max(s[k], math.ceil(need), 1))
        if new == s:
            return tuple(s)
        s = new
    raise RuntimeError("sample-size iteration did not settle")


def deep_constants(epsilon: float, lam: float, ell: int) -> tuple[float, ...]:
    """c_k such that s_k = c_k eps^{-2l} ln(1/lam eps) for k=0 and c_k eps^{-4l} ln^2 otherwise."""
    base = deep_base_sizes(epsilon, lam, ell)
    L = math.log(1 / (lam * epsilon))
    return tuple(v / (epsilon ** (-2 * ell) * L) if k == 0 else v / (epsilon ** (-4 * ell) * L * L)
                 for k, v in enumerate(base))


def paper_sizes_deep(cfg: TesterConfig, ell: int) -> tuple[int, ...]:
    # c_k times its eps/log factor is s_k* by definition, so scale it directly
    base = deep_base_sizes(cfg.epsilon, cfg.lam, ell)
    return tuple(max(math.ceil(cfg.constant_scale * v), 1) for v in base)


# --- sampled sub-networks --------------------------------------------------

@dataclass(frozen=True)
class SampledChain:
    """Local weight blocks of a sampled network and the rescaling factor."""

    mats: tuple
    scale: float

    def values(self, X: np.ndarray) -> np.ndarray:
        """Scaled output for each row of ``X`` (columns = sampled inputs)."""
        h = np.asarray(X, dtype=np.float64) @ self.mats[0].T
        for M in self.mats[1:]:
            h = relu(h) @ M.T
        return self.scale * h[:, 0]


def chain_shl(net: ShlNetwork, plan: SamplePlan, oracle: WeightOracle) -> SampledChain:
    S, T = plan.indices
    A_TS = oracle.block(0, T, S)
    w_T = oracle.block(1, T, [0]).T
    return SampledChain((A_TS, w_T), net.n * net.m / (len(S) * len(T)))


def chain_deep(net: DeepNetwork, plan: SamplePlan, oracle: WeightOracle) -> SampledChain:
    idx = plan.indices
    mats = [oracle.block(k, idx[k + 1], idx[k]) for k in range(net.ell)]
    mats.append(oracle.block(net.ell, [0], idx[net.ell]))
    scale = 1.0
    for width, ix in zip(net.dims[:-1], idx):
        scale *= width / len(ix)
    return SampledChain(tuple(mats), scale)


def scaled_value_shl(net: ShlNetwork, plan: SamplePlan, x, oracle: WeightOracle | None = None) -> float:
    """(nm/st) w^T relu(T A S x); entries of x outside the input sample are ignored."""
    x = as_bits(x, net.n)
    chain = chain_shl(net, plan, oracle or WeightOracle(net))
    return float(chain.values(x[plan.indices[0]][None, :])[0])


def scaled_value_deep(net: DeepNetwork, plan: SamplePlan, x, oracle: WeightOracle | None = None) -> float:
    if net.outputs != 1:
        raise ValueError("scaled_value_deep needs a single-output network")
    x = as_bits(x, net.n)
    chain = chain_deep(net, plan, oracle or WeightOracle(net))
    return float(chain.values(x[plan.indices[0]][None, :])[0])


# --- witness search --------------------------------------------------------

def find_witness(evaluator: Callable, free_indices: Sequence[int], threshold: float,
                 direction: str, n: int | None = None, enum_cap: int = 24,
                 vectorized: bool = False, exclude_zero: bool = False) -> Optional[np.ndarray]:
    """First x (bit i of an ascending counter sets x[free_indices[i]]) with
    ``evaluator(x) <direction> threshold``, or None.

    With ``vectorized`` the evaluator receives a B x n matrix and returns B values.
    """
    cmp = _COMPARE[direction]
    free = np.asarray(list(free_indices), dtype=np.int64)
    if len(free) > enum_cap:
        raise EnumerationTooLarge(2 ** len(free), enum_cap)
    n = int(n if n is not None else (free.max() + 1 if free.size else 1))
    total = 1 << len(free)
    batch = 1 << 14
    for start in range(1 if exclude_zero else 0, total, batch):
        codes = np.arange(start, min(start + batch, total), dtype=np.int64)
        X = np.zeros((len(codes), n), dtype=np.int8)
        X[:, free] = (codes[:, None] >> np.arange(len(free))) & 1
        if vectorized:
            hits = np.flatnonzero(cmp(np.asarray(evaluator(X)), threshold))
            if hits.size:
                return X[hits[0]].copy()
        else:
            for row in X:
                if cmp(evaluator(row), threshold):
                    return row.copy()
    return None


def value_bounds(chain: SampledChain) -> tuple[float, float]:
    """Interval enclosure of the chain's value over all 0/1 inputs (box relaxation)."""
    M0 = chain.mats[0]
    lo = np.minimum(M0, 0).sum(axis=1)
    hi = np.maximum(M0, 0).sum(axis=1)
    for M in chain.mats[1:]:
        a, b = relu(lo), relu(hi)
        Mp, Mn = np.maximum(M, 0), np.minimum(M, 0)
        lo, hi = Mp @ a + Mn @ b, Mp @ b + Mn @ a
    return chain.scale * float(lo[0]), chain.scale * float(hi[0])


def _bound_rules_out(lo: float, hi: float, threshold: float, direction: str) -> bool:
    return {">": hi <= threshold, ">=": hi < threshold,
            "<": lo >= threshold, "<=": lo > threshold}[direction]


def _lex_min(rows: np.ndarray) -> np.ndarray:
    # rows are packed big-endian bitsets; lexicographic byte order = integer order
    cand = np.arange(rows.shape[0])
    for col in range(rows.shape[1]):
        if cand.size == 1:
            break
        col_vals = rows[cand, col]
        cand = cand[col_vals == col_vals.min()]
    return rows[cand[0]]


def search_chain(chain: SampledChain, threshold: float, direction: str, enum_cap: int = 24,
                 exclude_zero: bool = False) -> Optional[np.ndarray]:
    """Exact search over all 0/1 assignments of the sampled inputs.

    Returns the same witness as ``find_witness`` on the chain's value (lowest
    counter value, local input p = bit p), or None. Inputs whose columns agree
    on the next layer's sampled rows are interchangeable, so only the number
    chosen from each group matters; the cap bounds the number of such count
    vectors rather than 2^s.
    """
    cmp = _COMPARE[direction]
    lo, hi = value_bounds(chain)
    if _bound_rules_out(lo, hi, threshold, direction):
        return None

    M0 = chain.mats[0]
    s = M0.shape[1]
    # reps[c] is the column shared by every sampled input in group c
    reps, cls = np.unique(M0.T, axis=0, return_inverse=True)
    cls = cls.ravel()
    k = reps.shape[0]
    sizes = np.bincount(cls, minlength=k)
    zero = ~reps.any(axis=1)
    # zero columns never change the value; one of them only matters to avoid x = 0
    radix = np.where(zero, np.minimum(sizes, 1) + 1 if exclude_zero else 1, sizes + 1)
    total = math.prod(int(r) for r in radix)
    if total > (1 << enum_cap):
        raise EnumerationTooLarge(total, enum_cap)

    rank = np.empty(s, dtype=np.int64)
    for c in range(k):
        members = np.flatnonzero(cls == c)
        rank[members] = np.arange(members.size)
    rest = chain.mats[1:]
    best = None
    width = max(M.shape[0] for M in chain.mats)
    batch = max(256, (1 << 22) // max(width, 1))
    radix_t = tuple(int(r) for r in radix)
    for start in range(0, total, batch):
        codes = np.arange(start, min(start + batch, total))
        counts = np.stack(np.unravel_index(codes, radix_t), axis=1).astype(np.float64)
        h = counts @ reps
        for M in rest:
            h = relu(h) @ M.T
        vals = chain.scale * h[:, 0]
        ok = cmp(vals, threshold)
        if exclude_zero:
            ok &= counts.sum(axis=1) > 0
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            continue
        sat = counts[hits].astype(np.int64)
        step = max(1, (1 << 22) // max(s, 1))
        for a in range(0, len(sat), step):
            bits = rank[None, :] < sat[a:a + step][:, cls]
            packed = np.packbits(bits[:, ::-1], axis=1)
            cand = _lex_min(packed)
            if best is None or bytes(cand) < bytes(best):
                best = cand
    if best is None:
        return None
    return np.unpackbits(best, count=s)[::-1].astype(np.int8)

"""Network constructions: hard instances, the partition reduction, completion
and repair procedures, and exact enumeration identities for the N1/N2 pair."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .ksets import KSetDistribution, check_k
from .monotone import all_inputs
from .network import ShlNetwork, batch_values

Coordinate = tuple  # (layer, row, col), as used by WeightOracle


# --- input-sampling hard instance ------------------------------------------

def vanilla_block_size(n: int, epsilon: float) -> int:
    """sqrt(eps) * n, which must be a whole number."""
    raw = math.sqrt(epsilon) * n
    unit = round(raw)
    if unit < 1 or abs(raw - unit) > 1e-9 * max(1.0, raw):
        raise ValueError(f"sqrt(eps)*n = {raw} is not a positive integer")
    return unit


def vanilla_hardness_network(n: int, epsilon: float) -> ShlNetwork:
    """Block network that is positive only when the first block outweighs the second.

    Inputs I_1 (first 10u) feed hidden H_1 with weight 1, inputs I_2 (next 20u)
    feed H_2 with weight 1, H_1 -> output is +1 and H_2 -> output is -1, where
    u = sqrt(eps) * n. Everything else is 0 and m = n.
    """
    if not 0 < epsilon < 1e-3:
        raise ValueError("epsilon must lie in (0, 1/1000)")
    u = vanilla_block_size(n, epsilon)
    a, b = 10 * u, 20 * u
    if a + b > n:
        raise ValueError(f"blocks of {a} and {b} do not fit in n={n}")
    A = np.zeros((n, n))
    A[:a, :a] = 1.0
    A[a:a + b, a:a + b] = 1.0
    w = np.zeros(n)
    w[:a] = 1.0
    w[a:a + b] = -1.0
    return ShlNetwork(A, w)


# --- exact identities ------------------------------------------------------

def xi(k: int) -> Fraction:
    if k < 2 or k % 2:
        raise ValueError(f"k must be an even integer >= 2, got {k}")
    sign = -1 if (k // 2 - 1) % 2 else 1
    return Fraction(sign * math.comb(k - 2, k // 2 - 1), 2 ** (k - 1))


def gamma_for(k: int) -> Fraction:
    """Edge bias of the N side: xi(k) / (8k)."""
    return xi(k) / (8 * k)


def parity_last(first: np.ndarray) -> np.ndarray:
    """Last entry of a parity-coupled tuple: +1 iff an odd number of the first k-1 are +1."""
    ones = (np.asarray(first) == 1).sum(axis=-1)
    return np.where(ones % 2 == 1, 1, -1)


def parity_gap(k: int) -> Fraction:
    """E[relu(sum X)] - E[relu(sum U)] for the parity-coupled X and uniform U.

    Outcomes are grouped by their number of +1 entries, each group weighted
    by its binomial multiplicity, so the sums are exact integers.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be an even integer >= 2, got {k}")
    if k > 24:
        raise ValueError("k is limited to 24")
    coupled = 0
    for j in range(k):  # j = number of +1 among the first k-1
        total = 2 * j - (k - 1) + (1 if j % 2 else -1)
        coupled += math.comb(k - 1, j) * max(total, 0)
    uniform = sum(math.comb(k, j) * max(2 * j - k, 0) for j in range(k + 1))
    return Fraction(coupled, 2 ** (k - 1)) - Fraction(uniform, 2 ** k)


def expectation_gap(ell: int, gamma) -> Fraction:
    """E[relu(sum Y)] - E[relu(sum X)], Y_i = +1 w.p. 1/2+gamma, X_i uniform, l terms."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    g = Fraction(gamma)
    if not 0 <= g < Fraction(1, 2):
        raise ValueError("gamma must lie in [0, 1/2)")

    def mean_relu(p: Fraction) -> Fraction:
        dist = {0: Fraction(1)}  # partial sum -> probability
        for _ in range(ell):
            nxt: dict[int, Fraction] = {}
            for v, pr in dist.items():
                nxt[v + 1] = nxt.get(v + 1, 0) + pr * p
                nxt[v - 1] = nxt.get(v - 1, 0) + pr * (1 - p)
            dist = nxt
        return sum((pr * v for v, pr in dist.items() if v > 0), Fraction(0))

    return mean_relu(Fraction(1, 2) + g) - mean_relu(Fraction(1, 2))


def parity_tuples(k: int) -> np.ndarray:
    """All 2^(k-1) parity-coupled tuples in {-1,1}^k, one per seed."""
    seeds = all_inputs(k - 1).astype(np.int64) * 2 - 1
    return np.concatenate([seeds, parity_last(seeds)[:, None]], axis=1)


def _patterns_uniform(cols: np.ndarray) -> bool:
    width = cols.shape[1]
    codes = ((cols > 0).astype(np.int64) << np.arange(width)).sum(axis=1)
    counts = np.bincount(codes, minlength=1 << width)
    return bool(np.all(counts == counts[0]))


def check_k_minus_1_wise(k: int) -> bool:
    """True iff every k-1 coordinates of the coupled tuple are jointly uniform."""
    if k < 2 or k % 2 or k > 16:
        raise ValueError("k must be even and at most 16")
    T = parity_tuples(k)
    return all(_patterns_uniform(np.delete(T, drop, axis=1)) for drop in range(k))


def full_tuple_uniform(k: int) -> bool:
    return _patterns_uniform(parity_tuples(k))


# --- N1 / N2 ---------------------------------------------------------------

def _signs(rng, shape, p_plus: float) -> np.ndarray:
    return np.where(rng.random(shape) < p_plus, 1.0, -1.0)


def _n_network(n: int, k: int, rng: np.random.Generator, coupled: bool):
    check_k(n, k)
    dist = KSetDistribution.random(n, k, rng)
    half = n // 2
    gamma = float(gamma_for(k))
    A = np.empty((n, n))
    A[half:] = _signs(rng, (n - half, n), 0.5 + gamma)
    P = _signs(rng, (half, n), 0.5)
    if coupled:
        sets = np.asarray(dist.sets)
        first = P[:, sets[:, :-1]]  # half x (n/k) x (k-1)
        P[:, sets[:, -1]] = parity_last(first)
    A[:half] = P
    w = np.concatenate([np.ones(half), -np.ones(n - half)])
    return ShlNetwork(A, w), dist


def sample_n1(n: int, k: int, rng: np.random.Generator):
    """Edges into P uniform; edges into N are +1 with probability 1/2 + gamma."""
    return _n_network(n, k, rng, coupled=False)


def sample_n2(n: int, k: int, rng: np.random.Generator):
    """As N1, but within each k-set the edges into a P node have an even number of +1."""
    return _n_network(n, k, rng, coupled=True)


def n_metadata(kind: str, dist: KSetDistribution) -> dict:
    return {"kind": kind, "k": dist.k, "gamma": str(gamma_for(dist.k)), "partition": dist.to_document()["sets"]}


# --- partition reduction ---------------------------------------------------

def partition_reduction(items: Sequence[int]) -> ShlNetwork:
    """Three hidden nodes; some input is positive iff the items split into equal halves.

    With W = sum(items) and a chosen subset S (plus the last input on), the
    first two nodes give |r(S)/W - 1/2| and the third adds 1/(4W). The output
    weight of the third node is 1/(4W) rather than 1/W so that near misses,
    which leave |r(S)/W - 1/2| >= 1/(2W), stay strictly negative.
    """
    items = [int(v) for v in items]
    if not items or any(v <= 0 for v in items):
        raise ValueError("items must be a non-empty list of positive integers")
    N, W = len(items), sum(items)
    r = np.array(items, dtype=np.float64) / W
    A = np.zeros((3, N + 1))
    A[0, :N], A[0, N] = r, -0.5
    A[1, :N], A[1, N] = -r, 0.5
    A[2, N] = 1.0
    return ShlNetwork(A, np.array([-1.0, -1.0, 1.0 / (4 * W)]))


def has_equal_partition(items: Sequence[int]) -> bool:
    total = sum(items)
    if total % 2:
        return False
    reach = 1
    for v in items:
        reach |= reach << int(v)
    return bool(reach >> (total // 2) & 1)


# --- completion ------------------------------------------------------------

def _complete(n: int, m: int, fixed: Mapping, target: str) -> ShlNetwork:
    fixed = dict(fixed)
    if len(fixed) > m / 4:
        raise ValueError(f"{len(fixed)} fixed entries exceed m/4 = {m / 4}")
    A = np.full((m, n), np.nan)
    w = np.full(m, np.nan)
    for key, val in fixed.items():
        layer, row, col = key
        if not -1 <= val <= 1:
            raise ValueError(f"fixed weight {val} at {key} outside [-1, 1]")
        if layer == 0:
            A[row, col] = val
        elif layer == 1 and col == 0:
            w[row] = val
        else:
            raise ValueError(f"coordinate {key} does not exist in a one-output network")
    sign = -1.0 if target == "zero" else 1.0
    w = np.where(np.isnan(w), sign, w)
    # rows whose output weight helps the target are switched on, the rest switched off
    helps = (w < 0) if target == "zero" else (w > 0)
    fill = np.where(helps, 1.0, -1.0)[:, None]
    A = np.where(np.isnan(A), fill, A)
    return ShlNetwork(A, w)


def complete_to_zero(n: int, m: int, fixed: Mapping[Coordinate, float]) -> ShlNetwork:
    """Fill every unfixed weight so the network computes the constant 0 function."""
    return _complete(n, m, fixed, "zero")


def complete_to_or(n: int, m: int, fixed: Mapping[Coordinate, float]) -> ShlNetwork:
    """Fill every unfixed weight so the network computes OR."""
    return _complete(n, m, fixed, "or")


# --- repair ----------------------------------------------------------------

class Repair(NamedTuple):
    network: ShlNetwork
    target: str
    first_layer_edits: int
    second_layer_edits: int
    expectation: float
    in_range: bool


def mean_output(net: ShlNetwork, rng: np.random.Generator | None = None,
                exact_limit: int = 20, samples: int = 100_000) -> float:
    """E[w^T relu(Ax)] over uniform x: exact for n <= exact_limit, else Monte Carlo."""
    if net.n <= exact_limit:
        total, chunk = 0.0, 1 << 16
        for start in range(0, 1 << net.n, chunk):
            codes = np.arange(start, min(start + chunk, 1 << net.n), dtype=np.int64)
            X = ((codes[:, None] >> np.arange(net.n)) & 1).astype(np.int8)
            total += float(batch_values(net, X).sum())
        return total / (1 << net.n)
    rng = rng if rng is not None else np.random.default_rng(0)
    acc, left = 0.0, samples
    while left:
        b = min(left, 1 << 14)
        acc += float(batch_values(net, rng.integers(0, 2, size=(b, net.n), dtype=np.int8)).sum())
        left -= b
    return acc / samples


def repair_to_closest(net: ShlNetwork, epsilon: float, rng: np.random.Generator | None = None) -> Repair:
    """Edit at most floor(eps m) hidden nodes so the network computes 0 or OR.

    The sign of the mean output picks the target (ties go to 0). Each edited
    node gets an all-ones row and output weight -1 (target 0) or +1 (OR), so
    it contributes -|x| or +|x|; nodes are taken in order of how much their
    current output weight works against the target.
    """
    m = net.m
    E = mean_output(net, rng)
    target = "or" if E > 0 else "zero"
    budget = math.floor(epsilon * m)
    A, w = net.A.copy(), net.w.copy()
    if target == "zero":
        wrong = np.flatnonzero(w >= 0)
        if wrong.size <= budget:
            w[wrong] = -1.0
        else:
            pick = np.argsort(-w, kind="stable")[:budget]
            A[pick] = 1.0
            w[pick] = -1.0
    else:
        wrong = np.flatnonzero(w <= 0)
        if wrong.size == 0:
            A[int(np.argmax(w))] = 1.0
        elif wrong.size <= budget:
            A[wrong] = 1.0
            w[wrong] = 1.0
        else:
            pick = np.argsort(w, kind="stable")[:budget]
            A[pick] = 1.0
            w[pick] = 1.0
    first = int(np.count_nonzero(A != net.A))
    second = int(np.count_nonzero(w != net.w))
    return Repair(ShlNetwork(A, w), target, first, second, E, epsilon >= 1 / m)


__all__ = [
    "vanilla_hardness_network", "vanilla_block_size", "xi", "gamma_for", "parity_gap",
    "expectation_gap", "check_k_minus_1_wise", "full_tuple_uniform", "parity_tuples",
    "sample_n1", "sample_n2", "n_metadata", "partition_reduction", "has_equal_partition",
    "complete_to_zero", "complete_to_or", "repair_to_closest", "Repair", "mean_output",
    "KSetDistribution",
]

"""Ground truth by enumerating every input, for small networks only."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .network import Network, ShlNetwork, batch_values, output_count

MAX_BITS = 24

Target = Union[str, Sequence[int]]


class TooLargeError(ValueError):
    pass


def _target_bits(net: Network, target: Target) -> np.ndarray:
    r = output_count(net)
    if isinstance(target, str):
        if target not in ("zero", "or"):
            raise ValueError(f"unknown target {target!r}")
        return np.full(r, 1 if target == "or" else 0, dtype=np.int8)
    bits = np.asarray(list(target), dtype=np.int8)
    if bits.shape != (r,):
        raise ValueError(f"target has {bits.size} bits for {r} outputs")
    return bits


def _mismatch_chunks(net: Network, target: Target, chunk: int = 1 << 16):
    """Yield (codes, mismatch-per-row) over all 2^n inputs in ascending code order."""
    n = net.n
    if n > MAX_BITS:
        raise TooLargeError(f"n={n} exceeds the enumeration limit {MAX_BITS}")
    want = _target_bits(net, target)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        X = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)
        vals = batch_values(net, X).reshape(len(codes), -1)
        got = (vals > 0).astype(np.int8)
        expect = np.where(codes[:, None] == 0, 0, want[None, :])
        yield codes, np.any(got != expect, axis=1)


def computes_exactly(net: Network, target: Target) -> bool:
    """True iff the network's output bits equal the target on all 2^n inputs.

    ``target`` is "zero", "or", or a bit per output (near-constant: b on every
    nonzero input, 0 at the zero input).
    """
    return counterexample(net, target) is None


def counterexample(net: Network, target: Target):
    for codes, bad in _mismatch_chunks(net, target):
        hit = np.flatnonzero(bad)
        if hit.size:
            code = int(codes[hit[0]])
            return np.array([(code >> i) & 1 for i in range(net.n)], dtype=np.int8)
    return None


def delta_distance(net: Network, target: Target) -> Fraction:
    """Exact fraction of inputs on which the output bits differ from the target."""
    wrong = sum(int(bad.sum()) for _, bad in _mismatch_chunks(net, target))
    return Fraction(wrong, 1 << net.n)


@dataclass(frozen=True)
class EditSearch:
    status: str  # "close-with-edit" or "exhausted"
    edits: tuple = ()  # ((layer, row, col), new value) pairs
    distance: Fraction | None = None


def _apply(net: ShlNetwork, edits) -> ShlNetwork:
    A, w = net.A.copy(), net.w.copy()
    for (layer, row, col), val in edits:
        if layer == 0:
            A[row, col] = val
        else:
            w[row] = val
    return ShlNetwork(A, w)


def far_certificate_tiny(net: ShlNetwork, target: Target, epsilon: float, delta: float,
                         grid: Sequence[float] = (-1.0, 0.0, 1.0)) -> EditSearch:
    """Search every edit of at most floor(eps n m) first-layer and floor(eps m)
    second-layer weights, with new values from ``grid``.

    "exhausted" only means no edit on this grid works; weights are real-valued,
    so it is not a proof of farness. Smaller edits are tried first.
    """
    if not isinstance(net, ShlNetwork):
        raise TypeError("far_certificate_tiny handles one-hidden-layer networks")
    if net.n * net.m > 12:
        raise TooLargeError(f"n*m = {net.n * net.m} exceeds 12")
    k1 = math.floor(epsilon * net.n * net.m)
    k2 = math.floor(epsilon * net.m)
    first = [(0, j, i) for j in range(net.m) for i in range(net.n)]
    second = [(1, j, 0) for j in range(net.m)]
    current = {c: (net.A[c[1], c[2]] if c[0] == 0 else net.w[c[1]]) for c in first + second}
    for total in range(k1 + k2 + 1):
        for a in range(min(total, k1), -1, -1):
            b = total - a
            if b > k2:
                continue
            for coords in itertools.product(itertools.combinations(first, a), itertools.combinations(second, b)):
                chosen = coords[0] + coords[1]
                options = [[g for g in grid if g != current[c]] for c in chosen]
                for values in itertools.product(*options):
                    edits = tuple(zip(chosen, values))
                    d = delta_distance(_apply(net, edits), target)
                    if d <= delta:
                        return EditSearch("close-with-edit", edits, d)
    return EditSearch("exhausted")


__all__ = ["computes_exactly", "counterexample", "delta_distance", "far_certificate_tiny",
           "EditSearch", "TooLargeError", "MAX_BITS"]

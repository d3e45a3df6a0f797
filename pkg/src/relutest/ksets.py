"""The uniform distribution over indicator vectors of a partition into k-sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def check_k(n: int, k: int) -> None:
    if k < 2 or k % 2 or k % 4 == 0:
        raise ValueError(f"k must be even and not divisible by 4, got {k}")
    if n < k or n % k:
        raise ValueError(f"n must be a positive multiple of k, got n={n}, k={k}")


@dataclass(frozen=True)
class KSetDistribution:
    """Partition ``sets`` of range(n) into n/k blocks of size k.

    A draw is the indicator vector of one block chosen uniformly.
    """

    n: int
    k: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(int(v) for v in s) for s in self.sets)
        flat = sorted(v for s in sets for v in s)
        if any(len(s) != self.k for s in sets) or flat != list(range(self.n)):
            raise ValueError("sets must be disjoint k-sets covering range(n)")
        object.__setattr__(self, "sets", sets)

    @classmethod
    def random(cls, n: int, k: int, rng: np.random.Generator) -> "KSetDistribution":
        perm = rng.permutation(n)
        return cls(n, k, tuple(map(tuple, perm.reshape(n // k, k).tolist())))

    def indicator(self, i: int) -> np.ndarray:
        x = np.zeros(self.n, dtype=np.int8)
        x[list(self.sets[i])] = 1
        return x

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.indicator(int(rng.integers(len(self.sets))))

    def block_of(self) -> np.ndarray:
        """block_of()[v] is the index of the set containing node v."""
        out = np.empty(self.n, dtype=np.int64)
        out[np.asarray(self.sets, dtype=np.int64)] = np.arange(len(self.sets))[:, None]
        return out

    def to_document(self) -> dict:
        return {"n": self.n, "k": self.k, "sets": [list(s) for s in self.sets]}

"""Weight containers for ReLU networks, exact evaluation, the JSON file
format, and a weight oracle that counts distinct coordinates read."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np


class DimensionError(ValueError):
    pass


class FormatError(ValueError):
    pass


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a 0/1 vector of dtype int8, checking length if given."""
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError("bit vector must be one-dimensional and non-empty")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    if n is not None and arr.size != n:
        raise DimensionError(f"expected {n} bits, got {arr.size}")
    return arr.astype(np.int8)


def relu(z):
    return np.maximum(z, 0.0)


def _frozen(mat, ndim: int, name: str) -> np.ndarray:
    arr = np.array(mat, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must have {ndim} dimensions, got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    if arr.size and (arr.min() < -1.0 or arr.max() > 1.0):
        raise ValueError(f"{name} has a weight outside [-1, 1]")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ShlNetwork:
    """One hidden layer: ``A`` is m x n, ``w`` has length m."""

    A: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        A = _frozen(self.A, 2, "A")
        w = _frozen(self.w, 1, "w")
        if A.shape[0] != w.shape[0] or A.shape[1] == 0 or A.shape[0] == 0:
            raise DimensionError(f"A is {A.shape} but w has length {w.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def __eq__(self, other):
        return (isinstance(other, ShlNetwork) and np.array_equal(self.A, other.A)
                and np.array_equal(self.w, other.w))

    def __hash__(self):
        return hash((self.A.tobytes(), self.w.tobytes()))


@dataclass(frozen=True, eq=False)
class MoNetwork:
    """One hidden layer, ``r`` outputs: ``A`` is m x n, ``W`` is m x r."""

    A: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        A = _frozen(self.A, 2, "A")
        W = _frozen(self.W, 2, "W")
        if A.shape[0] != W.shape[0] or min(A.shape) == 0 or W.shape[1] == 0:
            raise DimensionError(f"A is {A.shape} but W is {W.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def r(self) -> int:
        return self.W.shape[1]

    def __eq__(self, other):
        return (isinstance(other, MoNetwork) and np.array_equal(self.A, other.A)
                and np.array_equal(self.W, other.W))

    def __hash__(self):
        return hash((self.A.tobytes(), self.W.tobytes()))


@dataclass(frozen=True, eq=False)
class DeepNetwork:
    """Layers W_0..W_l with W_k of shape m_{k+1} x m_k, and l >= 1."""

    layers: tuple

    def __post_init__(self):
        layers = tuple(_frozen(W, 2, f"layer {k}") for k, W in enumerate(self.layers))
        if len(layers) < 2:
            raise DimensionError("a deep network needs at least one hidden layer")
        for k in range(1, len(layers)):
            if layers[k].shape[1] != layers[k - 1].shape[0]:
                raise DimensionError(
                    f"layer {k} has {layers[k].shape[1]} columns, "
                    f"layer {k - 1} has {layers[k - 1].shape[0]} rows")
        if any(d == 0 for W in layers for d in W.shape):
            raise DimensionError("all layer widths must be positive")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_dims(cls, dims: Sequence[int], fill: float = 0.0) -> "DeepNetwork":
        return cls(tuple(np.full((dims[k + 1], dims[k]), fill) for k in range(len(dims) - 1)))

    @property
    def dims(self) -> tuple:
        return (self.layers[0].shape[1],) + tuple(W.shape[0] for W in self.layers)

    @property
    def ell(self) -> int:
        return len(self.layers) - 1

    @property
    def n(self) -> int:
        return self.dims[0]

    @property
    def outputs(self) -> int:
        return self.dims[-1]

    def __eq__(self, other):
        return (isinstance(other, DeepNetwork) and len(self.layers) == len(other.layers)
                and all(np.array_equal(a, b) for a, b in zip(self.layers, other.layers)))

    def __hash__(self):
        return hash(tuple(W.tobytes() for W in self.layers))


Network = Union[ShlNetwork, MoNetwork, DeepNetwork]


def _sign_bits(values) -> np.ndarray:
    return (np.asarray(values) > 0).astype(np.int8)


def eval_shl(net: ShlNetwork, x) -> tuple[float, int]:
    """Return (w^T relu(Ax), bit) where bit = 1 iff the value is strictly positive."""
    x = as_bits(x, net.n)
    value = float(batch_values(net, x[None, :])[0])
    return value, int(value > 0)


def eval_mo(net: MoNetwork, x) -> tuple[np.ndarray, np.ndarray]:
    x = as_bits(x, net.n)
    values = batch_values(net, x[None, :])[0]
    return values, _sign_bits(values)


def eval_deep(net: DeepNetwork, x) -> tuple[np.ndarray, np.ndarray]:
    x = as_bits(x, net.n)
    f = batch_values(net, x[None, :])[0]
    return f, _sign_bits(f)


def batch_values(net: Network, X: np.ndarray) -> np.ndarray:
    """Output values for each row of ``X`` (shape B x n). Shape B, or B x r.

    Single-output evaluation follows the same operation order as the sampled
    chains in ``sampling``, so a full sample reproduces these values exactly.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.n:
        raise DimensionError(f"inputs must be B x {net.n}")
    if isinstance(net, ShlNetwork):
        return (relu(X @ net.A.T) @ net.w[:, None])[:, 0]
    if isinstance(net, MoNetwork):
        return relu(X @ net.A.T) @ net.W
    f = X @ net.layers[0].T
    for W in net.layers[1:]:
        f = relu(f) @ W.T
    return f


def output_count(net: Network) -> int:
    if isinstance(net, ShlNetwork):
        return 1
    if isinstance(net, MoNetwork):
        return net.r
    return net.outputs


def restrict_output(net: Network, j: int) -> Network:
    """Keep only output ``j`` (zero-based). MoNetwork gives ShlNetwork(A, W[:, j])."""
    r = output_count(net)
    if not 0 <= j < r:
        raise IndexError(f"output index {j} out of range for {r} outputs")
    if isinstance(net, ShlNetwork):
        return ShlNetwork(net.A.copy(), net.w.copy())
    if isinstance(net, MoNetwork):
        return ShlNetwork(net.A.copy(), net.W[:, j].copy())
    layers = [W.copy() for W in net.layers[:-1]] + [net.layers[-1][j:j + 1].copy()]
    return DeepNetwork(tuple(layers))


# --- file format -----------------------------------------------------------

def to_document(net: Network) -> dict:
    if isinstance(net, ShlNetwork):
        return {"type": "shl", "n": net.n, "m": net.m,
                "A": net.A.tolist(), "w": net.w.tolist()}
    if isinstance(net, MoNetwork):
        return {"type": "mo", "n": net.n, "m": net.m, "r": net.r,
                "A": net.A.tolist(), "W": net.W.tolist()}
    if isinstance(net, DeepNetwork):
        return {"type": "deep", "dims": list(net.dims),
                "layers": [W.tolist() for W in net.layers]}
    raise TypeError(f"not a network: {type(net).__name__}")


def _reject_constant(token):
    raise FormatError(f"non-finite number {token!r} in network document")


def _matrix(doc: dict, key: str, rows: int, cols: int) -> np.ndarray:
    try:
        arr = np.array(doc[key], dtype=np.float64)
    except KeyError:
        raise FormatError(f"missing field {key!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r} is not a numeric matrix") from exc
    if arr.shape != (rows, cols):
        raise FormatError(f"field {key!r} has shape {arr.shape}, expected {(rows, cols)}")
    return arr


def from_document(doc: dict) -> Network:
    if not isinstance(doc, dict) or "type" not in doc:
        raise FormatError("network document must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "shl":
            n, m = int(doc["n"]), int(doc["m"])
            A = _matrix(doc, "A", m, n)
            return ShlNetwork(A, _matrix({"w": [doc["w"]]}, "w", 1, m)[0])
        if kind == "mo":
            n, m, r = int(doc["n"]), int(doc["m"]), int(doc["r"])
            return MoNetwork(_matrix(doc, "A", m, n), _matrix(doc, "W", m, r))
        if kind == "deep":
            dims = [int(d) for d in doc["dims"]]
            layers = doc["layers"]
            if len(layers) != len(dims) - 1:
                raise FormatError(f"{len(layers)} layers for dims {dims}")
            return DeepNetwork(tuple(
                _matrix({"L": L}, "L", dims[k + 1], dims[k]) for k, L in enumerate(layers)))
    except KeyError as exc:
        raise FormatError(f"missing field {exc.args[0]!r}") from None
    except DimensionError as exc:
        raise FormatError(str(exc)) from exc
    raise FormatError(f"unknown network type {kind!r}")


def serialize(net: Network) -> bytes:
    return json.dumps(to_document(net), allow_nan=False, separators=(",", ":")).encode("utf-8")


def deserialize(data: bytes | str) -> Network:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed network document: {exc}") from exc
    return from_document(doc)


# --- query-counting oracle -------------------------------------------------

def _layer_matrices(net: Network) -> list[np.ndarray]:
    # layer 1 of a single-output network is w viewed as an m x 1 column
    if isinstance(net, ShlNetwork):
        return [net.A, net.w[:, None]]
    if isinstance(net, MoNetwork):
        return [net.A, net.W]
    return list(net.layers)


class WeightOracle:
    """Read access to weights, addressed as (layer, row, col).

    Layer 0 is input -> first hidden. For a one-hidden-layer network the
    second layer ``w`` (or ``W``) is layer 1 with rows indexed by hidden node
    and columns by output. Deep layers keep their native m_{k+1} x m_k shape.
    """

    def __init__(self, net: Network):
        self.net = net
        self._mats = _layer_matrices(net)
        self._seen: list[set[int]] = [set() for _ in self._mats]

    @property
    def count(self) -> int:
        return sum(len(s) for s in self._seen)

    @property
    def queried(self) -> set[tuple[int, int, int]]:
        out = set()
        for layer, seen in enumerate(self._seen):
            cols = self._mats[layer].shape[1]
            out.update((layer, f // cols, f % cols) for f in seen)
        return out

    def shape(self, layer: int) -> tuple[int, int]:
        return self._mats[layer].shape

    def get(self, layer: int, row: int, col: int) -> float:
        M = self._mats[layer]
        if not (0 <= row < M.shape[0] and 0 <= col < M.shape[1]):
            raise IndexError(f"coordinate {(layer, row, col)} out of range")
        self._seen[layer].add(row * M.shape[1] + col)
        return float(M[row, col])

    def block(self, layer: int, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
        """Read the submatrix ``rows x cols`` of a layer, recording every entry."""
        M = self._mats[layer]
        rows = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=np.int64)
        cols = np.asarray(list(cols) if not isinstance(cols, np.ndarray) else cols, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= M.shape[0]):
            raise IndexError(f"row index out of range for layer {layer}")
        if cols.size and (cols.min() < 0 or cols.max() >= M.shape[1]):
            raise IndexError(f"column index out of range for layer {layer}")
        flat = (rows[:, None] * M.shape[1] + cols[None, :]).ravel()
        self._seen[layer].update(flat.tolist())
        return M[np.ix_(rows, cols)].copy()


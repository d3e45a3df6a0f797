"""Network generators by name, tester dispatch, and CSV experiments."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from . import constructions as C
from .deep import all_zero_tester_mhl, near_constant_tester, or_tester_mhl
from .distfree import distinguishing_game, pair_hunting_tester, random_guess_tester
from .monotone import constant_generator, load_truth_table, monotone_property_tester, or_generator
from .network import DeepNetwork, MoNetwork, Network, ShlNetwork
from .sampling import ConfigError, TesterConfig
from .seeds import derive_seed, run_trials
from .stats import wilson_interval
from .testers import (
    Verdict, all_zero_tester, one_sided_or_tester, one_sided_zero_tester, or_tester, vanilla_tester,
)

GENERATORS = ("random", "nonpositive", "all-zero", "all-ones", "vanilla-hard", "n1", "n2",
              "partition", "complete-zero", "complete-or")
TESTERS = ("all-zero", "or", "one-sided-zero", "one-sided-or", "vanilla", "all-zero-mhl", "or-mhl",
           "near-constant", "monotone")
CSV_HEADER = ("label", "tester", "world", "trials", "budget", "accepts", "accept_rate", "advantage",
              "ci_low", "ci_high", "mean_queries", "sizes", "seed")


def _need(params: Mapping, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return [params[k] for k in keys]


def _dense(params: Mapping, rng, fill) -> Network:
    """Build a network of the requested shape with entries from ``fill(shape)``."""
    if "dims" in params:
        dims = [int(d) for d in params["dims"]]
        return DeepNetwork(tuple(fill((dims[k + 1], dims[k])) for k in range(len(dims) - 1)))
    n, m = (int(v) for v in _need(params, "n", "m"))
    if int(params.get("r", 0)) >= 1:
        return MoNetwork(fill((m, n)), fill((m, int(params["r"]))))
    return ShlNetwork(fill((m, n)), fill((m,)))


def _random_fixed(n: int, m: int, count: int, rng) -> dict:
    coords = [(0, j, i) for j in range(m) for i in range(n)] + [(1, j, 0) for j in range(m)]
    pick = rng.choice(len(coords), size=count, replace=False)
    return {coords[p]: float(rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0])) for p in sorted(pick.tolist())}


def make_network(kind: str, params: Mapping[str, Any], rng: np.random.Generator) -> tuple[Network, dict]:
    """Construct a network of the named kind; returns (network, metadata)."""
    meta: dict = {"kind": kind, "params": dict(params)}
    if kind == "random":
        net = _dense(params, rng, lambda shape: rng.uniform(-1, 1, shape))
    elif kind == "nonpositive":
        net = _dense(params, rng, lambda shape: rng.uniform(-1, 1, shape))
        if isinstance(net, DeepNetwork):
            net = DeepNetwork(net.layers[:-1] + (-np.abs(net.layers[-1]),))
        elif isinstance(net, ShlNetwork):
            net = ShlNetwork(net.A, -np.abs(net.w))
        else:
            net = MoNetwork(net.A, -np.abs(net.W))
    elif kind == "all-zero":
        net = _dense(params, rng, np.zeros)
    elif kind == "all-ones":
        net = _dense(params, rng, np.ones)
    elif kind == "vanilla-hard":
        n, eps = _need(params, "n", "eps")
        net = C.vanilla_hardness_network(int(n), float(eps))
    elif kind in ("n1", "n2"):
        n, k = (int(v) for v in _need(params, "n", "k"))
        net, dist = (C.sample_n1 if kind == "n1" else C.sample_n2)(n, k, rng)
        meta.update(C.n_metadata(kind, dist))
    elif kind == "partition":
        (items,) = _need(params, "items")
        net = C.partition_reduction([int(v) for v in items])
        meta["has_equal_partition"] = C.has_equal_partition([int(v) for v in items])
    elif kind in ("complete-zero", "complete-or"):
        n, m = (int(v) for v in _need(params, "n", "m"))
        if "fixed" in params:
            fixed = {(int(a), int(b), int(c)): float(v) for a, b, c, v in params["fixed"]}
        else:
            fixed = _random_fixed(n, m, int(params.get("num_fixed", m // 4)), rng)
        build = C.complete_to_zero if kind == "complete-zero" else C.complete_to_or
        net = build(n, m, fixed)
        meta["fixed"] = [[*c, v] for c, v in fixed.items()]
    else:
        raise ConfigError(f"unknown generator {kind!r}; choose from {', '.join(GENERATORS)}")
    return net, meta


def _generator_fn(spec, n: int):
    if spec in (None, "or"):
        return or_generator(n)
    if spec in ("const0", "const1"):
        return constant_generator(n, int(spec[-1]))
    return load_truth_table(spec)


def run_tester(name: str, net: Network, cfg: TesterConfig, rng: np.random.Generator,
               sizes=None, options: Mapping | None = None) -> Verdict:
    options = options or {}
    if name in ("all-zero", "or", "one-sided-zero", "one-sided-or", "vanilla", "monotone") \
            and not isinstance(net, ShlNetwork):
        raise ConfigError(f"tester {name!r} needs a one-output, one-hidden-layer network")
    if name == "all-zero":
        return all_zero_tester(net, cfg, rng, sizes=sizes)
    if name == "or":
        return or_tester(net, cfg, rng, sizes=sizes)
    if name in ("one-sided-zero", "one-sided-or"):
        run = one_sided_zero_tester if name == "one-sided-zero" else one_sided_or_tester
        return run(net, cfg, rng, size=None if sizes is None else int(sizes[0]))
    if name == "vanilla":
        return vanilla_tester(net, int(options.get("samples", 1000)), rng)
    if name in ("all-zero-mhl", "or-mhl"):
        if not isinstance(net, DeepNetwork):
            raise ConfigError(f"tester {name!r} needs a deep network")
        return (all_zero_tester_mhl if name == "all-zero-mhl" else or_tester_mhl)(net, cfg, rng, sizes=sizes)
    if name == "near-constant":
        if "b" not in options:
            raise ConfigError("near-constant tester needs the target bits b")
        return near_constant_tester(net, [int(v) for v in options["b"]], cfg, rng, sizes=sizes)
    if name == "monotone":
        return monotone_property_tester(net, _generator_fn(options.get("generator"), net.n), cfg, rng,
                                        sizes=sizes)
    raise ConfigError(f"unknown tester {name!r}; choose from {', '.join(TESTERS)}")


def config_from(mapping: Mapping, seed: int) -> TesterConfig:
    return TesterConfig(epsilon=float(mapping.get("eps", 0.25)), delta=float(mapping.get("delta", 0.5)),
                        lam=float(mapping.get("lambda", 1 / 3)), constant_scale=float(mapping.get("scale", 1.0)),
                        enum_cap=int(mapping.get("enum_cap", 24)), seed=int(seed))


@dataclass(frozen=True)
class TrialOutcome:
    accepted: bool
    queries: int
    sizes: tuple


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _tester_row(label: str, row: Mapping, trials: int, seed: int, workers: int) -> dict:
    gen = row.get("generator", {})
    kind = gen.get("kind", "random")
    params = {k: v for k, v in gen.items() if k != "kind"}
    tester = row.get("tester", "all-zero")
    sizes = row.get("sizes")
    options = row.get("options", {})

    def one(t: int) -> TrialOutcome:
        net, _ = make_network(kind, params, np.random.default_rng(derive_seed(seed, t, f"{label}/net")))
        tseed = derive_seed(seed, t, f"{label}/tester")
        cfg = config_from(row.get("cfg", {}), tseed)
        v = run_tester(tester, net, cfg, np.random.default_rng(tseed), sizes, options)
        return TrialOutcome(v.accepted, v.queries, tuple(v.sizes))

    results = run_trials(one, trials, workers)
    accepts = sum(r.accepted for r in results)
    lo, hi = wilson_interval(accepts, trials)
    seen = sorted({"x".join(map(str, r.sizes)) for r in results})
    return {"label": label, "tester": tester, "world": "", "trials": trials, "budget": "",
            "accepts": accepts, "accept_rate": _fmt(accepts / trials), "advantage": "",
            "ci_low": _fmt(lo), "ci_high": _fmt(hi),
            "mean_queries": _fmt(sum(r.queries for r in results) / trials), "sizes": "|".join(seen),
            "seed": seed}


def _game_row(label: str, row: Mapping, trials: int, seed: int, workers: int) -> dict:
    game = row["game"]
    n, k, budget = int(game["n"]), int(game.get("k", 2)), int(game["budget"])
    name = game.get("tester", "pair-hunting")
    testers = {"pair-hunting": pair_hunting_tester, "random-guess": random_guess_tester}
    if name not in testers:
        raise ConfigError(f"unknown game tester {name!r}")
    res = distinguishing_game(testers[name], n, k, budget, trials, derive_seed(seed, 0, f"{label}/game"), workers)
    return {"label": label, "tester": name, "world": "N2-vs-N1", "trials": trials, "budget": budget,
            "accepts": "", "accept_rate": "", "advantage": _fmt(res.advantage),
            "ci_low": _fmt(res.ci_low), "ci_high": _fmt(res.ci_high), "mean_queries": _fmt(budget),
            "sizes": "", "seed": seed}


def run_experiment(spec: Mapping, seed: int | None = None, trials: int | None = None,
                   workers: int = 1) -> str:
    """Run every row of an experiment document and return the CSV text."""
    if "rows" not in spec or not isinstance(spec["rows"], list):
        raise ConfigError("experiment document needs a list under 'rows'")
    seed = int(spec.get("seed", 0) if seed is None else seed)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for i, row in enumerate(spec["rows"]):
        label = str(row.get("label", f"row{i}"))
        count = int(trials if trials is not None else row.get("trials", 100))
        if count < 1:
            raise ConfigError("trials must be positive")
        build = _game_row if "game" in row else _tester_row
        writer.writerow(build(label, row, count, seed, workers))
    return buf.getvalue()


def load_experiment(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

"""Command line: ``relutest gen``, ``relutest test`` and ``relutest experiment``.

Exit codes: 0 on success, 2 for configuration or input errors, 3 when an
exhaustive search would exceed the enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .harness import GENERATORS, TESTERS, config_from, load_experiment, make_network, run_experiment, run_tester
from .network import FormatError, DimensionError, deserialize, serialize
from .sampling import ConfigError, EnumerationTooLarge

EXIT_CONFIG = 2
EXIT_ENUM = 3


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--lambda", dest="lam", type=float, default=1 / 3)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--enum-cap", type=int, default=24)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relutest", description="Property testers for ReLU networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a network file and its metadata sidecar")
    g.add_argument("kind", choices=GENERATORS)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--dims", type=_ints)
    g.add_argument("--k", type=int)
    g.add_argument("--items", type=_ints)
    g.add_argument("--num-fixed", type=int)
    _common(g)

    t = sub.add_parser("test", help="run one tester on a network file")
    t.add_argument("tester", choices=TESTERS)
    t.add_argument("network", type=Path)
    t.add_argument("--sizes", type=_ints, default=None, help="explicit per-layer sample sizes")
    t.add_argument("--samples", type=int, default=1000, help="input samples for the vanilla tester")
    t.add_argument("--b", type=str, default=None, help="near-constant target bits, e.g. 0110")
    t.add_argument("--generator", type=str, default=None, help="or, const0, const1 or a truth-table file")
    _common(t)

    e = sub.add_parser("experiment", help="run an experiment document and write CSV")
    e.add_argument("spec", type=Path)
    e.add_argument("--workers", type=int, default=1)
    _common(e)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_gen(args) -> int:
    params = {k: v for k, v in (("n", args.n), ("m", args.m), ("r", args.r), ("dims", args.dims),
                                ("k", args.k), ("items", args.items), ("num_fixed", args.num_fixed))
              if v is not None}
    if args.kind == "vanilla-hard":
        params["eps"] = args.eps
    seed = args.seed or 0
    net, meta = make_network(args.kind, params, np.random.default_rng(seed))
    meta["seed"] = seed
    if args.out is None:
        sys.stdout.write(serialize(net).decode() + "\n")
        return 0
    args.out.write_bytes(serialize(net))
    Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, sort_keys=True, indent=1), encoding="utf-8")
    return 0


def cmd_test(args) -> int:
    net = deserialize(args.network.read_bytes())
    cfg = config_from({"eps": args.eps, "delta": args.delta, "lambda": args.lam, "scale": args.scale,
                       "enum_cap": args.enum_cap}, args.seed or 0)
    options = {"samples": args.samples, "generator": args.generator}
    if args.b is not None:
        options["b"] = list(args.b)
    verdict = run_tester(args.tester, net, cfg, cfg.rng(), args.sizes, options)
    record = verdict.to_record()
    record.update({"tester": args.tester, "seed": args.seed or 0})
    _emit(json.dumps(record, sort_keys=True) + "\n", args.out)
    return 0


def cmd_experiment(args) -> int:
    spec = load_experiment(args.spec)
    _emit(run_experiment(spec, seed=args.seed, trials=args.trials, workers=args.workers), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"gen": cmd_gen, "test": cmd_test, "experiment": cmd_experiment}
    try:
        return handlers[args.command](args)
    except EnumerationTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUM
    except (ConfigError, FormatError, DimensionError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

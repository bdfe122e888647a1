"""Command-line entry point: build, error, verify-lemma, diagnose, simplex."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import targets
from .coding import BudgetError
from .construct import assemble_lp_net, assemble_uniform_net, uniform_budget
from .geometry import (counterexample_curve, load_corpus, random_corpus, run_corpus, simplex_bound,
                       write_curve_csv)
from .metrics import Quadrature, error_report, lp_error, sup_error
from .net import NonDyadicError, SchemaError, evaluate, load, save
from .verify import SUITES, run_suite

MODES = ("uniform-step", "lp-relu")

BUILD_REPORT_SCHEMA = {
    "type": "object",
    "required": ["mode", "target", "dx", "dy", "width", "depth", "n_params", "bound", "measured_error",
                 "norm", "numeric", "network"],
    "properties": {
        "mode": {"enum": list(MODES)},
        "width": {"type": "integer", "minimum": 1},
        "depth": {"type": "integer", "minimum": 1},
        "n_params": {"type": "integer", "minimum": 0},
        "bound": {"type": "number"},
        "measured_error": {"type": "number"},
        "norm": {"enum": ["sup", "lp"]},
        "numeric": {"enum": ["float64", "dyadic"]},
        "uses_step": {"type": "boolean"},
    },
}


def numeric_mode() -> str:
    mode = os.environ.get("MINWIDTH_NUMERIC", "float64")
    if mode not in ("float64", "dyadic"):
        raise ValueError(f"MINWIDTH_NUMERIC must be float64 or dyadic, got {mode!r}")
    return mode


@dataclass
class RunConfig:
    """Resolved settings for one build: spec-file values overridden by flags."""

    target: str = "builtin:product-mean-absdiff"
    mode: str = "uniform-step"
    dx: int | None = None
    dy: int | None = None
    lipschitz: float | None = None
    k: int = 4
    m: int = 4
    gamma: float = 0.01
    p: float = 2.0
    alpha: float | None = None
    delta: float | None = None
    grid: int | None = None
    seed: int = 0
    numeric: str = field(default_factory=numeric_mode)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        cfg = cls()
        spec = args.target
        if spec and Path(spec).suffix.lower() in (".toml", ".json") and Path(spec).is_file():
            cfg.update(read_spec(spec))
        elif spec:
            cfg.target = spec
        cfg.update({k: getattr(args, k) for k in ("mode", "k", "m", "gamma", "p", "alpha", "delta", "grid", "seed")
                    if getattr(args, k, None) is not None})
        if cfg.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        return cfg

    def update(self, values: dict) -> None:
        for k, v in values.items():
            if k not in self.__dataclass_fields__:
                raise ValueError(f"unknown setting {k!r}")
            setattr(self, k, v)

    def resolve_target(self) -> targets.TargetFunction:
        return targets.resolve(self.target, self.dx, self.dy, self.lipschitz)


def read_spec(path) -> dict:
    """Target spec document (TOML or JSON)."""
    path = Path(path)
    raw = path.read_bytes()
    doc = tomllib.loads(raw.decode()) if path.suffix.lower() == ".toml" else json.loads(raw)
    if "target" not in doc:
        raise ValueError(f"{path}: missing 'target'")
    kind, _, arg = doc["target"].partition(":")
    if kind in ("table", "pl") and not Path(arg).is_absolute():
        doc["target"] = f"{kind}:{path.parent / arg}"
    return doc


def default_grid(dx: int) -> int:
    # keep the sup-norm grid near 4*10^4 points regardless of dimension
    return max(2, min(201, int(round(40401 ** (1.0 / dx)))))


def off_cube_points(dx: int, n: int = 2000, seed: int = 0) -> np.ndarray:
    X = np.random.default_rng(seed).uniform(-3.0, 4.0, (4 * n, dx))
    return X[np.any((X < 0) | (X > 1), axis=1)][:n]


def build(cfg: RunConfig) -> tuple:
    """Build the network for ``cfg``; returns (network, report dict)."""
    target = cfg.resolve_target()
    grid = cfg.grid or default_grid(target.dx)
    started = time.perf_counter()
    if cfg.mode == "uniform-step":
        net = assemble_uniform_net(target, cfg.k, cfg.m)
        bound = uniform_budget(target, cfg.k, cfg.m)
        extra = {}
        built = time.perf_counter()
        measured = sup_error(net, target, Quadrature("grid", grid))
        norm, p = "sup", None
    else:
        cons = assemble_lp_net(target, cfg.k, cfg.m, cfg.gamma, cfg.p, cfg.alpha, cfg.delta)
        net, bound = cons.net, cons.bound
        extra = cons.report()
        built = time.perf_counter()
        measured = lp_error(net, target, cfg.p, Quadrature("grid", grid))
        extra["off_cube_max_abs"] = float(np.max(np.abs(evaluate(net, off_cube_points(target.dx, seed=cfg.seed)))))
        norm, p = "lp", cfg.p
    report = {
        "mode": cfg.mode, "target": target.name, "dx": target.dx, "dy": target.dy,
        "lipschitz": target.lipschitz, "k": cfg.k, "m": cfg.m,
        "width": net.width, "depth": net.depth, "n_params": net.n_params,
        "uses_step": net.uses("step"), "norm": norm, "p": p, "grid": grid,
        "bound": bound, "measured_error": measured, "within_bound": measured <= bound,
        "build_seconds": built - started, "measure_seconds": time.perf_counter() - built,
        "numeric": cfg.numeric, "network": None,
        **extra,
    }
    return net, report


def cmd_build(args) -> int:
    cfg = RunConfig.from_args(args)
    net, report = build(cfg)
    out = Path(args.out)
    save(net, out, cfg.numeric)
    report["network"] = str(out)
    jsonschema.validate(report, BUILD_REPORT_SCHEMA)
    report_path = Path(args.report) if args.report else out.with_suffix(".report.json")
    report_path.write_text(json.dumps(report, indent=2))
    print(json.dumps(report, indent=2))
    return 0 if report["within_bound"] else 1


def cmd_error(args) -> int:
    net = load(args.net)
    spec = args.target
    if Path(spec).suffix.lower() in (".toml", ".json") and Path(spec).is_file():
        doc = read_spec(spec)
        target = targets.resolve(doc["target"], doc.get("dx", net.dx), doc.get("dy", net.dy), doc.get("lipschitz"))
    else:
        target = targets.resolve(spec, net.dx, net.dy)
    if args.seed is not None:
        q = Quadrature("monte-carlo", args.grid or 100_000, args.seed)
    else:
        q = Quadrature("grid", args.grid or default_grid(net.dx))
    rep = error_report(net, target, args.norm, args.p, q, args.bound)
    print(rep.to_json())
    return 0 if rep.within_bound in (None, True) else 1


def cmd_verify(args) -> int:
    params = {k: getattr(args, k) for k in ("dx", "dy", "alpha", "delta", "gamma", "samples", "seed", "count", "grid")}
    params.update(K=args.k, M=args.m, numeric=numeric_mode())
    checks = run_suite(args.name, **params)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.name}: {len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_diagnose(args) -> int:
    if args.emit_curve:
        write_curve_csv(args.emit_curve, counterexample_curve())
        print(f"wrote {args.emit_curve}")
        if args.random is None and args.corpus is None:
            return 0
    started = time.perf_counter()
    if args.corpus is not None:
        nets = load_corpus(args.corpus)
    else:
        nets = random_corpus(args.random if args.random is not None else 1000, args.seed, args.refined, args.iters)
    reports, summary = run_corpus(nets)
    summary["seconds"] = time.perf_counter() - started
    if args.out:
        with open(args.out, "w") as fh:
            for r in reports:
                fh.write(json.dumps(r.to_dict()) + "\n")
    print(json.dumps(summary, indent=2))
    if summary["certified"]:
        print(f"FAIL {summary['certified']} network(s) certified within 1/100 of the target curve", file=sys.stderr)
        return 1
    return 0


def cmd_simplex(args) -> int:
    res = simplex_bound(args.dy, args.p, args.trials, args.seed)
    out = res.as_dict()
    floor = res.geometric_bound * (1 - 1e-12)
    ok = res.refined_min is None or (res.monte_carlo_min >= floor and res.refined_min >= floor)
    out["never_below_bound"] = ok
    print(json.dumps(out, indent=2))
    return 0 if ok else 1


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minwidth", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an approximating network and report its error")
    b.add_argument("--mode", choices=MODES)
    b.add_argument("--target", default=None, help="spec file (.toml/.json) or builtin:/table:/pl: string")
    b.add_argument("--k", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--gamma", type=float)
    b.add_argument("--p", type=float)
    b.add_argument("--alpha", type=float)
    b.add_argument("--delta", type=float)
    b.add_argument("--grid", type=int, help="points per axis for the error measurement")
    b.add_argument("--seed", type=int)
    b.add_argument("--out", required=True, help="network document path")
    b.add_argument("--report", help="report path (default: <out>.report.json)")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("error", help="measure a saved network against a target")
    e.add_argument("--net", required=True)
    e.add_argument("--target", required=True)
    e.add_argument("--norm", choices=("sup", "lp"), default="sup")
    e.add_argument("--p", type=float, default=None)
    e.add_argument("--grid", type=int, default=None, help="points per axis, or sample count with --seed")
    e.add_argument("--seed", type=int, default=None, help="use Monte-Carlo quadrature with this seed")
    e.add_argument("--bound", type=float, default=None, help="exit nonzero when the error exceeds this")
    e.set_defaults(func=cmd_error)

    v = sub.add_parser("verify-lemma", help="run a construction's oracle suite")
    v.add_argument("name", choices=sorted(SUITES))
    for flag, kind in (("k", int), ("m", int), ("dx", int), ("dy", int), ("alpha", float), ("delta", float),
                       ("gamma", float), ("samples", int), ("seed", int), ("count", int), ("grid", int)):
        v.add_argument(f"--{flag}", type=kind)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("diagnose", help="width-2 counterexample diagnostics")
    src = d.add_mutually_exclusive_group()
    src.add_argument("--random", type=int, help="number of random width-2 nets")
    src.add_argument("--corpus", help="directory of network documents")
    d.add_argument("--refined", type=int, default=0, help="extra local-search-refined nets")
    d.add_argument("--iters", type=int, default=300, help="local-search iterations per refined net")
    d.add_argument("--emit-curve", nargs="?", const="curve.csv", default=None, help="write the target curve CSV")
    d.add_argument("--out", help="write one JSON report per line")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("simplex", help="simplex lower bound for width dy-1")
    s.add_argument("--dy", type=int, required=True)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simplex)
    return ap


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetError, NonDyadicError, SchemaError, ValueError, KeyError, OSError) as e:
        print(f"minwidth {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

Exit codes: 0 when every check passes, 1 when any fails, 2 on a resource
abort or an invalid config.
"""
from __future__ import annotations

import argparse
import sys

from ..core import InputError, ResourceError
from ..covers import PropertyViolation
from .experiments import ExperimentConfig, run_experiment
from .lowerbounds import add_points_experiment, ternary_lower_bound_experiment
from .report import emit
from .suite import (c15_separation, c16_conversions, c01_nonuniform_cover, determinism, run_suite,
                    suite_configs, suite_text)

EXIT_PASS, EXIT_FAIL, EXIT_ABORT = 0, 1, 2

# subcommand -> built-in config
PRESETS = {
    "agnostic": "agnostic-noisy", "malicious": "malicious", "robust": "robust", "partial": "partial",
    "semiprivate": "semiprivate", "stable": "stable", "covshift": "covshift", "sq": "sq", "fair": "fair",
    "pseudometric": "pseudometric", "bounded": "bounded",
}


def _report_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default: the config's)")
    p.add_argument("--trials", type=int, default=None, help="number of trials (default: the config's)")
    p.add_argument("--out", default=None, help="write the report here as well as to stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _run_config(cfg: ExperimentConfig, args) -> int:
    rep = run_experiment(cfg, trials=args.trials, seed=args.seed)
    sys.stdout.write(emit(rep, args.format, args.out))
    agg = rep.aggregate()
    if agg["defined"]:
        print(f"# {cfg.name}: {agg['successes']}/{agg['trials']} successes, frequency {agg['frequency']:.4f}, "
              f"bound {agg['bound']:.4f}, {'PASS' if rep.passed else 'FAIL'}", file=sys.stderr)
    if not rep.complete:
        print(f"# incomplete: {rep.note}", file=sys.stderr)
        return EXIT_ABORT
    if not agg["defined"]:
        return EXIT_PASS
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_run(args) -> int:
    return _run_config(ExperimentConfig.load(args.config), args)


def cmd_preset(args) -> int:
    name = PRESETS[args.command]
    return _run_config(ExperimentConfig.from_dict(dict(suite_configs()[name], name=name)), args)


def cmd_covers(args) -> int:
    seed = 0 if args.seed is None else args.seed
    fn = {"nonuniform": c01_nonuniform_cover, "uniform": c16_conversions, "separation": c15_separation}
    r = fn[args.mode](seed)
    print(r.text())
    return EXIT_PASS if r.passed else EXIT_FAIL


def cmd_lowerbound(args) -> int:
    if args.kind == "ternary":
        r = ternary_lower_bound_experiment(args.k, args.m, args.c, n=args.n)
        print(f"expected loss {r.expected} = {float(r.expected):.9f}, bar {r.bar:.9f}, "
              f"{'PASS' if r.passed else 'FAIL'}")
        return EXIT_PASS if r.passed else EXIT_FAIL
    r = add_points_experiment(args.gamma, args.c1, trials=args.trials, seed=args.seed)
    print(f"OPT {r.opt:.6f}, mean error {r.mean_error:.6f}, lower bound {r.lower:.6f}, "
          f"identical padding {r.identical_padding}, {'PASS' if r.passed else 'FAIL'}")
    return EXIT_PASS if r.passed in (True, None) else EXIT_FAIL


def cmd_verify(args) -> int:
    only = set(args.only) if args.only else None
    results = run_suite(args.seed, only)
    first = suite_text(results, args.seed)
    text = first
    if only is None:
        det = determinism(args.seed, first)
        results.append(det)
        text = first + det.text() + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    failed = [r.number for r in results if not r.passed]
    print(f"# {len(results) - len(failed)}/{len(results)} criteria passed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coverlab", description="Cover-based agnostic learning reductions.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment config (TOML)")
    p.add_argument("config")
    _report_args(p)
    p.set_defaults(fn=cmd_run)
    for name in PRESETS:
        p = sub.add_parser(name, help=f"run the built-in {name} experiment")
        _report_args(p)
        p.set_defaults(fn=cmd_preset)
    p = sub.add_parser("covers", help="cover construction checks")
    p.add_argument("--mode", choices=("nonuniform", "uniform", "separation"), default="nonuniform")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_covers)
    p = sub.add_parser("lowerbound", help="lower-bound experiments")
    p.add_argument("kind", choices=("ternary", "add-points"))
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--n", type=int, default=2, help="label grid side for the ternary loss")
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--c1", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_lowerbound)
    p = sub.add_parser("verify-suite", help="run the acceptance battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers (skips the determinism rerun)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResourceError as exc:
        print(f"resource abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except (InputError, PropertyViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())

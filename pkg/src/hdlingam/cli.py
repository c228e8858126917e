"""Command-line interface: ``hdlingam discover | simulate | bench``.

Exit codes: 0 success, 1 internal error, 2 malformed input or invalid
arguments, 3 constant variable in the input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .datagen import FAMILIES, GeneratorConfig, synthesize
from .io import (CsvFormatError, dumps, format_dataset, format_records,
                 read_dataset, write_json)
from .linalg import ConstantRowError, RidgeConfig
from .parallel import default_jobs
from .sparse import PATH_LEN

log = logging.getLogger("hdlingam")

EXIT_INTERNAL, EXIT_INPUT, EXIT_CONSTANT = 1, 2, 3


class UsageError(ValueError):
    pass


def _positive_int(name, value, minimum=1):
    if value < minimum:
        raise UsageError(f"--{name} must be at least {minimum}, got {value}")


def _common(args) -> RidgeConfig:
    if args.tau < 0:
        raise UsageError(f"--tau must be nonnegative, got {args.tau}")
    _positive_int("path-len", args.path_len, 2)
    if args.jobs is not None:
        _positive_int("jobs", args.jobs)
    return RidgeConfig(args.tau)


def _generator(args) -> GeneratorConfig:
    _positive_int("p", args.p, 2)
    _positive_int("n", args.n, 2)
    families = tuple(args.noise_families.split(",")) if args.noise_families else FAMILIES
    try:
        return GeneratorConfig(p=args.p, n=args.n, expected_degree=args.expected_degree,
                               seed=args.seed, noise_families=families)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_discover(args) -> int:
    from .pipeline import fit_lingam

    cfg = _common(args)
    data = read_dataset(args.input, transpose=args.transpose)
    jobs = args.jobs or default_jobs()
    fit = fit_lingam(data, cfg, jobs=jobs, path_len=args.path_len)
    result = {
        "tool": "hdlingam",
        "version": __version__,
        "config": {"input": str(args.input), "transpose": args.transpose,
                   "tau": cfg.tau, "path_len": args.path_len},
        "var_ids": data.var_ids,
        "order": [data.var_ids[i] for i in fit.order.order],
        "B": fit.direct.B,
        "A": fit.total.A,
    }
    _emit(dumps(result), args.output)
    return 0


def cmd_simulate(args) -> int:
    gen = _generator(args)
    data, truth = synthesize(gen, stream=args.stream)
    config = dict(gen.to_dict(), stream=args.stream, resolved_expected_degree=truth.expected_degree)
    meta = {"tool": "hdlingam", "version": __version__, "command": "simulate", "config": config}
    Path(args.data).write_text(format_dataset(data, meta))
    write_json(args.truth, {
        **meta,
        "seed": gen.seed,
        "var_ids": data.var_ids,
        "permutation": truth.permutation,
        "B_true": truth.B_true,
        "A_true": truth.A_true,
        "noise": {"family": truth.families, "variance": truth.noise_var,
                  "mean": truth.noise_mean},
    })
    return 0


def cmd_bench(args) -> int:
    from .bench import METHODS, run_trials

    cfg = _common(args)
    gen = _generator(args)
    _positive_int("trials", args.trials)
    methods = args.methods.split(",") if args.methods else list(METHODS)
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    jobs = args.jobs or default_jobs()
    records, summary = run_trials(gen, methods, args.trials, cfg.tau, jobs,
                                  args.timing, args.path_len)
    # jobs is left out on purpose: outputs must not depend on it
    config = dict(gen.to_dict(), tau=cfg.tau, trials=args.trials, methods=methods,
                  path_len=args.path_len, timing=args.timing)
    meta = {"tool": "hdlingam", "version": __version__, "command": "bench", "config": config}
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trials.csv").write_text(format_records(records, meta))
    write_json(out / "summary.json", {**meta, "seed": gen.seed, "summary": summary})
    for method, targets in summary.items():
        for target, e in targets.items():
            log.info("%-7s %-6s accuracy %s coverage %s", method, target,
                     _f(e["accuracy"]["median"]), _f(e["coverage"]["median"]))
    return 0


def _f(x):
    return "n/a" if x is None else f"{x:.3f}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdlingam",
        description="High-dimensional LiNGAM causal discovery and benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--tau", type=float, default=0.01, help="ridge parameter (default 0.01)")
        p.add_argument("--path-len", type=int, default=PATH_LEN,
                       help="regularization path length (default %(default)s)")
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: available cores)")

    def generator_flags(p):
        p.add_argument("--p", type=int, default=100, help="number of variables")
        p.add_argument("--n", type=int, default=30, help="number of samples")
        p.add_argument("--expected-degree", type=float, default=None,
                       help="expected adjacent variables per node (default: 2 or 5 at random)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--noise-families", default=None,
                       help="comma-separated subset of " + ",".join(FAMILIES) + " (default: all)")

    p = sub.add_parser("discover", help="estimate order, direct and total effects from a CSV")
    p.add_argument("input", help="CSV, rows = variables, first column = id")
    p.add_argument("-o", "--output", default=None, help="output JSON (default stdout)")
    p.add_argument("--transpose", action="store_true", help="input has samples as rows")
    solver_flags(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("simulate", help="write a synthetic dataset and its ground truth")
    generator_flags(p)
    p.add_argument("--stream", type=int, default=0, help="trial stream id under the seed")
    p.add_argument("--data", required=True, help="output CSV path")
    p.add_argument("--truth", required=True, help="output ground-truth JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="run the synthetic comparison")
    generator_flags(p)
    solver_flags(p)
    p.add_argument("--trials", type=int, default=101)
    p.add_argument("--methods", default=None,
                   help="comma-separated subset of random,lasso,enet,lingam")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds (outputs then vary run to run)")
    p.add_argument("-o", "--out-dir", required=True,
                   help="directory for trials.csv and summary.json")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except ConstantRowError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONSTANT
    except (CsvFormatError, UsageError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        # remaining ValueErrors come from input validation (non-finite data, shapes)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

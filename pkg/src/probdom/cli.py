"""``probdom`` command-line entry point.

Subcommands: ``compare``, ``scenario-error``, ``timing``, ``optimize`` and
``metrics``. Every flag can also be set in a ``--config`` file, in the
``[common]`` section or in a section named after the subcommand (use the
flag name without dashes, e.g. ``gens = 100``). Flags given on the command
line win over file values.

Exit codes: 0 on success, 2 for input or configuration errors, 3 when the
chosen operator cannot handle the given representation.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from probdom import harness
from probdom.benchmarks import parse_overrides, registry_lookup
from probdom.comparators import OperatorConfig, Sense, get_operator
from probdom.errors import ParseError, ProbDomError, RepresentationError
from probdom.optimizer import OptimizerConfig, RunRecord
from probdom.uncertain import UncertainValue, parse_spec, read_population

EXIT_OK, EXIT_INPUT, EXIT_REPRESENTATION = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as :class:`ParseError`."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in re.split(r"[,\s]+", text.strip()) if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def _str_list(text: str) -> list[str]:
    return [v for v in re.split(r"[,\s]+", text.strip()) if v]


def _on_off(text: str) -> bool:
    val = text.strip().lower()
    if val in ("on", "true", "yes", "1"):
        return True
    if val in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {text!r}")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="base random seed")
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument("--config", help="key = value configuration file")


def _add_operator_flags(p, op_default="reduce"):
    d = OperatorConfig()
    p.add_argument("--op", default=op_default, help="operator id, e.g. emp or hist:0.05")
    p.add_argument("--gamma", type=float, default=d.gamma, help="decision threshold (>= 0.5)")
    p.add_argument("--omega", type=float, default=d.omega, help="histogram bin width")
    p.add_argument("--quantile-steps", type=int, default=d.quantile_steps,
                   help="quantile points used for closed-form inputs")
    p.add_argument("--mean-threshold", type=float, default=d.mean_threshold)
    p.add_argument("--spread-threshold", type=float, default=d.spread_threshold)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="probdom", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compare", help="compare two uncertain values")
    p.add_argument("a", nargs="?", help="distribution spec or sample file")
    p.add_argument("b", nargs="?", help="distribution spec or sample file")
    _add_operator_flags(p, op_default="emp")
    p.add_argument("--samples", type=int, default=OperatorConfig().pairwise_samples,
                   help="draws per closed-form input for the pairwise operator")
    p.add_argument("--sense", choices=("max", "min"), default="max")
    _add_common(p)

    p = sub.add_parser("scenario-error", help="error percentiles against oracle values")
    p.add_argument("--scenarios", help="scenario file (default: the bundled set)")
    p.add_argument("--ops", type=_str_list, default=",".join(harness.DEFAULT_SWEEP_OPS))
    p.add_argument("--sizes", type=_int_list, default="100,1000,10000")
    p.add_argument("--repetitions", type=int, default=200)
    p.add_argument("--percentile", type=float, default=0.99)
    p.add_argument("--inputs", choices=("samples", "closed"), default="samples")
    p.add_argument("--quantile-steps", type=int, default=OperatorConfig().quantile_steps)
    _add_common(p)

    p = sub.add_parser("timing", help="initialization and comparison timings")
    p.add_argument("--ops", type=_str_list, default=",".join(harness.DEFAULT_TIMING_OPS))
    p.add_argument("--sizes", type=_int_list, default="10,100,1000")
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--warmup", type=int, default=100)
    p.add_argument("--pin", type=_on_off, default="on", help="pin to a single CPU (on/off)")
    _add_common(p)

    p = sub.add_parser("optimize", help="repeated NSGA-II runs with metric traces")
    p.add_argument("--problem", default="udtlz2")
    p.add_argument("--set", dest="overrides", type=_str_list, default="",
                   help="problem overrides such as n=12,noise=off,trig=exact")
    _add_operator_flags(p)
    p.add_argument("--pop", type=int, default=25)
    p.add_argument("--gens", type=int, default=400)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--divisions", type=int, default=20, help="DCI grid divisions")
    p.add_argument("--eps", choices=("auto", "mult", "add"), default="auto")
    _add_common(p)

    p = sub.add_parser("metrics", help="median metrics across run files")
    p.add_argument("runs", nargs="*", help="run CSV files")
    p.add_argument("--reference", help="reference front CSV (default: built from the runs)")
    p.add_argument("--divisions", type=int, default=20)
    p.add_argument("--eps", choices=("auto", "mult", "add"), default="auto")
    _add_common(p)
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise ParseError(f"unknown command {name!r}")


def parse_args(argv):
    """Parse ``argv``, filling unset flags from the ``--config`` file."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = _subparser(parser, args.command)
        # keys may name either the destination or the long flag (``set`` for ``--set``)
        known = {a.dest: a.dest for a in sub._actions}
        for a in sub._actions:
            for opt in a.option_strings:
                if opt.startswith("--"):
                    known[opt[2:].replace("-", "_")] = a.dest
        raw = harness.load_config(args.config, args.command)
        raw.pop("config", None)
        unknown = sorted(set(raw) - set(known))
        if unknown:
            raise ParseError(f"unknown configuration keys: {', '.join(unknown)}")
        values = {known[k]: v for k, v in raw.items()}
        if "runs" in values and args.command == "metrics":
            values["runs"] = values["runs"].split()
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def _op_config(args, **extra) -> OperatorConfig:
    return OperatorConfig(
        gamma=args.gamma, omega=args.omega, quantile_steps=args.quantile_steps,
        mean_threshold=args.mean_threshold, spread_threshold=args.spread_threshold,
        seed=args.seed, **extra,
    )


def _load_value(text: str, ordered: bool) -> UncertainValue:
    path = Path(text)
    if path.is_file():
        return UncertainValue.from_samples(read_population(path, keep_order=ordered), keep_order=ordered)
    return UncertainValue.from_spec(parse_spec(text))


def cmd_compare(args) -> int:
    if args.a is None or args.b is None:
        raise ParseError("compare needs two inputs")
    op = get_operator(args.op, _op_config(args, pairwise_samples=args.samples))
    ordered = op.key == "pw"
    a, b = _load_value(args.a, ordered), _load_value(args.b, ordered)
    report = op.report(a, b, Sense(args.sense))
    print(report.csv_row())
    return EXIT_OK


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scenario_error(args) -> int:
    scenarios = harness.load_scenarios(args.scenarios)
    cfg = OperatorConfig(quantile_steps=args.quantile_steps, seed=args.seed)
    rows = harness.error_sweep(
        scenarios, args.ops, args.sizes, args.repetitions, args.percentile,
        args.seed, args.inputs, cfg,
    )
    path = _out_dir(args) / "error_sweep.csv"
    path.write_text(harness.sweep_csv(rows, args.percentile))
    print(path)
    return EXIT_OK


def cmd_timing(args) -> int:
    rows = harness.timing(args.ops, args.sizes, args.iterations, args.warmup, args.seed, pin=args.pin)
    out = _out_dir(args)
    path = out / "timing.csv"
    path.write_text(harness.csv_text(["op", "N", "init_us", "cmp_us"], rows))
    (out / "timing_machine.txt").write_text(harness.machine_info())
    print(path)
    return EXIT_OK


def cmd_optimize(args) -> int:
    problem = registry_lookup(args.problem, **parse_overrides(args.overrides))
    cfg = OptimizerConfig(
        pop_size=args.pop, generations=args.gens, samples=args.samples,
        operator=args.op, op_config=_op_config(args), seed=args.seed,
    )
    cfg.validate()
    records = harness.run_seeds(problem, cfg, args.runs, args.jobs)
    written = harness.write_optimize_outputs(args.out_dir, records, args.divisions, args.eps)
    print(written["metrics"])
    return EXIT_OK


def _seed_from_name(path: Path, fallback: int) -> int:
    m = re.fullmatch(r"run_(-?\d+)\.csv", path.name)
    return int(m.group(1)) if m else fallback


def cmd_metrics(args) -> int:
    if not args.runs:
        raise ParseError("metrics needs at least one run file")
    records = []
    for i, name in enumerate(args.runs):
        path = Path(name)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
        records.append(RunRecord.from_csv(text, seed=_seed_from_name(path, i)))
    if len({(r.n, r.m) for r in records}) != 1:
        raise ParseError("run files disagree on the number of variables or objectives")
    if args.reference:
        reference = harness.read_reference(args.reference)
        if reference.shape[1] != records[0].m:
            raise ParseError("reference front has the wrong number of objectives")
    else:
        reference = harness.reference_front(records)
    _, medians, _ = harness.summarize_runs(records, reference, args.divisions, args.eps)
    path = _out_dir(args) / "metrics.csv"
    path.write_text(harness.csv_text(harness.MEDIAN_HEADER, medians))
    print(path)
    return EXIT_OK


COMMANDS = {
    "compare": cmd_compare,
    "scenario-error": cmd_scenario_error,
    "timing": cmd_timing,
    "optimize": cmd_optimize,
    "metrics": cmd_metrics,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except RepresentationError as exc:
        print(f"probdom: {exc}", file=sys.stderr)
        return EXIT_REPRESENTATION
    except (ProbDomError, OSError, ValueError) as exc:
        print(f"probdom: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

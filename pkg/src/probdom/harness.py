"""Experiment workflows behind the command-line interface.

* :func:`error_sweep` measures how far each operator's estimate of P(X1 > X2)
  strays from the oracle value as the sample size grows.
* :func:`timing` measures per-object initialization and per-pair comparison
  times.
* :func:`optimize_runs` and :func:`metric_traces` run NSGA-II repeatedly and
  score every generation against a combined reference front.

Every function returns plain rows; the ``write_*`` helpers turn them into
CSV text with a fixed header.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from probdom import metrics
from probdom.benchmarks import UncertainProblem
from probdom.comparators import OperatorConfig, get_operator, oracle_dominance
from probdom.errors import ConfigError, ParseError
from probdom.optimizer import OptimizerConfig, RunRecord, run_nsga2
from probdom.uncertain import DistributionSpec, UncertainValue, parse_spec

DEFAULT_SWEEP_OPS = ("pw", "uni1", "uni2", "gauss", "hist:0.1", "hist:0.05", "hist:0.01", "emp", "reduce")
DEFAULT_TIMING_OPS = ("pw", "uni1", "uni2", "gauss", "hist:0.01", "emp", "reduce", "mean", "threestage")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------- scenarios


@dataclass(frozen=True)
class Scenario:
    name: str
    x1: DistributionSpec
    x2: DistributionSpec
    oracle: float
    resolution: int


def default_scenario_path() -> Path:
    return Path(str(resources.files("probdom") / "data" / "scenarios.ini"))


def load_scenarios(path=None, verify: bool = True) -> list[Scenario]:
    """Read a scenario file and re-derive each oracle probability.

    A stored oracle value that disagrees with the recomputed one by more than
    1e-6 aborts loading.
    """
    path = Path(path) if path is not None else default_scenario_path()
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
    out = []
    for name in parser.sections():
        sec = parser[name]
        try:
            x1, x2 = parse_spec(sec["x1"]), parse_spec(sec["x2"])
            resolution = int(sec.get("oracle_resolution", "1000000"))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"scenario {name!r}: {exc}") from exc
        value = oracle_dominance(x1, x2, resolution)
        if verify and "oracle" in sec and abs(float(sec["oracle"]) - value) > 1e-6:
            raise ConfigError(
                f"scenario {name!r}: stored oracle {sec['oracle']} disagrees with recomputed {value!r}"
            )
        out.append(Scenario(name, x1, x2, value, resolution))
    if not out:
        raise ParseError(f"no scenarios in {path}")
    return out


# -------------------------------------------------------------- error sweep


def percentile_label(percentile: float) -> str:
    return f"err_p{round(percentile * 100):d}"


def sweep_errors(
    scenario: Scenario, op_ids, size: int, repetitions: int, seed: int = 0,
    inputs: str = "samples", op_config: OperatorConfig = OperatorConfig(),
) -> dict[str, np.ndarray]:
    """Absolute errors of each operator over ``repetitions`` fresh comparisons.

    With ``inputs="samples"`` every repetition draws ``size`` samples per
    variable, shared by all operators. With ``inputs="closed"`` operators
    receive the distributions themselves (``emp``/``reduce`` then use
    ``size`` quantile points) and only ``pw`` samples.
    """
    if inputs not in ("samples", "closed"):
        raise ConfigError("inputs must be 'samples' or 'closed'")
    if repetitions < 1:
        raise ConfigError("repetitions must be at least 1")
    ops = {op_id: get_operator(op_id, replace(op_config, quantile_steps=size)) for op_id in op_ids}
    errors = {op_id: np.empty(repetitions) for op_id in op_ids}
    idx = [ord(c) for c in scenario.name]
    rng = np.random.default_rng(np.random.SeedSequence([seed, size, *idx]))
    closed = (UncertainValue.from_spec(scenario.x1), UncertainValue.from_spec(scenario.x2))
    for rep in range(repetitions):
        a = UncertainValue.from_samples(scenario.x1.sample(rng, size), keep_order=True)
        b = UncertainValue.from_samples(scenario.x2.sample(rng, size), keep_order=True)
        for op_id, op in ops.items():
            pa, pb = (a, b) if inputs == "samples" or op.key == "pw" else closed
            errors[op_id][rep] = abs(op.p_greater(pa, pb) - scenario.oracle)
    return errors


def error_sweep(
    scenarios, op_ids=DEFAULT_SWEEP_OPS, sizes=(100, 1000, 10000), repetitions: int = 200,
    percentile: float = 0.99, seed: int = 0, inputs: str = "samples",
    op_config: OperatorConfig = OperatorConfig(),
) -> list[tuple]:
    """Rows ``(scenario, op, N, error percentile)``."""
    if not 0.0 < percentile < 1.0:
        raise ConfigError("percentile must lie in (0, 1)")
    for op_id in op_ids:
        get_operator(op_id, op_config)
    rows = []
    for sc in scenarios:
        for size in sizes:
            errs = sweep_errors(sc, op_ids, size, repetitions, seed, inputs, op_config)
            for op_id in op_ids:
                rows.append((sc.name, op_id, size, float(np.quantile(errs[op_id], percentile))))
    return rows


def sweep_csv(rows, percentile: float = 0.99) -> str:
    return csv_text(["scenario", "op", "N", percentile_label(percentile)], rows)


# ------------------------------------------------------------------- timing


def _pin_single_cpu():
    if hasattr(os, "sched_setaffinity"):
        try:
            cpus = sorted(os.sched_getaffinity(0))
            os.sched_setaffinity(0, {cpus[0]})
        except OSError:
            pass


def _median_ns(fn, iterations: int, warmup: int, min_batch_ns: float = 20_000.0) -> float:
    """Median per-call time of ``fn`` in nanoseconds.

    Calls that finish faster than ``min_batch_ns`` are timed in batches so
    that clock resolution and call jitter do not dominate the sample.
    """
    clock = time.perf_counter_ns
    for _ in range(warmup):
        fn()
    t0 = clock()
    fn()
    single = max(clock() - t0, 1)
    batch = max(1, math.ceil(min_batch_ns / single))
    samples = np.empty(iterations)
    for k in range(iterations):
        t0 = clock()
        for _ in range(batch):
            fn()
        samples[k] = (clock() - t0) / batch
    return float(np.median(samples))


def time_operator(op_id: str, size: int, iterations: int = 1000, warmup: int = 100, seed: int = 0,
                  op_config: OperatorConfig = OperatorConfig()) -> tuple[float, float]:
    """Median initialization and comparison times in microseconds."""
    op = get_operator(op_id, op_config)
    rng = np.random.default_rng(np.random.SeedSequence([seed, size]))
    keep = op.key == "pw"
    raw_a = rng.uniform(0.0, 1.0, size)
    raw_b = rng.uniform(0.1, 1.1, size)

    def init():
        op.prepare(UncertainValue.from_samples(raw_a, keep_order=keep))

    pa = op.prepare(UncertainValue.from_samples(raw_a, keep_order=keep))
    pb = op.prepare(UncertainValue.from_samples(raw_b, keep_order=keep))

    def compare():
        op.compare_prepared(pa, pb)

    init_ns = _median_ns(init, iterations, warmup)
    cmp_ns = _median_ns(compare, iterations, warmup)
    return init_ns / 1000.0, cmp_ns / 1000.0


def timing(op_ids=DEFAULT_TIMING_OPS, sizes=(10, 100, 1000), iterations: int = 1000,
           warmup: int = 100, seed: int = 0, op_config: OperatorConfig = OperatorConfig(),
           pin: bool = True) -> list[tuple]:
    """Rows ``(op, N, init_us, cmp_us)``."""
    if iterations < 1:
        raise ConfigError("iterations must be at least 1")
    if pin:
        _pin_single_cpu()
    rows = []
    for op_id in op_ids:
        for size in sizes:
            init_us, cmp_us = time_operator(op_id, size, iterations, warmup, seed, op_config)
            rows.append((op_id, size, init_us, cmp_us))
    return rows


def machine_info() -> str:
    return "\n".join([
        f"platform = {platform.platform()}",
        f"machine = {platform.machine()}",
        f"processor = {platform.processor() or 'unknown'}",
        f"python = {sys.version.split()[0]}",
        f"numpy = {np.__version__}",
        f"cpu_count = {os.cpu_count()}",
    ]) + "\n"


# ------------------------------------------------------------- optimization


def run_seeds(problem: UncertainProblem, cfg: OptimizerConfig, runs: int, jobs: int = 1) -> list[RunRecord]:
    """Runs with seeds ``cfg.seed .. cfg.seed + runs - 1``.

    Each run owns its seed, so running them in ``jobs`` worker processes
    gives the same records as running them one after another.
    """
    if runs < 1:
        raise ConfigError("runs must be at least 1")
    if jobs < 1:
        raise ConfigError("jobs must be at least 1")
    configs = [replace(cfg, seed=cfg.seed + r) for r in range(runs)]
    if jobs == 1 or runs == 1:
        return [run_nsga2(problem, c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_nsga2, [problem] * runs, configs))


def _fronts(record: RunRecord):
    for snap in record.snapshots:
        mask = snap.front_mask
        yield snap.gen, snap.means[mask], snap.mins[mask], snap.maxs[mask]


def reference_front(records) -> np.ndarray:
    """Non-dominated union of every run's final first front."""
    return metrics.build_reference_front([metrics.final_front(rec) for rec in records])


def resolve_eps_kind(records, reference, kind: str) -> str:
    if kind in ("mult", "add"):
        return kind
    if kind != "auto":
        raise ConfigError("eps must be 'mult', 'add' or 'auto'")
    positive = np.all(np.asarray(reference) > 0)
    for rec in records:
        for _, front, _, _ in _fronts(rec):
            positive = positive and np.all(front > 0)
    return "mult" if positive else "add"


def metric_traces(record: RunRecord, reference, divisions: int = 20, kind: str = "mult") -> list[tuple]:
    """Rows ``(gen, eps, dci, diag)`` for one run."""
    rows = []
    for gen, front, lo, hi in _fronts(record):
        rows.append((
            gen,
            metrics.epsilon(front, reference, kind),
            metrics.dci(front, reference, divisions),
            metrics.diagonal_distance(lo, hi),
        ))
    return rows


def median_traces(traces) -> list[tuple]:
    """Per-generation medians across runs, ``(gen, eps_med, dci_med, diag_med)``."""
    by_gen: dict[int, list[tuple]] = {}
    for trace in traces:
        for row in trace:
            by_gen.setdefault(row[0], []).append(row[1:])
    out = []
    for gen in sorted(by_gen):
        vals = np.array(by_gen[gen])
        med = np.median(vals, axis=0)
        out.append((gen, float(med[0]), float(med[1]), float(med[2])))
    return out


TRACE_HEADER = ["gen", "eps", "dci", "diag"]
MEDIAN_HEADER = ["gen", "eps_med", "dci_med", "diag_med"]


def reference_csv(reference) -> str:
    ref = np.asarray(reference)
    return csv_text([f"f{i}" for i in range(1, ref.shape[1] + 1)], [list(map(float, r)) for r in ref])


def read_reference(path) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(Path(path).read_text())))
    if not rows or not all(c.startswith("f") for c in rows[0]):
        raise ParseError(f"{path}: expected a header f1,...,fm")
    try:
        return np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(rows[0]))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def summarize_runs(records, reference, divisions: int = 20, eps: str = "auto"):
    """Metric traces per run, their medians, and the epsilon kind used."""
    kind = resolve_eps_kind(records, reference, eps)
    traces = [metric_traces(rec, reference, divisions, kind) for rec in records]
    return traces, median_traces(traces), kind


def write_optimize_outputs(out_dir, records, divisions: int = 20, eps: str = "auto") -> dict[str, Path]:
    """Write run, trace, reference, median and median-run files into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reference = reference_front(records)
    traces, medians, kind = summarize_runs(records, reference, divisions, eps)
    written = {}
    for rec, trace in zip(records, traces):
        run_path = out / f"run_{rec.seed}.csv"
        rec.write_csv(run_path)
        trace_path = out / f"run_{rec.seed}_metrics.csv"
        trace_path.write_text(csv_text(TRACE_HEADER, trace))
        written[f"run_{rec.seed}"] = run_path
    ref_path = out / "reference.csv"
    ref_path.write_text(reference_csv(reference))
    met_path = out / "metrics.csv"
    met_path.write_text(csv_text(MEDIAN_HEADER, medians))
    median = metrics.median_run_selection(records, reference, kind)
    marker = out / "median_run.txt"
    marker.write_text(f"seed = {median.seed}\nfile = run_{median.seed}.csv\neps_kind = {kind}\n")
    written.update(reference=ref_path, metrics=met_path, median=marker)
    return written


def load_config(path, section: str) -> dict[str, str]:
    """Flat ``key = value`` settings from ``[common]`` and ``[section]``."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    merged = {}
    for name in ("common", section):
        if parser.has_section(name):
            merged.update({k.replace("-", "_"): v for k, v in parser[name].items()})
    return merged


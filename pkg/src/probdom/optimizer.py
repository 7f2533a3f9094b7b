"""NSGA-II driven by an uncertainty-aware dominance relation.

Each individual is evaluated ``samples`` times per objective when it is
created; the resulting populations stay attached to it for its lifetime.
Ranking peels non-dominated layers with the chosen comparison operator, while
crowding distances and all recorded statistics use sample means.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from probdom.benchmarks import UncertainProblem
from probdom.comparators import Operator, OperatorConfig, get_operator
from probdom.dominance import Individual, dominates
from probdom.errors import ConfigError, ParseError
from probdom.uncertain import UncertainValue

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    pop_size: int = 25
    generations: int = 400
    samples: int = 100
    operator: str = "reduce"
    op_config: OperatorConfig = field(default_factory=OperatorConfig)
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    # None means 1/n
    mutation_prob: float | None = None
    mutation_eta: float = 20.0
    seed: int = 0

    def validate(self):
        if self.pop_size < 2:
            raise ConfigError(f"population size must be at least 2, got {self.pop_size}")
        if self.generations < 1:
            raise ConfigError("generation count must be at least 1")
        if self.samples < 1:
            raise ConfigError("sample count must be at least 1")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ConfigError("crossover probability must lie in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ConfigError("mutation probability must lie in [0, 1]")
        if self.crossover_eta < 0 or self.mutation_eta < 0:
            raise ConfigError("distribution indices must be non-negative")
        get_operator(self.operator, self.op_config)


# ---------------------------------------------------------------- variation


def sbx_crossover(a, b, rng: np.random.Generator, prob: float = 0.9, eta: float = 15.0):
    """Bounded simulated binary crossover on [0, 1]^n."""
    c1 = np.array(a, dtype=float)
    c2 = np.array(b, dtype=float)
    if rng.random() >= prob:
        return c1, c2
    for i in range(c1.size):
        if rng.random() > 0.5:
            continue
        y1, y2 = sorted((c1[i], c2[i]))
        if y2 - y1 <= 1e-14:
            continue
        r = rng.random()
        span = y2 - y1
        kids = []
        for dist in (y1, 1.0 - y2):
            beta = 1.0 + 2.0 * dist / span
            alpha = 2.0 - beta ** -(eta + 1.0)
            if r <= 1.0 / alpha:
                betaq = (r * alpha) ** (1.0 / (eta + 1.0))
            else:
                betaq = (1.0 / (2.0 - r * alpha)) ** (1.0 / (eta + 1.0))
            kids.append(betaq)
        low = 0.5 * ((y1 + y2) - kids[0] * span)
        high = 0.5 * ((y1 + y2) + kids[1] * span)
        low, high = min(max(low, 0.0), 1.0), min(max(high, 0.0), 1.0)
        if rng.random() <= 0.5:
            low, high = high, low
        c1[i], c2[i] = low, high
    return c1, c2


def polynomial_mutation(x, rng: np.random.Generator, prob: float, eta: float = 20.0):
    """Polynomial mutation of each variable with probability ``prob``."""
    y = np.array(x, dtype=float)
    for i in range(y.size):
        if rng.random() >= prob:
            continue
        v = y[i]
        d1, d2 = v, 1.0 - v
        r = rng.random()
        power = 1.0 / (eta + 1.0)
        if r < 0.5:
            xy = 1.0 - d1
            val = 2.0 * r + (1.0 - 2.0 * r) * xy ** (eta + 1.0)
            dq = val**power - 1.0
        else:
            xy = 1.0 - d2
            val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * xy ** (eta + 1.0)
            dq = 1.0 - val**power
        y[i] = min(max(v + dq, 0.0), 1.0)
    return y


# ------------------------------------------------------------ sorting, crowding


def fast_nondominated_sort(pop, op: Operator, senses=None) -> list[list[Individual]]:
    """Split ``pop`` into fronts and set each individual's ``rank``.

    Fronts are peeled one at a time: front r holds the members no remaining
    member dominates. No transitivity of the relation is assumed. Dominance is
    evaluated once per ordered pair.
    """
    size = len(pop)
    beats = [[j for j in range(size) if j != i and dominates(pop[i], pop[j], op, senses)] for i in range(size)]
    dominated_by = [0] * size
    for i in range(size):
        for j in beats[i]:
            dominated_by[j] += 1
    remaining = list(range(size))
    fronts = []
    while remaining:
        front = [i for i in remaining if dominated_by[i] == 0]
        for i in front:
            pop[i].rank = len(fronts)
            for j in beats[i]:
                dominated_by[j] -= 1
        taken = set(front)
        remaining = [i for i in remaining if i not in taken]
        fronts.append([pop[i] for i in front])
    return fronts


def crowding_distance(front: list[Individual]) -> None:
    """Set ``crowding`` on every member from normalized mean-objective gaps."""
    size = len(front)
    if size == 0:
        return
    if size <= 2:
        for ind in front:
            ind.crowding = math.inf
        return
    dist = [0.0] * size
    means = np.array([ind.means for ind in front])
    for obj in range(means.shape[1]):
        order = sorted(range(size), key=lambda i: means[i, obj])
        lo, hi = means[order[0], obj], means[order[-1], obj]
        if hi == lo:
            continue
        dist[order[0]] = dist[order[-1]] = math.inf
        for pos in range(1, size - 1):
            i = order[pos]
            dist[i] += (means[order[pos + 1], obj] - means[order[pos - 1], obj]) / (hi - lo)
    for ind, d in zip(front, dist):
        ind.crowding = d


def _prefers(a: Individual, b: Individual) -> bool:
    return a.rank < b.rank or (a.rank == b.rank and a.crowding > b.crowding)


def binary_tournament(pop, rng) -> Individual:
    i, j = rng.integers(len(pop), size=2)
    a, b = pop[i], pop[j]
    return b if _prefers(b, a) else a


def environmental_selection(fronts, size: int) -> list[Individual]:
    """Fill ``size`` slots front by front; the last front is cut by crowding."""
    chosen = []
    for front in fronts:
        crowding_distance(front)
        if len(chosen) + len(front) <= size:
            chosen.extend(front)
            continue
        # stable sort keeps insertion order among equal crowding values
        ordered = sorted(front, key=lambda ind: -ind.crowding)
        chosen.extend(ordered[: size - len(chosen)])
        break
    return chosen


# ----------------------------------------------------------------- records


@dataclass(frozen=True)
class Snapshot:
    gen: int
    ids: tuple[int, ...]
    x: np.ndarray
    means: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray
    ranks: tuple[int, ...]
    crowding: tuple[float, ...]

    @classmethod
    def of(cls, gen: int, pop: list[Individual]) -> Snapshot:
        def frozen(arr):
            arr = np.array(arr, dtype=float)
            arr.flags.writeable = False
            return arr

        return cls(
            gen,
            tuple(ind.uid for ind in pop),
            frozen([ind.x for ind in pop]),
            frozen([ind.means for ind in pop]),
            frozen([[v.min for v in ind.objectives] for ind in pop]),
            frozen([[v.max for v in ind.objectives] for ind in pop]),
            tuple(ind.rank for ind in pop),
            tuple(float(ind.crowding) for ind in pop),
        )

    @property
    def front_mask(self) -> np.ndarray:
        return np.array(self.ranks) == 0


@dataclass
class RunRecord:
    n: int
    m: int
    seed: int = 0
    config: dict = field(default_factory=dict)
    snapshots: list[Snapshot] = field(default_factory=list)
    wall_clock: list[float] = field(default_factory=list)
    evaluations: int = 0

    def append(self, snap: Snapshot, seconds: float = 0.0):
        self.snapshots.append(snap)
        self.wall_clock.append(seconds)

    def header(self) -> list[str]:
        cols = ["gen", "id"]
        cols += [f"x{i}" for i in range(1, self.n + 1)]
        for prefix in ("mean", "min", "max"):
            cols += [f"{prefix}_f{i}" for i in range(1, self.m + 1)]
        return cols + ["rank", "crowding"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for s in self.snapshots:
            for k, uid in enumerate(s.ids):
                row = [s.gen, uid]
                row += [repr(float(v)) for v in s.x[k]]
                row += [repr(float(v)) for v in s.means[k]]
                row += [repr(float(v)) for v in s.mins[k]]
                row += [repr(float(v)) for v in s.maxs[k]]
                row += [s.ranks[k], repr(s.crowding[k])]
                w.writerow(row)
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, seed: int = 0) -> RunRecord:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ParseError("empty run file")
        head = rows[0]
        n = sum(1 for c in head if c.startswith("x") and c[1:].isdigit())
        m = sum(1 for c in head if c.startswith("mean_f"))
        rec = cls(n=n, m=m, seed=seed)
        if head != rec.header():
            raise ParseError(f"unexpected run file header: {','.join(head)}")
        groups: dict[int, list[list[str]]] = {}
        for row in rows[1:]:
            if len(row) != len(head):
                raise ParseError(f"row has {len(row)} fields, expected {len(head)}")
            groups.setdefault(int(row[0]), []).append(row)
        for gen in sorted(groups):
            g = groups[gen]
            num = np.array([[float(v) for v in r[2: 2 + n + 3 * m]] for r in g])
            x, rest = num[:, :n], num[:, n:]
            rec.snapshots.append(Snapshot(
                gen,
                tuple(int(r[1]) for r in g),
                x,
                rest[:, :m],
                rest[:, m: 2 * m],
                rest[:, 2 * m:],
                tuple(int(r[-2]) for r in g),
                tuple(float(r[-1]) for r in g),
            ))
        return rec


# --------------------------------------------------------------- main loop


class _Evaluator:
    def __init__(self, problem: UncertainProblem, samples: int, seed_seq: np.random.SeedSequence):
        self.problem = problem
        self.samples = samples
        self.seed_seq = seed_seq
        self.next_uid = 0
        self.evaluations = 0

    def __call__(self, x) -> Individual:
        # one independent stream per individual keeps evaluation order-free
        rng = np.random.default_rng(self.seed_seq.spawn(1)[0])
        draws = self.problem.sample_matrix(x, self.samples, rng)
        self.evaluations += self.samples
        objectives = [UncertainValue.from_samples(draws[:, i], keep_order=True) for i in range(draws.shape[1])]
        ind = Individual(np.asarray(x, dtype=float), objectives, uid=self.next_uid)
        self.next_uid += 1
        return ind


def make_offspring(pop, rng, cfg: OptimizerConfig, n: int) -> list[np.ndarray]:
    mut_prob = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / n
    kids = []
    while len(kids) < cfg.pop_size:
        p1 = binary_tournament(pop, rng)
        p2 = binary_tournament(pop, rng)
        c1, c2 = sbx_crossover(p1.x, p2.x, rng, cfg.crossover_prob, cfg.crossover_eta)
        kids.append(polynomial_mutation(c1, rng, mut_prob, cfg.mutation_eta))
        kids.append(polynomial_mutation(c2, rng, mut_prob, cfg.mutation_eta))
    # odd population sizes drop the last child
    return kids[: cfg.pop_size]


def run_nsga2(problem: UncertainProblem, cfg: OptimizerConfig, on_generation=None) -> RunRecord:
    """Run NSGA-II for ``cfg.generations`` generations.

    The record holds one snapshot per generation, numbered from 1; the
    initial population is not recorded.
    """
    cfg.validate()
    op = get_operator(cfg.operator, cfg.op_config)
    senses = problem.senses
    root = np.random.SeedSequence(cfg.seed)
    var_seq, eval_seq = root.spawn(2)
    rng = np.random.default_rng(var_seq)
    evaluate = _Evaluator(problem, cfg.samples, eval_seq)

    record = RunRecord(n=problem.n, m=problem.m, seed=cfg.seed, config=_config_echo(problem, cfg))
    pop = [evaluate(rng.random(problem.n)) for _ in range(cfg.pop_size)]
    for front in fast_nondominated_sort(pop, op, senses):
        crowding_distance(front)

    for gen in range(1, cfg.generations + 1):
        t0 = time.perf_counter()
        offspring = [evaluate(x) for x in make_offspring(pop, rng, cfg, problem.n)]
        combined = pop + offspring
        fronts = fast_nondominated_sort(combined, op, senses)
        pop = environmental_selection(fronts, cfg.pop_size)
        record.append(Snapshot.of(gen, pop), time.perf_counter() - t0)
        if on_generation is not None:
            on_generation(gen, pop)
        log.debug("generation %d: %d in first front", gen, len(fronts[0]))
    record.evaluations = evaluate.evaluations
    return record


def _config_echo(problem, cfg) -> dict:
    oc = cfg.op_config
    return {
        "problem": problem.name, "n": problem.n, "m": problem.m, "noise": problem.noise,
        "pop": cfg.pop_size, "gens": cfg.generations, "samples": cfg.samples,
        "op": cfg.operator, "gamma": oc.gamma, "omega": oc.omega,
        "quantile_steps": oc.quantile_steps, "seed": cfg.seed,
    }

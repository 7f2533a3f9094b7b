"""Comparison operators for uncertain objective values.

Every probabilistic operator estimates P(A > B) for two uncertain values A and
B. :func:`decide` turns a pair of such probabilities into a ternary decision
using the comparison threshold ``gamma``. :func:`oracle_dominance` integrates
P(A > B) numerically for closed-form distributions and serves as ground truth.

Operators are looked up by identifier through :func:`get_operator`:
``pw``, ``uni1``, ``uni2``, ``gauss``, ``hist`` / ``hist:<omega>``, ``emp``,
``reduce``, ``mean`` and ``threestage``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from probdom.errors import (
    ConfigError,
    IncompatibleHistograms,
    PairingError,
    UnboundedSupport,
    UnknownOperator,
)
from probdom.uncertain import (
    DistributionSpec,
    UncertainValue,
    bounds,
    empirical_quantile,
    equiprobable_points,
    reduce_population,
)


class Sense(str, Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


class Decision(str, Enum):
    BETTER = "better"
    WORSE = "worse"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class OperatorConfig:
    gamma: float = 0.7
    omega: float = 0.01
    quantile_steps: int = 20
    mean_threshold: float = 0.1
    spread_threshold: float = 0.3
    # pairwise comparison draws this many samples for closed-form inputs
    pairwise_samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.5 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0.5, 1], got {self.gamma}")
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if self.quantile_steps < 1 or self.pairwise_samples < 1:
            raise ConfigError("quantile_steps and pairwise_samples must be positive")
        if self.mean_threshold < 0 or self.spread_threshold < 0:
            raise ConfigError("three-stage thresholds must be non-negative")


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of comparing A with B.

    ``p_greater`` and ``p_less`` are None for the non-probabilistic ``mean``
    and ``threestage`` operators.
    """

    op: str
    p_greater: float | None
    p_less: float | None
    decision: Decision

    def csv_row(self) -> str:
        def cell(p):
            return "" if p is None else repr(float(p))

        return f"{self.op},{cell(self.p_greater)},{cell(self.p_less)},{self.decision.value}"


CSV_HEADER = "op,p_greater,p_less,decision"


def decide(p_greater: float, p_less: float, gamma: float, sense: Sense = Sense.MAXIMIZE) -> Decision:
    """Threshold rule: A is better when its winning probability exceeds gamma."""
    if gamma < 0.5:
        raise ConfigError(f"gamma must be at least 0.5, got {gamma}")
    if sense == Sense.MINIMIZE:
        p_greater, p_less = p_less, p_greater
    if p_greater > gamma:
        return Decision.BETTER
    if p_less > gamma:
        return Decision.WORSE
    return Decision.INDIFFERENT


# ---------------------------------------------------------------- pairwise


def compare_pairwise(a, b) -> float:
    """Fraction of index-aligned draws with ``a[i] > b[i]``.

    Both inputs must be in their original draw order.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise PairingError(f"pairwise comparison needs equal lengths, got {a.shape} and {b.shape}")
    return int(np.count_nonzero(a > b)) / a.size


# ----------------------------------------------------------------- uniform


def _uniform_cdf_integral(x: float, lo: float, hi: float) -> float:
    """Integral of the U(lo, hi) CDF from -inf to x."""
    if x <= lo:
        return 0.0
    if x >= hi:
        return (hi - lo) / 2 + (x - hi)
    return (x - lo) ** 2 / (2 * (hi - lo))


def uniform_interval_probability(a_lo: float, a_hi: float, b_lo: float, b_hi: float) -> float:
    """P(A > B) for independent A ~ U(a_lo, a_hi) and B ~ U(b_lo, b_hi).

    Zero-width intervals are point masses; two equal points give 1/2.
    """
    wa, wb = a_hi - a_lo, b_hi - b_lo
    if wa == 0 and wb == 0:
        if a_lo == b_lo:
            return 0.5
        return 1.0 if a_lo > b_lo else 0.0
    if a_hi <= b_lo:
        return 0.0
    if b_hi <= a_lo:
        return 1.0
    if wa == 0:
        return min(max((a_lo - b_lo) / wb, 0.0), 1.0)
    if wb == 0:
        return min(max((a_hi - b_lo) / wa, 0.0), 1.0)
    # total probability over the events A <= upper(B) and A > upper(B)
    cut = min(a_hi, b_hi)
    below = (_uniform_cdf_integral(cut, b_lo, b_hi) - _uniform_cdf_integral(a_lo, b_lo, b_hi)) / wa
    above = max(a_hi - b_hi, 0.0) / wa
    return min(max(below + above, 0.0), 1.0)


def compare_uniform_bounds(a: UncertainValue, b: UncertainValue) -> float:
    """P(A > B) assuming both values are uniform over their bounds."""
    a_lo, a_hi = bounds(a)
    b_lo, b_hi = bounds(b)
    return uniform_interval_probability(a_lo, a_hi, b_lo, b_hi)


def moment_interval(mean: float, variance: float) -> tuple[float, float]:
    half = math.sqrt(3.0 * variance)
    return mean - half, mean + half


def compare_uniform_moments(a: UncertainValue, b: UncertainValue) -> float:
    """P(A > B) for uniforms matching each value's mean and variance."""
    return uniform_interval_probability(
        *moment_interval(a.mean, a.variance), *moment_interval(b.mean, b.variance)
    )


# ---------------------------------------------------------------- gaussian


def gauss_probability(mean_a: float, var_a: float, mean_b: float, var_b: float) -> float:
    total = var_a + var_b
    if total <= 0:
        if mean_a > mean_b:
            return 1.0
        return 0.5 if mean_a == mean_b else 0.0
    return 0.5 * (1.0 + math.erf((mean_a - mean_b) / math.sqrt(2.0 * total)))


def compare_gauss(a: UncertainValue, b: UncertainValue) -> float:
    return gauss_probability(a.mean, a.variance, b.mean, b.variance)


# --------------------------------------------------------------- histogram


@dataclass(frozen=True)
class Histogram:
    """Probability mass on bins [k*omega, (k+1)*omega), k = first, first+1, ...

    ``below[j]`` holds the mass strictly below the start of bin ``first + j``.
    """

    omega: float
    first: int
    masses: np.ndarray
    below: np.ndarray = field(repr=False)

    @property
    def indices(self) -> np.ndarray:
        return self.first + np.arange(self.masses.size)


def bin_index(values, omega: float) -> np.ndarray:
    """Bin of each value, consistent with comparing against ``k * omega``."""
    v = np.asarray(values, dtype=float)
    k = np.floor(v / omega).astype(np.int64)
    k = np.where(k * omega > v, k - 1, k)
    k = np.where((k + 1) * omega <= v, k + 1, k)
    return k


def _histogram(omega, first, masses):
    masses = np.asarray(masses, dtype=float)
    below = np.concatenate(([0.0], np.cumsum(masses)[:-1]))
    return Histogram(omega, int(first), masses, below)


def build_histogram(value: UncertainValue, omega: float) -> Histogram:
    if not omega > 0:
        raise ConfigError("histogram width must be positive")
    if value.is_empirical:
        ks = bin_index(value.samples, omega)
        first = int(ks[0])
        counts = np.bincount(ks - first)
        return _histogram(omega, first, counts / value.size)
    spec = value.spec
    if not spec.finite_support:
        raise UnboundedSupport(f"{spec} has unbounded support")
    lo, hi = spec.support()
    first = int(bin_index(lo, omega))
    last = int(math.ceil(hi / omega))
    edges = np.arange(first, last + 2) * omega
    cdf = np.clip(np.asarray(spec.cdf(edges), dtype=float), 0.0, 1.0)
    return _histogram(omega, first, np.diff(cdf))


def compare_histogram(ha: Histogram, hb: Histogram) -> float:
    """P(A > B) from two histograms sharing the same bin width.

    Mass sharing a bin counts as A > B half of the time.
    """
    if ha.omega != hb.omega:
        raise IncompatibleHistograms(f"bin widths differ: {ha.omega} vs {hb.omega}")
    rel = ha.indices - hb.first
    inside = (rel >= 0) & (rel < hb.masses.size)
    clipped = np.clip(rel, 0, hb.masses.size - 1)
    same_bin = np.where(inside, hb.masses[clipped], 0.0)
    total_b = float(hb.below[-1] + hb.masses[-1])
    b_below = np.where(inside, hb.below[clipped], np.where(rel < 0, 0.0, total_b))
    return float(np.sum(ha.masses * (0.5 * same_bin + b_below)))


def histogram_error_bound(ha: Histogram, hb: Histogram) -> float:
    """Half the mass the two histograms share bin by bin."""
    rel = ha.indices - hb.first
    inside = (rel >= 0) & (rel < hb.masses.size)
    same_bin = np.where(inside, hb.masses[np.clip(rel, 0, hb.masses.size - 1)], 0.0)
    return 0.5 * float(np.sum(ha.masses * same_bin))


# --------------------------------------------------------------- empirical


def count_greater_pairs(a, b) -> int:
    """Number of pairs (i, j) with a[i] > b[j] for ascending ``a`` and ``b``.

    Single merge pass over both lists: for each a[i], j ends at the first
    b[j] that is not smaller than a[i].
    """
    m = len(b)
    j = 0
    pairs = 0
    for ai in a:
        while j < m and ai > b[j]:
            j += 1
        pairs += j
    return pairs


def compare_empirical(a, b) -> float:
    """P(A > B) under the empirical distributions of two sorted populations."""
    return count_greater_pairs(a, b) / (len(a) * len(b))


def compare_reduced(a, b) -> float:
    """:func:`compare_empirical` on the ceil(sqrt(N))-point reductions."""
    ra = reduce_population(a).tolist()
    rb = reduce_population(b).tolist()
    return compare_empirical(ra, rb)


# ---------------------------------------------------------- non-probabilistic


def _better(x: float, y: float, sense: Sense) -> Decision:
    if x == y:
        return Decision.INDIFFERENT
    if (x > y) == (sense == Sense.MAXIMIZE):
        return Decision.BETTER
    return Decision.WORSE


def compare_mean(a: UncertainValue, b: UncertainValue, sense: Sense = Sense.MAXIMIZE) -> Decision:
    return _better(a.mean, b.mean, sense)


def _central_interval(value: UncertainValue) -> tuple[float, float]:
    if value.is_empirical:
        return empirical_quantile(value, 0.025), empirical_quantile(value, 0.975)
    if not value.spec.finite_support:
        raise UnboundedSupport(f"{value.spec} has unbounded support")
    lo, hi = value.spec.ppf([0.025, 0.975])
    return float(lo), float(hi)


def compare_three_stage(
    a: UncertainValue, b: UncertainValue, cfg: OperatorConfig = OperatorConfig(),
    sense: Sense = Sense.MAXIMIZE,
) -> Decision:
    """Disjoint bounds, then significant mean gap, then narrower 95% interval."""
    return _three_stage_prepared(_three_stage_summary(a), _three_stage_summary(b), cfg, sense)


def _three_stage_summary(value: UncertainValue):
    lo, hi = bounds(value)
    q_lo, q_hi = _central_interval(value)
    return lo, hi, value.mean, q_hi - q_lo


def _three_stage_prepared(pa, pb, cfg, sense):
    a_lo, a_hi, a_mean, len_a = pa
    b_lo, b_hi, b_mean, len_b = pb
    if a_hi < b_lo or b_hi < a_lo:
        return _better(a_lo, b_lo, sense)
    width = max(a_hi, b_hi) - min(a_lo, b_lo)
    if abs(a_mean - b_mean) > cfg.mean_threshold * width:
        return _better(a_mean, b_mean, sense)
    if abs(len_a - len_b) > cfg.spread_threshold * max(len_a, len_b):
        return Decision.BETTER if len_a < len_b else Decision.WORSE
    return Decision.INDIFFERENT


# ------------------------------------------------------------------ oracle


def integration_range(spec: DistributionSpec) -> tuple[float, float]:
    if spec.finite_support:
        return spec.support()
    sd = math.sqrt(spec.variance)
    return spec.mean - 10 * sd, spec.mean + 10 * sd


def oracle_dominance(a: DistributionSpec, b: DistributionSpec, resolution: int = 10**6) -> float:
    """P(A > B) by rectangle-rule integration of P(B < t) against dF_A(t).

    The range of A is cut into ``resolution`` cells; each cell contributes its
    A-probability times the CDF of B at the cell midpoint. Gaussian ranges are
    truncated at ten standard deviations.
    """
    lo, hi = integration_range(a)
    edges = np.linspace(lo, hi, resolution + 1)
    cell_mass = np.diff(np.asarray(a.cdf(edges), dtype=float))
    mids = 0.5 * (edges[:-1] + edges[1:])
    p = float(np.dot(cell_mass, np.asarray(b.cdf(mids), dtype=float)))
    return min(max(p, 0.0), 1.0)


# --------------------------------------------------------------- operators


class Operator:
    """A comparison operator bound to an :class:`OperatorConfig`.

    ``prepare`` builds (and memoizes on the value) whatever the operator
    compares; ``probability`` maps two prepared forms to P(A > B).
    """

    key = ""
    probabilistic = True

    def __init__(self, cfg: OperatorConfig = OperatorConfig()):
        self.cfg = cfg

    @property
    def name(self) -> str:
        return self.key

    def cache_key(self):
        return self.key

    def build(self, value: UncertainValue):
        raise NotImplementedError

    def prepare(self, value: UncertainValue):
        return value.cached(self.cache_key(), self.build)

    def probability(self, pa, pb) -> float:
        raise NotImplementedError

    def p_greater(self, a: UncertainValue, b: UncertainValue) -> float:
        return self.probability(self.prepare(a), self.prepare(b))

    def compare_prepared(self, pa, pb, sense: Sense = Sense.MAXIMIZE):
        """One comparison between already prepared forms (used for timing)."""
        return self.probability(pa, pb)

    def report(self, a: UncertainValue, b: UncertainValue, sense: Sense = Sense.MAXIMIZE) -> ComparisonReport:
        pa, pb = self.prepare(a), self.prepare(b)
        p_gt = self.probability(pa, pb)
        p_lt = self.probability(pb, pa)
        return ComparisonReport(self.name, p_gt, p_lt, decide(p_gt, p_lt, self.cfg.gamma, sense))

    def decision(self, a: UncertainValue, b: UncertainValue, sense: Sense = Sense.MAXIMIZE) -> Decision:
        return self.report(a, b, sense).decision


class PairwiseOperator(Operator):
    key = "pw"

    def __init__(self, cfg=OperatorConfig()):
        super().__init__(cfg)
        self._rng = np.random.default_rng(cfg.seed)

    def cache_key(self):
        return ("pw", self.cfg.pairwise_samples, id(self))

    def build(self, value):
        if value.draws is not None:
            return value.draws
        if value.is_empirical:
            if value.size == 1:
                return value.samples
            raise PairingError("pairwise comparison needs samples in draw order")
        return value.spec.sample(self._rng, self.cfg.pairwise_samples)

    def probability(self, pa, pb):
        return compare_pairwise(pa, pb)


class UniformBoundsOperator(Operator):
    key = "uni1"

    def build(self, value):
        return bounds(value)

    def probability(self, pa, pb):
        return uniform_interval_probability(pa[0], pa[1], pb[0], pb[1])


class UniformMomentsOperator(UniformBoundsOperator):
    key = "uni2"

    def build(self, value):
        return moment_interval(value.mean, value.variance)


class GaussOperator(Operator):
    key = "gauss"

    def build(self, value):
        return value.mean, value.variance

    def probability(self, pa, pb):
        return gauss_probability(pa[0], pa[1], pb[0], pb[1])


class HistogramOperator(Operator):
    key = "hist"

    @property
    def name(self):
        return f"hist:{self.cfg.omega!r}"

    def cache_key(self):
        return ("hist", self.cfg.omega)

    def build(self, value):
        return build_histogram(value, self.cfg.omega)

    def probability(self, pa, pb):
        return compare_histogram(pa, pb)


class EmpiricalOperator(Operator):
    key = "emp"

    def cache_key(self):
        return ("emp", self.cfg.quantile_steps)

    def build(self, value):
        if value.is_empirical:
            return value.samples.tolist()
        return equiprobable_points(value.spec, self.cfg.quantile_steps).tolist()

    def probability(self, pa, pb):
        return compare_empirical(pa, pb)


class ReducedOperator(EmpiricalOperator):
    key = "reduce"

    def cache_key(self):
        return ("reduce", self.cfg.quantile_steps)

    def build(self, value):
        if value.is_empirical:
            return reduce_population(value.samples).tolist()
        return equiprobable_points(value.spec, self.cfg.quantile_steps).tolist()


class MeanOperator(Operator):
    key = "mean"
    probabilistic = False

    def build(self, value):
        return value.mean

    def report(self, a, b, sense=Sense.MAXIMIZE):
        return ComparisonReport(self.name, None, None, _better(self.prepare(a), self.prepare(b), sense))

    def compare_prepared(self, pa, pb, sense=Sense.MAXIMIZE):
        return _better(pa, pb, sense)


class ThreeStageOperator(Operator):
    key = "threestage"
    probabilistic = False

    def build(self, value):
        return _three_stage_summary(value)

    def report(self, a, b, sense=Sense.MAXIMIZE):
        pa, pb = self.prepare(a), self.prepare(b)
        return ComparisonReport(self.name, None, None, _three_stage_prepared(pa, pb, self.cfg, sense))

    def compare_prepared(self, pa, pb, sense=Sense.MAXIMIZE):
        return _three_stage_prepared(pa, pb, self.cfg, sense)


OPERATORS = {
    cls.key: cls
    for cls in (
        PairwiseOperator,
        UniformBoundsOperator,
        UniformMomentsOperator,
        GaussOperator,
        HistogramOperator,
        EmpiricalOperator,
        ReducedOperator,
        MeanOperator,
        ThreeStageOperator,
    )
}

OPERATOR_IDS = tuple(OPERATORS)


def get_operator(op_id: str, cfg: OperatorConfig = OperatorConfig()) -> Operator:
    """Instantiate an operator from its identifier, e.g. ``"hist:0.05"``."""
    key, _, arg = op_id.partition(":")
    if key not in OPERATORS:
        raise UnknownOperator(f"unknown operator {op_id!r}; choose from {', '.join(OPERATOR_IDS)}")
    if arg:
        if key != "hist":
            raise UnknownOperator(f"operator {key!r} takes no argument")
        try:
            cfg = replace(cfg, omega=float(arg))
        except ValueError as exc:
            raise ConfigError(f"bad histogram width in {op_id!r}") from exc
    return OPERATORS[key](cfg)

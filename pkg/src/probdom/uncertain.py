"""Uncertain objective values: closed-form distributions and sample populations.

A sample population is represented as a sorted, read-only 1-D ``numpy`` array.
Every comparison operator in :mod:`probdom.comparators` consumes either such a
population or a :class:`DistributionSpec`, both wrapped in an
:class:`UncertainValue`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from probdom.errors import (
    DegenerateVariance,
    InvalidDistribution,
    InvalidPopulation,
    InvalidProbability,
    ParseError,
    UnboundedSupport,
    WrongRepresentation,
)

FAMILIES = ("uniform", "gaussian", "beta")


@dataclass(frozen=True)
class DistributionSpec:
    """A Uniform, Gaussian or Beta distribution followed by ``scale * X + offset``.

    The two shape parameters are ``(lower, upper)`` for uniform,
    ``(mean, variance)`` for gaussian and ``(alpha, beta)`` for beta.
    """

    family: str
    p1: float
    p2: float
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidDistribution(f"unknown family {self.family!r}")
        params = (self.p1, self.p2, self.scale, self.offset)
        if not all(math.isfinite(v) for v in params):
            raise InvalidDistribution(f"non-finite parameter in {params}")
        if self.family == "uniform" and not self.p1 < self.p2:
            raise InvalidDistribution("uniform requires lower < upper")
        if self.family == "gaussian" and not self.p2 > 0:
            raise InvalidDistribution("gaussian requires variance > 0")
        if self.family == "beta" and not (self.p1 > 0 and self.p2 > 0):
            raise InvalidDistribution("beta requires alpha > 0 and beta > 0")
        if self.scale == 0:
            raise InvalidDistribution("scale must be non-zero")

    @classmethod
    def uniform(cls, lower, upper, scale=1.0, offset=0.0):
        return cls("uniform", float(lower), float(upper), float(scale), float(offset))

    @classmethod
    def gaussian(cls, mean, variance, scale=1.0, offset=0.0):
        return cls("gaussian", float(mean), float(variance), float(scale), float(offset))

    @classmethod
    def beta(cls, alpha, beta, scale=1.0, offset=0.0):
        return cls("beta", float(alpha), float(beta), float(scale), float(offset))

    @property
    def _base(self):
        if self.family == "uniform":
            return stats.uniform(loc=self.p1, scale=self.p2 - self.p1)
        if self.family == "gaussian":
            return stats.norm(loc=self.p1, scale=math.sqrt(self.p2))
        return stats.beta(self.p1, self.p2)

    def _base_moments(self):
        a, b = self.p1, self.p2
        if self.family == "uniform":
            return (a + b) / 2, (b - a) ** 2 / 12
        if self.family == "gaussian":
            return a, b
        s = a + b
        return a / s, a * b / (s * s * (s + 1))

    @property
    def mean(self) -> float:
        return self.scale * self._base_moments()[0] + self.offset

    @property
    def variance(self) -> float:
        return self.scale**2 * self._base_moments()[1]

    @property
    def finite_support(self) -> bool:
        return self.family != "gaussian"

    def support(self) -> tuple[float, float]:
        if self.family == "gaussian":
            return -math.inf, math.inf
        lo, hi = (self.p1, self.p2) if self.family == "uniform" else (0.0, 1.0)
        ends = sorted((self.scale * lo + self.offset, self.scale * hi + self.offset))
        return ends[0], ends[1]

    def cdf(self, x):
        """P(X <= x); accepts scalars or arrays."""
        z = (np.asarray(x, dtype=float) - self.offset) / self.scale
        base = self._base.cdf(z)
        return base if self.scale > 0 else 1.0 - base

    def ppf(self, p):
        p = np.asarray(p, dtype=float)
        if self.scale > 0:
            return self.scale * self._base.ppf(p) + self.offset
        return self.scale * self._base.ppf(1.0 - p) + self.offset

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` samples in draw order from ``rng``."""
        if self.family == "uniform":
            base = rng.uniform(self.p1, self.p2, size)
        elif self.family == "gaussian":
            base = self.p1 + math.sqrt(self.p2) * rng.standard_normal(size)
        else:
            base = rng.beta(self.p1, self.p2, size)
        return self.scale * base + self.offset

    def __str__(self):
        text = f"{self.family}({_fmt(self.p1)},{_fmt(self.p2)})"
        if self.scale != 1.0 or self.offset != 0.0:
            sign = "-" if self.offset < 0 else "+"
            text += f"*{_fmt(self.scale)}{sign}{_fmt(abs(self.offset))}"
        return text


def _fmt(v: float) -> str:
    return repr(float(v))


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SPEC_RE = re.compile(
    rf"^\s*(uniform|gaussian|beta)\s*\(\s*({_NUM})\s*,\s*({_NUM})\s*\)"
    rf"(?:\s*\*\s*({_NUM})(?:\s*([+-])\s*({_NUM}))?)?\s*$"
)


def parse_spec(text: str) -> DistributionSpec:
    """Parse ``uniform(a,b)``, ``gaussian(mu,var)`` or ``beta(a,b)``, with an
    optional ``*scale+offset`` suffix."""
    match = _SPEC_RE.match(text)
    if match is None:
        raise ParseError(f"not a distribution spec: {text!r}")
    family, p1, p2, scale, sign, offset = match.groups()
    scale = float(scale) if scale is not None else 1.0
    off = float(offset) if offset is not None else 0.0
    if sign == "-":
        off = -off
    try:
        return DistributionSpec(family, float(p1), float(p2), scale, off)
    except InvalidDistribution as exc:
        raise ParseError(str(exc)) from exc


def as_population(raw) -> np.ndarray:
    """Sorted, read-only float copy of ``raw``; validates size and finiteness."""
    arr = np.array(raw, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidPopulation("population must hold at least one sample")
    if not np.all(np.isfinite(arr)):
        raise InvalidPopulation("population holds non-finite samples")
    arr.sort(kind="stable")
    arr.flags.writeable = False
    return arr


class UncertainValue:
    """One uncertain objective value.

    Exactly one of ``spec`` (closed form) or ``samples`` (sorted population) is
    set. Summary statistics are computed once at construction. ``draws``
    optionally keeps the samples in their original draw order, which only the
    pairwise comparison needs.
    """

    __slots__ = ("spec", "samples", "draws", "_mean", "_var", "_min", "_max", "_cache")

    def __init__(self, spec: DistributionSpec | None = None, samples=None, draws=None):
        if (spec is None) == (samples is None):
            raise ValueError("give exactly one of spec or samples")
        self.spec = spec
        self.samples = samples
        self.draws = draws
        self._cache = {}
        if spec is not None:
            self._mean, self._var = spec.mean, spec.variance
            self._min, self._max = spec.support()
        else:
            self._mean = float(np.mean(samples))
            n = samples.size
            self._var = float(np.sum((samples - self._mean) ** 2) / (n - 1)) if n > 1 else None
            self._min, self._max = float(samples[0]), float(samples[-1])

    @classmethod
    def from_spec(cls, spec: DistributionSpec) -> UncertainValue:
        return cls(spec=spec)

    @classmethod
    def from_samples(cls, raw, keep_order: bool = False) -> UncertainValue:
        pop = as_population(raw)
        draws = None
        if keep_order:
            draws = np.array(raw, dtype=float).ravel()
            draws.flags.writeable = False
        return cls(samples=pop, draws=draws)

    @property
    def is_empirical(self) -> bool:
        return self.samples is not None

    @property
    def size(self) -> int:
        return 0 if self.samples is None else int(self.samples.size)

    @property
    def mean(self) -> float:
        return self._mean

    @property
    def variance(self) -> float:
        if self._var is None:
            raise DegenerateVariance("unbiased variance needs at least two samples")
        return self._var

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    @property
    def min(self) -> float:
        return self._min

    @property
    def max(self) -> float:
        return self._max

    def cached(self, key, build):
        """Memoize an operator-specific prepared form of this value."""
        try:
            return self._cache[key]
        except KeyError:
            prepared = self._cache[key] = build(self)
            return prepared

    def __repr__(self):
        if self.spec is not None:
            return f"UncertainValue({self.spec})"
        return f"UncertainValue(N={self.size}, mean={self._mean:.6g})"


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    variance: float
    std: float


def from_samples(raw) -> UncertainValue:
    return UncertainValue.from_samples(raw)


def summary(value: UncertainValue) -> SummaryStats:
    """Mean, unbiased variance and standard deviation of ``value``."""
    var = value.variance
    return SummaryStats(value.mean, var, math.sqrt(var))


def _require_empirical(value: UncertainValue) -> np.ndarray:
    if not value.is_empirical:
        raise WrongRepresentation("operation needs a sample population")
    return value.samples


def empirical_cdf(value: UncertainValue, y: float) -> float:
    """Proportion of samples less than or equal to ``y``."""
    pop = _require_empirical(value)
    return int(np.searchsorted(pop, y, side="right")) / pop.size


def empirical_quantile(value: UncertainValue, p: float) -> float:
    """First sample after the ``floor(p*N)`` smallest ones."""
    pop = _require_empirical(value)
    if not 0.0 <= p < 1.0:
        raise InvalidProbability(f"quantile level must lie in [0, 1), got {p}")
    return float(pop[int(math.floor(p * pop.size))])


def equiprobable_points(spec: DistributionSpec, n: int) -> np.ndarray:
    """Quantiles of ``spec`` at probabilities (2i-1)/(2n), i = 1..n."""
    if n < 1:
        raise ValueError("n must be positive")
    probs = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    pts = np.asarray(spec.ppf(probs), dtype=float)
    # negative scale flips the ppf; it stays monotone but guard float ties anyway
    pts.sort()
    pts.flags.writeable = False
    return pts


def reduced_size(n: int) -> int:
    return math.isqrt(n - 1) + 1 if n > 1 else 1


def reduce_population(pop: np.ndarray) -> np.ndarray:
    """Keep ceil(sqrt(N)) samples at 1-based indices ceil((i - 1/2) * N / N')."""
    n = len(pop)
    if n == 0:
        raise InvalidPopulation("cannot reduce an empty population")
    k = reduced_size(n)
    # integer form of ceil((2i - 1) * n / (2k)) avoids float rounding at exact ties
    num = (2 * np.arange(1, k + 1) - 1) * n
    idx = -(-num // (2 * k))
    out = np.asarray(pop, dtype=float)[idx - 1]
    out.flags.writeable = False
    return out


def bounds(value: UncertainValue) -> tuple[float, float]:
    """Lower and upper bound of the value's support."""
    if value.spec is not None and not value.spec.finite_support:
        raise UnboundedSupport(f"{value.spec} has unbounded support")
    return value.min, value.max


def read_population(path, keep_order: bool = False) -> np.ndarray:
    """Read a sample file: one decimal per line, optional ``# n=<N>`` header.

    The result is sorted unless ``keep_order`` is set, in which case the
    samples come back in file order.
    """
    samples = []
    expected = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.fullmatch(r"#\s*n\s*=\s*(\d+)", line)
            if m:
                expected = int(m.group(1))
            continue
        try:
            samples.append(float(line))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: not a number: {line!r}") from exc
    if expected is not None and expected != len(samples):
        raise ParseError(f"{path}: header says n={expected}, found {len(samples)} samples")
    try:
        pop = as_population(samples)
    except InvalidPopulation as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return np.array(samples) if keep_order else pop


def write_population(path, pop, header: bool = True) -> None:
    lines = [f"# n={len(pop)}"] if header else []
    lines += [repr(float(s)) for s in pop]
    Path(path).write_text("\n".join(lines) + "\n")

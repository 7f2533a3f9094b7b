"""UDTLZ1-6: DTLZ problems with decision perturbation, noise and series truncation.

All problems minimize every objective over x in [0, 1]^n with n >= m. The
position variables x_m..x_n (k = n - m + 1 of them) feed the distance
function g.

* UDTLZ1: DTLZ1 with x_i perturbed by 0.001 * Beta(10 + i, 2 + i), clamped at 1.
* UDTLZ2: DTLZ2 plus Gaussian noise (sd 0.005) and sin/cos replaced by
  Maclaurin sums whose term count is drawn from {3, ..., 12}.
* UDTLZ3: as UDTLZ2 with the multimodal DTLZ3 distance function (its cosine
  is truncated too) and term counts from {12, ..., 19}.
* UDTLZ4: as UDTLZ2 with the angle inputs raised to the power 100.
* UDTLZ5: as UDTLZ2 with the degenerate angle mapping and g = sum x_i^0.1.
* UDTLZ6: the disconnected DTLZ front with Gaussian perturbation of every
  x_i, clamped to [0, 1].

``noise=False`` removes every random component and uses exact trigonometry;
it gives the deterministic DTLZ skeletons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from probdom.comparators import Sense
from probdom.errors import ConfigError, InvalidDecisionVector, UnknownProblem

HALF_PI = math.pi / 2


def truncated_sin(theta: float, terms: int) -> float:
    """First ``terms`` terms of the Maclaurin series of sin."""
    if terms < 1:
        raise ValueError("terms must be positive")
    total = 0.0
    term = theta
    sq = theta * theta
    for j in range(terms):
        total += term
        term *= -sq / ((2 * j + 2) * (2 * j + 3))
    return total


def truncated_cos(theta: float, terms: int) -> float:
    """First ``terms`` terms of the Maclaurin series of cos."""
    if terms < 1:
        raise ValueError("terms must be positive")
    total = 0.0
    term = 1.0
    sq = theta * theta
    for j in range(terms):
        total += term
        term *= -sq / ((2 * j + 1) * (2 * j + 2))
    return total


def _sphere(theta, g, cos, sin):
    """DTLZ2-style objectives from angles theta_1..theta_{m-1}."""
    m = len(theta) + 1
    scale = 1.0 + g
    cosines = [cos(t) for t in theta]
    out = []
    for i in range(1, m + 1):
        v = scale
        for j in range(m - i):
            v *= cosines[j]
        if i > 1:
            v *= sin(theta[m - i])
        out.append(v)
    return out


def _rastrigin_g(xs, cos):
    k = len(xs)
    return 100.0 * (k + sum((v - 0.5) ** 2 - cos(20 * math.pi * (v - 0.5)) for v in xs))


@dataclass(frozen=True)
class UncertainProblem:
    """A UDTLZ instance.

    ``exact_trig`` forces exact sin/cos while keeping the other noise sources;
    ``gaussian_param`` selects whether the UDTLZ6 perturbation parameter
    (10 + i) / 1000 is a variance or a standard deviation.
    """

    name: str
    n: int = 7
    m: int = 3
    noise: bool = True
    exact_trig: bool = False
    gaussian_param: str = "variance"

    def __post_init__(self):
        if self.name not in PROBLEMS:
            raise UnknownProblem(f"unknown problem {self.name!r}")
        if self.m < 2 or self.n < self.m:
            raise ConfigError(f"need m >= 2 and n >= m, got n={self.n}, m={self.m}")
        if self.gaussian_param not in ("variance", "std"):
            raise ConfigError("gaussian_param must be 'variance' or 'std'")

    @property
    def k(self) -> int:
        return self.n - self.m + 1

    @property
    def senses(self) -> tuple[Sense, ...]:
        return (Sense.MINIMIZE,) * self.m

    def check(self, x) -> list[float]:
        xs = [float(v) for v in np.asarray(x, dtype=float).ravel()]
        if len(xs) != self.n:
            raise InvalidDecisionVector(f"{self.name} expects {self.n} variables, got {len(xs)}")
        if not all(0.0 <= v <= 1.0 for v in xs):
            raise InvalidDecisionVector("decision variables must lie in [0, 1]")
        return xs

    def evaluate_once(self, x, rng: np.random.Generator) -> np.ndarray:
        """One stochastic draw of all m objectives."""
        return np.array(PROBLEMS[self.name](self, self.check(x), rng))

    def sample_matrix(self, x, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` independent draws in draw order, shape (count, m)."""
        if count < 1:
            raise ValueError("sample count must be positive")
        xs = self.check(x)
        fn = PROBLEMS[self.name]
        return np.array([fn(self, xs, rng) for _ in range(count)], dtype=float).reshape(count, self.m)

    def evaluate_population(self, x, count: int, rng: np.random.Generator) -> list[np.ndarray]:
        """One sorted sample population per objective."""
        draws = self.sample_matrix(x, count, rng)
        return [np.sort(draws[:, i]) for i in range(self.m)]


def evaluate_once(problem: UncertainProblem, x, rng) -> np.ndarray:
    return problem.evaluate_once(x, rng)


def evaluate_population(problem: UncertainProblem, x, count: int, rng) -> list[np.ndarray]:
    return problem.evaluate_population(x, count, rng)


def _trig(problem, rng, lo, hi):
    """sin/cos pair for one evaluation; the term count is shared by both."""
    if not problem.noise or problem.exact_trig:
        return math.sin, math.cos
    terms = int(rng.integers(lo, hi + 1))
    return (lambda t: truncated_sin(t, terms)), (lambda t: truncated_cos(t, terms))


def _function_noise(problem, rng):
    return float(rng.normal(0.0, 0.005)) if problem.noise else 0.0


def _udtlz1(p, xs, rng):
    m, n = p.m, p.n
    if p.noise:
        i = np.arange(1, n + 1)
        u = rng.beta(10.0 + i, 2.0 + i)
        xt = [min(v + 0.001 * ui, 1.0) for v, ui in zip(xs, u)]
    else:
        xt = xs
    g = _rastrigin_g(xt[m - 1:], math.cos)
    out = []
    for i in range(1, m + 1):
        v = 0.5 * (1.0 + g)
        for j in range(m - i):
            v *= xs[j]
        if i > 1:
            v *= 1.0 - xs[m - i]
        out.append(v)
    return out


def _udtlz2(p, xs, rng):
    sin, cos = _trig(p, rng, 3, 12)
    u1 = _function_noise(p, rng)
    g = sum((v - 0.5) ** 2 for v in xs[p.m - 1:])
    theta = [HALF_PI * v for v in xs[: p.m - 1]]
    return [f + u1 for f in _sphere(theta, g, cos, sin)]


def _udtlz3(p, xs, rng):
    sin, cos = _trig(p, rng, 12, 19)
    u1 = _function_noise(p, rng)
    g = _rastrigin_g(xs[p.m - 1:], cos)
    theta = [HALF_PI * v for v in xs[: p.m - 1]]
    return [f + u1 for f in _sphere(theta, g, cos, sin)]


def _udtlz4(p, xs, rng):
    sin, cos = _trig(p, rng, 3, 12)
    u1 = _function_noise(p, rng)
    g = sum((v - 0.5) ** 2 for v in xs[p.m - 1:])
    theta = [HALF_PI * v**100 for v in xs[: p.m - 1]]
    return [f + u1 for f in _sphere(theta, g, cos, sin)]


def _udtlz5(p, xs, rng):
    sin, cos = _trig(p, rng, 3, 12)
    u1 = _function_noise(p, rng)
    g = sum(v**0.1 for v in xs[p.m - 1:])
    theta = [HALF_PI * xs[0]]
    theta += [math.pi * (1 + 2 * g * v) / (4 * (1 + g)) for v in xs[1: p.m - 1]]
    return [f + u1 for f in _sphere(theta, g, cos, sin)]


def _udtlz6(p, xs, rng):
    m, n = p.m, p.n
    if p.noise:
        i = np.arange(1, n + 1)
        param = (10.0 + i) / 1000.0
        sd = np.sqrt(param) if p.gaussian_param == "variance" else param
        u = rng.normal(0.0, sd)
        xt = [max(min(v + ui, 1.0), 0.0) for v, ui in zip(xs, u)]
    else:
        xt = xs
    f = xt[: m - 1]
    g = 1.0 + 9.0 / p.k * sum(xt[m - 1:])
    h = m - sum(fi / (1.0 + g) * (1.0 + math.sin(3 * math.pi * fi)) for fi in f)
    return list(f) + [(1.0 + g) * h]


PROBLEMS = {
    "udtlz1": _udtlz1,
    "udtlz2": _udtlz2,
    "udtlz3": _udtlz3,
    "udtlz4": _udtlz4,
    "udtlz5": _udtlz5,
    "udtlz6": _udtlz6,
}


def registry_lookup(name: str, **overrides) -> UncertainProblem:
    """Problem by name with the default n = 7, m = 3 unless overridden."""
    key = name.strip().lower()
    if key not in PROBLEMS:
        raise UnknownProblem(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")
    return replace(UncertainProblem(key), **overrides)


def parse_overrides(items) -> dict:
    """Turn ``["n=12", "m=3", "noise=off"]`` into UncertainProblem keyword arguments."""
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        key, val = key.strip(), val.strip().lower()
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        if key in ("n", "m"):
            try:
                out[key] = int(val)
            except ValueError as exc:
                raise ConfigError(f"override {item!r} needs an integer") from exc
        elif key == "noise":
            if val not in ("on", "off"):
                raise ConfigError("noise must be 'on' or 'off'")
            out["noise"] = val == "on"
        elif key == "trig":
            if val not in ("exact", "series"):
                raise ConfigError("trig must be 'exact' or 'series'")
            out["exact_trig"] = val == "exact"
        elif key == "gaussian":
            out["gaussian_param"] = val
        else:
            raise ConfigError(f"unknown problem override {key!r}")
    return out

"""Pareto dominance between candidate solutions with uncertain objectives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from probdom.comparators import Decision, Operator, Sense
from probdom.errors import IncompatibleIndividuals
from probdom.uncertain import UncertainValue


@dataclass(eq=False)
class Individual:
    """Decision vector plus one uncertain value per objective.

    ``rank`` and ``crowding`` are bookkeeping filled in by the optimizer.
    """

    x: np.ndarray
    objectives: tuple[UncertainValue, ...]
    rank: int = 0
    crowding: float = 0.0
    uid: int = 0
    means: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.objectives = tuple(self.objectives)
        self.means = np.array([v.mean for v in self.objectives])

    @property
    def m(self) -> int:
        return len(self.objectives)


def _senses(senses, m):
    if senses is None:
        return (Sense.MINIMIZE,) * m
    if len(senses) != m:
        raise IncompatibleIndividuals(f"{len(senses)} senses for {m} objectives")
    return tuple(senses)


def _check(a: Individual, b: Individual):
    if a.m != b.m or a.x.shape != b.x.shape:
        raise IncompatibleIndividuals(
            f"individuals differ in shape: n={a.x.size}/{b.x.size}, m={a.m}/{b.m}"
        )


def objective_decisions(a: Individual, b: Individual, op: Operator, senses=None) -> list[Decision]:
    _check(a, b)
    senses = _senses(senses, a.m)
    return [op.decision(fa, fb, s) for fa, fb, s in zip(a.objectives, b.objectives, senses)]


def dominates(a: Individual, b: Individual, op: Operator, senses: Sequence[Sense] | None = None) -> bool:
    """True if ``a`` is better or indifferent on every objective and better on one.

    Objectives are minimized unless ``senses`` says otherwise.
    """
    _check(a, b)
    senses = _senses(senses, a.m)
    strict = False
    for fa, fb, sense in zip(a.objectives, b.objectives, senses):
        d = op.decision(fa, fb, sense)
        if d is Decision.WORSE:
            return False
        strict = strict or d is Decision.BETTER
    return strict


def dominance_probability_independent(
    a: Individual, b: Individual, op: Operator, senses: Sequence[Sense] | None = None
) -> float:
    """Product over objectives of the probability that ``a`` is the better one.

    Only meaningful when the objectives are statistically independent.
    """
    if not op.probabilistic:
        raise TypeError(f"operator {op.name!r} does not produce probabilities")
    _check(a, b)
    senses = _senses(senses, a.m)
    probs = []
    for fa, fb, sense in zip(a.objectives, b.objectives, senses):
        probs.append(op.p_greater(fa, fb) if sense == Sense.MAXIMIZE else op.p_greater(fb, fa))
    return math.prod(probs)


def non_dominated_filter(pop: Sequence[Individual], op: Operator, senses=None) -> list[Individual]:
    """Members of ``pop`` that no other member dominates, in their original order."""
    return [
        p for i, p in enumerate(pop)
        if not any(dominates(q, p, op, senses) for j, q in enumerate(pop) if j != i)
    ]

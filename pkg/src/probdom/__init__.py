"""Comparison operators for uncertain objective values.

The package estimates the probability that one uncertain value beats
another from closed-form distributions or sample populations, turns those
estimates into Pareto dominance decisions, and uses them inside NSGA-II on
the noisy UDTLZ benchmark family.
"""

from probdom.comparators import (
    OPERATOR_IDS,
    ComparisonReport,
    Decision,
    OperatorConfig,
    Sense,
    count_greater_pairs,
    get_operator,
    oracle_dominance,
)
from probdom.dominance import Individual, dominates, non_dominated_filter
from probdom.uncertain import DistributionSpec, UncertainValue, parse_spec

__all__ = [
    "OPERATOR_IDS",
    "ComparisonReport",
    "Decision",
    "DistributionSpec",
    "Individual",
    "OperatorConfig",
    "Sense",
    "UncertainValue",
    "count_greater_pairs",
    "dominates",
    "get_operator",
    "non_dominated_filter",
    "oracle_dominance",
    "parse_spec",
]
__version__ = "0.1.0"

"""Exception hierarchy shared by all probdom modules."""


class ProbDomError(Exception):
    """Base class for every error raised by probdom."""


class InvalidPopulation(ProbDomError, ValueError):
    """Sample population is empty or holds non-finite values."""


class InvalidDistribution(ProbDomError, ValueError):
    """Distribution parameters violate the family's constraints."""


class InvalidProbability(ProbDomError, ValueError):
    pass


class ParseError(ProbDomError, ValueError):
    """Text could not be parsed as a distribution or sample file."""


class RepresentationError(ProbDomError):
    """An operation does not accept the given value representation."""


class DegenerateVariance(RepresentationError):
    """Unbiased variance requested for a single-sample population."""


class WrongRepresentation(RepresentationError):
    pass


class UnboundedSupport(RepresentationError):
    pass


class PairingError(RepresentationError):
    """Pairwise comparison needs equally long draw-ordered samples."""


class IncompatibleHistograms(RepresentationError):
    pass


class IncompatibleIndividuals(ProbDomError, ValueError):
    pass


class InvalidDecisionVector(ProbDomError, ValueError):
    pass


class UnknownProblem(ProbDomError, KeyError):
    pass


class UnknownOperator(ProbDomError, KeyError):
    pass


class ConfigError(ProbDomError, ValueError):
    pass


class IndicatorDomainError(ProbDomError, ValueError):
    pass


class EmptyReference(ProbDomError, ValueError):
    pass


class MissingBounds(ProbDomError, ValueError):
    pass


class NoRuns(ProbDomError, ValueError):
    pass

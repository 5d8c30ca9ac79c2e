# utils/errors.py
"""Exceptions raised by the scalenet library."""


class ScalenetError(Exception):
    """Base class for every error raised on purpose by this package."""


class ParameterError(ScalenetError, ValueError):
    """A precondition on an argument does not hold."""


class OutsideRegionError(ParameterError):
    """A point lies outside the disk it is supposed to be in."""


class DivergentSeriesError(ParameterError):
    pass


class SamplingStarvedError(ScalenetError):
    """Monte Carlo sampling produced no hit where at least one was needed."""


class CriterionNotEnsuredError(ScalenetError):
    """A (C, D) pair has no power margin left for the SINR criterion."""


class RegimeError(ScalenetError):
    """Parameters fall outside the range where the construction applies."""


class ScheduleError(ScalenetError):
    pass
